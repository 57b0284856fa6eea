// SPDX-License-Identifier: Apache-2.0
//
// irsma - IRS-assisted movable-antenna downlink simulation library
// Copyright (C) 2026 The irsma authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <doctest.h>

#include <set>
#include <sstream>

#include "irsma/harness.hpp"

using namespace irsma;

namespace
{
    std::string records_csv(const SweepResult &r)
    {
        std::ostringstream os;
        write_records_csv(os, r);
        return os.str();
    }
}

TEST_CASE("scheme names")
{
    for (Scheme s : all_schemes())
        CHECK(scheme_from_string(to_string(s)) == s);
    CHECK(to_string(Scheme::ma_rps) == "MA_RPS");
    CHECK(all_schemes().size() == 5);
    CHECK_THROWS_AS(scheme_from_string("MA"), invalid_parameter);
    CHECK(sweep_parameter_from_string("num_paths") == SweepParameter::num_paths);
    CHECK_THROWS_AS(sweep_parameter_from_string("snr"), invalid_parameter);
}

TEST_CASE("solver options from json")
{
    SolverOptions o;
    from_json(nlohmann::json{{"mu_max_outer", 7}, {"cg_tolerance", 1e-4}, {"precoder_refresh", 0}, {"wmmse_full_power", false}}, o);
    CHECK(o.mu.max_outer == 7);
    CHECK(o.mu.cg.tolerance == 1e-4);
    CHECK(o.mu.sequential.precoder_refresh == 0);
    CHECK_FALSE(o.mu.wmmse.full_power);
    CHECK_THROWS_AS(from_json(nlohmann::json{{"cg_tol", 1.0}}, o), invalid_parameter);
}

TEST_CASE("sweep spec")
{
    SweepSpec s;
    from_json(nlohmann::json{{"parameter", "region_length"}, {"values", {0.3, 0.6}}, {"schemes", {"FPA", "PROPOSED"}},
                             {"realizations", 4}, {"seed", 9}},
              s);
    CHECK(s.parameter == SweepParameter::region_length);
    CHECK(s.values.size() == 2);
    CHECK(s.schemes == std::vector<Scheme>{Scheme::fpa, Scheme::proposed});
    CHECK(s.realizations == 4);
    CHECK(s.seed == 9);
    SweepSpec t;
    CHECK_THROWS_AS(from_json(nlohmann::json{{"values", nlohmann::json::array()}, {"schemes", {"FPA"}}}, t),
                    invalid_parameter);
    CHECK_THROWS_AS(from_json(nlohmann::json{{"value", {1.0}}}, t), invalid_parameter);
}

TEST_CASE("parameter application")
{
    const Scenario s;
    CHECK(apply(s, SweepParameter::bs_irs_distance, 2.0).bs_irs_distance() == doctest::Approx(2.0));
    CHECK(apply(s, SweepParameter::region_length, 0.3).region_length == 0.3);
    CHECK(apply(s, SweepParameter::num_paths, 7.0).num_paths == 7);
    CHECK_THROWS_AS(apply(s, SweepParameter::num_paths, 1.5), invalid_parameter);
}

TEST_CASE("antenna-selection grid is a D_min-spaced subset of the MA grid")
{
    const Scenario s;
    const SamplingGrid as = antenna_selection_grid(s);
    const SamplingGrid ma = s.grid();
    CHECK(as.size() == 21);
    CHECK(as.spacing() >= s.min_spacing);
    CHECK(as.min_index_gap() == 1);
    for (std::size_t i = 0; i < as.size(); ++i)
    {
        bool found = false;
        for (std::size_t l = 0; l < ma.size() && !found; ++l)
            found = std::abs(ma.offset(l) - as.offset(i)) < 1e-12;
        CHECK(found);
    }
}

TEST_CASE("instance")
{
    const Scenario s;
    const Instance inst = make_instance(s, 2);
    const auto pts = s.grid().points();
    CHECK(inst.channels.digest(pts) == draw_channels(s, 2).digest(pts));
    CHECK(inst.ula.is_feasible(s.region(), s.min_spacing));
    CHECK(inst.ula.size() == s.num_mas);
    CHECK(inst.grid.size() == 101);
}

TEST_CASE("scheme orderings on shared instances")
{
    for (std::size_t users : {std::size_t(1), std::size_t(3)})
    {
        Scenario s;
        s.num_users = users;
        double fpa_sum = 0.0, rps_sum = 0.0;
        for (std::uint64_t r = 0; r < 4; ++r)
        {
            const Instance inst = make_instance(s, r);
            const SchemeOutcome fpa = run_scheme(Scheme::fpa, inst);
            const SchemeOutcome pro = run_scheme(Scheme::proposed, inst, {}, &fpa);
            const SchemeOutcome as = run_scheme(Scheme::as, inst, {}, &fpa);
            const SchemeOutcome rps = run_scheme(Scheme::fpa_rps, inst);
            const SchemeOutcome marps = run_scheme(Scheme::ma_rps, inst);
            CHECK(pro.sum_rate >= fpa.sum_rate);
            CHECK(as.sum_rate >= fpa.sum_rate);
            CHECK(marps.sum_rate >= rps.sum_rate);
            CHECK(pro.apv.is_feasible(s.region(), s.min_spacing));
            CHECK(as.apv.is_feasible(s.region(), s.min_spacing));
            // the random-phase schemes never touch the reflection
            CHECK(marps.reflection.coefficients() == inst.random_reflection.coefficients());
            CHECK(rps.apv.positions == inst.ula.positions);
            for (std::size_t i = 1; i < pro.trace.size(); ++i)
                CHECK(pro.trace[i] >= pro.trace[i - 1]);
            fpa_sum += fpa.sum_rate;
            rps_sum += rps.sum_rate;
            if (users == 1)
                CHECK(pro.sum_rate == doctest::Approx(std::log2(1 + pro.snr)));
        }
        CHECK(fpa_sum > rps_sum);
    }
    const Instance inst = make_instance(Scenario(), 0);
    const SchemeOutcome notfpa = run_scheme(Scheme::fpa_rps, inst);
    CHECK_THROWS_AS(run_scheme(Scheme::proposed, inst, {}, &notfpa), invalid_parameter);
}

TEST_CASE("sweep records, determinism and threading")
{
    Scenario s;
    SweepSpec spec;
    spec.values = {2.0, 6.0};
    spec.schemes = all_schemes();
    spec.realizations = 3;
    spec.seed = 11;

    const SweepResult a = run_sweep(spec, s, {}, 1);
    const SweepResult b = run_sweep(spec, s, {}, 1);
    const SweepResult c = run_sweep(spec, s, {}, 4);
    CHECK(a.records.size() == 2 * 5 * 3);
    CHECK(a.failed() == 0);
    CHECK(records_csv(a) == records_csv(b));
    CHECK(records_csv(a) == records_csv(c));

    std::set<std::uint64_t> digests;
    for (std::size_t i = 0; i < a.records.size(); ++i)
    {
        CHECK(a.records[i].channel_digest == c.records[i].channel_digest);
        digests.insert(a.records[i].channel_digest);
    }
    // one channel set per (value, realization) cell
    CHECK(digests.size() == 6);

    // schemes of one cell share channels
    for (std::size_t cell = 0; cell < 6; ++cell)
        for (std::size_t k = 1; k < 5; ++k)
            CHECK(a.records[cell * 5 + k].channel_digest == a.records[cell * 5].channel_digest);

    const auto rows = summarize(a);
    CHECK(rows.size() == 10);
    for (const auto &row : rows)
        CHECK(row.count == 3);

    std::ostringstream ss, ts;
    write_summary_csv(ss, rows);
    write_timing_csv(ts, a);
    CHECK(ss.str().rfind("scheme,param,metric,mean,half_width,count,failed\n", 0) == 0);
    CHECK(ts.str().rfind("scheme,param,realization,wall_seconds,error\n", 0) == 0);
    CHECK(records_csv(a).rfind("scheme,param,realization,metric,value\nPROPOSED,2,0,sum_rate,", 0) == 0);

    // another seed gives other channels
    SweepSpec other = spec;
    other.seed = 12;
    CHECK(run_sweep(other, s, {}, 2).records[0].channel_digest != a.records[0].channel_digest);
}

TEST_CASE("failed cells are recorded, not thrown")
{
    Scenario s;
    SweepSpec spec;
    spec.parameter = SweepParameter::region_length;
    spec.values = {0.05, 0.6};
    spec.schemes = {Scheme::fpa};
    spec.realizations = 1;
    const SweepResult r = run_sweep(spec, s, {}, 1);
    REQUIRE(r.records.size() == 2);
    CHECK_FALSE(r.records[0].ok);
    CHECK(r.records[1].ok);
    CHECK(r.failed() == 1);
    CHECK(records_csv(r).find("FPA,0.050000000000000003,0,failed,1\n") != std::string::npos);
    const auto rows = summarize(r);
    CHECK(rows[0].failed == 1);
    CHECK(rows[0].count == 0);
}

TEST_CASE("summary statistics")
{
    auto [m1, h1] = mean_and_half_width({2.0, 4.0});
    CHECK(m1 == 3.0);
    CHECK(h1 == doctest::Approx(1.96 * std::sqrt(2.0) / std::sqrt(2.0)));
    auto [m2, h2] = mean_and_half_width({5.0});
    CHECK(m2 == 5.0);
    CHECK(h2 == 0.0);
    auto [m3, h3] = mean_and_half_width({1.5, 1.5, 1.5});
    CHECK(m3 == 1.5);
    CHECK(h3 == 0.0);
    CHECK_THROWS_AS(mean_and_half_width({}), invalid_parameter);
}
