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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "irsma/mu_opt.hpp"
#include "irsma/scenario.hpp"
#include "irsma/su_opt.hpp"

namespace irsma
{
    enum class Scheme
    {
        proposed, // full AO
        fpa,      // fixed ULA, W and phi optimised
        as,       // antenna selection: positions restricted to a D_min-spaced grid
        ma_rps,   // random phi frozen, W and T optimised
        fpa_rps   // random phi frozen, fixed ULA, W optimised
    };

    std::string to_string(Scheme s);
    Scheme scheme_from_string(const std::string &s);
    const std::vector<Scheme> &all_schemes();

    struct SolverOptions
    {
        su::SuOptions su;
        mu::AoOptions mu;
    };

    void from_json(const nlohmann::json &j, SolverOptions &o);

    // Everything a realisation needs, drawn once and shared by all schemes.
    struct Instance
    {
        Scenario scenario;
        std::uint64_t realization = 0;
        ChannelSet channels;
        Reflection initial_reflection;
        Reflection random_reflection;
        Apv ula;
        SamplingGrid grid;
        SamplingGrid as_grid;
    };

    Instance make_instance(const Scenario &s, std::uint64_t realization);

    // Antenna-selection grid: the sampling grid rebuilt with delta_s = D_min (both end points included). It is
    // a subset of the MA grid whenever round(A / delta_s) is a multiple of round(A / D_min), as in the defaults.
    SamplingGrid antenna_selection_grid(const Scenario &s);

    struct SchemeOutcome
    {
        Scheme scheme = Scheme::fpa;
        double sum_rate = 0.0; // bits/s/Hz, log2(1 + SNR) for K = 1
        double snr = 0.0;      // K = 1 only
        std::size_t iterations = 0;
        Reflection reflection;
        Apv apv;
        CMat w;
        std::vector<double> trace; // objective after every outer iteration, entry 0 is the start point
    };

    // Runs one scheme. K = 1 uses the single-user AO, K > 1 the multi-user AO. PROPOSED and AS start from
    // the converged FPA point, which is recomputed unless `fpa` is supplied.
    SchemeOutcome run_scheme(Scheme scheme, const Instance &inst, const SolverOptions &opt = {},
                             const SchemeOutcome *fpa = nullptr);

    // ---------------------------------------------------------------------------------------------

    enum class SweepParameter
    {
        bs_irs_distance,
        region_length,
        num_paths
    };

    std::string to_string(SweepParameter p);
    SweepParameter sweep_parameter_from_string(const std::string &s);

    // Copy of `s` with the swept parameter set to `value`.
    Scenario apply(const Scenario &s, SweepParameter p, double value);

    struct SweepSpec
    {
        SweepParameter parameter = SweepParameter::bs_irs_distance;
        std::vector<double> values;
        std::vector<Scheme> schemes;
        std::size_t realizations = 50;
        std::uint64_t seed = 1;

        void validate() const;
    };

    void from_json(const nlohmann::json &j, SweepSpec &s);

    struct SweepRecord
    {
        Scheme scheme = Scheme::fpa;
        double param = 0.0;
        std::size_t realization = 0;
        bool ok = true;
        std::string error;
        double sum_rate = 0.0;
        double snr = 0.0;
        std::size_t iterations = 0;
        double wall_seconds = 0.0;
        std::uint64_t channel_digest = 0;
    };

    struct SweepResult
    {
        SweepParameter parameter = SweepParameter::bs_irs_distance;
        std::size_t num_users = 1;
        std::vector<SweepRecord> records; // ordered by (value, realization, scheme order in the spec)
        std::size_t failed() const;
    };

    // threads = 0 picks the hardware concurrency. Output is independent of the thread count.
    SweepResult run_sweep(const SweepSpec &spec, const Scenario &scenario, const SolverOptions &opt = {},
                          std::size_t threads = 1);

    struct SummaryRow
    {
        Scheme scheme;
        double param;
        double mean;
        double half_width; // 1.96 s / sqrt(n)
        std::size_t count;
        std::size_t failed;
    };

    std::vector<SummaryRow> summarize(const SweepResult &r);

    // scheme,param,realization,metric,value. Wall times go to a separate file so that reruns are
    // byte-identical.
    void write_records_csv(std::ostream &os, const SweepResult &r);
    void write_summary_csv(std::ostream &os, const std::vector<SummaryRow> &rows);
    void write_timing_csv(std::ostream &os, const SweepResult &r);

    // Mean and normal-approximation 95% half-width of a sample.
    std::pair<double, double> mean_and_half_width(const std::vector<double> &v);
}
