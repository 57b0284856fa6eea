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

#include "irsma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

namespace irsma
{
    std::string to_string(Scheme s)
    {
        switch (s)
        {
        case Scheme::proposed:
            return "PROPOSED";
        case Scheme::fpa:
            return "FPA";
        case Scheme::as:
            return "AS";
        case Scheme::ma_rps:
            return "MA_RPS";
        case Scheme::fpa_rps:
            return "FPA_RPS";
        }
        return "UNKNOWN";
    }

    Scheme scheme_from_string(const std::string &s)
    {
        for (Scheme c : all_schemes())
            if (to_string(c) == s)
                return c;
        throw invalid_parameter("unknown scheme '" + s + "'");
    }

    const std::vector<Scheme> &all_schemes()
    {
        static const std::vector<Scheme> v{Scheme::proposed, Scheme::fpa, Scheme::as, Scheme::ma_rps,
                                           Scheme::fpa_rps};
        return v;
    }

    void from_json(const nlohmann::json &j, SolverOptions &o)
    {
        static const std::set<std::string> known = {"su_eps_bcd", "su_eps_outer", "su_max_outer", "mu_eps_outer",
                                                    "mu_max_outer", "wmmse_tolerance", "wmmse_max_iterations",
                                                    "cg_tolerance", "cg_max_iterations", "sequential_sweeps",
                                                    "precoder_refresh", "wmmse_full_power"};
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!known.count(it.key()))
                throw invalid_parameter("unknown solver key '" + it.key() + "'");
        auto get = [&j](const char *key, auto &dst)
        {
            if (j.contains(key))
                dst = j.at(key).get<std::remove_reference_t<decltype(dst)>>();
        };
        get("su_eps_bcd", o.su.eps_bcd);
        get("su_eps_outer", o.su.eps_outer);
        get("su_max_outer", o.su.max_outer);
        get("mu_eps_outer", o.mu.tolerance);
        get("mu_max_outer", o.mu.max_outer);
        get("wmmse_tolerance", o.mu.wmmse.tolerance);
        get("wmmse_max_iterations", o.mu.wmmse.max_iterations);
        get("wmmse_full_power", o.mu.wmmse.full_power);
        get("cg_tolerance", o.mu.cg.tolerance);
        get("cg_max_iterations", o.mu.cg.max_iterations);
        get("sequential_sweeps", o.mu.sequential.sweeps);
        get("precoder_refresh", o.mu.sequential.precoder_refresh);
    }

    SamplingGrid antenna_selection_grid(const Scenario &s)
    {
        return SamplingGrid(s.region(), s.min_spacing, s.min_spacing);
    }

    Instance make_instance(const Scenario &s, std::uint64_t realization)
    {
        s.validate();
        return Instance{s,
                        realization,
                        draw_channels(s, realization),
                        draw_initial_reflection(s, realization),
                        draw_random_reflection(s, realization),
                        uniform_linear_layout(s.region(), s.num_mas, s.min_spacing),
                        s.grid(),
                        antenna_selection_grid(s)};
    }

    namespace
    {
        SchemeOutcome from_su(Scheme scheme, const su::SuSolution &sol)
        {
            SchemeOutcome o;
            o.scheme = scheme;
            o.snr = sol.snr;
            o.sum_rate = std::log2(1.0 + sol.snr);
            o.iterations = sol.iterations;
            o.reflection = sol.reflection;
            o.apv = sol.apv;
            o.w = sol.beamformer;
            for (const auto &e : sol.trace)
            {
                if (o.trace.empty())
                    o.trace.push_back(e.snr_after_reflection);
                o.trace.push_back(e.snr_after_positions);
            }
            return o;
        }

        SchemeOutcome from_mu(Scheme scheme, const mu::AoSolution &sol)
        {
            SchemeOutcome o;
            o.scheme = scheme;
            o.sum_rate = sol.sum_rate;
            o.iterations = sol.iterations;
            o.reflection = sol.reflection;
            o.apv = sol.apv;
            o.w = sol.w;
            o.trace.push_back(sol.initial_rate);
            for (const auto &e : sol.trace)
                o.trace.push_back(e.after_positions);
            return o;
        }

        SchemeOutcome run_single_user(Scheme scheme, const Instance &inst, const SolverOptions &opt,
                                      const SchemeOutcome *fpa)
        {
            const Scenario &s = inst.scenario;
            const CVec h = inst.channels.irs_user.col(0);
            su::SuOptions o = opt.su;
            auto run = [&](const SamplingGrid &grid, const Reflection &phi, const Apv &apv, bool refl, bool pos)
            {
                o.optimize_reflection = refl;
                o.optimize_positions = pos;
                return su::ao_single_user(inst.channels.bs_irs, h, grid, s.transmit_power, s.noise_power, phi, apv, o);
            };
            switch (scheme)
            {
            case Scheme::fpa:
                return from_su(scheme, run(inst.grid, inst.initial_reflection, inst.ula, true, false));
            case Scheme::proposed:
            case Scheme::as:
            {
                SchemeOutcome base = fpa ? *fpa : run_single_user(Scheme::fpa, inst, opt, nullptr);
                const SamplingGrid &grid = scheme == Scheme::proposed ? inst.grid : inst.as_grid;
                return from_su(scheme, run(grid, base.reflection, base.apv, true, true));
            }
            case Scheme::ma_rps:
                return from_su(scheme, run(inst.grid, inst.random_reflection, inst.ula, false, true));
            case Scheme::fpa_rps:
                return from_su(scheme, run(inst.grid, inst.random_reflection, inst.ula, false, false));
            }
            throw invalid_parameter("unknown scheme");
        }

        SchemeOutcome run_multi_user(Scheme scheme, const Instance &inst, const SolverOptions &opt,
                                     const SchemeOutcome *fpa)
        {
            const Scenario &s = inst.scenario;
            mu::AoOptions o = opt.mu;
            auto run = [&](const SamplingGrid &grid, const CMat &w, const Reflection &phi, const Apv &apv, bool refl,
                           bool pos)
            {
                o.optimize_reflection = refl;
                o.optimize_positions = pos;
                return mu::ao_multi_user(inst.channels, grid, s.transmit_power, s.noise_power, s.min_spacing, w, phi,
                                         apv, o);
            };
            auto start_w = [&](const Reflection &phi)
            { return mu::wmmse_initial(inst.channels.cascaded(phi, inst.ula), s.transmit_power); };

            switch (scheme)
            {
            case Scheme::fpa:
                return from_mu(scheme, run(inst.grid, start_w(inst.initial_reflection), inst.initial_reflection,
                                           inst.ula, true, false));
            case Scheme::proposed:
            case Scheme::as:
            {
                SchemeOutcome base = fpa ? *fpa : run_multi_user(Scheme::fpa, inst, opt, nullptr);
                const SamplingGrid &grid = scheme == Scheme::proposed ? inst.grid : inst.as_grid;
                return from_mu(scheme, run(grid, base.w, base.reflection, base.apv, true, true));
            }
            case Scheme::ma_rps:
                return from_mu(scheme, run(inst.grid, start_w(inst.random_reflection), inst.random_reflection,
                                           inst.ula, false, true));
            case Scheme::fpa_rps:
                return from_mu(scheme, run(inst.grid, start_w(inst.random_reflection), inst.random_reflection,
                                           inst.ula, false, false));
            }
            throw invalid_parameter("unknown scheme");
        }
    }

    SchemeOutcome run_scheme(Scheme scheme, const Instance &inst, const SolverOptions &opt, const SchemeOutcome *fpa)
    {
        if (fpa && fpa->scheme != Scheme::fpa)
            throw invalid_parameter("run_scheme: warm start must come from the FPA scheme");
        if (inst.scenario.num_users == 1)
            return run_single_user(scheme, inst, opt, fpa);
        return run_multi_user(scheme, inst, opt, fpa);
    }

    // ---------------------------------------------------------------------------------------------

    std::string to_string(SweepParameter p)
    {
        switch (p)
        {
        case SweepParameter::bs_irs_distance:
            return "bs_irs_distance";
        case SweepParameter::region_length:
            return "region_length";
        case SweepParameter::num_paths:
            return "num_paths";
        }
        return "unknown";
    }

    SweepParameter sweep_parameter_from_string(const std::string &s)
    {
        if (s == "bs_irs_distance")
            return SweepParameter::bs_irs_distance;
        if (s == "region_length")
            return SweepParameter::region_length;
        if (s == "num_paths")
            return SweepParameter::num_paths;
        throw invalid_parameter("unknown sweep parameter '" + s + "'");
    }

    Scenario apply(const Scenario &s, SweepParameter p, double value)
    {
        Scenario out = s;
        switch (p)
        {
        case SweepParameter::bs_irs_distance:
            out = s.with_bs_irs_distance(value);
            break;
        case SweepParameter::region_length:
            out.region_length = value;
            break;
        case SweepParameter::num_paths:
            if (value < 0.0 || value != std::floor(value))
                throw invalid_parameter("num_paths must be a non-negative integer");
            out.num_paths = std::size_t(value);
            break;
        }
        out.validate();
        return out;
    }

    void SweepSpec::validate() const
    {
        if (values.empty())
            throw invalid_parameter("SweepSpec: no values");
        if (schemes.empty())
            throw invalid_parameter("SweepSpec: no schemes");
        if (realizations == 0)
            throw invalid_parameter("SweepSpec: realizations must be >= 1");
    }

    void from_json(const nlohmann::json &j, SweepSpec &s)
    {
        static const std::set<std::string> known = {"parameter", "values", "schemes", "realizations", "seed"};
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!known.count(it.key()))
                throw invalid_parameter("unknown sweep key '" + it.key() + "'");
        if (j.contains("parameter"))
            s.parameter = sweep_parameter_from_string(j.at("parameter").get<std::string>());
        if (j.contains("values"))
            s.values = j.at("values").get<std::vector<double>>();
        if (j.contains("schemes"))
        {
            s.schemes.clear();
            for (const auto &n : j.at("schemes"))
                s.schemes.push_back(scheme_from_string(n.get<std::string>()));
        }
        if (j.contains("realizations"))
            s.realizations = j.at("realizations").get<std::size_t>();
        if (j.contains("seed"))
            s.seed = j.at("seed").get<std::uint64_t>();
        s.validate();
    }

    std::size_t SweepResult::failed() const
    {
        return std::size_t(std::count_if(records.begin(), records.end(), [](const SweepRecord &r) { return !r.ok; }));
    }

    SweepResult run_sweep(const SweepSpec &spec, const Scenario &scenario, const SolverOptions &opt,
                          std::size_t threads)
    {
        spec.validate();
        Scenario base = scenario;
        base.master_seed = spec.seed;

        const std::size_t n_schemes = spec.schemes.size();
        const std::size_t n_cells = spec.values.size() * spec.realizations;

        SweepResult res;
        res.parameter = spec.parameter;
        res.num_users = base.num_users;
        res.records.resize(n_cells * n_schemes);

        auto run_cell = [&](std::size_t cell)
        {
            const std::size_t vi = cell / spec.realizations;
            const std::size_t r = cell % spec.realizations;
            const double value = spec.values[vi];
            SweepRecord *out = &res.records[cell * n_schemes];
            for (std::size_t si = 0; si < n_schemes; ++si)
            {
                out[si] = SweepRecord{};
                out[si].scheme = spec.schemes[si];
                out[si].param = value;
                out[si].realization = r;
            }

            std::optional<Instance> inst;
            std::uint64_t digest = 0;
            std::vector<Vec3> probe;
            try
            {
                inst.emplace(make_instance(apply(base, spec.parameter, value), r));
                probe = inst->grid.points();
                digest = inst->channels.digest(probe);
            }
            catch (const std::exception &e)
            {
                for (std::size_t si = 0; si < n_schemes; ++si)
                {
                    out[si].ok = false;
                    out[si].error = e.what();
                }
                return;
            }

            std::optional<SchemeOutcome> fpa;
            for (std::size_t si = 0; si < n_schemes; ++si)
            {
                SweepRecord &rec = out[si];
                const auto t0 = std::chrono::steady_clock::now();
                try
                {
                    const Scheme sc = spec.schemes[si];
                    const bool needs_fpa = sc == Scheme::proposed || sc == Scheme::as || sc == Scheme::fpa;
                    SchemeOutcome o;
                    if (needs_fpa && !fpa)
                        fpa = run_scheme(Scheme::fpa, *inst, opt);
                    if (sc == Scheme::fpa)
                        o = *fpa;
                    else
                        o = run_scheme(sc, *inst, opt, needs_fpa ? &*fpa : nullptr);
                    rec.sum_rate = o.sum_rate;
                    rec.snr = o.snr;
                    rec.iterations = o.iterations;
                }
                catch (const std::exception &e)
                {
                    rec.ok = false;
                    rec.error = e.what();
                }
                rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                rec.channel_digest = inst->channels.digest(probe);
                if (rec.channel_digest != digest)
                {
                    rec.ok = false;
                    rec.error = "channel set modified during scheme evaluation";
                }
            }
        };

        std::size_t workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
        workers = std::min(workers, std::max<std::size_t>(n_cells, 1));
        if (workers <= 1)
        {
            for (std::size_t c = 0; c < n_cells; ++c)
                run_cell(c);
            return res;
        }

        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t)
            pool.emplace_back(
                [&]
                {
                    for (std::size_t c = next++; c < n_cells; c = next++)
                        run_cell(c);
                });
        for (auto &th : pool)
            th.join();
        return res;
    }

    std::pair<double, double> mean_and_half_width(const std::vector<double> &v)
    {
        if (v.empty())
            throw invalid_parameter("mean_and_half_width: empty sample");
        double mean = 0.0;
        for (double x : v)
            mean += x;
        mean /= double(v.size());
        if (v.size() < 2)
            return {mean, 0.0};
        double ss = 0.0;
        for (double x : v)
            ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / double(v.size() - 1));
        return {mean, 1.96 * sd / std::sqrt(double(v.size()))};
    }

    std::vector<SummaryRow> summarize(const SweepResult &r)
    {
        if (r.records.empty())
            throw invalid_parameter("summarize: empty result");
        // keep first-appearance order of (param, scheme)
        std::vector<std::pair<double, Scheme>> keys;
        std::map<std::pair<double, int>, std::pair<std::vector<double>, std::size_t>> groups;
        for (const auto &rec : r.records)
        {
            const auto key = std::make_pair(rec.param, int(rec.scheme));
            if (!groups.count(key))
                keys.emplace_back(rec.param, rec.scheme);
            auto &g = groups[key];
            if (rec.ok)
                g.first.push_back(rec.sum_rate);
            else
                ++g.second;
        }
        std::vector<SummaryRow> rows;
        for (const auto &[param, scheme] : keys)
        {
            const auto &g = groups.at({param, int(scheme)});
            SummaryRow row{scheme, param, std::nan(""), std::nan(""), g.first.size(), g.second};
            if (!g.first.empty())
                std::tie(row.mean, row.half_width) = mean_and_half_width(g.first);
            rows.push_back(row);
        }
        return rows;
    }

    void write_records_csv(std::ostream &os, const SweepResult &r)
    {
        const auto old = os.precision();
        os << "scheme,param,realization,metric,value\n" << std::setprecision(17);
        for (const auto &rec : r.records)
        {
            const std::string head = to_string(rec.scheme) + ',';
            auto line = [&](const char *metric, double v)
            { os << head << rec.param << ',' << rec.realization << ',' << metric << ',' << v << '\n'; };
            if (!rec.ok)
            {
                line("failed", 1.0);
                continue;
            }
            line("sum_rate", rec.sum_rate);
            if (r.num_users == 1)
                line("snr", rec.snr);
            line("iterations", double(rec.iterations));
        }
        os.precision(old);
    }

    void write_summary_csv(std::ostream &os, const std::vector<SummaryRow> &rows)
    {
        const auto old = os.precision();
        os << "scheme,param,metric,mean,half_width,count,failed\n" << std::setprecision(17);
        for (const auto &row : rows)
            os << to_string(row.scheme) << ',' << row.param << ",sum_rate," << row.mean << ',' << row.half_width << ','
               << row.count << ',' << row.failed << '\n';
        os.precision(old);
    }

    namespace
    {
        std::string sanitize(std::string s)
        {
            std::replace(s.begin(), s.end(), ',', ';');
            std::replace(s.begin(), s.end(), '\n', ' ');
            return s;
        }
    }

    void write_timing_csv(std::ostream &os, const SweepResult &r)
    {
        os << "scheme,param,realization,wall_seconds,error\n";
        for (const auto &rec : r.records)
            os << to_string(rec.scheme) << ',' << rec.param << ',' << rec.realization << ',' << rec.wall_seconds << ','
               << (rec.ok ? std::string() : sanitize(rec.error)) << '\n';
    }
}
