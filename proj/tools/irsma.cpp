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

// Command line front end: sweep / verify / profile / convergence.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "irsma/analysis.hpp"
#include "irsma/harness.hpp"

namespace fs = std::filesystem;
using namespace irsma;

namespace
{
    struct Common
    {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> realizations;
        std::string out = "out";
        std::size_t threads = 1;
    };

    struct Config
    {
        Scenario scenario;
        SweepSpec sweep;
        SolverOptions solver;
        bool has_sweep = false;
    };

    Config load(const Common &c)
    {
        Config cfg;
        cfg.sweep.schemes = all_schemes();
        cfg.sweep.values = {cfg.scenario.bs_irs_distance()};
        if (!c.config.empty())
        {
            std::ifstream in(c.config);
            if (!in)
                throw invalid_parameter("cannot open config '" + c.config + "'");
            const nlohmann::json j = nlohmann::json::parse(in, nullptr, true, true);
            for (auto it = j.begin(); it != j.end(); ++it)
                if (it.key() != "scenario" && it.key() != "sweep" && it.key() != "solver" && it.key() != "description")
                    throw invalid_parameter("unknown top-level key '" + it.key() + "'");
            if (j.contains("scenario"))
                from_json(j.at("scenario"), cfg.scenario);
            if (j.contains("solver"))
                from_json(j.at("solver"), cfg.solver);
            if (j.contains("sweep"))
            {
                cfg.sweep.seed = cfg.scenario.master_seed;
                cfg.sweep.realizations = cfg.scenario.num_realizations;
                from_json(j.at("sweep"), cfg.sweep);
                cfg.has_sweep = true;
            }
        }
        if (!cfg.has_sweep)
        {
            cfg.sweep.seed = cfg.scenario.master_seed;
            cfg.sweep.realizations = cfg.scenario.num_realizations;
        }
        if (c.seed)
        {
            cfg.scenario.master_seed = *c.seed;
            cfg.sweep.seed = *c.seed;
        }
        if (c.realizations)
        {
            cfg.scenario.num_realizations = *c.realizations;
            cfg.sweep.realizations = *c.realizations;
        }
        cfg.scenario.validate();
        cfg.sweep.validate();
        return cfg;
    }

    std::ofstream open_out(const fs::path &p)
    {
        fs::create_directories(p.parent_path());
        std::ofstream f(p);
        if (!f)
            throw invalid_parameter("cannot write '" + p.string() + "'");
        return f;
    }

    int cmd_sweep(const Common &c)
    {
        const Config cfg = load(c);
        const SweepResult res = run_sweep(cfg.sweep, cfg.scenario, cfg.solver, c.threads);
        const fs::path dir(c.out);
        {
            auto f = open_out(dir / "records.csv");
            write_records_csv(f, res);
        }
        const auto rows = summarize(res);
        {
            auto f = open_out(dir / "summary.csv");
            write_summary_csv(f, rows);
        }
        {
            auto f = open_out(dir / "timing.csv");
            write_timing_csv(f, res);
        }
        std::cout << "parameter " << to_string(res.parameter) << ", " << res.records.size() << " records, "
                  << res.failed() << " failed\n";
        for (const auto &r : rows)
            std::cout << "  " << to_string(r.scheme) << " @ " << r.param << ": " << r.mean << " +- " << r.half_width
                      << '\n';
        return res.failed() == 0 ? 0 : 2;
    }

    int cmd_verify(const Common &c)
    {
        const Config cfg = load(c);
        const Scenario &s = cfg.scenario;
        bool ok = true;

        const double rd = rayleigh_distance(s.geometry(), s.region_length, s.wavelength());
        std::cout << "Rayleigh distance " << rd << " m\n\n";

        const auto eq = analysis::verify_single_ma_equivalence(s, {1, 2, 3, 4, 5, 6}, cfg.sweep.realizations);
        analysis::print(std::cout, eq);
        ok = ok && eq.pass;
        std::cout << '\n';

        const auto ff = analysis::verify_far_field_no_gain(s, 100, 0);
        analysis::print(std::cout, ff);
        ok = ok && ff.pass;
        std::cout << '\n';

        const auto mono = analysis::verify_fluctuation_monotonicity(s);
        analysis::print(std::cout, mono);
        ok = ok && mono.pass;

        std::cout << '\n' << (ok ? "all checks passed" : "some checks FAILED") << '\n';
        return ok ? 0 : 1;
    }

    int cmd_profile(const Common &c, std::size_t realization, std::size_t resolution)
    {
        const Config cfg = load(c);
        const Instance inst = make_instance(cfg.scenario, realization);
        const SchemeOutcome opt = run_scheme(Scheme::proposed, inst, cfg.solver);
        const auto random = analysis::fluctuation_profile(inst.channels, inst.scenario.region(), inst.random_reflection,
                                                          resolution);
        const auto tuned = analysis::fluctuation_profile(inst.channels, inst.scenario.region(), opt.reflection,
                                                         resolution);
        const fs::path dir(c.out);
        {
            auto f = open_out(dir / "profile_random.csv");
            analysis::write_profile_csv(f, random);
        }
        {
            auto f = open_out(dir / "profile_optimized.csv");
            analysis::write_profile_csv(f, tuned);
        }
        std::cout << "spread (max over users): random phases " << random.max_spread_db << " dB, optimized phases "
                  << tuned.max_spread_db << " dB\n";
        return 0;
    }

    int cmd_convergence(const Common &c, std::size_t count)
    {
        const Config cfg = load(c);
        const fs::path dir(c.out);
        auto f = open_out(dir / "convergence.csv");
        f << "realization,iteration,objective\n";
        f.precision(17);
        for (std::size_t r = 0; r < count; ++r)
        {
            const Instance inst = make_instance(cfg.scenario, r);
            // cold start so the trace shows the whole climb
            SolverOptions o = cfg.solver;
            if (cfg.scenario.num_users == 1)
            {
                const CVec h = inst.channels.irs_user.col(0);
                const auto sol = su::ao_single_user(inst.channels.bs_irs, h, inst.grid, cfg.scenario.transmit_power,
                                                    cfg.scenario.noise_power, inst.initial_reflection, inst.ula, o.su);
                f << r << ",0," << sol.trace.front().snr_after_reflection << '\n';
                for (const auto &e : sol.trace)
                    f << r << ',' << e.iteration << ',' << e.snr_after_positions << '\n';
                std::cout << "realization " << r << ": " << sol.iterations << " outer iterations\n";
            }
            else
            {
                const CMat w0 = mu::wmmse_initial(inst.channels.cascaded(inst.initial_reflection, inst.ula),
                                                  cfg.scenario.transmit_power);
                const auto sol = mu::ao_multi_user(inst.channels, inst.grid, cfg.scenario.transmit_power,
                                                   cfg.scenario.noise_power, cfg.scenario.min_spacing, w0,
                                                   inst.initial_reflection, inst.ula, o.mu);
                f << r << ",0," << sol.initial_rate << '\n';
                for (const auto &e : sol.trace)
                    f << r << ',' << e.iteration << ',' << e.after_positions << '\n';
                std::cout << "realization " << r << ": " << sol.iterations << " outer iterations, sum rate "
                          << sol.sum_rate << '\n';
            }
        }
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"irsma: IRS-assisted movable-antenna downlink simulator"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&common](CLI::App *sub)
    {
        sub->add_option("--config", common.config, "JSON config file");
        sub->add_option("--seed", common.seed, "master seed (overrides config)");
        sub->add_option("--realizations", common.realizations, "number of channel realizations");
        sub->add_option("--out", common.out, "output directory")->capture_default_str();
        sub->add_option("--threads", common.threads, "worker threads, 0 = all cores")->capture_default_str();
    };

    auto *sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over one parameter");
    add_common(sweep);
    auto *verify = app.add_subcommand("verify", "numerical checks of the closed-form results");
    add_common(verify);
    auto *profile = app.add_subcommand("profile", "gain profile along the transmit region");
    add_common(profile);
    std::size_t realization = 0, resolution = 201;
    profile->add_option("--realization", realization, "realization index")->capture_default_str();
    profile->add_option("--resolution", resolution, "samples along the region")->capture_default_str();
    auto *conv = app.add_subcommand("convergence", "outer-iteration traces of the proposed AO");
    add_common(conv);
    std::size_t traces = 5;
    conv->add_option("--count", traces, "number of realizations to trace")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*sweep)
            return cmd_sweep(common);
        if (*verify)
            return cmd_verify(common);
        if (*profile)
            return cmd_profile(common, realization, resolution);
        if (*conv)
            return cmd_convergence(common, traces);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
