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
#include <string>
#include <vector>

#include "irsma/scenario.hpp"

namespace irsma::analysis
{
    // --- single MA vs single FPA under LoS and co-phasing ------------------------------------------

    struct EquivalenceRow
    {
        double distance;
        double snr_ma_mean;  // grid argmax of the closed-form gain
        double snr_fpa_mean; // antenna at the region point nearest the IRS center
        double max_gap;      // max over seeds of |snr_ma - snr_fpa| / snr_fpa
    };

    struct EquivalenceReport
    {
        std::vector<EquivalenceRow> rows;
        double max_gap = 0.0;
        double tolerance = 1e-6;
        bool pass = false;
    };

    // The scenario is forced to N = 1, LoS BS-IRS link. h_IU comes from the scenario's Rician draw of
    // user 0 for each seed (used as realization index).
    EquivalenceReport verify_single_ma_equivalence(const Scenario &scenario, const std::vector<double> &distances,
                                                   std::size_t seeds);

    // --- far-field rank-one channel -----------------------------------------------------------------

    struct FarFieldReport
    {
        std::size_t num_apvs = 0;
        double max_su_error = 0.0;                 // max | |v^H w|^2 - N |
        std::vector<std::string> precoders;        // "mrt", "zf", "mmse", "rzf"
        std::vector<double> max_rate_rel_diff;     // across APVs, per precoder
        std::vector<double> max_closed_form_error; // pipeline vs closed form, per precoder
        double su_tolerance = 1e-9;
        double rate_tolerance = 1e-9;
        bool su_pass = false;
        bool mu_pass = false;
        bool pass = false;
    };

    FarFieldReport verify_far_field_no_gain(const Scenario &scenario, std::size_t num_apvs = 100,
                                            std::uint64_t realization = 0);

    // --- gain fluctuation over the transmit region --------------------------------------------------

    struct FluctuationProfile
    {
        std::vector<double> offsets; // along the region axis
        std::vector<std::vector<double>> gain; // gain[k][sample] = |h_IU,k^H Phi h_BI(t)|^2
        std::vector<double> spread_db;         // per user, 10 log10(max / min)
        double max_spread_db = 0.0;
    };

    FluctuationProfile fluctuation_profile(const ChannelSet &channels, const TransmitRegion &region,
                                           const Reflection &phi, std::size_t resolution);

    void write_profile_csv(std::ostream &os, const FluctuationProfile &p);

    // --- monotonicity of the gain difference --------------------------------------------------------

    struct MonotonicityReport
    {
        std::vector<std::size_t> counts_per_axis{15, 20, 25};
        std::vector<double> by_count; // gain_difference at fixed d_BI
        std::vector<double> distances{1.0, 3.0, 6.0};
        std::vector<double> by_distance; // gain_difference at fixed M
        double fixed_distance = 3.0;
        std::size_t fixed_count = 15;
        double edge_difference = 0.0; // t1 = t2
        bool increasing_in_count = false;
        bool decreasing_in_distance = false;
        bool pass = false;
    };

    // Perpendicular arrangement: q_B = [d_BI, 0, 0], region along y, t1 = q_B, t2 = region end,
    // |h_IU,m| = 1.
    MonotonicityReport verify_fluctuation_monotonicity(const Scenario &scenario);

    // Plain-text rendering with a PASS/FAIL line per check.
    void print(std::ostream &os, const EquivalenceReport &r);
    void print(std::ostream &os, const FarFieldReport &r);
    void print(std::ostream &os, const MonotonicityReport &r);
}
