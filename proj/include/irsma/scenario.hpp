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
#include <string>

#include <json.hpp>

#include "irsma/channel.hpp"
#include "irsma/geometry.hpp"

namespace irsma
{
    enum class BsIrsModel
    {
        los,       // deterministic near-field LoS (l_0 = 1, no scatterers)
        multipath, // LoS + L scattered paths with random ratios
        far_field  // rank-one plane-wave model
    };

    std::string to_string(BsIrsModel m);
    BsIrsModel bs_irs_model_from_string(const std::string &s);

    // Full experiment parameterisation. All lengths in metres, powers in watts, angles in degrees.
    struct Scenario
    {
        double carrier_frequency = 5e9;
        std::size_t num_mas = 4;
        std::size_t num_users = 3;
        double transmit_power = dbm_to_watt(46.0);
        double noise_power = dbm_to_watt(-80.0);
        double min_spacing;    // D_min, defaults to lambda / 2
        double sample_spacing; // delta_s, defaults to lambda / 10
        double rician_factor = db_to_linear(3.0);
        double pathloss_exponent = 2.8;
        std::size_t num_paths = 4;
        std::uint64_t master_seed = 1;
        std::size_t num_realizations = 50;

        std::size_t irs_count_y = 15;
        std::size_t irs_count_z = 15;
        double irs_spacing; // d, defaults to lambda / 2

        Vec3 region_center{4.0 * std::sqrt(2.0), 4.0 * std::sqrt(2.0), 0.0};
        Vec3 region_axis = Vec3::UnitX();
        double region_length = 0.6;

        BsIrsModel bs_irs_model = BsIrsModel::multipath;
        Vec3 scatter_box_sides = Vec3::Constant(2.0);

        // IRS-user geometry: distance U[min, max], direction uniform over the azimuth/elevation sector
        // (azimuth measured from the IRS normal +x towards +y).
        double user_distance_min = 30.0;
        double user_distance_max = 50.0;
        double user_azimuth_min = -60.0;
        double user_azimuth_max = 60.0;
        double user_elevation_min = -15.0;
        double user_elevation_max = 15.0;

        Scenario();

        double wavelength() const { return speed_of_light / carrier_frequency; }
        double snr_budget() const { return transmit_power / noise_power; }

        IrsGeometry geometry() const { return {irs_count_y, irs_count_z, irs_spacing}; }
        TransmitRegion region() const { return {region_center, region_axis, region_length}; }
        SamplingGrid grid() const { return {region(), sample_spacing, min_spacing}; }

        // BS-IRS distance |q_B|.
        double bs_irs_distance() const { return region_center.norm(); }

        // Copy with q_B rescaled to the given distance along its current direction.
        Scenario with_bs_irs_distance(double distance) const;

        // Throws invalid_parameter on any violated invariant.
        void validate() const;
    };

    // Config (de)serialisation. Unknown keys are rejected so that typos surface early.
    void from_json(const nlohmann::json &j, Scenario &s);
    void to_json(nlohmann::json &j, const Scenario &s);

    // Deterministic per-realisation draws. Purpose tags keep streams disjoint; every scheme evaluated on a
    // realisation sees the same channels.
    struct UserPlacement
    {
        std::vector<double> distances;
        std::vector<Vec3> directions;
    };

    UserPlacement draw_user_placement(const Scenario &s, std::uint64_t realization);
    ChannelSet draw_channels(const Scenario &s, std::uint64_t realization);
    Reflection draw_initial_reflection(const Scenario &s, std::uint64_t realization);
    Reflection draw_random_reflection(const Scenario &s, std::uint64_t realization);
}
