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

#include "irsma/scenario.hpp"

#include <cmath>
#include <set>

namespace irsma
{
    std::string to_string(BsIrsModel m)
    {
        switch (m)
        {
        case BsIrsModel::los:
            return "los";
        case BsIrsModel::multipath:
            return "multipath";
        case BsIrsModel::far_field:
            return "far_field";
        }
        return "unknown";
    }

    BsIrsModel bs_irs_model_from_string(const std::string &s)
    {
        if (s == "los")
            return BsIrsModel::los;
        if (s == "multipath")
            return BsIrsModel::multipath;
        if (s == "far_field")
            return BsIrsModel::far_field;
        throw invalid_parameter("unknown BS-IRS channel model '" + s + "'");
    }

    Scenario::Scenario()
    {
        const double lambda = wavelength();
        min_spacing = 0.5 * lambda;
        sample_spacing = 0.1 * lambda;
        irs_spacing = 0.5 * lambda;
    }

    Scenario Scenario::with_bs_irs_distance(double distance) const
    {
        if (!(distance > 0.0))
            throw invalid_parameter("BS-IRS distance must be positive");
        Scenario s = *this;
        const double n = region_center.norm();
        const Vec3 dir = n > 0.0 ? Vec3(region_center / n) : Vec3(Vec3(1.0, 1.0, 0.0).normalized());
        s.region_center = distance * dir;
        return s;
    }

    void Scenario::validate() const
    {
        auto require = [](bool ok, const char *msg)
        {
            if (!ok)
                throw invalid_parameter(std::string("Scenario: ") + msg);
        };
        require(carrier_frequency > 0.0 && std::isfinite(carrier_frequency), "carrier_frequency must be positive");
        require(num_mas >= 1, "num_mas must be >= 1");
        require(num_users >= 1, "num_users must be >= 1");
        require(transmit_power > 0.0, "transmit_power must be positive");
        require(noise_power > 0.0, "noise_power must be positive");
        require(min_spacing > 0.0, "min_spacing must be positive");
        require(sample_spacing > 0.0, "sample_spacing must be positive");
        require(rician_factor >= 0.0, "rician_factor must be non-negative");
        require(irs_count_y >= 1 && irs_count_z >= 1, "IRS element counts must be positive");
        require(irs_spacing >= 0.0, "irs_spacing must be non-negative");
        require(region_length >= 0.0, "region_length must be non-negative");
        require(std::abs(region_axis.norm() - 1.0) < 1e-9, "region_axis must be a unit vector");
        require(user_distance_min > 0.0 && user_distance_max >= user_distance_min, "invalid user distance range");
        require(user_azimuth_max >= user_azimuth_min, "invalid azimuth sector");
        require(user_elevation_max >= user_elevation_min, "invalid elevation sector");
        require(scatter_box_sides.minCoeff() > 0.0, "scatter box sides must be positive");
        require(num_realizations >= 1, "num_realizations must be >= 1");
    }

    // ---------------------------------------------------------------------------------------------

    namespace
    {
        Vec3 vec3_from_json(const nlohmann::json &j)
        {
            if (!j.is_array() || j.size() != 3)
                throw invalid_parameter("expected a 3-element array");
            return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
        }

        nlohmann::json vec3_to_json(const Vec3 &v) { return nlohmann::json::array({v[0], v[1], v[2]}); }
    }

    void from_json(const nlohmann::json &j, Scenario &s)
    {
        if (!j.is_object())
            throw invalid_parameter("scenario config must be an object");

        static const std::set<std::string> known = {
            "carrier_frequency", "num_mas", "num_users", "transmit_power", "transmit_power_dbm", "noise_power",
            "noise_power_dbm", "snr_budget_db", "min_spacing", "min_spacing_wavelengths", "sample_spacing",
            "sample_spacing_wavelengths", "rician_factor", "rician_factor_db", "pathloss_exponent", "num_paths",
            "master_seed", "num_realizations", "irs_count_y", "irs_count_z", "irs_spacing", "irs_spacing_wavelengths",
            "region_center", "region_axis", "region_length", "bs_irs_distance", "bs_irs_model", "scatter_box_sides",
            "user_distance_min", "user_distance_max", "user_azimuth_min", "user_azimuth_max", "user_elevation_min",
            "user_elevation_max"};
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!known.count(it.key()))
                throw invalid_parameter("unknown scenario key '" + it.key() + "'");

        // frequency first: wavelength-relative lengths depend on it
        if (j.contains("carrier_frequency"))
            s.carrier_frequency = j.at("carrier_frequency").get<double>();
        const double lambda = s.wavelength();
        s.min_spacing = 0.5 * lambda;
        s.sample_spacing = 0.1 * lambda;
        s.irs_spacing = 0.5 * lambda;

        auto get = [&j](const char *key, auto &dst)
        {
            if (j.contains(key))
                dst = j.at(key).get<std::remove_reference_t<decltype(dst)>>();
        };
        get("num_mas", s.num_mas);
        get("num_users", s.num_users);
        get("transmit_power", s.transmit_power);
        if (j.contains("transmit_power_dbm"))
            s.transmit_power = dbm_to_watt(j.at("transmit_power_dbm").get<double>());
        get("noise_power", s.noise_power);
        if (j.contains("noise_power_dbm"))
            s.noise_power = dbm_to_watt(j.at("noise_power_dbm").get<double>());
        if (j.contains("snr_budget_db"))
            s.noise_power = s.transmit_power / db_to_linear(j.at("snr_budget_db").get<double>());
        get("min_spacing", s.min_spacing);
        if (j.contains("min_spacing_wavelengths"))
            s.min_spacing = lambda * j.at("min_spacing_wavelengths").get<double>();
        get("sample_spacing", s.sample_spacing);
        if (j.contains("sample_spacing_wavelengths"))
            s.sample_spacing = lambda * j.at("sample_spacing_wavelengths").get<double>();
        get("rician_factor", s.rician_factor);
        if (j.contains("rician_factor_db"))
            s.rician_factor = db_to_linear(j.at("rician_factor_db").get<double>());
        get("pathloss_exponent", s.pathloss_exponent);
        get("num_paths", s.num_paths);
        get("master_seed", s.master_seed);
        get("num_realizations", s.num_realizations);
        get("irs_count_y", s.irs_count_y);
        get("irs_count_z", s.irs_count_z);
        get("irs_spacing", s.irs_spacing);
        if (j.contains("irs_spacing_wavelengths"))
            s.irs_spacing = lambda * j.at("irs_spacing_wavelengths").get<double>();
        if (j.contains("region_center"))
            s.region_center = vec3_from_json(j.at("region_center"));
        if (j.contains("region_axis"))
            s.region_axis = vec3_from_json(j.at("region_axis")).normalized();
        get("region_length", s.region_length);
        if (j.contains("bs_irs_distance"))
            s = s.with_bs_irs_distance(j.at("bs_irs_distance").get<double>());
        if (j.contains("bs_irs_model"))
            s.bs_irs_model = bs_irs_model_from_string(j.at("bs_irs_model").get<std::string>());
        if (j.contains("scatter_box_sides"))
            s.scatter_box_sides = vec3_from_json(j.at("scatter_box_sides"));
        get("user_distance_min", s.user_distance_min);
        get("user_distance_max", s.user_distance_max);
        get("user_azimuth_min", s.user_azimuth_min);
        get("user_azimuth_max", s.user_azimuth_max);
        get("user_elevation_min", s.user_elevation_min);
        get("user_elevation_max", s.user_elevation_max);
        s.validate();
    }

    void to_json(nlohmann::json &j, const Scenario &s)
    {
        j = nlohmann::json{
            {"carrier_frequency", s.carrier_frequency},
            {"num_mas", s.num_mas},
            {"num_users", s.num_users},
            {"transmit_power", s.transmit_power},
            {"noise_power", s.noise_power},
            {"min_spacing", s.min_spacing},
            {"sample_spacing", s.sample_spacing},
            {"rician_factor", s.rician_factor},
            {"pathloss_exponent", s.pathloss_exponent},
            {"num_paths", s.num_paths},
            {"master_seed", s.master_seed},
            {"num_realizations", s.num_realizations},
            {"irs_count_y", s.irs_count_y},
            {"irs_count_z", s.irs_count_z},
            {"irs_spacing", s.irs_spacing},
            {"region_center", vec3_to_json(s.region_center)},
            {"region_axis", vec3_to_json(s.region_axis)},
            {"region_length", s.region_length},
            {"bs_irs_model", to_string(s.bs_irs_model)},
            {"scatter_box_sides", vec3_to_json(s.scatter_box_sides)},
            {"user_distance_min", s.user_distance_min},
            {"user_distance_max", s.user_distance_max},
            {"user_azimuth_min", s.user_azimuth_min},
            {"user_azimuth_max", s.user_azimuth_max},
            {"user_elevation_min", s.user_elevation_min},
            {"user_elevation_max", s.user_elevation_max},
        };
    }

    // ---------------------------------------------------------------------------------------------

    UserPlacement draw_user_placement(const Scenario &s, std::uint64_t realization)
    {
        Rng rng = substream(s.master_seed, realization, "user_geometry");
        UserPlacement up;
        for (std::size_t k = 0; k < s.num_users; ++k)
        {
            up.distances.push_back(uniform(rng, s.user_distance_min, s.user_distance_max));
            const double az = uniform(rng, s.user_azimuth_min, s.user_azimuth_max) * pi / 180.0;
            const double el = uniform(rng, s.user_elevation_min, s.user_elevation_max) * pi / 180.0;
            up.directions.emplace_back(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
        }
        return up;
    }

    ChannelSet draw_channels(const Scenario &s, std::uint64_t realization)
    {
        s.validate();
        const double lambda = s.wavelength();
        const IrsGeometry geo = s.geometry();
        const UserPlacement up = draw_user_placement(s, realization);

        Rng rng_iu = substream(s.master_seed, realization, "irs_user");
        CMat irs_user(Eigen::Index(geo.size()), Eigen::Index(s.num_users));
        for (std::size_t k = 0; k < s.num_users; ++k)
            irs_user.col(Eigen::Index(k)) = rician_iu_channel(rng_iu, geo, up.distances[k], up.directions[k],
                                                              s.rician_factor, s.pathloss_exponent, lambda);

        switch (s.bs_irs_model)
        {
        case BsIrsModel::los:
            return {BsIrsChannel::los(geo, lambda), std::move(irs_user)};
        case BsIrsModel::multipath:
        {
            Rng rng_c = substream(s.master_seed, realization, "bs_irs_clusters");
            const ScatterBox box{0.5 * s.region_center, s.scatter_box_sides};
            return {BsIrsChannel::multipath(geo, lambda, sample_clusters(rng_c, s.num_paths, box, s.region_center, lambda)),
                    std::move(irs_user)};
        }
        case BsIrsModel::far_field:
        {
            const double d = s.bs_irs_distance();
            const Vec3 dir = s.region_center.normalized();
            const cplx beta = (lambda / (4.0 * pi * d)) * wave_phase(d, lambda);
            return {BsIrsChannel::far_field(geo, lambda, dir, Vec3(-dir), beta), std::move(irs_user)};
        }
        }
        throw invalid_parameter("unknown BS-IRS model");
    }

    Reflection draw_initial_reflection(const Scenario &s, std::uint64_t realization)
    {
        Rng rng = substream(s.master_seed, realization, "initial_reflection");
        return Reflection::random(rng, Eigen::Index(s.irs_count_y * s.irs_count_z));
    }

    Reflection draw_random_reflection(const Scenario &s, std::uint64_t realization)
    {
        Rng rng = substream(s.master_seed, realization, "random_reflection");
        return Reflection::random(rng, Eigen::Index(s.irs_count_y * s.irs_count_z));
    }
}
