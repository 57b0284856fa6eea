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

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace irsma
{
    using cplx = std::complex<double>;
    using CVec = Eigen::VectorXcd;
    using CMat = Eigen::MatrixXcd;
    using RVec = Eigen::VectorXd;
    using Vec3 = Eigen::Vector3d;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr double speed_of_light = 299792458.0;
    inline constexpr cplx j1{0.0, 1.0};

    // Error hierarchy. All library failures derive from irsma::error.
    class error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class invalid_parameter : public error
    {
    public:
        using error::error;
    };

    class degenerate_geometry : public error
    {
    public:
        using error::error;
    };

    class dimension_mismatch : public error
    {
    public:
        using error::error;
    };

    class degenerate_channel : public error
    {
    public:
        using error::error;
    };

    class infeasible_spacing : public error
    {
    public:
        using error::error;
    };

    class singular_matrix : public error
    {
    public:
        using error::error;
    };

    class degenerate_retraction : public error
    {
    public:
        using error::error;
    };

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
    inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

    // e^{j 2 pi D / lambda}
    inline cplx wave_phase(double distance, double wavelength)
    {
        return std::polar(1.0, 2.0 * pi * distance / wavelength);
    }
}
