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

#include "irsma/channel.hpp"

#include <cmath>
#include <cstring>
#include <iomanip>
#include <limits>
#include <ostream>

namespace irsma
{
    namespace
    {
        void check_wavelength(double wavelength)
        {
            if (!(wavelength > 0.0) || !std::isfinite(wavelength))
                throw invalid_parameter("wavelength must be positive and finite");
        }

        double checked_distance(const Vec3 &a, const Vec3 &b)
        {
            const double d = (a - b).norm();
            if (!(d > 0.0))
                throw degenerate_geometry("zero distance between antenna and reflecting element / scatterer");
            return d;
        }

        Vec3 unit(const Vec3 &v, const char *what)
        {
            const double n = v.norm();
            if (!(n > 0.0) || !std::isfinite(n))
                throw invalid_parameter(std::string(what) + " must be a non-zero direction");
            if (std::abs(n - 1.0) > 1e-9)
                throw invalid_parameter(std::string(what) + " must have unit norm");
            return v / n;
        }
    }

    double rayleigh_distance(const IrsGeometry &geometry, double region_length, double wavelength)
    {
        check_wavelength(wavelength);
        if (region_length < 0.0)
            throw invalid_parameter("rayleigh_distance: negative region length");
        const double span = geometry.aperture() + region_length;
        return 2.0 * span * span / wavelength;
    }

    CVec nusw_los_vector(const Vec3 &t, const IrsGeometry &geometry, double wavelength)
    {
        check_wavelength(wavelength);
        const std::size_t m_count = geometry.size();
        CVec h(m_count);
        const double scale = wavelength / (4.0 * pi);
        for (std::size_t m = 0; m < m_count; ++m)
        {
            const double d = checked_distance(t, geometry.element(m));
            h[Eigen::Index(m)] = (scale / d) * wave_phase(d, wavelength);
        }
        return h;
    }

    CMat nusw_los_matrix(const Apv &apv, const IrsGeometry &geometry, double wavelength)
    {
        CMat h(Eigen::Index(geometry.size()), Eigen::Index(apv.size()));
        for (std::size_t n = 0; n < apv.size(); ++n)
            h.col(Eigen::Index(n)) = nusw_los_vector(apv[n], geometry, wavelength);
        return h;
    }

    CVec near_field_response(std::span<const Vec3> points, const Vec3 &source, double wavelength)
    {
        check_wavelength(wavelength);
        CVec a(Eigen::Index(points.size()));
        for (std::size_t i = 0; i < points.size(); ++i)
            a[Eigen::Index(i)] = wave_phase(checked_distance(source, points[i]), wavelength);
        return a;
    }

    CVec plane_wave_response(std::span<const Vec3> points, const Vec3 &direction, double wavelength)
    {
        check_wavelength(wavelength);
        const Vec3 u = unit(direction, "plane_wave_response: direction");
        CVec a(Eigen::Index(points.size()));
        for (std::size_t i = 0; i < points.size(); ++i)
            a[Eigen::Index(i)] = std::polar(1.0, -2.0 * pi * points[i].dot(u) / wavelength);
        return a;
    }

    CMat multipath_bs_irs(const Apv &apv, const IrsGeometry &geometry, const ClusterSet &clusters, double wavelength)
    {
        CMat h = clusters.los_ratio * nusw_los_matrix(apv, geometry, wavelength);
        for (const auto &c : clusters.scattered)
        {
            const CVec a = near_field_response(geometry.elements(), c.scatterer, wavelength);
            const CVec b = near_field_response(apv.positions, c.scatterer, wavelength);
            h.noalias() += (c.power_ratio * c.gain) * (a * b.transpose());
        }
        return h;
    }

    ClusterSet sample_clusters(Rng &rng, std::size_t num_paths, const ScatterBox &box, const Vec3 &reference,
                               double wavelength)
    {
        check_wavelength(wavelength);
        if (!(box.sides.minCoeff() > 0.0) || !box.sides.allFinite())
            throw invalid_parameter("sample_clusters: placement box must have positive side lengths");

        const double variance = 1.0 / double(num_paths + 1);
        ClusterSet set;
        set.los_ratio = complex_gaussian(rng, variance);
        set.scattered.reserve(num_paths);
        for (std::size_t p = 0; p < num_paths; ++p)
        {
            PathCluster c;
            for (int ax = 0; ax < 3; ++ax)
                c.scatterer[ax] = uniform(rng, box.center[ax] - 0.5 * box.sides[ax], box.center[ax] + 0.5 * box.sides[ax]);
            c.power_ratio = complex_gaussian(rng, variance);
            const double path = (reference - c.scatterer).norm() + c.scatterer.norm();
            c.gain = (wavelength / (4.0 * pi * path)) * random_unit_phase(rng);
            set.scattered.push_back(c);
        }
        return set;
    }

    CVec rician_iu_channel(Rng &rng, const IrsGeometry &geometry, double distance, const Vec3 &direction,
                           double rician_factor, double pathloss_exponent, double wavelength)
    {
        check_wavelength(wavelength);
        if (!(distance > 0.0) || !std::isfinite(distance))
            throw invalid_parameter("rician_iu_channel: user distance must be positive");
        if (!(rician_factor >= 0.0))
            throw invalid_parameter("rician_iu_channel: Rician factor must be non-negative");

        double w_los = 1.0, w_nlos = 0.0;
        if (std::isfinite(rician_factor))
        {
            w_los = std::sqrt(rician_factor / (1.0 + rician_factor));
            w_nlos = std::sqrt(1.0 / (1.0 + rician_factor));
        }

        const double amplitude = wavelength / (4.0 * pi) * std::pow(distance, -0.5 * pathloss_exponent);
        const CVec los = plane_wave_response(geometry.elements(), direction, wavelength);
        CVec h(los.size());
        for (Eigen::Index m = 0; m < h.size(); ++m)
        {
            const cplx nlos = complex_gaussian(rng, 1.0);
            h[m] = amplitude * (w_los * los[m] + w_nlos * nlos);
        }
        return h;
    }

    CVec far_field_transmit_response(const Apv &apv, const Vec3 &departure, double wavelength)
    {
        return plane_wave_response(apv.positions, departure, wavelength);
    }

    CMat far_field_bs_irs(const Apv &apv, const IrsGeometry &geometry, const Vec3 &arrival, const Vec3 &departure,
                          cplx beta, double wavelength)
    {
        const CVec u = plane_wave_response(geometry.elements(), arrival, wavelength);
        const CVec v = far_field_transmit_response(apv, departure, wavelength);
        return beta * (u * v.adjoint());
    }

    CRow cascaded_row(const CVec &irs_user, const Reflection &phi, const CMat &bs_irs)
    {
        if (irs_user.size() != phi.size() || bs_irs.rows() != irs_user.size())
            throw dimension_mismatch("cascaded_row: IRS dimensions disagree");
        const CVec g = irs_user.conjugate().cwiseProduct(phi.coefficients());
        return g.transpose() * bs_irs;
    }

    cplx direct_bs_user(const Vec3 &t, const Vec3 &user, double wavelength)
    {
        check_wavelength(wavelength);
        const double d = checked_distance(t, user);
        return (wavelength / (4.0 * pi * d)) * wave_phase(d, wavelength);
    }

    // ---------------------------------------------------------------------------------------------

    BsIrsChannel::BsIrsChannel(const IrsGeometry &geometry, double wavelength)
        : geometry_(geometry), wavelength_(wavelength)
    {
        check_wavelength(wavelength);
    }

    BsIrsChannel BsIrsChannel::los(const IrsGeometry &geometry, double wavelength)
    {
        BsIrsChannel c(geometry, wavelength);
        c.kind_ = Kind::los;
        return c;
    }

    BsIrsChannel BsIrsChannel::multipath(const IrsGeometry &geometry, double wavelength, ClusterSet clusters)
    {
        BsIrsChannel c(geometry, wavelength);
        c.kind_ = Kind::multipath;
        c.clusters_ = std::move(clusters);
        for (const auto &p : c.clusters_.scattered)
            c.irs_responses_.push_back((p.power_ratio * p.gain) *
                                       near_field_response(geometry.elements(), p.scatterer, wavelength));
        return c;
    }

    BsIrsChannel BsIrsChannel::far_field(const IrsGeometry &geometry, double wavelength, const Vec3 &arrival,
                                         const Vec3 &departure, cplx beta)
    {
        BsIrsChannel c(geometry, wavelength);
        c.kind_ = Kind::far_field;
        c.far_u_ = beta * plane_wave_response(geometry.elements(), arrival, wavelength);
        c.far_departure_ = unit(departure, "far_field: departure");
        c.far_beta_ = beta;
        return c;
    }

    CVec BsIrsChannel::column(const Vec3 &t) const
    {
        switch (kind_)
        {
        case Kind::los:
            return nusw_los_vector(t, geometry_, wavelength_);
        case Kind::multipath:
        {
            CVec h = clusters_.los_ratio * nusw_los_vector(t, geometry_, wavelength_);
            for (std::size_t p = 0; p < irs_responses_.size(); ++p)
            {
                const double d = checked_distance(t, clusters_.scattered[p].scatterer);
                h += wave_phase(d, wavelength_) * irs_responses_[p];
            }
            return h;
        }
        case Kind::far_field:
        {
            const cplx v = std::polar(1.0, -2.0 * pi * t.dot(far_departure_) / wavelength_);
            return std::conj(v) * far_u_;
        }
        }
        return {};
    }

    CMat BsIrsChannel::columns(std::span<const Vec3> points) const
    {
        CMat h(Eigen::Index(irs_size()), Eigen::Index(points.size()));
        for (std::size_t n = 0; n < points.size(); ++n)
            h.col(Eigen::Index(n)) = column(points[n]);
        return h;
    }

    CMat BsIrsChannel::matrix(const Apv &apv) const { return columns(apv.positions); }

    CMat ChannelSet::cascaded(const Reflection &phi, const CMat &bs_irs_matrix) const
    {
        if (phi.size() != irs_user.rows() || bs_irs_matrix.rows() != irs_user.rows())
            throw dimension_mismatch("ChannelSet::cascaded: IRS dimensions disagree");
        // row k = sum_m conj(h_IU[m,k]) phi_m H_BI[m,:]
        return irs_user.adjoint() * phi.coefficients().asDiagonal() * bs_irs_matrix;
    }

    std::uint64_t ChannelSet::digest(std::span<const Vec3> probe) const
    {
        std::uint64_t h = 0xcbf29ce484222325ull;
        auto mix = [&h](const CMat &m)
        {
            for (Eigen::Index i = 0; i < m.size(); ++i)
            {
                const double parts[2] = {m.data()[i].real(), m.data()[i].imag()};
                unsigned char bytes[sizeof(parts)];
                std::memcpy(bytes, parts, sizeof(parts));
                for (unsigned char b : bytes)
                {
                    h ^= b;
                    h *= 0x100000001b3ull;
                }
            }
        };
        mix(irs_user);
        mix(bs_irs.columns(probe));
        return h;
    }

    void write_matrix_csv(std::ostream &os, const CMat &m)
    {
        const auto old = os.precision();
        os << "row,col,re,im\n" << std::setprecision(17);
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                os << r << ',' << c << ',' << m(r, c).real() << ',' << m(r, c).imag() << '\n';
        os.precision(old);
    }
}
