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
#include <span>
#include <vector>

#include "irsma/geometry.hpp"
#include "irsma/reflection.hpp"
#include "irsma/rng.hpp"
#include "irsma/types.hpp"

namespace irsma
{
    using CRow = Eigen::RowVectorXcd;

    // Rayleigh distance 2 (D_IRS + A)^2 / lambda with D_IRS = sqrt(My^2 + Mz^2) d.
    double rayleigh_distance(const IrsGeometry &geometry, double region_length, double wavelength);

    // Near-field (spherical wave) LoS response from antenna position t to every IRS element:
    // entry m = lambda / (4 pi D_m) e^{j 2 pi D_m / lambda}, D_m = |t - e_m|. Ordering follows IrsGeometry.
    CVec nusw_los_vector(const Vec3 &t, const IrsGeometry &geometry, double wavelength);

    // M x N matrix whose n-th column is nusw_los_vector(apv[n]).
    CMat nusw_los_matrix(const Apv &apv, const IrsGeometry &geometry, double wavelength);

    // Unit-modulus spherical-wave response e^{j 2 pi |s - p_i| / lambda} of `points` to a source s.
    CVec near_field_response(std::span<const Vec3> points, const Vec3 &source, double wavelength);

    // Unit-modulus plane-wave response e^{-j 2 pi <p_i, direction> / lambda}. The sign matches the
    // far-field expansion of e^{+j 2 pi D / lambda} for a source far away along `direction`.
    CVec plane_wave_response(std::span<const Vec3> points, const Vec3 &direction, double wavelength);

    struct PathCluster
    {
        Vec3 scatterer;
        cplx power_ratio; // l_p
        cplx gain;        // beta_p
    };

    // LoS ratio l_0 plus the L scattered paths.
    struct ClusterSet
    {
        cplx los_ratio{1.0, 0.0};
        std::vector<PathCluster> scattered;
    };

    // Axis-aligned placement box for scatterers.
    struct ScatterBox
    {
        Vec3 center = Vec3::Zero();
        Vec3 sides = Vec3::Constant(2.0);
    };

    // l_0 * H_LoS(T) + sum_p l_p beta_p a(s_p) b(T, s_p)^T, with a the IRS response and b the antenna
    // response to scatterer s_p (outer product M x N).
    CMat multipath_bs_irs(const Apv &apv, const IrsGeometry &geometry, const ClusterSet &clusters, double wavelength);

    // Draws l_0 .. l_L ~ CN(0, 1/(L+1)), scatterers uniform in `box`, and
    // beta_p = lambda / (4 pi (|reference - s_p| + |s_p|)) e^{j U[0, 2 pi)}.
    ClusterSet sample_clusters(Rng &rng, std::size_t num_paths, const ScatterBox &box, const Vec3 &reference,
                               double wavelength);

    // Rician IRS-user channel:
    // (lambda / 4 pi) d^{-alpha/2} (sqrt(K/(1+K)) h_LoS + sqrt(1/(1+K)) h_NLoS),
    // h_LoS the plane-wave response towards `direction`, h_NLoS i.i.d. CN(0, 1). K = inf gives pure LoS.
    CVec rician_iu_channel(Rng &rng, const IrsGeometry &geometry, double distance, const Vec3 &direction,
                           double rician_factor, double pathloss_exponent, double wavelength);

    // Rank-one far-field model beta u v^H(T). u: plane-wave IRS response along `arrival`, v(T): plane-wave
    // response of the antenna positions along `departure`.
    CMat far_field_bs_irs(const Apv &apv, const IrsGeometry &geometry, const Vec3 &arrival, const Vec3 &departure,
                          cplx beta, double wavelength);

    // Transmit response v(T) used by far_field_bs_irs.
    CVec far_field_transmit_response(const Apv &apv, const Vec3 &departure, double wavelength);

    // h_IU^H diag(phi) H_BI.
    CRow cascaded_row(const CVec &irs_user, const Reflection &phi, const CMat &bs_irs);

    // Direct LoS channel lambda / (4 pi |t - q_U|) e^{j 2 pi |t - q_U| / lambda}.
    cplx direct_bs_user(const Vec3 &t, const Vec3 &user, double wavelength);

    // BS-IRS channel as a function of antenna positions. Evaluating it column by column lets the position
    // optimisers tabulate the channel over a sampling grid once per realisation.
    class BsIrsChannel
    {
    public:
        enum class Kind
        {
            los,
            multipath,
            far_field
        };

        static BsIrsChannel los(const IrsGeometry &geometry, double wavelength);
        static BsIrsChannel multipath(const IrsGeometry &geometry, double wavelength, ClusterSet clusters);
        static BsIrsChannel far_field(const IrsGeometry &geometry, double wavelength, const Vec3 &arrival,
                                      const Vec3 &departure, cplx beta);

        Kind kind() const { return kind_; }
        const IrsGeometry &geometry() const { return geometry_; }
        double wavelength() const { return wavelength_; }
        const ClusterSet &clusters() const { return clusters_; }
        std::size_t irs_size() const { return geometry_.size(); }

        CVec column(const Vec3 &t) const;
        CMat matrix(const Apv &apv) const;
        CMat columns(std::span<const Vec3> points) const;

    private:
        BsIrsChannel(const IrsGeometry &geometry, double wavelength);

        Kind kind_ = Kind::los;
        IrsGeometry geometry_;
        double wavelength_;
        ClusterSet clusters_;
        std::vector<CVec> irs_responses_; // l_p beta_p a(s_p), one per scattered path
        CVec far_u_;
        Vec3 far_departure_ = Vec3::UnitX();
        cplx far_beta_{1.0, 0.0};
    };

    // Channels of one realisation: the position-dependent BS-IRS channel and the per-user IRS-user
    // channels stored column-wise (M x K).
    struct ChannelSet
    {
        BsIrsChannel bs_irs;
        CMat irs_user;

        std::size_t num_users() const { return std::size_t(irs_user.cols()); }
        std::size_t irs_size() const { return std::size_t(irs_user.rows()); }

        // Stacked cascaded rows h_k^H = h_IU,k^H diag(phi) H_BI (K x N).
        CMat cascaded(const Reflection &phi, const CMat &bs_irs_matrix) const;
        CMat cascaded(const Reflection &phi, const Apv &apv) const { return cascaded(phi, bs_irs.matrix(apv)); }

        // Content digest over the IRS-user channels and the BS-IRS channel sampled at `probe` positions.
        std::uint64_t digest(std::span<const Vec3> probe) const;
    };

    // Writes (row, col, re, im) lines with a header.
    void write_matrix_csv(std::ostream &os, const CMat &m);
}
