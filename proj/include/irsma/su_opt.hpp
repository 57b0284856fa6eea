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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "irsma/channel.hpp"
#include "irsma/geometry.hpp"
#include "irsma/reflection.hpp"

namespace irsma::su
{
    // Received SNR (P / sigma^2) |h_IU^H diag(phi) H_BI w|^2 for a unit-norm beamformer w.
    double snr(const CVec &irs_user, const Reflection &phi, const CMat &bs_irs, const CVec &w, double power,
               double noise_power);

    // Maximum-ratio transmission w = h / |h| for the cascaded row h^H.
    CVec mrt(const CRow &cascaded);
    CVec mrt(const CVec &irs_user, const Reflection &phi, const CMat &bs_irs);

    // Co-phasing solution for a single antenna: phi_m = arg(h_IU,m) - arg(h_BI,m).
    // Zero entries get phase 0.
    Reflection optimal_irs_phase_su(const CVec &irs_user, const CVec &bs_irs);

    // Channel power gain under the co-phasing solution: (lambda/4pi)^2 (sum_m |h_IU,m| / D_m)^2.
    double gain_closed_form(const Vec3 &t, const IrsGeometry &geometry, const CVec &irs_user, double wavelength);

    // H(My, Mz, t) = sum_m |h_IU,m| / sqrt(R^2 + y_m^2 + z_m^2), R = |t|.
    double lemma_sum(const Vec3 &t, const IrsGeometry &geometry, const CVec &irs_user);

    struct ApproxGain
    {
        double gain;
        double premise_y; // |y_t| d / R^2
        double premise_z; // |z_t| d / R^2
    };

    // Small-offset approximation (lambda/4pi)^2 H^2; the premise magnitudes are returned so callers can
    // judge its validity.
    ApproxGain gain_approx_lemma1(const Vec3 &t, const IrsGeometry &geometry, const CVec &irs_user, double wavelength);

    // Point of the region closest to the IRS center, i.e. argmin_t |t|.
    Vec3 optimal_single_ma_position(const TransmitRegion &region);

    // H^2(t1) - H^2(t2) (without the (lambda/4pi)^2 factor). Requires |t1| <= |t2|.
    double gain_difference(const Vec3 &t1, const Vec3 &t2, const IrsGeometry &geometry, const CVec &irs_user);

    struct BcdOptions
    {
        double tolerance = 1e-3; // relative objective increment per sweep
        std::size_t max_sweeps = 200;
    };

    // Element-wise BCD for max_phi || sum_m g_m e^{j phi_m} ||^2 with g_m = conj(h_IU,m) H_BI[m,:].
    // `on_update`, if set, receives the objective after every single-element update.
    Reflection bcd_irs(const CVec &irs_user, const CMat &bs_irs, const Reflection &phi_init,
                       const BcdOptions &opt = {}, const std::function<void(double)> &on_update = {});

    // || h_IU^H diag(phi) H_BI ||^2, the BCD objective.
    double bcd_objective(const CVec &irs_user, const Reflection &phi, const CMat &bs_irs);

    // Selects `count` indices maximising sum weights[a_n] with pairwise index gap >= min_gap.
    // Dynamic program over (point, count) with prefix maxima, O(count * weights.size()).
    // Ties go to the smallest last index, then recursively to the smallest predecessor; for count 1 this
    // is the lowest maximising index. Result is sorted ascending.
    std::vector<std::size_t> graph_position_select(std::span<const double> weights, std::size_t count,
                                                   std::size_t min_gap);

    inline std::vector<std::size_t> graph_position_select(const SamplingGrid &grid, std::span<const double> weights,
                                                          std::size_t count)
    {
        return graph_position_select(weights, count, grid.min_index_gap());
    }

    struct SuOptions
    {
        double eps_bcd = 1e-3;   // inner BCD relative tolerance
        double eps_outer = 1e-3; // relative |gamma_2 - gamma_1| stopping threshold
        std::size_t max_outer = 30;
        std::size_t max_bcd_sweeps = 200;
        bool optimize_reflection = true;
        bool optimize_positions = true;
    };

    struct SuTraceEntry
    {
        std::size_t iteration;
        double snr_after_reflection; // gamma_1
        double snr_after_positions;  // gamma_2
    };

    struct SuSolution
    {
        Reflection reflection;
        Apv apv;
        CVec beamformer;
        double snr = 0.0;
        std::size_t iterations = 0;
        std::vector<SuTraceEntry> trace;
    };

    // Alternating optimisation: BCD on the reflection, graph-based placement over `grid`, MRT recomputed at
    // every step. The position step is accepted only if it does not lower the SNR, which keeps the SNR
    // sequence non-decreasing even when the initial layout lies off the grid.
    SuSolution ao_single_user(const BsIrsChannel &bs_irs, const CVec &irs_user, const SamplingGrid &grid,
                              double power, double noise_power, const Reflection &phi_init, const Apv &apv_init,
                              const SuOptions &opt = {});
}
