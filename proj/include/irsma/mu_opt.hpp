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

namespace irsma::mu
{
    // Throughout, `channels` is the K x N matrix whose row k is the cascaded row h_k^H and W is N x K.

    // log2(1 + |h_k^H w_k|^2 / (sum_{i != k} |h_k^H w_i|^2 + sigma^2))
    double user_rate(const CMat &channels, const CMat &w, std::size_t k, double noise_power);
    double sum_rate(const CMat &channels, const CMat &w, double noise_power);

    double sum_rate(const ChannelSet &set, const Reflection &phi, const CMat &bs_irs, const CMat &w,
                    double noise_power);

    // Regularised zero forcing: directions H^H (H H^H + alpha I)^{-1}, column k normalised to sqrt(p_k).
    // alpha = 0 is ZF and needs H H^H invertible, alpha = sigma^2 is MMSE, alpha -> inf tends to MRT.
    CMat rzf(const CMat &channels, double alpha, std::span<const double> powers);
    CMat rzf(const CMat &channels, double alpha, double total_power); // uniform P/K

    // Matched filter, column k = sqrt(p_k) h_k / |h_k|.
    CMat mrt(const CMat &channels, std::span<const double> powers);
    CMat mrt(const CMat &channels, double total_power);

    // Per-user rates under the rank-one far-field model with q_k = beta h_IU,k^H Phi u:
    // log2(1 + N p_k |q_k|^2 / (N |q_k|^2 sum_{i != k} p_i + sigma^2)).
    std::vector<double> rzf_rate_far_field(const CVec &q, std::span<const double> powers, std::size_t num_antennas,
                                           double noise_power);

    // Direct far-field LoS link without IRS, MRT per user. `responses` holds the unit-modulus transmit
    // responses v_k(T) column-wise (N x K).
    // log2(1 + p_k |b_k|^2 / (|b_k|^2 sum_{i != k} p_i |v_k^H v_i|^2 / N^2 + sigma^2))
    std::vector<double> mrt_rate_no_irs(const CVec &path_gains, const CMat &responses,
                                        std::span<const double> powers, double noise_power);

    // ---------------------------------------------------------------------------------------------
    // WMMSE

    struct WmmseState
    {
        CVec chi;
        RVec kappa;
        double mu = 0.0;
    };

    struct WmmseOptions
    {
        double tolerance = 1e-8; // relative sum-rate improvement
        std::size_t max_iterations = 200;
        double power_tolerance = 1e-9; // relative, bisection target band [P (1 - tol), P]
        // Rescale to sum_k |w_k|^2 = P when the update lands inside the budget (mu = 0). Off gives the
        // plain update, which can crawl towards full power over hundreds of iterations at high SNR.
        bool full_power = true;
    };

    struct WmmseTraceEntry
    {
        std::size_t iteration;
        double sum_rate;
        double mu;
        double power;
    };

    struct WmmseResult
    {
        CMat w;
        WmmseState state;
        double sum_rate = 0.0;
        std::size_t iterations = 0;
        std::vector<WmmseTraceEntry> trace; // entry 0 is the initial point
    };

    // Given chi, kappa: w_k(mu) = (mu I + sum_i kappa_i |chi_i|^2 h_i h_i^H)^{-1} kappa_k chi_k h_k with mu the
    // smallest non-negative value meeting sum_k |w_k|^2 <= P.
    CMat wmmse_precoder(const CMat &channels, const WmmseState &state, double power, double power_tolerance,
                        double &mu_out);

    // Equal-power MRT, used as the default starting point.
    CMat wmmse_initial(const CMat &channels, double power);

    WmmseResult wmmse(const CMat &channels, const CMat &w_init, double power, double noise_power,
                      const WmmseOptions &opt = {});

    // ---------------------------------------------------------------------------------------------
    // Passive beamforming on the complex circle manifold

    // r_{k,i} = h_IU,k (.) conj(H_BI w_i), so that |phi^H r_{k,i}| = |h_k^H w_i|.
    // Index r[k * K + i].
    std::vector<CVec> reflect_terms(const CMat &irs_user, const CMat &bs_irs, const CMat &w);

    // f2(phi) = -sum_k ln(1 + |phi^H r_kk|^2 / (sum_{i != k} |phi^H r_ki|^2 + sigma^2)).
    double f2(const CVec &phi, const std::vector<CVec> &r, std::size_t num_users, double noise_power);

    // Euclidean gradient G of f2 for the real inner product Re{a^H b}: f2(phi + t z) = f2(phi) + t Re{G^H z} + o(t).
    CVec euclidean_grad_f2(const CVec &phi, const std::vector<CVec> &r, std::size_t num_users, double noise_power);

    // grad - Re{grad (.) conj(phi)} (.) phi
    CVec riemannian_project(const CVec &grad, const CVec &phi);
    // eta - Re{eta (.) conj(phi_next)} (.) phi_next
    CVec vector_transport(const CVec &eta, const CVec &phi_next);
    // Entrywise v_m / |v_m|; throws degenerate_retraction on a zero entry.
    CVec retract(const CVec &v);
    // As retract, but zero entries take the phase of `fallback`.
    CVec retract_or(const CVec &v, const CVec &fallback);

    struct CgOptions
    {
        double tolerance = 1e-5; // epsilon_2 on the Riemannian gradient norm
        std::size_t max_iterations = 500;
        double armijo_step = 1.0;
        double armijo_c = 1e-4;
        double armijo_shrink = 0.5;
        std::size_t armijo_max_backtracks = 30;
    };

    struct CgTraceEntry
    {
        std::size_t iteration;
        double f2;
        double grad_norm;
        double step;
    };

    struct CgResult
    {
        Reflection reflection;
        double f2 = 0.0;
        double grad_norm = 0.0;
        std::size_t iterations = 0;
        bool converged = false; // grad_norm <= tolerance
        std::vector<CgTraceEntry> trace; // entry 0 is the initial point
    };

    CgResult manifold_cg(const std::vector<CVec> &r, std::size_t num_users, const Reflection &phi_init,
                         double noise_power, const CgOptions &opt = {});

    CgResult manifold_cg(const CMat &irs_user, const CMat &bs_irs, const CMat &w, const Reflection &phi_init,
                         double noise_power, const CgOptions &opt = {});

    // ---------------------------------------------------------------------------------------------
    // Discrete position search

    struct SequentialOptions
    {
        std::size_t sweeps = 1;
        double spacing_tolerance = 1e-9; // metres
        // > 0: every candidate is scored after this many warm-started WMMSE iterations at the candidate
        // APV instead of with W frozen.
        std::size_t precoder_refresh = 3;
    };

    struct SequentialReport
    {
        std::vector<double> objective_after_update; // one entry per antenna update
        std::size_t empty_candidate_sets = 0;
    };

    // For n = 1..N: enumerate grid points at least D_min from every other antenna, move antenna n to the
    // best one. The current position always competes, so the objective never decreases. Ties keep the
    // current position, otherwise the lowest grid index wins.
    Apv sequential_position_search(std::span<const Vec3> grid, const Apv &init, double min_spacing,
                                   const std::function<double(const Apv &)> &objective,
                                   const SequentialOptions &opt = {}, SequentialReport *report = nullptr);

    // Sum-rate instance: columns of H_BI are computed once per grid point. `power` is only used when
    // opt.precoder_refresh > 0.
    Apv sequential_position_search(const ChannelSet &set, const Reflection &phi, const CMat &w,
                                   const SamplingGrid &grid, const Apv &init, double min_spacing, double noise_power,
                                   double power, const SequentialOptions &opt = {},
                                   SequentialReport *report = nullptr);

    // W after `iterations` WMMSE steps from w at the given cascaded channels (w itself when iterations = 0).
    CMat refresh_precoder(const CMat &channels, const CMat &w, double power, double noise_power,
                          std::size_t iterations);

    // ---------------------------------------------------------------------------------------------
    // Alternating optimisation

    struct AoOptions
    {
        double tolerance = 1e-3; // |R_i - R_{i-1}| <= tolerance * max(1, R_{i-1})
        std::size_t max_outer = 50;
        bool optimize_precoding = true;
        bool optimize_reflection = true;
        bool optimize_positions = true;
        WmmseOptions wmmse;
        CgOptions cg;
        SequentialOptions sequential;
    };

    struct AoTraceEntry
    {
        std::size_t iteration;
        double after_precoding;
        double after_reflection;
        double after_positions;
    };

    struct AoSolution
    {
        CMat w;
        Reflection reflection;
        Apv apv;
        double sum_rate = 0.0;
        std::size_t iterations = 0;
        bool converged = false;
        double initial_rate = 0.0;
        std::vector<AoTraceEntry> trace;
    };

    AoSolution ao_multi_user(const ChannelSet &set, const SamplingGrid &grid, double power, double noise_power,
                             double min_spacing, const CMat &w_init, const Reflection &phi_init,
                             const Apv &apv_init, const AoOptions &opt = {});
}
