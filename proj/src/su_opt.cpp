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

#include "irsma/su_opt.hpp"

#include <cmath>
#include <limits>

namespace irsma::su
{
    double snr(const CVec &irs_user, const Reflection &phi, const CMat &bs_irs, const CVec &w, double power,
               double noise_power)
    {
        const CRow row = cascaded_row(irs_user, phi, bs_irs);
        if (row.size() != w.size())
            throw dimension_mismatch("snr: beamformer length differs from antenna count");
        return power / noise_power * std::norm((row * w)(0));
    }

    CVec mrt(const CRow &cascaded)
    {
        const double n = cascaded.norm();
        if (!(n > 0.0))
            throw degenerate_channel("mrt: cascaded channel is zero");
        return cascaded.adjoint() / n;
    }

    CVec mrt(const CVec &irs_user, const Reflection &phi, const CMat &bs_irs)
    {
        return mrt(cascaded_row(irs_user, phi, bs_irs));
    }

    Reflection optimal_irs_phase_su(const CVec &irs_user, const CVec &bs_irs)
    {
        if (irs_user.size() != bs_irs.size())
            throw dimension_mismatch("optimal_irs_phase_su: channel lengths differ");
        RVec ph(irs_user.size());
        for (Eigen::Index m = 0; m < ph.size(); ++m)
        {
            if (irs_user[m] == cplx(0.0) || bs_irs[m] == cplx(0.0))
                ph[m] = 0.0;
            else
                ph[m] = std::arg(irs_user[m]) - std::arg(bs_irs[m]);
        }
        return Reflection::from_phases(ph);
    }

    double gain_closed_form(const Vec3 &t, const IrsGeometry &geometry, const CVec &irs_user, double wavelength)
    {
        if (std::size_t(irs_user.size()) != geometry.size())
            throw dimension_mismatch("gain_closed_form: IRS-user channel length differs from element count");
        double sum = 0.0;
        for (std::size_t m = 0; m < geometry.size(); ++m)
        {
            const double d = (t - geometry.element(m)).norm();
            if (!(d > 0.0))
                throw degenerate_geometry("gain_closed_form: antenna coincides with an IRS element");
            sum += std::abs(irs_user[Eigen::Index(m)]) / d;
        }
        const double s = wavelength / (4.0 * pi);
        return s * s * sum * sum;
    }

    double lemma_sum(const Vec3 &t, const IrsGeometry &geometry, const CVec &irs_user)
    {
        if (std::size_t(irs_user.size()) != geometry.size())
            throw dimension_mismatch("lemma_sum: IRS-user channel length differs from element count");
        const double r2 = t.squaredNorm();
        double sum = 0.0;
        for (std::size_t m = 0; m < geometry.size(); ++m)
        {
            const Vec3 &e = geometry.element(m);
            sum += std::abs(irs_user[Eigen::Index(m)]) / std::sqrt(r2 + e[1] * e[1] + e[2] * e[2]);
        }
        return sum;
    }

    ApproxGain gain_approx_lemma1(const Vec3 &t, const IrsGeometry &geometry, const CVec &irs_user, double wavelength)
    {
        const double h = lemma_sum(t, geometry, irs_user);
        const double s = wavelength / (4.0 * pi);
        const double r2 = t.squaredNorm();
        const double d = geometry.element_spacing();
        return {s * s * h * h, std::abs(t[1]) * d / r2, std::abs(t[2]) * d / r2};
    }

    Vec3 optimal_single_ma_position(const TransmitRegion &region) { return region.nearest_point(Vec3::Zero()); }

    double gain_difference(const Vec3 &t1, const Vec3 &t2, const IrsGeometry &geometry, const CVec &irs_user)
    {
        if (t1.norm() > t2.norm())
            throw invalid_parameter("gain_difference: t1 must be at least as close to the IRS center as t2");
        const double h1 = lemma_sum(t1, geometry, irs_user);
        const double h2 = lemma_sum(t2, geometry, irs_user);
        return (h1 + h2) * (h1 - h2);
    }

    double bcd_objective(const CVec &irs_user, const Reflection &phi, const CMat &bs_irs)
    {
        return cascaded_row(irs_user, phi, bs_irs).squaredNorm();
    }

    Reflection bcd_irs(const CVec &irs_user, const CMat &bs_irs, const Reflection &phi_init, const BcdOptions &opt,
                       const std::function<void(double)> &on_update)
    {
        if (irs_user.size() != phi_init.size() || bs_irs.rows() != irs_user.size())
            throw dimension_mismatch("bcd_irs: IRS dimensions disagree");

        const CMat g = irs_user.conjugate().asDiagonal() * bs_irs; // row m = g_{1,m}
        CVec phi = phi_init.coefficients();
        const Eigen::Index m_count = phi.size();

        double previous = (g.transpose() * phi).squaredNorm();
        for (std::size_t sweep = 0; sweep < opt.max_sweeps; ++sweep)
        {
            CRow s = (g.transpose() * phi).transpose();
            for (Eigen::Index m = 0; m < m_count; ++m)
            {
                const CRow alpha = s - phi[m] * g.row(m);
                const cplx c = (alpha * g.row(m).adjoint())(0);
                // alpha g_m^H == 0: every phase is optimal, keep the current one
                if (std::abs(c) > 1e-14 * alpha.norm() * g.row(m).norm() && std::abs(c) > 0.0)
                    phi[m] = std::polar(1.0, std::arg(c));
                s = alpha + phi[m] * g.row(m);
                if (on_update)
                    on_update(s.squaredNorm());
            }
            const double current = (g.transpose() * phi).squaredNorm();
            const double gain = current - previous;
            previous = current;
            if (gain <= opt.tolerance * std::max(current, std::numeric_limits<double>::min()))
                break;
        }
        return Reflection::from_coefficients(phi);
    }

    std::vector<std::size_t> graph_position_select(std::span<const double> weights, std::size_t count,
                                                   std::size_t min_gap)
    {
        const std::size_t L = weights.size();
        if (count == 0)
            return {};
        if (min_gap == 0)
            throw invalid_parameter("graph_position_select: minimum index gap must be at least 1");
        if ((count - 1) * min_gap + 1 > L)
            throw infeasible_spacing("graph_position_select: " + std::to_string(count) + " antennas with index gap " +
                                     std::to_string(min_gap) + " do not fit on " + std::to_string(L) + " points");

        constexpr double none = -std::numeric_limits<double>::infinity();

        // value[c][l]: best sum of c+1 points whose last point is l (sums accumulate left to right)
        // best[c][l] / arg[c][l]: prefix maximum of value[c][0..l] and its smallest maximiser
        std::vector<std::vector<double>> best(count, std::vector<double>(L, none));
        std::vector<std::vector<std::size_t>> arg(count, std::vector<std::size_t>(L, 0));

        for (std::size_t c = 0; c < count; ++c)
        {
            double run = none;
            std::size_t run_arg = 0;
            for (std::size_t l = 0; l < L; ++l)
            {
                double v = none;
                if (c == 0)
                    v = weights[l];
                else if (l >= min_gap && best[c - 1][l - min_gap] != none)
                    v = best[c - 1][l - min_gap] + weights[l];
                if (v > run)
                {
                    run = v;
                    run_arg = l;
                }
                best[c][l] = run;
                arg[c][l] = run_arg;
            }
        }

        std::vector<std::size_t> sel(count);
        std::size_t limit = L - 1;
        for (std::size_t c = count; c-- > 0;)
        {
            sel[c] = arg[c][limit];
            if (c > 0)
                limit = sel[c] - min_gap;
        }
        return sel;
    }

    namespace
    {
        CVec safe_mrt(const CRow &row)
        {
            if (row.norm() > 0.0)
                return mrt(row);
            CVec w = CVec::Zero(row.size());
            w[0] = 1.0;
            return w;
        }
    }

    SuSolution ao_single_user(const BsIrsChannel &bs_irs, const CVec &irs_user, const SamplingGrid &grid,
                              double power, double noise_power, const Reflection &phi_init, const Apv &apv_init,
                              const SuOptions &opt)
    {
        if (apv_init.size() == 0)
            throw invalid_parameter("ao_single_user: empty initial APV");
        if (std::size_t(irs_user.size()) != bs_irs.irs_size() || phi_init.size() != irs_user.size())
            throw dimension_mismatch("ao_single_user: IRS dimensions disagree");

        const double budget = power / noise_power;
        SuSolution sol;
        sol.reflection = phi_init;
        sol.apv = apv_init;
        CMat h = bs_irs.matrix(sol.apv);

        CMat grid_columns;
        if (opt.optimize_positions)
            grid_columns = bs_irs.columns(grid.points());

        auto objective = [&](const Reflection &phi, const CMat &hb) { return bcd_objective(irs_user, phi, hb); };

        double current = objective(sol.reflection, h);
        const BcdOptions bcd_opt{opt.eps_bcd, opt.max_bcd_sweeps};

        for (std::size_t it = 1; it <= opt.max_outer; ++it)
        {
            if (opt.optimize_reflection)
            {
                Reflection cand = bcd_irs(irs_user, h, sol.reflection, bcd_opt);
                const double v = objective(cand, h);
                if (v >= current)
                {
                    sol.reflection = std::move(cand);
                    current = v;
                }
            }
            const double gamma1 = budget * current;

            if (opt.optimize_positions)
            {
                const CRow g2 = (irs_user.conjugate().cwiseProduct(sol.reflection.coefficients())).transpose();
                const CRow per_point = g2 * grid_columns;
                std::vector<double> weights(std::size_t(per_point.size()));
                for (Eigen::Index l = 0; l < per_point.size(); ++l)
                    weights[std::size_t(l)] = std::norm(per_point[l]);

                const auto idx = graph_position_select(grid, weights, apv_init.size());
                CMat h_new(h.rows(), Eigen::Index(idx.size()));
                for (std::size_t n = 0; n < idx.size(); ++n)
                    h_new.col(Eigen::Index(n)) = grid_columns.col(Eigen::Index(idx[n]));
                const double v = objective(sol.reflection, h_new);
                if (v >= current)
                {
                    sol.apv = grid.apv_from_indices(idx);
                    h = std::move(h_new);
                    current = v;
                }
            }
            const double gamma2 = budget * current;

            sol.trace.push_back({it, gamma1, gamma2});
            sol.iterations = it;
            if (std::abs(gamma2 - gamma1) <= opt.eps_outer * std::max(gamma1, std::numeric_limits<double>::min()))
                break;
        }

        const CRow row = cascaded_row(irs_user, sol.reflection, h);
        sol.beamformer = safe_mrt(row);
        sol.snr = budget * row.squaredNorm();
        return sol;
    }
}
