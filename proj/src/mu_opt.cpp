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

#include "irsma/mu_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace irsma::mu
{
    namespace
    {
        void check_noise(double noise_power)
        {
            if (!(noise_power > 0.0) || !std::isfinite(noise_power))
                throw invalid_parameter("noise power must be positive and finite");
        }

        void check_finite(const CMat &m, const char *what)
        {
            if (!m.allFinite())
                throw invalid_parameter(std::string(what) + ": non-finite entries");
        }

        std::vector<double> uniform_powers(std::size_t k, double total)
        {
            if (k == 0)
                throw invalid_parameter("at least one user is required");
            return std::vector<double>(k, total / double(k));
        }
    }

    double user_rate(const CMat &channels, const CMat &w, std::size_t k, double noise_power)
    {
        if (channels.cols() != w.rows() || channels.rows() != w.cols())
            throw dimension_mismatch("user_rate: channels are K x N, W must be N x K");
        if (k >= std::size_t(channels.rows()))
            throw dimension_mismatch("user_rate: user index out of range");
        check_noise(noise_power);
        const CRow g = channels.row(Eigen::Index(k)) * w;
        double interference = noise_power;
        for (Eigen::Index i = 0; i < g.size(); ++i)
            if (i != Eigen::Index(k))
                interference += std::norm(g[i]);
        return std::log2(1.0 + std::norm(g[Eigen::Index(k)]) / interference);
    }

    double sum_rate(const CMat &channels, const CMat &w, double noise_power)
    {
        double r = 0.0;
        for (Eigen::Index k = 0; k < channels.rows(); ++k)
            r += user_rate(channels, w, std::size_t(k), noise_power);
        return r;
    }

    double sum_rate(const ChannelSet &set, const Reflection &phi, const CMat &bs_irs, const CMat &w,
                    double noise_power)
    {
        return sum_rate(set.cascaded(phi, bs_irs), w, noise_power);
    }

    CMat rzf(const CMat &channels, double alpha, std::span<const double> powers)
    {
        const Eigen::Index k = channels.rows();
        if (std::size_t(k) != powers.size())
            throw dimension_mismatch("rzf: one power per user is required");
        if (!(alpha >= 0.0) || !std::isfinite(alpha))
            throw invalid_parameter("rzf: regulariser must be non-negative and finite");
        check_finite(channels, "rzf");

        CMat gram = channels * channels.adjoint();
        if (alpha == 0.0)
        {
            const Eigen::SelfAdjointEigenSolver<CMat> es(gram, Eigen::EigenvaluesOnly);
            const RVec ev = es.eigenvalues();
            if (!(ev.minCoeff() > 1e-12 * std::max(ev.maxCoeff(), std::numeric_limits<double>::min())))
                throw singular_matrix("rzf: H H^H is singular, zero forcing is undefined");
        }
        gram.diagonal().array() += alpha;
        const CMat dir = channels.adjoint() * gram.ldlt().solve(CMat::Identity(k, k));

        CMat w(channels.cols(), k);
        for (Eigen::Index c = 0; c < k; ++c)
        {
            const double n = dir.col(c).norm();
            if (!(n > 0.0))
                throw degenerate_channel("rzf: zero precoding direction for user " + std::to_string(c));
            w.col(c) = std::sqrt(powers[std::size_t(c)]) / n * dir.col(c);
        }
        return w;
    }

    CMat rzf(const CMat &channels, double alpha, double total_power)
    {
        const auto p = uniform_powers(std::size_t(channels.rows()), total_power);
        return rzf(channels, alpha, p);
    }

    CMat mrt(const CMat &channels, std::span<const double> powers)
    {
        if (std::size_t(channels.rows()) != powers.size())
            throw dimension_mismatch("mrt: one power per user is required");
        CMat w(channels.cols(), channels.rows());
        for (Eigen::Index c = 0; c < channels.rows(); ++c)
        {
            const double n = channels.row(c).norm();
            if (!(n > 0.0))
                throw degenerate_channel("mrt: zero channel for user " + std::to_string(c));
            w.col(c) = std::sqrt(powers[std::size_t(c)]) / n * channels.row(c).adjoint();
        }
        return w;
    }

    CMat mrt(const CMat &channels, double total_power)
    {
        const auto p = uniform_powers(std::size_t(channels.rows()), total_power);
        return mrt(channels, p);
    }

    std::vector<double> rzf_rate_far_field(const CVec &q, std::span<const double> powers, std::size_t num_antennas,
                                           double noise_power)
    {
        if (std::size_t(q.size()) != powers.size())
            throw dimension_mismatch("rzf_rate_far_field: one power per user is required");
        const double n = double(num_antennas);
        double total = 0.0;
        for (double p : powers)
            total += p;
        std::vector<double> rates(powers.size());
        for (std::size_t k = 0; k < powers.size(); ++k)
        {
            const double g = std::norm(q[Eigen::Index(k)]);
            rates[k] = std::log2(1.0 + n * powers[k] * g / (n * g * (total - powers[k]) + noise_power));
        }
        return rates;
    }

    std::vector<double> mrt_rate_no_irs(const CVec &path_gains, const CMat &responses,
                                        std::span<const double> powers, double noise_power)
    {
        const std::size_t k_count = std::size_t(path_gains.size());
        if (std::size_t(responses.cols()) != k_count || powers.size() != k_count)
            throw dimension_mismatch("mrt_rate_no_irs: gains, responses and powers disagree");
        const double n = double(responses.rows());
        const CMat corr = responses.adjoint() * responses;
        std::vector<double> rates(k_count);
        for (std::size_t k = 0; k < k_count; ++k)
        {
            const double b = std::norm(path_gains[Eigen::Index(k)]);
            double inter = 0.0;
            for (std::size_t i = 0; i < k_count; ++i)
                if (i != k)
                    inter += powers[i] * std::norm(corr(Eigen::Index(k), Eigen::Index(i))) / (n * n);
            rates[k] = std::log2(1.0 + powers[k] * b / (b * inter + noise_power));
        }
        return rates;
    }

    // ---------------------------------------------------------------------------------------------

    CMat wmmse_precoder(const CMat &channels, const WmmseState &state, double power, double power_tolerance,
                        double &mu_out)
    {
        const Eigen::Index k = channels.rows();
        const Eigen::Index n = channels.cols();

        CMat a = CMat::Zero(n, n);
        CMat b(n, k);
        for (Eigen::Index i = 0; i < k; ++i)
        {
            const CVec h = channels.row(i).adjoint();
            a.noalias() += (state.kappa[i] * std::norm(state.chi[i])) * (h * h.adjoint());
            b.col(i) = (state.kappa[i] * state.chi[i]) * h;
        }

        const Eigen::SelfAdjointEigenSolver<CMat> es(a);
        const RVec lambda = es.eigenvalues().cwiseMax(0.0);
        const CMat c = es.eigenvectors().adjoint() * b;
        const RVec weight = c.rowwise().squaredNorm();
        const double null_level = 1e-12 * std::max(lambda.maxCoeff(), std::numeric_limits<double>::min());

        auto power_at = [&](double mu)
        {
            double p = 0.0;
            for (Eigen::Index j = 0; j < n; ++j)
            {
                const double d = lambda[j] + mu;
                if (mu == 0.0 && lambda[j] <= null_level)
                    continue; // b has no component there; pseudo-inverse
                p += weight[j] / (d * d);
            }
            return p;
        };
        auto precoder_at = [&](double mu)
        {
            RVec inv(n);
            for (Eigen::Index j = 0; j < n; ++j)
                inv[j] = (mu == 0.0 && lambda[j] <= null_level) ? 0.0 : 1.0 / (lambda[j] + mu);
            return CMat(es.eigenvectors() * inv.asDiagonal() * c);
        };

        double mu = 0.0;
        if (power_at(0.0) > power)
        {
            double lo = 0.0, hi = 1.0;
            for (int guard = 0; power_at(hi) > power && guard < 2100; ++guard)
            {
                lo = hi;
                hi *= 2.0;
            }
            for (int it = 0; it < 400; ++it)
            {
                if (power_at(hi) >= power * (1.0 - power_tolerance) || hi - lo <= 1e-15 * hi)
                    break;
                const double mid = 0.5 * (lo + hi);
                if (power_at(mid) > power)
                    lo = mid;
                else
                    hi = mid;
            }
            mu = hi;
        }
        mu_out = mu;
        return precoder_at(mu);
    }

    CMat wmmse_initial(const CMat &channels, double power)
    {
        const auto k = std::size_t(channels.rows());
        const auto p = uniform_powers(k, power);
        CMat w(channels.cols(), channels.rows());
        for (Eigen::Index c = 0; c < channels.rows(); ++c)
        {
            const double nrm = channels.row(c).norm();
            if (nrm > 0.0)
                w.col(c) = std::sqrt(p[std::size_t(c)]) / nrm * channels.row(c).adjoint();
            else
            {
                w.col(c).setZero();
                w(c % channels.cols(), c) = std::sqrt(p[std::size_t(c)]);
            }
        }
        return w;
    }

    WmmseResult wmmse(const CMat &channels, const CMat &w_init, double power, double noise_power,
                      const WmmseOptions &opt)
    {
        check_finite(channels, "wmmse");
        check_finite(w_init, "wmmse initial precoder");
        check_noise(noise_power);
        if (!(power > 0.0))
            throw invalid_parameter("wmmse: power budget must be positive");
        if (w_init.rows() != channels.cols() || w_init.cols() != channels.rows())
            throw dimension_mismatch("wmmse: W must be N x K");
        if (w_init.squaredNorm() > power * (1.0 + 1e-6))
            throw invalid_parameter("wmmse: initial precoder exceeds the power budget");

        const Eigen::Index k = channels.rows();
        WmmseResult res;
        res.w = w_init;
        res.sum_rate = sum_rate(channels, res.w, noise_power);
        res.state.chi = CVec::Zero(k);
        res.state.kappa = RVec::Ones(k);
        res.trace.push_back({0, res.sum_rate, 0.0, res.w.squaredNorm()});

        for (std::size_t it = 1; it <= opt.max_iterations; ++it)
        {
            const CMat g = channels * res.w; // g(k, i) = h_k^H w_i
            WmmseState st;
            st.chi.resize(k);
            st.kappa.resize(k);
            for (Eigen::Index u = 0; u < k; ++u)
            {
                const double total = g.row(u).squaredNorm() + noise_power;
                const double inter = total - std::norm(g(u, u));
                st.chi[u] = g(u, u) / total;
                st.kappa[u] = total / std::max(inter, std::numeric_limits<double>::min());
            }
            double mu = 0.0;
            CMat w_new = wmmse_precoder(channels, st, power, opt.power_tolerance, mu);
            st.mu = mu;
            // mu = 0 leaves power unused; scaling W up raises every SINR, so take the whole budget
            const double used = w_new.squaredNorm();
            if (opt.full_power && used > 0.0 && used < power)
                w_new *= std::sqrt(power / used);
            const double r_new = sum_rate(channels, w_new, noise_power);

            res.iterations = it;
            if (r_new < res.sum_rate)
                break; // rounding-level loss; keep the better point
            const double gain = r_new - res.sum_rate;
            res.w = std::move(w_new);
            res.state = st;
            res.sum_rate = r_new;
            res.trace.push_back({it, r_new, mu, res.w.squaredNorm()});
            if (gain <= opt.tolerance * std::max(1.0, r_new))
                break;
        }
        return res;
    }

    // ---------------------------------------------------------------------------------------------

    std::vector<CVec> reflect_terms(const CMat &irs_user, const CMat &bs_irs, const CMat &w)
    {
        if (irs_user.rows() != bs_irs.rows() || bs_irs.cols() != w.rows() || w.cols() != irs_user.cols())
            throw dimension_mismatch("reflect_terms: dimensions disagree");
        const Eigen::Index k = irs_user.cols();
        const CMat hw = bs_irs * w; // M x K
        std::vector<CVec> r;
        r.reserve(std::size_t(k * k));
        for (Eigen::Index u = 0; u < k; ++u)
            for (Eigen::Index i = 0; i < k; ++i)
                r.push_back(irs_user.col(u).cwiseProduct(hw.col(i).conjugate()));
        return r;
    }

    namespace
    {
        struct Powers
        {
            std::vector<cplx> c; // r_ki^H phi
            std::vector<double> total, inter;
        };

        Powers user_powers(const CVec &phi, const std::vector<CVec> &r, std::size_t k_count, double noise_power)
        {
            if (r.size() != k_count * k_count)
                throw dimension_mismatch("reflection terms must hold K^2 vectors");
            Powers p;
            p.c.resize(r.size());
            p.total.assign(k_count, noise_power);
            p.inter.assign(k_count, noise_power);
            for (std::size_t u = 0; u < k_count; ++u)
                for (std::size_t i = 0; i < k_count; ++i)
                {
                    const CVec &v = r[u * k_count + i];
                    if (v.size() != phi.size())
                        throw dimension_mismatch("reflection term length differs from M");
                    const cplx c = v.dot(phi); // r^H phi
                    p.c[u * k_count + i] = c;
                    p.total[u] += std::norm(c);
                    if (i != u)
                        p.inter[u] += std::norm(c);
                }
            return p;
        }
    }

    double f2(const CVec &phi, const std::vector<CVec> &r, std::size_t num_users, double noise_power)
    {
        check_noise(noise_power);
        const Powers p = user_powers(phi, r, num_users, noise_power);
        double f = 0.0;
        for (std::size_t u = 0; u < num_users; ++u)
            f -= std::log(p.total[u] / p.inter[u]);
        return f;
    }

    CVec euclidean_grad_f2(const CVec &phi, const std::vector<CVec> &r, std::size_t num_users, double noise_power)
    {
        check_noise(noise_power);
        const Powers p = user_powers(phi, r, num_users, noise_power);
        CVec g = CVec::Zero(phi.size());
        // d|phi^H r|^2 -> 2 r (r^H phi)
        for (std::size_t u = 0; u < num_users; ++u)
            for (std::size_t i = 0; i < num_users; ++i)
            {
                const std::size_t idx = u * num_users + i;
                double coef = -2.0 / p.total[u];
                if (i != u)
                    coef += 2.0 / p.inter[u];
                g += (coef * p.c[idx]) * r[idx];
            }
        return g;
    }

    CVec riemannian_project(const CVec &grad, const CVec &phi)
    {
        if (grad.size() != phi.size())
            throw dimension_mismatch("riemannian_project: length mismatch");
        CVec out(grad.size());
        for (Eigen::Index m = 0; m < grad.size(); ++m)
            out[m] = grad[m] - (grad[m] * std::conj(phi[m])).real() * phi[m];
        return out;
    }

    CVec vector_transport(const CVec &eta, const CVec &phi_next) { return riemannian_project(eta, phi_next); }

    CVec retract(const CVec &v)
    {
        CVec out(v.size());
        for (Eigen::Index m = 0; m < v.size(); ++m)
        {
            const double a = std::abs(v[m]);
            if (!(a > 0.0) || !std::isfinite(a))
                throw degenerate_retraction("retract: zero or non-finite entry at index " + std::to_string(m));
            out[m] = v[m] / a;
        }
        return out;
    }

    CVec retract_or(const CVec &v, const CVec &fallback)
    {
        CVec out(v.size());
        for (Eigen::Index m = 0; m < v.size(); ++m)
        {
            const double a = std::abs(v[m]);
            out[m] = (a > 0.0 && std::isfinite(a)) ? v[m] / a : fallback[m] / std::abs(fallback[m]);
        }
        return out;
    }

    CgResult manifold_cg(const std::vector<CVec> &r, std::size_t num_users, const Reflection &phi_init,
                         double noise_power, const CgOptions &opt)
    {
        CVec phi = phi_init.coefficients();
        double f = f2(phi, r, num_users, noise_power);
        CVec g = riemannian_project(euclidean_grad_f2(phi, r, num_users, noise_power), phi);
        CVec eta = -g;

        CgResult res;
        res.trace.push_back({0, f, g.norm(), 0.0});

        for (std::size_t it = 1; it <= opt.max_iterations; ++it)
        {
            if (g.norm() <= opt.tolerance)
                break;

            bool steepest = false;
            double slope = (g.adjoint() * eta)(0).real();
            if (!(slope < 0.0))
            {
                eta = -g;
                slope = -g.squaredNorm();
                steepest = true;
            }

            CVec cand;
            double fc = 0.0, step = 0.0;
            bool accepted = false;
            for (int attempt = 0; attempt < 2 && !accepted; ++attempt)
            {
                double a = opt.armijo_step;
                for (std::size_t b = 0; b <= opt.armijo_max_backtracks; ++b, a *= opt.armijo_shrink)
                {
                    cand = retract_or(phi + a * eta, phi);
                    fc = f2(cand, r, num_users, noise_power);
                    if (fc <= f + opt.armijo_c * a * slope)
                    {
                        accepted = true;
                        step = a;
                        break;
                    }
                }
                if (!accepted && !steepest)
                {
                    eta = -g;
                    slope = -g.squaredNorm();
                    steepest = true;
                }
                else
                    break;
            }
            if (!accepted)
                break; // no sufficient decrease along the steepest direction

            const CVec g_new = riemannian_project(euclidean_grad_f2(cand, r, num_users, noise_power), cand);
            const CVec g_old = vector_transport(g, cand);
            const double tau = std::max(0.0, (g_new.adjoint() * (g_new - g_old))(0).real() / g.squaredNorm());
            eta = -g_new + tau * vector_transport(eta, cand);

            phi = std::move(cand);
            f = fc;
            g = g_new;
            res.iterations = it;
            res.trace.push_back({it, f, g.norm(), step});
        }

        res.reflection = Reflection::from_coefficients(phi);
        res.f2 = f;
        res.grad_norm = g.norm();
        res.converged = res.grad_norm <= opt.tolerance;
        return res;
    }

    CgResult manifold_cg(const CMat &irs_user, const CMat &bs_irs, const CMat &w, const Reflection &phi_init,
                         double noise_power, const CgOptions &opt)
    {
        return manifold_cg(reflect_terms(irs_user, bs_irs, w), std::size_t(irs_user.cols()), phi_init, noise_power,
                           opt);
    }

    // ---------------------------------------------------------------------------------------------

    namespace
    {
        // Positions are addressed by id: ids below the grid size are grid points, the rest are the
        // (possibly off-grid) initial positions.
        template <class Pos, class Obj>
        std::vector<std::size_t> sequential_core(std::size_t grid_size, std::vector<std::size_t> ids, Pos &&pos,
                                                 double min_spacing, Obj &&objective, const SequentialOptions &opt,
                                                 SequentialReport *report)
        {
            double current = objective(ids);
            const double limit = min_spacing - opt.spacing_tolerance;
            for (std::size_t sweep = 0; sweep < opt.sweeps; ++sweep)
            {
                for (std::size_t n = 0; n < ids.size(); ++n)
                {
                    const std::size_t keep = ids[n];
                    std::size_t best_id = keep;
                    double best = current;
                    std::size_t feasible = 0;
                    for (std::size_t l = 0; l < grid_size; ++l)
                    {
                        bool ok = true;
                        for (std::size_t m = 0; m < ids.size() && ok; ++m)
                            if (m != n && (pos(l) - pos(ids[m])).norm() < limit)
                                ok = false;
                        if (!ok)
                            continue;
                        ++feasible;
                        if (l == keep)
                            continue;
                        ids[n] = l;
                        const double v = objective(ids);
                        if (v > best)
                        {
                            best = v;
                            best_id = l;
                        }
                    }
                    ids[n] = best_id;
                    current = best;
                    if (report)
                    {
                        report->objective_after_update.push_back(current);
                        if (feasible == 0)
                            ++report->empty_candidate_sets;
                    }
                }
            }
            return ids;
        }

        std::vector<std::size_t> initial_ids(std::size_t grid_size, std::size_t n)
        {
            std::vector<std::size_t> ids(n);
            for (std::size_t i = 0; i < n; ++i)
                ids[i] = grid_size + i;
            return ids;
        }
    }

    Apv sequential_position_search(std::span<const Vec3> grid, const Apv &init, double min_spacing,
                                   const std::function<double(const Apv &)> &objective,
                                   const SequentialOptions &opt, SequentialReport *report)
    {
        const std::size_t lg = grid.size();
        auto pos = [&](std::size_t id) -> const Vec3 & { return id < lg ? grid[id] : init[id - lg]; };
        auto to_apv = [&](const std::vector<std::size_t> &ids)
        {
            Apv a;
            a.positions.reserve(ids.size());
            for (auto id : ids)
                a.positions.push_back(pos(id));
            return a;
        };
        const auto ids = sequential_core(lg, initial_ids(lg, init.size()), pos, min_spacing,
                                         [&](const std::vector<std::size_t> &v) { return objective(to_apv(v)); },
                                         opt, report);
        return to_apv(ids);
    }

    CMat refresh_precoder(const CMat &channels, const CMat &w, double power, double noise_power,
                          std::size_t iterations)
    {
        if (iterations == 0)
            return w;
        WmmseOptions o;
        o.max_iterations = iterations;
        o.tolerance = 0.0;
        return wmmse(channels, w, power, noise_power, o).w;
    }

    Apv sequential_position_search(const ChannelSet &set, const Reflection &phi, const CMat &w,
                                   const SamplingGrid &grid, const Apv &init, double min_spacing, double noise_power,
                                   double power, const SequentialOptions &opt, SequentialReport *report)
    {
        const std::size_t lg = grid.size();
        const std::size_t n = init.size();
        if (std::size_t(w.rows()) != n)
            throw dimension_mismatch("sequential_position_search: W rows differ from antenna count");

        // cascaded column per candidate position: K x (L + N)
        const CMat lhs = set.irs_user.adjoint() * phi.coefficients().asDiagonal();
        CMat cols(lhs.rows(), Eigen::Index(lg + n));
        cols.leftCols(Eigen::Index(lg)) = lhs * set.bs_irs.columns(grid.points());
        cols.rightCols(Eigen::Index(n)) = lhs * set.bs_irs.matrix(init);

        auto pos = [&](std::size_t id) -> const Vec3 & { return id < lg ? grid.point(id) : init[id - lg]; };
        CMat heff(lhs.rows(), Eigen::Index(n));
        auto objective = [&](const std::vector<std::size_t> &ids)
        {
            for (std::size_t i = 0; i < n; ++i)
                heff.col(Eigen::Index(i)) = cols.col(Eigen::Index(ids[i]));
            if (opt.precoder_refresh == 0)
                return sum_rate(heff, w, noise_power);
            return sum_rate(heff, refresh_precoder(heff, w, power, noise_power, opt.precoder_refresh), noise_power);
        };
        const auto ids = sequential_core(lg, initial_ids(lg, n), pos, min_spacing, objective, opt, report);
        Apv out;
        for (auto id : ids)
            out.positions.push_back(pos(id));
        return out;
    }

    // ---------------------------------------------------------------------------------------------

    AoSolution ao_multi_user(const ChannelSet &set, const SamplingGrid &grid, double power, double noise_power,
                             double min_spacing, const CMat &w_init, const Reflection &phi_init,
                             const Apv &apv_init, const AoOptions &opt)
    {
        AoSolution sol;
        sol.w = w_init;
        sol.reflection = phi_init;
        sol.apv = apv_init;

        CMat h = set.bs_irs.matrix(sol.apv);
        double rate = sum_rate(set, sol.reflection, h, sol.w, noise_power);
        sol.initial_rate = rate;

        for (std::size_t it = 1; it <= opt.max_outer; ++it)
        {
            const double previous = rate;
            AoTraceEntry e{it, rate, rate, rate};

            if (opt.optimize_precoding)
            {
                const WmmseResult wr = wmmse(set.cascaded(sol.reflection, h), sol.w, power, noise_power, opt.wmmse);
                if (wr.sum_rate >= rate)
                {
                    sol.w = wr.w;
                    rate = wr.sum_rate;
                }
            }
            e.after_precoding = rate;

            if (opt.optimize_reflection)
            {
                const CgResult cr = manifold_cg(set.irs_user, h, sol.w, sol.reflection, noise_power, opt.cg);
                const double v = sum_rate(set, cr.reflection, h, sol.w, noise_power);
                if (v >= rate)
                {
                    sol.reflection = cr.reflection;
                    rate = v;
                }
            }
            e.after_reflection = rate;

            if (opt.optimize_positions)
            {
                Apv cand = sequential_position_search(set, sol.reflection, sol.w, grid, sol.apv, min_spacing,
                                                      noise_power, power, opt.sequential);
                CMat h_new = set.bs_irs.matrix(cand);
                CMat w_new = refresh_precoder(set.cascaded(sol.reflection, h_new), sol.w, power, noise_power,
                                              opt.sequential.precoder_refresh);
                const double v = sum_rate(set, sol.reflection, h_new, w_new, noise_power);
                if (v >= rate)
                {
                    sol.apv = std::move(cand);
                    sol.w = std::move(w_new);
                    h = std::move(h_new);
                    rate = v;
                }
            }
            e.after_positions = rate;

            sol.trace.push_back(e);
            sol.iterations = it;
            if (std::abs(rate - previous) <= opt.tolerance * std::max(1.0, previous))
            {
                sol.converged = true;
                break;
            }
        }
        sol.sum_rate = rate;
        return sol;
    }
}
