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

#include "irsma/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "irsma/mu_opt.hpp"
#include "irsma/rng.hpp"
#include "irsma/su_opt.hpp"

namespace irsma::analysis
{
    namespace
    {
        double cophased_snr(const CVec &h_iu, const CVec &h_bi, double budget)
        {
            const Reflection phi = su::optimal_irs_phase_su(h_iu, h_bi);
            CMat col(h_bi.size(), 1);
            col.col(0) = h_bi;
            return budget * cascaded_row(h_iu, phi, col).squaredNorm();
        }

        const char *verdict(bool ok) { return ok ? "PASS" : "FAIL"; }
    }

    EquivalenceReport verify_single_ma_equivalence(const Scenario &scenario, const std::vector<double> &distances,
                                                   std::size_t seeds)
    {
        Scenario base = scenario;
        base.num_mas = 1;
        base.bs_irs_model = BsIrsModel::los;

        EquivalenceReport rep;
        for (double d : distances)
        {
            const Scenario s = base.with_bs_irs_distance(d);
            const IrsGeometry geo = s.geometry();
            const double lambda = s.wavelength();
            const TransmitRegion region = s.region();
            const SamplingGrid grid = s.grid();
            const BsIrsChannel bs = BsIrsChannel::los(geo, lambda);
            const Vec3 t_fpa = su::optimal_single_ma_position(region);
            const CVec h_fpa = bs.column(t_fpa);

            EquivalenceRow row{d, 0.0, 0.0, 0.0};
            for (std::size_t r = 0; r < seeds; ++r)
            {
                const CVec h_iu = draw_channels(s, r).irs_user.col(0);

                std::size_t best = 0;
                double best_gain = -1.0;
                for (std::size_t l = 0; l < grid.size(); ++l)
                {
                    const double g = su::gain_closed_form(grid.point(l), geo, h_iu, lambda);
                    if (g > best_gain)
                    {
                        best_gain = g;
                        best = l;
                    }
                }
                const double snr_ma = cophased_snr(h_iu, bs.column(grid.point(best)), s.snr_budget());
                const double snr_fpa = cophased_snr(h_iu, h_fpa, s.snr_budget());
                row.snr_ma_mean += snr_ma / double(seeds);
                row.snr_fpa_mean += snr_fpa / double(seeds);
                row.max_gap = std::max(row.max_gap, std::abs(snr_ma - snr_fpa) / snr_fpa);
            }
            rep.max_gap = std::max(rep.max_gap, row.max_gap);
            rep.rows.push_back(row);
        }
        rep.pass = !rep.rows.empty() && rep.max_gap <= rep.tolerance;
        return rep;
    }

    FarFieldReport verify_far_field_no_gain(const Scenario &scenario, std::size_t num_apvs, std::uint64_t realization)
    {
        Scenario s = scenario;
        s.bs_irs_model = BsIrsModel::far_field;
        s.validate();

        const double lambda = s.wavelength();
        const IrsGeometry geo = s.geometry();
        const TransmitRegion region = s.region();
        const ChannelSet ch = draw_channels(s, realization);
        const Reflection phi = draw_random_reflection(s, realization);
        const Vec3 dir = s.region_center.normalized();
        const std::size_t n = s.num_mas;
        const std::size_t k = s.num_users;

        // independent closed form: q_k = beta h_IU,k^H Phi u
        const double d = s.bs_irs_distance();
        const cplx beta = (lambda / (4.0 * pi * d)) * wave_phase(d, lambda);
        const CVec u = plane_wave_response(geo.elements(), dir, lambda);
        const CVec q = beta * (ch.irs_user.adjoint() * phi.coefficients().cwiseProduct(u));
        const std::vector<double> powers(k, s.transmit_power / double(k));
        const std::vector<double> closed = mu::rzf_rate_far_field(q, powers, n, s.noise_power);

        Rng rng = substream(s.master_seed, realization, "far_field_apvs");
        std::vector<Apv> apvs;
        for (std::size_t a = 0; a < std::max<std::size_t>(num_apvs, 2); ++a)
        {
            Apv t;
            for (int attempt = 0; attempt < 1000; ++attempt)
            {
                std::vector<double> off(n);
                for (auto &o : off)
                    o = uniform(rng, -0.5 * region.length(), 0.5 * region.length());
                std::sort(off.begin(), off.end());
                t.positions.clear();
                for (double o : off)
                    t.positions.push_back(region.point_at(o));
                if (t.is_feasible(region, s.min_spacing))
                    break;
            }
            apvs.push_back(std::move(t));
        }

        FarFieldReport rep;
        rep.num_apvs = apvs.size();

        for (const Apv &t : apvs)
        {
            const CMat h = ch.bs_irs.matrix(t);
            const CVec w = su::mrt(ch.irs_user.col(0), phi, h);
            const CVec v = far_field_transmit_response(t, -dir, lambda);
            rep.max_su_error = std::max(rep.max_su_error, std::abs(std::norm(v.dot(w)) - double(n)));
        }

        struct Kind
        {
            const char *name;
            double alpha; // < 0: MRT
        };
        std::vector<Kind> kinds{{"mrt", -1.0}, {"zf", 0.0}, {"mmse", s.noise_power}, {"rzf", 0.0}};

        for (auto &kind : kinds)
        {
            std::vector<double> ref;
            double max_diff = 0.0, max_cf = 0.0;
            for (const Apv &t : apvs)
            {
                const CMat heff = ch.cascaded(phi, t);
                double alpha = kind.alpha;
                if (std::string(kind.name) == "zf")
                    alpha = 1e-6 * heff.squaredNorm(); // H H^H has rank one here; ZF is taken as the alpha -> 0+ limit
                else if (std::string(kind.name) == "rzf")
                    alpha = 0.1 * heff.squaredNorm();
                const CMat w = alpha < 0.0 ? mu::mrt(heff, powers) : mu::rzf(heff, alpha, powers);
                std::vector<double> rates(k);
                for (std::size_t u2 = 0; u2 < k; ++u2)
                    rates[u2] = mu::user_rate(heff, w, u2, s.noise_power);
                if (ref.empty())
                    ref = rates;
                for (std::size_t u2 = 0; u2 < k; ++u2)
                {
                    max_diff = std::max(max_diff, std::abs(rates[u2] - ref[u2]) / std::max(std::abs(ref[u2]), 1e-300));
                    max_cf = std::max(max_cf, std::abs(rates[u2] - closed[u2]) / std::max(std::abs(closed[u2]), 1e-300));
                }
            }
            rep.precoders.push_back(kind.name);
            rep.max_rate_rel_diff.push_back(max_diff);
            rep.max_closed_form_error.push_back(max_cf);
        }

        rep.su_pass = rep.max_su_error <= rep.su_tolerance;
        rep.mu_pass = std::all_of(rep.max_rate_rel_diff.begin(), rep.max_rate_rel_diff.end(),
                                  [&](double v) { return v <= rep.rate_tolerance; });
        rep.pass = rep.su_pass && rep.mu_pass;
        return rep;
    }

    FluctuationProfile fluctuation_profile(const ChannelSet &channels, const TransmitRegion &region,
                                           const Reflection &phi, std::size_t resolution)
    {
        if (resolution == 0)
            throw invalid_parameter("fluctuation_profile: resolution must be positive");
        FluctuationProfile p;
        const std::size_t k = channels.num_users();
        p.gain.assign(k, {});
        const CMat lhs = channels.irs_user.adjoint() * phi.coefficients().asDiagonal();
        for (std::size_t i = 0; i < resolution; ++i)
        {
            const double off =
                resolution == 1 ? 0.0 : -0.5 * region.length() + region.length() * double(i) / double(resolution - 1);
            p.offsets.push_back(off);
            const CVec g = lhs * channels.bs_irs.column(region.point_at(off));
            for (std::size_t u = 0; u < k; ++u)
                p.gain[u].push_back(std::norm(g[Eigen::Index(u)]));
        }
        for (const auto &g : p.gain)
        {
            const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
            const double spread = *lo > 0.0 ? 10.0 * std::log10(*hi / *lo) : std::numeric_limits<double>::infinity();
            p.spread_db.push_back(spread);
            p.max_spread_db = std::max(p.max_spread_db, spread);
        }
        return p;
    }

    void write_profile_csv(std::ostream &os, const FluctuationProfile &p)
    {
        const auto old = os.precision();
        os << "user,offset,gain\n" << std::setprecision(17);
        for (std::size_t u = 0; u < p.gain.size(); ++u)
            for (std::size_t i = 0; i < p.offsets.size(); ++i)
                os << u << ',' << p.offsets[i] << ',' << p.gain[u][i] << '\n';
        os.precision(old);
    }

    MonotonicityReport verify_fluctuation_monotonicity(const Scenario &scenario)
    {
        MonotonicityReport rep;
        const double d = scenario.irs_spacing;
        const double half = 0.5 * scenario.region_length;

        auto diff = [&](std::size_t count, double distance)
        {
            const IrsGeometry geo(count, count, d);
            const Vec3 t1(distance, 0.0, 0.0);
            const Vec3 t2(distance, half, 0.0);
            return su::gain_difference(t1, t2, geo, CVec::Ones(Eigen::Index(geo.size())));
        };

        for (std::size_t c : rep.counts_per_axis)
            rep.by_count.push_back(diff(c, rep.fixed_distance));
        for (double dist : rep.distances)
            rep.by_distance.push_back(diff(rep.fixed_count, dist));

        {
            const IrsGeometry geo(rep.fixed_count, rep.fixed_count, d);
            const Vec3 t1(rep.fixed_distance, 0.0, 0.0);
            rep.edge_difference = su::gain_difference(t1, t1, geo, CVec::Ones(Eigen::Index(geo.size())));
        }

        rep.increasing_in_count = true;
        for (std::size_t i = 1; i < rep.by_count.size(); ++i)
            rep.increasing_in_count = rep.increasing_in_count && rep.by_count[i] > rep.by_count[i - 1];
        rep.decreasing_in_distance = true;
        for (std::size_t i = 1; i < rep.by_distance.size(); ++i)
            rep.decreasing_in_distance = rep.decreasing_in_distance && rep.by_distance[i] < rep.by_distance[i - 1];
        rep.pass = rep.increasing_in_count && rep.decreasing_in_distance && rep.edge_difference == 0.0;
        return rep;
    }

    void print(std::ostream &os, const EquivalenceReport &r)
    {
        os << "single-MA equivalence (N=1, LoS, co-phased)\n";
        os << "  distance  snr_ma_mean  snr_fpa_mean  max_rel_gap\n";
        for (const auto &row : r.rows)
            os << "  " << std::setw(8) << row.distance << "  " << std::setw(11) << row.snr_ma_mean << "  "
               << std::setw(12) << row.snr_fpa_mean << "  " << row.max_gap << '\n';
        os << verdict(r.pass) << " equivalence: max gap " << r.max_gap << " (tol " << r.tolerance << ")\n";
    }

    void print(std::ostream &os, const FarFieldReport &r)
    {
        os << "far-field no-gain over " << r.num_apvs << " random APVs\n";
        os << verdict(r.su_pass) << " single user: max | |v^H w|^2 - N | = " << r.max_su_error << '\n';
        for (std::size_t i = 0; i < r.precoders.size(); ++i)
            os << "  " << r.precoders[i] << ": max rel rate diff " << r.max_rate_rel_diff[i]
               << ", vs closed form " << r.max_closed_form_error[i] << '\n';
        os << verdict(r.mu_pass) << " multi user: rates invariant to the APV (tol " << r.rate_tolerance << ")\n";
    }

    void print(std::ostream &os, const MonotonicityReport &r)
    {
        os << "gain-difference monotonicity (perpendicular array)\n";
        for (std::size_t i = 0; i < r.by_count.size(); ++i)
            os << "  M per axis " << r.counts_per_axis[i] << " (d_BI " << r.fixed_distance << " m): " << r.by_count[i]
               << '\n';
        for (std::size_t i = 0; i < r.by_distance.size(); ++i)
            os << "  d_BI " << r.distances[i] << " m (M per axis " << r.fixed_count << "): " << r.by_distance[i]
               << '\n';
        os << verdict(r.increasing_in_count) << " increasing in M\n";
        os << verdict(r.decreasing_in_distance) << " decreasing in d_BI\n";
        os << verdict(r.edge_difference == 0.0) << " t1 = t2 gives zero difference\n";
    }
}
