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

#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "irsma/scenario.hpp"
#include "irsma/su_opt.hpp"

using namespace irsma;

namespace
{
    const double lambda = speed_of_light / 5e9;

    CVec random_vec(Rng &rng, Eigen::Index n)
    {
        CVec v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v[i] = complex_gaussian(rng);
        return v;
    }

    CMat random_mat(Rng &rng, Eigen::Index r, Eigen::Index c)
    {
        CMat m(r, c);
        for (Eigen::Index i = 0; i < m.size(); ++i)
            m.data()[i] = complex_gaussian(rng);
        return m;
    }

    double wrap(double a)
    {
        a = std::fmod(a, 2.0 * pi);
        return a < 0.0 ? a + 2.0 * pi : a;
    }

    // exhaustive search, sums accumulated in ascending index order
    double brute_best(const std::vector<double> &w, std::size_t count, std::size_t gap)
    {
        double best = -std::numeric_limits<double>::infinity();
        std::vector<std::size_t> idx(count);
        auto rec = [&](auto &&self, std::size_t c, std::size_t from) -> void
        {
            if (c == count)
            {
                double s = 0.0;
                for (auto i : idx)
                    s += w[i];
                best = std::max(best, s);
                return;
            }
            for (std::size_t l = from; l < w.size(); ++l)
            {
                idx[c] = l;
                self(self, c + 1, l + gap);
            }
        };
        rec(rec, 0, 0);
        return best;
    }
}

TEST_CASE("snr basics")
{
    CVec h1(1), w(1);
    h1 << 1.0;
    w << 1.0;
    CMat hb(1, 1);
    hb << cplx(0.0, 1.0);
    CHECK(su::snr(h1, Reflection::identity(1), hb, w, 10.0, 1.0) == doctest::Approx(10.0));
    CHECK(su::snr(CVec::Zero(1), Reflection::identity(1), hb, w, 10.0, 1.0) == 0.0);

    Rng rng = substream(1, 0, "su");
    const CVec hiu = random_vec(rng, 6);
    const CMat hbi = random_mat(rng, 6, 3);
    const CVec v = random_vec(rng, 3).normalized();
    const Reflection phi = Reflection::random(rng, 6);
    const Reflection rot = Reflection::from_coefficients(std::polar(1.0, 1.3) * phi.coefficients());
    CHECK(su::snr(hiu, phi, hbi, v, 2.0, 0.5) == doctest::Approx(su::snr(hiu, rot, hbi, v, 2.0, 0.5)));
}

TEST_CASE("mrt")
{
    CRow one(1);
    one << cplx(0.3, -0.4);
    const CVec w1 = su::mrt(one);
    CHECK(std::abs(w1[0]) == doctest::Approx(1.0));
    CHECK(std::abs((one * w1)(0)) == doctest::Approx(0.5));

    CRow h(2);
    h << cplx(1, 0), cplx(0, 1);
    h /= std::sqrt(2.0);
    const CVec w = su::mrt(h);
    CVec expect(2);
    expect << cplx(1, 0), cplx(0, -1);
    expect /= std::sqrt(2.0);
    CHECK(std::abs(std::abs(expect.dot(w)) - 1.0) < 1e-12);
    CHECK(std::abs((h * w)(0)) == doctest::Approx(h.norm()));

    Rng rng = substream(1, 1, "su");
    const CVec hiu = random_vec(rng, 8);
    const CMat hbi = random_mat(rng, 8, 4);
    const Reflection phi = Reflection::random(rng, 8);
    const double s = su::snr(hiu, phi, hbi, su::mrt(hiu, phi, hbi), 1.0, 1.0);
    for (int i = 0; i < 100; ++i)
        CHECK(s >= su::snr(hiu, phi, hbi, random_vec(rng, 4).normalized(), 1.0, 1.0));
    CHECK_THROWS_AS(su::mrt(CRow(CRow::Zero(3))), degenerate_channel);
}

TEST_CASE("co-phasing")
{
    Rng rng = substream(1, 2, "su");
    const CVec h = random_vec(rng, 5);
    const RVec p = su::optimal_irs_phase_su(h, h).phases();
    for (Eigen::Index m = 0; m < p.size(); ++m)
        CHECK(std::min(p[m], 2.0 * pi - p[m]) < 1e-12);

    CVec a(2), b(2);
    a << 1.0, 1.0;
    b << cplx(0, 1), cplx(-1, 0);
    const Reflection phi = su::optimal_irs_phase_su(a, b);
    CHECK(wrap(phi.phases()[0]) == doctest::Approx(1.5 * pi));
    CHECK(wrap(phi.phases()[1]) == doctest::Approx(pi));
    CHECK(std::abs(cascaded_row(a, phi, CMat(b))(0)) == doctest::Approx(2.0));
}

TEST_CASE("closed-form gain")
{
    const IrsGeometry one(1, 1, 0.0);
    CVec h1(1);
    h1 << cplx(0.3, 0.4);
    const Vec3 t(2.0, 0.5, 0.0);
    const double s = lambda / (4 * pi);
    CHECK(su::gain_closed_form(t, one, h1, lambda) == doctest::Approx(s * s * 0.25 / t.squaredNorm()));

    const IrsGeometry g(15, 15, lambda / 2);
    Rng rng = substream(1, 3, "su");
    for (int i = 0; i < 20; ++i)
    {
        const CVec hiu = random_vec(rng, 225);
        const Vec3 p(uniform(rng, 1, 6), uniform(rng, -1, 1), uniform(rng, -1, 1));
        const CVec hbi = nusw_los_vector(p, g, lambda);
        const Reflection phi = su::optimal_irs_phase_su(hiu, hbi);
        const double direct = std::norm(cascaded_row(hiu, phi, CMat(hbi))(0));
        CHECK(su::gain_closed_form(p, g, hiu, lambda) == doctest::Approx(direct).epsilon(1e-10));
    }

    // decreasing along the region once the premise holds
    const TransmitRegion r(Vec3(4 * std::sqrt(2.0), 4 * std::sqrt(2.0), 0.0), Vec3::UnitX(), 0.6);
    const CVec ones = CVec::Ones(225);
    double prev = 1e300;
    for (int i = 0; i <= 20; ++i)
    {
        const double v = su::gain_closed_form(r.point_at(-0.3 + 0.03 * i), g, ones, lambda);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("large-array gain approximation")
{
    const IrsGeometry g(15, 15, lambda / 2);
    Rng rng = substream(1, 4, "su");
    const CVec hiu = random_vec(rng, 225);
    const Vec3 on_axis(3.0, 0.0, 0.0);
    CHECK(su::gain_approx_lemma1(on_axis, g, hiu, lambda).gain ==
          doctest::Approx(su::gain_closed_form(on_axis, g, hiu, lambda)).epsilon(1e-13));

    const Vec3 qb(4 * std::sqrt(2.0), 4 * std::sqrt(2.0), 0.0);
    const auto a = su::gain_approx_lemma1(qb, g, hiu, lambda);
    CHECK(a.gain == doctest::Approx(su::gain_closed_form(qb, g, hiu, lambda)).epsilon(0.01));
    CHECK(a.premise_y < 0.01);

    double prev = 1e300;
    for (double rr : {1.0, 2.0, 4.0, 8.0})
    {
        const double v = su::gain_approx_lemma1(Vec3(rr, 0.0, 0.0), g, hiu, lambda).gain;
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("single MA optimum")
{
    const double c = 4 * std::sqrt(2.0);
    const TransmitRegion r(Vec3(c, c, 0.0), Vec3::UnitX(), 0.6);
    CHECK(su::optimal_single_ma_position(r).isApprox(Vec3(c - 0.3, c, 0.0)));

    // brute force over 10^4 samples of |t|
    double best = 1e300, at = 0.0;
    for (int i = 0; i < 10000; ++i)
    {
        const double s = -0.3 + 0.6 * i / 9999.0;
        if (r.point_at(s).norm() < best)
        {
            best = r.point_at(s).norm();
            at = s;
        }
    }
    CHECK(std::abs(r.offset_of(su::optimal_single_ma_position(r)) - at) <= 0.6 / 9999.0);

    const TransmitRegion sym(Vec3(2.0, 0.0, 0.0), Vec3::UnitY(), 0.6);
    CHECK(su::optimal_single_ma_position(sym).isApprox(Vec3(2.0, 0.0, 0.0)));
}

TEST_CASE("direct-link optimum is the projection of the user")
{
    const TransmitRegion r(Vec3(1.0, 1.0, 0.0), Vec3::UnitX(), 0.6);
    for (double xu : {0.0, 0.9, 1.1, 2.5})
    {
        const Vec3 user(xu, -3.0, 0.0);
        double best = 0.0, at = 0.0;
        for (int i = 0; i <= 6000; ++i)
        {
            const double s = -0.3 + 0.6 * i / 6000.0;
            const double g = std::abs(direct_bs_user(r.point_at(s), user, lambda));
            if (g > best)
            {
                best = g;
                at = s;
            }
        }
        CHECK(r.offset_of(r.nearest_point(user)) == doctest::Approx(at).epsilon(1e-9));
        CHECK(r.offset_of(r.nearest_point(user)) == doctest::Approx(std::clamp(xu - 1.0, -0.3, 0.3)));
    }
}

TEST_CASE("gain difference trends")
{
    auto diff = [](std::size_t m, double d)
    {
        const IrsGeometry g(m, m, lambda / 2);
        const CVec ones = CVec::Ones(Eigen::Index(m * m));
        return su::gain_difference(Vec3(d, 0, 0), Vec3(d, 0.3, 0), g, ones);
    };
    CHECK(diff(15, 3.0) < diff(20, 3.0));
    CHECK(diff(20, 3.0) < diff(25, 3.0));
    CHECK(diff(15, 1.0) > diff(15, 3.0));
    CHECK(diff(15, 3.0) > diff(15, 6.0));
    const IrsGeometry g(15, 15, lambda / 2);
    CHECK(su::gain_difference(Vec3(2, 0, 0), Vec3(2, 0, 0), g, CVec::Ones(225)) == 0.0);
    CHECK_THROWS_AS(su::gain_difference(Vec3(2, 1, 0), Vec3(2, 0, 0), g, CVec::Ones(225)), invalid_parameter);
}

TEST_CASE("bcd")
{
    CVec h1(1);
    h1 << cplx(0.2, 0.1);
    CMat b1(1, 2);
    b1 << cplx(1, 1), cplx(0, 2);
    const Reflection init = Reflection::from_phases(RVec::Constant(1, 0.77));
    CHECK(su::bcd_irs(h1, b1, init).phases()[0] == doctest::Approx(0.77));

    CVec h2(2);
    h2 << 1.0, 1.0;
    CMat b2(2, 1);
    b2 << cplx(1, 0), cplx(0, 1);
    su::BcdOptions one_sweep;
    one_sweep.max_sweeps = 1;
    const Reflection r2 = su::bcd_irs(h2, b2, Reflection::identity(2), one_sweep);
    CHECK(su::bcd_objective(h2, r2, b2) == doctest::Approx(4.0));

    Rng rng = substream(1, 5, "bcd");
    for (int inst = 0; inst < 100; ++inst)
    {
        const CVec hiu = random_vec(rng, 16);
        const CMat hbi = random_mat(rng, 16, 3);
        const Reflection start = Reflection::random(rng, 16);
        double prev = su::bcd_objective(hiu, start, hbi);
        const double first = prev;
        bool mono = true;
        const Reflection out = su::bcd_irs(hiu, hbi, start, {}, [&](double v)
                                           {
                                               if (v < prev * (1 - 1e-12))
                                                   mono = false;
                                               prev = v;
                                           });
        CHECK(mono);
        CHECK(su::bcd_objective(hiu, out, hbi) >= first);
    }
}

TEST_CASE("graph placement")
{
    const std::vector<double> w1{1.0, 3.0, 2.0, 3.0};
    CHECK(su::graph_position_select(w1, 1, 1) == std::vector<std::size_t>{1});

    const std::vector<double> w{5, 1, 4, 1, 3};
    const auto sel = su::graph_position_select(w, 2, 2);
    CHECK(sel == std::vector<std::size_t>{0, 2});
    CHECK(w[sel[0]] + w[sel[1]] == 9.0);

    CHECK_THROWS_AS(su::graph_position_select(w, 3, 3), infeasible_spacing);
    CHECK_THROWS_AS(su::graph_position_select(w, 2, 0), invalid_parameter);
    CHECK(su::graph_position_select(w, 3, 2) == std::vector<std::size_t>{0, 2, 4});

    Rng rng = substream(1, 6, "graph");
    for (int inst = 0; inst < 200; ++inst)
    {
        const std::size_t l = 1 + std::size_t(uniform(rng, 0, 25));
        const std::size_t n = 1 + std::size_t(uniform(rng, 0, 4));
        const std::size_t gap = 1 + std::size_t(uniform(rng, 0, 4));
        std::vector<double> ws(l);
        for (auto &x : ws)
            x = uniform(rng, 0, 1);
        if ((n - 1) * gap + 1 > l)
        {
            CHECK_THROWS_AS(su::graph_position_select(ws, n, gap), infeasible_spacing);
            continue;
        }
        const auto s = su::graph_position_select(ws, n, gap);
        REQUIRE(s.size() == n);
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            v += ws[s[i]];
            if (i > 0)
                CHECK(s[i] - s[i - 1] >= gap);
        }
        CHECK(v == brute_best(ws, n, gap));
    }
}

TEST_CASE("single-user AO")
{
    Scenario s;
    s.num_users = 1;
    s.bs_irs_model = BsIrsModel::los;
    s.num_mas = 1;
    const ChannelSet ch = draw_channels(s, 0);
    const CVec h = ch.irs_user.col(0);
    const Apv start = uniform_linear_layout(s.region(), 1, s.min_spacing);
    const auto sol = su::ao_single_user(ch.bs_irs, h, s.grid(), s.transmit_power, s.noise_power,
                                        draw_initial_reflection(s, 0), start);
    const Vec3 best = su::optimal_single_ma_position(s.region());
    CHECK((sol.apv[0] - best).norm() < 1e-12);
    const double fpa = s.snr_budget() * su::gain_closed_form(best, s.geometry(), h, s.wavelength());
    CHECK(sol.snr == doctest::Approx(fpa).epsilon(1e-6));
}

TEST_CASE("single-user AO is monotone and short on the default scenario")
{
    Scenario s;
    s.num_users = 1;
    for (std::uint64_t r = 0; r < 10; ++r)
    {
        const ChannelSet ch = draw_channels(s, r);
        const CVec h = ch.irs_user.col(0);
        const Reflection phi0 = draw_initial_reflection(s, r);
        const Apv ula = uniform_linear_layout(s.region(), s.num_mas, s.min_spacing);
        const CMat h0 = ch.bs_irs.matrix(ula);
        const double start = su::snr(h, phi0, h0, su::mrt(h, phi0, h0), s.transmit_power, s.noise_power);
        const auto sol = su::ao_single_user(ch.bs_irs, h, s.grid(), s.transmit_power, s.noise_power, phi0, ula);
        CHECK(sol.snr >= start);
        CHECK(sol.trace.size() <= 30);
        double prev = start;
        for (const auto &e : sol.trace)
        {
            CHECK(e.snr_after_reflection >= prev);
            CHECK(e.snr_after_positions >= e.snr_after_reflection);
            prev = e.snr_after_positions;
        }
        CHECK(sol.apv.is_feasible(s.region(), s.min_spacing));
        const double check = su::snr(h, sol.reflection, ch.bs_irs.matrix(sol.apv), sol.beamformer,
                                     s.transmit_power, s.noise_power);
        CHECK(check == doctest::Approx(sol.snr).epsilon(1e-12));
    }
}
