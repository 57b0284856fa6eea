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

#include <sstream>

#include "irsma/channel.hpp"

using namespace irsma;

namespace
{
    const double lambda = speed_of_light / 5e9;

    IrsGeometry single() { return IrsGeometry(1, 1, 0.0); }

    double wrap(double a)
    {
        a = std::fmod(a, 2.0 * pi);
        return a < 0.0 ? a + 2.0 * pi : a;
    }
}

TEST_CASE("rayleigh distance")
{
    CHECK(rayleigh_distance(IrsGeometry(15, 15, lambda / 2), 0.6, lambda) == doctest::Approx(50.95).epsilon(0.001));
    CHECK(rayleigh_distance(IrsGeometry(2, 2, 0.0), 0.0, 0.5) == 0.0);
    CHECK(rayleigh_distance(IrsGeometry(2, 2, 0.5), 0.0, 0.5) == doctest::Approx(8.0));
    CHECK_THROWS_AS(rayleigh_distance(IrsGeometry(2, 2, 0.5), -1.0, 0.5), invalid_parameter);
}

TEST_CASE("near-field los vector")
{
    const CVec a = nusw_los_vector(Vec3(lambda, 0, 0), single(), lambda);
    CHECK(std::abs(a[0]) == doctest::Approx(1.0 / (4.0 * pi)));
    CHECK(std::abs(std::remainder(std::arg(a[0]), 2.0 * pi)) < 1e-12);

    const CVec b = nusw_los_vector(Vec3(lambda / 2, 0, 0), single(), lambda);
    CHECK(std::abs(b[0]) == doctest::Approx(1.0 / (2.0 * pi)));
    CHECK(wrap(std::arg(b[0])) == doctest::Approx(pi));

    const IrsGeometry g(3, 3, lambda / 2);
    double prev = 1e9;
    for (double x : {0.5, 1.0, 2.0, 4.0})
    {
        const double amp = std::abs(nusw_los_vector(Vec3(x, 0.1, 0), g, lambda)[4]);
        CHECK(amp < prev);
        prev = amp;
    }
    CHECK_THROWS_AS(nusw_los_vector(Vec3::Zero(), single(), lambda), degenerate_geometry);
}

TEST_CASE("near-field los matrix")
{
    const IrsGeometry g(4, 3, lambda / 2);
    Apv one{{Vec3(2.0, 0.3, 0.1)}};
    CHECK(nusw_los_matrix(one, g, lambda).col(0).isApprox(nusw_los_vector(one[0], g, lambda)));

    Apv two{{Vec3(2.0, 0.3, 0.1), Vec3(1.0, -0.2, 0.0)}};
    Apv swapped{{two[1], two[0]}};
    const CMat h = nusw_los_matrix(two, g, lambda);
    const CMat hs = nusw_los_matrix(swapped, g, lambda);
    CHECK(h.col(0).isApprox(hs.col(1)));
    CHECK(h.col(1).isApprox(hs.col(0)));

    Apv sym{{Vec3(1.0, 0.2, 0.0), Vec3(1.0, -0.2, 0.0)}};
    const CMat hh = nusw_los_matrix(sym, single(), lambda);
    CHECK(std::abs(hh(0, 0)) == doctest::Approx(std::abs(hh(0, 1))));
}

TEST_CASE("unit-modulus responses")
{
    std::vector<Vec3> pts{Vec3(lambda, 0, 0), Vec3(1.5 * lambda, 0, 0)};
    const CVec a = near_field_response(pts, Vec3::Zero(), lambda);
    CHECK(std::abs(a[0] - cplx(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(a[1] - cplx(-1.0, 0.0)) < 1e-12);

    const IrsGeometry g(5, 5, lambda / 2);
    const CVec p = plane_wave_response(g.elements(), Vec3(0.6, 0.8, 0.0), lambda);
    for (Eigen::Index m = 0; m < p.size(); ++m)
        CHECK(std::abs(p[m]) == doctest::Approx(1.0));
    CHECK_THROWS_AS(plane_wave_response(g.elements(), Vec3(1.0, 1.0, 0.0), lambda), invalid_parameter);
}

TEST_CASE("multipath bs-irs channel")
{
    const IrsGeometry g(3, 3, lambda / 2);
    const Apv apv{{Vec3(3.0, 3.0, 0.0), Vec3(3.03, 3.0, 0.0), Vec3(3.06, 3.0, 0.0)}};

    ClusterSet pure;
    CHECK(multipath_bs_irs(apv, g, pure, lambda).isApprox(nusw_los_matrix(apv, g, lambda)));

    ClusterSet one;
    one.los_ratio = 0.0;
    one.scattered.push_back({Vec3(1.0, 2.0, 0.5), cplx(1.0, 0.0), cplx(1.0, 0.0)});
    const CMat h1 = multipath_bs_irs(apv, g, one, lambda);
    for (Eigen::Index i = 0; i < h1.size(); ++i)
        CHECK(std::abs(h1.data()[i]) == doctest::Approx(1.0));
    const Eigen::JacobiSVD<CMat> svd(h1);
    CHECK(svd.singularValues()[1] < 1e-10 * svd.singularValues()[0]);

    ClusterSet mixed = one;
    mixed.los_ratio = cplx(0.3, 0.1);
    ClusterSet doubled = mixed;
    doubled.scattered[0].gain *= 2.0;
    const CMat los = mixed.los_ratio * nusw_los_matrix(apv, g, lambda);
    const CMat m1 = multipath_bs_irs(apv, g, mixed, lambda) - los;
    const CMat m2 = multipath_bs_irs(apv, g, doubled, lambda) - los;
    CHECK(m2.isApprox(2.0 * m1, 1e-12));

    // the position-indexed channel object agrees with the matrix form
    const auto ch = BsIrsChannel::multipath(g, lambda, mixed);
    CHECK(ch.matrix(apv).isApprox(multipath_bs_irs(apv, g, mixed, lambda), 1e-12));
}

TEST_CASE("cluster draws: second moments")
{
    const ScatterBox box{Vec3(2.0, 2.0, 0.0), Vec3::Constant(2.0)};
    const Vec3 ref(4.0, 4.0, 0.0);
    auto moment = [&](std::size_t paths)
    {
        Rng rng = substream(7, paths, "moments");
        double s = 0.0;
        const int n = 10000;
        for (int i = 0; i < n; ++i)
        {
            const ClusterSet c = sample_clusters(rng, paths, box, ref, lambda);
            s += std::norm(c.los_ratio);
            for (const auto &p : c.scattered)
            {
                s += std::norm(p.power_ratio);
                CHECK((p.scatterer - box.center).cwiseAbs().maxCoeff() <= 1.0);
            }
        }
        return s / n;
    };
    CHECK(moment(0) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(moment(4) == doctest::Approx(1.0).epsilon(0.05));

    Rng a = substream(3, 0, "c"), b = substream(3, 0, "c");
    const auto ca = sample_clusters(a, 4, box, ref, lambda);
    const auto cb = sample_clusters(b, 4, box, ref, lambda);
    CHECK(ca.los_ratio == cb.los_ratio);
    for (std::size_t p = 0; p < 4; ++p)
    {
        CHECK(ca.scattered[p].scatterer == cb.scattered[p].scatterer);
        CHECK(ca.scattered[p].gain == cb.scattered[p].gain);
        const double path = (ref - ca.scattered[p].scatterer).norm() + ca.scattered[p].scatterer.norm();
        CHECK(std::abs(ca.scattered[p].gain) == doctest::Approx(lambda / (4.0 * pi * path)));
    }
}

TEST_CASE("rician irs-user channel")
{
    const IrsGeometry g(3, 3, lambda / 2);
    const Vec3 dir(0.8, 0.6, 0.0);
    const double d = 30.0, alpha = 2.8;
    const double amp = lambda / (4.0 * pi) * std::pow(d, -alpha / 2);

    Rng r0 = substream(1, 0, "iu");
    const CVec los = rician_iu_channel(r0, g, d, dir, std::numeric_limits<double>::infinity(), alpha, lambda);
    for (Eigen::Index m = 0; m < los.size(); ++m)
        CHECK(std::abs(los[m]) == doctest::Approx(amp).epsilon(1e-12));

    Rng r1 = substream(1, 1, "iu");
    const int n = 10000;
    RVec acc = RVec::Zero(Eigen::Index(g.size()));
    for (int i = 0; i < n; ++i)
        acc += rician_iu_channel(r1, g, d, dir, 2.0, alpha, lambda).cwiseAbs2();
    for (Eigen::Index m = 0; m < acc.size(); ++m)
        CHECK(acc[m] / n == doctest::Approx(amp * amp).epsilon(0.05));

    Rng a = substream(9, 2, "iu"), b = substream(9, 2, "iu");
    CHECK(rician_iu_channel(a, g, d, dir, 2.0, alpha, lambda) == rician_iu_channel(b, g, d, dir, 2.0, alpha, lambda));
}

TEST_CASE("far-field rank-one channel")
{
    const IrsGeometry g(4, 4, lambda / 2);
    const Vec3 arr(0.6, 0.8, 0.0), dep(-0.6, -0.8, 0.0);
    const Apv apv{{Vec3(3.0, 3.0, 0.0), Vec3(3.05, 3.0, 0.0), Vec3(3.2, 3.0, 0.0), Vec3(3.4, 3.0, 0.0)}};
    const CMat h = far_field_bs_irs(apv, g, arr, dep, cplx(0.01, 0.02), lambda);
    const Eigen::JacobiSVD<CMat> svd(h);
    CHECK(svd.singularValues()[1] < 1e-10 * svd.singularValues()[0]);

    const CVec v = far_field_transmit_response(apv, dep, lambda);
    CHECK(v.squaredNorm() == doctest::Approx(4.0));

    Apv moved = apv;
    for (auto &p : moved.positions)
        p += Vec3(0.013, 0.0, 0.0);
    const CVec vm = far_field_transmit_response(moved, dep, lambda);
    const cplx rot = vm[0] / v[0];
    CHECK(std::abs(rot) == doctest::Approx(1.0));
    CHECK(vm.isApprox(rot * v, 1e-12));

    const auto ch = BsIrsChannel::far_field(g, lambda, arr, dep, cplx(0.01, 0.02));
    CHECK(ch.matrix(apv).isApprox(h, 1e-12));
}

TEST_CASE("cascaded row")
{
    CVec hiu(1);
    hiu << cplx(0.5, -0.2);
    CMat hbi(1, 3);
    hbi << cplx(1, 2), cplx(0, 1), cplx(-1, 0);
    const CRow row = cascaded_row(hiu, Reflection::identity(1), hbi);
    CHECK(row.isApprox(std::conj(hiu[0]) * hbi.row(0)));

    const IrsGeometry g(3, 3, lambda / 2);
    Rng rng = substream(2, 0, "casc");
    CVec h1(9), h2(9);
    for (int m = 0; m < 9; ++m)
    {
        h1[m] = complex_gaussian(rng);
        h2[m] = complex_gaussian(rng);
    }
    // phi_m = arg(h_IU,m) - arg(h_BI,m) aligns every term
    RVec ph(9);
    double mag = 0.0;
    for (int m = 0; m < 9; ++m)
    {
        ph[m] = std::arg(h1[m]) - std::arg(h2[m]);
        mag += std::abs(h1[m]) * std::abs(h2[m]);
    }
    const cplx c = cascaded_row(h1, Reflection::from_phases(ph), h2)(0);
    CHECK(c.real() == doctest::Approx(mag));
    CHECK(std::abs(c.imag()) < 1e-12 * mag);

    const Reflection r = Reflection::random(rng, 9);
    const CRow a = cascaded_row(h1, r, CMat(h2));
    const CRow b = cascaded_row(h1, Reflection::from_coefficients(std::polar(1.0, 0.7) * r.coefficients()), CMat(h2));
    CHECK(a.norm() == doctest::Approx(b.norm()));
    CHECK_THROWS_AS(cascaded_row(h1, Reflection::identity(4), CMat(h2)), dimension_mismatch);
}

TEST_CASE("direct link")
{
    const Vec3 u(0, 0, 0);
    CHECK(std::abs(direct_bs_user(Vec3(lambda, 0, 0), u, lambda)) == doctest::Approx(1.0 / (4.0 * pi)));
    const double a = std::abs(direct_bs_user(Vec3(3.0, 0, 0), u, lambda));
    const double b = std::abs(direct_bs_user(Vec3(6.0, 0, 0), u, lambda));
    CHECK(b == doctest::Approx(a / 2));
}

TEST_CASE("matrix csv")
{
    CMat m(1, 2);
    m << cplx(1, 2), cplx(3, -4);
    std::ostringstream os;
    write_matrix_csv(os, m);
    CHECK(os.str() == "row,col,re,im\n0,0,1,2\n0,1,3,-4\n");
}
