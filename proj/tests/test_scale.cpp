/*
   Copyright 2026 the levydiv authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "levydiv/detail/polynomial.hpp"
#include "levydiv/scale.hpp"
#include "support.hpp"

using namespace levydiv;
using testsupport::StdOracle;

namespace {
ScaleSet std_scale(double q = 0.1) {
    return ScaleSet(testsupport::standard_model(), q, 12.0, 33);
}
} // namespace

TEST_CASE("partial fractions on a known rational function", "[scale]") {
    // 1/((t-1)^2 (t+2)) = 1/9 /(t-1) + 1/3 /(t-1)^2 - 1/9 /(t+2)
    detail::Poly den =
        detail::poly_mul(detail::poly_mul({-1.0, 1.0}, {-1.0, 1.0}), {2.0, 1.0});
    auto clusters = detail::cluster_roots(detail::poly_roots(den));
    REQUIRE(clusters.size() == 2);
    for (const auto& cl : clusters) {
        auto qt = detail::poly_taylor_c(detail::poly_deflate(den, cl.center, cl.multiplicity),
                                        cl.center, cl.multiplicity);
        auto nt = detail::poly_taylor({1.0}, cl.center, cl.multiplicity);
        auto g = detail::series_divide(nt, qt, cl.multiplicity);
        if (cl.multiplicity == 2) {
            CHECK(cl.center.real() == Catch::Approx(1.0).margin(1e-7));
            CHECK(g[1].real() == Catch::Approx(-1.0 / 9.0).margin(1e-6)); // A_1
            CHECK(g[0].real() == Catch::Approx(1.0 / 3.0).margin(1e-6));  // A_2
        } else {
            CHECK(cl.center.real() == Catch::Approx(-2.0).margin(1e-10));
            CHECK(g[0].real() == Catch::Approx(1.0 / 9.0).margin(1e-10)); // residue at -2
        }
    }
}

TEST_CASE("closed-form scale functions match the hand-derived oracle", "[scale]") {
    auto s = std_scale();
    StdOracle o(0.1);
    REQUIRE(s.backend() == ScaleBackend::RationalClosedForm);

    for (double x : {0.0, 0.25, 1.0, 2.5, 4.0, 7.5, 20.0}) {
        CHECK(s.w(x) == Catch::Approx(o.W(x)).epsilon(1e-12));
        CHECK(s.z(x) == Catch::Approx(o.Z(x)).epsilon(1e-12));
        CHECK(s.w_bar(x) == Catch::Approx(o.Wbar(x)).margin(1e-12));
        CHECK(s.z_bar(x) == Catch::Approx(o.Zbar(x)).margin(1e-12));
    }
    // frozen spot values (50-digit arithmetic)
    CHECK(s.w(1.0) == Catch::Approx(4.9643545115258480848).epsilon(1e-13));
    CHECK(s.w(2.5) == Catch::Approx(32.674204003925073973).epsilon(1e-13));
    CHECK(s.z(1.0) == Catch::Approx(1.2605786309045366036).epsilon(1e-13));
    CHECK(s.z_bar(1.0) == Catch::Approx(1.0979895715759454456).epsilon(1e-13));
}

TEST_CASE("initial values", "[scale]") {
    auto s = std_scale();
    CHECK(s.w0_plus() == Catch::Approx(1.0).margin(1e-10));        // 1/c0
    CHECK(s.w(0.0) == Catch::Approx(1.0).margin(1e-10));
    CHECK(s.w_prime0_plus() == Catch::Approx(2.1).margin(1e-9));   // (q + lambda)/c0^2

    ScaleSet g(testsupport::gaussian_model(), 0.1, 10.0, 17);
    CHECK(g.w0_plus() == 0.0);
    CHECK(g.w(0.0) == Catch::Approx(0.0).margin(1e-12));
    CHECK(g.w_prime0_plus() == Catch::Approx(2.0).margin(1e-9)); // 2/sigma^2

    ScaleSet jd(testsupport::jumpdiff_model(), 0.1, 10.0, 17);
    CHECK(jd.w(0.0) == Catch::Approx(0.0).margin(1e-12));
    CHECK(jd.w_prime0_plus() == Catch::Approx(2.0 / 0.25).margin(1e-8)); // 2/sigma^2

    // table helper itself
    CHECK(scale_initial_value(testsupport::standard_model()) == 1.0);
    CHECK(scale_initial_value(testsupport::jumpdiff_model()) == 0.0);
    CHECK(std::isinf(scale_initial_derivative(testsupport::gamma_model(), 0.1)));
}

TEST_CASE("left-of-zero conventions are exact", "[scale]") {
    auto s = std_scale();
    CHECK(s.z(-3.7) == 1.0);
    CHECK(s.z_bar(-3.7) == -3.7);
    CHECK(s.w(-1.0) == 0.0);
    CHECK(s.w_bar(-0.5) == 0.0);
}

TEST_CASE("Z = 1 + q Wbar and monotonicity", "[scale]") {
    for (bool numeric : {false, true}) {
        ScaleOptions opts;
        opts.force_numeric = numeric;
        ScaleSet s(testsupport::standard_model(), 0.1, 10.0, 41, opts);
        double prev_w = -1.0, prev_z = 0.0;
        for (int i = 0; i <= 40; ++i) {
            double x = 10.0 * i / 40.0;
            CHECK(std::abs(s.z(x) - 1.0 - 0.1 * s.w_bar(x)) < 1e-13 * s.z(x)); // identity by construction
            double wv = s.w(x), zv = s.z(x);
            CHECK(wv >= prev_w);
            CHECK(zv >= std::max(1.0, prev_z));
            prev_w = wv;
            prev_z = zv;
        }
    }
}

TEST_CASE("laplace identity by quadrature", "[scale]") {
    auto m = testsupport::standard_model();
    auto s = std_scale();
    double phi_q = phi(m, 0.1);
    for (double off : {1.0, 2.0, 5.0}) {
        CHECK(testsupport::laplace_identity_gap(m, s, 0.1, phi_q + off, 12.0) < 1e-6);
    }

    auto e = testsupport::erlang_model();
    ScaleSet se(e, 0.1, 20.0, 41);
    double phi_e = phi(e, 0.1);
    for (double off : {1.0, 2.0, 5.0}) {
        CHECK(testsupport::laplace_identity_gap(e, se, 0.1, phi_e + off, 20.0) < 1e-6);
    }
}

TEST_CASE("erlang scale values against the polynomial-root oracle", "[scale]") {
    // frozen from 40-digit root finding + residue sums on
    // P(t) = (t - 1.1)(2+t)^3 + 8
    ScaleSet s(testsupport::erlang_model(), 0.1, 10.0, 21);
    CHECK(s.w(0.5) == Catch::Approx(1.7182913637849924033).epsilon(1e-12));
    CHECK(s.w(1.0) == Catch::Approx(2.8146313701488038292).epsilon(1e-12));
    CHECK(s.w(2.0) == Catch::Approx(6.5614152819386470757).epsilon(1e-12));
    CHECK(s.w(4.0) == Catch::Approx(28.44034877466353606).epsilon(1e-12));
    CHECK(s.phi_q() == Catch::Approx(0.6881668116328557).epsilon(1e-10));
}

TEST_CASE("repeated and near-repeated roots stay finite", "[scale]") {
    // Gaussian + Erlang(2): quartic denominator; scan a parameter window where
    // roots approach each other. The synthesized W must stay finite, monotone,
    // and satisfy the transform identity.
    for (double lam : {0.5, 0.9, 1.3, 1.7}) {
        LevyModel m{1.0, 0.7, ErlangJumps{lam, 2, 0.8}};
        if (mean(m) <= 0.0) continue;
        ScaleSet s(m, 0.15, 8.0, 17);
        double prev = -1.0;
        for (double x = 0.0; x <= 8.0; x += 0.25) {
            double wv = s.w(x);
            REQUIRE(std::isfinite(wv));
            CHECK(wv >= prev - 1e-12);
            prev = wv;
        }
        double phi_q = phi(m, 0.15);
        CHECK(testsupport::laplace_identity_gap(m, s, 0.15, phi_q + 1.5, 8.0) < 1e-5);
    }
}

TEST_CASE("w_prime matches central differences", "[scale]") {
    auto s = std_scale();
    for (double x : {0.3, 1.0, 2.2, 5.0}) {
        double h = 1e-6 * (1.0 + x);
        double fd = (s.w(x + h) - s.w(x - h)) / (2.0 * h);
        CHECK(s.w_prime(x) == Catch::Approx(fd).epsilon(1e-8));
    }
    CHECK_THROWS_AS(s.w_prime(0.0), domain_error);
    CHECK_THROWS_AS(s.w_prime(-1.0), domain_error);
}

TEST_CASE("numeric backend agrees with closed form", "[scale]") {
    ScaleOptions opts;
    opts.force_numeric = true;
    ScaleSet numeric(testsupport::standard_model(), 0.1, 10.0, 101, opts);
    ScaleSet closed(testsupport::standard_model(), 0.1, 10.0, 101);
    REQUIRE(numeric.backend() == ScaleBackend::NumericInversion);

    double worst = 0.0;
    for (double x = 0.1; x <= 10.0; x += 0.1) {
        worst = std::max(worst, std::abs(numeric.w(x) - closed.w(x)) / closed.w(x));
    }
    CHECK(worst < 1e-6);
    for (double x : {0.5, 2.0, 6.0}) {
        CHECK(numeric.z(x) == Catch::Approx(closed.z(x)).epsilon(1e-6));
        CHECK(numeric.z_bar(x) == Catch::Approx(closed.z_bar(x)).epsilon(1e-6));
    }

    opts.algorithm = InversionAlgorithm::GaverStehfest;
    ScaleSet gs(testsupport::standard_model(), 0.1, 10.0, 101, opts);
    for (double x = 0.2; x <= 10.0; x += 0.2) {
        CHECK(gs.w(x) == Catch::Approx(closed.w(x)).epsilon(1e-5));
    }
}

TEST_CASE("gamma model inversion against high-precision oracle", "[scale]") {
    // frozen from 40-digit pole-stripped contour inversion of
    // 1/(0.6 t - 1.2 log(1+t) - 0.1); cross-validated by quadrature there
    ScaleSet s(testsupport::gamma_model(), 0.1, 6.0, 61);
    REQUIRE(s.backend() == ScaleBackend::NumericInversion);
    CHECK(s.w(0.5) == Catch::Approx(13.273721665523130179).epsilon(1e-8));
    CHECK(s.w(1.0) == Catch::Approx(60.017547489474770419).epsilon(1e-8));
    CHECK(s.w(2.0) == Catch::Approx(1084.1990501878021352).epsilon(1e-8));
    CHECK(s.w(3.0) == Catch::Approx(19263.900383244218977).epsilon(1e-8));
    CHECK(s.w(5.0) == Catch::Approx(6071781.258703999196).epsilon(1e-8));
    CHECK(s.w0_plus() == Catch::Approx(1.0 / 0.6).epsilon(1e-12));

    // Laplace identity through the cached grid
    auto m = testsupport::gamma_model();
    CHECK(testsupport::laplace_identity_gap(m, s, 0.1, phi(m, 0.1) + 2.0, 6.0) < 1e-6);

    // two inversion algorithms agree
    ScaleOptions gs_opts;
    gs_opts.algorithm = InversionAlgorithm::GaverStehfest;
    ScaleSet gs(testsupport::gamma_model(), 0.1, 6.0, 61, gs_opts);
    for (double x : {0.5, 1.5, 3.0, 4.5}) {
        CHECK(gs.w(x) == Catch::Approx(s.w(x)).epsilon(1e-5));
    }
}

TEST_CASE("numeric backend rejects out-of-grid queries", "[scale]") {
    ScaleOptions opts;
    opts.force_numeric = true;
    ScaleSet s(testsupport::standard_model(), 0.1, 5.0, 33, opts);
    CHECK_THROWS_AS(s.w(5.5), domain_error);
    CHECK_THROWS_AS(s.z_bar(6.0), domain_error);
    CHECK_NOTHROW(s.w(5.0));
}

TEST_CASE("build precondition errors", "[scale]") {
    auto m = testsupport::standard_model();
    CHECK_THROWS_AS(ScaleSet(m, 0.0, 10.0, 33), domain_error);
    CHECK_THROWS_AS(ScaleSet(m, -0.1, 10.0, 33), domain_error);
    CHECK_THROWS_AS(ScaleSet(m, 0.1, -1.0, 33), domain_error);
    CHECK_THROWS_AS(ScaleSet(m, 0.1, 10.0, 1), domain_error);
    CHECK_THROWS_AS(ScaleSet(LevyModel{1.0, 0.0, NoJumps{}}, 0.1, 10.0, 33), model_error);
}

TEST_CASE("small q keeps the synthesis stable", "[scale]") {
    // q = 1e-6 puts a root within ~1e-6 of zero; the series branch of the
    // exponential integrals must keep Zbar accurate.
    ScaleSet s(testsupport::standard_model(), 1e-6, 10.0, 33);
    StdOracle o(1e-6);
    for (double x : {0.5, 2.0, 8.0}) {
        CHECK(s.w(x) == Catch::Approx(o.W(x)).epsilon(1e-10));
        CHECK(s.z_bar(x) == Catch::Approx(o.Zbar(x)).epsilon(1e-10));
    }
}
