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

#include "levydiv/dividend.hpp"
#include "levydiv/rng.hpp"
#include "levydiv/simulate.hpp"
#include "support.hpp"

using namespace levydiv;

TEST_CASE("philox streams are deterministic and distinct", "[simulate]") {
    PathRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 64; ++i) {
        double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
    // different stream or seed: different sequence
    PathRng a2(42, 7);
    int same_stream = 0, same_seed = 0;
    for (int i = 0; i < 64; ++i) {
        double u = a2.uniform();
        if (u == c.uniform()) ++same_stream;
        if (u == d.uniform()) ++same_seed;
    }
    CHECK(same_stream == 0);
    CHECK(same_seed == 0);
}

TEST_CASE("philox output moments look uniform", "[simulate]") {
    PathRng rng(2026, 0);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        sum += u;
        sum2 += u * u;
    }
    CHECK(sum / n == Catch::Approx(0.5).margin(0.005));
    CHECK(sum2 / n == Catch::Approx(1.0 / 3.0).margin(0.005));

    double nsum = 0.0, nsum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = rng.normal();
        nsum += z;
        nsum2 += z * z;
    }
    CHECK(nsum / n == Catch::Approx(0.0).margin(0.01));
    CHECK(nsum2 / n == Catch::Approx(1.0).margin(0.02));
}

TEST_CASE("estimates are bit-identical across worker counts", "[simulate]") {
    auto m = testsupport::standard_model();
    SimulationConfig cfg;
    cfg.n_paths = 5000;
    cfg.horizon = 700.0;
    cfg.seed = 99;

    cfg.threads = 1;
    auto r1 = simulate_reflected(m, 3.0, 1.5, 0.1, cfg);
    cfg.threads = 4;
    auto r4 = simulate_reflected(m, 3.0, 1.5, 0.1, cfg);
    cfg.threads = 3;
    auto r3 = simulate_reflected(m, 3.0, 1.5, 0.1, cfg);
    CHECK(r1.dividends.mean == r4.dividends.mean);
    CHECK(r1.dividends.se == r4.dividends.se);
    CHECK(r1.terminal.mean == r3.terminal.mean);
    CHECK(r1.terminal.se == r4.terminal.se);

    auto mjd = testsupport::jumpdiff_model();
    cfg.horizon = 120.0;
    cfg.dt = 5e-3;
    cfg.threads = 1;
    auto c1 = simulate_corridor(mjd, 0.0, 3.0, 1.5, 0.1, cfg);
    cfg.threads = 5;
    auto c5 = simulate_corridor(mjd, 0.0, 3.0, 1.5, 0.1, cfg);
    CHECK(c1.exit_down.mean == c5.exit_down.mean);
    CHECK(c1.up_by_creep.mean == c5.up_by_creep.mean);
    CHECK(c1.n_up_jump == c5.n_up_jump);
}

TEST_CASE("different seeds decorrelate", "[simulate]") {
    auto m = testsupport::standard_model();
    SimulationConfig cfg;
    cfg.n_paths = 2000;
    cfg.horizon = 700.0;
    cfg.seed = 1;
    auto r1 = simulate_reflected(m, 3.0, 1.5, 0.1, cfg);
    cfg.seed = 2;
    auto r2 = simulate_reflected(m, 3.0, 1.5, 0.1, cfg);
    CHECK(r1.dividends.mean != r2.dividends.mean);
}

TEST_CASE("immediate lump above the barrier", "[simulate]") {
    auto m = testsupport::standard_model();
    SimulationConfig cfg;
    cfg.n_paths = 400;
    cfg.horizon = 800.0;
    cfg.seed = 5;
    auto r = simulate_reflected(m, 1.0, 3.0, 0.1, cfg);
    // every path pays x0 - b = 2 undiscounted at t = 0, plus nonnegative rest
    CHECK(r.dividends.mean >= 2.0);
}

TEST_CASE("ruin is immediate at zero initial surplus", "[simulate]") {
    auto m = testsupport::standard_model();
    SimulationConfig cfg;
    cfg.n_paths = 200;
    cfg.seed = 6;
    auto r = simulate_reflected(m, 2.0, 0.0, 0.1, cfg);
    CHECK(r.terminal.mean == 1.0);
    CHECK(r.terminal.se == 0.0);
    CHECK(r.dividends.mean == 0.0);
    CHECK(r.censored_fraction == 0.0);
}

TEST_CASE("no jumps means no jump exits", "[simulate]") {
    auto m = testsupport::gaussian_model();
    SimulationConfig cfg;
    cfg.n_paths = 3000;
    cfg.dt = 2e-3;
    cfg.horizon = 150.0;
    cfg.seed = 7;
    auto r = simulate_corridor(m, 0.0, 2.0, 1.0, 0.1, cfg);
    CHECK(r.n_up_jump == 0);
    CHECK(r.n_up_creep + r.n_down + r.n_censored == cfg.n_paths);
}

TEST_CASE("censoring above one percent fails loudly", "[simulate]") {
    auto m = testsupport::standard_model();
    SimulationConfig cfg;
    cfg.n_paths = 500;
    cfg.horizon = 5.0; // far too short for ruin from x0 = 3
    cfg.seed = 8;
    CHECK_THROWS_AS(simulate_reflected(m, 3.0, 3.0, 0.1, cfg), numeric_error);
}

TEST_CASE("inadmissible strategy lumps are rejected", "[simulate]") {
    auto m = testsupport::standard_model();
    SimulationConfig cfg;
    cfg.n_paths = 10;
    cfg.seed = 9;
    Strategy overpay = [](double u, double) { return u + 0.5; };
    CHECK_THROWS_AS(simulate_dual_strategy(m, overpay, 1.0, 0.1, 0.0, cfg), strategy_error);
    Strategy negative = [](double, double) { return -0.5; };
    CHECK_THROWS_AS(simulate_dual_strategy(m, negative, 1.0, 0.1, 0.0, cfg), strategy_error);
}

TEST_CASE("pay-everything-now strategy realizes x0 + S", "[simulate]") {
    auto m = testsupport::standard_model();
    SimulationConfig cfg;
    cfg.n_paths = 50;
    cfg.seed = 10;
    Strategy pay_all = [](double u, double) { return u; };
    auto r = simulate_dual_strategy(m, pay_all, 2.5, 0.1, -1.0, cfg);
    CHECK(r.value.mean == Catch::Approx(2.5 - 1.0).margin(1e-14));
    CHECK(r.value.se == 0.0);
}

TEST_CASE("barrier plug-in reproduces the reflected simulator", "[simulate][mc]") {
    auto m = testsupport::standard_model();
    double b = 2.5, x0 = 1.25, q = 0.1;
    SimulationConfig cfg;
    cfg.n_paths = 20000;
    cfg.horizon = 800.0;
    cfg.dt = 0.05; // strategy consultation grid; paths are exact either way
    cfg.seed = 11;
    auto reflected = simulate_reflected(m, b, x0, q, cfg);
    Strategy barrier = [b](double u, double) { return std::max(0.0, u - b); };
    auto plugin = simulate_dual_strategy(m, barrier, x0, q, 0.0, cfg);
    double se = std::hypot(reflected.dividends.se, plugin.value.se);
    CHECK(testsupport::within_3se(reflected.dividends.mean, plugin.value.mean, se));
}

TEST_CASE("suboptimal strategies stay below the value function", "[simulate][mc]") {
    auto p = DividendProblem(testsupport::standard_model(), 0.1, 0.0);
    double b = p.b_star(), x0 = b / 2.0, q = 0.1;
    SimulationConfig cfg;
    cfg.n_paths = 20000;
    cfg.horizon = 1500.0;
    cfg.dt = 0.05;
    cfg.seed = 12;

    Strategy threshold = [b](double u, double) { return std::max(0.0, u - (b + 1.0)); };
    auto r1 = simulate_dual_strategy(p.model(), threshold, x0, q, 0.0, cfg);
    CHECK(r1.value.mean <= value_function(p, x0) + 3.0 * r1.value.se);

    Strategy pay_all = [](double u, double) { return u; };
    auto r2 = simulate_dual_strategy(p.model(), pay_all, x0, q, 0.0, cfg);
    CHECK(r2.value.mean <= value_function(p, x0) + 3.0 * r2.value.se);
}

TEST_CASE("dt refinement does not move the jump diffusion estimates", "[simulate][mc]") {
    auto m = testsupport::jumpdiff_model();
    SimulationConfig cfg;
    cfg.n_paths = 15000;
    cfg.horizon = 150.0;
    cfg.seed = 13;
    cfg.dt = 2e-3;
    auto coarse = simulate_reflected(m, 1.5, 0.75, 0.1, cfg);
    cfg.dt = 1e-3;
    auto fine = simulate_reflected(m, 1.5, 0.75, 0.1, cfg);
    double se2 = std::hypot(coarse.dividends.se, fine.dividends.se);
    CHECK(std::abs(coarse.dividends.mean - fine.dividends.mean) < 2.0 * se2);

    // the standard model is event-driven and exact: dt cannot matter at all
    auto ms = testsupport::standard_model();
    cfg.horizon = 700.0;
    cfg.dt = 1e-2;
    auto a = simulate_reflected(ms, 3.0, 1.5, 0.1, cfg);
    cfg.dt = 5e-3;
    auto b = simulate_reflected(ms, 3.0, 1.5, 0.1, cfg);
    CHECK(a.dividends.mean == b.dividends.mean);
    CHECK(a.terminal.mean == b.terminal.mean);
}

TEST_CASE("gamma jumps sample from the truncated tail", "[simulate]") {
    auto g = GammaJumps{1.2, 1.0, 1e-2};
    detail::JumpSampler sampler{JumpSpec{g}};
    // rate = shape * E1(eps/scale)
    CHECK(sampler.rate() == Catch::Approx(1.2 * 4.0379295765381138).epsilon(1e-10));
    PathRng rng(17, 0);
    const int n = 20000;
    double acc = 0.0, mn = 1e9;
    for (int i = 0; i < n; ++i) {
        double x = sampler.sample(rng);
        mn = std::min(mn, x);
        acc += x;
    }
    CHECK(mn >= g.trunc_eps);
    // mean of the truncated density: shape*scale*e^{-eps/scale} / rate
    double expect = 1.2 * std::exp(-0.01) / sampler.rate();
    CHECK(acc / n == Catch::Approx(expect).epsilon(0.03));
    // compensation matches the mass below eps
    CHECK(sampler.drift_compensation() ==
          Catch::Approx(1.2 * (1.0 - std::exp(-0.01))).epsilon(1e-10));
}

TEST_CASE("gamma model reflected run cross-checks the formulas", "[simulate][mc]") {
    auto m = testsupport::gamma_model();
    DividendProblem p(m, 0.1, 0.0);
    double b = p.b_star();
    SimulationConfig cfg;
    cfg.n_paths = 8000;
    cfg.horizon = 1200.0;
    cfg.seed = 14;
    auto r = simulate_reflected(m, b, b / 2.0, 0.1, cfg);
    auto est = r.combined(0.0);
    // truncation at eps = 1e-2 plus inversion tolerance: allow 4 SE
    CHECK(std::abs(barrier_value(p, b, b / 2.0) - est.mean) <= 4.0 * est.se);
}

TEST_CASE("config validation and warnings", "[simulate]") {
    auto m = testsupport::standard_model();
    SimulationConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(validate_config(cfg), domain_error);
    cfg = {};
    cfg.horizon = -1.0;
    CHECK_THROWS_AS(validate_config(cfg), domain_error);
    cfg = {};
    cfg.n_paths = 0;
    CHECK_THROWS_AS(validate_config(cfg), domain_error);

    cfg = {};
    cfg.horizon = 10.0; // horizon * q = 1 << 20
    auto warns = simulation_warnings(m, 0.1, cfg);
    CHECK(warns.size() == 1);
    auto mjd = testsupport::jumpdiff_model();
    cfg.dt = 0.2; // rate 1.5 * 0.2 = 0.3 > 0.1
    warns = simulation_warnings(mjd, 0.1, cfg);
    CHECK(warns.size() == 2);
}

TEST_CASE("censored mass is negligible once horizon*q >= 20", "[simulate]") {
    auto m = testsupport::standard_model();
    SimulationConfig cfg;
    cfg.n_paths = 20000;
    cfg.horizon = 900.0; // horizon * q = 90
    cfg.seed = 15;
    auto r = simulate_reflected(m, 3.0, 1.5, 0.1, cfg);
    // any censored path contributes at most e^{-q*horizon} to the terminal
    double bound = r.censored_fraction * std::exp(-0.1 * cfg.horizon);
    CHECK(bound < 1e-8 * std::max(1.0, r.terminal.mean));
}
