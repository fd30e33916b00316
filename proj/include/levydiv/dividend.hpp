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

#pragma once

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "levydiv/detail/rootfind.hpp"
#include "levydiv/errors.hpp"
#include "levydiv/scale.hpp"

namespace levydiv {

struct DividendProblemOptions {
    double x_max = 0.0; // 0: sized automatically from the barrier target
    int n_grid = 257;
    ScaleOptions scale;
};

/// Barrier dividend problem with a terminal value paid at ruin: model, force
/// of interest q > 0, terminal value S (any sign). Owns the ScaleSet at q and
/// the solved optimal barrier.
///
/// Sign convention: the scale formulas involve psi'(0+) = -E[X(1)]; this class
/// stores E = E[X(1)] > 0 and substitutes -E throughout, so no double
/// negation appears below.
class DividendProblem {
public:
    DividendProblem(const LevyModel& m, double q, double s_terminal,
                    DividendProblemOptions opts = {})
        : q_(q), s_(s_terminal) {
        validate(m);
        if (!(q > 0.0)) throw domain_error("DividendProblem: q must be > 0");
        ex1_ = mean(m);
        target_ = ex1_ / q - s_terminal; // Zbar(b*) target when positive
        double x_max = opts.x_max > 0.0
                           ? opts.x_max
                           : std::max(10.0, 1.5 * std::max(target_, 0.0) + 5.0);
        scale_.emplace(m, q, x_max, opts.n_grid, opts.scale);
        b_star_ = solve_barrier();
    }

    const LevyModel& model() const { return scale_->model(); }
    const ScaleSet& scale() const { return *scale_; }
    double q() const { return q_; }
    double s_terminal() const { return s_; }
    double ex1() const { return ex1_; } // E[X(1)] = -psi'(0+)
    double b_star() const { return b_star_; }

private:
    double solve_barrier() const {
        if (target_ <= 0.0) return 0.0;
        // Zbar(0) = 0 and Zbar(T) >= T (slope >= 1), so [0, T] brackets the
        // root; bisection seeds a Newton polish with Zbar' = Z.
        const ScaleSet& s = *scale_;
        double t = target_;
        return detail::bisect_newton([&](double b) { return s.z_bar(b) - t; },
                                     [&](double b) { return s.z(b); }, 0.0, t, 1e-13,
                                     "optimal_barrier");
    }

    double q_, s_, ex1_ = 0.0, target_ = 0.0, b_star_ = 0.0;
    std::optional<ScaleSet> scale_;
};

/// Lambda(b) = (Zbar(b) - E/q + S) / Z(b); its zero characterizes b*.
inline double lambda_coeff(const DividendProblem& p, double b) {
    if (!(b >= 0.0)) throw domain_error("lambda_coeff: b must be >= 0");
    const ScaleSet& s = p.scale();
    return (s.z_bar(b) - p.ex1() / p.q() + p.s_terminal()) / s.z(b);
}

/// Expected discounted dividends plus terminal value under the barrier
/// strategy at b:
///   Lambda(b) Z(b-x) - Zbar(b-x) + E/q            for 0 <= x <= b,
///   x - b + Lambda(b) + E/q                       for x > b.
/// Both branches agree at x = b.
inline double barrier_value(const DividendProblem& p, double b, double x) {
    if (!(b >= 0.0)) throw domain_error("barrier_value: b must be >= 0");
    if (!(x >= 0.0)) throw domain_error("barrier_value: x must be >= 0");
    const ScaleSet& s = p.scale();
    double lam = lambda_coeff(p, b);
    if (x <= b) return lam * s.z(b - x) - s.z_bar(b - x) + p.ex1() / p.q();
    return x - b + lam + p.ex1() / p.q();
}

/// d/dx of barrier_value: -q Lambda(b) W(b-x) + Z(b-x) on (0, b], 1 beyond b.
inline double barrier_value_derivative(const DividendProblem& p, double b, double x) {
    if (!(b >= 0.0)) throw domain_error("barrier_value_derivative: b must be >= 0");
    if (!(x > 0.0)) throw domain_error("barrier_value_derivative: x must be > 0");
    if (x > b) return 1.0;
    const ScaleSet& s = p.scale();
    return -p.q() * lambda_coeff(p, b) * s.w(b - x) + s.z(b - x);
}

/// The optimal barrier: the unique root of Zbar(b) = E/q - S when that target
/// is positive, otherwise 0 (pay everything immediately).
inline double optimal_barrier(const DividendProblem& p) { return p.b_star(); }

/// Value of the optimal strategy: x + S when b* = 0, otherwise
/// E/q - Zbar(b*-x) (affine with slope 1 past b* through the sign convention
/// Zbar(y) = y for y <= 0).
inline double value_function(const DividendProblem& p, double x) {
    if (!(x >= 0.0)) throw domain_error("value_function: x must be >= 0");
    double b = p.b_star();
    if (b == 0.0) return x + p.s_terminal();
    return p.ex1() / p.q() - p.scale().z_bar(b - x);
}

/// Residual of the integro-differential generator equation at x in (0, b):
///   (A - q) V_b(x) = sigma^2/2 V'' - c V' + int [V_b(x+y) - V_b(x)] Pi(dy) - q V_b.
/// Analytic derivatives of the closed-form V_b; adaptive quadrature for the
/// jump term, split at y = b - x where V_b switches branch. Should vanish for
/// the value function of any barrier.
inline double generator_residual(const DividendProblem& p, double b, double x,
                                 double tol = 1e-10) {
    if (!(b > 0.0 && x > 0.0 && x < b))
        throw domain_error("generator_residual: requires 0 < x < b");
    const ScaleSet& s = p.scale();
    const LevyModel& m = p.model();
    double lam = lambda_coeff(p, b);
    double v = barrier_value(p, b, x);
    double vp = barrier_value_derivative(p, b, x);
    double vpp = p.q() * (lam * s.w_prime(b - x) - s.w(b - x));

    double jump_term = 0.0;
    if (has_jump_density(m.jumps)) {
        using quad = boost::math::quadrature::gauss_kronrod<double, 31>;
        const double w = b - x;
        jump_term += quad::integrate(
            [&](double y) {
                return (barrier_value(p, b, x + y) - v) * levy_density(m.jumps, y);
            },
            0.0, w, 12, tol);
        double affine_base = lam + p.ex1() / p.q() - b;
        jump_term += quad::integrate(
            [&](double y) {
                return (x + y + affine_base - v) * levy_density(m.jumps, y);
            },
            w, std::numeric_limits<double>::infinity(), 12, tol);
    }

    return 0.5 * m.sigma * m.sigma * vpp - m.drift * vp + jump_term - p.q() * v;
}

} // namespace levydiv
