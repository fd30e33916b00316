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
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "levydiv/errors.hpp"
#include "levydiv/scale.hpp"
#include "levydiv/simulate.hpp"

namespace levydiv {

/// Two-sided exit window: first passage of X below a or above b, started at
/// x strictly inside (a, b). The discount rate q lives in the ScaleSet.
struct ExitCorridor {
    double a = 0.0;
    double b = 1.0;
    double x = 0.5;
};

inline void validate_corridor(const ExitCorridor& c) {
    if (!(c.a < c.x && c.x < c.b))
        throw domain_error("corridor: requires a < x < b");
}

/// E_x[e^{-q T_a^-} 1{down before up}] = W(b-x)/W(b-a).
inline double exit_down(const ScaleSet& s, const ExitCorridor& c) {
    validate_corridor(c);
    double denom = s.w(c.b - c.a);
    if (!(denom > 0.0)) throw numeric_error("exit_down: W(b-a) not positive");
    return s.w(c.b - c.x) / denom;
}

/// E_x[e^{-q T_b^+} 1{up before down}] = Z(b-x) - W(b-x) Z(b-a)/W(b-a).
inline double exit_up(const ScaleSet& s, const ExitCorridor& c) {
    validate_corridor(c);
    double denom = s.w(c.b - c.a);
    if (!(denom > 0.0)) throw numeric_error("exit_up: W(b-a) not positive");
    return s.z(c.b - c.x) - s.w(c.b - c.x) * s.z(c.b - c.a) / denom;
}

/// Continuous (Gaussian) upward crossing of b before passing a:
/// sigma^2/2 (W'(b-x) - W(b-x) W'(b-a)/W(b-a)). Only defined for sigma > 0;
/// with sigma = 0 the prefactor collapses and the identity says nothing, so
/// that case is an explicit error rather than a silent zero.
inline double creep_up(const ScaleSet& s, const ExitCorridor& c) {
    validate_corridor(c);
    const LevyModel& m = s.model();
    if (!(m.sigma > 0.0))
        throw unsupported_error("creep_up: requires a Gaussian component (sigma > 0)");
    double denom = s.w(c.b - c.a);
    return 0.5 * m.sigma * m.sigma *
           (s.w_prime(c.b - c.x) - s.w(c.b - c.x) * s.w_prime(c.b - c.a) / denom);
}

/// Pre-exit kernel u^{(q)}(x,y) = W(b-x) W(y-a)/W(b-a) - W(y-x), y in (a,b).
inline double overshoot_kernel(const ScaleSet& s, const ExitCorridor& c, double y) {
    validate_corridor(c);
    if (!(y > c.a && y < c.b))
        throw domain_error("overshoot_kernel: y must lie in (a, b)");
    return s.w(c.b - c.x) * s.w(y - c.a) / s.w(c.b - c.a) - s.w(y - c.x);
}

/// Joint density of (X(tau-), X(tau)) at (y, z) for jump exits above b:
/// u^{(q)}(x,y) pi(z-y), z >= b.
inline double overshoot_density(const ScaleSet& s, const ExitCorridor& c, double y,
                                double z) {
    if (z < c.b) throw domain_error("overshoot_density: z must be >= b");
    if (!has_jump_density(s.model().jumps))
        throw unsupported_error("overshoot_density: model has no jump density");
    return overshoot_kernel(s, c, y) * levy_density(s.model().jumps, z - y);
}

/// Integral of the overshoot density over y in (a,b), z in [b,inf): the
/// discounted mass of jump up-crossings. Nested adaptive quadrature, outer
/// integral split at the kink y = x.
inline double overshoot_upcross_mass(const ScaleSet& s, const ExitCorridor& c,
                                     double tol = 1e-8) {
    validate_corridor(c);
    if (!has_jump_density(s.model().jumps))
        throw unsupported_error("overshoot_upcross_mass: model has no jump density");
    using inner_quad = boost::math::quadrature::gauss_kronrod<double, 15>;
    using outer_quad = boost::math::quadrature::gauss_kronrod<double, 31>;
    const JumpSpec& jumps = s.model().jumps;
    auto integrand = [&](double y) {
        double kernel = overshoot_kernel(s, c, y);
        if (kernel == 0.0) return 0.0;
        double tail = inner_quad::integrate(
            [&](double z) { return levy_density(jumps, z - y); }, c.b,
            std::numeric_limits<double>::infinity(), 10, tol * 1e-2);
        return kernel * tail;
    };
    double left = outer_quad::integrate(integrand, c.a, c.x, 12, tol);
    double right = outer_quad::integrate(integrand, c.x, c.b, 12, tol);
    return left + right;
}

/// Ruin Laplace transform of the process reflected at b, started at x:
/// E_x[e^{-q T}] = Z(b-x)/Z(b).
inline double ruin_laplace(const ScaleSet& s, double b, double x) {
    if (!(b >= 0.0)) throw domain_error("ruin_laplace: b must be >= 0");
    if (!(x >= 0.0 && x <= b)) throw domain_error("ruin_laplace: x must lie in [0, b]");
    return s.z(b - x) / s.z(b);
}

// --- martingale checks against the simulator -----------------------------------

enum class MartingaleKind { ZScale, WScale, UpcrossCombo };

struct MartingaleResidual {
    double t = 0.0;
    double residual = 0.0; // empirical mean minus the t = 0 value
    double se = 0.0;
};

/// Empirical drift of the stopped processes e^{-q(t^tau)} g(X(t^tau)) on the
/// corridor, with g one of W(b-.), Z(b-.) or the up-crossing combination
/// Z(b-.) - W(b-.) Z(b-a)/W(b-a). All three are martingales, so every
/// residual should sit within a few standard errors of zero.
inline std::vector<MartingaleResidual> martingale_residual(
    const ScaleSet& s, const ExitCorridor& c, MartingaleKind kind,
    const std::vector<double>& t_grid, const SimulationConfig& cfg) {
    validate_corridor(c);
    const double combo_ratio = s.z(c.b - c.a) / s.w(c.b - c.a);
    auto g = [&s, &c, kind, combo_ratio](double x) {
        switch (kind) {
            case MartingaleKind::ZScale: return s.z(c.b - x);
            case MartingaleKind::WScale: return s.w(c.b - x);
            default: return s.z(c.b - x) - s.w(c.b - x) * combo_ratio;
        }
    };
    const double q = s.q();
    const double start = g(c.x);
    CorridorOptions opts;
    opts.monitor_times = t_grid;
    // per-path deviation from the t = 0 value: identically zero at t = 0
    opts.monitor_fn = [&, q, start](double t, double x) {
        return std::exp(-q * t) * g(x) - start;
    };
    auto res = simulate_corridor(s.model(), c.a, c.b, c.x, q, cfg, opts);
    std::vector<MartingaleResidual> out(t_grid.size());
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        out[k] = {t_grid[k], res.monitor_stats[k].mean, res.monitor_stats[k].se};
    }
    return out;
}

} // namespace levydiv
