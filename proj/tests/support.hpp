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
#include <functional>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "levydiv/levy_model.hpp"

namespace testsupport {

// --- reference models used across the suites --------------------------------

/// c=1, sigma=0, exponential jumps lambda=2, mu=1. E[X(1)] = 1.
inline levydiv::LevyModel standard_model() {
    return {1.0, 0.0, levydiv::ExpJumps{2.0, 1.0}};
}

/// Jump diffusion: c=1, sigma=0.5, exponential jumps lambda=1.5, mu=1.
/// E[X(1)] = 0.5.
inline levydiv::LevyModel jumpdiff_model() {
    return {1.0, 0.5, levydiv::ExpJumps{1.5, 1.0}};
}

/// Brownian with upward drift: c=-0.5 (paths drift up), sigma=1.
inline levydiv::LevyModel gaussian_model() {
    return {-0.5, 1.0, levydiv::NoJumps{}};
}

/// Gamma subordinator minus drift: c=0.6, shape=1.2, scale=1. E[X(1)] = 0.6.
inline levydiv::LevyModel gamma_model() {
    return {0.6, 0.0, levydiv::GammaJumps{1.2, 1.0, 1e-2}};
}

/// Erlang jumps: c=1, lambda=1, shape=3, scale=0.5. E[X(1)] = 0.5.
inline levydiv::LevyModel erlang_model() {
    return {1.0, 0.0, levydiv::ErlangJumps{1.0, 3, 0.5}};
}

// --- independent scale-function oracle for the standard model ---------------
//
// With psi(t) = t - 2t/(1+t), the transform 1/(psi(t)-q) equals
// (1+t)/(t^2-(1+q)t-q); partial fractions over the two real roots give W in
// closed form, integrated here by hand. Everything below is derived from the
// quadratic formula only, independent of the library's partial-fraction code.

struct StdOracle {
    double q, tp, tm;

    explicit StdOracle(double q_in = 0.1) : q(q_in) {
        double disc = std::sqrt((1.0 + q) * (1.0 + q) + 4.0 * q);
        tp = 0.5 * ((1.0 + q) + disc);
        tm = 0.5 * ((1.0 + q) - disc);
    }

    double W(double x) const {
        if (x < 0.0) return 0.0;
        return ((1.0 + tp) * std::exp(tp * x) - (1.0 + tm) * std::exp(tm * x)) / (tp - tm);
    }
    double Wbar(double x) const {
        if (x <= 0.0) return 0.0;
        return ((1.0 + tp) / tp * (std::exp(tp * x) - 1.0) -
                (1.0 + tm) / tm * (std::exp(tm * x) - 1.0)) /
               (tp - tm);
    }
    double Z(double x) const { return 1.0 + q * Wbar(x); }
    double Zbar(double x) const {
        if (x <= 0.0) return x;
        double inner = ((1.0 + tp) / tp * ((std::exp(tp * x) - 1.0) / tp - x) -
                        (1.0 + tm) / tm * ((std::exp(tm * x) - 1.0) / tm - x)) /
                       (tp - tm);
        return x + q * inner;
    }
    double Wprime(double x) const {
        return ((1.0 + tp) * tp * std::exp(tp * x) - (1.0 + tm) * tm * std::exp(tm * x)) /
               (tp - tm);
    }
};

// --- quadrature helpers (test-side route, independent of the library) -------

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, tol);
}

/// Checks int_0^inf e^{-theta x} W(x) dx == 1/(psi(theta)-q) by quadrature on
/// [0, x_hi] plus the dominant-pole tail estimate beyond.
template <class ScaleLike>
double laplace_identity_gap(const levydiv::LevyModel& m, const ScaleLike& s, double q,
                            double theta, double x_hi) {
    double quad = integrate([&](double x) { return std::exp(-theta * x) * s.w(x); }, 0.0,
                            x_hi, 1e-11);
    double phi_q = levydiv::phi(m, q);
    double dpsi = levydiv::psi_derivative(m, phi_q);
    double tail = std::exp(-(theta - phi_q) * x_hi) / (dpsi * (theta - phi_q));
    double target = 1.0 / (levydiv::laplace_exponent(m, theta) - q);
    return std::abs(quad + tail - target) / std::abs(target);
}

/// |a-b| <= 3*se + slack, the Monte Carlo acceptance rule.
inline bool within_3se(double analytic, double mc, double se, double slack = 1e-12) {
    return std::abs(analytic - mc) <= 3.0 * se + slack;
}

} // namespace testsupport
