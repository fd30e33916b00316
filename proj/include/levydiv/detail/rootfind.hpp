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

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "levydiv/errors.hpp"

namespace levydiv::detail {

/// Root of an increasing function f on [lo, inf): expands hi geometrically
/// until f(hi) > 0, then runs TOMS 748 (bracketing, derivative-free).
/// Requires f(lo) <= 0.
template <class F>
double root_of_increasing(F&& f, double lo, double hi_guess, double xtol,
                          const char* what) {
    double flo = f(lo);
    if (flo > 0.0) {
        std::ostringstream os;
        os << what << ": no bracket, f(" << lo << ") = " << flo << " > 0";
        throw numeric_error(os.str());
    }
    if (flo == 0.0) return lo;

    double hi = hi_guess > lo ? hi_guess : lo + 1.0;
    double fhi = f(hi);
    int expansions = 0;
    while (fhi <= 0.0) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = f(hi);
        if (++expansions > 200 || !std::isfinite(hi)) {
            std::ostringstream os;
            os << what << ": bracket expansion failed, f(" << hi << ") = " << fhi
               << " after " << expansions << " doublings (lo=" << lo << ", f(lo)=" << flo << ")";
            throw numeric_error(os.str());
        }
    }

    auto tol = [xtol](double a, double b) {
        return std::abs(b - a) <= xtol * (1.0 + std::min(std::abs(a), std::abs(b)));
    };
    std::uintmax_t max_iter = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
    return 0.5 * (r.first + r.second);
}

/// Bisection on [lo, hi] followed by Newton polishing. Used where the
/// derivative is cheap and the bracket is guaranteed. Requires
/// f(lo) <= 0 <= f(hi) and f increasing.
template <class F, class DF>
double bisect_newton(F&& f, DF&& df, double lo, double hi, double xtol,
                     const char* what) {
    double flo = f(lo), fhi = f(hi);
    if (flo > 0.0 || fhi < 0.0) {
        std::ostringstream os;
        os << what << ": invalid bracket [" << lo << ", " << hi << "], f = ["
           << flo << ", " << fhi << "]";
        throw numeric_error(os.str());
    }
    // coarse bisection
    for (int i = 0; i < 40 && (hi - lo) > 1e-3 * (1.0 + std::abs(hi)); ++i) {
        double mid = 0.5 * (lo + hi);
        (f(mid) <= 0.0 ? lo : hi) = mid;
    }
    // Newton polish, clamped to the bracket
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 60; ++i) {
        double fx = f(x);
        (fx <= 0.0 ? lo : hi) = x;
        double d = df(x);
        double step = (d > 0.0) ? fx / d : 0.0;
        double xn = x - step;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) <= xtol * (1.0 + std::abs(xn))) return xn;
        x = xn;
    }
    return x;
}

/// Deterministic pairwise sum over [first, last) in index order.
inline double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

} // namespace levydiv::detail
