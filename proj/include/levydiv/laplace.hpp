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
#include <complex>
#include <functional>
#include <vector>

#include "levydiv/errors.hpp"

namespace levydiv {

/// Fixed-Talbot inversion of a Laplace transform at t > 0 (Abate-Valko).
/// The transform must be analytic to the right of the deformed contour, i.e.
/// all singularities on or near the negative real axis; strip any pole in the
/// right half plane before calling.
inline double talbot_invert(const std::function<std::complex<double>(std::complex<double>)>& F,
                            double t, int M = 48) {
    if (!(t > 0.0)) throw domain_error("talbot_invert: t must be positive");
    const double pi = 3.14159265358979323846;
    const double r = 2.0 * M / (5.0 * t);
    double sum = 0.5 * std::exp(r * t) * F(std::complex<double>(r, 0.0)).real();
    for (int k = 1; k < M; ++k) {
        double theta = k * pi / M;
        double ct = std::cos(theta) / std::sin(theta);
        std::complex<double> s(r * theta * ct, r * theta);
        std::complex<double> growth(1.0, theta + (theta * ct - 1.0) * ct);
        sum += (std::exp(s * t) * F(s) * growth).real();
    }
    return sum * r / M;
}

namespace detail {

/// Gaver-Stehfest weights for n_terms (even), accumulated in long double;
/// the alternating binomial sums are the precision bottleneck of the method.
inline std::vector<long double> stehfest_weights(int n_terms) {
    const int n2 = n_terms;
    const int nh = n2 / 2;
    auto lfact = [](int k) {
        long double f = 1.0L;
        for (int i = 2; i <= k; ++i) f *= i;
        return f;
    };
    std::vector<long double> w(std::size_t(n2) + 1, 0.0L);
    for (int k = 1; k <= n2; ++k) {
        long double acc = 0.0L;
        for (int j = (k + 1) / 2; j <= std::min(k, nh); ++j) {
            long double term = std::pow((long double)j, nh) * lfact(2 * j);
            term /= lfact(nh - j) * lfact(j) * lfact(j - 1) * lfact(k - j) * lfact(2 * j - k);
            acc += term;
        }
        w[std::size_t(k)] = ((nh + k) % 2 == 0 ? acc : -acc);
    }
    return w;
}

} // namespace detail

/// Gaver-Stehfest inversion at t > 0 from real-axis samples only. In double
/// precision usable up to n_terms ~ 14-16; intended as an independent
/// cross-check of the Talbot contour, not as the production path.
inline double stehfest_invert(const std::function<double(double)>& F, double t,
                              int n_terms = 14) {
    if (!(t > 0.0)) throw domain_error("stehfest_invert: t must be positive");
    if (n_terms % 2 != 0) throw domain_error("stehfest_invert: n_terms must be even");
    static thread_local int cached_n = 0;
    static thread_local std::vector<long double> cached_w;
    if (cached_n != n_terms) {
        cached_w = detail::stehfest_weights(n_terms);
        cached_n = n_terms;
    }
    const long double ln2_t = 0.69314718055994530942L / (long double)t;
    long double acc = 0.0L;
    for (int k = 1; k <= n_terms; ++k)
        acc += cached_w[std::size_t(k)] * (long double)F(double(ln2_t * k));
    return double(ln2_t * acc);
}

} // namespace levydiv
