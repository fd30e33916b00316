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

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "levydiv/errors.hpp"

namespace levydiv::detail {

using cplx = std::complex<double>;

/// Dense polynomial with ascending coefficients: p(x) = sum c[i] x^i.
using Poly = std::vector<double>;

inline Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

/// Strips trailing coefficients that are negligible against the largest one.
inline Poly poly_trim(Poly p, double rel = 1e-14) {
    double scale = 0.0;
    for (double c : p) scale = std::max(scale, std::abs(c));
    while (p.size() > 1 && std::abs(p.back()) <= rel * scale) p.pop_back();
    return p;
}

/// All complex roots. Degree <= 2 analytically, higher degrees via the
/// companion-matrix eigenvalues.
inline std::vector<cplx> poly_roots(const Poly& poly) {
    Poly p = poly_trim(poly);
    const std::size_t deg = p.size() - 1;
    if (deg == 0) return {};
    if (deg == 1) return {cplx(-p[0] / p[1], 0.0)};
    if (deg == 2) {
        double a = p[2], b = p[1], c = p[0];
        cplx disc = std::sqrt(cplx(b * b - 4.0 * a * c, 0.0));
        // form with the numerically stable pairing
        cplx qn = -0.5 * (b + (b >= 0.0 ? disc : -disc));
        cplx r1 = qn / a;
        cplx r2 = (qn != cplx(0.0)) ? c / qn : cplx(0.0);
        return {r1, r2};
    }

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(long(deg), long(deg));
    for (std::size_t i = 0; i < deg; ++i) companion(long(i), long(deg) - 1) = -p[i] / p[deg];
    for (std::size_t i = 1; i < deg; ++i) companion(long(i), long(i) - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw numeric_error("poly_roots: companion eigenvalue iteration failed");
    std::vector<cplx> roots(deg);
    for (std::size_t i = 0; i < deg; ++i) {
        auto ev = solver.eigenvalues()(long(i));
        roots[i] = cplx(ev.real(), ev.imag());
    }
    return roots;
}

struct RootCluster {
    cplx center;
    int multiplicity = 1;
};

/// Groups nearly coincident roots so that the partial-fraction step treats
/// them as one multiple root instead of producing huge cancelling residues.
inline std::vector<RootCluster> cluster_roots(const std::vector<cplx>& roots,
                                              double rel_tol = 1e-7) {
    std::vector<RootCluster> clusters;
    for (const cplx& r : roots) {
        bool merged = false;
        for (auto& cl : clusters) {
            double tol = rel_tol * std::max(1.0, std::abs(cl.center));
            if (std::abs(r - cl.center) <= tol) {
                // running mean keeps the center at the cluster centroid
                cl.center = (cl.center * double(cl.multiplicity) + r) /
                            double(cl.multiplicity + 1);
                ++cl.multiplicity;
                merged = true;
                break;
            }
        }
        if (!merged) clusters.push_back({r, 1});
    }
    return clusters;
}

/// Taylor coefficients around z0 up to order `count-1`, by repeated synthetic
/// division (complex Horner). The active quotient lives in work[lo..].
inline std::vector<cplx> poly_taylor_c(std::vector<cplx> work, cplx z0, int count) {
    std::vector<cplx> out;
    out.reserve(std::size_t(count));
    std::size_t lo = 0;
    for (int k = 0; k < count; ++k) {
        if (lo >= work.size()) {
            out.emplace_back(0.0);
            continue;
        }
        for (std::size_t i = work.size() - 1; i-- > lo;) work[i] += work[i + 1] * z0;
        out.push_back(work[lo]); // remainder = quotient value at z0
        ++lo;
    }
    return out;
}

inline std::vector<cplx> poly_taylor(const Poly& p, cplx z0, int count) {
    return poly_taylor_c(std::vector<cplx>(p.begin(), p.end()), z0, count);
}

/// Divides p by (x - z0)^m, dropping the (small) remainder.
inline std::vector<cplx> poly_deflate(const Poly& p, cplx z0, int m) {
    std::vector<cplx> work(p.begin(), p.end());
    if (m >= int(work.size()))
        throw numeric_error("poly_deflate: multiplicity exceeds degree");
    std::size_t lo = 0;
    for (int k = 0; k < m; ++k) {
        for (std::size_t i = work.size() - 1; i-- > lo;) work[i] += work[i + 1] * z0;
        ++lo; // drop the remainder slot
    }
    return {work.begin() + long(lo), work.end()};
}

/// Coefficients of the power series n(z)/q(z) around 0 to order `count-1`.
inline std::vector<cplx> series_divide(const std::vector<cplx>& n,
                                       const std::vector<cplx>& q, int count) {
    if (q.empty() || std::abs(q[0]) == 0.0)
        throw numeric_error("series_divide: denominator vanishes at expansion point");
    std::vector<cplx> g(std::size_t(count), cplx(0.0));
    for (int j = 0; j < count; ++j) {
        cplx acc = (std::size_t(j) < n.size()) ? n[std::size_t(j)] : cplx(0.0);
        for (int i = 1; i <= j; ++i)
            if (std::size_t(i) < q.size()) acc -= q[std::size_t(i)] * g[std::size_t(j - i)];
        g[std::size_t(j)] = acc / q[0];
    }
    return g;
}

} // namespace levydiv::detail
