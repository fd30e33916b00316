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
#include <cmath>
#include <complex>
#include <memory>
#include <optional>
#include <sstream>
#include <vector>

#include <math.h> // boost 1.74 pchip.hpp needs ::isnan in scope
#include <boost/math/interpolators/pchip.hpp>

#include "levydiv/detail/polynomial.hpp"
#include "levydiv/errors.hpp"
#include "levydiv/laplace.hpp"
#include "levydiv/levy_model.hpp"

namespace levydiv {

enum class ScaleBackend { RationalClosedForm, NumericInversion };
enum class InversionAlgorithm { FixedTalbot, GaverStehfest };

struct ScaleOptions {
    bool force_numeric = false; // run the inversion backend even when psi is rational
    InversionAlgorithm algorithm = InversionAlgorithm::FixedTalbot;
    int talbot_points = 48;
    int stehfest_terms = 14;
    // Simpson refinement target for Wbar/Zbar. Gaver-Stehfest carries ~1e-7
    // relative noise of its own, so its builds use a floor of 1e-6.
    double integral_refine_tol = 1e-9;
    int max_refinements = 10;

    double effective_refine_tol() const {
        return algorithm == InversionAlgorithm::GaverStehfest
                   ? std::max(integral_refine_tol, 1e-6)
                   : integral_refine_tol;
    }
};

/// One pole of 1/(psi - q) with its partial-fraction coefficients:
/// residues[i-1] multiplies 1/(theta - zeta)^i, i.e. x^{i-1} e^{zeta x}/(i-1)!
/// after inversion.
struct ScaleRoot {
    std::complex<double> zeta;
    int multiplicity = 1;
    std::vector<std::complex<double>> residues;
};

/// W(0+) from the initial-value table: 1/c0 for bounded variation, else 0.
inline double scale_initial_value(const LevyModel& m) {
    return bounded_variation(m) ? 1.0 / drift_c0(m) : 0.0;
}

/// W'(0+) from the initial-value table: 2/sigma^2 if sigma != 0,
/// (q + Pi(0,inf))/c0^2 for compound Poisson, +inf for sigma = 0 with
/// infinite activity.
inline double scale_initial_derivative(const LevyModel& m, double q) {
    if (m.sigma != 0.0) return 2.0 / (m.sigma * m.sigma);
    double mass = levy_mass(m.jumps);
    if (std::isfinite(mass)) {
        double c0 = drift_c0(m);
        return (q + mass) / (c0 * c0);
    }
    return std::numeric_limits<double>::infinity();
}

inline bool psi_is_rational(const LevyModel& m) {
    return !std::holds_alternative<GammaJumps>(m.jumps);
}

namespace detail {

// I_n(x; zeta) = int_0^x t^n e^{zeta t} dt. Series branch keeps the result
// stable when |zeta x| is small (the forward recursion divides by zeta).
inline cplx exp_power_integral(int n, double x, cplx zeta) {
    cplx zx = zeta * x;
    if (std::abs(zx) < 0.5) {
        cplx sum(0.0);
        cplx term(1.0); // (zeta x)^k / k!
        for (int k = 0; k < 80; ++k) {
            cplx add = term / double(n + k + 1);
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
            term *= zx / double(k + 1);
        }
        return std::pow(x, n + 1) * sum;
    }
    cplx e = std::exp(zx);
    cplx acc = (e - 1.0) / zeta;
    double xp = 1.0;
    for (int mth = 1; mth <= n; ++mth) {
        xp *= x;
        acc = (xp * e - double(mth) * acc) / zeta;
    }
    return acc;
}

// numerator N and denominator P with P(theta) = (psi(theta) - q) * N(theta),
// both polynomial for the rational families
struct RationalPair {
    Poly num;
    Poly den;
};

inline RationalPair rational_transform(const LevyModel& m, double q) {
    const double half_s2 = 0.5 * m.sigma * m.sigma;
    return std::visit(
        [&](const auto& fam) -> RationalPair {
            using F = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<F, NoJumps>) {
                return {{1.0}, poly_trim({-q, m.drift, half_s2})};
            } else if constexpr (std::is_same_v<F, ExpJumps>) {
                Poly d{fam.mu, 1.0};
                Poly p = poly_mul(poly_trim({-(fam.lambda + q), m.drift, half_s2}), d);
                p[0] += fam.lambda * fam.mu;
                return {d, poly_trim(p)};
            } else if constexpr (std::is_same_v<F, ErlangJumps>) {
                double beta = 1.0 / fam.scale;
                Poly d{1.0};
                for (int i = 0; i < fam.shape; ++i) d = poly_mul(d, Poly{beta, 1.0});
                Poly p = poly_mul(poly_trim({-(fam.lambda + q), m.drift, half_s2}), d);
                p[0] += fam.lambda * std::pow(beta, fam.shape);
                return {d, poly_trim(p)};
            } else {
                throw unsupported_error("rational_transform: psi is not rational");
            }
        },
        m.jumps);
}

} // namespace detail

/// Evaluator bundle for the q-scale functions W, Z and their antiderivatives
/// Wbar, Zbar at a fixed q > 0. Immutable after construction; all evaluations
/// are pure and thread-safe.
///
/// Backends:
///  - RationalClosedForm: partial fractions of 1/(psi - q), exact synthesis
///    as sums of x^j e^{zeta x}; valid for every x.
///  - NumericInversion: pole-stripped contour inversion cached on a grid over
///    [0, x_max], with monotone cubic interpolation between nodes. Queries
///    beyond x_max are rejected, never extrapolated.
class ScaleSet {
    struct Numeric {
        std::vector<double> xs, w_vals, wbar_vals, zbar_vals;
        std::optional<boost::math::interpolators::pchip<std::vector<double>>> w_itp,
            wbar_itp, zbar_itp;
    };

    struct Impl {
        LevyModel model;
        double q = 0.0;
        double x_max = 0.0;
        ScaleBackend backend = ScaleBackend::RationalClosedForm;
        std::vector<ScaleRoot> roots;
        Numeric numeric;
        double phi_q = 0.0;
        double psi_d_phi = 0.0; // psi'(Phi(q))
        double w0 = 0.0;
    };

public:
    ScaleSet(const LevyModel& m, double q, double x_max, int n_grid,
             ScaleOptions opts = {}) {
        validate(m);
        if (!(q > 0.0)) throw domain_error("ScaleSet: q must be > 0");
        if (!(x_max > 0.0)) throw domain_error("ScaleSet: x_max must be > 0");
        if (n_grid < 2) throw domain_error("ScaleSet: n_grid must be >= 2");

        auto impl = std::make_shared<Impl>();
        impl->model = m;
        impl->q = q;
        impl->x_max = x_max;
        impl->phi_q = phi(m, q);
        impl->psi_d_phi = psi_derivative(m, impl->phi_q);
        impl->w0 = scale_initial_value(m);

        if (psi_is_rational(m) && !opts.force_numeric) {
            impl->backend = ScaleBackend::RationalClosedForm;
            build_closed_form(*impl);
        } else {
            impl->backend = ScaleBackend::NumericInversion;
            build_numeric(*impl, n_grid, opts);
        }
        impl_ = std::move(impl);
    }

    double q() const { return impl_->q; }
    const LevyModel& model() const { return impl_->model; }
    ScaleBackend backend() const { return impl_->backend; }
    double x_max() const { return impl_->x_max; }
    double phi_q() const { return impl_->phi_q; }
    const std::vector<ScaleRoot>& roots() const { return impl_->roots; }

    /// W^(q)(x); zero for x < 0, W(0) = W(0+).
    double w(double x) const {
        if (x < 0.0) return 0.0;
        if (impl_->backend == ScaleBackend::RationalClosedForm) return w_closed(x);
        return eval_numeric(impl_->numeric.w_itp, x, "w");
    }

    /// Z^(q)(x) = 1 + q int_0^x W; identically 1 for x <= 0.
    double z(double x) const { return 1.0 + impl_->q * w_bar(x); }

    double w_bar(double x) const {
        if (x <= 0.0) return 0.0;
        if (impl_->backend == ScaleBackend::RationalClosedForm) return wbar_closed(x);
        return eval_numeric(impl_->numeric.wbar_itp, x, "w_bar");
    }

    /// Zbar^(q)(x) = int_0^x Z; equals x for x <= 0.
    double z_bar(double x) const {
        if (x <= 0.0) return x;
        if (impl_->backend == ScaleBackend::RationalClosedForm) return zbar_closed(x);
        return x + eval_numeric(impl_->numeric.zbar_itp, x, "z_bar");
    }

    /// dW/dx for x > 0.
    double w_prime(double x) const {
        if (!(x > 0.0)) throw domain_error("w_prime: x must be > 0");
        if (impl_->backend == ScaleBackend::RationalClosedForm) return wprime_closed(x);
        if (x > impl_->x_max * (1.0 + 1e-12))
            throw domain_error("w_prime: query beyond cached grid");
        return impl_->numeric.w_itp->prime(std::min(x, impl_->numeric.xs.back()));
    }

    /// Computed W(0+).
    double w0_plus() const { return impl_->w0; }

    /// Computed limit of W' at 0+, from the partial-fraction synthesis.
    double w_prime0_plus() const {
        if (impl_->backend != ScaleBackend::RationalClosedForm)
            throw unsupported_error("w_prime0_plus: available on the closed-form backend only");
        std::complex<double> acc(0.0);
        for (const auto& r : impl_->roots) {
            acc += r.zeta * r.residues[0];
            if (r.multiplicity > 1) acc += r.residues[1];
        }
        return acc.real();
    }

private:
    static void build_closed_form(Impl& impl) {
        auto [num, den] = detail::rational_transform(impl.model, impl.q);
        auto raw_roots = detail::poly_roots(den);
        auto clusters = detail::cluster_roots(raw_roots);

        for (const auto& cl : clusters) {
            ScaleRoot root;
            root.zeta = cl.center;
            root.multiplicity = cl.multiplicity;
            auto q_taylor = detail::poly_taylor_c(detail::poly_deflate(den, cl.center, cl.multiplicity),
                                                  cl.center, cl.multiplicity);
            auto n_taylor = detail::poly_taylor(num, cl.center, cl.multiplicity);
            auto g = detail::series_divide(n_taylor, q_taylor, cl.multiplicity);
            root.residues.resize(std::size_t(cl.multiplicity));
            for (int i = 1; i <= cl.multiplicity; ++i)
                root.residues[std::size_t(i - 1)] = g[std::size_t(cl.multiplicity - i)];
            impl.roots.push_back(std::move(root));
        }

        // the synthesis must reproduce the transform and the initial value
        for (double off : {1.3, 3.1}) {
            std::complex<double> th(impl.phi_q + off, 0.0);
            std::complex<double> recon(0.0);
            for (const auto& r : impl.roots) {
                std::complex<double> d = th - r.zeta;
                std::complex<double> dp = d;
                for (int i = 1; i <= r.multiplicity; ++i) {
                    recon += r.residues[std::size_t(i - 1)] / dp;
                    dp *= d;
                }
            }
            double target = 1.0 / (laplace_exponent(impl.model, impl.phi_q + off) - impl.q);
            if (std::abs(recon - target) > 1e-8 * std::abs(target)) {
                std::ostringstream os;
                os << "ScaleSet: partial-fraction reconstruction off by "
                   << std::abs(recon - target) / std::abs(target)
                   << " (degree " << raw_roots.size() << ")";
                throw numeric_error(os.str());
            }
        }
    }

    void build_numeric(Impl& impl, int n_grid, const ScaleOptions& opts) {
        const double q = impl.q;
        const double phi_q = impl.phi_q;
        const double dpsi = impl.psi_d_phi;
        const LevyModel& m = impl.model;

        // pole-stripped transform; series expansion near the removable point
        const double near = 1e-5 * (1.0 + std::abs(phi_q));
        const double p2 = psi_second(m, phi_q);
        const double p3 = psi_third(m, phi_q);
        auto stripped = [&](std::complex<double> s) -> std::complex<double> {
            std::complex<double> h = s - phi_q;
            if (std::abs(h) < near) {
                double c0 = -p2 / (2.0 * dpsi * dpsi);
                double c1 = p2 * p2 / (4.0 * dpsi * dpsi * dpsi) - p3 / (6.0 * dpsi * dpsi);
                return c0 + h * c1;
            }
            return 1.0 / (laplace_exponent(m, s) - q) - 1.0 / (dpsi * h);
        };

        auto w_at = [&](double x) -> double {
            if (x == 0.0) return impl.w0;
            double rest;
            if (opts.algorithm == InversionAlgorithm::FixedTalbot) {
                rest = talbot_invert(stripped, x, opts.talbot_points);
            } else {
                rest = stehfest_invert(
                    [&](double s) { return stripped(std::complex<double>(s, 0.0)).real(); }, x,
                    opts.stehfest_terms);
            }
            return std::exp(phi_q * x) / dpsi + rest;
        };

        int n_intervals = std::max(n_grid - 1, 16);
        if (n_intervals % 2 != 0) ++n_intervals;

        std::vector<double> xs, wv;
        auto fill_grid = [&](int n) {
            std::vector<double> nxs(std::size_t(n) + 1), nwv(std::size_t(n) + 1);
            double h = impl.x_max / n;
            for (int j = 0; j <= n; ++j) {
                nxs[std::size_t(j)] = h * j;
                if (!xs.empty() && j % 2 == 0) {
                    nwv[std::size_t(j)] = wv[std::size_t(j / 2)]; // reuse coarse nodes
                } else {
                    nwv[std::size_t(j)] = w_at(nxs[std::size_t(j)]);
                }
            }
            xs = std::move(nxs);
            wv = std::move(nwv);
        };

        fill_grid(n_intervals);
        std::vector<double> wbar = cumulative_integral(xs, wv);
        std::vector<double> zv = wbar;
        for (std::size_t j = 0; j < zv.size(); ++j) zv[j] = 1.0 + q * wbar[j];
        std::vector<double> zbar_raw = cumulative_integral(xs, zv); // int_0^x Z - x handled below

        double prev_wbar = wbar.back(), prev_zbar = zbar_raw.back();
        int level = 0;
        for (; level < opts.max_refinements; ++level) {
            n_intervals *= 2;
            fill_grid(n_intervals);
            wbar = cumulative_integral(xs, wv);
            zv = wbar;
            for (std::size_t j = 0; j < zv.size(); ++j) zv[j] = 1.0 + q * wbar[j];
            zbar_raw = cumulative_integral(xs, zv);
            double dw = std::abs(wbar.back() - prev_wbar) / std::max(1.0, std::abs(wbar.back()));
            double dz = std::abs(zbar_raw.back() - prev_zbar) / std::max(1.0, std::abs(zbar_raw.back()));
            prev_wbar = wbar.back();
            prev_zbar = zbar_raw.back();
            if (dw < opts.effective_refine_tol() && dz < opts.effective_refine_tol()) break;
        }
        if (level == opts.max_refinements) {
            std::ostringstream os;
            os << "ScaleSet: antiderivative refinement did not reach "
               << opts.effective_refine_tol() << " after " << opts.max_refinements
               << " grid doublings (" << n_intervals << " intervals)";
            throw numeric_error(os.str());
        }

        // monotonicity guard: inversion artifacts show up here first
        for (std::size_t j = 1; j < wv.size(); ++j) {
            if (wv[j] < wv[j - 1] - 1e-9 * std::max(1.0, std::abs(wv[j]))) {
                std::ostringstream os;
                os << "ScaleSet: inverted W not monotone near x = " << xs[j]
                   << " (talbot_points=" << opts.talbot_points << ")";
                throw numeric_error(os.str());
            }
        }

        // Zbar stored without the leading x term (added back exactly at query
        // time, so the slope >= 1 structure survives interpolation)
        std::vector<double> zbar_excess(zbar_raw.size());
        for (std::size_t j = 0; j < zbar_raw.size(); ++j)
            zbar_excess[j] = zbar_raw[j] - xs[j];

        impl.numeric.xs = xs;
        impl.numeric.w_vals = wv;
        impl.numeric.wbar_vals = wbar;
        impl.numeric.zbar_vals = zbar_excess;
        auto xs1 = xs, xs2 = xs, xs3 = xs;
        auto w_copy = wv, wbar_copy = wbar, zbar_copy = zbar_excess;
        impl.numeric.w_itp.emplace(std::move(xs1), std::move(w_copy));
        impl.numeric.wbar_itp.emplace(std::move(xs2), std::move(wbar_copy));
        impl.numeric.zbar_itp.emplace(std::move(xs3), std::move(zbar_copy));
    }

    /// Fourth-order cumulative integral on a uniform grid: Simpson pairs at
    /// even nodes, a three-point half-panel rule at odd nodes.
    static std::vector<double> cumulative_integral(const std::vector<double>& xs,
                                                   const std::vector<double>& f) {
        const std::size_t n = xs.size();
        const double h = xs[1] - xs[0];
        std::vector<double> out(n, 0.0);
        for (std::size_t k = 2; k < n; k += 2)
            out[k] = out[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
        for (std::size_t k = 1; k < n; k += 2)
            out[k] = out[k - 1] + h / 12.0 * (5.0 * f[k - 1] + 8.0 * f[k] - f[k + 1]);
        return out;
    }

    double eval_numeric(const std::optional<boost::math::interpolators::pchip<std::vector<double>>>& itp,
                        double x, const char* what) const {
        if (x > impl_->x_max * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << what << ": x = " << x << " beyond cached grid [0, " << impl_->x_max
               << "] on the numeric backend";
            throw domain_error(os.str());
        }
        return (*itp)(std::min(x, impl_->numeric.xs.back()));
    }

    double w_closed(double x) const {
        std::complex<double> acc(0.0);
        for (const auto& r : impl_->roots) {
            std::complex<double> ex = std::exp(r.zeta * x);
            double xp = 1.0, fact = 1.0;
            for (int i = 1; i <= r.multiplicity; ++i) {
                acc += r.residues[std::size_t(i - 1)] * xp / fact * ex;
                xp *= x;
                fact *= i;
            }
        }
        return acc.real();
    }

    double wprime_closed(double x) const {
        std::complex<double> acc(0.0);
        for (const auto& r : impl_->roots) {
            std::complex<double> ex = std::exp(r.zeta * x);
            double xp = 1.0, fact = 1.0; // x^{i-1}, (i-1)!
            for (int i = 1; i <= r.multiplicity; ++i) {
                std::complex<double> dterm = r.zeta * xp;
                if (i > 1) dterm += double(i - 1) * xp / x;
                acc += r.residues[std::size_t(i - 1)] * dterm / fact * ex;
                xp *= x;
                fact *= i;
            }
        }
        return acc.real();
    }

    double wbar_closed(double x) const {
        std::complex<double> acc(0.0);
        for (const auto& r : impl_->roots) {
            double fact = 1.0;
            for (int i = 1; i <= r.multiplicity; ++i) {
                acc += r.residues[std::size_t(i - 1)] *
                       detail::exp_power_integral(i - 1, x, r.zeta) / fact;
                fact *= i;
            }
        }
        return acc.real();
    }

    double zbar_closed(double x) const {
        std::complex<double> acc(0.0);
        for (const auto& r : impl_->roots) {
            double fact = 1.0;
            for (int i = 1; i <= r.multiplicity; ++i) {
                std::complex<double> v =
                    x * detail::exp_power_integral(i - 1, x, r.zeta) -
                    detail::exp_power_integral(i, x, r.zeta);
                acc += r.residues[std::size_t(i - 1)] * v / fact;
                fact *= i;
            }
        }
        return x + impl_->q * acc.real();
    }

    std::shared_ptr<const Impl> impl_;
};

/// Spec-shaped convenience wrapper.
inline ScaleSet build_scale_set(const LevyModel& m, double q, double x_max, int n_grid,
                                ScaleOptions opts = {}) {
    return ScaleSet(m, q, x_max, n_grid, opts);
}

} // namespace levydiv
