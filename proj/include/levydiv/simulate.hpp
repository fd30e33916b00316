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
#include <atomic>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/special_functions/expint.hpp>

#include "levydiv/detail/rootfind.hpp"
#include "levydiv/errors.hpp"
#include "levydiv/levy_model.hpp"
#include "levydiv/rng.hpp"

namespace levydiv {

struct SimulationConfig {
    double dt = 1e-3;        // diffusion/monitoring grid step
    double horizon = 200.0;  // hard time cutoff; paths alive past it are censored
    std::size_t n_paths = 10000;
    std::uint64_t seed = 20260811;
    bool bridge_correction = true; // Brownian-bridge ruin detection when sigma > 0
    unsigned threads = 0;          // 0: hardware concurrency
};

struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

inline void validate_config(const SimulationConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw domain_error("simulate: dt must be > 0");
    if (!(cfg.horizon > 0.0)) throw domain_error("simulate: horizon must be > 0");
    if (cfg.n_paths < 1) throw domain_error("simulate: n_paths must be >= 1");
}

namespace detail {

// --- jump sampling ------------------------------------------------------------

class JumpSampler {
public:
    explicit JumpSampler(const JumpSpec& spec) : spec_(spec) {
        if (const auto* g = std::get_if<GammaJumps>(&spec_)) {
            z_eps_ = g->trunc_eps / g->scale;
            e1_eps_ = boost::math::expint(1, z_eps_);
            rate_ = g->shape * e1_eps_;
            compensation_ = g->shape * g->scale * (1.0 - std::exp(-z_eps_));
        } else {
            rate_ = levy_mass(spec_);
            compensation_ = 0.0;
        }
    }

    double rate() const { return rate_; }

    /// Mean mass per unit time of the jumps folded into the drift
    /// (gamma truncation only).
    double drift_compensation() const { return compensation_; }

    double sample(PathRng& rng) const {
        if (const auto* e = std::get_if<ExpJumps>(&spec_))
            return -std::log(rng.uniform()) / e->mu;
        if (const auto* er = std::get_if<ErlangJumps>(&spec_)) {
            double acc = 0.0;
            for (int i = 0; i < er->shape; ++i) acc += -std::log(rng.uniform());
            return acc * er->scale;
        }
        if (const auto* g = std::get_if<GammaJumps>(&spec_)) return sample_gamma(*g, rng);
        throw unsupported_error("JumpSampler: model has no jumps");
    }

private:
    // Inverse-CDF sampling of the truncated gamma Levy density
    // shape * x^{-1} e^{-x/scale} on [eps, inf): solve E1(z) = u E1(eps/scale)
    // with a bracketed Newton iteration on log E1.
    double sample_gamma(const GammaJumps& g, PathRng& rng) const {
        double target = rng.uniform() * e1_eps_;
        double lo = z_eps_;
        double hi = std::max(2.0 * z_eps_, 1.0);
        while (boost::math::expint(1, hi) > target) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e4) throw numeric_error("gamma jump sampling: tail bracket blew up");
        }
        double z = 0.5 * (lo + hi);
        for (int it = 0; it < 80; ++it) {
            double e1 = boost::math::expint(1, z);
            (e1 >= target ? lo : hi) = z;
            // Newton step on log E1(z) - log(target)
            double step = std::log(e1 / target) * z * e1 * std::exp(z);
            double zn = z + step;
            if (!(zn > lo && zn < hi)) zn = 0.5 * (lo + hi);
            if (std::abs(zn - z) <= 1e-13 * (1.0 + zn)) {
                z = zn;
                break;
            }
            z = zn;
        }
        return z * g.scale;
    }

    JumpSpec spec_;
    double rate_ = 0.0;
    double compensation_ = 0.0;
    double z_eps_ = 0.0, e1_eps_ = 0.0;
};

struct Dynamics {
    double c_eff;  // downward drift rate of the continuous part
    double sigma;
    double rate;   // jump intensity (truncated for gamma)
    JumpSampler sampler;

    explicit Dynamics(const LevyModel& m)
        : c_eff(m.drift), sigma(m.sigma), sampler(m.jumps) {
        c_eff -= sampler.drift_compensation();
        rate = sampler.rate();
    }

    /// Between events the path is an exact straight line: no grid needed.
    bool event_driven() const { return sigma == 0.0 && c_eff > 0.0; }
};

// --- deterministic reduction ---------------------------------------------------

inline McEstimate reduce_estimate(const std::vector<double>& v) {
    McEstimate e;
    e.n = v.size();
    if (e.n == 0) return e;
    e.mean = pairwise_sum(v.data(), v.size()) / double(e.n);
    if (e.n > 1) {
        std::vector<double> sq(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double d = v[i] - e.mean;
            sq[i] = d * d;
        }
        double ssd = pairwise_sum(sq.data(), sq.size());
        e.se = std::sqrt(ssd / double(e.n - 1) / double(e.n));
    }
    return e;
}

template <class Fn>
void run_paths(std::size_t n, unsigned threads, Fn&& per_path) {
    unsigned t = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    t = unsigned(std::min<std::size_t>(t, n));
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) per_path(i);
        return;
    }
    std::vector<std::exception_ptr> errors(t);
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned w = 0; w < t; ++w) {
        std::size_t begin = n * w / t, end = n * (w + 1) / t;
        pool.emplace_back([&, w, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) per_path(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

inline void check_censoring(std::size_t censored, std::size_t n, const SimulationConfig& cfg,
                            const char* what) {
    double frac = double(censored) / double(n);
    if (frac > 0.01) {
        std::ostringstream os;
        os << what << ": " << frac * 100.0 << "% of paths censored at horizon "
           << cfg.horizon << " (limit 1%); extend the horizon";
        throw numeric_error(os.str());
    }
}

} // namespace detail

/// Advisory checks on the discretization (the library never prints; callers
/// surface these).
inline std::vector<std::string> simulation_warnings(const LevyModel& m, double q,
                                                    const SimulationConfig& cfg) {
    std::vector<std::string> out;
    detail::JumpSampler sampler(m.jumps);
    if (m.sigma > 0.0 && sampler.rate() * cfg.dt > 0.1) {
        std::ostringstream os;
        os << "jump intensity * dt = " << sampler.rate() * cfg.dt
           << " > 0.1; grid may straddle several jumps";
        out.push_back(os.str());
    }
    if (cfg.horizon * q < 20.0) {
        std::ostringstream os;
        os << "horizon * q = " << cfg.horizon * q
           << " < 20; discounted-tail truncation may be visible";
        out.push_back(os.str());
    }
    return out;
}

// --- reflected process: barrier dividends until ruin ---------------------------

/// Estimates of the discounted dividend stream int_0^tau e^{-qt} dL and the
/// discounted ruin indicator e^{-q tau} for the process reflected at b,
/// started at x0. combined(S) returns the estimate of the sum
/// dividends + S * e^{-q tau} with the per-path covariance accounted for.
class ReflectedResult {
public:
    McEstimate dividends;
    McEstimate terminal;
    double censored_fraction = 0.0;

    McEstimate combined(double s_terminal) const {
        std::vector<double> v(div_->size());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = (*div_)[i] + s_terminal * (*term_)[i];
        return detail::reduce_estimate(v);
    }

    ReflectedResult(std::shared_ptr<const std::vector<double>> d,
                    std::shared_ptr<const std::vector<double>> t, double censored)
        : censored_fraction(censored), div_(std::move(d)), term_(std::move(t)) {
        dividends = detail::reduce_estimate(*div_);
        terminal = detail::reduce_estimate(*term_);
    }

private:
    std::shared_ptr<const std::vector<double>> div_, term_;
};

namespace detail {

struct ReflectedPathOut {
    double div = 0.0;
    double term = 0.0;
    bool censored = false;
};

inline ReflectedPathOut reflected_path(const Dynamics& dyn, double b, double x0, double q,
                                       const SimulationConfig& cfg, PathRng& rng) {
    ReflectedPathOut out;
    double t = 0.0, u = x0;
    if (u > b) {
        out.div += u - b; // lump at time zero, undiscounted
        u = b;
    }
    if (u <= 0.0) {
        out.term = 1.0;
        return out;
    }

    if (dyn.event_driven()) {
        for (;;) {
            double tj = t + rng.exponential(dyn.rate);
            double t_ruin = t + u / dyn.c_eff;
            if (t_ruin <= tj) {
                if (t_ruin > cfg.horizon) {
                    out.censored = true;
                    return out;
                }
                out.term = std::exp(-q * t_ruin);
                return out;
            }
            if (tj > cfg.horizon) {
                out.censored = true;
                return out;
            }
            u -= dyn.c_eff * (tj - t);
            t = tj;
            u += dyn.sampler.sample(rng);
            if (u > b) {
                out.div += (u - b) * std::exp(-q * t);
                u = b;
            }
        }
    }

    // grid stepping (sigma > 0, or upward-drifting continuous part)
    const double sig2 = dyn.sigma * dyn.sigma;
    double tj = dyn.rate > 0.0 ? t + rng.exponential(dyn.rate)
                               : std::numeric_limits<double>::infinity();
    std::uint64_t kgrid = 1;
    double tg = cfg.dt;
    for (;;) {
        double tn = std::min({tj, tg, cfg.horizon});
        double delta = tn - t;
        double un = u;
        if (delta > 0.0) {
            un -= dyn.c_eff * delta;
            if (dyn.sigma > 0.0) un += dyn.sigma * std::sqrt(delta) * rng.normal();
            if (un <= 0.0) {
                double tau = t + delta * u / (u - un);
                out.term = std::exp(-q * tau);
                return out;
            }
            if (dyn.sigma > 0.0 && cfg.bridge_correction) {
                double expo = 2.0 * u * un / (sig2 * delta);
                if (expo < 40.0 && rng.uniform() < std::exp(-expo)) {
                    double tau = t + delta * u / (u + un);
                    out.term = std::exp(-q * tau);
                    return out;
                }
            }
            if (dyn.sigma > 0.0 && cfg.bridge_correction) {
                // exact running maximum of the Brownian bridge across the
                // step; paying its excess removes the sub-grid reflection
                // undercount (single-excursion approximation)
                double expo = 2.0 * (b - u) * (b - un) / (sig2 * delta);
                if (un > b || expo < 40.0) {
                    double d = un - u;
                    double m = 0.5 * (u + un +
                                      std::sqrt(d * d - 2.0 * sig2 * delta *
                                                            std::log(rng.uniform())));
                    if (m > b) {
                        double tc;
                        if (un > b) {
                            tc = un > u ? t + delta * (b - u) / (un - u) : t;
                        } else {
                            tc = t + delta * (b - u) / ((b - u) + (b - un));
                        }
                        if (!(tc >= t && tc <= tn)) tc = tn;
                        out.div += (m - b) * std::exp(-q * tc);
                        un -= m - b;
                        if (un <= 0.0) { // regulator pushed the path to zero
                            out.term = std::exp(-q * tn);
                            return out;
                        }
                    }
                }
            } else if (un > b) {
                double tc = un > u ? t + delta * (b - u) / (un - u) : tn;
                out.div += (un - b) * std::exp(-q * tc);
                un = b;
            }
        }
        t = tn;
        u = un;
        if (t >= cfg.horizon) {
            out.censored = true;
            return out;
        }
        if (t == tj) {
            u += dyn.sampler.sample(rng);
            if (u > b) {
                out.div += (u - b) * std::exp(-q * t);
                u = b;
            }
            tj = t + rng.exponential(dyn.rate);
        }
        if (t == tg) tg = double(++kgrid) * cfg.dt;
    }
}

} // namespace detail

inline ReflectedResult simulate_reflected(const LevyModel& m, double b, double x0, double q,
                                          const SimulationConfig& cfg) {
    validate(m);
    validate_config(cfg);
    if (b < 0.0) throw domain_error("simulate_reflected: b must be >= 0");
    if (x0 < 0.0) throw domain_error("simulate_reflected: x0 must be >= 0");
    if (!(q > 0.0)) throw domain_error("simulate_reflected: q must be > 0");

    detail::Dynamics dyn(m);
    auto div = std::make_shared<std::vector<double>>(cfg.n_paths);
    auto term = std::make_shared<std::vector<double>>(cfg.n_paths);
    std::atomic<std::size_t> censored{0};
    detail::run_paths(cfg.n_paths, cfg.threads, [&](std::size_t i) {
        PathRng rng(cfg.seed, i);
        auto out = detail::reflected_path(dyn, b, x0, q, cfg, rng);
        (*div)[i] = out.div;
        (*term)[i] = out.term;
        if (out.censored) censored.fetch_add(1, std::memory_order_relaxed);
    });
    detail::check_censoring(censored.load(), cfg.n_paths, cfg, "simulate_reflected");
    return ReflectedResult(div, term, double(censored.load()) / double(cfg.n_paths));
}

// --- corridor exit problems -----------------------------------------------------

enum class ExitClass { DownFirst, UpByJump, UpByCreep, Censored };

struct CorridorOptions {
    bool collect_overshoots = false;
    std::vector<double> monitor_times;                // nondecreasing, <= horizon
    std::function<double(double, double)> monitor_fn; // F(t^tau, X(t^tau)) per monitor
};

struct CorridorResult {
    McEstimate exit_down;    // E[e^{-q tau} 1{down first}]
    McEstimate exit_up;      // E[e^{-q tau} 1{up first}]
    McEstimate up_by_jump;   // jump part of exit_up
    McEstimate up_by_creep;  // continuous part of exit_up
    double censored_fraction = 0.0;
    std::size_t n_down = 0, n_up_jump = 0, n_up_creep = 0, n_censored = 0;
    std::vector<std::pair<double, double>> overshoots; // (X(tau-), X(tau)) at jump exits
    std::vector<McEstimate> monitor_stats;             // one per monitor time
};

namespace detail {

struct CorridorPathOut {
    ExitClass cls = ExitClass::Censored;
    double tau = 0.0;
    double x_pre = 0.0, x_post = 0.0;
};

template <class MonitorSink>
CorridorPathOut corridor_path(const Dynamics& dyn, double a, double b, double x0,
                              const SimulationConfig& cfg,
                              const std::vector<double>& monitors, MonitorSink&& monitor_sink,
                              PathRng& rng) {
    CorridorPathOut out;
    double t = 0.0, x = x0;
    std::size_t mon = 0;

    auto freeze_monitors = [&](double tau, double x_tau) {
        for (; mon < monitors.size(); ++mon) monitor_sink(mon, tau, x_tau);
    };

    if (dyn.event_driven()) {
        for (;;) {
            double tj = t + rng.exponential(dyn.rate);
            double t_hit = t + (x - a) / dyn.c_eff;
            double t_path = std::min(tj, t_hit);
            while (mon < monitors.size() && monitors[mon] <= std::min(t_path, cfg.horizon)) {
                double tm = monitors[mon];
                monitor_sink(mon, tm, x - dyn.c_eff * (tm - t));
                ++mon;
            }
            if (t_hit <= tj) {
                if (t_hit > cfg.horizon) return out; // censored
                out.cls = ExitClass::DownFirst;
                out.tau = t_hit;
                out.x_pre = a;
                out.x_post = a;
                freeze_monitors(t_hit, a);
                return out;
            }
            if (tj > cfg.horizon) return out;
            x -= dyn.c_eff * (tj - t);
            t = tj;
            double pre = x;
            x += dyn.sampler.sample(rng);
            if (x > b) {
                out.cls = ExitClass::UpByJump;
                out.tau = t;
                out.x_pre = pre;
                out.x_post = x;
                freeze_monitors(t, x);
                return out;
            }
        }
    }

    const double sig2 = dyn.sigma * dyn.sigma;
    double tj = dyn.rate > 0.0 ? t + rng.exponential(dyn.rate)
                               : std::numeric_limits<double>::infinity();
    std::uint64_t kgrid = 1;
    double tg = cfg.dt;
    for (;;) {
        double tmon = mon < monitors.size() ? monitors[mon]
                                            : std::numeric_limits<double>::infinity();
        double tn = std::min({tj, tg, tmon, cfg.horizon});
        double delta = tn - t;
        double xn = x;
        if (delta > 0.0) {
            xn -= dyn.c_eff * delta;
            if (dyn.sigma > 0.0) xn += dyn.sigma * std::sqrt(delta) * rng.normal();
            if (xn <= a) {
                double tau = t + delta * (x - a) / (x - xn);
                out.cls = ExitClass::DownFirst;
                out.tau = tau;
                out.x_pre = a;
                out.x_post = a;
                freeze_monitors(tau, a);
                return out;
            }
            if (dyn.sigma > 0.0 && cfg.bridge_correction) {
                double expo = 2.0 * (x - a) * (xn - a) / (sig2 * delta);
                if (expo < 40.0 && rng.uniform() < std::exp(-expo)) {
                    double tau = t + delta * (x - a) / ((x - a) + (xn - a));
                    out.cls = ExitClass::DownFirst;
                    out.tau = tau;
                    out.x_pre = a;
                    out.x_post = a;
                    freeze_monitors(tau, a);
                    return out;
                }
            }
            if (xn >= b) {
                double tau = xn > x ? t + delta * (b - x) / (xn - x) : tn;
                out.cls = ExitClass::UpByCreep;
                out.tau = tau;
                out.x_pre = b;
                out.x_post = b;
                freeze_monitors(tau, b);
                return out;
            }
            // sub-grid excursions above b are creep exits too; same bridge
            // correction as the lower barrier, mirrored
            if (dyn.sigma > 0.0 && cfg.bridge_correction) {
                double expo = 2.0 * (b - x) * (b - xn) / (sig2 * delta);
                if (expo < 40.0 && rng.uniform() < std::exp(-expo)) {
                    double tau = t + delta * (b - x) / ((b - x) + (b - xn));
                    out.cls = ExitClass::UpByCreep;
                    out.tau = tau;
                    out.x_pre = b;
                    out.x_post = b;
                    freeze_monitors(tau, b);
                    return out;
                }
            }
        }
        t = tn;
        x = xn;
        if (t == tmon) {
            monitor_sink(mon, t, x);
            ++mon;
        }
        if (t >= cfg.horizon) return out;
        if (t == tj) {
            double pre = x;
            x += dyn.sampler.sample(rng);
            if (x > b) {
                out.cls = ExitClass::UpByJump;
                out.tau = t;
                out.x_pre = pre;
                out.x_post = x;
                freeze_monitors(t, x);
                return out;
            }
            tj = t + rng.exponential(dyn.rate);
        }
        if (t == tg) tg = double(++kgrid) * cfg.dt;
    }
}

} // namespace detail

inline CorridorResult simulate_corridor(const LevyModel& m, double a, double b, double x0,
                                        double q, const SimulationConfig& cfg,
                                        const CorridorOptions& opts = {}) {
    validate(m);
    validate_config(cfg);
    if (!(a < x0 && x0 < b)) throw domain_error("simulate_corridor: requires a < x0 < b");
    if (!(q >= 0.0)) throw domain_error("simulate_corridor: q must be >= 0");
    if (!opts.monitor_times.empty()) {
        if (!opts.monitor_fn)
            throw domain_error("simulate_corridor: monitor_times without monitor_fn");
        if (!std::is_sorted(opts.monitor_times.begin(), opts.monitor_times.end()))
            throw domain_error("simulate_corridor: monitor_times must be nondecreasing");
        if (opts.monitor_times.back() > cfg.horizon)
            throw domain_error("simulate_corridor: monitor_times must not exceed horizon");
    }

    detail::Dynamics dyn(m);
    const std::size_t n = cfg.n_paths;
    const std::size_t n_mon = opts.monitor_times.size();
    std::vector<double> v_down(n), v_up(n), v_jump(n), v_creep(n);
    std::vector<double> monitor_vals(n * n_mon, 0.0);
    std::vector<std::uint8_t> cls(n);
    std::vector<std::pair<double, double>> over(opts.collect_overshoots
                                                    ? n
                                                    : std::size_t(0));

    detail::run_paths(n, cfg.threads, [&](std::size_t i) {
        PathRng rng(cfg.seed, i);
        auto sink = [&](std::size_t k, double tk, double xk) {
            if (n_mon) monitor_vals[i * n_mon + k] = opts.monitor_fn(tk, xk);
        };
        auto out = detail::corridor_path(dyn, a, b, x0, cfg, opts.monitor_times, sink, rng);
        double disc = std::exp(-q * out.tau);
        v_down[i] = out.cls == ExitClass::DownFirst ? disc : 0.0;
        v_jump[i] = out.cls == ExitClass::UpByJump ? disc : 0.0;
        v_creep[i] = out.cls == ExitClass::UpByCreep ? disc : 0.0;
        v_up[i] = v_jump[i] + v_creep[i];
        cls[i] = std::uint8_t(out.cls);
        if (opts.collect_overshoots)
            over[i] = out.cls == ExitClass::UpByJump
                          ? std::make_pair(out.x_pre, out.x_post)
                          : std::make_pair(-1.0, -1.0);
    });

    CorridorResult res;
    res.exit_down = detail::reduce_estimate(v_down);
    res.exit_up = detail::reduce_estimate(v_up);
    res.up_by_jump = detail::reduce_estimate(v_jump);
    res.up_by_creep = detail::reduce_estimate(v_creep);
    for (std::size_t i = 0; i < n; ++i) {
        switch (ExitClass(cls[i])) {
            case ExitClass::DownFirst: ++res.n_down; break;
            case ExitClass::UpByJump: ++res.n_up_jump; break;
            case ExitClass::UpByCreep: ++res.n_up_creep; break;
            case ExitClass::Censored: ++res.n_censored; break;
        }
    }
    res.censored_fraction = double(res.n_censored) / double(n);
    if (opts.collect_overshoots) {
        res.overshoots.reserve(res.n_up_jump);
        for (std::size_t i = 0; i < n; ++i)
            if (ExitClass(cls[i]) == ExitClass::UpByJump) res.overshoots.push_back(over[i]);
    }
    if (n_mon) {
        res.monitor_stats.resize(n_mon);
        std::vector<double> col(n);
        for (std::size_t k = 0; k < n_mon; ++k) {
            for (std::size_t i = 0; i < n; ++i) col[i] = monitor_vals[i * n_mon + k];
            res.monitor_stats[k] = detail::reduce_estimate(col);
        }
    }
    detail::check_censoring(res.n_censored, n, cfg, "simulate_corridor");
    return res;
}

// --- general admissible strategies ----------------------------------------------

/// Maps (surplus, time) to the dividend lump to pay now; must lie in
/// [0, surplus]. Consulted at t=0, at every jump time, and on the dt grid.
using Strategy = std::function<double(double surplus, double t)>;

struct StrategyResult {
    McEstimate value; // estimate of E[int e^{-qt} dL + S e^{-q tau}]
    double censored_fraction = 0.0;
};

namespace detail {

struct StrategyPathOut {
    double value = 0.0;
    bool censored = false;
};

inline StrategyPathOut strategy_path(const Dynamics& dyn, const Strategy& strat, double x0,
                                     double q, double s_terminal, const SimulationConfig& cfg,
                                     PathRng& rng) {
    StrategyPathOut out;
    double t = 0.0, u = x0;

    auto consult = [&](double tn) -> bool { // returns true if ruined by the lump
        double lump = strat(u, tn);
        if (!(lump >= -1e-12) || lump > u * (1.0 + 1e-9) + 1e-12) {
            std::ostringstream os;
            os << "strategy: inadmissible lump " << lump << " with surplus " << u
               << " at t = " << tn;
            throw strategy_error(os.str());
        }
        lump = std::clamp(lump, 0.0, u);
        if (lump > 0.0) {
            out.value += lump * std::exp(-q * tn);
            u -= lump;
        }
        if (u <= 0.0) {
            out.value += s_terminal * std::exp(-q * tn);
            return true;
        }
        return false;
    };

    if (consult(0.0)) return out;

    const double sig2 = dyn.sigma * dyn.sigma;
    double tj = dyn.rate > 0.0 ? t + rng.exponential(dyn.rate)
                               : std::numeric_limits<double>::infinity();
    std::uint64_t kgrid = 1;
    double tg = cfg.dt;
    for (;;) {
        double tn = std::min({tj, tg, cfg.horizon});
        double delta = tn - t;
        double un = u;
        if (delta > 0.0) {
            un -= dyn.c_eff * delta;
            if (dyn.sigma > 0.0) un += dyn.sigma * std::sqrt(delta) * rng.normal();
            if (un <= 0.0) {
                double tau = t + delta * u / (u - un);
                out.value += s_terminal * std::exp(-q * tau);
                return out;
            }
            if (dyn.sigma > 0.0 && cfg.bridge_correction) {
                double expo = 2.0 * u * un / (sig2 * delta);
                if (expo < 40.0 && rng.uniform() < std::exp(-expo)) {
                    double tau = t + delta * u / (u + un);
                    out.value += s_terminal * std::exp(-q * tau);
                    return out;
                }
            }
        }
        t = tn;
        u = un;
        if (t >= cfg.horizon) {
            out.censored = true;
            return out;
        }
        if (t == tj) {
            u += dyn.sampler.sample(rng);
            if (consult(t)) return out;
            tj = t + rng.exponential(dyn.rate);
        }
        if (t == tg) {
            if (consult(t)) return out;
            tg = double(++kgrid) * cfg.dt;
        }
    }
}

} // namespace detail

inline StrategyResult simulate_dual_strategy(const LevyModel& m, const Strategy& strat,
                                             double x0, double q, double s_terminal,
                                             const SimulationConfig& cfg) {
    validate(m);
    validate_config(cfg);
    if (x0 < 0.0) throw domain_error("simulate_dual_strategy: x0 must be >= 0");
    if (!(q > 0.0)) throw domain_error("simulate_dual_strategy: q must be > 0");

    detail::Dynamics dyn(m);
    std::vector<double> vals(cfg.n_paths);
    std::atomic<std::size_t> censored{0};
    detail::run_paths(cfg.n_paths, cfg.threads, [&](std::size_t i) {
        PathRng rng(cfg.seed, i);
        auto out = detail::strategy_path(dyn, strat, x0, q, s_terminal, cfg, rng);
        vals[i] = out.value;
        if (out.censored) censored.fetch_add(1, std::memory_order_relaxed);
    });
    detail::check_censoring(censored.load(), cfg.n_paths, cfg, "simulate_dual_strategy");
    StrategyResult res;
    res.value = detail::reduce_estimate(vals);
    res.censored_fraction = double(censored.load()) / double(cfg.n_paths);
    return res;
}

} // namespace levydiv
