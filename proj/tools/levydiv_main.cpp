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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "levydiv/dividend.hpp"
#include "levydiv/fluctuation.hpp"
#include "levydiv/json_io.hpp"
#include "levydiv/scale.hpp"
#include "levydiv/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerify = 4;

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// output sink: --out file or stdout
struct Sink {
    std::ofstream file;
    std::ostream* os = &std::cout;
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file.open(path);
            if (!file) throw levydiv::config_error("cannot open output file: " + path);
            os = &file;
        }
    }
    std::ostream& stream() { return *os; }
};

struct SimFlags {
    std::size_t paths = 0;   // 0: keep problem/default
    double dt = 0.0;         // 0: keep
    double horizon = 0.0;    // 0: auto
    std::uint64_t seed = 0;  // 0: keep
    bool seed_set = false;
    bool no_bridge = false;
    unsigned threads = 0;
};

levydiv::SimulationConfig merge_sim(const levydiv::ProblemSpec& ps, const SimFlags& f) {
    levydiv::SimulationConfig cfg = ps.sim;
    if (f.paths) cfg.n_paths = f.paths;
    if (f.dt > 0.0) cfg.dt = f.dt;
    if (f.horizon > 0.0) cfg.horizon = f.horizon;
    if (f.seed_set) cfg.seed = f.seed;
    if (f.no_bridge) cfg.bridge_correction = false;
    cfg.threads = f.threads;
    return cfg;
}

/// Horizon long enough that both the discounted-tail bias and the censoring
/// rule are comfortable: 20/q plus a multiple of the expected ruin time of
/// the reflected path, estimated from the q->0 scale function.
double auto_horizon(const levydiv::LevyModel& m, double q, double b, double x0) {
    double expected_ruin = 0.0;
    if (b > 0.0) {
        levydiv::ScaleSet s0(m, 1e-8, std::max(b, 1.0) * 1.001, 257);
        expected_ruin = s0.w_bar(b) - s0.w_bar(b - std::min(x0, b));
    }
    return 20.0 / q + 15.0 * std::max(expected_ruin, 1.0);
}

void print_warnings(const levydiv::LevyModel& m, double q,
                    const levydiv::SimulationConfig& cfg) {
    for (const auto& w : levydiv::simulation_warnings(m, q, cfg))
        std::cerr << "warning: " << w << "\n";
}

// ---------------------------------------------------------------------------

struct SolveArgs {
    std::string problem, out;
    double x_min = 0.0, x_max = -1.0;
    int x_steps = 21;
};

int cmd_solve(const SolveArgs& a) {
    auto ps = levydiv::load_problem(a.problem);
    levydiv::DividendProblem p(ps.model, ps.q, ps.s_terminal);
    double bs = p.b_star();

    std::cout << "b_star = " << fmt12(bs) << "\n";
    std::cout << "lambda_b_star = " << fmt12(levydiv::lambda_coeff(p, bs)) << "\n";

    double x_max = a.x_max >= 0.0 ? a.x_max : 2.0 * bs + 1.0;
    if (!(x_max > a.x_min)) throw levydiv::config_error("solve: x grid must be increasing");
    if (a.x_steps < 2) throw levydiv::config_error("solve: x-steps must be >= 2");

    Sink sink(a.out);
    auto& os = sink.stream();
    os << "x,V,Vprime\n";
    for (int i = 0; i < a.x_steps; ++i) {
        double x = a.x_min + (x_max - a.x_min) * i / (a.x_steps - 1);
        double v = levydiv::value_function(p, x);
        double vp;
        if (x > 0.0) {
            vp = levydiv::barrier_value_derivative(p, bs, x);
        } else if (bs > 0.0) {
            vp = -p.q() * levydiv::lambda_coeff(p, bs) * p.scale().w(bs) + p.scale().z(bs);
        } else {
            vp = 1.0;
        }
        os << fmt12(x) << ',' << fmt12(v) << ',' << fmt12(vp) << "\n";
    }
    return kExitOk;
}

struct TableArgs {
    std::string problem, out;
    double x_max = 5.0;
    int x_steps = 11;
};

int cmd_scale_table(const TableArgs& a) {
    auto ps = levydiv::load_problem(a.problem);
    if (!(a.x_max > 0.0)) throw levydiv::config_error("scale-table: x-max must be > 0");
    if (a.x_steps < 2) throw levydiv::config_error("scale-table: x-steps must be >= 2");
    levydiv::ScaleSet s(ps.model, ps.q, a.x_max, std::max(129, 2 * a.x_steps));

    Sink sink(a.out);
    auto& os = sink.stream();
    os << "x,W,Z,Wbar,Zbar\n";
    for (int i = 0; i < a.x_steps; ++i) {
        double x = a.x_max * i / (a.x_steps - 1);
        os << fmt12(x) << ',' << fmt12(s.w(x)) << ',' << fmt12(s.z(x)) << ','
           << fmt12(s.w_bar(x)) << ',' << fmt12(s.z_bar(x)) << "\n";
    }
    return kExitOk;
}

struct SimArgs {
    std::string problem, out;
    SimFlags flags;
};

int cmd_simulate(const SimArgs& a) {
    auto ps = levydiv::load_problem(a.problem);
    auto cfg = merge_sim(ps, a.flags);
    levydiv::DividendProblem p(ps.model, ps.q, ps.s_terminal);
    double b = ps.barrier.value_or(p.b_star());
    double x0 = ps.x0.value_or(b);
    if (a.flags.horizon <= 0.0 && !ps.horizon_from_json)
        cfg.horizon = auto_horizon(ps.model, ps.q, b, x0);
    print_warnings(ps.model, ps.q, cfg);

    auto r = levydiv::simulate_reflected(ps.model, b, x0, ps.q, cfg);
    auto value = r.combined(ps.s_terminal);

    nlohmann::ordered_json out;
    out["b"] = b;
    out["x0"] = x0;
    out["q"] = ps.q;
    out["S"] = ps.s_terminal;
    out["horizon"] = cfg.horizon;
    out["dt"] = cfg.dt;
    out["seed"] = cfg.seed;
    auto put = [&](const char* name, const levydiv::McEstimate& e) {
        out[name] = {{"mean", e.mean},
                     {"se", e.se},
                     {"n", e.n},
                     {"censored_fraction", r.censored_fraction}};
    };
    put("dividends", r.dividends);
    put("terminal", r.terminal);
    put("value", value);

    Sink sink(a.out);
    sink.stream() << out.dump(2) << "\n";
    return kExitOk;
}

struct VerifyArgs {
    std::string problem, out;
    SimFlags flags;
    int b_steps = 50;
    int x_steps = 50;
    bool corrupt_lambda_sign = false;
};

struct VerifyRow {
    std::string name;
    double analytic, mc, se;
    bool pass;
};

int cmd_verify(const VerifyArgs& a) {
    auto ps = levydiv::load_problem(a.problem);
    auto cfg = merge_sim(ps, a.flags);
    levydiv::DividendProblemOptions dopts;
    double target = levydiv::mean(ps.model) / ps.q - ps.s_terminal;
    dopts.x_max = std::max(10.0, 2.2 * std::max(target, 0.0) + 5.0); // covers the scan
    levydiv::DividendProblem p(ps.model, ps.q, ps.s_terminal, dopts);
    const auto& s = p.scale();
    double bs = p.b_star();
    double br = std::max(1.0, bs);
    if (a.flags.horizon <= 0.0 && !ps.horizon_from_json)
        cfg.horizon = auto_horizon(ps.model, ps.q, br, br / 2.0);
    print_warnings(ps.model, ps.q, cfg);

    std::vector<VerifyRow> rows;
    auto check3se = [&](const std::string& name, double analytic,
                        const levydiv::McEstimate& e) {
        rows.push_back({name, analytic, e.mean, e.se,
                        std::abs(analytic - e.mean) <= 3.0 * e.se + 1e-12});
    };

    // two-sided exits
    levydiv::ExitCorridor c{0.0, br, br / 2.0};
    auto mc_corr = levydiv::simulate_corridor(ps.model, c.a, c.b, c.x, ps.q, cfg);
    check3se("exit_down", levydiv::exit_down(s, c), mc_corr.exit_down);
    check3se("exit_up", levydiv::exit_up(s, c), mc_corr.exit_up);
    if (levydiv::has_jump_density(ps.model.jumps))
        check3se("overshoot_mass", levydiv::overshoot_upcross_mass(s, c),
                 mc_corr.up_by_jump);
    if (ps.model.sigma > 0.0)
        check3se("creep_up", levydiv::creep_up(s, c), mc_corr.up_by_creep);

    // reflected ruin transform and barrier value, at a generic barrier so the
    // Lambda(b) term is active (it vanishes at b*)
    double bv = std::max(0.8, 0.8 * br);
    double xv = bv / 2.0;
    auto mc_refl = levydiv::simulate_reflected(ps.model, bv, xv, ps.q, cfg);
    check3se("ruin_laplace", levydiv::ruin_laplace(s, bv, xv), mc_refl.terminal);

    double lam = levydiv::lambda_coeff(p, bv);
    if (a.corrupt_lambda_sign) lam = -lam; // fault-injection hook for tests
    double analytic_barrier = lam * s.z(bv - xv) - s.z_bar(bv - xv) + p.ex1() / p.q();
    check3se("barrier_value", analytic_barrier, mc_refl.combined(ps.s_terminal));

    // martingale drift
    std::vector<double> ts{0.5, 1.0, 2.0, 4.0};
    for (auto kind : {levydiv::MartingaleKind::ZScale, levydiv::MartingaleKind::WScale}) {
        auto res = levydiv::martingale_residual(s, c, kind, ts, cfg);
        double worst = 0.0, worst_se = 1.0;
        bool ok = true;
        for (const auto& r : res) {
            if (std::abs(r.residual) > std::abs(worst)) {
                worst = r.residual;
                worst_se = r.se;
            }
            ok = ok && std::abs(r.residual) <= 3.0 * r.se + 1e-12;
        }
        rows.push_back({kind == levydiv::MartingaleKind::ZScale ? "martingale_Z"
                                                                : "martingale_W",
                        0.0, worst, worst_se, ok});
    }

    // dominance of the optimal barrier (formula scan, no MC)
    double worst_gap = 0.0;
    double b_hi = std::max(2.0, 2.0 * bs);
    for (int i = 0; i <= a.b_steps; ++i) {
        double b = b_hi * i / a.b_steps;
        for (int j = 0; j <= a.x_steps; ++j) {
            double x = b_hi * j / a.x_steps;
            worst_gap = std::max(worst_gap,
                                 levydiv::barrier_value(p, b, x) -
                                     levydiv::value_function(p, x));
        }
    }
    rows.push_back({"dominance_scan", 0.0, worst_gap, 0.0, worst_gap <= 1e-8});

    Sink sink(a.out);
    auto& os = sink.stream();
    os << "identity,analytic,mc,se,verdict\n";
    bool all_pass = true;
    for (const auto& r : rows) {
        all_pass = all_pass && r.pass;
        os << r.name << ',' << fmt12(r.analytic) << ',' << fmt12(r.mc) << ','
           << fmt12(r.se) << ',' << (r.pass ? "PASS" : "FAIL") << "\n";
    }
    return all_pass ? kExitOk : kExitVerify;
}

void add_sim_flags(CLI::App* sub, SimFlags& f) {
    sub->add_option("--paths", f.paths, "Monte Carlo path count");
    sub->add_option("--dt", f.dt, "diffusion grid step");
    sub->add_option("--horizon", f.horizon, "time cutoff (default: derived from q and b)");
    sub->add_option("--seed", f.seed, "RNG seed")->each([&](const std::string&) {
        f.seed_set = true;
    });
    sub->add_flag("--no-bridge", f.no_bridge, "disable Brownian-bridge ruin correction");
    sub->add_option("--threads", f.threads, "worker threads (0: hardware)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"de Finetti barrier dividends for spectrally positive Levy models"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "optimal barrier and value table");
    solve->add_option("--problem", solve_args.problem, "problem JSON")->required();
    solve->add_option("--out", solve_args.out, "CSV output path (default stdout)");
    solve->add_option("--x-min", solve_args.x_min, "table start");
    solve->add_option("--x-max", solve_args.x_max, "table end (default 2 b* + 1)");
    solve->add_option("--x-steps", solve_args.x_steps, "table rows");

    TableArgs table_args;
    auto* table = app.add_subcommand("scale-table", "tabulate W, Z, Wbar, Zbar");
    table->add_option("--problem", table_args.problem, "problem JSON")->required();
    table->add_option("--out", table_args.out, "CSV output path (default stdout)");
    table->add_option("--x-max", table_args.x_max, "table end");
    table->add_option("--x-steps", table_args.x_steps, "table rows");

    SimArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "reflected-path Monte Carlo run");
    sim->add_option("--problem", sim_args.problem, "problem JSON")->required();
    sim->add_option("--out", sim_args.out, "JSON output path (default stdout)");
    add_sim_flags(sim, sim_args.flags);

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "cross-check formulas against simulation");
    verify->add_option("--problem", verify_args.problem, "problem JSON")->required();
    verify->add_option("--out", verify_args.out, "report output path (default stdout)");
    verify->add_option("--b-steps", verify_args.b_steps, "dominance scan barrier grid");
    verify->add_option("--x-steps", verify_args.x_steps, "dominance scan x grid");
    verify->add_flag("--corrupt-lambda-sign", verify_args.corrupt_lambda_sign)
        ->group(""); // test hook
    add_sim_flags(verify, verify_args.flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*solve) return cmd_solve(solve_args);
        if (*table) return cmd_scale_table(table_args);
        if (*sim) return cmd_simulate(sim_args);
        if (*verify) return cmd_verify(verify_args);
    } catch (const levydiv::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const levydiv::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
