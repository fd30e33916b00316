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

#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "levydiv/errors.hpp"
#include "levydiv/levy_model.hpp"
#include "levydiv/simulate.hpp"

namespace levydiv {

/// Configuration errors from problem documents and flags.
struct config_error : error {
    explicit config_error(const std::string& msg) : error(msg) {}
};

namespace detail {

inline double require_number(const nlohmann::json& j, const char* key, const char* ctx) {
    if (!j.contains(key))
        throw config_error(std::string(ctx) + ": missing required field \"" + key + "\"");
    if (!j.at(key).is_number())
        throw config_error(std::string(ctx) + ": field \"" + key + "\" must be a number");
    return j.at(key).get<double>();
}

} // namespace detail

/// Parses {"drift": c, "sigma": s, "jumps": {"family": ..., ...}}.
/// Families: "exp_cp" {lambda, mu}, "erlang_cp" {lambda, k, scale},
/// "gamma" {shape, scale, eps}, "none" {}.
inline LevyModel model_from_json(const nlohmann::json& j) {
    LevyModel m;
    m.drift = detail::require_number(j, "drift", "model");
    m.sigma = detail::require_number(j, "sigma", "model");
    if (!j.contains("jumps") || !j.at("jumps").is_object())
        throw config_error("model: missing \"jumps\" object");
    const auto& jj = j.at("jumps");
    if (!jj.contains("family") || !jj.at("family").is_string())
        throw config_error("model: jumps.family must be a string");
    std::string family = jj.at("family").get<std::string>();
    if (family == "exp_cp") {
        m.jumps = ExpJumps{detail::require_number(jj, "lambda", "jumps"),
                           detail::require_number(jj, "mu", "jumps")};
    } else if (family == "erlang_cp") {
        double k = detail::require_number(jj, "k", "jumps");
        if (k != std::floor(k) || k < 1)
            throw config_error("jumps: Erlang shape k must be a positive integer");
        m.jumps = ErlangJumps{detail::require_number(jj, "lambda", "jumps"), int(k),
                              detail::require_number(jj, "scale", "jumps")};
    } else if (family == "gamma") {
        m.jumps = GammaJumps{detail::require_number(jj, "shape", "jumps"),
                             detail::require_number(jj, "scale", "jumps"),
                             detail::require_number(jj, "eps", "jumps")};
    } else if (family == "none") {
        m.jumps = NoJumps{};
    } else {
        throw config_error("jumps: unknown family \"" + family +
                           "\" (expected exp_cp, erlang_cp, gamma, or none)");
    }
    return m;
}

/// One problem document drives every subcommand:
///   {"model": {...}, "q": 0.1, "S": 0.0, "simulation": {...}?}
/// The optional simulation block carries dt/horizon/paths/seed/bridge plus the
/// reflected-run geometry x0/b; command-line flags override it.
struct ProblemSpec {
    LevyModel model;
    double q = 0.0;
    double s_terminal = 0.0;
    SimulationConfig sim;
    bool horizon_from_json = false;
    std::optional<double> x0;
    std::optional<double> barrier;
};

inline ProblemSpec problem_from_json(const nlohmann::json& j) {
    ProblemSpec p;
    if (!j.contains("model") || !j.at("model").is_object())
        throw config_error("problem: missing \"model\" object");
    p.model = model_from_json(j.at("model"));
    p.q = detail::require_number(j, "q", "problem");
    if (!(p.q > 0.0)) throw config_error("problem: q must be > 0");
    if (j.contains("S")) p.s_terminal = detail::require_number(j, "S", "problem");
    if (j.contains("simulation")) {
        const auto& s = j.at("simulation");
        if (!s.is_object()) throw config_error("problem: \"simulation\" must be an object");
        if (s.contains("dt")) p.sim.dt = detail::require_number(s, "dt", "simulation");
        if (s.contains("horizon")) {
            p.sim.horizon = detail::require_number(s, "horizon", "simulation");
            p.horizon_from_json = true;
        }
        if (s.contains("paths"))
            p.sim.n_paths =
                std::size_t(detail::require_number(s, "paths", "simulation"));
        if (s.contains("seed"))
            p.sim.seed = std::uint64_t(detail::require_number(s, "seed", "simulation"));
        if (s.contains("bridge")) {
            if (!s.at("bridge").is_boolean())
                throw config_error("simulation: \"bridge\" must be a boolean");
            p.sim.bridge_correction = s.at("bridge").get<bool>();
        }
        if (s.contains("x0")) p.x0 = detail::require_number(s, "x0", "simulation");
        if (s.contains("b")) p.barrier = detail::require_number(s, "b", "simulation");
    }
    return p;
}

/// Loads and parses a problem file. Parse failures surface the line/column
/// diagnostic from the JSON parser as config_error.
inline ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open problem file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("problem file ") + path + ": " + e.what());
    }
    return problem_from_json(j);
}

} // namespace levydiv
