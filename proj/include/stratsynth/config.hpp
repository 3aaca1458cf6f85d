// ============================================================================
// stratsynth/config.hpp — run configuration
// ============================================================================
//
// JSON config file. Unknown keys are rejected; defaults follow the standard
// synthesis setup (20 linear strategies from 800 stage-1 simulations, 300k
// stage-2 simulations, 10 s timeout).
//
// ============================================================================

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stratsynth/errors.hpp"

namespace stratsynth {

struct CliConfig {
    std::string catalog_path;
    std::vector<std::string> benchmark_dirs;
    std::string solver_command_template;
    std::string backend = "simulated";  // "simulated" or "external"
    std::int64_t timeout_ms = 10000;
    std::optional<std::int64_t> long_timeout_ms;
    int n_linear = 20;
    std::int64_t stage1_budget = 800;
    std::int64_t stage2_budget = 300000;
    double c_uct = 1.4142135623730951;
    double c_bandit = 1.4142135623730951;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string output_dir = "out";
    int sim_instances = 40;   // simulated backend without benchmark dirs
    std::int64_t p1_size = 250;

    bool operator==(const CliConfig& o) const = default;
};

inline nlohmann::json config_to_json(const CliConfig& c) {
    nlohmann::json j{{"catalog_path", c.catalog_path},
                     {"benchmark_dirs", c.benchmark_dirs},
                     {"solver_command_template", c.solver_command_template},
                     {"backend", c.backend},
                     {"timeout_ms", c.timeout_ms},
                     {"n_linear", c.n_linear},
                     {"stage1_budget", c.stage1_budget},
                     {"stage2_budget", c.stage2_budget},
                     {"c_uct", c.c_uct},
                     {"c_bandit", c.c_bandit},
                     {"seed", c.seed},
                     {"workers", c.workers},
                     {"output_dir", c.output_dir},
                     {"sim_instances", c.sim_instances},
                     {"p1_size", c.p1_size}};
    if (c.long_timeout_ms) j["long_timeout_ms"] = *c.long_timeout_ms;
    return j;
}

inline CliConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");

    static const std::vector<std::string> known = {
        "catalog_path", "benchmark_dirs", "solver_command_template", "backend",
        "timeout_ms",   "long_timeout_ms", "n_linear",               "stage1_budget",
        "stage2_budget", "c_uct",          "c_bandit",               "seed",
        "workers",      "output_dir",      "sim_instances",          "p1_size"};
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const std::string& k : known) ok = ok || k == key;
        if (!ok) throw ConfigError("config: unknown key \"" + key + "\"");
    }

    CliConfig c;
    try {
        c.catalog_path = j.value("catalog_path", c.catalog_path);
        if (j.contains("benchmark_dirs"))
            c.benchmark_dirs = j.at("benchmark_dirs").get<std::vector<std::string>>();
        c.solver_command_template =
            j.value("solver_command_template", c.solver_command_template);
        c.backend = j.value("backend", c.backend);
        c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
        if (j.contains("long_timeout_ms"))
            c.long_timeout_ms = j.at("long_timeout_ms").get<std::int64_t>();
        c.n_linear = j.value("n_linear", c.n_linear);
        c.stage1_budget = j.value("stage1_budget", c.stage1_budget);
        c.stage2_budget = j.value("stage2_budget", c.stage2_budget);
        c.c_uct = j.value("c_uct", c.c_uct);
        c.c_bandit = j.value("c_bandit", c.c_bandit);
        c.seed = j.value("seed", c.seed);
        c.workers = j.value("workers", c.workers);
        c.output_dir = j.value("output_dir", c.output_dir);
        c.sim_instances = j.value("sim_instances", c.sim_instances);
        c.p1_size = j.value("p1_size", c.p1_size);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    // Invariants.
    if (c.backend != "simulated" && c.backend != "external")
        throw ConfigError("config: backend must be \"simulated\" or \"external\"");
    if (c.catalog_path.empty()) throw ConfigError("config: catalog_path is required");
    if (c.timeout_ms <= 0) throw ConfigError("config: timeout_ms must be positive");
    if (c.long_timeout_ms && *c.long_timeout_ms <= c.timeout_ms)
        throw ConfigError("config: long_timeout_ms must exceed timeout_ms");
    if (c.n_linear < 1) throw ConfigError("config: n_linear must be >= 1");
    if (c.stage1_budget < 1 || c.stage2_budget < 1)
        throw ConfigError("config: budgets must be >= 1");
    if (c.c_uct <= 0 || c.c_bandit <= 0)
        throw ConfigError("config: exploration constants must be positive");
    if (c.workers < 1) throw ConfigError("config: workers must be >= 1");
    if (c.p1_size < 1) throw ConfigError("config: p1_size must be >= 1");
    if (c.backend == "external") {
        if (c.solver_command_template.empty())
            throw ConfigError("config: external backend requires solver_command_template");
        if (c.benchmark_dirs.empty())
            throw ConfigError("config: external backend requires benchmark_dirs");
    }
    if (c.backend == "simulated" && c.benchmark_dirs.empty() && c.sim_instances < 1)
        throw ConfigError("config: sim_instances must be >= 1");
    return c;
}

// Referenced paths must exist at load time; the output directory is created
// later, so it is not checked.
inline CliConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    CliConfig c = config_from_json(j);
    if (!std::filesystem::exists(c.catalog_path))
        throw ConfigError("config: catalog_path does not exist: " + c.catalog_path);
    for (const std::string& dir : c.benchmark_dirs)
        if (!std::filesystem::is_directory(dir))
            throw ConfigError("config: benchmark dir does not exist: " + dir);
    return c;
}

}  // namespace stratsynth
