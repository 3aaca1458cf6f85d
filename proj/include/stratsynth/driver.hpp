// ============================================================================
// stratsynth/driver.hpp — wiring a CliConfig into a runnable pipeline
// ============================================================================

#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "stratsynth/backend.hpp"
#include "stratsynth/catalog.hpp"
#include "stratsynth/config.hpp"
#include "stratsynth/external_backend.hpp"
#include "stratsynth/instance.hpp"
#include "stratsynth/pipeline.hpp"

namespace stratsynth {

struct DriverSetup {
    TacticCatalog catalog;
    std::vector<Instance> training;
    std::unique_ptr<Backend> backend;
};

inline DriverSetup make_setup(const CliConfig& cfg) {
    DriverSetup setup;
    setup.catalog = load_catalog(cfg.catalog_path);

    if (!cfg.benchmark_dirs.empty()) {
        std::vector<std::filesystem::path> dirs(cfg.benchmark_dirs.begin(),
                                                cfg.benchmark_dirs.end());
        setup.training = scan_benchmarks(dirs);
        if (setup.training.empty())
            throw ConfigError("no .smt2 instances found under the benchmark dirs");
    } else {
        setup.training = make_simulated_instances(cfg.sim_instances, setup.catalog, cfg.seed);
    }

    if (cfg.backend == "simulated") {
        setup.backend = std::make_unique<SimulatedBackend>(cfg.seed);
    } else {
        setup.backend = std::make_unique<ExternalBackend>(
            cfg.solver_command_template, cfg.seed,
            std::filesystem::path(cfg.output_dir) / "tmp");
    }
    return setup;
}

inline PipelineConfig pipeline_config_from(const CliConfig& cfg, TacticCatalog catalog,
                                           std::vector<Instance> training) {
    PipelineConfig p;
    p.catalog = std::move(catalog);
    p.training = std::move(training);
    p.p1_size = static_cast<std::size_t>(cfg.p1_size);
    p.n_linear = cfg.n_linear;
    p.stage1_budget = cfg.stage1_budget;
    p.stage2_budget = cfg.stage2_budget;
    p.timeout_ms = cfg.timeout_ms;
    p.long_timeout_ms = cfg.long_timeout_ms;
    p.c_uct = cfg.c_uct;
    p.c_bandit = cfg.c_bandit;
    p.seed = cfg.seed;
    p.workers = cfg.workers;
    return p;
}

}  // namespace stratsynth
