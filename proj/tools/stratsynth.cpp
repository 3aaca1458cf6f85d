// ============================================================================
// stratsynth — command-line strategy synthesis
// ============================================================================
//
// Subcommands mirror the pipeline phases so a run can resume from the cache:
//
//   synth     full pipeline: stage1 -> promote -> select -> [re-eval] -> stage2
//   stage1    linear-strategy search only; writes pool.txt
//   select    greedy portfolio selection from a pool file; writes portfolio.txt
//   stage2    combination search from a portfolio file; writes final_strategy.txt
//   eval      score one strategy file over the benchmark set
//   features  print the probe values of one instance
//   report    summarize a cache file per (strategy, timeout)
//
// Exit codes: 0 ok, 2 config error, 3 solver unavailable, 4 soundness alarm
// (a wrong sat/unsat answer was observed), 1 anything else.
//
// ============================================================================

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stratsynth/config.hpp"
#include "stratsynth/driver.hpp"
#include "stratsynth/evaluate.hpp"
#include "stratsynth/parser.hpp"
#include "stratsynth/pipeline.hpp"
#include "stratsynth/report.hpp"
#include "stratsynth/validate.hpp"

namespace fs = std::filesystem;
using namespace stratsynth;

namespace {

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out;
};

CliConfig load_with_overrides(const std::string& path, const GlobalOptions& global) {
    CliConfig cfg = load_config(path);
    if (global.seed) cfg.seed = *global.seed;
    if (global.workers) cfg.workers = *global.workers;
    if (global.out) cfg.output_dir = *global.out;
    return cfg;
}

std::vector<StrategyRef> read_strategy_lines(const fs::path& path, const TacticCatalog& catalog) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open strategy file: " + path.string());
    std::vector<StrategyRef> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        out.push_back(parse_strategy(line, catalog));
    }
    if (out.empty()) throw ConfigError("no strategies in file: " + path.string());
    return out;
}

int finish_with_report(const Report& report, bool any_wrong) {
    std::cout << emit_report_text(report);
    if (any_wrong) {
        std::cerr << "soundness alarm: a strategy returned a wrong sat/unsat answer\n";
        return 4;
    }
    return 0;
}

int cmd_synth(const CliConfig& cfg) {
    DriverSetup setup = make_setup(cfg);
    const PipelineConfig pipeline =
        pipeline_config_from(cfg, setup.catalog, std::move(setup.training));
    const PipelineResult result = synthesize(pipeline, *setup.backend, cfg.output_dir);

    std::cout << "final strategy: " << render(*result.final_strategy) << "\n";
    std::cout << "training PAR-10: " << result.final_par10 << " s\n";
    std::cout << "artifacts: " << cfg.output_dir << "\n";

    const std::size_t p1 = std::min<std::size_t>(pipeline.training.size(), pipeline.p1_size);
    const Report report = pipeline_report(result, pipeline, p1);
    bool any_wrong = false;
    for (const ScoreReport& rep : report.strategies) any_wrong = any_wrong || rep.wrong > 0;
    if (any_wrong) {
        std::cerr << "soundness alarm: a strategy returned a wrong sat/unsat answer\n";
        return 4;
    }
    return 0;
}

int cmd_stage1(const CliConfig& cfg) {
    DriverSetup setup = make_setup(cfg);
    PipelineConfig pipeline = pipeline_config_from(cfg, setup.catalog, setup.training);
    fs::create_directories(cfg.output_dir);
    EvalCache cache(fs::path(cfg.output_dir) / "cache.jsonl");
    const std::vector<Instance> p1 =
        detail::sample_stage1_subset(pipeline.training, pipeline.p1_size, pipeline.seed);
    const SearchResult stage1 = run_stage1(pipeline, p1, *setup.backend, cache);

    std::string text;
    for (const ExploredStrategy& s : stage1.explored) text += render(*s.ast) + "\n";
    detail::write_text_file(fs::path(cfg.output_dir) / "pool.txt", text);
    std::cout << "explored " << stage1.explored.size() << " distinct linear strategies ("
              << stage1.trace.size() << " simulations)\n";
    std::cout << "pool: " << (fs::path(cfg.output_dir) / "pool.txt").string() << "\n";
    return 0;
}

int cmd_select(const CliConfig& cfg, const std::string& pool_path) {
    DriverSetup setup = make_setup(cfg);
    PipelineConfig pipeline = pipeline_config_from(cfg, setup.catalog, setup.training);
    fs::create_directories(cfg.output_dir);
    EvalCache cache(fs::path(cfg.output_dir) / "cache.jsonl");

    const std::vector<StrategyRef> members = read_strategy_lines(pool_path, setup.catalog);
    std::vector<ExploredStrategy> pool;
    for (const StrategyRef& s : members) {
        evaluate_set(*setup.backend, *s, pipeline.training, pipeline.timeout_ms, cache,
                     pipeline.workers);
        pool.push_back({canonical_key(*s), s, 0.0});
    }
    const PortfolioSelection selection =
        select_portfolio(pool, pipeline.training, cache, pipeline.timeout_ms, pipeline.n_linear);

    std::string text;
    for (const StrategyRef& s : selection.portfolio.members) text += render(*s) + "\n";
    detail::write_text_file(fs::path(cfg.output_dir) / "portfolio.txt", text);
    std::cout << "selected " << selection.portfolio.members.size() << " strategies; VBS PAR-10";
    for (double v : selection.vbs_trace) std::cout << " " << v;
    std::cout << "\n";
    return 0;
}

int cmd_stage2(const CliConfig& cfg, const std::string& portfolio_path) {
    DriverSetup setup = make_setup(cfg);
    PipelineConfig pipeline = pipeline_config_from(cfg, setup.catalog, setup.training);
    fs::create_directories(cfg.output_dir);
    EvalCache cache(fs::path(cfg.output_dir) / "cache.jsonl");

    Portfolio portfolio;
    portfolio.members = read_strategy_lines(portfolio_path, setup.catalog);
    for (const StrategyRef& s : portfolio.members)
        portfolio.keys.push_back(canonical_key(*s));

    // Make sure records exist at the stage-2 timeout, producing them if needed.
    const std::int64_t t2 = pipeline.long_timeout_ms.value_or(pipeline.timeout_ms);
    for (const StrategyRef& s : portfolio.members)
        evaluate_set(*setup.backend, *s, pipeline.training, t2, cache, pipeline.workers);
    for (Instance& inst : pipeline.training) ensure_features(inst, pipeline.catalog);

    const Stage2Result stage2 = run_stage2(portfolio, pipeline.training, cache, pipeline);
    detail::write_text_file(fs::path(cfg.output_dir) / "final_strategy.txt",
                            render(*stage2.final_strategy) + "\n");

    Report report;
    std::vector<Outcome> outcomes;
    for (const Instance& inst : pipeline.training)
        outcomes.push_back(cached_eval(*stage2.final_strategy, inst, portfolio, cache, t2));
    report.strategies.push_back(build_score_report(render(*stage2.final_strategy),
                                                   canonical_key(*stage2.final_strategy),
                                                   outcomes, pipeline.training, t2));
    detail::write_text_file(fs::path(cfg.output_dir) / "report.json",
                            report_to_json(report).dump(2) + "\n");
    return finish_with_report(report, report.strategies[0].wrong > 0);
}

int cmd_eval(const CliConfig& cfg, const std::string& strategy_path,
             std::optional<std::int64_t> timeout_override) {
    DriverSetup setup = make_setup(cfg);
    PipelineConfig pipeline = pipeline_config_from(cfg, setup.catalog, setup.training);
    fs::create_directories(cfg.output_dir);
    EvalCache cache(fs::path(cfg.output_dir) / "cache.jsonl");

    const std::string text = read_text_file(strategy_path);
    const StrategyRef strategy = parse_strategy(text, setup.catalog);
    const std::int64_t timeout = timeout_override.value_or(pipeline.timeout_ms);

    const std::vector<EvalRecord> records = evaluate_set(
        *setup.backend, *strategy, pipeline.training, timeout, cache, pipeline.workers);
    std::vector<Outcome> outcomes;
    for (const EvalRecord& r : records) outcomes.emplace_back(r.result, r.wall_ms);

    Report report;
    report.strategies.push_back(build_score_report(render(*strategy), canonical_key(*strategy),
                                                   outcomes, pipeline.training, timeout));
    detail::write_text_file(fs::path(cfg.output_dir) / "report.json",
                            report_to_json(report).dump(2) + "\n");
    return finish_with_report(report, report.strategies[0].wrong > 0);
}

int cmd_features(const CliConfig& cfg, const std::string& instance_path) {
    const TacticCatalog catalog = load_catalog(cfg.catalog_path);
    const FeatureMap features = extract_features(read_text_file(instance_path), catalog);
    nlohmann::json j;
    for (const auto& [name, value] : features) {
        if (std::holds_alternative<bool>(value))
            j[name] = std::get<bool>(value);
        else
            j[name] = std::get<std::int64_t>(value);
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_report(const std::string& cache_path, const std::string& format,
               const GlobalOptions& global) {
    EvalCache cache((fs::path(cache_path)));
    // Group records per (strategy, timeout).
    std::map<std::pair<std::string, std::int64_t>, std::vector<Outcome>> groups;
    for (const auto& [key, rec] : cache.records())
        groups[{rec.strategy_key, rec.timeout_ms}].emplace_back(rec.result, rec.wall_ms);

    Report report;
    for (const auto& [group, outcomes] : groups) {
        ScoreReport rep;
        rep.strategy = group.first;
        rep.strategy_key = group.first;
        rep.timeout_ms = group.second;
        rep.total = static_cast<int>(outcomes.size());
        for (const Outcome& o : outcomes) {
            if (is_solved(o.first)) {
                rep.solved += 1;
                rep.correct += 1;  // no expected status in the cache
            }
        }
        rep.percent_solved = rep.total > 0 ? 100.0 * rep.correct / rep.total : 0.0;
        rep.par2 = par_score(outcomes, rep.timeout_ms, 2);
        rep.par10 = par_score(outcomes, rep.timeout_ms, 10);
        report.strategies.push_back(std::move(rep));
    }

    const ReportFormat fmt = format == "json" ? ReportFormat::json : ReportFormat::text;
    const std::string text = emit_report(report, fmt);
    if (global.out) {
        detail::write_text_file(*global.out, text);
    } else {
        std::cout << text;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MCTS-based synthesis of SMT solver tactic strategies"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--seed", "override the config seed")
        ->each([&](const std::string& v) { global.seed = std::stoull(v); });
    app.add_option("--workers", "override the config worker count")
        ->each([&](const std::string& v) { global.workers = std::stoi(v); });
    app.add_option("--out", "override the output directory")
        ->each([&](const std::string& v) { global.out = v; });

    std::string config_path, pool_path, portfolio_path, strategy_path, instance_path;
    std::string cache_path, format = "text";
    std::int64_t timeout_ms_opt = 0;
    std::optional<std::int64_t> timeout_override;

    CLI::App* synth = app.add_subcommand("synth", "run the full synthesis pipeline");
    synth->fallthrough();
    synth->add_option("--config", config_path, "config file")->required();

    CLI::App* stage1 = app.add_subcommand("stage1", "linear-strategy search only");
    stage1->fallthrough();
    stage1->add_option("--config", config_path, "config file")->required();

    CLI::App* select = app.add_subcommand("select", "greedy portfolio selection from a pool");
    select->fallthrough();
    select->add_option("--config", config_path, "config file")->required();
    select->add_option("--pool", pool_path, "pool file (one strategy per line)")->required();

    CLI::App* stage2 = app.add_subcommand("stage2", "combination search from a portfolio");
    stage2->fallthrough();
    stage2->add_option("--config", config_path, "config file")->required();
    stage2->add_option("--portfolio", portfolio_path, "portfolio file")->required();

    CLI::App* eval = app.add_subcommand("eval", "evaluate one strategy file");
    eval->fallthrough();
    eval->add_option("--config", config_path, "config file")->required();
    eval->add_option("--strategy", strategy_path, "strategy file")->required();
    eval->add_option("--timeout-ms", timeout_ms_opt, "override the evaluation timeout")
        ->each([&](const std::string&) { timeout_override = timeout_ms_opt; });

    CLI::App* features = app.add_subcommand("features", "print probe values of an instance");
    features->fallthrough();
    features->add_option("--config", config_path, "config file")->required();
    features->add_option("--instance", instance_path, "SMT-LIB instance file")->required();

    CLI::App* report = app.add_subcommand("report", "summarize a cache file");
    report->fallthrough();
    report->add_option("--cache", cache_path, "cache.jsonl file")->required();
    report->add_option("--format", format, "text or json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(load_with_overrides(config_path, global));
        if (stage1->parsed()) return cmd_stage1(load_with_overrides(config_path, global));
        if (select->parsed())
            return cmd_select(load_with_overrides(config_path, global), pool_path);
        if (stage2->parsed())
            return cmd_stage2(load_with_overrides(config_path, global), portfolio_path);
        if (eval->parsed())
            return cmd_eval(load_with_overrides(config_path, global), strategy_path,
                            timeout_override);
        if (features->parsed())
            return cmd_features(load_with_overrides(config_path, global), instance_path);
        if (report->parsed()) return cmd_report(cache_path, format, global);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const BackendUnavailableError& e) {
        std::cerr << "backend unavailable: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
