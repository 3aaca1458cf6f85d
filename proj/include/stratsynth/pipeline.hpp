// ============================================================================
// stratsynth/pipeline.hpp — the two-stage synthesis pipeline
// ============================================================================
//
//   stage 1   MCTS over linear strategies, evaluated on the training subset
//             P1 with the real cost of solver calls; every distinct explored
//             strategy is cached.
//   promote   evaluate the stage-1 pool on the full training set P.
//   select    greedy portfolio selection: repeatedly add the pool member
//             that minimizes the virtual-best-strategy PAR-10 of the set.
//   re-eval   optional: re-evaluate the selected portfolio on P under a long
//             timeout, so stage 2 optimizes for that budget.
//   stage 2   MCTS over branching combinations of the portfolio, evaluated
//             purely from cached records (zero solver calls): each candidate
//             is linearized into (member, budget) steps whose outcomes are
//             read from the cache.
//
// The stage-2 winner is compared against every bare portfolio member, so the
// final strategy never scores worse than the best single member.
//
// ============================================================================

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "stratsynth/backend.hpp"
#include "stratsynth/catalog.hpp"
#include "stratsynth/errors.hpp"
#include "stratsynth/evaluate.hpp"
#include "stratsynth/features.hpp"
#include "stratsynth/instance.hpp"
#include "stratsynth/mcts.hpp"
#include "stratsynth/mdp.hpp"
#include "stratsynth/record.hpp"
#include "stratsynth/report.hpp"
#include "stratsynth/scoring.hpp"
#include "stratsynth/strategy.hpp"

namespace stratsynth {

// ── Configuration ───────────────────────────────────────────────────────────

struct PipelineConfig {
    TacticCatalog catalog;
    std::vector<Instance> training;  // P
    std::size_t p1_size = 250;       // stage-1 subset cap: |P1| = min(|P|, p1_size)
    int n_linear = 20;
    std::int64_t stage1_budget = 800;
    std::int64_t stage2_budget = 300000;
    std::int64_t timeout_ms = 10000;
    std::optional<std::int64_t> long_timeout_ms;
    double c_uct = 1.4142135623730951;
    double c_bandit = 1.4142135623730951;
    std::uint64_t seed = 0;
    int workers = 1;
    int max_linear_len = 8;
    int max_if_depth = 3;
    int max_leaves = 8;
    int rollout_cap = 256;
    std::string trace_dir;  // when nonempty, per-stage trace logs are written
};

struct Portfolio {
    std::vector<StrategyRef> members;
    std::vector<std::string> keys;

    int index_of(const std::string& key) const {
        for (std::size_t i = 0; i < keys.size(); ++i)
            if (keys[i] == key) return static_cast<int>(i);
        return -1;
    }
};

// ── Linearization ───────────────────────────────────────────────────────────
// Converts a stage-2 strategy plus an instance's probe values into the
// equivalent ordered sequence of (portfolio member, time budget) steps.
// Predicates resolve against the original formula measures (branching is
// never placed after a tactic application, and a failed or-else arm restores
// the goal). Budgets: a try-for arm gets its constant (clamped to what
// remains), the final member gets the remaining time; steps whose budget
// reaches zero are dropped. Budgets always sum to timeout_ms.

struct ExecutionStep {
    int linear_index = -1;
    std::int64_t budget_ms = 0;
};

namespace detail {

inline int portfolio_index_for(const StrategyNode& node, const Portfolio& portfolio) {
    const int idx = portfolio.index_of(canonical_key(node));
    if (idx < 0) throw Error("strategy leaf is not a portfolio member: " + render(node));
    return idx;
}

inline void linearize_into(const StrategyNode& node, const Portfolio& portfolio,
                           const FeatureMap& features, std::int64_t remaining_ms,
                           std::vector<ExecutionStep>& steps) {
    if (node.kind == StrategyKind::ite) {
        const StrategyNode& branch = eval_predicate(node.pred, features) ? *node.child0
                                                                         : *node.child1;
        linearize_into(branch, portfolio, features, remaining_ms, steps);
        return;
    }
    if (node.kind == StrategyKind::or_else && node.child0->kind == StrategyKind::try_for &&
        is_branch_free(*node.child0->child0)) {
        const std::int64_t budget = std::min(node.child0->try_for_ms, remaining_ms);
        if (budget > 0)
            steps.push_back({portfolio_index_for(*node.child0->child0, portfolio), budget});
        linearize_into(*node.child1, portfolio, features, remaining_ms - budget, steps);
        return;
    }
    if (is_branch_free(node)) {
        if (remaining_ms > 0) steps.push_back({portfolio_index_for(node, portfolio), remaining_ms});
        return;
    }
    throw Error("strategy is not a staged combination of portfolio members: " + render(node));
}

}  // namespace detail

inline std::vector<ExecutionStep> linearize(const StrategyNode& branched,
                                            const Portfolio& portfolio,
                                            const FeatureMap& features,
                                            std::int64_t timeout_ms) {
    std::vector<ExecutionStep> steps;
    detail::linearize_into(branched, portfolio, features, timeout_ms, steps);
    return steps;
}

// ── Cached evaluation ───────────────────────────────────────────────────────
// Scores a stage-2 strategy on one instance purely from cached records. For
// each step, a cached solve within the step budget ends the run; a cached
// fast failure charges its own time; anything that did not finish inside the
// budget charges the whole budget. Exhausting all steps is a timeout at the
// full evaluation timeout.

inline Outcome cached_eval(const StrategyNode& branched, const Instance& instance,
                           const Portfolio& portfolio, const EvalCache& cache,
                           std::int64_t timeout_ms) {
    if (!instance.features) throw MissingFeatureError("<features of " + instance.id + ">");
    const std::vector<ExecutionStep> steps =
        linearize(branched, portfolio, *instance.features, timeout_ms);
    std::int64_t elapsed = 0;
    for (const ExecutionStep& step : steps) {
        const EvalRecord* rec =
            cache.find(portfolio.keys[static_cast<std::size_t>(step.linear_index)], instance.id,
                       timeout_ms);
        if (rec == nullptr)
            throw MissingRecordError(portfolio.keys[static_cast<std::size_t>(step.linear_index)],
                                     instance.id);
        if (is_solved(rec->result) && rec->wall_ms <= step.budget_ms)
            return {rec->result, elapsed + rec->wall_ms};
        if ((rec->result == SolveResult::unknown || rec->result == SolveResult::error) &&
            rec->wall_ms <= step.budget_ms) {
            elapsed += rec->wall_ms;
            continue;
        }
        elapsed += step.budget_ms;  // did not finish within this budget
    }
    return {SolveResult::timeout, timeout_ms};
}

// ── Stage 1 ─────────────────────────────────────────────────────────────────

inline SearchResult run_stage1(const PipelineConfig& cfg, const std::vector<Instance>& p1,
                               Backend& backend, EvalCache& cache) {
    if (p1.empty()) throw ConfigError("stage 1: training subset is empty");
    if (cfg.stage1_budget < 1) throw ConfigError("stage 1: budget must be >= 1");

    StageConfig stage;
    stage.stage = Stage::linear;
    stage.max_linear_len = cfg.max_linear_len;
    stage.max_if_depth = cfg.max_if_depth;
    stage.max_leaves = cfg.max_leaves;
    SynthesisMdp mdp(cfg.catalog, stage);

    MctsConfig mcts;
    mcts.budget = cfg.stage1_budget;
    mcts.c_uct = cfg.c_uct;
    mcts.c_bandit = cfg.c_bandit;
    mcts.seed = cfg.seed;
    mcts.rollout_cap = cfg.rollout_cap;
    if (!cfg.trace_dir.empty()) mcts.trace_path = cfg.trace_dir + "/stage1.trace";

    StrategySearch search(mdp, mcts);
    return search.run_search([&](const StrategyNode& strategy, const std::string&) {
        const std::vector<EvalRecord> records =
            evaluate_set(backend, strategy, p1, cfg.timeout_ms, cache, cfg.workers);
        return reward_from_par10(par_score(records, cfg.timeout_ms, 10), cfg.timeout_ms);
    });
}

// ── Portfolio selection ─────────────────────────────────────────────────────

struct PortfolioSelection {
    Portfolio portfolio;
    std::vector<double> vbs_trace;     // VBS PAR-10 after each pick, nonincreasing
    std::vector<double> member_par10;  // individual PAR-10 of each picked member
};

inline PortfolioSelection select_portfolio(const std::vector<ExploredStrategy>& pool,
                                           const std::vector<Instance>& instances,
                                           const EvalCache& cache, std::int64_t timeout_ms,
                                           int n) {
    if (pool.empty()) throw ConfigError("portfolio selection: pool is empty");
    if (instances.empty()) throw EmptySetError{};
    if (n < 1) throw ConfigError("portfolio selection: n must be >= 1");

    constexpr std::int64_t kUnsolved = std::numeric_limits<std::int64_t>::max();
    const double penalty_s = 10.0 * static_cast<double>(timeout_ms) / 1000.0;
    const std::size_t m = pool.size();

    // Solved-time table and individual PAR-10 per pool member.
    std::vector<std::vector<std::int64_t>> solve_ms(m);
    std::vector<double> individual(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        solve_ms[i].resize(instances.size(), kUnsolved);
        double total = 0.0;
        for (std::size_t j = 0; j < instances.size(); ++j) {
            const EvalRecord* rec = cache.find(pool[i].key, instances[j].id, timeout_ms);
            if (rec == nullptr) throw MissingRecordError(pool[i].key, instances[j].id);
            if (is_solved(rec->result)) {
                solve_ms[i][j] = rec->wall_ms;
                total += static_cast<double>(rec->wall_ms) / 1000.0;
            } else {
                total += penalty_s;
            }
        }
        individual[i] = total / static_cast<double>(instances.size());
    }

    const auto vbs_of = [&](const std::vector<std::int64_t>& best) {
        double total = 0.0;
        for (std::int64_t ms : best)
            total += ms == kUnsolved ? penalty_s : static_cast<double>(ms) / 1000.0;
        return total / static_cast<double>(best.size());
    };

    PortfolioSelection out;
    std::vector<bool> picked(m, false);
    std::vector<std::int64_t> best(instances.size(), kUnsolved);
    while (out.portfolio.members.size() < static_cast<std::size_t>(n)) {
        int choice = -1;
        double choice_vbs = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (picked[i]) continue;
            std::vector<std::int64_t> merged = best;
            for (std::size_t j = 0; j < merged.size(); ++j)
                merged[j] = std::min(merged[j], solve_ms[i][j]);
            const double v = vbs_of(merged);
            const bool better =
                choice < 0 || v < choice_vbs ||
                (v == choice_vbs &&
                 (individual[i] < individual[static_cast<std::size_t>(choice)] ||
                  (individual[i] == individual[static_cast<std::size_t>(choice)] &&
                   pool[i].key < pool[static_cast<std::size_t>(choice)].key)));
            if (better) {
                choice = static_cast<int>(i);
                choice_vbs = v;
            }
        }
        if (choice < 0) break;  // pool exhausted
        picked[static_cast<std::size_t>(choice)] = true;
        for (std::size_t j = 0; j < best.size(); ++j)
            best[j] = std::min(best[j], solve_ms[static_cast<std::size_t>(choice)][j]);
        out.portfolio.members.push_back(pool[static_cast<std::size_t>(choice)].ast);
        out.portfolio.keys.push_back(pool[static_cast<std::size_t>(choice)].key);
        out.vbs_trace.push_back(choice_vbs);
        out.member_par10.push_back(individual[static_cast<std::size_t>(choice)]);
    }
    return out;
}

// ── Stage 2 ─────────────────────────────────────────────────────────────────

struct Stage2Result {
    StrategyRef final_strategy;
    double final_par10 = 0.0;
    SearchResult search;
};

inline Stage2Result run_stage2(const Portfolio& portfolio, const std::vector<Instance>& training,
                               const EvalCache& cache, const PipelineConfig& cfg) {
    if (portfolio.members.empty()) throw ConfigError("stage 2: portfolio is empty");
    if (cfg.stage2_budget < 1) throw ConfigError("stage 2: budget must be >= 1");
    const std::int64_t t2 = cfg.long_timeout_ms.value_or(cfg.timeout_ms);

    // Fail early if any (member, instance) record is missing.
    for (const std::string& key : portfolio.keys)
        for (const Instance& inst : training)
            if (cache.find(key, inst.id, t2) == nullptr) throw MissingRecordError(key, inst.id);

    TacticCatalog catalog = cfg.catalog;
    if (catalog.try_for_ms.empty()) catalog.try_for_ms = default_try_for_candidates(t2);

    StageConfig stage;
    stage.stage = Stage::combine;
    stage.linear_pool = portfolio.members;
    stage.max_linear_len = cfg.max_linear_len;
    stage.max_if_depth = cfg.max_if_depth;
    stage.max_leaves = cfg.max_leaves;
    SynthesisMdp mdp(catalog, stage);

    MctsConfig mcts;
    mcts.budget = cfg.stage2_budget;
    mcts.c_uct = cfg.c_uct;
    mcts.c_bandit = cfg.c_bandit;
    mcts.seed = splitmix64(cfg.seed ^ 0x5741474532ULL);
    mcts.rollout_cap = cfg.rollout_cap;
    if (!cfg.trace_dir.empty()) mcts.trace_path = cfg.trace_dir + "/stage2.trace";

    const auto eval = [&](const StrategyNode& strategy, const std::string&) {
        std::vector<Outcome> outcomes;
        outcomes.reserve(training.size());
        for (const Instance& inst : training)
            outcomes.push_back(cached_eval(strategy, inst, portfolio, cache, t2));
        return reward_from_par10(par_score(outcomes, t2, 10), t2);
    };

    StrategySearch search(mdp, mcts);
    SearchResult result = search.run_search(eval);

    // Seed the candidate set with every bare portfolio member: the final
    // strategy can then never score worse than the best single member.
    Stage2Result out;
    out.search = std::move(result);
    double best_reward = -1.0;
    for (std::size_t i = 0; i < portfolio.members.size(); ++i) {
        const double r = eval(*portfolio.members[i], portfolio.keys[i]);
        if (r > best_reward) {
            best_reward = r;
            out.final_strategy = portfolio.members[i];
        }
    }
    if (out.search.best_ast && out.search.best_reward > best_reward) {
        best_reward = out.search.best_reward;
        out.final_strategy = out.search.best_ast;
    }
    out.final_par10 = (1.0 - best_reward) * 10.0 * static_cast<double>(t2) / 1000.0;
    return out;
}

// ── Full pipeline ───────────────────────────────────────────────────────────

struct StageTimings {
    double stage1_s = 0.0;
    double promote_s = 0.0;
    double select_s = 0.0;
    double reeval_s = 0.0;
    double stage2_s = 0.0;
    double total_s = 0.0;
};

struct PipelineResult {
    std::vector<ExploredStrategy> pool;  // distinct stage-1 strategies
    Portfolio portfolio;
    StrategyRef final_strategy;
    double final_par10 = 0.0;
    ScoreReport final_report;
    std::vector<ScoreReport> member_reports;
    StageTimings timings;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path.string());
    out << content;
}

inline std::vector<Instance> sample_stage1_subset(const std::vector<Instance>& training,
                                                  std::size_t p1_size, std::uint64_t seed) {
    const std::size_t k = std::min(training.size(), p1_size);
    std::vector<std::size_t> index(training.size());
    for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
    std::mt19937_64 rng(splitmix64(seed ^ 0x50315031ULL));
    std::shuffle(index.begin(), index.end(), rng);
    index.resize(k);
    std::sort(index.begin(), index.end());
    std::vector<Instance> out;
    out.reserve(k);
    for (std::size_t i : index) out.push_back(training[i]);
    return out;
}

inline nlohmann::json pipeline_config_echo(const PipelineConfig& cfg, std::size_t p1_count) {
    nlohmann::json j{{"logic", cfg.catalog.logic},
                     {"training_size", cfg.training.size()},
                     {"p1_size", p1_count},
                     {"n_linear", cfg.n_linear},
                     {"stage1_budget", cfg.stage1_budget},
                     {"stage2_budget", cfg.stage2_budget},
                     {"timeout_ms", cfg.timeout_ms},
                     {"c_uct", cfg.c_uct},
                     {"c_bandit", cfg.c_bandit},
                     {"seed", cfg.seed},
                     {"workers", cfg.workers},
                     {"max_linear_len", cfg.max_linear_len},
                     {"max_if_depth", cfg.max_if_depth},
                     {"max_leaves", cfg.max_leaves}};
    if (cfg.long_timeout_ms) j["long_timeout_ms"] = *cfg.long_timeout_ms;
    return j;
}

}  // namespace detail

inline Report pipeline_report(const PipelineResult& result, const PipelineConfig& cfg,
                              std::size_t p1_count) {
    Report report;
    report.strategies.push_back(result.final_report);
    for (const ScoreReport& rep : result.member_reports) report.strategies.push_back(rep);
    report.metadata = detail::pipeline_config_echo(cfg, p1_count);
    report.metadata["final_strategy"] = render(*result.final_strategy);
    report.metadata["portfolio_size"] = result.portfolio.members.size();
    return report;
}

// Runs the whole pipeline and writes portfolio.txt, final_strategy.txt,
// report.json, cache.jsonl and manifest.json under out_dir. On a stage
// failure the manifest records the stages completed so far plus the error.
inline PipelineResult synthesize(const PipelineConfig& cfg, Backend& backend,
                                 const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    if (cfg.training.empty()) throw ConfigError("pipeline: training set is empty");
    if (cfg.timeout_ms <= 0) throw ConfigError("pipeline: timeout must be positive");
    if (cfg.n_linear < 1) throw ConfigError("pipeline: n_linear must be >= 1");
    fs::create_directories(out_dir);

    const auto t_start = std::chrono::steady_clock::now();
    PipelineResult result;
    nlohmann::json manifest;
    std::vector<std::string> stages_done;
    const std::vector<Instance> p1 =
        detail::sample_stage1_subset(cfg.training, cfg.p1_size, cfg.seed);
    manifest["config"] = detail::pipeline_config_echo(cfg, p1.size());
    manifest["backend"] = backend.tag();

    EvalCache cache(out_dir / "cache.jsonl");
    std::vector<Instance> training = cfg.training;

    try {
        // Stage 1: linear strategies on P1.
        auto t0 = std::chrono::steady_clock::now();
        const SearchResult stage1 = run_stage1(cfg, p1, backend, cache);
        result.pool = stage1.explored;
        result.timings.stage1_s = detail::seconds_since(t0);
        stages_done.push_back("stage1");
        {
            std::string pool_text;
            for (const ExploredStrategy& s : result.pool) pool_text += render(*s.ast) + "\n";
            detail::write_text_file(out_dir / "pool.txt", pool_text);
        }

        // Promote: evaluate the pool on all of P.
        t0 = std::chrono::steady_clock::now();
        for (const ExploredStrategy& s : result.pool)
            evaluate_set(backend, *s.ast, training, cfg.timeout_ms, cache, cfg.workers);
        result.timings.promote_s = detail::seconds_since(t0);
        stages_done.push_back("promote");

        // Greedy VBS selection.
        t0 = std::chrono::steady_clock::now();
        PortfolioSelection selection =
            select_portfolio(result.pool, training, cache, cfg.timeout_ms, cfg.n_linear);
        result.portfolio = std::move(selection.portfolio);
        result.timings.select_s = detail::seconds_since(t0);
        stages_done.push_back("select");
        {
            std::string text;
            for (const StrategyRef& s : result.portfolio.members) text += render(*s) + "\n";
            detail::write_text_file(out_dir / "portfolio.txt", text);
        }

        // Optional long-timeout re-evaluation of the selected members only.
        t0 = std::chrono::steady_clock::now();
        if (cfg.long_timeout_ms) {
            for (const StrategyRef& member : result.portfolio.members)
                evaluate_set(backend, *member, training, *cfg.long_timeout_ms, cache,
                             cfg.workers);
        }
        result.timings.reeval_s = detail::seconds_since(t0);
        if (cfg.long_timeout_ms) stages_done.push_back("reeval");

        // Stage 2 needs probe values for every training instance.
        for (Instance& inst : training) ensure_features(inst, cfg.catalog);

        t0 = std::chrono::steady_clock::now();
        const Stage2Result stage2 = run_stage2(result.portfolio, training, cache, cfg);
        result.final_strategy = stage2.final_strategy;
        result.final_par10 = stage2.final_par10;
        result.timings.stage2_s = detail::seconds_since(t0);
        stages_done.push_back("stage2");

        // Reports: the final strategy and each portfolio member on P.
        const std::int64_t t2 = cfg.long_timeout_ms.value_or(cfg.timeout_ms);
        {
            std::vector<Outcome> outcomes;
            for (const Instance& inst : training)
                outcomes.push_back(
                    cached_eval(*result.final_strategy, inst, result.portfolio, cache, t2));
            result.final_report =
                build_score_report(render(*result.final_strategy),
                                   canonical_key(*result.final_strategy), outcomes, training, t2);
        }
        for (std::size_t i = 0; i < result.portfolio.members.size(); ++i) {
            std::vector<Outcome> outcomes;
            for (const Instance& inst : training) {
                const EvalRecord* rec = cache.find(result.portfolio.keys[i], inst.id, t2);
                if (rec == nullptr) throw MissingRecordError(result.portfolio.keys[i], inst.id);
                outcomes.emplace_back(rec->result, rec->wall_ms);
            }
            result.member_reports.push_back(
                build_score_report(render(*result.portfolio.members[i]),
                                   result.portfolio.keys[i], outcomes, training, t2));
        }

        detail::write_text_file(out_dir / "final_strategy.txt",
                                render(*result.final_strategy) + "\n");
        const Report report = pipeline_report(result, cfg, p1.size());
        detail::write_text_file(out_dir / "report.json", report_to_json(report).dump(2) + "\n");
        stages_done.push_back("report");
    } catch (...) {
        manifest["stages_completed"] = stages_done;
        manifest["status"] = "failed";
        try {
            detail::write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
        } catch (...) {
        }
        throw;
    }

    result.timings.total_s = detail::seconds_since(t_start);
    manifest["stages_completed"] = stages_done;
    manifest["status"] = "ok";
    manifest["timings_s"] = {{"stage1", result.timings.stage1_s},
                             {"promote", result.timings.promote_s},
                             {"select", result.timings.select_s},
                             {"reeval", result.timings.reeval_s},
                             {"stage2", result.timings.stage2_s},
                             {"total", result.timings.total_s}};
    detail::write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return result;
}

}  // namespace stratsynth
