// ============================================================================
// stratsynth/backend.hpp — strategy execution backends
// ============================================================================
//
// Backend::execute runs one strategy on one instance under a wallclock
// timeout and yields an EvalRecord. Two implementations:
//
//   SimulatedBackend — deterministic synthetic cost model, zero wallclock
//                      cost; used for tests and dry runs.
//   ExternalBackend  — spawns a real solver process (external_backend.hpp).
//
// Simulated cost model: the outcome of a branch-free strategy L on instance
// f is a pure function of (canonical_key(L), f.id, seed). The wall time is
// hashed uniformly onto (0, 2*timeout]; runs beyond the timeout report
// timeout. Runs within it solve (reporting the instance's expected status)
// when a second hash draw clears the instance difficulty, otherwise they
// return unknown. Branched strategies are executed directly by interpreting
// if/try-for/or-else over those per-linear outcomes (run_branched), with
// time accounted exactly as staged cached evaluation does: a try-for arm
// statically consumes its budget when it fails, and a strategy that fails
// every arm scores (timeout, timeout).
//
// ============================================================================

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <string>
#include <utility>

#include "stratsynth/errors.hpp"
#include "stratsynth/features.hpp"
#include "stratsynth/hash.hpp"
#include "stratsynth/instance.hpp"
#include "stratsynth/record.hpp"
#include "stratsynth/scoring.hpp"
#include "stratsynth/strategy.hpp"

namespace stratsynth {

class Backend {
  public:
    virtual ~Backend() = default;

    EvalRecord execute(const StrategyNode& strategy, const Instance& instance,
                       std::int64_t timeout_ms) {
        if (timeout_ms <= 0) throw ConfigError("execute: timeout must be positive");
        count_.fetch_add(1, std::memory_order_relaxed);
        const auto [result, wall_ms] = do_execute(strategy, instance, timeout_ms);
        EvalRecord rec;
        rec.strategy_key = canonical_key(strategy);
        rec.instance_id = instance.id;
        rec.timeout_ms = timeout_ms;
        rec.result = result;
        rec.wall_ms = wall_ms;
        rec.backend_tag = tag();
        rec.seed = seed();
        return rec;
    }

    std::int64_t execute_count() const { return count_.load(std::memory_order_relaxed); }

    virtual std::string tag() const = 0;
    virtual std::uint64_t seed() const = 0;

  protected:
    virtual Outcome do_execute(const StrategyNode&, const Instance&, std::int64_t timeout_ms) = 0;

  private:
    std::atomic<std::int64_t> count_{0};
};

// ── SimulatedBackend ────────────────────────────────────────────────────────

class SimulatedBackend final : public Backend {
  public:
    explicit SimulatedBackend(std::uint64_t seed) : seed_(seed) {}

    std::string tag() const override { return "simulated"; }
    std::uint64_t seed() const override { return seed_; }

    // Cost-model outcome of a branch-free strategy.
    Outcome linear_outcome(const std::string& strategy_key, const Instance& instance,
                           std::int64_t timeout_ms) const {
        const std::uint64_t h = hash_combine(
            fnv1a64(strategy_key), hash_combine(fnv1a64(instance.id), splitmix64(seed_)));
        const std::int64_t wall =
            1 + static_cast<std::int64_t>(splitmix64(h ^ 0x7f4a7c15ULL) %
                                          static_cast<std::uint64_t>(2 * timeout_ms));
        if (wall > timeout_ms) return {SolveResult::timeout, timeout_ms};
        const double draw = hash_unit(splitmix64(h ^ 0x2545f491ULL));
        if (draw >= instance.sim_difficulty && instance.expected_status != Status::unknown) {
            const SolveResult result = instance.expected_status == Status::sat
                                           ? SolveResult::sat
                                           : SolveResult::unsat;
            return {result, wall};
        }
        return {SolveResult::unknown, wall};
    }

    // Direct execution of a branched strategy: resolves if via the instance's
    // features, honours try-for budgets, falls through or-else arms. A
    // strategy whose every arm fails scores (timeout, timeout_ms).
    Outcome run_branched(const StrategyNode& strategy, const Instance& instance,
                         std::int64_t timeout_ms) const {
        const Walk w = interp(strategy, instance, timeout_ms, timeout_ms);
        if (w.solved) return {w.result, w.consumed};
        return {SolveResult::timeout, timeout_ms};
    }

  protected:
    Outcome do_execute(const StrategyNode& strategy, const Instance& instance,
                       std::int64_t timeout_ms) override {
        if (is_branch_free(strategy))
            return linear_outcome(canonical_key(strategy), instance, timeout_ms);
        return run_branched(strategy, instance, timeout_ms);
    }

  private:
    struct Walk {
        bool solved = false;
        SolveResult result = SolveResult::timeout;
        std::int64_t consumed = 0;
    };

    Walk interp(const StrategyNode& node, const Instance& instance, std::int64_t budget,
                std::int64_t total_timeout) const {
        if (budget < 0) budget = 0;
        if (is_branch_free(node)) {
            const auto [result, wall] =
                linear_outcome(canonical_key(node), instance, total_timeout);
            if (is_solved(result) && wall <= budget) return {true, result, wall};
            if ((result == SolveResult::unknown || result == SolveResult::error) &&
                wall <= budget)
                return {false, result, wall};
            return {false, SolveResult::timeout, budget};  // truncated at the budget
        }
        switch (node.kind) {
            case StrategyKind::try_for: {
                const std::int64_t b = std::min(node.try_for_ms, budget);
                return interp(*node.child0, instance, b, total_timeout);
            }
            case StrategyKind::or_else: {
                // The first arm's static allotment: its try-for budget when it
                // has one, otherwise the whole remaining budget.
                const std::int64_t first_budget =
                    node.child0->kind == StrategyKind::try_for
                        ? std::min(node.child0->try_for_ms, budget)
                        : budget;
                Walk first = interp(*node.child0, instance, first_budget, total_timeout);
                if (first.solved) return first;
                Walk second =
                    interp(*node.child1, instance, budget - first_budget, total_timeout);
                second.consumed += first.consumed;
                return second;
            }
            case StrategyKind::ite: {
                if (!instance.features) throw MissingFeatureError(node.pred.probe);
                const bool take = eval_predicate(node.pred, *instance.features);
                return interp(take ? *node.child0 : *node.child1, instance, budget,
                              total_timeout);
            }
            default:
                throw Error("simulated backend: unsupported strategy shape");
        }
    }

    std::uint64_t seed_;
};

}  // namespace stratsynth
