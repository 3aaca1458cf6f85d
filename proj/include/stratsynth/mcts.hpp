// ============================================================================
// stratsynth/mcts.hpp — Monte Carlo tree search over the synthesis MDP
// ============================================================================
//
// Standard four-phase MCTS with two twists:
//
//   max-backup     — node/arm values keep the best observed episode reward
//                    instead of the running mean.
//   layered search — tactic parameters are not actions. Every traversed edge
//                    that applies a tactic consults one bandit per parameter
//                    (see bandit.hpp) to fix its value for the episode.
//                    Bandits are keyed by the action path from the root, so
//                    statistics gathered during rollouts survive when the
//                    corresponding edge later joins the tree.
//
// Evaluations are deduplicated by canonical strategy key: revisiting a
// strategy reuses its recorded reward without calling the evaluator.
//
// The search loop is sequential for reproducibility; the evaluator may
// parallelize internally across instances.
//
// ============================================================================

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stratsynth/bandit.hpp"
#include "stratsynth/errors.hpp"
#include "stratsynth/mdp.hpp"
#include "stratsynth/strategy.hpp"

namespace stratsynth {

// UCT selection score; unvisited children score +infinity and are taken
// first in canonical action order.
inline double uct_score(std::int64_t child_visits, double child_q_max,
                        std::int64_t parent_visits, double c) {
    return ucb_score(child_visits, child_q_max, parent_visits, c);
}

struct MctsConfig {
    std::int64_t budget = 1;      // simulations to run
    double c_uct = 1.4142135623730951;
    double c_bandit = 1.4142135623730951;
    std::uint64_t seed = 0;
    int rollout_cap = 256;        // max rollout steps before RolloutOverflow
    std::string trace_path;       // when nonempty, one line per simulation
};

struct TraceEntry {
    std::int64_t sim = 0;
    std::string key;
    double reward = 0.0;
};

struct ExploredStrategy {
    std::string key;
    StrategyRef ast;
    double reward = 0.0;
};

struct SearchResult {
    StrategyRef best_ast;
    double best_reward = 0.0;
    std::vector<TraceEntry> trace;
    std::vector<ExploredStrategy> explored;  // distinct strategies, first-seen order
};

struct SimulationOutcome {
    StrategyRef strategy;
    std::string key;
    double reward = 0.0;
    bool fresh_evaluation = false;
};

// ── StrategySearch ──────────────────────────────────────────────────────────

class StrategySearch {
  public:
    // Evaluator: terminal strategy (parameters fixed) -> reward in [0, 1].
    using EvalFn = std::function<double(const StrategyNode& strategy, const std::string& key)>;

    struct Node {
        DerivationState state;
        bool terminal = false;
        std::vector<Action> actions;                  // canonical order
        std::vector<std::unique_ptr<Node>> children;  // parallel to actions
        std::size_t next_unexpanded = 0;
        std::int64_t visits = 0;
        double q_max = 0.0;
    };

    StrategySearch(const SynthesisMdp& mdp, MctsConfig cfg)
        : mdp_(&mdp), cfg_(std::move(cfg)), rng_(cfg_.seed) {
        if (cfg_.budget < 1) throw ConfigError("mcts budget must be >= 1");
        root_ = make_node(mdp_->initial_state());
    }

    const Node& root() const { return *root_; }

    SimulationOutcome run_simulation(const EvalFn& eval) {
        std::vector<Node*> path = {root_.get()};
        std::vector<const Action*> taken;

        // Selection: descend through fully expanded nodes.
        Node* node = root_.get();
        while (!node->terminal && node->next_unexpanded == node->actions.size()) {
            std::size_t best = 0;
            double best_score = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < node->children.size(); ++i) {
                const Node& child = *node->children[i];
                const double s = uct_score(child.visits, child.q_max, node->visits, cfg_.c_uct);
                if (s > best_score) {
                    best_score = s;
                    best = i;
                }
            }
            taken.push_back(&node->actions[best]);
            node = node->children[best].get();
            path.push_back(node);
        }

        // Expansion: attach one unexplored child.
        if (!node->terminal) {
            const std::size_t idx = node->next_unexpanded++;
            node->children[idx] = make_node(mdp_->apply_action(node->state, node->actions[idx]));
            taken.push_back(&node->actions[idx]);
            node = node->children[idx].get();
            path.push_back(node);
        }

        // Rollout: random legal actions until terminal.
        DerivationState state = node->state;
        std::vector<Action> rollout;
        int steps = 0;
        while (!state.terminal()) {
            if (++steps > cfg_.rollout_cap) throw RolloutOverflowError(cfg_.rollout_cap);
            std::vector<Action> legal = mdp_->legal_actions(state);
            std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
            rollout.push_back(std::move(legal[pick(rng_)]));
            state = mdp_->apply_action(state, rollout.back());
        }
        for (const Action& a : rollout) taken.push_back(&a);

        // Layered parameter choice along every traversed edge.
        std::vector<std::pair<ParamBandit*, std::size_t>> engaged;
        std::vector<std::vector<std::pair<std::string, ParamValue>>> assignments;
        std::string path_key;
        for (const Action* a : taken) {
            path_key += a->sig();
            path_key += '/';
            assignments.push_back(choose_params(*a, path_key, engaged));
        }

        // Evaluate (deduplicated by canonical key).
        StrategyRef strategy = decorate(mdp_->finish(state), assignments);
        std::string key = canonical_key(*strategy);
        SimulationOutcome out;
        out.strategy = strategy;
        out.key = key;
        auto seen = rewards_.find(key);
        if (seen != rewards_.end()) {
            out.reward = seen->second;
        } else {
            try {
                out.reward = eval(*strategy, key);
            } catch (const EvalError&) {
                throw;
            } catch (const std::exception& e) {
                throw EvalError(e.what(), render(*strategy));
            }
            rewards_.emplace(std::move(key), out.reward);
            out.fresh_evaluation = true;
        }

        // Max-backup through the tree path and the engaged bandit arms.
        for (Node* n : path) {
            n->visits += 1;
            n->q_max = std::max(n->q_max, out.reward);
        }
        for (auto& [bandit, arm] : engaged) bandit->update(arm, out.reward);
        return out;
    }

    SearchResult run_search(const EvalFn& eval) {
        SearchResult result;
        for (std::int64_t sim = 0; sim < cfg_.budget; ++sim) {
            SimulationOutcome out = run_simulation(eval);
            result.trace.push_back({sim, out.key, out.reward});
            if (out.fresh_evaluation)
                result.explored.push_back({out.key, out.strategy, out.reward});
            if (!result.best_ast || out.reward > result.best_reward) {
                result.best_ast = out.strategy;
                result.best_reward = out.reward;
            }
        }
        if (!cfg_.trace_path.empty()) dump_trace(result);
        return result;
    }

    std::size_t distinct_evaluations() const { return rewards_.size(); }

  private:
    std::unique_ptr<Node> make_node(DerivationState state) {
        auto n = std::make_unique<Node>();
        n->terminal = state.terminal();
        if (!n->terminal) {
            n->actions = mdp_->legal_actions(state);
            n->children.resize(n->actions.size());
        }
        n->state = std::move(state);
        return n;
    }

    // Fix parameter values for the tactic applied by this action, if any.
    std::vector<std::pair<std::string, ParamValue>> choose_params(
        const Action& action, const std::string& path_key,
        std::vector<std::pair<ParamBandit*, std::size_t>>& engaged) {
        std::vector<std::pair<std::string, ParamValue>> settings;
        if (action.kind != Action::Kind::solver_leaf && action.kind != Action::Kind::then_tactic)
            return settings;
        const TacticSpec* spec = mdp_->catalog().find_tactic(action.tactic);
        if (spec == nullptr || spec->params.empty()) return settings;
        for (const ParamSpec& p : spec->params) {
            auto [it, inserted] = bandits_.try_emplace(path_key + "::" + p.name);
            if (inserted) it->second = ParamBandit::for_param(p);
            const std::size_t arm = it->second.select(cfg_.c_bandit);
            engaged.emplace_back(&it->second, arm);
            settings.emplace_back(p.name, it->second.arms[arm].value);
        }
        return settings;
    }

    // Wrap the i-th tactic application with the i-th parameter assignment.
    // Applications are introduced one per action, in action order, so the
    // then-chain order matches the assignment order.
    StrategyRef decorate(const StrategyRef& ast,
                         const std::vector<std::vector<std::pair<std::string, ParamValue>>>&
                             assignments) const {
        std::size_t index = 0;
        return decorate_walk(ast, assignments, index);
    }

    StrategyRef decorate_walk(
        const StrategyRef& n,
        const std::vector<std::vector<std::pair<std::string, ParamValue>>>& assignments,
        std::size_t& index) const {
        if (mdp_->stage().stage == Stage::combine) return n;  // pool members are already concrete
        switch (n->kind) {
            case StrategyKind::tactic: {
                const std::size_t i = index++;
                if (i < assignments.size() && !assignments[i].empty())
                    return with_params(n->tactic, assignments[i]);
                return n;
            }
            case StrategyKind::then: {
                StrategyRef head = decorate_walk(n->child0, assignments, index);
                StrategyRef tail = decorate_walk(n->child1, assignments, index);
                return then(std::move(head), std::move(tail));
            }
            default:
                return n;
        }
    }

    void dump_trace(const SearchResult& result) const {
        std::ofstream out(cfg_.trace_path);
        if (!out) throw IoError("cannot write trace file: " + cfg_.trace_path);
        for (const TraceEntry& t : result.trace)
            out << t.sim << '\t' << t.reward << '\t' << t.key << '\n';
    }

    const SynthesisMdp* mdp_;
    MctsConfig cfg_;
    std::mt19937_64 rng_;
    std::unique_ptr<Node> root_;
    std::map<std::string, ParamBandit> bandits_;      // keyed by action path + param
    std::unordered_map<std::string, double> rewards_;  // canonical key -> reward
};

}  // namespace stratsynth
