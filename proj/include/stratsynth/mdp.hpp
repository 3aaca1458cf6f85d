// ============================================================================
// stratsynth/mdp.hpp — strategy construction as a deterministic MDP
// ============================================================================
//
// A DerivationState is a partial strategy tree in which unexpanded positions
// are holes; exactly the leftmost hole is fillable. Actions are grammar
// productions instantiated with concrete symbols. Two stages:
//
//   linear   — builds branch-free tactic sequences: a hole is filled either
//              with a solver-wrapper tactic (terminating the sequence) or
//              with (then <preprocessing-tactic> <hole>).
//   combine  — builds branching combinations of a fixed pool of linear
//              strategies: a hole is filled with a pool member, with
//              (if <predicate> <hole> <hole>), or with
//              (or-else (try-for <pool-member> <ms>) <hole>).
//
// Action filtering enforces the construction rules (see validate.hpp), so
// every reachable terminal state yields a rule-clean strategy.
//
// States are immutable; apply_action returns a new state.
//
// ============================================================================

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "stratsynth/catalog.hpp"
#include "stratsynth/errors.hpp"
#include "stratsynth/strategy.hpp"
#include "stratsynth/validate.hpp"

namespace stratsynth {

enum class Stage : std::uint8_t { linear, combine };

struct StageConfig {
    Stage stage = Stage::linear;
    std::vector<StrategyRef> linear_pool;  // combine only; members must be branch-free
    int max_linear_len = 8;  // max tactic applications in a linear strategy
    int max_if_depth = 3;    // if nodes allowed at syntax-tree depths 0..max_if_depth-1
    int max_leaves = 8;      // max pool-member occurrences in a combined strategy
};

// ── Action ──────────────────────────────────────────────────────────────────

struct Action {
    enum class Kind : std::uint8_t { solver_leaf, then_tactic, pool_leaf, if_split, try_for_pool };

    Kind kind = Kind::solver_leaf;
    std::string tactic;          // solver_leaf / then_tactic
    int pool_index = -1;         // pool_leaf / try_for_pool
    Predicate pred;              // if_split
    std::int64_t try_for_ms = 0;  // try_for_pool

    std::string sig() const {
        switch (kind) {
            case Kind::solver_leaf: return "leaf " + tactic;
            case Kind::then_tactic: return "then " + tactic;
            case Kind::pool_leaf: return "pool " + std::to_string(pool_index);
            case Kind::if_split: return "if " + pred.text();
            case Kind::try_for_pool:
                return "tryfor " + std::to_string(pool_index) + " " + std::to_string(try_for_ms);
        }
        return "?";
    }

    bool operator==(const Action& o) const {
        return kind == o.kind && tactic == o.tactic && pool_index == o.pool_index &&
               pred == o.pred && try_for_ms == o.try_for_ms;
    }
};

// ── Partial derivation trees ────────────────────────────────────────────────

struct PartialNode;
using PartialRef = std::shared_ptr<const PartialNode>;

struct PartialNode {
    enum class Kind : std::uint8_t { hole, leaf, then, or_else, try_for, ite, pool_ref };

    Kind kind = Kind::hole;
    std::string tactic;           // leaf
    int pool_index = -1;          // pool_ref
    Predicate pred;               // ite
    std::int64_t try_for_ms = 0;  // try_for
    PartialRef child0, child1;
};

namespace detail {

inline PartialRef partial_hole() {
    auto n = std::make_shared<PartialNode>();
    n->kind = PartialNode::Kind::hole;
    return n;
}

inline PartialRef partial_leaf(std::string tactic) {
    auto n = std::make_shared<PartialNode>();
    n->kind = PartialNode::Kind::leaf;
    n->tactic = std::move(tactic);
    return n;
}

inline PartialRef partial_pool_ref(int index) {
    auto n = std::make_shared<PartialNode>();
    n->kind = PartialNode::Kind::pool_ref;
    n->pool_index = index;
    return n;
}

inline PartialRef partial_then(PartialRef head, PartialRef tail) {
    auto n = std::make_shared<PartialNode>();
    n->kind = PartialNode::Kind::then;
    n->child0 = std::move(head);
    n->child1 = std::move(tail);
    return n;
}

inline PartialRef partial_or_else(PartialRef a, PartialRef b) {
    auto n = std::make_shared<PartialNode>();
    n->kind = PartialNode::Kind::or_else;
    n->child0 = std::move(a);
    n->child1 = std::move(b);
    return n;
}

inline PartialRef partial_try_for(PartialRef child, std::int64_t ms) {
    auto n = std::make_shared<PartialNode>();
    n->kind = PartialNode::Kind::try_for;
    n->child0 = std::move(child);
    n->try_for_ms = ms;
    return n;
}

inline PartialRef partial_ite(Predicate pred, PartialRef a, PartialRef b) {
    auto n = std::make_shared<PartialNode>();
    n->kind = PartialNode::Kind::ite;
    n->pred = std::move(pred);
    n->child0 = std::move(a);
    n->child1 = std::move(b);
    return n;
}

// Execution context of the leftmost hole.
struct HoleContext {
    int depth = 0;
    bool under_try_for = false;
    bool after_tactic = false;
    int nla2bv_count = 0;
    std::string last_tactic;
    int then_len = 0;  // tactic applications already fixed on this path
};

inline bool find_leftmost_hole(const PartialRef& n, HoleContext cur, HoleContext& out) {
    switch (n->kind) {
        case PartialNode::Kind::hole:
            out = cur;
            return true;
        case PartialNode::Kind::leaf:
        case PartialNode::Kind::pool_ref:
            return false;
        case PartialNode::Kind::then: {
            HoleContext tail = cur;
            tail.depth += 1;
            tail.after_tactic = true;
            tail.last_tactic = n->child0->tactic;
            tail.then_len += 1;
            if (n->child0->tactic == "nla2bv") tail.nla2bv_count += 1;
            return find_leftmost_hole(n->child1, tail, out);
        }
        case PartialNode::Kind::or_else: {
            // Both arms start from the goal as of the or-else itself.
            HoleContext child = cur;
            child.depth += 1;
            if (find_leftmost_hole(n->child0, child, out)) return true;
            return find_leftmost_hole(n->child1, child, out);
        }
        case PartialNode::Kind::try_for: {
            HoleContext child = cur;
            child.depth += 1;
            child.under_try_for = true;
            return find_leftmost_hole(n->child0, child, out);
        }
        case PartialNode::Kind::ite: {
            HoleContext child = cur;
            child.depth += 1;
            if (find_leftmost_hole(n->child0, child, out)) return true;
            return find_leftmost_hole(n->child1, child, out);
        }
    }
    return false;
}

struct TreeCounts {
    int holes = 0;
    int pool_leaves = 0;
};

inline void count_partial(const PartialRef& n, TreeCounts& c) {
    switch (n->kind) {
        case PartialNode::Kind::hole: c.holes += 1; return;
        case PartialNode::Kind::pool_ref: c.pool_leaves += 1; return;
        case PartialNode::Kind::leaf: return;
        case PartialNode::Kind::try_for: count_partial(n->child0, c); return;
        default:
            count_partial(n->child0, c);
            count_partial(n->child1, c);
            return;
    }
}

inline PartialRef replace_leftmost_hole(const PartialRef& n, const PartialRef& fill, bool& done) {
    if (done) return n;
    switch (n->kind) {
        case PartialNode::Kind::hole:
            done = true;
            return fill;
        case PartialNode::Kind::leaf:
        case PartialNode::Kind::pool_ref:
            return n;
        default: {
            PartialRef c0 = n->child0 ? replace_leftmost_hole(n->child0, fill, done) : nullptr;
            PartialRef c1 = n->child1;
            if (!done && n->child1) c1 = replace_leftmost_hole(n->child1, fill, done);
            if (c0 == n->child0 && c1 == n->child1) return n;
            auto copy = std::make_shared<PartialNode>(*n);
            copy->child0 = std::move(c0);
            copy->child1 = std::move(c1);
            return copy;
        }
    }
}

inline bool partial_equal(const PartialRef& a, const PartialRef& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case PartialNode::Kind::hole: return true;
        case PartialNode::Kind::leaf: return a->tactic == b->tactic;
        case PartialNode::Kind::pool_ref: return a->pool_index == b->pool_index;
        case PartialNode::Kind::then:
        case PartialNode::Kind::or_else:
            return partial_equal(a->child0, b->child0) && partial_equal(a->child1, b->child1);
        case PartialNode::Kind::try_for:
            return a->try_for_ms == b->try_for_ms && partial_equal(a->child0, b->child0);
        case PartialNode::Kind::ite:
            return a->pred == b->pred && partial_equal(a->child0, b->child0) &&
                   partial_equal(a->child1, b->child1);
    }
    return false;
}

inline void partial_text(const PartialRef& n, std::string& out) {
    switch (n->kind) {
        case PartialNode::Kind::hole: out += "<Strategy>"; return;
        case PartialNode::Kind::leaf: out += n->tactic; return;
        case PartialNode::Kind::pool_ref: out += "#" + std::to_string(n->pool_index); return;
        case PartialNode::Kind::then:
            out += "(then ";
            partial_text(n->child0, out);
            out += ' ';
            partial_text(n->child1, out);
            out += ')';
            return;
        case PartialNode::Kind::or_else:
            out += "(or-else ";
            partial_text(n->child0, out);
            out += ' ';
            partial_text(n->child1, out);
            out += ')';
            return;
        case PartialNode::Kind::try_for:
            out += "(try-for ";
            partial_text(n->child0, out);
            out += ' ' + std::to_string(n->try_for_ms) + ')';
            return;
        case PartialNode::Kind::ite:
            out += "(if " + n->pred.text() + ' ';
            partial_text(n->child0, out);
            out += ' ';
            partial_text(n->child1, out);
            out += ')';
            return;
    }
}

}  // namespace detail

// ── DerivationState ─────────────────────────────────────────────────────────

class DerivationState {
  public:
    DerivationState() : root_(detail::partial_hole()) {}

    // Wraps an arbitrary partial tree; used by tests to reach odd states.
    explicit DerivationState(PartialRef root) : root_(std::move(root)) {}

    bool terminal() const {
        detail::TreeCounts c;
        detail::count_partial(root_, c);
        return c.holes == 0;
    }

    const PartialRef& root() const { return root_; }

    std::string text() const {
        std::string out;
        detail::partial_text(root_, out);
        return out;
    }

    bool operator==(const DerivationState& o) const {
        return detail::partial_equal(root_, o.root_);
    }

  private:
    PartialRef root_;
};

// ── SynthesisMdp ────────────────────────────────────────────────────────────

class SynthesisMdp {
  public:
    SynthesisMdp(const TacticCatalog& catalog, StageConfig cfg)
        : catalog_(&catalog), cfg_(std::move(cfg)) {
        if (cfg_.max_linear_len < 1 || cfg_.max_leaves < 1 || cfg_.max_if_depth < 0)
            throw ConfigError("stage config: limits must be positive");
        if (cfg_.stage == Stage::combine) {
            if (cfg_.linear_pool.empty())
                throw ConfigError("combine stage requires a nonempty linear pool");
            for (const auto& s : cfg_.linear_pool)
                if (!is_branch_free(*s))
                    throw ConfigError("combine stage pool member is not branch-free: " +
                                      render(*s));
            if (catalog.try_for_ms.empty())
                throw ConfigError("combine stage requires try_for_ms candidates in the catalog");
        }
        if (catalog.solver_wrappers().empty())
            throw ConfigError("catalog has no solver-wrapper tactic");
        predicates_ = predicate_pool(catalog);
    }

    const StageConfig& stage() const { return cfg_; }
    const TacticCatalog& catalog() const { return *catalog_; }
    const std::vector<Predicate>& predicates() const { return predicates_; }

    DerivationState initial_state() const { return DerivationState{}; }

    std::vector<Action> legal_actions(const DerivationState& state) const {
        if (state.terminal()) throw TerminalStateError{};
        detail::HoleContext ctx;
        detail::find_leftmost_hole(state.root(), detail::HoleContext{}, ctx);

        std::vector<Action> out;
        if (cfg_.stage == Stage::linear) {
            for (const TacticSpec* t : catalog_->solver_wrappers()) {
                Action a;
                a.kind = Action::Kind::solver_leaf;
                a.tactic = t->name;
                out.push_back(std::move(a));
            }
            // One more application plus the terminal solver must still fit.
            if (ctx.then_len + 2 <= cfg_.max_linear_len) {
                for (const TacticSpec* t : catalog_->preprocessing_tactics()) {
                    if (t->name == "nla2bv" && ctx.nla2bv_count >= 1) continue;
                    if (t->name == "bit-blast" && ctx.last_tactic != "simplify") continue;
                    Action a;
                    a.kind = Action::Kind::then_tactic;
                    a.tactic = t->name;
                    out.push_back(std::move(a));
                }
            }
        } else {
            const int pool_size = static_cast<int>(cfg_.linear_pool.size());
            for (int i = 0; i < pool_size; ++i) {
                Action a;
                a.kind = Action::Kind::pool_leaf;
                a.pool_index = i;
                out.push_back(std::move(a));
            }
            detail::TreeCounts counts;
            detail::count_partial(state.root(), counts);
            const bool can_grow = counts.pool_leaves + counts.holes + 1 <= cfg_.max_leaves;
            if (can_grow && ctx.depth < cfg_.max_if_depth && !ctx.after_tactic) {
                for (const Predicate& p : predicates_) {
                    Action a;
                    a.kind = Action::Kind::if_split;
                    a.pred = p;
                    out.push_back(std::move(a));
                }
            }
            if (can_grow && !ctx.under_try_for) {
                for (int i = 0; i < pool_size; ++i) {
                    for (std::int64_t ms : catalog_->try_for_ms) {
                        Action a;
                        a.kind = Action::Kind::try_for_pool;
                        a.pool_index = i;
                        a.try_for_ms = ms;
                        out.push_back(std::move(a));
                    }
                }
            }
        }
        return out;
    }

    DerivationState apply_action(const DerivationState& state, const Action& action) const {
        const std::vector<Action> legal = legal_actions(state);
        if (std::find(legal.begin(), legal.end(), action) == legal.end())
            throw IllegalActionError(action.sig());

        PartialRef fill;
        switch (action.kind) {
            case Action::Kind::solver_leaf:
                fill = detail::partial_leaf(action.tactic);
                break;
            case Action::Kind::then_tactic:
                fill = detail::partial_then(detail::partial_leaf(action.tactic),
                                            detail::partial_hole());
                break;
            case Action::Kind::pool_leaf:
                fill = detail::partial_pool_ref(action.pool_index);
                break;
            case Action::Kind::if_split:
                fill = detail::partial_ite(action.pred, detail::partial_hole(),
                                           detail::partial_hole());
                break;
            case Action::Kind::try_for_pool:
                fill = detail::partial_or_else(
                    detail::partial_try_for(detail::partial_pool_ref(action.pool_index),
                                            action.try_for_ms),
                    detail::partial_hole());
                break;
        }
        bool done = false;
        return DerivationState(detail::replace_leftmost_hole(state.root(), fill, done));
    }

    StrategyRef finish(const DerivationState& state) const {
        if (!state.terminal()) throw NotTerminalError{};
        return realize(state.root());
    }

  private:
    StrategyRef realize(const PartialRef& n) const {
        switch (n->kind) {
            case PartialNode::Kind::leaf:
                return leaf(n->tactic);
            case PartialNode::Kind::pool_ref:
                return cfg_.linear_pool.at(static_cast<std::size_t>(n->pool_index));
            case PartialNode::Kind::then:
                return then(realize(n->child0), realize(n->child1));
            case PartialNode::Kind::or_else:
                return or_else(realize(n->child0), realize(n->child1));
            case PartialNode::Kind::try_for:
                return try_for(realize(n->child0), n->try_for_ms);
            case PartialNode::Kind::ite:
                return ite(n->pred, realize(n->child0), realize(n->child1));
            case PartialNode::Kind::hole:
                break;
        }
        throw NotTerminalError{};
    }

    const TacticCatalog* catalog_;
    StageConfig cfg_;
    std::vector<Predicate> predicates_;
};

}  // namespace stratsynth
