// ============================================================================
// stratsynth/strategy.hpp — strategy expression trees
// ============================================================================
//
// A strategy is an immutable expression tree over tactics and combinators:
//
//   tactic          — a bare tactic application, e.g. smt
//   using_params    — a tactic application with parameter settings
//   then            — apply a tactic, then continue with a strategy
//   or_else         — run the second strategy if the first one fails
//   try_for         — fail the child strategy after a millisecond budget
//   ite             — branch on a probe predicate
//
// Nodes are shared immutably (StrategyRef); building a new strategy never
// mutates an existing one.
//
// ============================================================================

#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "stratsynth/types.hpp"

namespace stratsynth {

enum class StrategyKind : std::uint8_t { tactic, using_params, then, or_else, try_for, ite };

struct StrategyNode;
using StrategyRef = std::shared_ptr<const StrategyNode>;

struct StrategyNode {
    StrategyKind kind = StrategyKind::tactic;

    std::string tactic;  // tactic / using_params
    std::vector<std::pair<std::string, ParamValue>> params;  // using_params, given order

    StrategyRef child0;  // then: head (an application); or_else: first; try_for/ite: child / then-branch
    StrategyRef child1;  // then: tail; or_else: second; ite: else-branch

    Predicate pred;             // ite
    std::int64_t try_for_ms = 0;  // try_for

    bool is_application() const {
        return kind == StrategyKind::tactic || kind == StrategyKind::using_params;
    }
};

// ── Builders ────────────────────────────────────────────────────────────────

inline StrategyRef leaf(std::string tactic) {
    auto n = std::make_shared<StrategyNode>();
    n->kind = StrategyKind::tactic;
    n->tactic = std::move(tactic);
    return n;
}

inline StrategyRef with_params(std::string tactic,
                               std::vector<std::pair<std::string, ParamValue>> settings) {
    auto n = std::make_shared<StrategyNode>();
    n->kind = StrategyKind::using_params;
    n->tactic = std::move(tactic);
    n->params = std::move(settings);
    return n;
}

inline StrategyRef then(StrategyRef head, StrategyRef tail) {
    auto n = std::make_shared<StrategyNode>();
    n->kind = StrategyKind::then;
    n->child0 = std::move(head);
    n->child1 = std::move(tail);
    return n;
}

inline StrategyRef or_else(StrategyRef first, StrategyRef second) {
    auto n = std::make_shared<StrategyNode>();
    n->kind = StrategyKind::or_else;
    n->child0 = std::move(first);
    n->child1 = std::move(second);
    return n;
}

inline StrategyRef try_for(StrategyRef child, std::int64_t millis) {
    auto n = std::make_shared<StrategyNode>();
    n->kind = StrategyKind::try_for;
    n->child0 = std::move(child);
    n->try_for_ms = millis;
    return n;
}

inline StrategyRef ite(Predicate pred, StrategyRef then_branch, StrategyRef else_branch) {
    auto n = std::make_shared<StrategyNode>();
    n->kind = StrategyKind::ite;
    n->pred = std::move(pred);
    n->child0 = std::move(then_branch);
    n->child1 = std::move(else_branch);
    return n;
}

// ── Structural equality ─────────────────────────────────────────────────────

inline bool structurally_equal(const StrategyNode& a, const StrategyNode& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case StrategyKind::tactic:
            return a.tactic == b.tactic;
        case StrategyKind::using_params:
            return a.tactic == b.tactic && a.params == b.params;
        case StrategyKind::then:
        case StrategyKind::or_else:
            return structurally_equal(*a.child0, *b.child0) &&
                   structurally_equal(*a.child1, *b.child1);
        case StrategyKind::try_for:
            return a.try_for_ms == b.try_for_ms && structurally_equal(*a.child0, *b.child0);
        case StrategyKind::ite:
            return a.pred == b.pred && structurally_equal(*a.child0, *b.child0) &&
                   structurally_equal(*a.child1, *b.child1);
    }
    return false;
}

// True when the strategy is a linear tactic sequence (no or-else/try-for/if).
inline bool is_branch_free(const StrategyNode& n) {
    switch (n.kind) {
        case StrategyKind::tactic:
        case StrategyKind::using_params:
            return true;
        case StrategyKind::then:
            return is_branch_free(*n.child0) && is_branch_free(*n.child1);
        default:
            return false;
    }
}

// ── Rendering ───────────────────────────────────────────────────────────────
// Single-line s-expression in the surface syntax, e.g.
//   (if is-pb (then propagate-values sat) smt)

namespace detail {

inline void render_into(const StrategyNode& n, std::string& out, bool sort_params) {
    switch (n.kind) {
        case StrategyKind::tactic:
            out += n.tactic;
            return;
        case StrategyKind::using_params: {
            out += "(using-params ";
            out += n.tactic;
            auto settings = n.params;
            if (sort_params)
                std::sort(settings.begin(), settings.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });
            for (const auto& [name, value] : settings) {
                out += " :";
                out += name;
                out += ' ';
                out += param_value_text(value);
            }
            out += ')';
            return;
        }
        case StrategyKind::then:
            out += "(then ";
            render_into(*n.child0, out, sort_params);
            out += ' ';
            render_into(*n.child1, out, sort_params);
            out += ')';
            return;
        case StrategyKind::or_else:
            out += "(or-else ";
            render_into(*n.child0, out, sort_params);
            out += ' ';
            render_into(*n.child1, out, sort_params);
            out += ')';
            return;
        case StrategyKind::try_for:
            out += "(try-for ";
            render_into(*n.child0, out, sort_params);
            out += ' ';
            out += std::to_string(n.try_for_ms);
            out += ')';
            return;
        case StrategyKind::ite:
            out += "(if ";
            out += n.pred.text();
            out += ' ';
            render_into(*n.child0, out, sort_params);
            out += ' ';
            render_into(*n.child1, out, sort_params);
            out += ')';
            return;
    }
}

}  // namespace detail

inline std::string render(const StrategyNode& n) {
    std::string out;
    detail::render_into(n, out, /*sort_params=*/false);
    return out;
}

// Deterministic deduplication/cache key: the rendering with parameter
// settings sorted by name. Structurally equal trees always share a key.
inline std::string canonical_key(const StrategyNode& n) {
    std::string out;
    detail::render_into(n, out, /*sort_params=*/true);
    return out;
}

}  // namespace stratsynth
