#include <catch2/catch.hpp>

#include <random>

#include "stratsynth/mdp.hpp"
#include "stratsynth/validate.hpp"
#include "support/fixtures.hpp"

using namespace stratsynth;
using testsupport::tiny_catalog;

namespace {

bool offers(const std::vector<Action>& actions, Action::Kind kind, const std::string& tactic = "") {
    for (const Action& a : actions)
        if (a.kind == kind && (tactic.empty() || a.tactic == tactic)) return true;
    return false;
}

DerivationState random_walk(const SynthesisMdp& mdp, std::mt19937_64& rng, int steps) {
    DerivationState s = mdp.initial_state();
    for (int i = 0; i < steps && !s.terminal(); ++i) {
        const std::vector<Action> legal = mdp.legal_actions(s);
        s = mdp.apply_action(s, legal[rng() % legal.size()]);
    }
    return s;
}

}  // namespace

TEST_CASE("initial state is one strategy hole") {
    const TacticCatalog cat = tiny_catalog();
    StageConfig linear;
    linear.stage = Stage::linear;
    SynthesisMdp mdp(cat, linear);
    const DerivationState s = mdp.initial_state();
    CHECK_FALSE(s.terminal());
    CHECK(s.text() == "<Strategy>");
}

TEST_CASE("combine stage requires a pool") {
    const TacticCatalog cat = tiny_catalog();
    StageConfig combine;
    combine.stage = Stage::combine;
    CHECK_THROWS_AS(SynthesisMdp(cat, combine), ConfigError);

    combine.linear_pool = {then(leaf("simplify"), leaf("smt"))};
    const SynthesisMdp mdp(cat, combine);
    CHECK(mdp.initial_state().text() == "<Strategy>");

    StageConfig branched_pool = combine;
    branched_pool.linear_pool = {or_else(leaf("smt"), leaf("sat"))};
    CHECK_THROWS_AS(SynthesisMdp(cat, branched_pool), ConfigError);
}

TEST_CASE("linear legal actions follow the construction rules") {
    const TacticCatalog cat = testsupport::data_catalog("qf_nia.json");
    StageConfig stage;
    stage.stage = Stage::linear;
    SynthesisMdp mdp(cat, stage);

    DerivationState s = mdp.initial_state();
    std::vector<Action> acts = mdp.legal_actions(s);

    SECTION("fresh state excludes bit-blast, offers every solver leaf") {
        CHECK_FALSE(offers(acts, Action::Kind::then_tactic, "bit-blast"));
        for (const TacticSpec* w : cat.solver_wrappers())
            CHECK(offers(acts, Action::Kind::solver_leaf, w->name));
        CHECK_FALSE(offers(acts, Action::Kind::then_tactic, "smt"));
    }

    SECTION("bit-blast allowed only immediately after simplify") {
        Action simplify;
        simplify.kind = Action::Kind::then_tactic;
        simplify.tactic = "simplify";
        s = mdp.apply_action(s, simplify);
        CHECK(offers(mdp.legal_actions(s), Action::Kind::then_tactic, "bit-blast"));

        Action solve_eqs;
        solve_eqs.kind = Action::Kind::then_tactic;
        solve_eqs.tactic = "solve-eqs";
        s = mdp.apply_action(s, solve_eqs);
        CHECK_FALSE(offers(mdp.legal_actions(s), Action::Kind::then_tactic, "bit-blast"));
    }

    SECTION("nla2bv at most once per sequence") {
        Action nla2bv;
        nla2bv.kind = Action::Kind::then_tactic;
        nla2bv.tactic = "nla2bv";
        s = mdp.apply_action(s, nla2bv);
        CHECK_FALSE(offers(mdp.legal_actions(s), Action::Kind::then_tactic, "nla2bv"));
    }

    SECTION("length cap leaves only solver leaves") {
        StageConfig short_cfg;
        short_cfg.stage = Stage::linear;
        short_cfg.max_linear_len = 2;
        SynthesisMdp capped(cat, short_cfg);
        DerivationState state = capped.initial_state();
        Action simplify;
        simplify.kind = Action::Kind::then_tactic;
        simplify.tactic = "simplify";
        state = capped.apply_action(state, simplify);
        for (const Action& a : capped.legal_actions(state))
            CHECK(a.kind == Action::Kind::solver_leaf);
    }

    SECTION("terminal state has no actions") {
        Action smt;
        smt.kind = Action::Kind::solver_leaf;
        smt.tactic = "smt";
        s = mdp.apply_action(s, smt);
        CHECK(s.terminal());
        CHECK_THROWS_AS(mdp.legal_actions(s), TerminalStateError);
    }
}

TEST_CASE("combine legal actions enforce depth, leaves and try-for nesting") {
    const TacticCatalog cat = tiny_catalog();
    StageConfig stage;
    stage.stage = Stage::combine;
    stage.linear_pool = testsupport::sample_linear_pool(cat, 3, 7);
    SynthesisMdp mdp(cat, stage);

    SECTION("if offered within the first three depths only") {
        DerivationState s = mdp.initial_state();
        Action wrap;
        wrap.kind = Action::Kind::try_for_pool;
        wrap.pool_index = 0;
        wrap.try_for_ms = cat.try_for_ms[0];
        for (int depth = 0; depth < 3; ++depth) {
            CHECK(offers(mdp.legal_actions(s), Action::Kind::if_split));
            s = mdp.apply_action(s, wrap);  // fallback hole one level deeper
        }
        CHECK_FALSE(offers(mdp.legal_actions(s), Action::Kind::if_split));
    }

    SECTION("no try-for under an enclosing try-for") {
        const DerivationState under(
            detail::partial_try_for(detail::partial_hole(), 1000));
        const std::vector<Action> acts = mdp.legal_actions(under);
        CHECK(offers(acts, Action::Kind::pool_leaf));
        CHECK_FALSE(offers(acts, Action::Kind::try_for_pool));
    }

    SECTION("pool leaf is always legal") {
        std::mt19937_64 rng(11);
        for (int i = 0; i < 50; ++i) {
            const DerivationState s = random_walk(mdp, rng, static_cast<int>(rng() % 6));
            if (s.terminal()) continue;
            CHECK(offers(mdp.legal_actions(s), Action::Kind::pool_leaf));
        }
    }

    SECTION("leaf budget blocks growth actions") {
        StageConfig small = stage;
        small.max_leaves = 2;
        SynthesisMdp capped(cat, small);
        DerivationState s = capped.initial_state();
        Action wrap;
        wrap.kind = Action::Kind::try_for_pool;
        wrap.pool_index = 0;
        wrap.try_for_ms = cat.try_for_ms[0];
        s = capped.apply_action(s, wrap);  // one leaf placed, one hole left
        const std::vector<Action> acts = capped.legal_actions(s);
        CHECK(offers(acts, Action::Kind::pool_leaf));
        CHECK_FALSE(offers(acts, Action::Kind::if_split));
        CHECK_FALSE(offers(acts, Action::Kind::try_for_pool));
    }
}

TEST_CASE("apply_action rewrites the leftmost hole deterministically") {
    const TacticCatalog cat = tiny_catalog();
    StageConfig stage;
    stage.stage = Stage::linear;
    SynthesisMdp mdp(cat, stage);

    DerivationState s = mdp.initial_state();
    Action simplify;
    simplify.kind = Action::Kind::then_tactic;
    simplify.tactic = "simplify";
    s = mdp.apply_action(s, simplify);
    CHECK(s.text() == "(then simplify <Strategy>)");

    Action smt;
    smt.kind = Action::Kind::solver_leaf;
    smt.tactic = "smt";
    const DerivationState done = mdp.apply_action(s, smt);
    CHECK(done.terminal());
    CHECK(done.text() == "(then simplify smt)");

    SECTION("identical state and action give structurally equal successors") {
        const DerivationState again = mdp.apply_action(s, smt);
        CHECK(again == done);
    }

    SECTION("finish returns the completed tree") {
        const StrategyRef ast = mdp.finish(done);
        CHECK(structurally_equal(*ast, *then(leaf("simplify"), leaf("smt"))));
        CHECK_THROWS_AS(mdp.finish(s), NotTerminalError);
    }

    SECTION("illegal actions are rejected") {
        Action bitblast;
        bitblast.kind = Action::Kind::then_tactic;
        bitblast.tactic = "bit-blast";  // last tactic is simplify on s, so legal there
        CHECK_NOTHROW(mdp.apply_action(s, bitblast));
        DerivationState after_solve = mdp.apply_action(s, [] {
            Action a;
            a.kind = Action::Kind::then_tactic;
            a.tactic = "solve-eqs";
            return a;
        }());
        CHECK_THROWS_AS(mdp.apply_action(after_solve, bitblast), IllegalActionError);
    }
}

TEST_CASE("if at the depth limit is an illegal action") {
    const TacticCatalog cat = tiny_catalog();
    StageConfig stage;
    stage.stage = Stage::combine;
    stage.linear_pool = testsupport::sample_linear_pool(cat, 2, 3);
    SynthesisMdp mdp(cat, stage);

    DerivationState s = mdp.initial_state();
    Action wrap;
    wrap.kind = Action::Kind::try_for_pool;
    wrap.pool_index = 0;
    wrap.try_for_ms = cat.try_for_ms[0];
    for (int i = 0; i < 3; ++i) s = mdp.apply_action(s, wrap);  // hole now at depth 3

    Action split;
    split.kind = Action::Kind::if_split;
    split.pred = mdp.predicates().front();
    CHECK_THROWS_AS(mdp.apply_action(s, split), IllegalActionError);
}

TEST_CASE("random rollouts always produce rule-clean strategies") {
    std::mt19937_64 rng(20240118);
    for (const char* name : {"qf_bv.json", "qf_nia.json"}) {
        const TacticCatalog cat = testsupport::data_catalog(name);

        StageConfig linear;
        linear.stage = Stage::linear;
        SynthesisMdp linear_mdp(cat, linear);
        for (int i = 0; i < 1500; ++i) {
            const StrategyRef s = testsupport::random_terminal(linear_mdp, rng);
            INFO("linear " << name << ": " << render(*s));
            REQUIRE(validate(*s, cat).empty());
            REQUIRE(is_branch_free(*s));
        }

        TacticCatalog with_tryfor = cat;
        with_tryfor.try_for_ms = default_try_for_candidates(10000);
        StageConfig combine;
        combine.stage = Stage::combine;
        combine.linear_pool = testsupport::sample_linear_pool(with_tryfor, 5, 99);
        SynthesisMdp combine_mdp(with_tryfor, combine);
        for (int i = 0; i < 1500; ++i) {
            const StrategyRef s = testsupport::random_terminal(combine_mdp, rng);
            INFO("combine " << name << ": " << render(*s));
            REQUIRE(validate(*s, with_tryfor).empty());
        }
    }
}

TEST_CASE("a terminal state is always reachable within the action bound") {
    const TacticCatalog cat = tiny_catalog();
    StageConfig stage;
    stage.stage = Stage::combine;
    stage.linear_pool = testsupport::sample_linear_pool(cat, 3, 21);
    SynthesisMdp mdp(cat, stage);

    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        DerivationState s = random_walk(mdp, rng, static_cast<int>(rng() % 8));
        int steps = 0;
        while (!s.terminal()) {
            // Filling holes with pool leaves always terminates.
            const std::vector<Action> legal = mdp.legal_actions(s);
            s = mdp.apply_action(s, legal.front());
            ++steps;
            REQUIRE(steps <= stage.max_linear_len + stage.max_leaves);
        }
    }
}
