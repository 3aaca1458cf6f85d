#include <catch2/catch.hpp>

#include <random>

#include "stratsynth/catalog.hpp"
#include "stratsynth/parser.hpp"
#include "stratsynth/strategy.hpp"
#include "stratsynth/validate.hpp"
#include "support/fixtures.hpp"

using namespace stratsynth;
using testsupport::tiny_catalog;

TEST_CASE("render produces the surface syntax") {
    const StrategyRef branched =
        ite(Predicate::boolean("is-pb"), then(leaf("propagate-values"), leaf("sat")),
            leaf("smt"));
    CHECK(render(*branched) == "(if is-pb (then propagate-values sat) smt)");

    CHECK(render(*leaf("smt")) == "smt");

    const StrategyRef configured =
        then(with_params("simplify", {{"som", ParamValue(true)}}), leaf("smt"));
    CHECK(render(*configured) == "(then (using-params simplify :som true) smt)");
}

TEST_CASE("parse handles grammar productions") {
    const TacticCatalog cat = tiny_catalog();

    SECTION("or-else with try-for") {
        const StrategyRef s = parse_strategy("(or-else (try-for smt 4000) smt)", cat);
        REQUIRE(s->kind == StrategyKind::or_else);
        REQUIRE(s->child0->kind == StrategyKind::try_for);
        CHECK(s->child0->try_for_ms == 4000);
        CHECK(s->child0->child0->tactic == "smt");
        CHECK(s->child1->tactic == "smt");
    }

    SECTION("numeric predicate") {
        const StrategyRef s = parse_strategy("(if (> num-consts 100) smt sat)", cat);
        REQUIRE(s->kind == StrategyKind::ite);
        CHECK(s->pred.comparison);
        CHECK(s->pred.probe == "num-consts");
        CHECK(s->pred.op == CmpOp::gt);
        CHECK(s->pred.constant == 100);
        CHECK(s->child0->tactic == "smt");
        CHECK(s->child1->tactic == "sat");
    }

    SECTION("unbalanced input") {
        CHECK_THROWS_AS(parse_strategy("(then smt", cat), SyntaxError);
    }

    SECTION("unknown tactic") {
        CHECK_THROWS_AS(parse_strategy("(then frobnicate smt)", cat), UnknownSymbolError);
    }

    SECTION("unknown probe and parameter") {
        CHECK_THROWS_AS(parse_strategy("(if is-qfbv smt sat)", cat), UnknownSymbolError);
        CHECK_THROWS_AS(parse_strategy("(using-params smt :nope 1)", cat), UnknownSymbolError);
    }

    SECTION("whitespace insensitive") {
        const StrategyRef a = parse_strategy("(then simplify smt)", cat);
        const StrategyRef b = parse_strategy("  ( then\n   simplify\t smt )  ", cat);
        CHECK(structurally_equal(*a, *b));
    }

    SECTION("n-ary then folds right") {
        const StrategyRef a = parse_strategy("(then simplify solve-eqs smt)", cat);
        const StrategyRef b = parse_strategy("(then simplify (then solve-eqs smt))", cat);
        CHECK(structurally_equal(*a, *b));
    }

    SECTION("trailing tokens rejected") {
        CHECK_THROWS_AS(parse_strategy("smt smt", cat), SyntaxError);
    }
}

TEST_CASE("canonical keys normalize parameter order") {
    const StrategyRef a = then(
        with_params("simplify", {{"som", ParamValue(true)}, {"flat", ParamValue(false)}}),
        leaf("smt"));
    const StrategyRef b = then(
        with_params("simplify", {{"flat", ParamValue(false)}, {"som", ParamValue(true)}}),
        leaf("smt"));
    CHECK(canonical_key(*a) == canonical_key(*b));
    CHECK_FALSE(render(*a) == render(*b));  // rendering preserves the given order

    const TacticCatalog cat = tiny_catalog();
    const StrategyRef c = parse_strategy("(then simplify smt)", cat);
    const StrategyRef d = parse_strategy("  (then   simplify   smt)", cat);
    CHECK(canonical_key(*c) == canonical_key(*d));

    CHECK(canonical_key(*leaf("smt")) != canonical_key(*leaf("sat")));
}

TEST_CASE("validate reports rule violations") {
    const TacticCatalog cat = tiny_catalog();

    const auto rules_of = [&](const std::string& text) {
        std::vector<Rule> rules;
        for (const Violation& v : validate(*parse_strategy(text, cat), cat))
            rules.push_back(v.rule);
        return rules;
    };

    CHECK(rules_of("(then smt simplify)") == std::vector<Rule>{Rule::R1});
    CHECK(rules_of("(then simplify (then nla2bv (then nla2bv smt)))") ==
          std::vector<Rule>{Rule::R5});
    CHECK(rules_of("(then simplify (then bit-blast sat))") == std::vector<Rule>{});

    SECTION("nested try-for is R2") {
        CHECK(rules_of("(try-for (or-else (try-for smt 100) smt) 4000)") ==
              std::vector<Rule>{Rule::R2});
    }

    SECTION("if depth limit and if after tactics are R3") {
        CHECK(rules_of("(or-else (try-for smt 100) (or-else (try-for smt 100) (or-else "
                       "(try-for smt 100) (if is-pb smt sat))))") ==
              std::vector<Rule>{Rule::R3});
        CHECK(rules_of("(then simplify (if is-pb smt sat))") == std::vector<Rule>{Rule::R3});
    }

    SECTION("bit-blast not after simplify is R6") {
        CHECK(rules_of("(then solve-eqs (then bit-blast sat))") == std::vector<Rule>{Rule::R6});
        CHECK(rules_of("(then bit-blast sat)") == std::vector<Rule>{Rule::R6});
    }

    SECTION("or-else arms are separate sequences") {
        // nla2bv once per arm: each path sees it once.
        CHECK(rules_of("(or-else (then nla2bv smt) (then nla2bv smt))") == std::vector<Rule>{});
        // A then before the or-else extends both arms' paths.
        CHECK(rules_of("(then nla2bv (or-else (then nla2bv smt) smt))") ==
              std::vector<Rule>{Rule::R5});
    }
}

TEST_CASE("predicate pool enumerates booleans and generated comparisons") {
    SECTION("single boolean plus one threshold") {
        const TacticCatalog cat = catalog_from_json(nlohmann::json::parse(R"({
          "logic": "T",
          "tactics": [{"name": "smt", "solver_wrapper": true, "params": []}],
          "probes": [
            {"name": "is-pb", "kind": "boolean"},
            {"name": "num-consts", "kind": "numeric", "thresholds": [100]}
          ]})"));
        const std::vector<Predicate> pool = predicate_pool(cat);
        REQUIRE(pool.size() == 3);
        CHECK(pool[0] == Predicate::boolean("is-pb"));
        CHECK(pool[1] == Predicate::compare("num-consts", CmpOp::gt, 100));
        CHECK(pool[2] == Predicate::compare("num-consts", CmpOp::le, 100));
    }

    SECTION("no probes yields an empty pool") {
        const TacticCatalog cat = catalog_from_json(nlohmann::json::parse(R"({
          "logic": "T",
          "tactics": [{"name": "smt", "solver_wrapper": true, "params": []}],
          "probes": []})"));
        CHECK(predicate_pool(cat).empty());
    }

    SECTION("pool size matches enumeration") {
        const TacticCatalog cat = catalog_from_json(nlohmann::json::parse(R"({
          "logic": "T",
          "tactics": [{"name": "smt", "solver_wrapper": true, "params": []}],
          "probes": [
            {"name": "b1", "kind": "boolean"},
            {"name": "n1", "kind": "numeric", "thresholds": [1, 2, 3]},
            {"name": "n2", "kind": "numeric", "thresholds": [10, 20, 30]}
          ]})"));
        // Independent enumeration of the expected pool.
        std::size_t expected = 0;
        for (const ProbeSpec& p : cat.probes) {
            if (p.kind == ProbeKind::boolean_probe)
                expected += 1;
            else
                expected += p.thresholds.size() * 2;
        }
        CHECK(expected == 13);
        CHECK(predicate_pool(cat).size() == expected);
    }
}

TEST_CASE("catalog loading enforces invariants") {
    SECTION("single-candidate parameters are dropped") {
        const TacticCatalog cat = catalog_from_json(nlohmann::json::parse(R"({
          "logic": "T",
          "tactics": [
            {"name": "simplify", "solver_wrapper": false, "params": [
              {"name": "only_one", "candidates": [true]},
              {"name": "keep", "candidates": [1, 2]}
            ]},
            {"name": "smt", "solver_wrapper": true, "params": []}
          ],
          "probes": []})"));
        REQUIRE(cat.find_tactic("simplify")->params.size() == 1);
        CHECK(cat.find_tactic("simplify")->params[0].name == "keep");
    }

    SECTION("a solver wrapper is required") {
        CHECK_THROWS_AS(catalog_from_json(nlohmann::json::parse(R"({
          "logic": "T",
          "tactics": [{"name": "simplify", "solver_wrapper": false, "params": []}],
          "probes": []})")),
                        ConfigError);
    }

    SECTION("duplicate tactic names are rejected") {
        CHECK_THROWS_AS(catalog_from_json(nlohmann::json::parse(R"({
          "logic": "T",
          "tactics": [
            {"name": "smt", "solver_wrapper": true, "params": []},
            {"name": "smt", "solver_wrapper": true, "params": []}
          ],
          "probes": []})")),
                        ConfigError);
    }

    SECTION("shipped catalogs load") {
        for (const char* name : {"qf_bv.json", "qf_nia.json", "qf_nra.json", "qf_lia.json",
                                 "qf_lra.json", "qf_s.json"}) {
            const TacticCatalog cat = testsupport::data_catalog(name);
            CHECK_FALSE(cat.solver_wrappers().empty());
            CHECK_FALSE(cat.probes.empty());
        }
    }

    SECTION("default try-for candidates derive from the timeout") {
        CHECK(default_try_for_candidates(10000) ==
              std::vector<std::int64_t>{625, 1250, 2500, 5000});
        CHECK(default_try_for_candidates(16) == std::vector<std::int64_t>{1, 2, 4, 8});
    }
}

TEST_CASE("round-trip: parse(render(a)) equals a over random strategies") {
    std::mt19937_64 rng(20240117);
    const TacticCatalog catalogs[] = {tiny_catalog(), testsupport::data_catalog("qf_nia.json")};
    for (const TacticCatalog& cat : catalogs) {
        for (int i = 0; i < 1000; ++i) {
            const StrategyRef a =
                testsupport::random_ast(rng, cat, 1 + static_cast<int>(rng() % 4));
            const std::string text = render(*a);
            INFO("strategy: " << text);
            const StrategyRef b = parse_strategy(text, cat);
            REQUIRE(structurally_equal(*a, *b));
            // Key is a congruence: equal trees, equal keys.
            REQUIRE(canonical_key(*a) == canonical_key(*b));
        }
    }
}

TEST_CASE("canonical key ignores parameter permutations") {
    const TacticCatalog cat = tiny_catalog();
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        std::vector<std::pair<std::string, ParamValue>> settings = {
            {"som", ParamValue((rng() & 1) != 0)}, {"flat", ParamValue((rng() & 1) != 0)}};
        auto shuffled = settings;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const StrategyRef a = then(with_params("simplify", settings), leaf("smt"));
        const StrategyRef b = then(with_params("simplify", shuffled), leaf("smt"));
        REQUIRE(canonical_key(*a) == canonical_key(*b));
    }
}
