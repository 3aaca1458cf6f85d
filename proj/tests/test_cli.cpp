#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "stratsynth/config.hpp"
#include "stratsynth/driver.hpp"
#include "stratsynth/report.hpp"

using namespace stratsynth;

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("stratsynth-cli-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string catalog_path() {
    return std::string(STRATSYNTH_DATA_DIR) + "/catalogs/qf_bv.json";
}

nlohmann::json minimal_config() {
    return nlohmann::json{{"catalog_path", catalog_path()}, {"backend", "simulated"}};
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j) {
    const fs::path path = dir / "config.json";
    std::ofstream out(path);
    out << j.dump(2);
    return path;
}

#ifdef STRATSYNTH_CLI_PATH
int run_cli(const std::string& args) {
    const std::string cmd = std::string(STRATSYNTH_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

}  // namespace

TEST_CASE("config loading applies defaults and validates") {
    const fs::path dir = fresh_dir("config");

    SECTION("minimal config gets the standard defaults") {
        const CliConfig cfg = load_config(write_config(dir, minimal_config()));
        CHECK(cfg.n_linear == 20);
        CHECK(cfg.stage1_budget == 800);
        CHECK(cfg.stage2_budget == 300000);
        CHECK(cfg.timeout_ms == 10000);
        CHECK(cfg.workers == 1);
        CHECK(cfg.backend == "simulated");
    }

    SECTION("zero timeout is rejected") {
        nlohmann::json j = minimal_config();
        j["timeout_ms"] = 0;
        CHECK_THROWS_AS(load_config(write_config(dir, j)), ConfigError);
    }

    SECTION("unknown keys are rejected by name") {
        nlohmann::json j = minimal_config();
        j["foo"] = 1;
        try {
            load_config(write_config(dir, j));
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("foo") != std::string::npos);
        }
    }

    SECTION("missing catalog path is rejected") {
        nlohmann::json j = minimal_config();
        j["catalog_path"] = "/does/not/exist.json";
        CHECK_THROWS_AS(load_config(write_config(dir, j)), ConfigError);
    }

    SECTION("external backend needs a solver command and benchmarks") {
        nlohmann::json j = minimal_config();
        j["backend"] = "external";
        CHECK_THROWS_AS(config_from_json(j), ConfigError);
    }

    SECTION("emitting and reloading a config is a fixed point") {
        const CliConfig cfg = load_config(write_config(dir, minimal_config()));
        const CliConfig again = config_from_json(config_to_json(cfg));
        CHECK(cfg == again);
        CHECK(config_to_json(cfg) == config_to_json(again));
    }
}

TEST_CASE("driver wires a simulated setup") {
    const fs::path dir = fresh_dir("driver");
    nlohmann::json j = minimal_config();
    j["sim_instances"] = 8;
    j["output_dir"] = (dir / "out").string();
    const CliConfig cfg = load_config(write_config(dir, j));

    DriverSetup setup = make_setup(cfg);
    CHECK(setup.training.size() == 8);
    CHECK(setup.backend->tag() == "simulated");
    for (const Instance& inst : setup.training) CHECK(inst.features.has_value());

    const PipelineConfig p = pipeline_config_from(cfg, setup.catalog, setup.training);
    CHECK(p.n_linear == 20);
    CHECK(p.timeout_ms == 10000);
}

TEST_CASE("report emission") {
    ScoreReport rep;
    rep.strategy = "(then simplify smt)";
    rep.strategy_key = "(then simplify smt)";
    rep.timeout_ms = 10000;
    rep.total = 4;
    rep.solved = 2;
    rep.correct = 2;
    rep.wrong = 0;
    rep.percent_solved = 50.0;
    rep.par2 = 12.3456;
    rep.par10 = 52.5;
    rep.rows = {{"a", SolveResult::sat, 1500, Classification::correct},
                {"b", SolveResult::unsat, 900, Classification::correct},
                {"c", SolveResult::timeout, 10000, Classification::unsolved},
                {"d", SolveResult::unknown, 400, Classification::unsolved}};

    SECTION("text includes the solved percentage") {
        Report report;
        report.strategies.push_back(rep);
        const std::string text = emit_report(report, ReportFormat::text);
        CHECK(text.find("solved: 50.0%") != std::string::npos);
        CHECK(text.find("par10") != std::string::npos);
    }

    SECTION("an empty record set surfaces as an error row") {
        Report report;
        report.errors.push_back(EmptySetError{}.what());
        const std::string text = emit_report(report, ReportFormat::text);
        CHECK(text.find("error: empty record set") != std::string::npos);
        const nlohmann::json j = report_to_json(report);
        REQUIRE(j.contains("errors"));
    }

    SECTION("json round-trips without loss") {
        const nlohmann::json j = score_report_to_json(rep);
        const ScoreReport back = score_report_from_json(j);
        CHECK(back.strategy == rep.strategy);
        CHECK(back.total == rep.total);
        CHECK(back.correct == rep.correct);
        CHECK(back.par2 == rep.par2);
        CHECK(back.par10 == rep.par10);
        REQUIRE(back.rows.size() == rep.rows.size());
        CHECK(back.rows[2].result == SolveResult::timeout);
        CHECK(score_report_to_json(back) == j);
    }
}

#ifdef STRATSYNTH_CLI_PATH

TEST_CASE("command line drives the pipeline end to end") {
    const fs::path dir = fresh_dir("binary");
    const fs::path out = dir / "out";

    nlohmann::json j = minimal_config();
    j["sim_instances"] = 10;
    j["stage1_budget"] = 30;
    j["stage2_budget"] = 150;
    j["n_linear"] = 2;
    j["timeout_ms"] = 2000;
    j["p1_size"] = 10;
    j["output_dir"] = out.string();
    const fs::path config = write_config(dir, j);

    SECTION("synth writes all artifacts and succeeds") {
        REQUIRE(run_cli("synth --config " + config.string()) == 0);
        for (const char* name :
             {"cache.jsonl", "pool.txt", "portfolio.txt", "final_strategy.txt", "report.json",
              "manifest.json"})
            CHECK(fs::exists(out / name));
    }

    SECTION("phases can run separately from the shared cache") {
        REQUIRE(run_cli("stage1 --config " + config.string()) == 0);
        REQUIRE(fs::exists(out / "pool.txt"));
        REQUIRE(run_cli("select --config " + config.string() + " --pool " +
                        (out / "pool.txt").string()) == 0);
        REQUIRE(fs::exists(out / "portfolio.txt"));
        REQUIRE(run_cli("stage2 --config " + config.string() + " --portfolio " +
                        (out / "portfolio.txt").string()) == 0);
        CHECK(fs::exists(out / "final_strategy.txt"));
        CHECK(fs::exists(out / "report.json"));
    }

    SECTION("eval scores a strategy file") {
        const fs::path strategy = dir / "strategy.txt";
        std::ofstream(strategy) << "(then simplify smt)\n";
        CHECK(run_cli("eval --config " + config.string() + " --strategy " +
                      strategy.string()) == 0);
        CHECK(fs::exists(out / "report.json"));
    }

    SECTION("nonexistent config exits with the config error code") {
        CHECK(run_cli("synth --config /does/not/exist.json") == 2);
    }

    SECTION("config errors exit with code 2") {
        nlohmann::json bad = minimal_config();
        bad["timeout_ms"] = -5;
        const fs::path bad_path = dir / "bad.json";
        std::ofstream(bad_path) << bad.dump();
        CHECK(run_cli("synth --config " + bad_path.string()) == 2);
    }

    SECTION("missing solver binaries exit with code 3") {
        const fs::path bench = dir / "bench";
        fs::create_directories(bench);
        std::ofstream(bench / "one.smt2")
            << "(set-info :status sat)\n(declare-const x Int)\n(assert (> x 0))\n(check-sat)\n";
        nlohmann::json ext = minimal_config();
        ext["backend"] = "external";
        ext["solver_command_template"] = "no-such-solver-binary {file}";
        ext["benchmark_dirs"] = {bench.string()};
        ext["output_dir"] = out.string();
        const fs::path ext_path = dir / "ext.json";
        std::ofstream(ext_path) << ext.dump();
        CHECK(run_cli("synth --config " + ext_path.string()) == 3);
    }

    SECTION("features prints probe values") {
        const fs::path inst = dir / "inst.smt2";
        std::ofstream(inst) << "(declare-const x Int)(assert (> x 0))(check-sat)\n";
        CHECK(run_cli("features --config " + config.string() + " --instance " +
                      inst.string()) == 0);
    }

    SECTION("report summarizes an existing cache") {
        REQUIRE(run_cli("synth --config " + config.string()) == 0);
        CHECK(run_cli("report --cache " + (out / "cache.jsonl").string()) == 0);
        CHECK(run_cli("report --cache " + (out / "cache.jsonl").string() +
                      " --format json") == 0);
    }

    SECTION("identical seeds give byte-identical reports") {
        REQUIRE(run_cli("synth --config " + config.string()) == 0);
        const std::string first = read_text_file(out / "report.json");
        const fs::path out2 = dir / "out2";
        REQUIRE(run_cli("synth --config " + config.string() + " --out " + out2.string()) == 0);
        CHECK(read_text_file(out2 / "report.json") == first);
    }

    SECTION("--seed overrides the config seed") {
        const fs::path out_a = dir / "seed-a";
        const fs::path out_b = dir / "seed-b";
        const fs::path out_c = dir / "seed-c";
        REQUIRE(run_cli("synth --config " + config.string() + " --seed 5 --out " +
                        out_a.string()) == 0);
        REQUIRE(run_cli("synth --config " + config.string() + " --seed 5 --out " +
                        out_b.string()) == 0);
        REQUIRE(run_cli("synth --config " + config.string() + " --seed 6 --out " +
                        out_c.string()) == 0);
        CHECK(read_text_file(out_a / "report.json") == read_text_file(out_b / "report.json"));
        CHECK(read_text_file(out_a / "report.json") != read_text_file(out_c / "report.json"));
    }

    SECTION("wrong answers trigger the soundness alarm exit code") {
        // A lying solver: answers the opposite of the status annotation.
        const fs::path bench = dir / "bench";
        fs::create_directories(bench);
        std::ofstream(bench / "one.smt2")
            << "(set-info :status sat)\n(declare-const x Int)\n(assert (> x 0))\n(check-sat)\n";
        const fs::path liar = dir / "liar.sh";
        std::ofstream(liar) << "#!/bin/sh\n"
                            << "case $(grep -o ':status [a-z]*' \"$1\" | cut -d' ' -f2) in\n"
                            << "  sat) echo unsat;;\n"
                            << "  unsat) echo sat;;\n"
                            << "  *) echo unknown;;\n"
                            << "esac\n";
        fs::permissions(liar, fs::perms::owner_all);

        nlohmann::json ext = minimal_config();
        ext["backend"] = "external";
        ext["solver_command_template"] = liar.string() + " {file}";
        ext["benchmark_dirs"] = {bench.string()};
        ext["output_dir"] = (dir / "liar-out").string();
        const fs::path ext_path = dir / "liar.json";
        std::ofstream(ext_path) << ext.dump();

        const fs::path strategy = dir / "strategy.txt";
        std::ofstream(strategy) << "smt\n";
        CHECK(run_cli("eval --config " + ext_path.string() + " --strategy " +
                      strategy.string()) == 4);
    }
}

#endif  // STRATSYNTH_CLI_PATH
