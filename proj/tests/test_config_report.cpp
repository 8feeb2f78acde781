#include "doctest.h"

#include "mcf/config.hpp"
#include "mcf/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mcf;

namespace {

const char* kBase = R"({
  // flat torus with two monitors
  "scenario": {"id": "productTorus", "params": {"b": 2.0}, "sizes": [16, 16]},
  "tEnd": 0.02,
  "snapshotEvery": 5,
  "monitors": [{"id": "flatness"}, {"id": "area"}]
})";

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing fills defaults and round-trips") {
    const auto cfg = parse_config(kBase);
    CHECK(cfg.scenario.id == "productTorus");
    CHECK(cfg.scenario.sizes == std::vector<int>{16, 16});
    CHECK(cfg.integrator == Integrator::rk4);
    CHECK(cfg.order == 2);
    CHECK(cfg.monitors.size() == 2);
    const auto again = parse_config(to_json(cfg).dump());
    CHECK(config_hash(again) == config_hash(cfg));
    CHECK(to_json(again) == to_json(cfg));
    CHECK(hex64(config_hash(cfg)).size() == 16);
}

TEST_CASE("config errors") {
    SUBCASE("syntax errors carry a position") {
        try {
            parse_config("{\n  \"tEnd\": 0.1,,\n}");
            FAIL("expected an error");
        } catch (const ConfigError& e) {
            CHECK(e.line() == 2);
            CHECK(e.column() > 0);
        }
    }
    SUBCASE("unknown keys") {
        CHECK_THROWS_AS(parse_config(R"({"scenario": {"id": "circle"}, "tEnds": 1})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"scenario": {"id": "circle", "params": {"q": 1}}})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"scenario": {"id": "circle"}, "monitors": [{"id": "area", "x": 1}]})"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"scenario": {"id": "circle"}, "monitors": [{"id": "nope"}]})"), ConfigError);
    }
    SUBCASE("range checks") {
        CHECK_THROWS_AS(parse_config(R"({"scenario": {"id": "circle"}, "cflFactor": 0.6})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"scenario": {"id": "circle"}, "order": 3})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"scenario": {"id": "circle"}, "tEnd": 0})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"scenario": {"id": "circle"}, "p": -1})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"scenario": {"id": "circle"}, "integrator": "leapfrog"})"), ConfigError);
    }
    SUBCASE("duplicate monitor names") {
        CHECK_THROWS_AS(parse_config(R"({"scenario": {"id": "circle"}, "monitors": [{"id": "area"}, {"id": "area"}]})"),
                        ConfigError);
    }
}

TEST_CASE("run, exit status and artifacts") {
    const auto cfg = parse_config(kBase);
    const auto run = run_flow(cfg);
    CHECK(run.report.overall() == Verdict::pass);
    CHECK(exit_status(cfg, run.report) == 0);
    CHECK(run.report.metadata["configHash"] == hex64(config_hash(cfg)));

    SUBCASE("csv formats") {
        const auto* area = run.report.find("area");
        REQUIRE(area);
        const std::string csv = series_csv(area->series.front());
        CHECK(csv.rfind("t,value\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(area->series.front().t.size()) + 1);
        CHECK(steps_csv(run.report.steps).rfind("t,dt,sup_A2,sup_H\n", 0) == 0);
    }
    SUBCASE("manifest lists every written file") {
        const auto dir = std::filesystem::temp_directory_path() / "mcf_report_test";
        std::filesystem::remove_all(dir);
        const auto m = write_run(cfg, run, dir, "inline");
        std::size_t files = 0;
        for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
            if (e.is_regular_file()) ++files;
        CHECK(files == m.artifacts.size());
        for (const auto& a : m.artifacts) CHECK(std::filesystem::exists(dir / a));
        const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
        CHECK(manifest["exitStatus"] == 0);
        const auto eff = parse_config(slurp(dir / "effective_config.json"));
        CHECK(config_hash(eff) == config_hash(cfg));
        std::filesystem::remove_all(dir);
    }
    SUBCASE("reports are reproducible") {
        const auto again = run_flow(cfg);
        CHECK(to_json(again.report).dump() == to_json(run.report).dump());
    }
}

TEST_CASE("a failing monitor and a required completion map to distinct exit codes") {
    auto tight = parse_config(R"({
      "scenario": {"id": "genericTorus", "sizes": [32, 32]},
      "tEnd": 0.05,
      "monitors": [{"id": "evolution", "tolerance": 1e-16}]
    })");
    const auto r = run_flow(tight);
    CHECK(r.report.find("evolution")->verdict == Verdict::fail);
    CHECK(exit_status(tight, r.report) == 2);

    auto ext = parse_config(R"({
      "scenario": {"id": "productTorus", "sizes": [16, 16]},
      "tEnd": 0.6,
      "requireCompletion": true
    })");
    const auto e = run_flow(ext);
    CHECK(e.report.status == FlowStatus::singularity_stop);
    CHECK(exit_status(ext, e.report) == 3);
    ext.require_completion = false;
    CHECK(exit_status(ext, e.report) == 0);
}

TEST_CASE("invalid scenario parameters surface as config errors") {
    CHECK_THROWS_AS(run_flow(parse_config(R"({"scenario": {"id": "productTorus", "params": {"shear": 2}}})")),
                    ConfigError);
}
