#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_helpers.hpp"

using namespace dephase;
using Catch::Approx;

namespace {

json minimal_config() {
    json doc;
    doc["name"] = "unit";
    doc["model"] = {{"hbar", 1.0}, {"x", "1"}, {"y", "1"}};
    doc["system"] = {{"kind", "superposition"}};
    doc["reservoir"] = json::array(
        {{{"kind", "thermal"}, {"beta_homega", 0.7}, {"coupling", "1/10"}}});
    doc["time_grid"] = {{"t_max", 7.0}, {"n_samples", 101}, {"scale", "lambda_t"}};
    doc["outputs"] = {{"csv", "unit.csv"}};
    return doc;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("dephase_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace

TEST_CASE("scenario parsing accepts a minimal document") {
    const auto cfg = parse_scenario(minimal_config());
    CHECK(cfg.name == "unit");
    const auto model = cfg.build_model();
    REQUIRE(model.mode_count() == 1);
    CHECK(model.couplings[0].value == Approx(0.1));
    REQUIRE(model.couplings[0].exact);
    CHECK(*model.couplings[0].exact == Rational::of(1, 10));
    CHECK(cfg.build_system().dim == 2);
    CHECK(cfg.build_reservoir().modes.size() == 1);

    // lambda_t scale: t_max = 7 at lambda = 1/10 is t = 70
    const auto grid = cfg.build_time_grid(model);
    CHECK(grid.back() == Approx(70.0));
}

TEST_CASE("every invalid field is reported at once") {
    json doc;
    doc["model"] = {{"hbar", -1.0}, {"x", "0/3"}};
    doc["system"] = {{"kind", "bogus"}};
    doc["reservoir"] = json::array({{{"kind", "thermal"}, {"beta_homega", -2.0}},
                                    {{"kind", "phase"}, {"r", -3}, {"coupling", "1/10"}}});
    doc["time_grid"] = {{"t_max", -5.0}, {"n_samples", 1}};
    doc["sweep"] = {{"axes", json::array({{{"path", "/nonexistent/field"},
                                           {"values", json::array({1.0})}}})}};
    try {
        parse_scenario(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        auto mentions = [&](const std::string& needle) {
            for (const auto& issue : e.issues)
                if (issue.find(needle) != std::string::npos) return true;
            return false;
        };
        CHECK(mentions("/model/hbar"));
        CHECK(mentions("/model/x"));
        CHECK(mentions("/system/kind"));
        CHECK(mentions("/reservoir/0/beta_homega"));
        CHECK(mentions("/reservoir/0/coupling"));
        CHECK(mentions("/reservoir/1/r"));
        CHECK(mentions("/time_grid/t_max"));
        CHECK(mentions("/time_grid/n_samples"));
        CHECK(mentions("/sweep/axes/0/path"));
        CHECK(e.issues.size() >= 9);
    }
}

TEST_CASE("copies expand into identical modes") {
    json doc = minimal_config();
    doc["reservoir"][0]["copies"] = 15;
    const auto cfg = parse_scenario(doc);
    CHECK(cfg.build_model().mode_count() == 15);
    CHECK(cfg.build_reservoir().modes.size() == 15);
    CHECK(cfg.build_mode_matrices().size() == 15);
}

TEST_CASE("run_scenario writes the declared CSV and a faithful report") {
    const auto dir = temp_dir("run");
    json doc = minimal_config();
    doc["outputs"]["include_oracle"] = true;
    doc["outputs"]["coarse_grain_resolution"] = 2.0;  // lambda_t units
    const auto cfg = parse_scenario(doc);
    const auto report = run_scenario(cfg, dir);

    const auto table = read_csv_file(report.csv_path);
    CHECK(table.header ==
          std::vector<std::string>{"t", "lambda_t", "delta_analytic", "delta_oracle",
                                   "delta_coarse"});
    REQUIRE(table.rows.size() == 101);
    CHECK(table.rows.front()[0] == 0.0);
    CHECK(table.rows.back()[1] == Approx(7.0));

    REQUIRE(report.oracle);
    CHECK(report.oracle->max_discrepancy <= 1e-10);
    REQUIRE(report.t_R);
    CHECK(*report.t_R == Approx(20.0 * std::numbers::pi));
    CHECK(report.tau_R == 2.0 * report.t_D);
    REQUIRE(report.fitted);
    CHECK(std::abs(report.fitted->t_D - report.t_D) / report.t_D < 0.01);
    REQUIRE(report.Hs_per_mode.size() == 1);

    SECTION("byte-identical on a second run") {
        const auto dir2 = temp_dir("run2");
        const auto report2 = run_scenario(cfg, dir2);
        CHECK(slurp(report.csv_path) == slurp(report2.csv_path));
    }
    SECTION("sweep configs are rejected by the single-run entry point") {
        json swept = minimal_config();
        swept["sweep"] = {{"axes", json::array({{{"path", "/time_grid/t_max"},
                                                 {"values", json::array({7.0, 8.0})}}})}};
        CHECK_THROWS_AS(run_scenario(parse_scenario(swept), dir), ConfigError);
    }
}

TEST_CASE("CSV round-trips at full precision") {
    const auto dir = temp_dir("csv");
    CsvTable table;
    table.header = {"t", "v"};
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> pick(-1.0, 1.0);
    for (int i = 0; i < 200; ++i)
        table.rows.push_back({0.1 * i * std::numbers::pi, pick(rng) / 3.0});
    const auto path = dir + "/roundtrip.csv";
    write_csv_file(path, table);
    const auto back = read_csv_file(path);
    REQUIRE(back.rows.size() == table.rows.size());
    for (size_t i = 0; i < table.rows.size(); ++i) {
        CHECK(back.rows[i][0] == table.rows[i][0]);  // bit-exact
        CHECK(back.rows[i][1] == table.rows[i][1]);
    }
}

TEST_CASE("sweeps evaluate the full grid deterministically") {
    json doc;
    doc["name"] = "sweep_unit";
    doc["model"] = {{"x", "1"}, {"y", "1"}};
    doc["system"] = {{"kind", "superposition"}};
    doc["reservoir"] = json::array({{{"kind", "custom"},
                                     {"probs", json::array({0.5, 0.0, 0.5})},
                                     {"coupling", "1/4"},
                                     {"copies", 1}}});
    doc["time_grid"] = {{"t_max", 40.0}, {"n_samples", 51}, {"scale", "raw"}};
    doc["outputs"] = {{"csv", "sweep_unit.csv"}};
    doc["sweep"] = {{"axes", json::array({{{"path", "/reservoir/0/copies"},
                                           {"values", json::array({1, 4, 16})}}})}};
    const auto cfg = parse_scenario(doc);

    SECTION("t_D scales as 1/sqrt(M) exactly for exact dyadic variances") {
        const auto dir = temp_dir("sweep");
        const auto result = run_sweep(cfg, dir, 2);
        REQUIRE(result.rows.size() == 3);
        for (const auto& row : result.rows) CHECK(row.error.empty());
        CHECK(result.rows[0].t_D == 2.0 * result.rows[1].t_D);
        CHECK(result.rows[1].t_D == 2.0 * result.rows[2].t_D);
        CHECK(result.rows[0].axis_values == std::vector<double>{1.0});
        CHECK(result.rows[2].axis_values == std::vector<double>{16.0});
    }
    SECTION("combined CSV is byte-identical across worker counts") {
        const auto dir1 = temp_dir("sweep_j1");
        const auto dir3 = temp_dir("sweep_j3");
        const auto r1 = run_sweep(cfg, dir1, 1);
        const auto r3 = run_sweep(cfg, dir3, 3);
        CHECK(slurp(r1.csv_path) == slurp(r3.csv_path));
    }
    SECTION("a config without a sweep section is a single-point grid") {
        json single = doc;
        single.erase("sweep");
        const auto dir = temp_dir("sweep_single");
        const auto result = run_sweep(parse_scenario(single), dir, 2);
        CHECK(result.rows.size() == 1);
        CHECK(std::filesystem::exists(result.csv_path));
    }
    SECTION("per-point failures are recorded, not fatal") {
        json failing = doc;
        failing["outputs"]["include_oracle"] = true;
        failing["reservoir"][0]["kind"] = "thermal";
        failing["reservoir"][0]["beta_homega"] = 3.0;
        failing["reservoir"][0].erase("probs");
        failing["sweep"]["axes"][0]["values"] = json::array({1, 40});
        const auto dir = temp_dir("sweep_fail");
        const auto result = run_sweep(parse_scenario(failing), dir, 2);
        REQUIRE(result.rows.size() == 2);
        CHECK(result.rows[0].error.empty());
        CHECK(result.rows[0].oracle_max_discrepancy <= 1e-10);
        CHECK_FALSE(result.rows[1].error.empty());
        CHECK(result.rows[1].error.find("exceeds the size cap") != std::string::npos);
    }
    SECTION("two axes enumerate row-major in axis order") {
        json two = doc;
        two["sweep"]["axes"] = json::array(
            {{{"path", "/reservoir/0/copies"}, {"values", json::array({1, 4})}},
             {{"path", "/time_grid/t_max"}, {"values", json::array({30.0, 40.0, 50.0})}}});
        const auto dir = temp_dir("sweep_two");
        const auto result = run_sweep(parse_scenario(two), dir, 2);
        REQUIRE(result.rows.size() == 6);
        CHECK(result.rows[0].axis_values == std::vector<double>{1.0, 30.0});
        CHECK(result.rows[1].axis_values == std::vector<double>{1.0, 40.0});
        CHECK(result.rows[3].axis_values == std::vector<double>{4.0, 30.0});
        CHECK(result.rows[5].axis_values == std::vector<double>{4.0, 50.0});
    }
}

TEST_CASE("worker count resolution: flag over env over hardware") {
    setenv("DEPHASE_JOBS", "5", 1);
    CHECK(resolve_jobs(0) == 5);
    CHECK(resolve_jobs(3) == 3);  // explicit flag wins
    setenv("DEPHASE_JOBS", "not-a-number", 1);
    CHECK(resolve_jobs(0) >= 1);
    unsetenv("DEPHASE_JOBS");
    CHECK(resolve_jobs(0) >= 1);
}

TEST_CASE("doubling Delta2 halves t_D across a sweep") {
    json doc;
    doc["name"] = "d2_sweep";
    doc["model"] = {{"x", "1"}, {"y", "1"}};
    doc["system"] = {{"kind", "superposition"}};
    doc["reservoir"] = json::array({{{"kind", "thermal"},
                                     {"beta_homega", 1.0},
                                     {"coupling", "1/10"}}});
    doc["time_grid"] = {{"t_max", 7.0}, {"n_samples", 41}, {"scale", "lambda_t"}};
    doc["outputs"] = {{"csv", "d2.csv"}};
    json betas = json::array();
    for (double d2 : {1.0, 2.0, 4.0, 8.0})
        betas.push_back(std::log1p(1.0 / equivalent_reservoir(d2).nbar));
    doc["sweep"] = {{"axes", json::array({{{"path", "/reservoir/0/beta_homega"},
                                           {"values", betas}}})}};
    const auto dir = temp_dir("d2_sweep");
    const auto result = run_sweep(parse_scenario(doc), dir, 2);
    REQUIRE(result.rows.size() == 4);
    for (size_t i = 1; i < 4; ++i)
        CHECK(result.rows[i - 1].t_D == Approx(2.0 * result.rows[i].t_D).epsilon(1e-8));
}

TEST_CASE("report comparison re-evaluates caption checks") {
    json good;
    good["name"] = "row";
    good["analytic"] = {{"lambda_t_D", 0.0316}};
    good["fitted"] = {{"lambda_t_D", 0.0316}};
    good["caption"] = {{"target", 0.032}, {"rule", "direct"}, {"tolerance_pct", 2.0}};

    const auto ok = compare_reports({json::array({good})});
    CHECK(ok.all_passed);
    CHECK(ok.checked == 1);

    SECTION("a doctored value fails even if the stored flag says otherwise") {
        json doctored = good;
        doctored["analytic"]["lambda_t_D"] = 0.0352;  // 10 percent off
        doctored["caption"]["passed"] = true;
        const auto bad = compare_reports({json::array({doctored})});
        CHECK_FALSE(bad.all_passed);
    }
    SECTION("tolerance override applies") {
        json strict = good;
        const auto outcome = compare_reports({json::array({strict})}, 0.5);
        CHECK_FALSE(outcome.all_passed);  // 1.4 percent error vs 0.5 percent tolerance
    }
    SECTION("sqrt2 ratio rule") {
        json fig4;
        fig4["name"] = "fig4_row";
        fig4["analytic"] = {{"lambda_t_D", 0.34754401304409394}};
        fig4["caption"] = {{"target", 0.49}, {"rule", "sqrt2_ratio"}, {"tolerance_pct", 5.0}};
        CHECK(compare_reports({fig4}).all_passed);
        fig4["caption"]["tolerance_pct"] = 0.1;
        CHECK_FALSE(compare_reports({fig4}).all_passed);
    }
    CHECK_THROWS_AS(compare_reports({}), ConfigError);
}

TEST_CASE("characteristic report for the times verb") {
    json doc = minimal_config();
    doc["model"]["g"] = 1.0;
    const auto j = characteristic_report(parse_scenario(doc));
    CHECK(j["t_D"].is_number());
    CHECK(j["lambda_t_D"].get<double>() == Approx(0.1 * j["t_D"].get<double>()));
    CHECK(j["t_R"].is_number());
    CHECK(j["tau_R"].get<double>() == Approx(2.0 * j["t_D"].get<double>()));
    CHECK(j["t_r"].get<double>() == Approx(std::numbers::pi).margin(1e-12));
    CHECK(j["Hs_per_mode"].is_array());
    CHECK(j["Hs"].is_number());
}

TEST_CASE("preset rows match their captions") {
    // fig4 is the cheapest preset end to end; fig1/fig2 run in the acceptance suite
    const auto dir = temp_dir("preset_fig4");
    const auto reports = run_preset("fig4", dir);
    REQUIRE(reports.size() == 4);
    for (const auto& r : reports) {
        REQUIRE(r.caption);
        CHECK(r.caption->rule == "sqrt2_ratio");
        CHECK(r.caption->passed);
        CHECK(std::filesystem::exists(r.csv_path));
        CHECK(r.revivals.empty());  // no revivals for y = 1/2
    }
    CHECK(std::filesystem::exists(dir + "/fig4_report.json"));
    CHECK_THROWS_AS(run_preset("fig9", dir), ConfigError);
}

TEST_CASE("fig1 preset report carries the advertised quantities") {
    const auto dir = temp_dir("preset_fig1");
    const auto reports = run_preset("fig1", dir);
    REQUIRE(reports.size() == 4);
    for (const auto& r : reports) {
        REQUIRE(r.caption);
        CHECK(r.caption->passed);
        REQUIRE(r.fitted);
        CHECK(std::abs(r.fitted->t_D - r.t_D) / r.t_D < 0.01);
        REQUIRE(r.t_R);
        CHECK(0.1 * *r.t_R == Approx(2.0 * std::numbers::pi));
        CHECK(std::filesystem::exists(r.csv_path));
        CHECK(std::filesystem::exists(r.csv_insert_path));  // revival zoom window
    }
    // the Delta2 = 44.83 row: Hs = 155.3 and a revival at lambda_t = 2 pi
    const auto& row = reports[1];
    REQUIRE(row.Hs_aggregate);
    CHECK(*row.Hs_aggregate == Approx(155.3).margin(0.05));
    REQUIRE_FALSE(row.revivals.empty());
    CHECK(0.1 * row.revivals.front().time == Approx(2.0 * std::numbers::pi).margin(0.01));
    CHECK(row.revivals.front().depth < 1e-9);
    // the M = 1, Delta2 = 6.61 row is small enough for the bundled oracle
    REQUIRE(reports[2].oracle);
    CHECK(reports[2].oracle->max_discrepancy <= 1e-10);
}
