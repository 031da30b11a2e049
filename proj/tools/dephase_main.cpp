#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <dephase/dephase.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitTolerance = 2;
constexpr int kExitSizeCap = 3;

void print_config_error(const dephase::ConfigError& e) {
    std::cerr << "configuration invalid:\n";
    for (const auto& issue : e.issues) std::cerr << "  - " << issue << "\n";
}

int cmd_simulate(const std::string& config_path, bool force_oracle, const std::string& out_dir) {
    dephase::ScenarioConfig cfg = dephase::parse_scenario_file(config_path);
    if (force_oracle) cfg.outputs.include_oracle = true;
    const dephase::RunReport report = dephase::run_scenario(cfg, out_dir);
    std::cout << report.to_json().dump(2) << "\n";

    const auto report_path = std::filesystem::path(out_dir) / (cfg.name + "_report.json");
    std::ofstream os(report_path);
    os << report.to_json().dump(2) << "\n";
    std::cerr << "wrote " << report.csv_path << " and " << report_path.string() << "\n";
    return kExitOk;
}

int cmd_preset(const std::string& name, const std::string& out_dir) {
    const auto reports = dephase::run_preset(name, out_dir);
    bool all_passed = true;
    for (const auto& r : reports) {
        const auto& cap = *r.caption;
        std::printf("%-28s lambda_t_D = %.6g  caption %.3g (%s, tol %.3g%%)  err %.3g%%  %s\n",
                    r.name.c_str(), r.lambda_ref * r.t_D, cap.target, cap.rule.c_str(),
                    cap.tolerance_pct, cap.rel_error_pct, cap.passed ? "PASS" : "FAIL");
        all_passed = all_passed && cap.passed;
    }
    std::cerr << "wrote " << reports.size() << " curve sets under " << out_dir << "\n";
    return all_passed ? kExitOk : kExitTolerance;
}

int cmd_sweep(const std::string& config_path, int jobs, const std::string& out_dir) {
    const dephase::ScenarioConfig cfg = dephase::parse_scenario_file(config_path);
    const dephase::SweepResult result = dephase::run_sweep(cfg, out_dir, jobs);
    long long failed = 0;
    for (const auto& row : result.rows)
        if (!row.error.empty()) ++failed;
    std::cout << "sweep points: " << result.rows.size() << ", failed: " << failed << "\n";
    std::cout << "combined CSV: " << result.csv_path << "\n";
    return kExitOk;
}

int cmd_times(const std::string& config_path) {
    const dephase::ScenarioConfig cfg = dephase::parse_scenario_file(config_path);
    std::cout << dephase::characteristic_report(cfg).dump(2) << "\n";
    return kExitOk;
}

int cmd_compare(const std::vector<std::string>& report_files, std::optional<double> tolerance) {
    std::vector<dephase::json> docs;
    for (const auto& path : report_files) {
        std::ifstream is(path);
        if (!is) throw dephase::ConfigError("cannot open report file: " + path);
        dephase::json doc;
        try {
            is >> doc;
        } catch (const dephase::json::exception& e) {
            throw dephase::ConfigError("report file is not valid JSON: " + path + ": " + e.what());
        }
        docs.push_back(std::move(doc));
    }
    const auto outcome = dephase::compare_reports(docs, tolerance);
    std::cout << outcome.table;
    std::cout << (outcome.all_passed ? "all checks passed" : "tolerance failures present") << " ("
              << outcome.checked << " checked)\n";
    return outcome.all_passed ? kExitOk : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dephase: exact linear-entropy dynamics of a nonlinear oscillator "
                 "coupled to a dephasing reservoir"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    bool force_oracle = false;
    int jobs = 0;
    std::string preset_name;
    std::vector<std::string> report_files;
    double tolerance = -1.0;

    auto* sim = app.add_subcommand("simulate", "run one scenario and write its CSV + report");
    sim->add_option("--config", config_path, "scenario JSON file")->required();
    sim->add_flag("--oracle", force_oracle, "force the brute-force oracle column on");
    sim->add_option("--out", out_dir, "output directory (default .)");

    auto* pre = app.add_subcommand("preset", "reproduce a figure data set (fig1 | fig2 | fig4)");
    pre->add_option("name", preset_name, "preset name")->required();
    pre->add_option("--out", out_dir, "output directory (default .)");

    auto* swp = app.add_subcommand("sweep", "run a parameter sweep in parallel");
    swp->add_option("--config", config_path, "scenario JSON file with a sweep section")->required();
    swp->add_option("--jobs", jobs, "worker count (overrides DEPHASE_JOBS; default: all cores)");
    swp->add_option("--out", out_dir, "output directory (default .)");

    auto* tim = app.add_subcommand("times", "print characteristic times as JSON");
    tim->add_option("--config", config_path, "scenario JSON file")->required();

    auto* cmp = app.add_subcommand("compare", "tabulate reports and check caption tolerances");
    cmp->add_option("reports", report_files, "report JSON files")->required();
    cmp->add_option("--tolerance", tolerance, "override declared tolerances [%]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, force_oracle, out_dir);
        if (pre->parsed()) return cmd_preset(preset_name, out_dir);
        if (swp->parsed()) return cmd_sweep(config_path, jobs, out_dir);
        if (tim->parsed()) return cmd_times(config_path);
        if (cmp->parsed())
            return cmd_compare(report_files,
                               tolerance > 0 ? std::optional<double>(tolerance) : std::nullopt);
    } catch (const dephase::SizeCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSizeCap;
    } catch (const dephase::ConfigError& e) {
        print_config_error(e);
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
