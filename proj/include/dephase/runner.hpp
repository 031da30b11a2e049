#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dephase/analysis.hpp"
#include "dephase/analytic.hpp"
#include "dephase/csv.hpp"
#include "dephase/fitting.hpp"
#include "dephase/oracle.hpp"
#include "dephase/scenario.hpp"

namespace dephase {

inline constexpr double kRevivalDepthThreshold = 1e-3;

/// Caption comparison declared by a preset row. rule "direct" checks the
/// computed value against the caption within tolerance_pct; rule
/// "sqrt2_ratio" checks caption/computed against sqrt(2), the documented
/// discrepancy convention of the y = 1/2 figure.
struct CaptionCheck {
    double target = 0.0;
    std::string rule = "direct";
    double tolerance_pct = 2.0;
    double computed = 0.0;
    double rel_error_pct = 0.0;
    bool passed = false;
};

struct OracleCheck {
    long long D = 0;
    double max_discrepancy = 0.0;
};

struct RunReport {
    std::string name;
    double lambda_ref = 0.0;

    double t_D = std::numeric_limits<double>::infinity();
    std::optional<double> t_R;
    double tau_R = std::numeric_limits<double>::infinity();
    std::optional<double> Lambda;
    std::vector<double> Hs_per_mode;
    std::optional<double> Hs_aggregate;

    std::optional<DecoherenceFit> fitted;
    std::vector<RevivalEvent> revivals;
    std::optional<OracleCheck> oracle;
    std::optional<CaptionCheck> caption;

    std::string csv_path;
    std::string csv_insert_path;

    json to_json() const {
        json j;
        j["name"] = name;
        j["lambda_ref"] = lambda_ref;
        json a;
        a["t_D"] = t_D;
        a["lambda_t_D"] = lambda_ref * t_D;
        a["t_R"] = t_R ? json(*t_R) : json(nullptr);
        a["lambda_t_R"] = t_R ? json(lambda_ref * *t_R) : json(nullptr);
        a["tau_R"] = tau_R;
        a["Lambda"] = Lambda ? json(*Lambda) : json(nullptr);
        a["Hs_per_mode"] = Hs_per_mode;
        a["Hs"] = Hs_aggregate ? json(*Hs_aggregate) : json(nullptr);
        j["analytic"] = a;
        if (fitted) {
            json f;
            f["t_D"] = fitted->t_D;
            f["lambda_t_D"] = lambda_ref * fitted->t_D;
            f["delta1"] = fitted->delta1;
            f["delta2"] = fitted->delta2;
            f["window"] = fitted->window;
            f["n_points"] = fitted->n_points;
            j["fitted"] = f;
        } else {
            j["fitted"] = nullptr;
        }
        json revs = json::array();
        for (const auto& r : revivals) {
            json e;
            e["time"] = r.time;
            e["lambda_time"] = lambda_ref * r.time;
            e["depth"] = r.depth;
            e["full_width"] = r.full_width;
            revs.push_back(e);
        }
        j["revivals"] = revs;
        if (oracle) {
            j["oracle"] = {{"D", oracle->D}, {"max_discrepancy", oracle->max_discrepancy}};
        } else {
            j["oracle"] = nullptr;
        }
        if (caption) {
            j["caption"] = {{"target", caption->target},
                            {"rule", caption->rule},
                            {"tolerance_pct", caption->tolerance_pct},
                            {"computed", caption->computed},
                            {"rel_error_pct", caption->rel_error_pct},
                            {"passed", caption->passed}};
        } else {
            j["caption"] = nullptr;
        }
        j["csv"] = csv_path;
        j["csv_insert"] = csv_insert_path.empty() ? json(nullptr) : json(csv_insert_path);
        return j;
    }
};

namespace detail {

inline double series_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

/// Dense early-window series for the quadratic-onset fit. The main output
/// grid is far too coarse below t_D, so the fit gets its own samples.
inline TimeSeries fit_series(const ModelSpec& model, const SystemState& sys,
                             const ReservoirSpec& res, double t_D) {
    const auto grid = uniform_grid(0.0, 0.3 * t_D, 513);
    return linear_entropy_series(model, sys, res, grid, "fit-window");
}

}  // namespace detail

/// Runs one scenario: evaluates the analytic curve (plus oracle and
/// coarse-grained columns when requested), writes the CSV artifact, and
/// returns the populated report. Output is deterministic for a given config.
///
/// `insert_window_lambda_t`, when set, adds a second CSV sampling the given
/// lambda_t window densely (the figure-insert convention).
inline RunReport run_scenario(const ScenarioConfig& cfg, const std::string& out_dir,
                              std::optional<std::pair<double, double>> insert_window_lambda_t =
                                  std::nullopt) {
    if (!cfg.sweep.empty())
        throw ConfigError("config declares a sweep grid; run it with the sweep entry point");

    const ModelSpec model = cfg.build_model();
    model.validate();
    const SystemState sys = cfg.build_system();
    const ReservoirSpec res = cfg.build_reservoir();
    require_consistent(model, res);

    RunReport report;
    report.name = cfg.name;
    report.lambda_ref = cfg.lambda_reference(model);

    const auto grid = cfg.build_time_grid(model);
    const std::string digest = config_digest(cfg.raw);
    TimeSeries series = linear_entropy_series(model, sys, res, grid, digest);

    // characteristic times need a pure system; report nulls otherwise
    if (sys.is_pure()) {
        const auto ct = characteristic_times(model, sys, res);
        report.t_D = ct.t_D;
        report.t_R = ct.t_R;
        report.tau_R = ct.tau_R;
        report.Lambda = ct.Lambda;
        const auto gcd = coupling_gcd(model);
        if (gcd) report.Hs_aggregate = effective_hilbert_size(aggregate_delta2(model, res, *gcd));
        if (std::isfinite(ct.t_D)) {
            const auto fit_input = detail::fit_series(model, sys, res, ct.t_D);
            report.fitted = fit_decoherence_time(fit_input);
        }
    }
    for (int l = 0; l < model.mode_count(); ++l)
        report.Hs_per_mode.push_back(effective_hilbert_size(
            std::sqrt(variance_of_power(res.modes[static_cast<size_t>(l)], model.y.value))));

    report.revivals = detect_revivals(series, kRevivalDepthThreshold);

    // assemble the CSV
    CsvTable table;
    table.header = {"t", "lambda_t", "delta_analytic"};
    const double rate = report.lambda_ref;
    table.rows.resize(series.size());
    for (size_t i = 0; i < series.size(); ++i)
        table.rows[i] = {series.times[i], rate * series.times[i], series.values[i]};

    if (cfg.outputs.include_oracle) {
        const auto mats = cfg.build_mode_matrices();
        const FullState full = build_full_initial_state(sys, mats, cfg.outputs.size_cap);
        const EnergyTable energies = build_energy_table(model, sys.dim, full.d_r);
        const TimeSeries oracle_series = evolve_linear_entropy(full, energies, grid, digest);
        double max_diff = 0.0;
        for (size_t i = 0; i < series.size(); ++i)
            max_diff = std::max(max_diff, std::abs(series.values[i] - oracle_series.values[i]));
        report.oracle = OracleCheck{full.dim(), max_diff};
        table.header.push_back("delta_oracle");
        for (size_t i = 0; i < series.size(); ++i)
            table.rows[i].push_back(oracle_series.values[i]);
    }

    if (cfg.outputs.coarse_grain_resolution) {
        double resolution = *cfg.outputs.coarse_grain_resolution;
        if (cfg.time_grid.lambda_scale) resolution /= rate;
        const TimeSeries coarse = coarse_grain(series, resolution);
        table.header.push_back("delta_coarse");
        for (size_t i = 0; i < series.size(); ++i) table.rows[i].push_back(coarse.values[i]);
    }

    std::filesystem::create_directories(out_dir);
    report.csv_path = (std::filesystem::path(out_dir) / cfg.outputs.csv).string();
    write_csv_file(report.csv_path, table);

    if (insert_window_lambda_t) {
        if (!(rate > 0.0))
            throw ConfigError("insert window needs a nonzero first coupling");
        const auto [lo, hi] = *insert_window_lambda_t;
        const auto insert_grid = uniform_grid(lo / rate, hi / rate, 701);
        const TimeSeries insert = linear_entropy_series(model, sys, res, insert_grid, digest);
        CsvTable itable;
        itable.header = {"t", "lambda_t", "delta_analytic"};
        for (size_t i = 0; i < insert.size(); ++i)
            itable.rows.push_back({insert.times[i], rate * insert.times[i], insert.values[i]});
        std::filesystem::path ipath(report.csv_path);
        ipath.replace_filename(ipath.stem().string() + "_insert" + ipath.extension().string());
        report.csv_insert_path = ipath.string();
        write_csv_file(report.csv_insert_path, itable);

        // dips narrower than the main grid spacing only show up in the dense
        // insert window; its events replace main-grid events in that window
        auto merged = detect_revivals(insert, kRevivalDepthThreshold);
        for (const auto& ev : report.revivals)
            if (ev.time < insert.times.front() || ev.time > insert.times.back())
                merged.push_back(ev);
        std::sort(merged.begin(), merged.end(),
                  [](const RevivalEvent& a, const RevivalEvent& b) { return a.time < b.time; });
        report.revivals = std::move(merged);
    }

    return report;
}

// ---------------------------------------------------------------------------
// Figure presets
// ---------------------------------------------------------------------------

namespace detail {

struct PresetRow {
    std::string name;
    json reservoir_entry;
    double caption_lambda_t_D;
    std::string caption_rule;
    double caption_tolerance_pct;
};

inline json preset_model(bool half_y) {
    json m;
    m["hbar"] = 1.0;
    m["x"] = "1";
    m["y"] = half_y ? "1/2" : "1";
    // free-Hamiltonian choice of the figures: g = 1, omega = hbar*g, Omega = 1.
    // None of them enter delta(t); omega = hbar*g is the convention under
    // which the recurrence-time formula holds.
    m["g"] = 1.0;
    m["omega"] = 1.0;
    m["Omega"] = 1.0;
    return m;
}

inline json thermal_entry(double delta2_target, int copies) {
    const double nbar = equivalent_reservoir(delta2_target).nbar;
    json e;
    e["kind"] = "thermal";
    e["beta_homega"] = std::log1p(1.0 / nbar);
    e["tail_epsilon"] = 1e-12;
    e["coupling"] = "1/10";
    e["copies"] = copies;
    return e;
}

inline json phase_entry(int r, int copies) {
    json e;
    e["kind"] = "phase";
    e["r"] = r;
    e["m"] = 0;
    e["coupling"] = "1/10";
    e["copies"] = copies;
    return e;
}

/// Oracle columns are attached to preset rows whose full space stays small.
inline bool preset_oracle_fits(const ScenarioConfig& cfg) {
    const SystemState sys = cfg.build_system();
    long long D = sys.dim;
    for (const auto& m : cfg.build_reservoir().modes) {
        D *= m.dim;
        if (D > 1024) return false;
    }
    return D <= 1024;
}

}  // namespace detail

/// Reproduces the figure data sets:
///   fig1 - thermal reservoirs, x = y = 1, four (M, Delta2) rows;
///   fig2 - phase-state reservoirs matched to the fig1 Delta2 targets through
///          equivalent_reservoir;
///   fig4 - phase-state reservoirs with y = 1/2.
/// Curves cover lambda_t in [0, 7]; fig1/fig2 rows add an insert window
/// around the revival at lambda_t = 2 pi. Every row carries its caption
/// lambda_t_D and comparison rule in the report.
inline std::vector<RunReport> run_preset(const std::string& preset, const std::string& out_dir) {
    std::vector<detail::PresetRow> rows;
    bool half_y = false;
    bool with_insert = true;

    if (preset == "fig1") {
        rows = {
            {"fig1_thermal_M201_d3.16", detail::thermal_entry(3.16, 201), 0.032, "direct", 2.0},
            {"fig1_thermal_M1_d44.83", detail::thermal_entry(44.83, 1), 0.032, "direct", 2.0},
            {"fig1_thermal_M1_d6.61", detail::thermal_entry(6.61, 1), 0.214, "direct", 2.0},
            {"fig1_thermal_M15_d1.71", detail::thermal_entry(1.71, 15), 0.214, "direct", 2.0},
        };
    } else if (preset == "fig2") {
        const int r_316 = equivalent_reservoir(3.16).r_trunc;
        const int r_4483 = equivalent_reservoir(44.83).r_trunc;
        const int r_661 = equivalent_reservoir(6.61).r_trunc;
        const int r_171 = equivalent_reservoir(1.71).r_trunc;
        rows = {
            {"fig2_phase_M201_r" + std::to_string(r_316), detail::phase_entry(r_316, 201), 0.032,
             "direct", 2.0},
            {"fig2_phase_M1_r" + std::to_string(r_4483), detail::phase_entry(r_4483, 1), 0.032,
             "direct", 2.0},
            {"fig2_phase_M1_r" + std::to_string(r_661), detail::phase_entry(r_661, 1), 0.214,
             "direct", 2.0},
            {"fig2_phase_M15_r" + std::to_string(r_171), detail::phase_entry(r_171, 15), 0.214,
             "direct", 2.0},
        };
    } else if (preset == "fig4") {
        half_y = true;
        with_insert = false;  // no revival to zoom into
        rows = {
            {"fig4_phase_M20_r10", detail::phase_entry(10, 20), 0.49, "sqrt2_ratio", 5.0},
            {"fig4_phase_M1_r289", detail::phase_entry(289, 1), 0.49, "sqrt2_ratio", 5.0},
            {"fig4_phase_M2_r2", detail::phase_entry(2, 2), 2.37, "sqrt2_ratio", 5.0},
            {"fig4_phase_M1_r8", detail::phase_entry(8, 1), 2.37, "sqrt2_ratio", 5.0},
        };
    } else {
        throw ConfigError("unknown preset '" + preset + "' (expected fig1 | fig2 | fig4)");
    }

    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<RunReport> reports;
    json report_array = json::array();
    for (const auto& row : rows) {
        json doc;
        doc["name"] = row.name;
        doc["model"] = detail::preset_model(half_y);
        doc["system"] = {{"kind", "superposition"}};
        doc["reservoir"] = json::array({row.reservoir_entry});
        doc["time_grid"] = {{"t_max", 7.0}, {"n_samples", 1401}, {"scale", "lambda_t"}};
        doc["outputs"] = {{"csv", row.name + ".csv"}};

        ScenarioConfig cfg = parse_scenario(doc);
        cfg.outputs.include_oracle = detail::preset_oracle_fits(cfg);
        doc["outputs"]["include_oracle"] = cfg.outputs.include_oracle;
        cfg.raw = doc;

        std::optional<std::pair<double, double>> insert;
        if (with_insert) insert = std::make_pair(two_pi - 0.35, two_pi + 0.35);
        RunReport report = run_scenario(cfg, out_dir, insert);

        CaptionCheck check;
        check.target = row.caption_lambda_t_D;
        check.rule = row.caption_rule;
        check.tolerance_pct = row.caption_tolerance_pct;
        check.computed = report.lambda_ref * report.t_D;
        if (check.rule == "sqrt2_ratio") {
            const double ratio = check.target / check.computed;
            check.rel_error_pct = 100.0 * std::abs(ratio - std::numbers::sqrt2) / std::numbers::sqrt2;
        } else {
            check.rel_error_pct = 100.0 * std::abs(check.computed - check.target) / check.target;
        }
        check.passed = check.rel_error_pct <= check.tolerance_pct;
        report.caption = check;

        report_array.push_back(report.to_json());
        reports.push_back(std::move(report));
    }

    std::filesystem::create_directories(out_dir);
    const std::string report_path =
        (std::filesystem::path(out_dir) / (preset + "_report.json")).string();
    std::ofstream os(report_path);
    os << report_array.dump(2) << '\n';
    return reports;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// One grid point of a sweep. Numeric fields are NaN when the point failed;
/// `error` carries the reason.
struct SweepRow {
    long long index = 0;
    std::vector<double> axis_values;
    double t_D = std::numeric_limits<double>::quiet_NaN();
    double lambda_t_D = std::numeric_limits<double>::quiet_NaN();
    double t_R = std::numeric_limits<double>::quiet_NaN();
    double tau_R = std::numeric_limits<double>::quiet_NaN();
    double Hs = std::numeric_limits<double>::quiet_NaN();
    double delta_max = std::numeric_limits<double>::quiet_NaN();
    double delta_mean = std::numeric_limits<double>::quiet_NaN();
    double delta_final = std::numeric_limits<double>::quiet_NaN();
    double oracle_max_discrepancy = std::numeric_limits<double>::quiet_NaN();
    std::string error;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::string csv_path;
    std::string report_path;
};

inline int resolve_jobs(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("DEPHASE_JOBS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Evaluates every grid point of the sweep (the cartesian product of the
/// axes, row-major in axis order). Points run in a worker pool but results
/// are merged by grid index, so the combined CSV is byte-identical for any
/// worker count. Per-point failures are recorded in their row and do not
/// abort the sweep. A config without a sweep section is a single-point grid.
inline SweepResult run_sweep(const ScenarioConfig& cfg, const std::string& out_dir,
                             int jobs = 0) {
    const auto& axes = cfg.sweep;
    long long total = 1;
    for (const auto& axis : axes) total *= static_cast<long long>(axis.values.size());

    std::vector<SweepRow> rows(static_cast<size_t>(total));
    std::atomic<long long> next{0};

    auto evaluate_point = [&](long long index) {
        SweepRow& row = rows[static_cast<size_t>(index)];
        row.index = index;
        try {
            json doc = cfg.raw;
            long long rest = index;
            for (size_t a = axes.size(); a-- > 0;) {
                const long long n = static_cast<long long>(axes[a].values.size());
                const long long pick = rest % n;
                rest /= n;
                doc[json::json_pointer(axes[a].path)] = axes[a].values[static_cast<size_t>(pick)];
            }
            doc.erase("sweep");
            // record axis values in axis order
            for (const auto& axis : axes)
                row.axis_values.push_back(doc[json::json_pointer(axis.path)].get<double>());

            const ScenarioConfig point = parse_scenario(doc);
            const ModelSpec model = point.build_model();
            model.validate();
            const SystemState sys = point.build_system();
            const ReservoirSpec res = point.build_reservoir();
            require_consistent(model, res);

            const auto grid = point.build_time_grid(model);
            const TimeSeries series = linear_entropy_series(model, sys, res, grid);

            if (sys.is_pure()) {
                row.t_D = decoherence_time(model, sys, res);
                row.lambda_t_D = point.lambda_reference(model) * row.t_D;
                row.tau_R = 2.0 * row.t_D;
                if (const auto tr = revival_time(model)) row.t_R = *tr;
                if (const auto gcd = coupling_gcd(model))
                    row.Hs = effective_hilbert_size(aggregate_delta2(model, res, *gcd));
            }
            row.delta_max = *std::max_element(series.values.begin(), series.values.end());
            row.delta_mean = detail::series_mean(series.values);
            row.delta_final = series.values.back();

            if (point.outputs.include_oracle) {
                const FullState full = build_full_initial_state(sys, point.build_mode_matrices(),
                                                                point.outputs.size_cap);
                const EnergyTable energies = build_energy_table(model, sys.dim, full.d_r);
                const TimeSeries oracle_series = evolve_linear_entropy(full, energies, grid);
                double max_diff = 0.0;
                for (size_t i = 0; i < series.size(); ++i)
                    max_diff = std::max(max_diff,
                                        std::abs(series.values[i] - oracle_series.values[i]));
                row.oracle_max_discrepancy = max_diff;
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    const int workers =
        std::max(1, static_cast<int>(std::min<long long>(resolve_jobs(jobs), total)));
    if (workers == 1) {
        for (long long i = 0; i < total; ++i) evaluate_point(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const long long i = next.fetch_add(1);
                    if (i >= total) break;
                    evaluate_point(i);
                }
            });
        for (auto& th : pool) th.join();
    }

    // combined CSV, ordered by grid index
    CsvTable table;
    table.header = {"index"};
    for (const auto& axis : axes) {
        std::string col = axis.path;
        for (auto& c : col)
            if (c == '/' || c == ',') c = '_';
        table.header.push_back("axis" + col);
    }
    for (const char* col : {"ok", "t_D", "lambda_t_D", "t_R", "tau_R", "Hs", "delta_max",
                            "delta_mean", "delta_final", "oracle_max_discrepancy"})
        table.header.push_back(col);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : rows) {
        std::vector<double> out;
        out.push_back(static_cast<double>(row.index));
        for (size_t a = 0; a < axes.size(); ++a)
            out.push_back(a < row.axis_values.size() ? row.axis_values[a] : nan);
        out.push_back(row.error.empty() ? 1.0 : 0.0);
        out.insert(out.end(), {row.t_D, row.lambda_t_D, row.t_R, row.tau_R, row.Hs, row.delta_max,
                               row.delta_mean, row.delta_final, row.oracle_max_discrepancy});
        table.rows.push_back(std::move(out));
    }

    std::filesystem::create_directories(out_dir);
    SweepResult result;
    result.rows = std::move(rows);
    result.csv_path = (std::filesystem::path(out_dir) / (cfg.name + "_sweep.csv")).string();
    write_csv_file(result.csv_path, table);

    json errors = json::array();
    for (const auto& row : result.rows)
        if (!row.error.empty()) errors.push_back({{"index", row.index}, {"error", row.error}});
    json report;
    report["name"] = cfg.name;
    report["points"] = total;
    report["failed_points"] = errors.size();
    report["errors"] = errors;
    report["csv"] = result.csv_path;
    result.report_path =
        (std::filesystem::path(out_dir) / (cfg.name + "_sweep_report.json")).string();
    std::ofstream os(result.report_path);
    os << report.dump(2) << '\n';
    return result;
}

// ---------------------------------------------------------------------------
// Report comparison
// ---------------------------------------------------------------------------

struct CompareOutcome {
    std::string table;
    bool all_passed = true;
    int checked = 0;
};

/// Tabulates analytic vs fitted vs caption values across report files and
/// re-evaluates every declared caption check (tolerance_override, when given,
/// replaces the declared tolerances). Doctored reports fail: the relative
/// error is recomputed here, not trusted from the file.
inline CompareOutcome compare_reports(const std::vector<json>& report_docs,
                                      std::optional<double> tolerance_override = std::nullopt) {
    if (report_docs.empty()) throw ConfigError("compare needs at least one report");
    CompareOutcome outcome;
    std::string& out = outcome.table;
    char line[256];
    std::snprintf(line, sizeof(line), "%-28s %12s %12s %12s %10s %8s  %s\n", "name",
                  "analytic", "fitted", "caption", "err[%]", "tol[%]", "status");
    out += line;

    auto handle_row = [&](const json& rep) {
        const std::string name = rep.value("name", std::string("?"));
        const double analytic = rep.contains("analytic") && rep["analytic"].contains("lambda_t_D")
                                    ? rep["analytic"]["lambda_t_D"].get<double>()
                                    : std::numeric_limits<double>::quiet_NaN();
        double fitted = std::numeric_limits<double>::quiet_NaN();
        if (rep.contains("fitted") && rep["fitted"].is_object())
            fitted = rep["fitted"].value("lambda_t_D", fitted);

        std::string status = "-";
        double err = std::numeric_limits<double>::quiet_NaN();
        double tol = std::numeric_limits<double>::quiet_NaN();
        double target = std::numeric_limits<double>::quiet_NaN();
        if (rep.contains("caption") && rep["caption"].is_object()) {
            const json& cap = rep["caption"];
            target = cap.value("target", 0.0);
            tol = tolerance_override ? *tolerance_override : cap.value("tolerance_pct", 2.0);
            const std::string rule = cap.value("rule", std::string("direct"));
            if (rule == "sqrt2_ratio") {
                const double ratio = target / analytic;
                err = 100.0 * std::abs(ratio - std::numbers::sqrt2) / std::numbers::sqrt2;
            } else {
                err = 100.0 * std::abs(analytic - target) / std::abs(target);
            }
            const bool pass = err <= tol;
            status = pass ? "PASS" : "FAIL";
            outcome.all_passed = outcome.all_passed && pass;
            ++outcome.checked;
        }
        std::snprintf(line, sizeof(line), "%-28s %12.6g %12.6g %12.6g %10.4g %8.4g  %s\n",
                      name.c_str(), analytic, fitted, target, err, tol, status.c_str());
        out += line;
    };

    for (const json& doc : report_docs) {
        if (doc.is_array())
            for (const auto& rep : doc) handle_row(rep);
        else
            handle_row(doc);
    }
    return outcome;
}

/// Characteristic-time summary for the `times` CLI verb.
inline json characteristic_report(const ScenarioConfig& cfg) {
    const ModelSpec model = cfg.build_model();
    model.validate();
    const SystemState sys = cfg.build_system();
    const ReservoirSpec res = cfg.build_reservoir();
    require_consistent(model, res);

    json j;
    j["name"] = cfg.name;
    const double rate = cfg.lambda_reference(model);
    if (sys.is_pure()) {
        const auto ct = characteristic_times(model, sys, res);
        j["t_D"] = ct.t_D;
        j["lambda_t_D"] = rate * ct.t_D;
        j["t_R"] = ct.t_R ? json(*ct.t_R) : json(nullptr);
        j["tau_R"] = ct.tau_R;
        j["Lambda"] = ct.Lambda ? json(*ct.Lambda) : json(nullptr);
        j["k"] = ct.k;
    } else {
        j["t_D"] = nullptr;
        j["note"] = "system state is mixed; characteristic times are defined for pure states";
    }
    const auto rec = recurrence_time(model.g, model.couplings.front(), model.hbar);
    switch (rec.status) {
        case RecurrenceStatus::found: j["t_r"] = *rec.time; break;
        case RecurrenceStatus::irrational_ratio: j["t_r"] = nullptr; j["t_r_reason"] = "irrational 2g/lambda"; break;
        case RecurrenceStatus::degenerate: j["t_r"] = nullptr; j["t_r_reason"] = "degenerate (g = lambda = 0)"; break;
    }
    json hs = json::array();
    for (int l = 0; l < model.mode_count(); ++l)
        hs.push_back(effective_hilbert_size(
            std::sqrt(variance_of_power(res.modes[static_cast<size_t>(l)], model.y.value))));
    j["Hs_per_mode"] = hs;
    if (const auto gcd = coupling_gcd(model))
        j["Hs"] = effective_hilbert_size(aggregate_delta2(model, res, *gcd));
    else
        j["Hs"] = nullptr;
    return j;
}

}  // namespace dephase
