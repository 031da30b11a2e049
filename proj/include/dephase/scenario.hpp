#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dephase/analytic.hpp"
#include "dephase/oracle.hpp"
#include "dephase/states.hpp"
#include "dephase/types.hpp"

namespace dephase {

using nlohmann::json;

struct SystemConfig {
    enum class Kind { superposition, fock, custom };
    Kind kind = Kind::superposition;
    int n = 0;        // fock level
    int dim = -1;     // optional fock truncation
    int matrix_dim = 0;
    std::vector<Cplx> matrix;  // custom B, row-major
};

struct ReservoirEntryConfig {
    enum class Kind { thermal, phase, custom };
    Kind kind = Kind::thermal;
    double beta_homega = 0.0;
    double tail_epsilon = 1e-12;
    int r = 0;
    int m = 0;
    std::vector<double> probs;
    Coupling coupling;
    int copies = 1;  // identical modes sharing this entry
};

struct TimeGridConfig {
    double t_max = 0.0;
    int n_samples = 0;
    bool lambda_scale = false;  // t_max given in units of lambda*t
};

struct OutputsConfig {
    std::string csv = "delta.csv";
    bool include_oracle = false;
    std::optional<double> coarse_grain_resolution;
    long long size_cap = kDefaultSizeCap;
};

struct SweepAxis {
    std::string path;  // JSON pointer into the scenario document
    std::vector<json> values;
};

/// Declarative description of one run or sweep, mirroring the JSON schema
/// field for field. `raw` keeps the original document so sweep axes can be
/// substituted and re-validated per grid point.
struct ScenarioConfig {
    std::string name = "scenario";
    ModelSpec model_base;  // couplings filled in by build_model()
    SystemConfig system;
    std::vector<ReservoirEntryConfig> reservoir;
    TimeGridConfig time_grid;
    OutputsConfig outputs;
    std::vector<SweepAxis> sweep;
    json raw;

    /// Model with one coupling per expanded mode ("copies" flattened).
    ModelSpec build_model() const {
        ModelSpec m = model_base;
        m.couplings.clear();
        for (const auto& entry : reservoir)
            for (int c = 0; c < entry.copies; ++c) m.couplings.push_back(entry.coupling);
        return m;
    }

    SystemState build_system() const {
        switch (system.kind) {
            case SystemConfig::Kind::superposition: return make_superposition_system();
            case SystemConfig::Kind::fock: return make_fock_system(system.n, system.dim);
            case SystemConfig::Kind::custom: {
                SystemState s;
                s.dim = system.matrix_dim;
                s.B = system.matrix;
                s.validate();
                return s;
            }
        }
        throw PreconditionError("unreachable system kind");
    }

    ReservoirSpec build_reservoir() const {
        ReservoirSpec res;
        for (const auto& entry : reservoir) {
            ModeDistribution dist;
            switch (entry.kind) {
                case ReservoirEntryConfig::Kind::thermal:
                    dist = make_thermal_mode(entry.beta_homega, entry.tail_epsilon);
                    break;
                case ReservoirEntryConfig::Kind::phase:
                    dist = make_phase_state_mode(entry.r, entry.m);
                    break;
                case ReservoirEntryConfig::Kind::custom:
                    dist = make_custom_mode(entry.probs);
                    break;
            }
            for (int c = 0; c < entry.copies; ++c) res.modes.push_back(dist);
        }
        return res;
    }

    /// Full mode matrices for the oracle. Phase states keep their
    /// off-diagonal phases; everything else is diagonal.
    std::vector<ModeMatrix> build_mode_matrices() const {
        std::vector<ModeMatrix> mats;
        for (const auto& entry : reservoir) {
            ModeMatrix mat;
            if (entry.kind == ReservoirEntryConfig::Kind::phase)
                mat = ModeMatrix::phase_state(entry.r, entry.m);
            else {
                ModeDistribution dist = entry.kind == ReservoirEntryConfig::Kind::thermal
                                            ? make_thermal_mode(entry.beta_homega, entry.tail_epsilon)
                                            : make_custom_mode(entry.probs);
                mat = ModeMatrix::from_distribution(dist);
            }
            for (int c = 0; c < entry.copies; ++c) mats.push_back(mat);
        }
        return mats;
    }

    /// Rate converting t to the dimensionless lambda_t axis:
    /// |lambda_1| * hbar^(x+y-1), with the first coupling as the reference.
    double lambda_reference(const ModelSpec& model) const {
        if (model.couplings.empty()) return 0.0;
        return std::abs(model.couplings.front().value) * model.hbar_power();
    }

    std::vector<double> build_time_grid(const ModelSpec& model) const {
        double t_max = time_grid.t_max;
        if (time_grid.lambda_scale) {
            const double rate = lambda_reference(model);
            if (!(rate > 0.0))
                throw ConfigError("time_grid.scale = lambda_t requires a nonzero first coupling");
            t_max /= rate;
        }
        return uniform_grid(0.0, t_max, time_grid.n_samples);
    }
};

namespace detail {

struct IssueList {
    std::vector<std::string> issues;

    void add(const std::string& path, const std::string& msg) {
        issues.push_back(path + ": " + msg);
    }
    void raise_if_any() const {
        if (!issues.empty()) throw ConfigError(issues);
    }
};

inline std::optional<double> take_number(const json& obj, const std::string& key,
                                         const std::string& path, IssueList& issues,
                                         bool required, double fallback = 0.0) {
    if (!obj.contains(key)) {
        if (required) {
            issues.add(path + "/" + key, "required field missing");
            return std::nullopt;
        }
        return fallback;
    }
    if (!obj[key].is_number()) {
        issues.add(path + "/" + key, "must be a number");
        return std::nullopt;
    }
    return obj[key].get<double>();
}

inline std::optional<long long> take_integer(const json& obj, const std::string& key,
                                             const std::string& path, IssueList& issues,
                                             bool required, long long fallback = 0) {
    if (!obj.contains(key)) {
        if (required) {
            issues.add(path + "/" + key, "required field missing");
            return std::nullopt;
        }
        return fallback;
    }
    if (!obj[key].is_number_integer()) {
        issues.add(path + "/" + key, "must be an integer");
        return std::nullopt;
    }
    return obj[key].get<long long>();
}

/// Exponents and couplings accept either a JSON number or an exact
/// rational string like "1/10". Numbers that are genuine small fractions
/// are annotated automatically; others stay float-only.
inline std::optional<std::pair<double, std::optional<Rational>>> take_rationalish(
    const json& value, const std::string& path, IssueList& issues) {
    if (value.is_string()) {
        const auto r = Rational::parse(value.get<std::string>());
        if (!r) {
            issues.add(path, "malformed rational string '" + value.get<std::string>() + "'");
            return std::nullopt;
        }
        return std::make_pair(r->value(), std::optional<Rational>(*r));
    }
    if (value.is_number()) {
        const double v = value.get<double>();
        return std::make_pair(v, Rational::from_double_exact(v));
    }
    issues.add(path, "must be a number or a 'p/q' rational string");
    return std::nullopt;
}

inline Cplx parse_complex_cell(const json& cell, const std::string& path, IssueList& issues) {
    if (cell.is_number()) return Cplx(cell.get<double>(), 0.0);
    if (cell.is_array() && cell.size() == 2 && cell[0].is_number() && cell[1].is_number())
        return Cplx(cell[0].get<double>(), cell[1].get<double>());
    issues.add(path, "matrix entries must be numbers or [re, im] pairs");
    return Cplx(0.0, 0.0);
}

}  // namespace detail

/// Parses and validates a scenario document. Every offending field is
/// reported; the throw carries the complete issue list.
inline ScenarioConfig parse_scenario(const json& doc) {
    detail::IssueList issues;
    ScenarioConfig cfg;
    cfg.raw = doc;

    if (!doc.is_object()) {
        issues.add("", "scenario document must be a JSON object");
        issues.raise_if_any();
    }

    if (doc.contains("name")) {
        if (doc["name"].is_string()) cfg.name = doc["name"].get<std::string>();
        else issues.add("/name", "must be a string");
    }

    // ---- model ----
    if (!doc.contains("model") || !doc["model"].is_object()) {
        issues.add("/model", "required object missing");
    } else {
        const json& m = doc["model"];
        if (auto v = detail::take_number(m, "hbar", "/model", issues, false, 1.0)) {
            cfg.model_base.hbar = *v;
            if (!(*v > 0.0)) issues.add("/model/hbar", "must be > 0");
        }
        for (const char* key : {"x", "y"}) {
            const std::string path = std::string("/model/") + key;
            if (!m.contains(key)) continue;  // defaults to 1
            if (auto rv = detail::take_rationalish(m[key], path, issues)) {
                Exponent e{rv->first, rv->second};
                if (!(e.value > 0.0)) issues.add(path, "must be > 0");
                (key[0] == 'x' ? cfg.model_base.x : cfg.model_base.y) = e;
            }
        }
        if (auto v = detail::take_number(m, "omega", "/model", issues, false, 0.0))
            cfg.model_base.omega = *v;
        if (auto v = detail::take_number(m, "g", "/model", issues, false, 0.0))
            cfg.model_base.g = *v;
        if (auto v = detail::take_number(m, "Omega", "/model", issues, false, 0.0))
            cfg.model_base.Omega = *v;
    }

    // ---- system ----
    if (!doc.contains("system") || !doc["system"].is_object()) {
        issues.add("/system", "required object missing");
    } else {
        const json& s = doc["system"];
        const std::string kind = s.contains("kind") && s["kind"].is_string()
                                     ? s["kind"].get<std::string>()
                                     : std::string();
        if (kind == "superposition") {
            cfg.system.kind = SystemConfig::Kind::superposition;
        } else if (kind == "fock") {
            cfg.system.kind = SystemConfig::Kind::fock;
            if (auto n = detail::take_integer(s, "n", "/system", issues, true)) {
                cfg.system.n = static_cast<int>(*n);
                if (*n < 0) issues.add("/system/n", "must be >= 0");
            }
            if (auto d = detail::take_integer(s, "dim", "/system", issues, false, -1)) {
                cfg.system.dim = static_cast<int>(*d);
                if (*d >= 0 && *d <= cfg.system.n)
                    issues.add("/system/dim", "must exceed the fock level n");
            }
        } else if (kind == "custom") {
            cfg.system.kind = SystemConfig::Kind::custom;
            if (!s.contains("matrix") || !s["matrix"].is_array() || s["matrix"].empty()) {
                issues.add("/system/matrix", "required non-empty array of rows");
            } else {
                const json& rows = s["matrix"];
                const int dim = static_cast<int>(rows.size());
                const size_t issues_before = issues.issues.size();
                cfg.system.matrix_dim = dim;
                cfg.system.matrix.assign(static_cast<size_t>(dim) * dim, Cplx(0.0, 0.0));
                for (int i = 0; i < dim; ++i) {
                    const std::string rpath = "/system/matrix/" + std::to_string(i);
                    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != dim) {
                        issues.add(rpath, "must be an array of " + std::to_string(dim) + " entries");
                        continue;
                    }
                    for (int j = 0; j < dim; ++j)
                        cfg.system.matrix[static_cast<size_t>(i) * dim + j] = detail::parse_complex_cell(
                            rows[i][j], rpath + "/" + std::to_string(j), issues);
                }
                if (issues.issues.size() == issues_before) {
                    SystemState probe;
                    probe.dim = dim;
                    probe.B = cfg.system.matrix;
                    try {
                        probe.validate();
                    } catch (const ConfigError& e) {
                        for (const auto& sub : e.issues) issues.add("/system/matrix", sub);
                    }
                }
            }
        } else {
            issues.add("/system/kind", "must be one of superposition | fock | custom");
        }
    }

    // ---- reservoir ----
    if (!doc.contains("reservoir") || !doc["reservoir"].is_array() || doc["reservoir"].empty()) {
        issues.add("/reservoir", "required non-empty array");
    } else {
        const json& arr = doc["reservoir"];
        for (size_t idx = 0; idx < arr.size(); ++idx) {
            const std::string path = "/reservoir/" + std::to_string(idx);
            const json& e = arr[idx];
            ReservoirEntryConfig entry;
            if (!e.is_object()) {
                issues.add(path, "must be an object");
                continue;
            }
            const std::string kind = e.contains("kind") && e["kind"].is_string()
                                         ? e["kind"].get<std::string>()
                                         : std::string();
            if (kind == "thermal") {
                entry.kind = ReservoirEntryConfig::Kind::thermal;
                if (auto v = detail::take_number(e, "beta_homega", path, issues, true)) {
                    entry.beta_homega = *v;
                    if (!(*v > 0.0)) issues.add(path + "/beta_homega", "must be > 0");
                }
                if (auto v = detail::take_number(e, "tail_epsilon", path, issues, false, 1e-12)) {
                    entry.tail_epsilon = *v;
                    if (!(*v > 0.0 && *v < 1.0)) issues.add(path + "/tail_epsilon", "must lie in (0, 1)");
                }
            } else if (kind == "phase") {
                entry.kind = ReservoirEntryConfig::Kind::phase;
                if (auto v = detail::take_integer(e, "r", path, issues, true)) {
                    entry.r = static_cast<int>(*v);
                    if (*v < 0) issues.add(path + "/r", "must be >= 0");
                }
                if (auto v = detail::take_integer(e, "m", path, issues, false, 0)) {
                    entry.m = static_cast<int>(*v);
                    if (*v < 0 || *v > entry.r) issues.add(path + "/m", "must lie in 0..r");
                }
            } else if (kind == "custom") {
                entry.kind = ReservoirEntryConfig::Kind::custom;
                if (!e.contains("probs") || !e["probs"].is_array() || e["probs"].empty()) {
                    issues.add(path + "/probs", "required non-empty numeric array");
                } else {
                    double sum = 0.0;
                    for (size_t k = 0; k < e["probs"].size(); ++k) {
                        if (!e["probs"][k].is_number()) {
                            issues.add(path + "/probs/" + std::to_string(k), "must be a number");
                            continue;
                        }
                        const double p = e["probs"][k].get<double>();
                        if (p < 0.0) issues.add(path + "/probs/" + std::to_string(k), "must be >= 0");
                        entry.probs.push_back(p);
                        sum += p;
                    }
                    if (!(sum > 0.0)) issues.add(path + "/probs", "must carry positive total mass");
                }
            } else {
                issues.add(path + "/kind", "must be one of thermal | phase | custom");
            }
            if (!e.contains("coupling")) {
                issues.add(path + "/coupling", "required field missing");
            } else if (auto rv = detail::take_rationalish(e["coupling"], path + "/coupling", issues)) {
                entry.coupling = Coupling{rv->first, rv->second};
                if (!std::isfinite(rv->first)) issues.add(path + "/coupling", "must be finite");
            }
            if (auto v = detail::take_integer(e, "copies", path, issues, false, 1)) {
                entry.copies = static_cast<int>(*v);
                if (*v < 1) issues.add(path + "/copies", "must be >= 1");
            }
            cfg.reservoir.push_back(std::move(entry));
        }
    }

    // ---- time grid ----
    if (!doc.contains("time_grid") || !doc["time_grid"].is_object()) {
        issues.add("/time_grid", "required object missing");
    } else {
        const json& t = doc["time_grid"];
        if (auto v = detail::take_number(t, "t_max", "/time_grid", issues, true)) {
            cfg.time_grid.t_max = *v;
            if (!(*v > 0.0)) issues.add("/time_grid/t_max", "must be > 0");
        }
        if (auto v = detail::take_integer(t, "n_samples", "/time_grid", issues, true)) {
            cfg.time_grid.n_samples = static_cast<int>(*v);
            if (*v < 2) issues.add("/time_grid/n_samples", "must be >= 2");
        }
        if (t.contains("scale")) {
            const std::string sc = t["scale"].is_string() ? t["scale"].get<std::string>() : "";
            if (sc == "raw") cfg.time_grid.lambda_scale = false;
            else if (sc == "lambda_t") cfg.time_grid.lambda_scale = true;
            else issues.add("/time_grid/scale", "must be raw | lambda_t");
        }
    }

    // ---- outputs ----
    if (doc.contains("outputs")) {
        if (!doc["outputs"].is_object()) {
            issues.add("/outputs", "must be an object");
        } else {
            const json& o = doc["outputs"];
            if (o.contains("csv")) {
                if (o["csv"].is_string()) cfg.outputs.csv = o["csv"].get<std::string>();
                else issues.add("/outputs/csv", "must be a string path");
            }
            if (o.contains("include_oracle")) {
                if (o["include_oracle"].is_boolean())
                    cfg.outputs.include_oracle = o["include_oracle"].get<bool>();
                else issues.add("/outputs/include_oracle", "must be a boolean");
            }
            if (auto v = detail::take_number(o, "coarse_grain_resolution", "/outputs", issues, false,
                                             -1.0)) {
                if (o.contains("coarse_grain_resolution")) {
                    cfg.outputs.coarse_grain_resolution = *v;
                    if (!(*v > 0.0)) issues.add("/outputs/coarse_grain_resolution", "must be > 0");
                }
            }
            if (auto v = detail::take_integer(o, "size_cap", "/outputs", issues, false,
                                              kDefaultSizeCap)) {
                cfg.outputs.size_cap = *v;
                if (*v < 1) issues.add("/outputs/size_cap", "must be >= 1");
            }
        }
    }

    // ---- sweep ----
    if (doc.contains("sweep")) {
        if (!doc["sweep"].is_object() || !doc["sweep"].contains("axes") ||
            !doc["sweep"]["axes"].is_array()) {
            issues.add("/sweep", "must be an object with an 'axes' array");
        } else {
            const json& axes = doc["sweep"]["axes"];
            for (size_t a = 0; a < axes.size(); ++a) {
                const std::string path = "/sweep/axes/" + std::to_string(a);
                SweepAxis axis;
                if (!axes[a].is_object() || !axes[a].contains("path") ||
                    !axes[a]["path"].is_string()) {
                    issues.add(path + "/path", "required JSON-pointer string");
                    continue;
                }
                axis.path = axes[a]["path"].get<std::string>();
                try {
                    const json::json_pointer ptr(axis.path);
                    if (!doc.contains(ptr)) {
                        issues.add(path + "/path", "does not reference an existing field");
                    } else if (!doc.at(ptr).is_number()) {
                        issues.add(path + "/path", "must reference a numeric field");
                    }
                } catch (const json::exception&) {
                    issues.add(path + "/path", "is not a valid JSON pointer");
                }
                if (!axes[a].contains("values") || !axes[a]["values"].is_array() ||
                    axes[a]["values"].empty()) {
                    issues.add(path + "/values", "required non-empty array");
                } else {
                    for (size_t k = 0; k < axes[a]["values"].size(); ++k) {
                        if (!axes[a]["values"][k].is_number())
                            issues.add(path + "/values/" + std::to_string(k), "must be a number");
                        else axis.values.push_back(axes[a]["values"][k]);
                    }
                }
                if (!axis.path.empty() && !axis.values.empty()) cfg.sweep.push_back(std::move(axis));
            }
        }
    }

    issues.raise_if_any();
    return cfg;
}

inline ScenarioConfig parse_scenario_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        is >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
    }
    return parse_scenario(doc);
}

/// FNV-1a digest of the canonical document dump; stamped into series
/// metadata so artifacts can be traced back to their configuration.
inline std::string config_digest(const json& doc) {
    const std::string dump = doc.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace dephase
