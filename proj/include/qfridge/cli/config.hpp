// config.hpp: run configuration: JSON document, validated field by field,
// unknown keys rejected. Command-line flags override the file.

#pragma once

#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfridge/errors.hpp"
#include "qfridge/fock/operators.hpp"
#include "qfridge/gaussian.hpp"
#include "qfridge/poisson.hpp"
#include "qfridge/scaling.hpp"

namespace qfridge::cli {

using nlohmann::json;

enum class OutputFormat { csv, structured };

struct BathConfig {
    std::optional<double> temperature;
    std::optional<double> occupation;   // converted with the bare mode frequency
    int dimension_d{1};
    double kappa{0.1};
};

struct GaussianConfig {
    double eta{0.5};
    std::optional<double> gamma_h;   // empty -> kappa omega^d
    std::optional<double> gamma_c;
};

struct PoissonConfig {
    std::optional<double> lambda_rate;   // empty -> omega_c
    std::vector<Impulse> impulses{Impulse{std::numbers::pi / 2, 1.0}};
    std::optional<ZetaSet> zeta;         // empty -> kappa Omega^d
    SolveMode mode{SolveMode::full};
};

struct OracleConfig {
    std::vector<int> levels{8, 12, 16, 20};
    double convergence_tol{1e-6};
    long dimension_cap{4096};
    double edge_threshold{1e-8};
};

struct Fig2Config {
    int points{200};
    double xi0_start{0.0};
    double xi0_stop{2.0 * std::numbers::pi};
    SolveMode mode{SolveMode::low_temperature};
};

struct ScalingConfig {
    std::vector<int> dimensions{1, 2, 3};
    ScalingSpec spec{};
    double sensitivity_eta_factor{1e2};
};

struct RunConfig {
    std::string model{"gaussian"};
    OscillatorPair pair{2.0, 1.0};
    BathConfig hot{1.0, std::nullopt, 1, 0.1};
    BathConfig cold{0.5, std::nullopt, 1, 0.1};
    GaussianConfig gaussian{};
    PoissonConfig poisson{};
    OracleConfig oracle{};
    std::optional<SweepSpec> sweep;
    Fig2Config fig2{};
    ScalingConfig scaling{};
    std::string out_dir{"out"};
    OutputFormat format{OutputFormat::csv};
    int jobs{1};
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& where, std::set<std::string> allowed) {
    if (!obj.is_object())
        throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
}

inline double number(const json& obj, const std::string& key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}

inline int integer(const json& obj, const std::string& key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError(where + "." + key + ": expected an integer");
    return v.get<int>();
}

inline std::string text(const json& obj, const std::string& key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_string())
        throw ConfigError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

template <class F>
void optional_field(const json& obj, const std::string& key, F&& apply) {
    if (obj.contains(key))
        apply();
}

inline SolveMode parse_mode(const std::string& s, const std::string& where) {
    if (s == "full")
        return SolveMode::full;
    if (s == "low_temperature")
        return SolveMode::low_temperature;
    throw ConfigError(where + ": mode must be 'full' or 'low_temperature'");
}

inline GridScale parse_scale(const std::string& s, const std::string& where) {
    if (s == "linear")
        return GridScale::linear;
    if (s == "log")
        return GridScale::log;
    throw ConfigError(where + ": scale must be 'linear' or 'log'");
}

inline BathConfig parse_bath(const json& j, const std::string& where, BathConfig b) {
    reject_unknown(j, where, {"temperature", "occupation", "dimension_d", "kappa"});
    if (j.contains("temperature") && j.contains("occupation"))
        throw ConfigError(where + ": give either temperature or occupation, not both");
    if (j.contains("temperature")) {
        b.temperature = number(j, "temperature", where);
        b.occupation.reset();
    }
    if (j.contains("occupation")) {
        b.occupation = number(j, "occupation", where);
        b.temperature.reset();
    }
    optional_field(j, "dimension_d", [&] { b.dimension_d = integer(j, "dimension_d", where); });
    optional_field(j, "kappa", [&] { b.kappa = number(j, "kappa", where); });
    return b;
}

inline std::vector<int> int_list(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw ConfigError(where + ": expected a non-empty array of integers");
    std::vector<int> out;
    for (const auto& v : j) {
        if (!v.is_number_integer())
            throw ConfigError(where + ": expected integers");
        out.push_back(v.get<int>());
    }
    return out;
}

} // namespace detail

inline RunConfig parse_config(const json& root) {
    using namespace detail;
    RunConfig c;
    reject_unknown(root, "config",
                   {"model", "oscillators", "hot", "cold", "gaussian", "poisson", "oracle", "sweep", "fig2",
                    "scaling", "output", "jobs"});
    optional_field(root, "model", [&] { c.model = text(root, "model", "config"); });
    optional_field(root, "jobs", [&] { c.jobs = integer(root, "jobs", "config"); });
    if (root.contains("oscillators")) {
        const json& o = root["oscillators"];
        reject_unknown(o, "oscillators", {"omega_h", "omega_c"});
        optional_field(o, "omega_h", [&] { c.pair.omega_h = number(o, "omega_h", "oscillators"); });
        optional_field(o, "omega_c", [&] { c.pair.omega_c = number(o, "omega_c", "oscillators"); });
    }
    if (root.contains("hot"))
        c.hot = parse_bath(root["hot"], "hot", c.hot);
    if (root.contains("cold"))
        c.cold = parse_bath(root["cold"], "cold", c.cold);
    if (root.contains("gaussian")) {
        const json& g = root["gaussian"];
        reject_unknown(g, "gaussian", {"eta", "gamma_h", "gamma_c"});
        optional_field(g, "eta", [&] { c.gaussian.eta = number(g, "eta", "gaussian"); });
        optional_field(g, "gamma_h", [&] { c.gaussian.gamma_h = number(g, "gamma_h", "gaussian"); });
        optional_field(g, "gamma_c", [&] { c.gaussian.gamma_c = number(g, "gamma_c", "gaussian"); });
    }
    if (root.contains("poisson")) {
        const json& p = root["poisson"];
        reject_unknown(p, "poisson", {"lambda", "xi0", "impulses", "zeta", "mode"});
        if (p.contains("xi0") && p.contains("impulses"))
            throw ConfigError("poisson: give either xi0 or impulses, not both");
        optional_field(p, "lambda", [&] { c.poisson.lambda_rate = number(p, "lambda", "poisson"); });
        optional_field(p, "xi0", [&] { c.poisson.impulses = {Impulse{number(p, "xi0", "poisson"), 1.0}}; });
        optional_field(p, "impulses", [&] {
            const json& list = p["impulses"];
            if (!list.is_array() || list.empty())
                throw ConfigError("poisson.impulses: expected a non-empty array");
            c.poisson.impulses.clear();
            for (const auto& item : list) {
                reject_unknown(item, "poisson.impulses[]", {"xi", "weight"});
                c.poisson.impulses.push_back(
                    {number(item, "xi", "poisson.impulses[]"), number(item, "weight", "poisson.impulses[]")});
            }
        });
        optional_field(p, "zeta", [&] {
            const json& z = p["zeta"];
            if (z.is_number()) {
                c.poisson.zeta = ZetaSet::uniform(z.get<double>());
            } else {
                reject_unknown(z, "poisson.zeta", {"plus_hot", "minus_hot", "plus_cold", "minus_cold"});
                c.poisson.zeta = ZetaSet{number(z, "plus_hot", "poisson.zeta"), number(z, "minus_hot", "poisson.zeta"),
                                         number(z, "plus_cold", "poisson.zeta"),
                                         number(z, "minus_cold", "poisson.zeta")};
            }
        });
        optional_field(p, "mode", [&] { c.poisson.mode = parse_mode(text(p, "mode", "poisson"), "poisson.mode"); });
    }
    if (root.contains("oracle")) {
        const json& o = root["oracle"];
        reject_unknown(o, "oracle", {"levels", "convergence_tol", "dimension_cap", "edge_threshold"});
        optional_field(o, "levels", [&] { c.oracle.levels = int_list(o["levels"], "oracle.levels"); });
        optional_field(o, "convergence_tol",
                       [&] { c.oracle.convergence_tol = number(o, "convergence_tol", "oracle"); });
        optional_field(o, "dimension_cap", [&] { c.oracle.dimension_cap = integer(o, "dimension_cap", "oracle"); });
        optional_field(o, "edge_threshold", [&] { c.oracle.edge_threshold = number(o, "edge_threshold", "oracle"); });
    }
    if (root.contains("sweep")) {
        const json& s = root["sweep"];
        reject_unknown(s, "sweep", {"parameter", "start", "stop", "points", "scale"});
        SweepSpec spec;
        spec.parameter = text(s, "parameter", "sweep");
        spec.start = number(s, "start", "sweep");
        spec.stop = number(s, "stop", "sweep");
        spec.points = integer(s, "points", "sweep");
        optional_field(s, "scale", [&] { spec.scale = parse_scale(text(s, "scale", "sweep"), "sweep.scale"); });
        c.sweep = spec;
    }
    if (root.contains("fig2")) {
        const json& f = root["fig2"];
        reject_unknown(f, "fig2", {"points", "xi0_start", "xi0_stop", "mode"});
        optional_field(f, "points", [&] { c.fig2.points = integer(f, "points", "fig2"); });
        optional_field(f, "xi0_start", [&] { c.fig2.xi0_start = number(f, "xi0_start", "fig2"); });
        optional_field(f, "xi0_stop", [&] { c.fig2.xi0_stop = number(f, "xi0_stop", "fig2"); });
        optional_field(f, "mode", [&] { c.fig2.mode = parse_mode(text(f, "mode", "fig2"), "fig2.mode"); });
    }
    if (root.contains("scaling")) {
        const json& s = root["scaling"];
        reject_unknown(s, "scaling",
                       {"dimensions", "omega_h", "t_hot", "kappa", "t_cold_lo", "t_cold_hi", "points", "eta_factor",
                        "sensitivity_eta_factor", "xi0", "lambda_over_omega_c", "mode", "scan_points"});
        auto& sp = c.scaling.spec;
        optional_field(s, "dimensions", [&] { c.scaling.dimensions = int_list(s["dimensions"], "scaling.dimensions"); });
        optional_field(s, "omega_h", [&] { sp.omega_h = number(s, "omega_h", "scaling"); });
        optional_field(s, "t_hot", [&] { sp.t_hot = number(s, "t_hot", "scaling"); });
        optional_field(s, "kappa", [&] { sp.kappa = number(s, "kappa", "scaling"); });
        optional_field(s, "t_cold_lo", [&] { sp.t_cold_lo = number(s, "t_cold_lo", "scaling"); });
        optional_field(s, "t_cold_hi", [&] { sp.t_cold_hi = number(s, "t_cold_hi", "scaling"); });
        optional_field(s, "points", [&] { sp.points = integer(s, "points", "scaling"); });
        optional_field(s, "eta_factor", [&] { sp.eta_factor = number(s, "eta_factor", "scaling"); });
        optional_field(s, "sensitivity_eta_factor", [&] {
            c.scaling.sensitivity_eta_factor = number(s, "sensitivity_eta_factor", "scaling");
        });
        optional_field(s, "xi0", [&] { sp.xi0 = number(s, "xi0", "scaling"); });
        optional_field(s, "lambda_over_omega_c",
                       [&] { sp.lambda_over_omega_c = number(s, "lambda_over_omega_c", "scaling"); });
        optional_field(s, "mode", [&] { sp.poisson_mode = parse_mode(text(s, "mode", "scaling"), "scaling.mode"); });
        optional_field(s, "scan_points", [&] { sp.optimize.scan_points = integer(s, "scan_points", "scaling"); });
    }
    if (root.contains("output")) {
        const json& o = root["output"];
        reject_unknown(o, "output", {"dir", "format"});
        optional_field(o, "dir", [&] { c.out_dir = text(o, "dir", "output"); });
        optional_field(o, "format", [&] {
            const std::string f = text(o, "format", "output");
            if (f == "csv")
                c.format = OutputFormat::csv;
            else if (f == "structured")
                c.format = OutputFormat::structured;
            else
                throw ConfigError("output.format: must be 'csv' or 'structured'");
        });
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(root);
}

// ---------------------------------------------------------------------------
// Validation and model construction

inline double resolve_temperature(const BathConfig& b, double omega, const std::string& where) {
    if (b.temperature)
        return *b.temperature;
    if (b.occupation) {
        if (!(*b.occupation > 0.0))
            throw ConfigError(where + ".occupation: must be > 0");
        return temperature_for_occupation(omega, *b.occupation);
    }
    throw ConfigError(where + ": temperature or occupation required");
}

inline BathSpec resolve_bath(const BathConfig& b, double omega, BathLabel label, const std::string& where) {
    BathSpec s{resolve_temperature(b, omega, where), b.dimension_d, b.kappa, label};
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return s;
}

inline void validate_common(const RunConfig& c) {
    if (c.model != "gaussian" && c.model != "poisson")
        throw ConfigError("model: must be 'gaussian' or 'poisson'");
    if (c.jobs < 1)
        throw ConfigError("jobs: must be >= 1");
    try {
        c.pair.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("oscillators: ") + e.what());
    }
}

inline GaussianModel gaussian_model(const RunConfig& c) {
    validate_common(c);
    const BathSpec hot = resolve_bath(c.hot, c.pair.omega_h, BathLabel::hot, "hot");
    const BathSpec cold = resolve_bath(c.cold, c.pair.omega_c, BathLabel::cold, "cold");
    if (!(c.gaussian.eta >= 0.0))
        throw ConfigError("gaussian.eta: must be >= 0");
    GaussianModel m = GaussianModel::from_baths(c.pair, hot, cold, c.gaussian.eta);
    if (c.gaussian.gamma_h)
        m.gamma_h = *c.gaussian.gamma_h;
    if (c.gaussian.gamma_c)
        m.gamma_c = *c.gaussian.gamma_c;
    if (!(m.gamma_h > 0.0) || !(m.gamma_c > 0.0))
        throw ConfigError("gaussian.gamma_h and gaussian.gamma_c: must be > 0");
    return m;
}

inline PoissonModel poisson_model(const RunConfig& c) {
    validate_common(c);
    PoissonModel m;
    m.pair = c.pair;
    m.hot = resolve_bath(c.hot, c.pair.omega_h, BathLabel::hot, "hot");
    m.cold = resolve_bath(c.cold, c.pair.omega_c, BathLabel::cold, "cold");
    m.noise = {c.poisson.lambda_rate.value_or(c.pair.omega_c), c.poisson.impulses};
    m.fixed_zeta = c.poisson.zeta;
    m.mode = c.poisson.mode;
    try {
        m.validate();
        if (m.fixed_zeta)
            for (double z : {m.fixed_zeta->plus_hot, m.fixed_zeta->minus_hot, m.fixed_zeta->plus_cold,
                             m.fixed_zeta->minus_cold})
                if (!(z > 0.0))
                    throw std::invalid_argument("poisson.zeta: values must be > 0");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return m;
}

inline ModelVariant model_variant(const RunConfig& c) {
    if (c.model == "poisson")
        return poisson_model(c);
    return gaussian_model(c);
}

// ---------------------------------------------------------------------------
// Resolved configuration echo

inline const char* to_string(SolveMode m) { return m == SolveMode::full ? "full" : "low_temperature"; }

inline json bath_json(const BathConfig& b) {
    json j;
    if (b.temperature)
        j["temperature"] = *b.temperature;
    if (b.occupation)
        j["occupation"] = *b.occupation;
    j["dimension_d"] = b.dimension_d;
    j["kappa"] = b.kappa;
    return j;
}

inline json to_json(const RunConfig& c) {
    json j;
    j["model"] = c.model;
    j["jobs"] = c.jobs;
    j["oscillators"] = {{"omega_h", c.pair.omega_h}, {"omega_c", c.pair.omega_c}};
    j["hot"] = bath_json(c.hot);
    j["cold"] = bath_json(c.cold);
    json g = {{"eta", c.gaussian.eta}};
    if (c.gaussian.gamma_h)
        g["gamma_h"] = *c.gaussian.gamma_h;
    if (c.gaussian.gamma_c)
        g["gamma_c"] = *c.gaussian.gamma_c;
    j["gaussian"] = g;
    json p;
    if (c.poisson.lambda_rate)
        p["lambda"] = *c.poisson.lambda_rate;
    p["impulses"] = json::array();
    for (const auto& imp : c.poisson.impulses)
        p["impulses"].push_back({{"xi", imp.xi}, {"weight", imp.weight}});
    if (c.poisson.zeta)
        p["zeta"] = {{"plus_hot", c.poisson.zeta->plus_hot},
                     {"minus_hot", c.poisson.zeta->minus_hot},
                     {"plus_cold", c.poisson.zeta->plus_cold},
                     {"minus_cold", c.poisson.zeta->minus_cold}};
    p["mode"] = to_string(c.poisson.mode);
    j["poisson"] = p;
    j["oracle"] = {{"levels", c.oracle.levels},
                   {"convergence_tol", c.oracle.convergence_tol},
                   {"dimension_cap", c.oracle.dimension_cap},
                   {"edge_threshold", c.oracle.edge_threshold}};
    if (c.sweep)
        j["sweep"] = {{"parameter", c.sweep->parameter},
                      {"start", c.sweep->start},
                      {"stop", c.sweep->stop},
                      {"points", c.sweep->points},
                      {"scale", c.sweep->scale == GridScale::log ? "log" : "linear"}};
    j["fig2"] = {{"points", c.fig2.points},
                 {"xi0_start", c.fig2.xi0_start},
                 {"xi0_stop", c.fig2.xi0_stop},
                 {"mode", to_string(c.fig2.mode)}};
    const auto& s = c.scaling.spec;
    j["scaling"] = {{"dimensions", c.scaling.dimensions},
                    {"omega_h", s.omega_h},
                    {"t_hot", s.t_hot},
                    {"kappa", s.kappa},
                    {"t_cold_lo", s.t_cold_lo},
                    {"t_cold_hi", s.t_cold_hi},
                    {"points", s.points},
                    {"eta_factor", s.eta_factor},
                    {"sensitivity_eta_factor", c.scaling.sensitivity_eta_factor},
                    {"xi0", s.xi0},
                    {"lambda_over_omega_c", s.lambda_over_omega_c},
                    {"mode", to_string(s.poisson_mode)},
                    {"scan_points", s.optimize.scan_points}};
    j["output"] = {{"dir", c.out_dir}, {"format", c.format == OutputFormat::csv ? "csv" : "structured"}};
    return j;
}

} // namespace qfridge::cli
