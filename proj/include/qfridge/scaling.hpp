// scaling.hpp: parameter sweeps, cooling-power optimisation and the low-T_c
// exponent study for both noise models.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "qfridge/errors.hpp"
#include "qfridge/gaussian.hpp"
#include "qfridge/optimize.hpp"
#include "qfridge/poisson.hpp"
#include "qfridge/thermo.hpp"

namespace qfridge {

// Evaluates f(0..n-1) on at most `jobs` threads; results keep their index order.
// The first exception thrown by any task is rethrown after all workers join.
template <class T>
std::vector<T> parallel_map(std::size_t n, int jobs, const std::function<T(std::size_t)>& f) {
    std::vector<T> out(n);
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    out[i] = f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
    return out;
}

using ModelVariant = std::variant<GaussianModel, PoissonModel>;

// One evaluated parameter point with its law audit.
struct SweepRow {
    double parameter{0.0};
    bool feasible{true};
    std::string note;   // reason for infeasibility
    CurrentsReport currents;
    EntropyReport entropy;
    std::optional<double> cop;         // J_c / J_n at cooling points
    std::optional<double> cop_otto;    // omega_c/(omega_h - omega_c) or Omega_-/(Omega_+ - Omega_-)
    std::optional<double> eta;         // noise strength actually used
    LawAudit audit;
};

inline double model_t_hot(const ModelVariant& m) {
    return std::visit([](const auto& x) { return x.hot.temperature; }, m);
}
inline double model_t_cold(const ModelVariant& m) {
    return std::visit([](const auto& x) { return x.cold.temperature; }, m);
}

// Steady state of one model point. Poisson points violating omega_h omega_c > epsilon^2
// come back flagged infeasible instead of throwing.
inline SweepRow evaluate_point(const ModelVariant& model, double parameter = 0.0) {
    SweepRow row;
    row.parameter = parameter;
    const double th = model_t_hot(model);
    const double tc = model_t_cold(model);
    if (const auto* g = std::get_if<GaussianModel>(&model)) {
        g->validate();
        row.currents = all_currents(*g);
        row.eta = g->eta;
        if (g->pair.omega_h > g->pair.omega_c)
            row.cop_otto = cop_otto(g->pair);
    } else {
        const auto& p = std::get<PoissonModel>(model);
        PoissonEvaluation ev;
        try {
            ev = evaluate(p);
        } catch (const PhysicsError& e) {
            row.feasible = false;
            row.note = e.what();
            row.eta = kick_moments(p.noise).eta;
            return row;
        }
        row.currents = ev.steady.currents;
        row.eta = ev.kick.eta;
        if (ev.frame.omega_plus > ev.frame.omega_minus)
            row.cop_otto = cop_poisson(ev.frame);
    }
    row.entropy = entropy_production(row.currents, th, tc);
    if (row.currents.j_cold > 0.0 && row.currents.j_noise > 0.0)
        row.cop = row.currents.j_cold / row.currents.j_noise;
    row.audit = audit_laws(row.currents, row.entropy, row.cop_otto.value_or(std::numeric_limits<double>::max()),
                           th, tc);
    return row;
}

struct SweepSpec {
    std::string parameter;
    double start{0.0};
    double stop{1.0};
    int points{2};
    GridScale scale{GridScale::linear};

    std::vector<double> grid() const { return make_grid(start, stop, points, scale); }
};

inline const std::vector<std::string>& sweepable_parameters(bool poisson) {
    static const std::vector<std::string> gaussian{"eta", "omega_h", "omega_c", "t_hot", "t_cold", "gamma_h",
                                                   "gamma_c"};
    static const std::vector<std::string> kicked{"xi0", "lambda", "omega_h", "omega_c", "t_hot", "t_cold"};
    return poisson ? kicked : gaussian;
}

// Copy of `base` with one named parameter replaced.
inline ModelVariant with_parameter(const ModelVariant& base, const std::string& name, double value) {
    if (const auto* g0 = std::get_if<GaussianModel>(&base)) {
        GaussianModel g = *g0;
        if (name == "eta") g.eta = value;
        else if (name == "omega_h") g.pair.omega_h = value;
        else if (name == "omega_c") g.pair.omega_c = value;
        else if (name == "t_hot") g.hot.temperature = value;
        else if (name == "t_cold") g.cold.temperature = value;
        else if (name == "gamma_h") g.gamma_h = value;
        else if (name == "gamma_c") g.gamma_c = value;
        else throw ConfigError("unknown sweep parameter '" + name + "' for the gaussian model");
        return g;
    }
    PoissonModel p = std::get<PoissonModel>(base);
    if (name == "xi0") {
        if (p.noise.impulses.size() != 1)
            throw ConfigError("xi0 sweeps need a single-impulse (delta) distribution");
        p.noise.impulses.front().xi = value;
    } else if (name == "lambda") p.noise.lambda_rate = value;
    else if (name == "omega_h") p.pair.omega_h = value;
    else if (name == "omega_c") p.pair.omega_c = value;
    else if (name == "t_hot") p.hot.temperature = value;
    else if (name == "t_cold") p.cold.temperature = value;
    else throw ConfigError("unknown sweep parameter '" + name + "' for the poisson model");
    return p;
}

inline std::vector<SweepRow> sweep(const SweepSpec& spec, const ModelVariant& base, int jobs = 1) {
    const std::vector<double> g = spec.grid();
    with_parameter(base, spec.parameter, g.front());   // rejects unknown names before any work
    return parallel_map<SweepRow>(g.size(), jobs, [&](std::size_t i) {
        return evaluate_point(with_parameter(base, spec.parameter, g[i]), g[i]);
    });
}

// ---------------------------------------------------------------------------
// Optimisation

struct CoolingOptimum {
    double argmax{0.0};
    double j_cold{0.0};
    double bracket_lo{0.0};
    double bracket_hi{0.0};
    double j_cold_lo{0.0};
    double j_cold_hi{0.0};
    SweepRow point;   // full evaluation at the optimum
};

struct OptimizeOptions {
    int scan_points{60};
    double rel_tol{1e-6};
};

inline CoolingOptimum finish_optimum(const Maximum& m, const std::function<ModelVariant(double)>& at) {
    CoolingOptimum o;
    o.argmax = m.argmax;
    o.j_cold = m.value;
    o.bracket_lo = m.bracket_lo;
    o.bracket_hi = m.bracket_hi;
    o.j_cold_lo = m.value_lo;
    o.j_cold_hi = m.value_hi;
    o.point = evaluate_point(at(m.argmax), m.argmax);
    return o;
}

// Window of cold frequencies that can be cooled: omega_c < omega_h T_c / T_h.
inline double cooling_window_edge(double omega_h, double t_hot, double t_cold) {
    if (!(t_cold < t_hot))
        throw NoInteriorMaximum("no cooling window: T_c must lie below T_h");
    return omega_h * t_cold / t_hot;
}

// Maximise J_c over omega_c for a Gaussian model; rates follow Gamma = kappa omega^d.
inline CoolingOptimum optimize_gaussian_omega_c(const GaussianModel& base, const OptimizeOptions& opt = {}) {
    const double edge = cooling_window_edge(base.pair.omega_h, base.hot.temperature, base.cold.temperature);
    const auto at = [&](double wc) -> ModelVariant {
        return GaussianModel::from_baths({base.pair.omega_h, wc}, base.hot, base.cold, base.eta);
    };
    const auto f = [&](double wc) { return cooling_current(std::get<GaussianModel>(at(wc))); };
    const auto grid = make_grid(edge * 1e-3, edge * (1.0 - 1e-9), opt.scan_points, GridScale::log);
    return finish_optimum(maximize_on_grid(f, grid, opt.rel_tol, true), at);
}

// Maximise J_c over omega_c for a Poisson model with lambda tied to omega_c.
inline CoolingOptimum optimize_poisson_omega_c(const PoissonModel& base, double lambda_over_omega_c = 1.0,
                                               const OptimizeOptions& opt = {}) {
    const double edge = cooling_window_edge(base.pair.omega_h, base.hot.temperature, base.cold.temperature);
    const auto at = [&](double wc) -> ModelVariant {
        PoissonModel p = base;
        p.pair.omega_c = wc;
        p.noise.lambda_rate = lambda_over_omega_c * wc;
        return p;
    };
    const auto f = [&](double wc) {
        const SweepRow r = evaluate_point(at(wc), wc);
        return r.feasible ? r.currents.j_cold : -std::numeric_limits<double>::infinity();
    };
    const auto grid = make_grid(edge * 1e-3, edge * (1.0 - 1e-9), opt.scan_points, GridScale::log);
    return finish_optimum(maximize_on_grid(f, grid, opt.rel_tol, true), at);
}

// Maximise J_c over a delta-distributed impulse xi0 in [0, pi].
inline CoolingOptimum optimize_poisson_xi0(const PoissonModel& base, const OptimizeOptions& opt = {}) {
    const auto at = [&](double xi) -> ModelVariant { return with_parameter(base, "xi0", xi); };
    const auto f = [&](double xi) {
        const SweepRow r = evaluate_point(at(xi), xi);
        return r.feasible ? r.currents.j_cold : -std::numeric_limits<double>::infinity();
    };
    const auto grid = make_grid(0.0, std::numbers::pi, std::max(opt.scan_points, 3), GridScale::linear);
    return finish_optimum(maximize_on_grid(f, grid, opt.rel_tol, false), at);
}

// ---------------------------------------------------------------------------
// Low-temperature exponent

enum class ModelFamily { gaussian, poisson };

inline const char* to_string(ModelFamily f) { return f == ModelFamily::gaussian ? "gaussian" : "poisson"; }

struct ScalingPoint {
    double t_cold{0.0};
    double omega_c{0.0};
    double j_cold{0.0};
    bool laws_ok{true};
    std::string audit;
};

struct ScalingResult {
    ModelFamily family{ModelFamily::gaussian};
    int dimension_d{1};
    double eta{0.0};            // Gaussian only
    std::vector<ScalingPoint> points;
    PowerLawFit fit;
    bool laws_ok{true};
};

struct ScalingSpec {
    double omega_h{10.0};
    double t_hot{2.0};
    double kappa{0.1};
    double t_cold_lo{1e-4};
    double t_cold_hi{1e-2};
    int points{20};
    double eta_factor{1e3};       // Gaussian: eta = factor * kappa * omega_c,max^d
    double xi0{std::numbers::pi / 2};
    double lambda_over_omega_c{1.0};
    // The full dressed solve leaks heat from the hot normal mode into the cold bath
    // through sin^2(theta) kappa Omega_+^d, which dominates for d >= 2.
    SolveMode poisson_mode{SolveMode::low_temperature};
    OptimizeOptions optimize{};

    void validate() const {
        if (!(omega_h > 0.0) || !(t_hot > 0.0) || !(kappa > 0.0))
            throw ConfigError("scaling: omega_h, t_hot and kappa must be > 0");
        if (!(t_cold_lo > 0.0) || !(t_cold_hi > t_cold_lo) || !(t_cold_hi < t_hot))
            throw ConfigError("scaling: need 0 < t_cold_lo < t_cold_hi < t_hot");
        if (points < 3)
            throw ConfigError("scaling: need at least 3 temperatures");
        if (!(eta_factor > 0.0) || !(lambda_over_omega_c > 0.0))
            throw ConfigError("scaling: eta_factor and lambda_over_omega_c must be > 0");
    }

    // Largest cold rate reachable over the sweep, kappa (omega_h T_c,max / T_h)^d.
    double gaussian_eta(int d) const {
        return eta_factor * kappa * std::pow(omega_h * t_cold_hi / t_hot, d);
    }
};

inline ScalingResult third_law_study(ModelFamily family, int d, const ScalingSpec& spec, int jobs = 1) {
    spec.validate();
    if (d < 1 || d > 3)
        throw ConfigError("scaling: dimension_d must be 1, 2 or 3");
    ScalingResult res;
    res.family = family;
    res.dimension_d = d;
    res.eta = family == ModelFamily::gaussian ? spec.gaussian_eta(d) : 0.0;
    const auto temps = make_grid(spec.t_cold_lo, spec.t_cold_hi, spec.points, GridScale::log);
    res.points = parallel_map<ScalingPoint>(temps.size(), jobs, [&](std::size_t i) {
        const double tc = temps[i];
        const BathSpec hot{spec.t_hot, d, spec.kappa, BathLabel::hot};
        const BathSpec cold{tc, d, spec.kappa, BathLabel::cold};
        CoolingOptimum opt;
        if (family == ModelFamily::gaussian) {
            GaussianModel g;
            g.pair = {spec.omega_h, tc};
            g.hot = hot;
            g.cold = cold;
            g.eta = res.eta;
            opt = optimize_gaussian_omega_c(g, spec.optimize);
        } else {
            PoissonModel p;
            p.pair = {spec.omega_h, tc};
            p.hot = hot;
            p.cold = cold;
            p.noise = PoissonNoiseSpec::delta(spec.lambda_over_omega_c * tc, spec.xi0);
            p.mode = spec.poisson_mode;
            opt = optimize_poisson_omega_c(p, spec.lambda_over_omega_c, spec.optimize);
        }
        return ScalingPoint{tc, opt.argmax, opt.j_cold, opt.point.audit.ok(), opt.point.audit.describe()};
    });
    std::vector<double> x, y;
    for (const auto& p : res.points) {
        x.push_back(p.t_cold);
        y.push_back(p.j_cold);
        res.laws_ok = res.laws_ok && p.laws_ok;
    }
    res.fit = fit_exponent(x, y);
    return res;
}

} // namespace qfridge
