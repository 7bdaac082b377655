// oracle.hpp: brute-force check of the moment models: build each noise
// generator on a truncated two-mode Fock space, find its stationary density and
// read the heat currents off as Tr(L_k(rho) H).

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "qfridge/gaussian.hpp"
#include "qfridge/poisson.hpp"
#include "qfridge/thermo.hpp"
#include "qfridge/fock/generator.hpp"
#include "qfridge/fock/operators.hpp"
#include "qfridge/fock/stationary.hpp"

namespace qfridge::fock {

// -eta [X, [X, .]] with bare X; baths relax a and b.
struct GaussianNoise {
    double eta{0.0};
};

// Averaged kicks rho -> exp(-i xi X) rho exp(i xi X) at rate lambda plus the
// drift -lambda <xi> X; baths act on the dressed modes.
struct PoissonKick {
    double lambda_rate{0.0};
    std::vector<Impulse> impulses;
};

// Shift epsilon X plus -eta [X, [X, .]]; baths act on the dressed modes.
struct PoissonDressed {
    double eta{0.0};
    double epsilon{0.0};
};

// Work reservoir at finite temperature: jumps b'a at Gamma_w (N_w + 1) and a'b at Gamma_w N_w.
struct WorkBathFiniteT {
    double gamma_w{0.0};
    double n_w{0.0};
};

using GeneratorVariant = std::variant<GaussianNoise, PoissonKick, PoissonDressed, WorkBathFiniteT>;

inline bool uses_dressed_baths(const GeneratorVariant& v) {
    return std::holds_alternative<PoissonKick>(v) || std::holds_alternative<PoissonDressed>(v);
}

// Physical parameters shared by all variants. Bare baths use gamma_h, gamma_c;
// dressed baths use fixed_zeta when set, otherwise kappa Omega^d from the bath specs.
struct OracleModel {
    OscillatorPair pair;
    BathSpec hot{1.0, 1, 0.1, BathLabel::hot};
    BathSpec cold{0.5, 1, 0.1, BathLabel::cold};
    double gamma_h{0.1};
    double gamma_c{0.1};
    std::optional<ZetaSet> fixed_zeta;

    static OracleModel from(const GaussianModel& m) {
        return {m.pair, m.hot, m.cold, m.gamma_h, m.gamma_c, std::nullopt};
    }
    static OracleModel from(const PoissonModel& m) {
        OracleModel o;
        o.pair = m.pair;
        o.hot = m.hot;
        o.cold = m.cold;
        o.fixed_zeta = m.fixed_zeta;
        return o;
    }
};

// Generator plus what is needed to interpret its stationary state.
struct OracleProblem {
    ModeOperators ops;
    Generator generator;
    SpMat energy;                 // H_s the currents are measured against
    Su2Set moments;               // bare or dressed X, Y, Z, N
    std::optional<DressedFrame> frame;
};

// Kick unitary exp(-i xi X) by scaling and squaring (Pade), X Hermitian.
inline CMat kick_unitary(const SpMat& x, double xi) {
    const CMat generator = Complex(0.0, -xi) * CMat(x);
    return generator.exp();
}

inline SpMat to_sparse(const CMat& m) {
    SpMat s = m.sparseView();
    s.prune(Complex(0.0));
    return s;
}

namespace detail {

inline SpMat free_hamiltonian(const ModeOperators& ops, const OscillatorPair& pair) {
    return SpMat(pair.omega_h * (adjoint(ops.a) * ops.a) + pair.omega_c * (adjoint(ops.b) * ops.b));
}

inline void add_bare_baths(Generator& g, const ModeOperators& ops, const OracleModel& m) {
    const double nh = planck_occupation(m.pair.omega_h, m.hot.temperature);
    const double nc = planck_occupation(m.pair.omega_c, m.cold.temperature);
    g.add_jump(Channel::hot, m.gamma_h * (nh + 1.0), ops.a);
    g.add_jump(Channel::hot, m.gamma_h * nh, adjoint(ops.a));
    g.add_jump(Channel::cold, m.gamma_c * (nc + 1.0), ops.b);
    g.add_jump(Channel::cold, m.gamma_c * nc, adjoint(ops.b));
}

inline void add_dressed_baths(Generator& g, const SpMat& m1, const SpMat& m2, const DressedFrame& f,
                              const DressedRateSet& r) {
    const double c2 = f.cos2_theta;
    const double s2 = f.sin2_theta();
    g.add_jump(Channel::hot, c2 * r.hot.gamma1, adjoint(m1));
    g.add_jump(Channel::hot, c2 * r.hot.gamma2, m1);
    g.add_jump(Channel::hot, s2 * r.hot.gamma3, adjoint(m2));
    g.add_jump(Channel::hot, s2 * r.hot.gamma4, m2);
    g.add_jump(Channel::cold, s2 * r.cold.gamma1, adjoint(m1));
    g.add_jump(Channel::cold, s2 * r.cold.gamma2, m1);
    g.add_jump(Channel::cold, c2 * r.cold.gamma3, adjoint(m2));
    g.add_jump(Channel::cold, c2 * r.cold.gamma4, m2);
}

} // namespace detail

inline OracleProblem build_generator(const FockConfig& config, const GeneratorVariant& variant,
                                     const OracleModel& model) {
    ModeOperators ops = build_mode_operators(config);
    Generator gen(ops.excitation);
    const SpMat h0 = detail::free_hamiltonian(ops, model.pair);
    const SpMat& x = ops.su2.X;

    if (!uses_dressed_baths(variant)) {
        gen.add_hamiltonian(Channel::system, h0);
        detail::add_bare_baths(gen, ops, model);
        if (const auto* g = std::get_if<GaussianNoise>(&variant)) {
            gen.add_jump(Channel::noise, 2.0 * g->eta, x);
        } else {
            const auto& w = std::get<WorkBathFiniteT>(variant);
            gen.add_jump(Channel::noise, w.gamma_w * (w.n_w + 1.0), SpMat(adjoint(ops.b) * ops.a));
            gen.add_jump(Channel::noise, w.gamma_w * w.n_w, SpMat(adjoint(ops.a) * ops.b));
        }
        Su2Set moments = ops.su2;
        return {std::move(ops), std::move(gen), h0, std::move(moments), std::nullopt};
    }

    // Dressed picture: the shift epsilon fixes the normal modes the baths see.
    double epsilon = 0.0;
    if (const auto* k = std::get_if<PoissonKick>(&variant))
        epsilon = kick_moments(PoissonNoiseSpec{k->lambda_rate, k->impulses}).epsilon;
    else
        epsilon = std::get<PoissonDressed>(variant).epsilon;
    const DressedFrame frame = dressed_frame(model.pair, epsilon);
    const DressedRateSet rates = model.fixed_zeta
                                     ? dressed_rates_fixed(frame, model.hot, model.cold, *model.fixed_zeta)
                                     : dressed_rates(frame, model.hot, model.cold);
    const SpMat h_dressed = h0 + epsilon * x;
    gen.add_hamiltonian(Channel::system, h_dressed);
    const auto [m1, m2] = ops.rotated(frame.theta);
    detail::add_dressed_baths(gen, m1, m2, frame, rates);

    if (const auto* k = std::get_if<PoissonKick>(&variant)) {
        // Total Hamiltonian stays h0 - lambda <xi> X; the epsilon X moved into the
        // system term is booked against the noise channel.
        const PoissonNoiseSpec spec{k->lambda_rate, k->impulses};
        spec.validate();
        gen.add_hamiltonian(Channel::noise, SpMat(-(k->lambda_rate * spec.mean_xi() + epsilon) * x));
        std::vector<double> weights;
        std::vector<SpMat> unitaries;
        for (const auto& imp : k->impulses) {
            weights.push_back(imp.weight);
            unitaries.push_back(to_sparse(kick_unitary(x, imp.xi)));
        }
        gen.add_kick(Channel::noise, k->lambda_rate, std::move(weights), std::move(unitaries));
    } else {
        gen.add_jump(Channel::noise, 2.0 * std::get<PoissonDressed>(variant).eta, x);
    }
    Su2Set moments = su2_set(m1, m2);
    return {std::move(ops), std::move(gen), h_dressed, std::move(moments), frame};
}

// Re Tr(A B) for dense A and sparse B.
inline double trace_product(const CMat& a, const SpMat& b) {
    Complex t = 0.0;
    for (int k = 0; k < b.outerSize(); ++k)
        for (SpMat::InnerIterator it(b, k); it; ++it)
            t += a(it.col(), it.row()) * it.value();
    return t.real();
}

inline CurrentsReport currents_from_density(const CMat& rho, const Generator& gen, const SpMat& energy) {
    return CurrentsReport::make(trace_product(gen.apply(rho, Channel::hot), energy),
                                trace_product(gen.apply(rho, Channel::cold), energy),
                                trace_product(gen.apply(rho, Channel::noise), energy));
}

inline MomentState expectation(const CMat& rho, const Su2Set& s) {
    return {trace_product(rho, s.X), trace_product(rho, s.Y), trace_product(rho, s.Z), trace_product(rho, s.N)};
}

// d/dt of (<X>, <Y>, <Z>, <N>) under the full generator.
inline Eigen::Vector4d moment_rates(const OracleProblem& p, const CMat& rho) {
    const CMat drho = p.generator.apply(rho);
    return {trace_product(drho, p.moments.X), trace_product(drho, p.moments.Y), trace_product(drho, p.moments.Z),
            trace_product(drho, p.moments.N)};
}

// Largest marginal population on the top retained level of either mode.
inline double edge_population(const CMat& rho, const ModeOperators& ops) {
    double pa = 0.0, pb = 0.0;
    for (int i = 0; i < ops.dim(); ++i) {
        if (ops.level_a(i) == ops.levels_a - 1)
            pa += rho(i, i).real();
        if (ops.level_b(i) == ops.levels_b - 1)
            pb += rho(i, i).real();
    }
    return std::max(pa, pb);
}

struct OracleResult {
    StationaryDensity density;
    CurrentsReport currents;
    MomentState moments;
    double edge_population{0.0};
};

inline OracleResult solve(const OracleProblem& p, const StationaryOptions& opt = {}) {
    OracleResult r;
    r.density = stationary_density(p.generator, opt);
    r.currents = currents_from_density(r.density.rho, p.generator, p.energy);
    r.moments = expectation(r.density.rho, p.moments);
    r.edge_population = edge_population(r.density.rho, p.ops);
    return r;
}

inline OracleResult solve(const FockConfig& config, const GeneratorVariant& variant, const OracleModel& model,
                          const StationaryOptions& opt = {}) {
    return solve(build_generator(config, variant, model), opt);
}

// ---------------------------------------------------------------------------
// Truncation convergence

struct TruncationRow {
    int levels_a{0};
    int levels_b{0};
    CurrentsReport currents;
    double relative_change{0.0};   // |J_c - previous J_c| / |J_c|, 0 for the first row
    double edge_population{0.0};
    bool edge_warning{false};
};

struct TruncationReport {
    std::vector<TruncationRow> rows;
    bool converged{false};
    double achieved_tol{0.0};
    double edge_threshold{1e-8};
};

inline TruncationReport truncation_sweep(const std::vector<int>& ladder, const GeneratorVariant& variant,
                                         const OracleModel& model, double convergence_tol = 1e-6,
                                         long dimension_cap = 4096, double edge_threshold = 1e-8) {
    if (ladder.size() < 2)
        throw ConfigError("truncation ladder needs at least two entries");
    TruncationReport report;
    report.edge_threshold = edge_threshold;
    report.achieved_tol = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (i > 0 && ladder[i] <= ladder[i - 1])
            throw ConfigError("truncation ladder must be increasing");
        const FockConfig cfg{ladder[i], ladder[i], convergence_tol, dimension_cap};
        const OracleResult res = solve(cfg, variant, model);
        TruncationRow row;
        row.levels_a = row.levels_b = ladder[i];
        row.currents = res.currents;
        row.edge_population = res.edge_population;
        row.edge_warning = res.edge_population > edge_threshold;
        if (i > 0) {
            const double prev = report.rows.back().currents.j_cold;
            const double scale = std::max(std::abs(res.currents.j_cold), std::numeric_limits<double>::min());
            row.relative_change = std::abs(res.currents.j_cold - prev) / scale;
            report.achieved_tol = row.relative_change;
            if (row.relative_change < convergence_tol)
                report.converged = true;
        }
        report.rows.push_back(row);
        if (report.converged)
            break;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Infinite-temperature limit of the work reservoir

struct SingularBathRow {
    double n_w{0.0};
    double gamma_w{0.0};
    double j_cold{0.0};
    double relative_deviation{0.0};
};

struct SingularBathReport {
    double reference_eta{0.0};
    double reference_j_cold{0.0};
    std::vector<SingularBathRow> rows;
    bool strictly_decreasing{false};
    double extrapolated_j_cold{0.0};
    double extrapolated_deviation{0.0};
};

// Polynomial extrapolation to 1/N_w -> 0 through the rows with N_w > 0 (Neville).
inline double extrapolate_inverse(const std::vector<double>& n_w, const std::vector<double>& values) {
    std::vector<double> h, p;
    for (std::size_t i = 0; i < n_w.size(); ++i)
        if (n_w[i] > 0.0) {
            h.push_back(1.0 / n_w[i]);
            p.push_back(values[i]);
        }
    if (h.empty())
        throw std::invalid_argument("extrapolation needs at least one N_w > 0");
    const std::size_t n = h.size();
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t i = 0; i + level < n; ++i)
            p[i] = (h[i] * p[i + 1] - h[i + level] * p[i]) / (h[i] - h[i + level]);
    return p[0];
}

// For each N_w, Gamma_w = eta_target / N_w (Gamma_w = eta_target for N_w = 0),
// compared against GaussianNoise{reference_eta}. extrapolation_points limits the
// Richardson step to the last (largest N_w) rows. Without any N_w > 0 the
// extrapolated fields are NaN.
inline SingularBathReport singular_bath_limit_check(double eta_target, const std::vector<double>& n_w_ladder,
                                                    const OracleModel& model, const FockConfig& config,
                                                    double reference_eta, std::size_t extrapolation_points = 2) {
    if (!(eta_target > 0.0))
        throw std::invalid_argument("singular_bath_limit_check: eta_target must be > 0");
    SingularBathReport rep;
    rep.reference_eta = reference_eta;
    rep.reference_j_cold = solve(config, GaussianNoise{reference_eta}, model).currents.j_cold;
    std::vector<double> nws, jcs;
    for (double n_w : n_w_ladder) {
        SingularBathRow row;
        row.n_w = n_w;
        row.gamma_w = n_w > 0.0 ? eta_target / n_w : eta_target;
        row.j_cold = solve(config, WorkBathFiniteT{row.gamma_w, n_w}, model).currents.j_cold;
        row.relative_deviation = std::abs(row.j_cold - rep.reference_j_cold) / std::abs(rep.reference_j_cold);
        rep.rows.push_back(row);
        if (n_w > 0.0) {
            nws.push_back(n_w);
            jcs.push_back(row.j_cold);
        }
    }
    rep.strictly_decreasing = rep.rows.size() >= 2;
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        if (!(rep.rows[i].relative_deviation < rep.rows[i - 1].relative_deviation))
            rep.strictly_decreasing = false;
    if (nws.empty()) {
        rep.extrapolated_j_cold = std::numeric_limits<double>::quiet_NaN();
        rep.extrapolated_deviation = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }
    const std::size_t k = std::min(extrapolation_points, nws.size());
    const std::vector<double> tail_n(nws.end() - static_cast<long>(k), nws.end());
    const std::vector<double> tail_j(jcs.end() - static_cast<long>(k), jcs.end());
    rep.extrapolated_j_cold = extrapolate_inverse(tail_n, tail_j);
    rep.extrapolated_deviation =
        std::abs(rep.extrapolated_j_cold - rep.reference_j_cold) / std::abs(rep.reference_j_cold);
    return rep;
}

} // namespace qfridge::fock
