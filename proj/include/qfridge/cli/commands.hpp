// commands.hpp: the five subcommands. Each returns tables and a summary; the
// caller writes them next to a run report that echoes the resolved config.

#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfridge/cli/config.hpp"
#include "qfridge/cli/writers.hpp"
#include "qfridge/fock/oracle.hpp"
#include "qfridge/gaussian.hpp"
#include "qfridge/poisson.hpp"
#include "qfridge/scaling.hpp"

namespace qfridge::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunOutput {
    std::string command;
    std::vector<Table> tables;
    json results = json::object();
    std::vector<std::string> lines;   // human summary for stdout
    std::size_t audited{0};
    std::size_t audit_failures{0};
    std::vector<std::string> audit_messages;
    int exit_code{0};
    std::string failure;              // set with a nonzero exit code

    void audit(const LawAudit& a, const std::string& where) {
        ++audited;
        if (!a.ok()) {
            ++audit_failures;
            if (audit_messages.size() < 20)
                audit_messages.push_back(where + ": " + a.describe());
        }
    }
};

namespace detail {

inline std::string fixed(double v, int digits) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

inline std::string sci(double v) {
    std::ostringstream os;
    os.setf(std::ios::scientific);
    os.precision(6);
    os << v;
    return os.str();
}

inline const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> cols{"parameter", "feasible", "j_hot",   "j_cold", "j_noise",
                                               "sigma_hot", "sigma_cold", "sigma_u", "cop",    "eta",
                                               "laws_ok",   "note"};
    return cols;
}

inline std::vector<Cell> sweep_cells(const SweepRow& r) {
    if (!r.feasible)
        return {r.parameter, false, {}, {}, {}, {}, {}, {}, {}, opt_cell(r.eta), {}, r.note};
    return {r.parameter,
            true,
            r.currents.j_hot,
            r.currents.j_cold,
            r.currents.j_noise,
            r.entropy.sigma_hot,
            r.entropy.sigma_cold,
            r.entropy.sigma_total,
            opt_cell(r.cop),
            opt_cell(r.eta),
            r.audit.ok(),
            std::string()};
}

} // namespace detail

// ---------------------------------------------------------------------------

inline RunOutput cmd_steady(const RunConfig& c) {
    RunOutput out;
    out.command = "steady";
    Table t{"steady",
            {"model", "j_hot", "j_cold", "j_noise", "first_law_residual", "sigma_hot", "sigma_cold", "sigma_u", "cop",
             "cop_otto", "cop_carnot", "population_a", "population_b", "eta", "epsilon", "omega_plus", "omega_minus"},
            {}};
    const ModelVariant model = model_variant(c);
    const double th = model_t_hot(model);
    const double tc = model_t_cold(model);
    std::optional<double> carnot;
    if (th > tc)
        carnot = cop_carnot(th, tc);
    SweepRow row;
    double pop_a = 0.0, pop_b = 0.0;
    std::optional<double> epsilon, omega_plus, omega_minus;
    if (const auto* g = std::get_if<GaussianModel>(&model)) {
        row = evaluate_point(*g);
        const auto ss = steady_state(*g);
        pop_a = ss.population_a;
        pop_b = ss.population_b;
    } else {
        const auto& p = std::get<PoissonModel>(model);
        const PoissonEvaluation ev = evaluate(p);   // infeasible points throw here
        row = evaluate_point(p);
        pop_a = ev.steady.moments.population_a();
        pop_b = ev.steady.moments.population_b();
        epsilon = ev.kick.epsilon;
        omega_plus = ev.frame.omega_plus;
        omega_minus = ev.frame.omega_minus;
    }
    out.audit(row.audit, "steady");
    t.add({c.model, row.currents.j_hot, row.currents.j_cold, row.currents.j_noise, row.currents.first_law_residual,
           row.entropy.sigma_hot, row.entropy.sigma_cold, row.entropy.sigma_total, opt_cell(row.cop),
           opt_cell(row.cop_otto), opt_cell(carnot), pop_a, pop_b, opt_cell(row.eta), opt_cell(epsilon),
           opt_cell(omega_plus), opt_cell(omega_minus)});
    out.tables.push_back(t);
    out.lines.push_back("model = " + c.model);
    out.lines.push_back("J_h = " + detail::sci(row.currents.j_hot) + ", J_c = " + detail::sci(row.currents.j_cold) +
                        ", J_n = " + detail::sci(row.currents.j_noise));
    out.lines.push_back("sigma_u = " + detail::sci(row.entropy.sigma_total) +
                        (row.currents.j_cold > 0.0 ? " (cooling)" : " (not cooling)"));
    if (row.cop)
        out.lines.push_back("COP = " + detail::sci(*row.cop) + ", COP_otto = " + detail::sci(*row.cop_otto) +
                            (carnot ? ", COP_carnot = " + detail::sci(*carnot) : std::string()));
    out.results = t.to_json().front();
    return out;
}

inline RunOutput cmd_sweep(const RunConfig& c) {
    RunOutput out;
    out.command = "sweep";
    if (!c.sweep)
        throw ConfigError("sweep: the config needs a 'sweep' section");
    const auto& allowed = sweepable_parameters(c.model == "poisson");
    if (std::find(allowed.begin(), allowed.end(), c.sweep->parameter) == allowed.end()) {
        std::string list;
        for (const auto& a : allowed)
            list += (list.empty() ? "" : ", ") + a;
        throw ConfigError("sweep.parameter: unknown parameter '" + c.sweep->parameter + "' for the " + c.model +
                          " model (allowed: " + list + ")");
    }
    const ModelVariant base = model_variant(c);
    const auto rows = sweep(*c.sweep, base, c.jobs);
    Table t{"sweep", detail::sweep_columns(), {}};
    std::size_t feasible = 0;
    for (const auto& r : rows) {
        t.add(detail::sweep_cells(r));
        if (r.feasible) {
            ++feasible;
            out.audit(r.audit, c.sweep->parameter + " = " + format_number(r.parameter));
        }
    }
    out.tables.push_back(t);
    out.results = {{"rows", rows.size()}, {"feasible", feasible}};
    out.lines.push_back("sweep over " + c.sweep->parameter + ": " + std::to_string(rows.size()) + " points, " +
                        std::to_string(feasible) + " feasible");
    return out;
}

inline RunOutput cmd_fig2(const RunConfig& c) {
    RunOutput out;
    out.command = "fig2";
    const SweepSpec spec{"xi0", c.fig2.xi0_start, c.fig2.xi0_stop, c.fig2.points, GridScale::linear};
    const ModelVariant base = figure2_model(0.0, c.fig2.mode);
    const auto rows = sweep(spec, base, c.jobs);
    Table t{"fig2", {"xi0", "sigma_h", "sigma_c", "sigma_u", "j_cold", "feasible", "j_hot", "j_noise", "eta"}, {}};
    double min_sigma = std::numeric_limits<double>::infinity();
    double best_xi = 0.0, best_jc = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        if (!r.feasible) {
            t.add({r.parameter, {}, {}, {}, {}, false, {}, {}, opt_cell(r.eta)});
            continue;
        }
        out.audit(r.audit, "xi0 = " + format_number(r.parameter));
        t.add({r.parameter, r.entropy.sigma_hot, r.entropy.sigma_cold, r.entropy.sigma_total, r.currents.j_cold, true,
               r.currents.j_hot, r.currents.j_noise, opt_cell(r.eta)});
        min_sigma = std::min(min_sigma, r.entropy.sigma_total);
        if (r.parameter <= std::numbers::pi && r.currents.j_cold > best_jc) {
            best_jc = r.currents.j_cold;
            best_xi = r.parameter;
        }
    }
    out.tables.push_back(t);
    out.results = {{"rows", rows.size()}, {"min_sigma_u", min_sigma}, {"argmax_xi0", best_xi}, {"max_j_cold", best_jc}};
    out.lines.push_back("fig2: " + std::to_string(rows.size()) + " points, min sigma_u = " + detail::sci(min_sigma));
    out.lines.push_back("best xi0 on [0, pi] = " + detail::fixed(best_xi, 6) + " (J_c = " + detail::sci(best_jc) + ")");
    return out;
}

inline RunOutput cmd_scaling(const RunConfig& c) {
    RunOutput out;
    out.command = "scaling";
    validate_common(c);
    const ModelFamily family = c.model == "poisson" ? ModelFamily::poisson : ModelFamily::gaussian;
    Table points{"scaling_points", {"family", "d", "t_cold", "omega_c_opt", "j_cold", "laws_ok"}, {}};
    Table summary{"scaling_summary",
                  {"family", "d", "alpha", "alpha_stderr", "r_squared", "window_lo", "window_hi", "points", "eta",
                   "alpha_sensitivity", "eta_sensitivity"},
                  {}};
    for (int d : c.scaling.dimensions) {
        const ScalingResult r = third_law_study(family, d, c.scaling.spec, c.jobs);
        for (const auto& p : r.points) {
            points.add({std::string(to_string(family)), static_cast<long>(d), p.t_cold, p.omega_c, p.j_cold,
                        p.laws_ok});
            ++out.audited;
            if (!p.laws_ok) {
                ++out.audit_failures;
                out.audit_messages.push_back("d = " + std::to_string(d) + ", T_c = " + format_number(p.t_cold) +
                                             ": " + p.audit);
            }
        }
        std::optional<double> alpha_sens, eta_sens;
        if (family == ModelFamily::gaussian) {
            ScalingSpec alt = c.scaling.spec;
            alt.eta_factor = c.scaling.sensitivity_eta_factor;
            const ScalingResult rs = third_law_study(family, d, alt, c.jobs);
            alpha_sens = rs.fit.alpha;
            eta_sens = rs.eta;
        }
        summary.add({std::string(to_string(family)), static_cast<long>(d), r.fit.alpha, r.fit.alpha_stderr,
                     r.fit.r_squared, r.fit.window_lo, r.fit.window_hi, static_cast<long>(r.fit.points),
                     family == ModelFamily::gaussian ? Cell(r.eta) : Cell(), opt_cell(alpha_sens),
                     opt_cell(eta_sens)});
        std::string line = to_string(family) + std::string(" d = ") + std::to_string(d) + ": alpha = " +
                           detail::fixed(r.fit.alpha, 4) + " ± " + detail::fixed(r.fit.alpha_stderr, 4) +
                           " (R^2 = " + detail::fixed(r.fit.r_squared, 6) + ", expected " + std::to_string(d + 1) + ")";
        if (alpha_sens)
            line += "; eta x0.1 -> alpha = " + detail::fixed(*alpha_sens, 4);
        out.lines.push_back(line);
    }
    out.tables.push_back(points);
    out.tables.push_back(summary);
    out.results = summary.to_json();
    return out;
}

inline RunOutput cmd_oracle(const RunConfig& c) {
    RunOutput out;
    out.command = "oracle";
    const ModelVariant model = model_variant(c);
    const auto& oc = c.oracle;
    for (int l : oc.levels) {
        const fock::FockConfig probe{l, l, oc.convergence_tol, oc.dimension_cap};
        probe.validate();
    }
    struct Case {
        std::string name;
        fock::GeneratorVariant variant;
    };
    std::vector<Case> cases;
    fock::OracleModel om;
    CurrentsReport reference;
    if (const auto* g = std::get_if<GaussianModel>(&model)) {
        om = fock::OracleModel::from(*g);
        cases.push_back({"gaussian_noise", fock::GaussianNoise{g->eta}});
        reference = all_currents(*g);
    } else {
        const auto& p = std::get<PoissonModel>(model);
        if (p.mode != SolveMode::full)
            throw ConfigError("oracle: the poisson comparison needs poisson.mode = 'full'");
        const PoissonEvaluation ev = evaluate(p);
        om = fock::OracleModel::from(p);
        cases.push_back({"poisson_dressed", fock::PoissonDressed{ev.kick.eta, ev.kick.epsilon}});
        cases.push_back({"poisson_kick", fock::PoissonKick{p.noise.lambda_rate, p.noise.impulses}});
        reference = ev.steady.currents;
    }
    const auto reports = parallel_map<fock::TruncationReport>(cases.size(), c.jobs, [&](std::size_t i) {
        return fock::truncation_sweep(oc.levels, cases[i].variant, om, oc.convergence_tol, oc.dimension_cap,
                                      oc.edge_threshold);
    });
    Table trunc{"oracle_truncation",
                {"variant", "levels", "j_hot", "j_cold", "j_noise", "relative_change", "edge_population",
                 "edge_warning"},
                {}};
    Table cmp{"oracle_comparison",
              {"variant", "levels", "model_j_cold", "oracle_j_cold", "relative_mismatch", "converged",
               "achieved_tol"},
              {}};
    bool all_converged = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& rep = reports[i];
        for (const auto& r : rep.rows) {
            trunc.add({cases[i].name, static_cast<long>(r.levels_a), r.currents.j_hot, r.currents.j_cold,
                       r.currents.j_noise, r.relative_change, r.edge_population, r.edge_warning});
            if (r.edge_warning)
                out.lines.push_back("warning: " + cases[i].name + " at " + std::to_string(r.levels_a) +
                                    " levels has edge population " + detail::sci(r.edge_population));
        }
        const auto& last = rep.rows.back();
        const double scale = std::max(std::abs(reference.j_cold), std::numeric_limits<double>::min());
        const double mismatch = std::abs(last.currents.j_cold - reference.j_cold) / scale;
        worst = std::max(worst, mismatch);
        all_converged = all_converged && rep.converged;
        cmp.add({cases[i].name, static_cast<long>(last.levels_a), reference.j_cold, last.currents.j_cold, mismatch,
                 rep.converged, rep.achieved_tol});
        out.lines.push_back(cases[i].name + ": J_c model = " + detail::sci(reference.j_cold) + ", oracle = " +
                            detail::sci(last.currents.j_cold) + " at " + std::to_string(last.levels_a) +
                            " levels/mode, relative current mismatch = " + detail::sci(mismatch) + " (tolerance " +
                            detail::sci(oc.convergence_tol) + ")" +
                            (mismatch <= oc.convergence_tol ? " ok" : " EXCEEDED"));
    }
    out.tables.push_back(trunc);
    out.tables.push_back(cmp);
    out.results = {{"worst_relative_mismatch", worst}, {"converged", all_converged}, {"comparison", cmp.to_json()}};
    if (!all_converged) {
        out.exit_code = 4;
        double achieved = 0.0;
        for (const auto& r : reports)
            achieved = std::max(achieved, r.achieved_tol);
        out.failure = "truncation sweep did not converge within the ladder (achieved relative tolerance " +
                      detail::sci(achieved) + ", requested " + detail::sci(oc.convergence_tol) + ")";
    }
    return out;
}

// ---------------------------------------------------------------------------

inline json report_json(const RunConfig& c, const RunOutput& o, double seconds) {
    json r;
    r["command"] = o.command;
    r["version"] = kVersion;
    r["config"] = to_json(c);
    r["results"] = o.results;
    r["law_audit"] = {{"audited", o.audited}, {"failures", o.audit_failures}, {"messages", o.audit_messages}};
    if (c.format == OutputFormat::structured) {
        json tables = json::object();
        for (const auto& t : o.tables)
            tables[t.name] = t.to_json();
        r["tables"] = tables;
    } else {
        json files = json::array();
        for (const auto& t : o.tables)
            files.push_back(t.name + ".csv");
        r["files"] = files;
    }
    r["exit_code"] = o.exit_code;
    if (!o.failure.empty())
        r["failure"] = o.failure;
    // Excluded from reproducibility comparisons.
    r["metadata"] = {{"elapsed_seconds", seconds}};
    return r;
}

// Writes the tables (CSV format only) and run_report.json into c.out_dir.
inline void write_outputs(const RunConfig& c, const RunOutput& o, double seconds) {
    const std::filesystem::path dir(c.out_dir);
    if (c.format == OutputFormat::csv)
        for (const auto& t : o.tables)
            write_text(dir / (t.name + ".csv"), t.to_csv());
    write_text(dir / "run_report.json", report_json(c, o, seconds).dump(2) + "\n");
}

inline RunOutput run_command(const std::string& name, const RunConfig& c) {
    if (name == "steady")
        return cmd_steady(c);
    if (name == "sweep")
        return cmd_sweep(c);
    if (name == "fig2")
        return cmd_fig2(c);
    if (name == "scaling")
        return cmd_scaling(c);
    if (name == "oracle")
        return cmd_oracle(c);
    throw ConfigError("unknown command '" + name + "'");
}

} // namespace qfridge::cli
