// stationary.hpp: stationary density of a generator: null-space solve with
// trace normalisation, and implicit long-time propagation as a fallback.

#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <Eigen/SparseLU>

#include "qfridge/errors.hpp"
#include "qfridge/fock/generator.hpp"

namespace qfridge::fock {

struct StationaryOptions {
    double residual_tol{1e-9};       // ||L rho|| relative to ||L|| ||rho||
    double agreement_tol{1e-7};      // two independent routes must agree to this
    bool allow_propagation{true};
    double horizon_factor{20.0};     // horizon = factor / slowest rate
    int propagation_steps{40};
    int max_propagation_steps{400};
};

struct StationaryDensity {
    CMat rho;
    double residual{0.0};            // relative, see StationaryOptions
    double trace_error{0.0};
    double hermiticity_error{0.0};   // before symmetrisation
    double min_eigenvalue{0.0};
    std::string method;
};

namespace detail {

inline double max_abs(const SpMat& m) {
    double r = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it)
            r = std::max(r, std::abs(it.value()));
    return r;
}

inline double relative_residual(const SpMat& l, const Eigen::VectorXcd& v) {
    const double scale = max_abs(l) * v.cwiseAbs().maxCoeff();
    if (scale == 0.0)
        return 0.0;
    return (l * v).cwiseAbs().maxCoeff() / scale;
}

// Solve L v = 0 with row `replaced` swapped for the trace condition.
inline bool solve_with_trace_row(const SpMat& l, const Sector& sector, int replaced, Eigen::VectorXcd& out) {
    std::vector<Eigen::Triplet<Complex>> t;
    t.reserve(static_cast<std::size_t>(l.nonZeros()) + sector.diagonal.size());
    for (int k = 0; k < l.outerSize(); ++k)
        for (SpMat::InnerIterator it(l, k); it; ++it)
            if (it.row() != replaced)
                t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int d : sector.diagonal)
        t.emplace_back(replaced, d, Complex(1.0));
    SpMat a(l.rows(), l.cols());
    a.setFromTriplets(t.begin(), t.end());
    a.makeCompressed();
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
        return false;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(l.rows());
    rhs(replaced) = 1.0;
    out = lu.solve(rhs);
    return lu.info() == Eigen::Success && out.allFinite();
}

// Implicit Euler, (1 - h L) v_{k+1} = v_k, renormalising the trace each step.
inline bool propagate(const SpMat& l, const Sector& sector, Eigen::VectorXcd v, double horizon,
                      const StationaryOptions& opt, Eigen::VectorXcd& out) {
    const double h = horizon / opt.propagation_steps;
    SpMat id(l.rows(), l.cols());
    id.setIdentity();
    SpMat a = id - h * l;
    a.makeCompressed();
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
        return false;
    for (int step = 0; step < opt.max_propagation_steps; ++step) {
        Eigen::VectorXcd next = lu.solve(v);
        if (!next.allFinite())
            return false;
        next /= sector.trace(next);
        const double change = (next - v).cwiseAbs().maxCoeff();
        v = std::move(next);
        if (step + 1 >= opt.propagation_steps && change <= opt.agreement_tol * 1e-2) {
            out = v;
            return true;
        }
    }
    out = v;
    return true;
}

inline Eigen::VectorXcd maximally_mixed(const Sector& sector) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(sector.size());
    for (int d : sector.diagonal)
        v(d) = 1.0 / static_cast<double>(sector.diagonal.size());
    return v;
}

inline Eigen::VectorXcd vacuum(const Sector& sector) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(sector.size());
    v(sector.position(0, 0)) = 1.0;
    return v;
}

inline double relative_difference(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
}

inline StationaryDensity finish(const Sector& sector, const std::vector<int>& excitation, const SpMat& l,
                                const Eigen::VectorXcd& v, std::string method) {
    StationaryDensity s;
    s.method = std::move(method);
    s.residual = relative_residual(l, v);
    CMat rho = sector.unpack(v);
    s.trace_error = std::abs(rho.trace() - Complex(1.0));
    s.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    rho = 0.5 * (rho + rho.adjoint());
    // Eigenvalues block by block: rho is block diagonal in total excitation.
    std::map<int, std::vector<int>> blocks;
    for (int i = 0; i < static_cast<int>(excitation.size()); ++i)
        blocks[excitation[i]].push_back(i);
    double min_ev = std::numeric_limits<double>::infinity();
    for (const auto& [m, idx] : blocks) {
        const int n = static_cast<int>(idx.size());
        CMat block(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                block(r, c) = rho(idx[r], idx[c]);
        Eigen::SelfAdjointEigenSolver<CMat> es(block, Eigen::EigenvaluesOnly);
        min_ev = std::min(min_ev, es.eigenvalues().minCoeff());
    }
    s.min_eigenvalue = min_ev;
    s.rho = std::move(rho);
    return s;
}

} // namespace detail

// Long-time propagation from the maximally mixed state over horizon_factor / slowest rate.
inline StationaryDensity propagate_to_stationary(const Generator& gen, const StationaryOptions& opt = {}) {
    const Sector sector(gen.excitation());
    const SpMat l = gen.sector_matrix(sector);
    const double slowest = gen.slowest_rate();
    if (!std::isfinite(slowest))
        throw ConvergenceError("generator has no dissipative terms; stationary state is not unique");
    Eigen::VectorXcd v;
    if (!detail::propagate(l, sector, detail::maximally_mixed(sector), opt.horizon_factor / slowest, opt, v))
        throw ConvergenceError("implicit propagation failed");
    return detail::finish(sector, gen.excitation(), l, v, "propagation");
}

// Unique stationary state. Throws ConvergenceError for a degenerate kernel
// (usually a decoupled sector) or when neither route reaches the tolerance.
inline StationaryDensity stationary_density(const Generator& gen, const StationaryOptions& opt = {}) {
    const Sector sector(gen.excitation());
    const SpMat l = gen.sector_matrix(sector);
    if (l.nonZeros() == 0)
        throw ConvergenceError("degenerate kernel: generator is identically zero");

    // Two trace rows placed in different excitation blocks must give the same state.
    const int first = sector.position(0, 0);
    const int last = sector.diagonal.back();
    Eigen::VectorXcd v1, v2;
    const bool ok1 = detail::solve_with_trace_row(l, sector, first, v1);
    const bool ok2 = detail::solve_with_trace_row(l, sector, last, v2);
    if (ok1 && ok2 && detail::relative_difference(v1, v2) <= opt.agreement_tol &&
        detail::relative_residual(l, v1) <= opt.residual_tol)
        return detail::finish(sector, gen.excitation(), l, v1, "nullspace");

    if (!ok1 && !ok2)
        throw ConvergenceError("degenerate kernel: trace-constrained system is singular");
    if (!opt.allow_propagation)
        throw ConvergenceError("null-space solve is ill-conditioned and propagation is disabled");

    const double slowest = gen.slowest_rate();
    if (!std::isfinite(slowest))
        throw ConvergenceError("degenerate kernel: no dissipative terms");
    const double horizon = opt.horizon_factor / slowest;
    Eigen::VectorXcd p1, p2;
    const bool prop1 = detail::propagate(l, sector, detail::maximally_mixed(sector), horizon, opt, p1);
    const bool prop2 = detail::propagate(l, sector, detail::vacuum(sector), horizon, opt, p2);
    if (!prop1 || !prop2)
        throw ConvergenceError("implicit propagation failed");
    if (detail::relative_difference(p1, p2) > opt.agreement_tol)
        throw ConvergenceError("degenerate kernel: different initial states relax to different states");
    if (detail::relative_residual(l, p1) > opt.residual_tol)
        throw ConvergenceError("propagation did not reach a stationary state");
    return detail::finish(sector, gen.excitation(), l, p1, "propagation");
}

} // namespace qfridge::fock
