// operators.hpp: ladder operators and the SU(2) set on a truncated two-mode Fock space

#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qfridge/errors.hpp"

namespace qfridge::fock {

using Complex = std::complex<double>;
using SpMat = Eigen::SparseMatrix<Complex>;
using CMat = Eigen::MatrixXcd;

class DimensionCapError : public ConfigError {
public:
    DimensionCapError(long dimension, long cap)
        : ConfigError("Fock dimension " + std::to_string(dimension) + " exceeds the cap of " + std::to_string(cap)),
          cap_(cap) {}
    long cap() const { return cap_; }

private:
    long cap_;
};

struct FockConfig {
    int levels_a{12};
    int levels_b{12};
    double convergence_tol{1e-6};
    long dimension_cap{4096};

    static FockConfig square(int levels, double tol = 1e-6) { return {levels, levels, tol, 4096}; }

    long dimension() const { return static_cast<long>(levels_a) * levels_b; }

    void validate() const {
        if (levels_a < 2 || levels_b < 2)
            throw ConfigError("Fock truncation needs at least 2 levels per mode");
        if (!(convergence_tol > 0.0))
            throw ConfigError("convergence_tol must be > 0");
        if (dimension() > dimension_cap)
            throw DimensionCapError(dimension(), dimension_cap);
    }
};

// X, Y, Z, N built from a pair of (possibly rotated) mode operators.
struct Su2Set {
    SpMat X, Y, Z, N;
};

inline SpMat adjoint(const SpMat& m) { return SpMat(m.adjoint()); }

inline Su2Set su2_set(const SpMat& m1, const SpMat& m2) {
    const SpMat m1d = adjoint(m1);
    const SpMat m2d = adjoint(m2);
    const SpMat hop12 = m1d * m2;
    const SpMat hop21 = m2d * m1;
    Su2Set s;
    s.X = hop12 + hop21;
    s.Y = Complex(0.0, 1.0) * (hop12 - hop21);
    s.Z = m1d * m1 - m2d * m2;
    s.N = m1d * m1 + m2d * m2;
    return s;
}

// Basis |n_a, n_b> -> index n_a * levels_b + n_b.
struct ModeOperators {
    int levels_a{0};
    int levels_b{0};
    SpMat a, b;
    Su2Set su2;
    std::vector<int> excitation;   // n_a + n_b per basis index

    int dim() const { return levels_a * levels_b; }
    int index(int na, int nb) const { return na * levels_b + nb; }
    int level_a(int i) const { return i / levels_b; }
    int level_b(int i) const { return i % levels_b; }

    // Normal modes A1 = a cos + b sin, A2 = b cos - a sin.
    std::pair<SpMat, SpMat> rotated(double theta) const {
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        SpMat m1 = c * a + s * b;
        SpMat m2 = c * b - s * a;
        m1.prune(Complex(0.0));
        m2.prune(Complex(0.0));
        return {m1, m2};
    }
};

inline ModeOperators build_mode_operators(const FockConfig& config) {
    config.validate();
    ModeOperators ops;
    ops.levels_a = config.levels_a;
    ops.levels_b = config.levels_b;
    const int dim = ops.dim();
    std::vector<Eigen::Triplet<Complex>> ta, tb;
    ops.excitation.resize(dim);
    for (int na = 0; na < ops.levels_a; ++na) {
        for (int nb = 0; nb < ops.levels_b; ++nb) {
            const int i = ops.index(na, nb);
            ops.excitation[i] = na + nb;
            if (na > 0)
                ta.emplace_back(ops.index(na - 1, nb), i, std::sqrt(static_cast<double>(na)));
            if (nb > 0)
                tb.emplace_back(ops.index(na, nb - 1), i, std::sqrt(static_cast<double>(nb)));
        }
    }
    ops.a.resize(dim, dim);
    ops.b.resize(dim, dim);
    ops.a.setFromTriplets(ta.begin(), ta.end());
    ops.b.setFromTriplets(tb.begin(), tb.end());
    ops.su2 = su2_set(ops.a, ops.b);
    return ops;
}

} // namespace qfridge::fock
