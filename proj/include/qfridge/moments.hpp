// moments.hpp: expectation values of the two-mode SU(2) set and the affine
// moment equations d/dt s = A s + b that both noise models reduce to.

#pragma once

#include <limits>

#include <Eigen/Dense>

#include "qfridge/errors.hpp"

namespace qfridge {

// <X>, <Y>, <Z>, <N> with X = a'b + ab', Y = i(a'b - ab'), Z = a'a - b'b, N = a'a + b'b
// (in the dressed models a, b are the normal modes A1, A2).
struct MomentState {
    double x{0.0};
    double y{0.0};
    double z{0.0};
    double n{0.0};

    double population_a() const { return 0.5 * (n + z); }
    double population_b() const { return 0.5 * (n - z); }
};

// Affine system split as A = relax + noise with b = -relax * anchor, where
// `anchor` is the stationary point of the noise-free part. Solving for the
// deviation from the anchor keeps small currents free of cancellation.
//
// Moment ordering: Dim == 2 -> (n, z); Dim == 4 -> (x, y, z, n). The population
// forms of the models reuse the type with (p_a, p_b) and (x, y, p_a, p_b).
template <int Dim>
struct MomentSystem {
    static_assert(Dim == 2 || Dim == 4, "moment systems are (n, z) or (x, y, z, n)");
    using Matrix = Eigen::Matrix<double, Dim, Dim>;
    using Vector = Eigen::Matrix<double, Dim, 1>;

    Matrix relax = Matrix::Zero();
    Matrix noise = Matrix::Zero();
    Vector anchor = Vector::Zero();
    // Optional factorisation noise = noise_out * noise_in.
    Eigen::Matrix<double, Dim, Eigen::Dynamic> noise_out;
    Eigen::Matrix<double, Eigen::Dynamic, Dim> noise_in;

    void set_low_rank_noise(const Eigen::Matrix<double, Dim, Eigen::Dynamic>& out,
                            const Eigen::Matrix<double, Eigen::Dynamic, Dim>& in) {
        noise_out = out;
        noise_in = in;
        noise = out * in;
    }

    Matrix matrix() const { return relax + noise; }
    Vector source() const { return -(relax * anchor); }
    Vector rate(const Vector& s) const { return matrix() * s + source(); }

    // Stationary point minus the anchor. With a factorised noise the solve goes
    // through c = noise_in * state:
    //   (I + noise_in relax^-1 noise_out) c = noise_in anchor,   dev = -relax^-1 noise_out c,
    // which resolves deviations many orders of magnitude apart.
    Vector deviation() const {
        if (noise_out.cols() > 0) {
            Eigen::FullPivLU<Matrix> relax_lu(relax);
            // Rates may legitimately span many decades; only exact singularity matters here.
            relax_lu.setThreshold(std::numeric_limits<double>::min());
            if (relax_lu.isInvertible()) {
                const Eigen::MatrixXd z = relax_lu.solve(noise_out);
                const Eigen::MatrixXd cap =
                    Eigen::MatrixXd::Identity(noise_in.rows(), noise_in.rows()) + noise_in * z;
                const Eigen::FullPivLU<Eigen::MatrixXd> cap_lu(cap);
                if (!cap_lu.isInvertible())
                    throw ConvergenceError("moment system matrix is singular");
                const Eigen::VectorXd c = cap_lu.solve(noise_in * anchor);
                return -(z * c);
            }
        }
        const Eigen::FullPivLU<Matrix> lu(matrix());
        if (!lu.isInvertible())
            throw ConvergenceError("moment system matrix is singular");
        return lu.solve(-(noise * anchor));
    }

    Vector steady() const { return anchor + deviation(); }

    static MomentState to_state(const Vector& v) {
        if constexpr (Dim == 2)
            return MomentState{0.0, 0.0, v(1), v(0)};
        else
            return MomentState{v(0), v(1), v(2), v(3)};
    }

    static Vector from_state(const MomentState& m) {
        Vector v;
        if constexpr (Dim == 2)
            v << m.n, m.z;
        else
            v << m.x, m.y, m.z, m.n;
        return v;
    }
};

using MomentSystem2 = MomentSystem<2>;
using MomentSystem4 = MomentSystem<4>;

} // namespace qfridge
