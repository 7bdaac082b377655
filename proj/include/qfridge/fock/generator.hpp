// generator.hpp: master-equation generator in the state picture,
//
//   d rho/dt = -i[H, rho] + sum_k r_k (L_k rho L_k' - 1/2 {L_k' L_k, rho})
//              + sum_j lambda_j (sum_i w_i U_i rho U_i' - rho)
//
// with every term tagged by the reservoir it belongs to, so energy currents can
// be read off channel by channel.

#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <utility>
#include <vector>

#include "qfridge/fock/operators.hpp"

namespace qfridge::fock {

enum class Channel { system, hot, cold, noise };

inline const char* to_string(Channel ch) {
    switch (ch) {
    case Channel::system: return "system";
    case Channel::hot: return "hot";
    case Channel::cold: return "cold";
    case Channel::noise: return "noise";
    }
    return "?";
}

struct HamiltonianTerm {
    Channel channel;
    SpMat h;
};

struct JumpTerm {
    Channel channel;
    double rate;
    SpMat op;
    SpMat op_dag;
    SpMat number;   // op' op
};

struct KickTerm {
    Channel channel;
    double rate;
    std::vector<double> weights;
    std::vector<SpMat> unitaries;   // state-picture maps rho -> U rho U'
};

// Index set of the density-matrix entries rho_ij with equal total excitation on
// both sides. Every generator built here commutes with the excitation number, so
// the stationary state lives in this sector.
struct Sector {
    int dim{0};
    std::vector<std::pair<int, int>> entries;   // (i, j)
    std::vector<int> lookup;                    // i * dim + j -> position, or -1
    std::vector<int> diagonal;                  // positions of (i, i)

    explicit Sector(const std::vector<int>& excitation) : dim(static_cast<int>(excitation.size())) {
        lookup.assign(static_cast<std::size_t>(dim) * dim, -1);
        for (int j = 0; j < dim; ++j)
            for (int i = 0; i < dim; ++i)
                if (excitation[i] == excitation[j]) {
                    lookup[static_cast<std::size_t>(i) * dim + j] = static_cast<int>(entries.size());
                    if (i == j)
                        diagonal.push_back(static_cast<int>(entries.size()));
                    entries.emplace_back(i, j);
                }
    }

    int size() const { return static_cast<int>(entries.size()); }
    int position(int i, int j) const { return lookup[static_cast<std::size_t>(i) * dim + j]; }

    Eigen::VectorXcd pack(const CMat& rho) const {
        Eigen::VectorXcd v(size());
        for (int k = 0; k < size(); ++k)
            v(k) = rho(entries[k].first, entries[k].second);
        return v;
    }

    CMat unpack(const Eigen::VectorXcd& v) const {
        CMat rho = CMat::Zero(dim, dim);
        for (int k = 0; k < size(); ++k)
            rho(entries[k].first, entries[k].second) = v(k);
        return rho;
    }

    Complex trace(const Eigen::VectorXcd& v) const {
        Complex t = 0.0;
        for (int k : diagonal)
            t += v(k);
        return t;
    }
};

class Generator {
public:
    explicit Generator(std::vector<int> excitation)
        : excitation_(std::move(excitation)), dim_(static_cast<int>(excitation_.size())) {}

    int dim() const { return dim_; }
    const std::vector<int>& excitation() const { return excitation_; }

    void add_hamiltonian(Channel ch, const SpMat& h) { hamiltonians_.push_back({ch, h}); }

    void add_jump(Channel ch, double rate, const SpMat& op) {
        if (rate == 0.0)
            return;
        SpMat dag = adjoint(op);
        SpMat number = dag * op;
        jumps_.push_back({ch, rate, op, std::move(dag), std::move(number)});
    }

    void add_kick(Channel ch, double rate, std::vector<double> weights, std::vector<SpMat> unitaries) {
        if (rate == 0.0)
            return;
        kicks_.push_back({ch, rate, std::move(weights), std::move(unitaries)});
    }

    bool empty() const { return hamiltonians_.empty() && jumps_.empty() && kicks_.empty(); }

    CMat apply(const CMat& rho) const { return apply_filtered(rho, nullptr); }
    CMat apply(const CMat& rho, Channel ch) const { return apply_filtered(rho, &ch); }

    // Smallest dissipative rate; used to size the propagation horizon.
    double slowest_rate() const {
        double r = std::numeric_limits<double>::infinity();
        for (const auto& j : jumps_)
            if (j.rate > 0.0)
                r = std::min(r, j.rate);
        for (const auto& k : kicks_)
            if (k.rate > 0.0)
                r = std::min(r, k.rate);
        return r;
    }

    // Superoperator restricted to the excitation-diagonal sector, column-major
    // vectorisation of the packed entries.
    SpMat sector_matrix(const Sector& sector) const {
        std::vector<Eigen::Triplet<Complex>> triplets;
        const SpMat id = identity();
        const Complex minus_i(0.0, -1.0);
        for (const auto& h : hamiltonians_) {
            add_sandwich(sector, SpMat(minus_i * h.h), id, triplets);
            add_sandwich(sector, id, SpMat(-minus_i * h.h), triplets);
        }
        for (const auto& j : jumps_) {
            add_sandwich(sector, SpMat(j.rate * j.op), j.op_dag, triplets);
            add_sandwich(sector, SpMat(-0.5 * j.rate * j.number), id, triplets);
            add_sandwich(sector, id, SpMat(-0.5 * j.rate * j.number), triplets);
        }
        for (const auto& k : kicks_) {
            double total = 0.0;
            for (std::size_t u = 0; u < k.unitaries.size(); ++u) {
                add_sandwich(sector, SpMat(k.rate * k.weights[u] * k.unitaries[u]), adjoint(k.unitaries[u]),
                             triplets);
                total += k.weights[u];
            }
            add_sandwich(sector, SpMat(-k.rate * total * id), id, triplets);
        }
        SpMat m(sector.size(), sector.size());
        m.setFromTriplets(triplets.begin(), triplets.end());
        m.prune(Complex(0.0));
        return m;
    }

private:
    SpMat identity() const {
        SpMat id(dim_, dim_);
        id.setIdentity();
        return id;
    }

    CMat apply_filtered(const CMat& rho, const Channel* only) const {
        CMat out = CMat::Zero(dim_, dim_);
        const Complex i(0.0, 1.0);
        for (const auto& h : hamiltonians_) {
            if (only && h.channel != *only)
                continue;
            out -= i * (h.h * rho - rho * h.h);
        }
        for (const auto& j : jumps_) {
            if (only && j.channel != *only)
                continue;
            const CMat lr = j.op * rho;
            out += j.rate * (lr * j.op_dag - 0.5 * (j.number * rho + rho * j.number));
        }
        for (const auto& k : kicks_) {
            if (only && k.channel != *only)
                continue;
            double total = 0.0;
            for (std::size_t u = 0; u < k.unitaries.size(); ++u) {
                const CMat ur = k.unitaries[u] * rho;
                out += k.rate * k.weights[u] * (ur * adjoint(k.unitaries[u]));
                total += k.weights[u];
            }
            out -= k.rate * total * rho;
        }
        return out;
    }

    // Adds the action rho -> A rho B on the sector: column (k, l) receives A_ik B_lj at (i, j).
    static void add_sandwich(const Sector& sector, const SpMat& left, const SpMat& right,
                             std::vector<Eigen::Triplet<Complex>>& out) {
        const SpMat right_t = right.transpose();   // column l of right_t is row l of right
        for (int col = 0; col < sector.size(); ++col) {
            const auto [k, l] = sector.entries[col];
            for (SpMat::InnerIterator a(left, k); a; ++a) {
                for (SpMat::InnerIterator b(right_t, l); b; ++b) {
                    const int row = sector.position(static_cast<int>(a.row()), static_cast<int>(b.row()));
                    if (row >= 0)
                        out.emplace_back(row, col, a.value() * b.value());
                }
            }
        }
    }

    std::vector<int> excitation_;
    int dim_;
    std::vector<HamiltonianTerm> hamiltonians_;
    std::vector<JumpTerm> jumps_;
    std::vector<KickTerm> kicks_;
};

} // namespace qfridge::fock
