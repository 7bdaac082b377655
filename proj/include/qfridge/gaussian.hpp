// gaussian.hpp: refrigerator driven by Gaussian white noise f(t) X with
// <f(t) f(t')> = 2 eta delta(t - t').
//
// The noise acts as -eta [X, [X, .]] and the baths relax a and b towards their
// own Planck occupations. The (n, z) moments close, which makes the cooling
// current an exact algebraic result:
//
//     J_c = omega_c (N_c - N_h) / ((2 eta)^-1 + Gamma_h^-1 + Gamma_c^-1)

#pragma once

#include <cmath>
#include <stdexcept>

#include "qfridge/moments.hpp"
#include "qfridge/thermo.hpp"

namespace qfridge {

struct GaussianModel {
    OscillatorPair pair;
    BathSpec hot{1.0, 1, 0.1, BathLabel::hot};
    BathSpec cold{0.5, 1, 0.1, BathLabel::cold};
    double gamma_h{0.1};
    double gamma_c{0.1};
    double eta{0.0};

    // Rates from the bath spectral densities, Gamma = kappa * omega^d.
    static GaussianModel from_baths(const OscillatorPair& pair, const BathSpec& hot, const BathSpec& cold,
                                    double eta) {
        GaussianModel m;
        m.pair = pair;
        m.hot = hot;
        m.cold = cold;
        m.hot.label = BathLabel::hot;
        m.cold.label = BathLabel::cold;
        m.gamma_h = bath_rate(pair.omega_h, hot);
        m.gamma_c = bath_rate(pair.omega_c, cold);
        m.eta = eta;
        m.validate();
        return m;
    }

    // Rates supplied directly; the bath couplings are set so bath_rate reproduces them.
    static GaussianModel with_rates(const OscillatorPair& pair, double t_hot, double t_cold, double gamma_h,
                                    double gamma_c, double eta) {
        GaussianModel m;
        m.pair = pair;
        m.hot = BathSpec{t_hot, 1, gamma_h / pair.omega_h, BathLabel::hot};
        m.cold = BathSpec{t_cold, 1, gamma_c / pair.omega_c, BathLabel::cold};
        m.gamma_h = gamma_h;
        m.gamma_c = gamma_c;
        m.eta = eta;
        m.validate();
        return m;
    }

    static GaussianModel with_occupations(const OscillatorPair& pair, double n_hot, double n_cold,
                                          double gamma_h, double gamma_c, double eta) {
        return with_rates(pair, temperature_for_occupation(pair.omega_h, n_hot),
                          temperature_for_occupation(pair.omega_c, n_cold), gamma_h, gamma_c, eta);
    }

    void validate() const {
        pair.validate();
        hot.validate();
        cold.validate();
        if (!(gamma_h > 0.0) || !(gamma_c > 0.0))
            throw std::invalid_argument("gaussian model: gamma_h and gamma_c must be > 0");
        if (!(eta >= 0.0) || !std::isfinite(eta))
            throw std::invalid_argument("gaussian model: eta must be >= 0");
    }

    double n_hot() const { return planck_occupation(pair.omega_h, hot.temperature); }
    double n_cold() const { return planck_occupation(pair.omega_c, cold.temperature); }
};

// d/dt (n, z) = A (n, z) + b. Z and N commute with the free Hamiltonian, so
// this block is independent of (x, y).
inline MomentSystem2 moment_generator(const GaussianModel& m) {
    const double sum = 0.5 * (m.gamma_h + m.gamma_c);
    const double diff = 0.5 * (m.gamma_h - m.gamma_c);
    MomentSystem2 s;
    s.relax << -sum, -diff,
               -diff, -sum;
    s.noise(1, 1) = -4.0 * m.eta;
    const double nh = m.n_hot();
    const double nc = m.n_cold();
    s.anchor << nh + nc, nh - nc;
    return s;
}

// Full (x, y, z, n) system: the free Hamiltonian rotates x <-> y at omega_h - omega_c,
// the noise damps the components orthogonal to X.
inline MomentSystem4 moment_generator4(const GaussianModel& m) {
    const double sum = 0.5 * (m.gamma_h + m.gamma_c);
    const double diff = 0.5 * (m.gamma_h - m.gamma_c);
    const double detuning = m.pair.omega_h - m.pair.omega_c;
    MomentSystem4 s;
    s.relax << -sum, detuning, 0.0, 0.0,
               -detuning, -sum, 0.0, 0.0,
               0.0, 0.0, -sum, -diff,
               0.0, 0.0, -diff, -sum;
    s.noise(1, 1) = -4.0 * m.eta;
    s.noise(2, 2) = -4.0 * m.eta;
    const double nh = m.n_hot();
    const double nc = m.n_cold();
    s.anchor << 0.0, 0.0, nh - nc, nh + nc;
    return s;
}

// Same dynamics on the populations (<a'a>, <b'b>). Every entry is a sum of
// positive rates, so the steady solve keeps full relative precision when
// Gamma_c << Gamma_h, where (n, z) would cancel.
inline MomentSystem2 population_generator(const GaussianModel& m) {
    const double e2 = 2.0 * m.eta;
    MomentSystem2 s;
    s.relax << -m.gamma_h, 0.0,
               0.0, -m.gamma_c;
    // The noise only sees z = p_a - p_b.
    s.set_low_rank_noise(Eigen::Vector2d(-e2, e2), Eigen::RowVector2d(1.0, -1.0));
    s.anchor << m.n_hot(), m.n_cold();
    return s;
}

struct GaussianSteadyState {
    MomentState moments;           // x = y = 0
    double population_a{0.0};      // <a'a>
    double population_b{0.0};      // <b'b>
    double shift_a{0.0};           // <a'a> - N_h
    double shift_b{0.0};           // <b'b> - N_c
};

inline GaussianSteadyState steady_state(const GaussianModel& m) {
    const double nh = m.n_hot();
    const double nc = m.n_cold();
    GaussianSteadyState ss;
    if (m.eta > 0.0) {
        const Eigen::Vector2d dev = population_generator(m).deviation();
        ss.shift_a = dev(0);
        ss.shift_b = dev(1);
    }
    ss.population_a = nh + ss.shift_a;
    ss.population_b = nc + ss.shift_b;
    ss.moments.n = ss.population_a + ss.population_b;
    ss.moments.z = ss.population_a - ss.population_b;
    return ss;
}

// Closed form; exactly zero for eta = 0.
inline double cooling_current(const GaussianModel& m) {
    if (m.eta == 0.0)
        return 0.0;
    const double denom = 1.0 / (2.0 * m.eta) + 1.0 / m.gamma_h + 1.0 / m.gamma_c;
    return m.pair.omega_c * (m.n_cold() - m.n_hot()) / denom;
}

// Same current from the stationary moments: omega_c Gamma_c (N_c - <b'b>).
inline double cooling_current_from_moments(const GaussianModel& m) {
    return -m.pair.omega_c * m.gamma_c * steady_state(m).shift_b;
}

inline CurrentsReport all_currents(const GaussianModel& m) {
    const GaussianSteadyState ss = steady_state(m);
    const double j_hot = -m.pair.omega_h * m.gamma_h * ss.shift_a;
    const double j_cold = -m.pair.omega_c * m.gamma_c * ss.shift_b;
    // <L_n(H)> with H = (w_h + w_c)/2 N + (w_h - w_c)/2 Z and L_n(Z) = -4 eta Z. At the
    // steady state -4 eta z balances the bath terms of the z row, which are written
    // in the shifts; this avoids z = N_h - N_c + (shift_a - shift_b) cancelling at large eta.
    const double bath_z_rate = -(m.gamma_h * ss.shift_a - m.gamma_c * ss.shift_b);
    const double j_noise = -0.5 * (m.pair.omega_h - m.pair.omega_c) * bath_z_rate;
    return CurrentsReport::make(j_hot, j_cold, j_noise);
}

inline double cop_otto(const OscillatorPair& pair) {
    if (!(pair.omega_h > pair.omega_c))
        throw std::invalid_argument("cop_otto: requires omega_h > omega_c");
    return pair.omega_c / (pair.omega_h - pair.omega_c);
}

// Noise strength of the infinite-temperature work bath with Gamma_w N_w held fixed.
inline double work_bath_equivalent_eta(double gamma_w, double n_w) {
    if (!(gamma_w > 0.0) || !(n_w >= 0.0))
        throw std::invalid_argument("work_bath_equivalent_eta: gamma_w > 0 and n_w >= 0 required");
    return gamma_w * n_w;
}

} // namespace qfridge
