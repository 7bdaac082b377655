// poisson.hpp: refrigerator driven by Poisson white noise: random unitary
// kicks exp(i xi X) arriving at rate lambda.
//
// Averaging the kicks splits the noise into a Hamiltonian shift epsilon X and a
// dephasing -eta [X, [X, .]]:
//
//     epsilon = -lambda/2 <2 xi - sin(2 xi)>,   eta = lambda/4 (1 - <cos(2 xi)>)
//
// The shift mixes the oscillators, so the baths act on the dressed normal modes
//     A1 = a cos(theta) + b sin(theta),   A2 = b cos(theta) - a sin(theta)
// with frequencies Omega_+ >= Omega_-, and the noise operator becomes
//     W = sin(2 theta) Z + cos(2 theta) X     (dressed Z, X).

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qfridge/errors.hpp"
#include "qfridge/gaussian.hpp"
#include "qfridge/moments.hpp"
#include "qfridge/thermo.hpp"

namespace qfridge {

struct Impulse {
    double xi{0.0};
    double weight{1.0};
};

struct PoissonNoiseSpec {
    double lambda_rate{0.0};
    std::vector<Impulse> impulses{Impulse{}};

    static PoissonNoiseSpec delta(double lambda_rate, double xi0) { return {lambda_rate, {Impulse{xi0, 1.0}}}; }

    void validate() const {
        if (!(lambda_rate >= 0.0) || !std::isfinite(lambda_rate))
            throw std::invalid_argument("poisson noise: lambda_rate must be >= 0");
        if (impulses.empty())
            throw std::invalid_argument("poisson noise: impulse distribution is empty");
        double total = 0.0;
        for (const auto& imp : impulses) {
            if (!(imp.weight > 0.0) || !std::isfinite(imp.xi))
                throw std::invalid_argument("poisson noise: impulse weights must be > 0 and xi finite");
            total += imp.weight;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("poisson noise: impulse weights must sum to 1");
    }

    double mean_xi() const {
        double m = 0.0;
        for (const auto& imp : impulses)
            m += imp.weight * imp.xi;
        return m;
    }
};

struct KickMoments {
    double epsilon{0.0};
    double eta{0.0};
};

inline KickMoments kick_moments(const PoissonNoiseSpec& noise) {
    noise.validate();
    double shift = 0.0;
    double dephase = 0.0;
    for (const auto& imp : noise.impulses) {
        const double phase = 2.0 * imp.xi;
        shift += imp.weight * (phase - std::sin(phase));
        dephase += imp.weight * (1.0 - std::cos(phase));
    }
    return {-0.5 * noise.lambda_rate * shift, 0.25 * noise.lambda_rate * dephase};
}

struct DressedFrame {
    double omega_plus{0.0};
    double omega_minus{0.0};
    double theta{0.0};
    double cos2_theta{1.0};   // cos^2(theta)

    double sin2_theta() const { return std::sin(theta) * std::sin(theta); }
    double sin_2theta() const { return std::sin(2.0 * theta); }
    double cos_2theta() const { return std::cos(2.0 * theta); }
    double splitting() const { return omega_plus - omega_minus; }
};

// Normal modes of omega_h a'a + omega_c b'b + epsilon X. Requires omega_h omega_c > epsilon^2.
inline DressedFrame dressed_frame(const OscillatorPair& pair, double epsilon) {
    pair.validate();
    const double product = pair.omega_h * pair.omega_c;
    if (!(product > epsilon * epsilon)) {
        std::ostringstream os;
        os << "dressed frame requires omega_h*omega_c > epsilon^2 (omega_h*omega_c = " << product
           << ", epsilon^2 = " << epsilon * epsilon << "): the lower dressed frequency would be non-positive";
        throw PhysicsError(os.str());
    }
    const double half_detuning = 0.5 * (pair.omega_h - pair.omega_c);
    const double radius = std::hypot(half_detuning, epsilon);
    DressedFrame f;
    f.omega_plus = 0.5 * (pair.omega_h + pair.omega_c) + radius;
    // Omega_+ Omega_- = omega_h omega_c - epsilon^2, avoids the cancellation in mean - radius.
    f.omega_minus = (product - epsilon * epsilon) / f.omega_plus;
    f.theta = 0.5 * std::atan2(2.0 * epsilon, pair.omega_h - pair.omega_c);
    const double c = std::cos(f.theta);
    f.cos2_theta = c * c;
    return f;
}

struct BathDressedRates {
    double gamma1{0.0};   // absorption on A1, zeta_+ N_+
    double gamma2{0.0};   // emission on A1, zeta_+ (N_+ + 1)
    double gamma3{0.0};   // absorption on A2, zeta_- N_-
    double gamma4{0.0};   // emission on A2, zeta_- (N_- + 1)
    double zeta_plus{0.0};
    double zeta_minus{0.0};
    double n_plus{0.0};
    double n_minus{0.0};

    static BathDressedRates make(double zeta_plus, double zeta_minus, double n_plus, double n_minus) {
        return {zeta_plus * n_plus, zeta_plus * (n_plus + 1.0), zeta_minus * n_minus, zeta_minus * (n_minus + 1.0),
                zeta_plus,          zeta_minus,                 n_plus,              n_minus};
    }
};

struct DressedRateSet {
    BathDressedRates hot;
    BathDressedRates cold;
};

// Temperature-independent transport coefficients zeta_{+/-}^k supplied directly.
struct ZetaSet {
    double plus_hot{0.0};
    double minus_hot{0.0};
    double plus_cold{0.0};
    double minus_cold{0.0};

    static ZetaSet uniform(double zeta) { return {zeta, zeta, zeta, zeta}; }
};

inline DressedRateSet dressed_rates_fixed(const DressedFrame& frame, const BathSpec& hot, const BathSpec& cold,
                                          const ZetaSet& zeta) {
    for (double z : {zeta.plus_hot, zeta.minus_hot, zeta.plus_cold, zeta.minus_cold})
        if (!(z > 0.0))
            throw std::invalid_argument("dressed rates: zeta values must be > 0");
    return {BathDressedRates::make(zeta.plus_hot, zeta.minus_hot,
                                   planck_occupation(frame.omega_plus, hot.temperature),
                                   planck_occupation(frame.omega_minus, hot.temperature)),
            BathDressedRates::make(zeta.plus_cold, zeta.minus_cold,
                                   planck_occupation(frame.omega_plus, cold.temperature),
                                   planck_occupation(frame.omega_minus, cold.temperature))};
}

// Spectral mode: zeta_{+/-}^k = kappa_k Omega_{+/-}^{d_k}.
inline DressedRateSet dressed_rates(const DressedFrame& frame, const BathSpec& hot, const BathSpec& cold) {
    return dressed_rates_fixed(frame, hot, cold,
                               {bath_rate(frame.omega_plus, hot), bath_rate(frame.omega_minus, hot),
                                bath_rate(frame.omega_plus, cold), bath_rate(frame.omega_minus, cold)});
}

enum class SolveMode { full, low_temperature };

namespace detail {

// Relaxation of the two dressed modes, summed over both baths.
struct ModeRelaxation {
    double kappa1{0.0}, kappa2{0.0};   // net damping of <A1'A1>, <A2'A2>
    double anchor1{0.0}, anchor2{0.0}; // populations the baths alone would settle at
    double w_plus_hot{0.0}, w_minus_hot{0.0}, w_plus_cold{0.0}, w_minus_cold{0.0};
};

inline ModeRelaxation mode_relaxation(const DressedFrame& frame, const DressedRateSet& r, SolveMode mode) {
    const double c2 = mode == SolveMode::full ? frame.cos2_theta : 1.0;
    const double s2 = mode == SolveMode::full ? frame.sin2_theta() : 0.0;
    ModeRelaxation m;
    m.w_plus_hot = c2 * r.hot.zeta_plus;
    m.w_minus_hot = s2 * r.hot.zeta_minus;
    m.w_plus_cold = s2 * r.cold.zeta_plus;
    m.w_minus_cold = c2 * r.cold.zeta_minus;
    m.kappa1 = m.w_plus_hot + m.w_plus_cold;
    m.kappa2 = m.w_minus_hot + m.w_minus_cold;
    if (!(m.kappa1 > 0.0) || !(m.kappa2 > 0.0))
        throw PhysicsError("dressed modes must both couple to a bath");
    m.anchor1 = (m.w_plus_hot * r.hot.n_plus + m.w_plus_cold * r.cold.n_plus) / m.kappa1;
    m.anchor2 = (m.w_minus_hot * r.hot.n_minus + m.w_minus_cold * r.cold.n_minus) / m.kappa2;
    return m;
}

} // namespace detail

// d/dt (x, y, z, n) in the dressed SU(2) basis.
inline MomentSystem4 moment_generator_full(const DressedFrame& frame, const DressedRateSet& rates,
                                           const KickMoments& kick) {
    const auto m = detail::mode_relaxation(frame, rates, SolveMode::full);
    const double sum = 0.5 * (m.kappa1 + m.kappa2);
    const double diff = 0.5 * (m.kappa1 - m.kappa2);
    const double split = frame.splitting();
    const double sn = frame.sin_2theta();
    const double cs = frame.cos_2theta();
    const double e4 = 4.0 * kick.eta;
    MomentSystem4 s;
    s.relax << -sum, split, 0.0, 0.0,
               -split, -sum, 0.0, 0.0,
               0.0, 0.0, -sum, -diff,
               0.0, 0.0, -diff, -sum;
    // -eta [W, [W, O]] removes the part of O orthogonal to W = sn Z + cs X.
    s.noise << -e4 * sn * sn, 0.0, e4 * cs * sn, 0.0,
               0.0, -e4, 0.0, 0.0,
               e4 * cs * sn, 0.0, -e4 * cs * cs, 0.0,
               0.0, 0.0, 0.0, 0.0;
    s.anchor << 0.0, 0.0, m.anchor1 - m.anchor2, m.anchor1 + m.anchor2;
    return s;
}

// Low-temperature (cos^2 theta -> 1) two-moment system:
//   dN/dt = -(zp_h + zm_c)/2 N - (zp_h - zm_c)/2 Z + zp_h N+^h + zm_c N-^c
//   dZ/dt = -(zp_h + zm_c)/2 Z - (zp_h - zm_c)/2 N + zp_h N+^h - zm_c N-^c - 4 eta Z
inline MomentSystem2 moment_generator_lowT(const DressedFrame& frame, const DressedRateSet& rates,
                                           const KickMoments& kick) {
    const auto m = detail::mode_relaxation(frame, rates, SolveMode::low_temperature);
    const double sum = 0.5 * (m.kappa1 + m.kappa2);
    const double diff = 0.5 * (m.kappa1 - m.kappa2);
    MomentSystem2 s;
    s.relax << -sum, -diff,
               -diff, -sum;
    s.noise(1, 1) = -4.0 * kick.eta;
    s.anchor << m.anchor1 + m.anchor2, m.anchor1 - m.anchor2;
    return s;
}

// The same dynamics on (x, y, p1, p2) with p_i = <A_i'A_i>. Entries are sums of
// positive rates, so the steady solve keeps full relative precision when the two
// modes relax on very different scales.
inline MomentSystem4 population_generator_full(const DressedFrame& frame, const DressedRateSet& rates,
                                               const KickMoments& kick) {
    const auto m = detail::mode_relaxation(frame, rates, SolveMode::full);
    const double sum = 0.5 * (m.kappa1 + m.kappa2);
    const double split = frame.splitting();
    const double sn = frame.sin_2theta();
    const double cs = frame.cos_2theta();
    const double e2 = 2.0 * kick.eta;
    MomentSystem4 s;
    s.relax << -sum, split, 0.0, 0.0,
               -split, -sum, 0.0, 0.0,
               0.0, 0.0, -m.kappa1, 0.0,
               0.0, 0.0, 0.0, -m.kappa2;
    // The noise sees c1 = sn x - cs z, the component of (x, z) orthogonal to W, and y.
    Eigen::Matrix<double, 4, 2> out;
    out << -2.0 * e2 * sn, 0.0,
           0.0, -2.0 * e2,
           e2 * cs, 0.0,
           -e2 * cs, 0.0;
    Eigen::Matrix<double, 2, 4> in;
    in << sn, 0.0, -cs, cs,
          0.0, 1.0, 0.0, 0.0;
    s.set_low_rank_noise(out, in);
    s.anchor << 0.0, 0.0, m.anchor1, m.anchor2;
    return s;
}

inline MomentSystem2 population_generator_lowT(const DressedFrame& frame, const DressedRateSet& rates,
                                               const KickMoments& kick) {
    const auto m = detail::mode_relaxation(frame, rates, SolveMode::low_temperature);
    const double e2 = 2.0 * kick.eta;
    MomentSystem2 s;
    s.relax << -m.kappa1, 0.0,
               0.0, -m.kappa2;
    s.set_low_rank_noise(Eigen::Vector2d(-e2, e2), Eigen::RowVector2d(1.0, -1.0));
    s.anchor << m.anchor1, m.anchor2;
    return s;
}

struct PoissonSteadyState {
    MomentState moments;
    CurrentsReport currents;
};

// Currents J_k = <L_k(H_s)> with H_s = Omega_+ A1'A1 + Omega_- A2'A2, evaluated at the
// stationary moments.
inline PoissonSteadyState steady_currents(const DressedFrame& frame, const DressedRateSet& rates,
                                          const KickMoments& kick, SolveMode mode = SolveMode::full) {
    const auto m = detail::mode_relaxation(frame, rates, mode);
    PoissonSteadyState out;
    double u1 = 0.0, u2 = 0.0;   // p_i minus the bath-only anchor
    if (mode == SolveMode::full) {
        const auto sys = population_generator_full(frame, rates, kick);
        const Eigen::Vector4d dev = kick.eta > 0.0 ? sys.deviation() : Eigen::Vector4d::Zero();
        u1 = dev(2);
        u2 = dev(3);
        out.moments = MomentState{dev(0), dev(1), (m.anchor1 - m.anchor2) + (u1 - u2),
                                  (m.anchor1 + m.anchor2) + (u1 + u2)};
    } else {
        const auto sys = population_generator_lowT(frame, rates, kick);
        const Eigen::Vector2d dev = kick.eta > 0.0 ? sys.deviation() : Eigen::Vector2d::Zero();
        u1 = dev(0);
        u2 = dev(1);
        out.moments = MomentState{0.0, 0.0, (m.anchor1 - m.anchor2) + (u1 - u2),
                                  (m.anchor1 + m.anchor2) + (u1 + u2)};
    }
    const auto& h = rates.hot;
    const auto& c = rates.cold;
    // N_k - anchor written without subtracting nearly equal numbers.
    const double hot_gap1 = m.w_plus_cold * (h.n_plus - c.n_plus) / m.kappa1;
    const double hot_gap2 = m.w_minus_cold * (h.n_minus - c.n_minus) / m.kappa2;
    const double cold_gap1 = m.w_plus_hot * (c.n_plus - h.n_plus) / m.kappa1;
    const double cold_gap2 = m.w_minus_hot * (c.n_minus - h.n_minus) / m.kappa2;
    const double j_hot = frame.omega_plus * m.w_plus_hot * (hot_gap1 - u1) +
                         frame.omega_minus * m.w_minus_hot * (hot_gap2 - u2);
    const double j_cold = frame.omega_plus * m.w_plus_cold * (cold_gap1 - u1) +
                          frame.omega_minus * m.w_minus_cold * (cold_gap2 - u2);
    // The noise only moves z = p1 - p2 (in energy); at the steady state its rate
    // balances the bath part -kappa1 u1 + kappa2 u2.
    const double j_noise = 0.5 * frame.splitting() * (m.kappa1 * u1 - m.kappa2 * u2);
    out.currents = CurrentsReport::make(j_hot, j_cold, j_noise);
    return out;
}

inline double cop_poisson(const DressedFrame& frame) {
    if (!(frame.omega_plus > frame.omega_minus))
        throw std::invalid_argument("cop_poisson: degenerate dressed frequencies");
    return frame.omega_minus / frame.splitting();
}

// Low-temperature closed form
//   J_c ~ Omega_- (N-^c - N+^h) / ((2 eta)^-1 + 1/zeta_+^h + 1/zeta_-^c).
inline double closed_form_jc(const DressedFrame& frame, const DressedRateSet& rates, const KickMoments& kick) {
    if (kick.eta == 0.0)
        return 0.0;
    const double denom = 1.0 / (2.0 * kick.eta) + 1.0 / rates.hot.zeta_plus + 1.0 / rates.cold.zeta_minus;
    return frame.omega_minus * (rates.cold.n_minus - rates.hot.n_plus) / denom;
}

// One complete parameter point.
struct PoissonModel {
    OscillatorPair pair{10.0, 1e-3};
    BathSpec hot{2.0, 1, 0.1, BathLabel::hot};
    BathSpec cold{1e-3, 1, 0.1, BathLabel::cold};
    PoissonNoiseSpec noise = PoissonNoiseSpec::delta(1e-3, std::numbers::pi / 2);
    std::optional<ZetaSet> fixed_zeta;   // empty -> spectral kappa Omega^d
    SolveMode mode{SolveMode::full};

    void validate() const {
        pair.validate();
        hot.validate();
        cold.validate();
        noise.validate();
    }
};

struct PoissonEvaluation {
    KickMoments kick;
    DressedFrame frame;
    DressedRateSet rates;
    PoissonSteadyState steady;
    EntropyReport entropy;
};

// Throws PhysicsError when omega_h omega_c <= epsilon^2.
inline PoissonEvaluation evaluate(const PoissonModel& model) {
    model.validate();
    PoissonEvaluation ev;
    ev.kick = kick_moments(model.noise);
    ev.frame = dressed_frame(model.pair, ev.kick.epsilon);
    ev.rates = model.fixed_zeta ? dressed_rates_fixed(ev.frame, model.hot, model.cold, *model.fixed_zeta)
                                : dressed_rates(ev.frame, model.hot, model.cold);
    ev.steady = steady_currents(ev.frame, ev.rates, ev.kick, model.mode);
    ev.entropy = entropy_production(ev.steady.currents, model.hot.temperature, model.cold.temperature);
    return ev;
}

// Default operating point of the `fig2` impulse scan: T_c = omega_c = lambda = 1e-3,
// T_h = 2, omega_h = 10, zeta = omega_c / 10, delta-distributed impulse xi0.
inline PoissonModel figure2_model(double xi0, SolveMode mode = SolveMode::low_temperature) {
    PoissonModel m;
    const double t_cold = 1e-3;
    m.pair = {10.0, t_cold};
    m.hot = {2.0, 1, 0.1, BathLabel::hot};
    m.cold = {t_cold, 1, 0.1, BathLabel::cold};
    m.noise = PoissonNoiseSpec::delta(m.pair.omega_c, xi0);
    m.fixed_zeta = ZetaSet::uniform(m.pair.omega_c / 10.0);
    m.mode = mode;
    return m;
}

} // namespace qfridge
