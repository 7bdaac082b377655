// thermo.hpp: bath descriptions, Planck occupations, power-law rates and
// first/second-law audits shared by every refrigerator model.
//
// Units: hbar = k_B = 1, so frequencies, temperatures and energies share one unit.
// Sign convention: a current J_k is positive when energy flows from reservoir k
// into the working medium, so a steady state satisfies J_h + J_c + J_n = 0.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qfridge {

enum class BathLabel { hot, cold };

inline const char* to_string(BathLabel label) { return label == BathLabel::hot ? "hot" : "cold"; }

struct BathSpec {
    double temperature{1.0};
    int dimension_d{1};        // spectral exponent: rate = kappa * omega^d
    double coupling_kappa{0.1};
    BathLabel label{BathLabel::hot};

    void validate() const {
        if (!(temperature > 0.0) || !std::isfinite(temperature))
            throw std::invalid_argument(std::string(to_string(label)) + " bath: temperature must be > 0");
        if (dimension_d < 1 || dimension_d > 3)
            throw std::invalid_argument(std::string(to_string(label)) + " bath: dimension_d must be 1, 2 or 3");
        if (!(coupling_kappa > 0.0) || !std::isfinite(coupling_kappa))
            throw std::invalid_argument(std::string(to_string(label)) + " bath: coupling_kappa must be > 0");
    }
};

struct OscillatorPair {
    double omega_h{2.0};
    double omega_c{1.0};

    void validate() const {
        if (!(omega_h > 0.0) || !(omega_c > 0.0) || !std::isfinite(omega_h) || !std::isfinite(omega_c))
            throw std::invalid_argument("oscillator frequencies must be positive and finite");
    }
    void validate_refrigerator() const {
        validate();
        if (!(omega_h > omega_c))
            throw std::invalid_argument("refrigerator requires omega_h > omega_c");
    }
};

struct CurrentsReport {
    double j_hot{0.0};
    double j_cold{0.0};
    double j_noise{0.0};
    double first_law_residual{0.0};

    static CurrentsReport make(double j_hot, double j_cold, double j_noise) {
        return {j_hot, j_cold, j_noise, j_hot + j_cold + j_noise};
    }

    double scale() const { return std::max({std::abs(j_hot), std::abs(j_cold), std::abs(j_noise)}); }
};

struct EntropyReport {
    double sigma_hot{0.0};
    double sigma_cold{0.0};
    double sigma_total{0.0};
    bool second_law_violated{false};
};

// 1/(e^{omega/T} - 1); exactly 0 at T = 0.
inline double planck_occupation(double omega, double temperature) {
    if (!(omega > 0.0))
        throw std::invalid_argument("planck_occupation: omega must be > 0");
    if (temperature < 0.0)
        throw std::invalid_argument("planck_occupation: temperature must be >= 0");
    if (temperature == 0.0)
        return 0.0;
    return 1.0 / std::expm1(omega / temperature);
}

// Inverse of planck_occupation in T for fixed omega.
inline double temperature_for_occupation(double omega, double occupation) {
    if (!(omega > 0.0) || !(occupation > 0.0))
        throw std::invalid_argument("temperature_for_occupation: omega and occupation must be > 0");
    return omega / std::log1p(1.0 / occupation);
}

inline double bath_rate(double omega, const BathSpec& bath) {
    if (!(omega > 0.0))
        throw std::invalid_argument("bath_rate: omega must be > 0");
    return bath.coupling_kappa * std::pow(omega, bath.dimension_d);
}

inline bool cooling_window(const OscillatorPair& pair, double t_hot, double t_cold) {
    if (!(t_hot > 0.0) || !(t_cold > 0.0))
        throw std::invalid_argument("cooling_window: temperatures must be > 0");
    return pair.omega_h / t_hot > pair.omega_c / t_cold;
}

inline double cop_carnot(double t_hot, double t_cold) {
    if (!(t_hot > t_cold) || !(t_cold > 0.0))
        throw std::invalid_argument("cop_carnot: requires t_hot > t_cold > 0");
    return t_cold / (t_hot - t_cold);
}

// The noise reservoir is a T -> infinity bath and carries no entropy flux.
inline EntropyReport entropy_production(const CurrentsReport& currents, double t_hot, double t_cold,
                                        double tolerance = 1e-12) {
    if (!(t_hot > 0.0) || !(t_cold > 0.0))
        throw std::invalid_argument("entropy_production: temperatures must be > 0");
    EntropyReport r;
    r.sigma_hot = -currents.j_hot / t_hot;
    r.sigma_cold = -currents.j_cold / t_cold;
    r.sigma_total = r.sigma_hot + r.sigma_cold;
    r.second_law_violated = r.sigma_total < -tolerance;
    return r;
}

inline bool check_cop_chain(double cop_machine, double cop_otto, double cop_carnot_value, double tol = 1e-12) {
    for (double v : {cop_machine, cop_otto, cop_carnot_value})
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("check_cop_chain: COP values must be finite and >= 0");
    return cop_machine <= cop_otto + tol && cop_otto <= cop_carnot_value + tol;
}

struct LawTolerances {
    double first_law_relative{1e-10};
    double second_law_absolute{1e-12};
    double cop{1e-12};
};

inline bool first_law_holds(const CurrentsReport& c, double relative = 1e-10) {
    const double scale = std::max(c.scale(), std::numeric_limits<double>::min());
    return std::abs(c.first_law_residual) <= relative * scale;
}

// Summary of the law checks on one steady state.
struct LawAudit {
    bool first_law{true};
    bool second_law{true};
    bool cop_chain{true};   // vacuous when the point does not cool
    double first_law_relative_residual{0.0};
    double sigma_total{0.0};

    bool ok() const { return first_law && second_law && cop_chain; }

    std::string describe() const {
        std::ostringstream os;
        os << "first_law=" << (first_law ? "ok" : "FAIL") << " (rel residual " << first_law_relative_residual
           << "), second_law=" << (second_law ? "ok" : "FAIL") << " (sigma_u " << sigma_total
           << "), cop_chain=" << (cop_chain ? "ok" : "FAIL");
        return os.str();
    }
};

// The COP chain is only checked at cooling points (j_cold > 0).
inline LawAudit audit_laws(const CurrentsReport& c, const EntropyReport& s, double cop_otto_value,
                           double t_hot, double t_cold, const LawTolerances& tol = {}) {
    LawAudit a;
    const double scale = std::max(c.scale(), std::numeric_limits<double>::min());
    a.first_law_relative_residual = std::abs(c.first_law_residual) / scale;
    a.first_law = first_law_holds(c, tol.first_law_relative);
    a.sigma_total = s.sigma_total;
    a.second_law = s.sigma_total >= -tol.second_law_absolute;
    if (c.j_cold > 0.0 && c.j_noise > 0.0 && t_hot > t_cold)
        a.cop_chain = check_cop_chain(c.j_cold / c.j_noise, cop_otto_value, cop_carnot(t_hot, t_cold), tol.cop);
    return a;
}

} // namespace qfridge
