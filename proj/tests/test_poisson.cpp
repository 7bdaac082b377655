#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qfridge/poisson.hpp"

using namespace qfridge;
using std::numbers::pi;

namespace {

PoissonEvaluation fig2(double xi0, SolveMode mode = SolveMode::low_temperature) {
    return evaluate(figure2_model(xi0, mode));
}

} // namespace

TEST(KickMoments, DeltaExamples) {
    auto k = kick_moments(PoissonNoiseSpec::delta(1.0, 0.0));
    EXPECT_EQ(k.epsilon, 0.0);
    EXPECT_EQ(k.eta, 0.0);
    k = kick_moments(PoissonNoiseSpec::delta(1.0, pi / 2));
    EXPECT_NEAR(k.epsilon, -pi / 2, 1e-15);
    EXPECT_NEAR(k.eta, 0.5, 1e-15);
    k = kick_moments(PoissonNoiseSpec::delta(1.0, pi));
    EXPECT_NEAR(k.epsilon, -pi, 1e-14);
    EXPECT_NEAR(k.eta, 0.0, 1e-15);
}

TEST(KickMoments, DistributionIsWeightedAverage) {
    PoissonNoiseSpec spec{2.0, {{0.3, 0.25}, {1.1, 0.75}}};
    const auto k = kick_moments(spec);
    const auto a = kick_moments(PoissonNoiseSpec::delta(2.0, 0.3));
    const auto b = kick_moments(PoissonNoiseSpec::delta(2.0, 1.1));
    EXPECT_NEAR(k.epsilon, 0.25 * a.epsilon + 0.75 * b.epsilon, 1e-14);
    EXPECT_NEAR(k.eta, 0.25 * a.eta + 0.75 * b.eta, 1e-14);
}

TEST(KickMoments, Validation) {
    EXPECT_THROW(kick_moments({-1.0, {{0.5, 1.0}}}), std::invalid_argument);
    EXPECT_THROW(kick_moments({1.0, {}}), std::invalid_argument);
    EXPECT_THROW(kick_moments({1.0, {{0.5, 0.5}, {0.7, 0.4}}}), std::invalid_argument);
    EXPECT_THROW(kick_moments({1.0, {{0.5, 0.0}, {0.7, 1.0}}}), std::invalid_argument);
}

TEST(KickMoments, PeriodicEtaMonotoneEpsilon) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double lambda = u(rng), xi = u(rng);
        const auto a = kick_moments(PoissonNoiseSpec::delta(lambda, xi));
        const auto b = kick_moments(PoissonNoiseSpec::delta(lambda, xi + pi));
        EXPECT_NEAR(a.eta, b.eta, 1e-12);
        EXPECT_LE(a.eta, lambda / 2 + 1e-15);
        EXPECT_GE(a.eta, 0.0);
        if (lambda > 0.0)
            EXPECT_LT(b.epsilon, a.epsilon);
    }
}

TEST(DressedFrame, Examples) {
    auto f = dressed_frame({10.0, 0.001}, 0.0);
    EXPECT_DOUBLE_EQ(f.omega_plus, 10.0);
    EXPECT_NEAR(f.omega_minus, 0.001, 1e-18);
    EXPECT_DOUBLE_EQ(f.cos2_theta, 1.0);
    f = dressed_frame({1.0, 1.0}, 0.5);
    EXPECT_NEAR(f.omega_plus, 1.5, 1e-15);
    EXPECT_NEAR(f.omega_minus, 0.5, 1e-15);
    EXPECT_NEAR(f.cos2_theta, 0.5, 1e-15);
    EXPECT_THROW(dressed_frame({1.0, 0.1}, 0.4), PhysicsError);
    try {
        dressed_frame({1.0, 0.1}, 0.4);
    } catch (const PhysicsError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("0.16"), std::string::npos);
        EXPECT_NE(what.find("0.1"), std::string::npos);
    }
}

TEST(DressedFrame, Identities) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.01, 10.0), v(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const OscillatorPair p{u(rng), u(rng)};
        const double eps = 0.999 * v(rng) * std::sqrt(p.omega_h * p.omega_c);
        const auto f = dressed_frame(p, eps);
        const double scale = p.omega_h + p.omega_c;
        EXPECT_NEAR(f.omega_plus + f.omega_minus, scale, 1e-12 * scale);
        EXPECT_NEAR(f.omega_plus * f.omega_minus, p.omega_h * p.omega_c - eps * eps, 1e-12 * scale * scale);
        EXPECT_GE(f.omega_plus, f.omega_minus);
        EXPECT_GT(f.omega_minus, 0.0);
        if (f.omega_plus > f.omega_minus * (1 + 1e-6))
            EXPECT_NEAR(f.cos2_theta, (p.omega_h - f.omega_minus) / f.splitting(), 1e-9);
        EXPECT_LE(cop_poisson(f), p.omega_c / std::abs(p.omega_h - p.omega_c) * (1 + 1e-9) + 1e-300);
    }
}

TEST(DressedRates, DetailedBalance) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.01, 5.0);
    for (int i = 0; i < 200; ++i) {
        const auto f = dressed_frame({u(rng) + 5.0, u(rng)}, 0.1 * u(rng));
        const BathSpec hot{u(rng), 1 + i % 3, 0.1, BathLabel::hot}, cold{u(rng), 1 + (i / 3) % 3, 0.2, BathLabel::cold};
        const auto r = dressed_rates(f, hot, cold);
        for (const auto& [b, t] : {std::pair{r.hot, hot.temperature}, std::pair{r.cold, cold.temperature}}) {
            EXPECT_DOUBLE_EQ(b.gamma1 / b.zeta_plus, planck_occupation(f.omega_plus, t));
            EXPECT_DOUBLE_EQ(b.gamma3 / b.zeta_minus, planck_occupation(f.omega_minus, t));
            EXPECT_NEAR(b.gamma1, std::exp(-f.omega_plus / t) * b.gamma2, 1e-12 * b.gamma2);
            EXPECT_NEAR(b.gamma3, std::exp(-f.omega_minus / t) * b.gamma4, 1e-12 * b.gamma4);
            EXPECT_NEAR(b.gamma2 - b.gamma1, b.zeta_plus, 1e-12 * b.gamma2);
        }
        EXPECT_NEAR(r.hot.zeta_plus, 0.1 * std::pow(f.omega_plus, hot.dimension_d), 1e-15);
    }
}

TEST(DressedRates, Examples) {
    const auto ev = fig2(pi / 2);
    for (double z : {ev.rates.hot.zeta_plus, ev.rates.hot.zeta_minus, ev.rates.cold.zeta_plus, ev.rates.cold.zeta_minus})
        EXPECT_DOUBLE_EQ(z, 1e-4);
    const auto f0 = dressed_frame({10.0, 0.001}, 0.0);
    const auto r = dressed_rates_fixed(f0, {2.0, 1, 0.1, BathLabel::hot}, {1e-3, 1, 0.1, BathLabel::cold},
                                       ZetaSet::uniform(1e-4));
    EXPECT_NEAR(r.cold.n_minus, 1.0 / (std::numbers::e - 1.0), 1e-12);
    EXPECT_NEAR(r.cold.n_minus, 0.58198, 1e-5);
    const auto r0 = dressed_rates(f0, {1e-3, 1, 0.1, BathLabel::hot}, {1e-4, 1, 0.1, BathLabel::cold});
    EXPECT_EQ(r0.hot.gamma1, 0.0);
    EXPECT_EQ(r0.cold.gamma1, 0.0);
}

TEST(PoissonGenerator, ThetaZeroRecoversGaussianDamping) {
    const auto f = dressed_frame({2.0, 1.0}, 0.0);
    const auto r = dressed_rates_fixed(f, {1.0, 1, 0.1, BathLabel::hot}, {0.5, 1, 0.1, BathLabel::cold},
                                       ZetaSet::uniform(0.3));
    const auto s = moment_generator_full(f, r, {0.0, 0.7});
    // z row: bath relaxation plus -4 eta cos^2(2 theta).
    EXPECT_NEAR(s.noise(2, 2), -4.0 * 0.7, 1e-15);
    EXPECT_NEAR(s.matrix()(2, 2), -0.3 - 4.0 * 0.7, 1e-15);
}

TEST(PoissonGenerator, EquilibriumWithoutNoise) {
    const auto f = dressed_frame({2.0, 1.0}, 0.3);
    const BathSpec hot{0.8, 1, 0.1, BathLabel::hot}, cold{0.8, 2, 0.3, BathLabel::cold};
    const auto r = dressed_rates(f, hot, cold);
    const Eigen::Vector4d s = moment_generator_full(f, r, {0.3, 0.0}).steady();
    const double np = planck_occupation(f.omega_plus, 0.8), nm = planck_occupation(f.omega_minus, 0.8);
    EXPECT_NEAR(s(3), np + nm, 1e-13);
    EXPECT_NEAR(s(2), np - nm, 1e-13);
    const auto c = steady_currents(f, r, {0.3, 0.0}).currents;
    EXPECT_NEAR(c.j_hot, 0.0, 1e-15);
    EXPECT_NEAR(c.j_cold, 0.0, 1e-15);
    EXPECT_NEAR(c.j_noise, 0.0, 1e-15);
}

TEST(PoissonGenerator, UnitaryLimitConservesXY) {
    // Every rate switched off leaves the rotation at the dressed splitting.
    const auto f = dressed_frame({2.0, 1.0}, 0.3);
    Eigen::Matrix4d rotation = Eigen::Matrix4d::Zero();
    rotation(0, 1) = f.splitting();
    rotation(1, 0) = -f.splitting();
    const auto r = dressed_rates_fixed(f, {1.0, 1, 0.1, BathLabel::hot}, {0.5, 1, 0.1, BathLabel::cold},
                                       ZetaSet::uniform(1e-300));
    const Eigen::Matrix4d m = moment_generator_full(f, r, {0.3, 0.0}).matrix();
    EXPECT_LT((m - rotation).norm(), 1e-250);
    const Eigen::Matrix2d rot = m.topLeftCorner<2, 2>();
    EXPECT_NEAR((rot + rot.transpose()).norm(), 0.0, 1e-250);   // d/dt (x^2 + y^2) = 0
}

TEST(PoissonLowT, Examples) {
    const auto f = dressed_frame({10.0, 1e-3}, -1e-4);
    const auto r = dressed_rates_fixed(f, {2.0, 1, 0.1, BathLabel::hot}, {1e-3, 1, 0.1, BathLabel::cold},
                                       ZetaSet::uniform(2e-4));
    const Eigen::Vector2d nz = moment_generator_lowT(f, r, {-1e-4, 3e-4}).steady();
    EXPECT_NEAR(nz(0), r.hot.n_plus + r.cold.n_minus, 1e-14);

    const auto r2 = dressed_rates_fixed(f, {2.0, 1, 0.1, BathLabel::hot}, {1e-3, 1, 0.1, BathLabel::cold},
                                        ZetaSet{3e-4, 1e-4, 1e-4, 1e-4});
    const Eigen::Vector2d eq = moment_generator_lowT(f, r2, {0.0, 0.0}).steady();
    const double zp = 3e-4, zm = 1e-4;
    const double z_expected =
        (zp * r2.hot.n_plus - zm * r2.cold.n_minus - 0.5 * (zp - zm) * eq(0)) / (0.5 * (zp + zm));
    EXPECT_NEAR(eq(1), z_expected, 1e-14);
}

TEST(PoissonCurrents, ReferencePointCools) {
    const auto ev = fig2(pi / 2);
    EXPECT_GT(ev.steady.currents.j_cold, 0.0);
    EXPECT_TRUE(first_law_holds(ev.steady.currents));
}

TEST(PoissonCurrents, NoDriveAtIntegerImpulse) {
    for (double xi : {pi, 2 * pi}) {
        const auto ev = fig2(xi);
        EXPECT_EQ(ev.kick.eta, 0.0);
        EXPECT_EQ(ev.steady.currents.j_cold, 0.0);
    }
}

TEST(PoissonCurrents, PeriodicInImpulse) {
    for (double xi : {0.3, 0.9, 1.4}) {
        const double a = fig2(xi).steady.currents.j_cold;
        const double b = fig2(xi + pi).steady.currents.j_cold;
        // epsilon keeps growing with the impulse, so the period holds only up to
        // the dressing correction of order epsilon^2 / (omega_h omega_c).
        EXPECT_NEAR(a, b, 1e-2 * std::abs(a));
    }
}

// The full solve also lets the hot bath heat the cold normal mode at rate
// sin^2(theta) zeta N_-^h with N_-^h ~ T_h / Omega_- ~ 2000. That gap grows like
// epsilon^2, so the 1e-3 agreement holds for impulses up to about pi/2.
TEST(PoissonCurrents, LowTAgreesWithFull) {
    for (double xi : {0.1, 0.5, 1.0, pi / 2}) {
        const auto full = fig2(xi, SolveMode::full);
        const auto low = fig2(xi, SolveMode::low_temperature);
        ASSERT_LT(1.0 - full.frame.cos2_theta, 1e-5);
        for (auto member : {&CurrentsReport::j_hot, &CurrentsReport::j_cold, &CurrentsReport::j_noise}) {
            const double f = full.steady.currents.*member, l = low.steady.currents.*member;
            EXPECT_NEAR(l, f, 1e-3 * std::abs(f));
        }
    }
}

TEST(PoissonCurrents, ClosedFormWithinFivePercent) {
    const auto ev = fig2(pi / 2);
    const double approx = closed_form_jc(ev.frame, ev.rates, ev.kick);
    EXPECT_NEAR(approx, ev.steady.currents.j_cold, 0.05 * ev.steady.currents.j_cold);
}

TEST(PoissonCurrents, ClosedFormLimits) {
    const auto ev = fig2(pi / 2);
    auto rates = ev.rates;
    rates.hot.n_plus = rates.cold.n_minus;
    EXPECT_EQ(closed_form_jc(ev.frame, rates, ev.kick), 0.0);
    const double limit = ev.frame.omega_minus * (ev.rates.cold.n_minus - ev.rates.hot.n_plus) /
                         (1.0 / ev.rates.hot.zeta_plus + 1.0 / ev.rates.cold.zeta_minus);
    EXPECT_NEAR(closed_form_jc(ev.frame, ev.rates, {ev.kick.epsilon, 1e12}), limit, 1e-9 * limit);
}

TEST(PoissonCurrents, SecondLawOnImpulseGrid) {
    for (auto mode : {SolveMode::low_temperature, SolveMode::full}) {
        int feasible = 0;
        for (int i = 0; i < 200; ++i) {
            const double xi = 3.0 * pi * i / 199.0;
            PoissonEvaluation ev;
            try {
                ev = fig2(xi, mode);
            } catch (const PhysicsError&) {
                continue;
            }
            ++feasible;
            EXPECT_GE(ev.entropy.sigma_total, -1e-12) << "xi0 = " << xi;
            EXPECT_TRUE(first_law_holds(ev.steady.currents)) << "xi0 = " << xi;
        }
        EXPECT_EQ(feasible, 200);
    }
}

TEST(PoissonCop, Values) {
    EXPECT_DOUBLE_EQ(cop_poisson(dressed_frame({2.0, 1.0}, 0.0)), cop_otto({2.0, 1.0}));
    EXPECT_NEAR(cop_poisson(dressed_frame({1.0, 1.0}, 0.5)), 0.5, 1e-15);
    const auto ev = fig2(pi / 2);
    EXPECT_LT(cop_poisson(ev.frame), 1.0001e-4);
    EXPECT_THROW(cop_poisson(dressed_frame({1.0, 1.0}, 0.0)), std::invalid_argument);
}

TEST(PoissonCop, ChainOnRandomDraws) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int cooling = 0;
    for (int i = 0; i < 300; ++i) {
        PoissonModel m;
        m.pair = {1.0 + 9.0 * u(rng), 0.01 + 0.99 * u(rng)};
        m.hot = {0.5 + 2.0 * u(rng), 1, 0.1, BathLabel::hot};
        m.cold = {0.01 + 0.5 * u(rng), 1, 0.1, BathLabel::cold};
        m.noise = PoissonNoiseSpec::delta(0.05 * u(rng), 3.0 * u(rng));
        if (!cooling_window(m.pair, m.hot.temperature, m.cold.temperature))
            continue;
        PoissonEvaluation ev;
        try {
            ev = evaluate(m);
        } catch (const PhysicsError&) {
            continue;
        }
        ++cooling;
        const double cp = cop_poisson(ev.frame), co = cop_otto(m.pair);
        EXPECT_TRUE(check_cop_chain(cp, co, cop_carnot(m.hot.temperature, m.cold.temperature), 1e-12))
            << cp << " " << co;
    }
    EXPECT_GT(cooling, 50);
}
