/*
 * Copyright (C) 2026 The hardylab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "hardylab/errors.hpp"
#include "hardylab/functionals.hpp"
#include "hardylab/logweights.hpp"
#include "hardylab/transforms.hpp"

namespace hardylab {
namespace {

constexpr double kE = std::numbers::e;

std::vector<double> log_radii(double lo, double hi, int points) {
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) {
        g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * (i + 0.5) / points);
    }
    return g;
}

struct Case {
    int n;
    double p;
    int k;
    double mult;
};

const std::vector<Case> kCases = {{3, 2.0, 0, 1.0},       {3, 2.0, 3, 54.6}, {5, 3.0, 2, 54.6},
                                  {3, 1.5, 1, 403.4},     {2, 1.5, 2, 403.4}, {3, 6.0, 1, 54.6},
                                  {2, 4.0, 2, 54.6},      {4, 2.5, 4, 54.6}};

TEST(GroundState, ClosedFormValues) {
    EXPECT_NEAR(eval_f(GroundState(HardyConfig{3, 2.0, 0, 2.0, 2.0}), 2.0), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(eval_f(GroundState(HardyConfig{3, 2.0, 1, 1.0, kE}), 1.0), std::sqrt(2.0), 1e-15);
    EXPECT_LT(eval_f(GroundState(HardyConfig{3, 6.0, 0, 1.0, 10.0}), 0.5), 0.0);
    EXPECT_THROW(eval_f(GroundState(HardyConfig{3, 2.0, 0, 1.0, 1.0}), 0.0), DomainError);
}

TEST(GroundState, CoefficientA) {
    const GroundState plain(HardyConfig{3, 2.0, 0, 1.0, 5.0});
    EXPECT_DOUBLE_EQ(eval_A(plain, 0.3), -0.5);
    const GroundState one(HardyConfig{3, 2.0, 1, 1.0, 5.0});
    EXPECT_NEAR(eval_A(one, 1.0 / kE), -0.5 - 0.25, 1e-15);
    const GroundState shifted(HardyConfig{3, 1.5, 1, 1.0, std::exp(3.0)}, 1.5);
    EXPECT_NEAR(eval_A(shifted, 1.0 / kE), -1.0 - 0.5 / 1.5 - 1.5 * 0.25 / 0.25, 1e-14);
    EXPECT_THROW(eval_A(plain, 1.5), DomainError);
    EXPECT_EQ(GroundState::default_a(1.5), 1.5);
    EXPECT_EQ(GroundState::default_a(3.0), 0.0);
    // 1 - p X_1(R/D) >= 2 - p fails for D too close to R.
    EXPECT_THROW(GroundState(HardyConfig{3, 1.5, 1, 1.0, 2.0}), PreconditionError);
}

TEST(GroundState, LogDerivativeIsAOverR) {
    for (const Case& c : kCases) {
        const HardyConfig cfg = HardyConfig::with_multiplier(c.n, c.p, c.k, c.mult);
        const GroundState gs(cfg);
        for (double r : log_radii(1e-8, cfg.R * 0.999, 100)) {
            const double h = 1e-6 * r;
            const double fd = (eval_f(gs, r + h) - eval_f(gs, r - h)) / (2.0 * h);
            const double expect = eval_f(gs, r) * eval_A(gs, r / cfg.D) / r;
            EXPECT_NEAR(fd / expect, 1.0, 1e-6) << cfg.describe() << " r=" << r;
            EXPECT_NEAR(eval_f_derivative(gs, r) / expect, 1.0, 1e-13);
        }
    }
}

TEST(GroundState, Split) {
    const HardyConfig cfg{3, 2.0, 0, 1.0, 5.0};
    const GroundState gs(cfg);
    const RadialProfile u = polynomial_bump(1.0, 1.0, 1.0);
    const RadialProfile v = ground_state_split(u, gs);
    for (double r : log_radii(1e-6, 0.99, 50)) {
        EXPECT_NEAR(v.value(r), (1.0 - r) * std::sqrt(r), 1e-14);
        EXPECT_NEAR(eval_f(gs, r) * v.value(r), u.value(r), 1e-12 * std::max(1.0, u.value(r)));
        const double fd = (v.value(r + 1e-7 * r) - v.value(r - 1e-7 * r)) / (2e-7 * r);
        EXPECT_NEAR(fd, v.derivative(r), 1e-6 * std::max(1.0, std::abs(fd)));
    }
    // u = c f splits to the constant c.
    const HardyConfig sup{3, 6.0, 1, 1.0, 50.0};
    const GroundState g2(sup);
    const RadialProfile f = quasi_extremal(sup, 1e-3);
    const RadialProfile w = ground_state_split(f.scaled(2.5), g2);
    EXPECT_NEAR(w.value(0.1), 2.5, 1e-13);
}

TEST(Residual, VanishesForPEqualsTwo) {
    for (int n : {3, 4, 5}) {
        for (int k = 0; k <= 4; ++k) {
            const HardyConfig cfg = HardyConfig::with_multiplier(n, 2.0, k, std::exp(4.0));
            const GroundState gs(cfg);
            for (double r : log_radii(1e-12, cfg.R, 200)) {
                EXPECT_NEAR(supersolution_residual(gs, r), 0.0, 1e-10) << cfg.describe() << " r=" << r;
            }
        }
    }
}

// -Delta_p f from differentiating the radial flux r^{n-1} |f'|^{p-2} f' numerically.
double residual_by_differences(const GroundState& gs, double r) {
    const HardyConfig& c = gs.config();
    auto flux = [&](double s) {
        const double d = eval_f_derivative(gs, s);
        return std::pow(s, c.n - 1) * std::pow(std::abs(d), c.p - 2.0) * d;
    };
    const double h = 1e-4 * r;
    const double lap = -(flux(r + h) - flux(r - h)) / (2.0 * h) / std::pow(r, c.n - 1);
    const double f = eval_f(gs, r);
    const WeightStack w = WeightStack::at(r / c.D, c.k);
    const double hh = std::abs(c.h());
    const double V = std::pow(hh, c.p) + (c.p - 1.0) / (2.0 * c.p) * std::pow(hh, c.p - 2.0) * w.sum_y2(c.k);
    const double scale = std::pow(std::abs(f), c.p - 1.0) / std::pow(r, c.p);
    return (lap - V * std::pow(std::abs(f), c.p - 2.0) * f / std::pow(r, c.p)) / scale;
}

TEST(Residual, MatchesFiniteDifferenceLaplacian) {
    for (const Case& c : kCases) {
        const HardyConfig cfg = HardyConfig::with_multiplier(c.n, c.p, c.k, c.mult);
        const GroundState gs(cfg);
        for (double r : log_radii(1e-6, 0.9 * cfg.R, 30)) {
            EXPECT_NEAR(supersolution_residual(gs, r), residual_by_differences(gs, r), 2e-6)
                << cfg.describe() << " r=" << r;
        }
    }
}

TEST(Residual, SupersolutionSign) {
    const HardyConfig a = HardyConfig::with_multiplier(5, 3.0, 2, std::exp(4.0));
    const HardyConfig b = HardyConfig::with_multiplier(3, 1.5, 1, std::exp(6.0));
    const HardyConfig c = HardyConfig::with_multiplier(3, 6.0, 2, std::exp(4.0));
    const HardyConfig d = HardyConfig::with_multiplier(2, 4.0, 1, std::exp(4.0));
    for (const HardyConfig& cfg : {a, b, c, d}) {
        const GroundState gs(cfg);
        for (double r : log_radii(1e-12, cfg.R, 200)) {
            EXPECT_GE(supersolution_residual(gs, r), 0.0) << cfg.describe() << " r=" << r;
        }
    }
    EXPECT_THROW(supersolution_residual(GroundState(a), 0.0), DomainError);
    EXPECT_THROW(supersolution_residual(GroundState(a), a.R), DomainError);
}

TEST(EmdenFowler, ClosedFormAndRoundTrip) {
    const EmdenFowlerMap flat(HardyConfig{3, 2.0, 0, 1.0, 1.0});
    EXPECT_DOUBLE_EQ(flat.tau0(), 1.0);
    EXPECT_NEAR(flat.forward(0.25), 1.0 - std::log(0.25), 1e-15);
    EXPECT_NEAR(flat.inverse(3.0), std::exp(-2.0), 1e-16);
    for (int k = 0; k <= 3; ++k) {
        const HardyConfig cfg{3, 2.0, k, 1.0, std::exp(4.0)};
        const EmdenFowlerMap map(cfg);
        EXPECT_DOUBLE_EQ(map.forward(1.0), map.tau0());
        double prev = 0.0;
        for (double r : log_radii(1e-10, 1.0, 100)) {
            const double tau = map.forward(r);
            if (r > 1e-10 * 1.5) {
                EXPECT_LT(tau, prev);
            }
            prev = tau;
            EXPECT_NEAR(map.inverse(tau), r, 1e-10 * r);
            const double fd = (map.forward(r * (1 + 1e-6)) - map.forward(r * (1 - 1e-6))) / (2e-6 * r);
            EXPECT_NEAR(fd / map.dtau_dr(r), 1.0, 1e-6);
        }
    }
    EXPECT_THROW(flat.inverse(0.5), DomainError);
}

TEST(EmdenFowler, QuotientInvariance) {
    const HardyConfig cfg{3, 2.0, 0, 1.0, kE};
    const RadialProfile v = polynomial_bump(1.0, 1.0, 1.0);
    const QuotientPair q = quotient_pair(v, cfg);
    EXPECT_NEAR(q.q_r, 15.3704149671546938913094685522, 1e-9);
    EXPECT_LE(std::abs(q.q_r - q.q_tau), 1e-6 * q.q_r);
    EXPECT_NEAR(q.q_r, q.numerator / q.denominator, 1e-15 * q.q_r);
    const QuotientPair s = quotient_pair(v.scaled(7.0), cfg);
    EXPECT_NEAR(s.q_r, q.q_r, 1e-12 * q.q_r);
    EXPECT_NEAR(s.q_tau, q.q_tau, 1e-12 * q.q_tau);
    EXPECT_THROW(quotient_pair(v.scaled(0.0), cfg), PreconditionError);
    EXPECT_THROW(quotient_pair(v, HardyConfig{3, 6.0, 0, 1.0, 10.0}), RegimeError);
}

TEST(EmdenFowler, TauSpaceMatchesRadius) {
    // Widths keep the inner radius a normal double at each depth.
    const double widths[] = {6.0, 1.0, 0.5};
    for (const Case& c : kCases) {
        if (c.k > 2) {
            continue;
        }
        const HardyConfig cfg = HardyConfig::with_multiplier(c.n, c.p, c.k, c.mult);
        const double tau0 = EmdenFowlerMap(cfg).tau0();
        const TauProfile w = sine_bump_in_tau(cfg, tau0 + widths[c.k]);
        const RadialProfile u = tau_profile_to_radial(cfg, w);
        const FunctionalReport r = eval_Ik(u, cfg);
        const QuadResult t = ik_in_tau(cfg, w);
        EXPECT_NEAR(t.value, r.value, t.err_est + r.err_est + 1e-9 * r.value) << cfg.describe();
        if (cfg.p >= 2.0) {
            EXPECT_NEAR(t.value / r.value, 1.0, 1e-9) << cfg.describe();
        }
        if (cfg.p < cfg.n) {
            const double ps = cfg.critical_exponent();
            const double direct = std::pow(rhs_sobolev(u, cfg, 0.5).value, ps / cfg.p);
            EXPECT_NEAR(sobolev_in_tau(cfg, w, 0.5).value / direct, 1.0, 1e-8) << cfg.describe();
        } else {
            EXPECT_NEAR(onepoint_in_tau(cfg, w, 1.0) / onepoint_sup(u, cfg), 1.0, 1e-6) << cfg.describe();
        }
    }
}

TEST(VectorInequalities, CalibratedConstants) {
    EXPECT_NEAR(calibrate_vector_constant(2.0, false), 1.0, 1e-6);
    EXPECT_NEAR(calibrate_vector_constant(2.0, true), 1.0, 1e-6);
    // a = (1, 0), b = (-1, 0) at p = 4: 0 >= 1 + c - 4 pins c <= 3.
    EXPECT_LE(calibrate_vector_constant(4.0, false), 3.0);
    for (double p : {3.0, 4.0}) {
        const double c = calibrate_vector_constant(p, false);
        EXPECT_GT(c, 0.0);
        EXPECT_GE(vector_inequality_check(p, false, c, 20000, 11), -1e-12);
        EXPECT_LT(vector_inequality_check(p, false, 1.05 * c + 0.01, 200000, 12), 0.0);
    }
}

TEST(VectorInequalities, Report) {
    const VectorInequalityReport r = vector_inequality_margin(1.5, 100000, 3);
    EXPECT_EQ(r.l_violations, 0u);
    EXPECT_NEAR(r.l_constant, 3.0 * 1.5 * 0.5 / 16.0, 1e-15);
    EXPECT_GE(r.l_margin_min, 0.0);
    const VectorInequalityReport two = vector_inequality_margin(2.0, 10000, 3);
    EXPECT_NEAR(two.c_first, 1.0, 1e-6);
    EXPECT_THROW(vector_inequality_margin(0.5, 10, 1), PreconditionError);
    EXPECT_THROW(vector_inequality_margin(2.0, 0, 1), PreconditionError);
}

} // namespace
} // namespace hardylab
