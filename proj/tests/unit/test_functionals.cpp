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

#include <gtest/gtest.h>

#include "hardylab/config.hpp"
#include "hardylab/errors.hpp"
#include "hardylab/functionals.hpp"
#include "hardylab/logweights.hpp"
#include "hardylab/profiles.hpp"

namespace hardylab {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

RadialProfile linear_profile(double R = 1.0) {
    return polynomial_bump(R, 1.0, 1.0);
}

RadialProfile identity_profile() {
    RadialProfile::Definition s;
    s.R = 1.0;
    s.value = [](double r) { return r; };
    s.derivative = [](double) { return 1.0; };
    s.vanishes_at_origin = true;
    return RadialProfile(s);
}

TEST(Config, Validation) {
    EXPECT_NO_THROW((HardyConfig{3, 2.0, 0, 1.0, 1.0}.validate()));
    EXPECT_THROW((HardyConfig{3, 3.0, 0, 1.0, 5.0}.validate()), RegimeError);
    EXPECT_THROW((HardyConfig{3, 2.0, 0, 1.0, 0.5}.validate()), PreconditionError);
    EXPECT_THROW((HardyConfig{1, 2.0, 0, 1.0, 1.0}.validate()), PreconditionError);
    EXPECT_THROW((HardyConfig{3, 1.0, 0, 1.0, 1.0}.validate()), PreconditionError);
    EXPECT_THROW((HardyConfig{3, 2.0, -1, 1.0, 1.0}.validate()), DepthError);
    EXPECT_THROW((HardyConfig{3, 6.0, 0, 1.0, 5.0}.critical_exponent()), RegimeError);
    EXPECT_DOUBLE_EQ((HardyConfig{3, 2.0, 0, 1.0, 1.0}.critical_exponent()), 6.0);
    const HardyConfig sup = HardyConfig::with_multiplier(3, 6.0, 1, 2.0);
    EXPECT_DOUBLE_EQ(sup.D, 4.0);  // the diameter of the unit ball is 2
    EXPECT_NEAR(kDefaultMultiplier, std::exp(4.0), 1e-14);
}

TEST(Functionals, ClassicalHardyOnLinearProfile) {
    const FunctionalReport r = eval_Ik(linear_profile(), HardyConfig{3, 2.0, 0, 1.0, 1.0});
    EXPECT_NEAR(r.dirichlet, 4.0 * kPi / 3.0, 1e-12);
    EXPECT_NEAR(r.hardy, 4.0 * kPi / 3.0, 1e-10);
    EXPECT_NEAR(r.value, kPi, 1e-10);
    EXPECT_LE(std::abs(r.value - kPi), r.err_est);
}

TEST(Functionals, BetaFunctionValues) {
    const FunctionalReport r = eval_Ik(linear_profile(), HardyConfig{5, 3.0, 0, 1.0, 1.0});
    EXPECT_NEAR(r.dirichlet, 5.26378901391432459671172853327, 1e-11);
    EXPECT_NEAR(r.hardy, 1.31594725347858114917793213332, 1e-11);
    EXPECT_NEAR(r.value, 4.87387871658733758954789679006, 1e-11);
}

TEST(Functionals, AssemblyIdentity) {
    const HardyConfig c2{4, 2.5, 2, 1.0, 30.0};
    const FunctionalReport r = eval_Ik(polynomial_bump(1.0, 2.0, 2.0), c2);
    ASSERT_EQ(r.remainder.size(), 2u);
    const double coef = c2.remainder_coefficient();
    EXPECT_EQ(r.value, r.value_at_depth(1) - coef * r.remainder[1]);
    HardyConfig c1 = c2;
    c1.k = 1;
    const FunctionalReport r1 = eval_Ik(polynomial_bump(1.0, 2.0, 2.0), c1);
    EXPECT_NEAR(r1.value, r.value_at_depth(1), 1e-13 * std::abs(r1.dirichlet));
    EXPECT_NEAR(coef, 1.5 / 5.0 * std::pow(1.5 / 2.5, 0.5), 1e-15);
    EXPECT_THROW(r.value_at_depth(3), DepthError);
}

TEST(Functionals, Homogeneity) {
    const HardyConfig c{3, 1.5, 2, 1.0, 50.0};
    const RadialProfile u = polynomial_bump(1.0, 2.5, 1.5);
    const double base = eval_Ik(u, c).value;
    const double scaled = eval_Ik(u.scaled(-2.0), c).value;
    EXPECT_NEAR(scaled, std::pow(2.0, 1.5) * base, 1e-12 * std::abs(scaled));
}

TEST(Functionals, SeparableReducesToRadial) {
    const HardyConfig c{3, 2.5, 1, 1.0, 20.0};
    const RadialProfile u = polynomial_bump(1.0, 2.0, 2.0);
    const FunctionalReport a = eval_Ik(u, c);
    const FunctionalReport b = eval_Ik(SeparableProfile{u, 3, 0}, c);
    EXPECT_NEAR(a.value, b.value, 1e-10 * a.dirichlet);
}

TEST(Functionals, SeparableClosedForm) {
    // phi = r (1 - r), l = 1, n = 3, p = 2: I_0 = 23 pi / 30.
    const RadialProfile phi = polynomial_bump(1.0, 1.0, 1.0).times(identity_profile());
    const FunctionalReport r = eval_Ik(SeparableProfile{phi, 3, 1}, HardyConfig{3, 2.0, 0, 1.0, 1.0});
    EXPECT_NEAR(r.dirichlet, 4.0 * kPi / 5.0, 1e-10);
    EXPECT_NEAR(r.value, 23.0 * kPi / 30.0, 1e-10);
    EXPECT_THROW(eval_Ik(SeparableProfile{linear_profile(), 3, 1}, HardyConfig{3, 2.0, 0, 1.0, 1.0}),
                 PreconditionError);
}

TEST(Functionals, AdmissibilityChecks) {
    EXPECT_THROW(eval_Ik(linear_profile(), HardyConfig{3, 6.0, 0, 1.0, 10.0}), PreconditionError);
    EXPECT_THROW(eval_Ik(linear_profile(2.0), HardyConfig{3, 2.0, 0, 1.0, 10.0}), PreconditionError);
}

TEST(Functionals, SobolevRightHandSide) {
    const HardyConfig c{3, 2.0, 0, 1.0, kE};
    const QuadResult r = rhs_sobolev(linear_profile(), c, 1.0);
    EXPECT_NEAR(r.value, 0.0798696778221422075447818707386, 1e-12);
    EXPECT_NEAR(rhs_sobolev(linear_profile().scaled(3.0), c, 1.0).value, 9.0 * r.value, 1e-12);
    EXPECT_DOUBLE_EQ(rhs_sobolev(linear_profile().scaled(0.0), c, 1.0).value, 0.0);
    EXPECT_THROW(rhs_sobolev(identity_profile(), HardyConfig{3, 6.0, 0, 1.0, 10.0}, 1.0), RegimeError);
    // A smaller exponent on X_{k+1} makes the weight larger.
    EXPECT_GT(rhs_sobolev(linear_profile(), HardyConfig{3, 2.0, 1, 1.0, kE}, 0.5).value,
              rhs_sobolev(linear_profile(), HardyConfig{3, 2.0, 1, 1.0, kE}, 1.0).value);
}

TEST(Functionals, HoelderSeminorm) {
    const HardyConfig c{3, 6.0, 0, 1.0, 2.0 * std::exp(4.0)};
    const RadialProfile u = polynomial_bump(1.0, 2.0, 2.0).times(origin_damper(1.0, 0.1));
    const double s = rhs_holder(u, c, 1.0);
    EXPECT_NEAR(rhs_holder(u.scaled(-4.0), c, 1.0), 4.0 * s, 1e-12 * s);
    EXPECT_DOUBLE_EQ(rhs_holder(u.scaled(0.0), c, 1.0), 0.0);
    // Brute force over a dense grid of pairs bounds the supremum from below.
    double brute = 0.0;
    const double alpha = 0.5;
    for (int i = 0; i <= 300; ++i) {
        for (int j = 0; j < i; ++j) {
            for (int a = 0; a <= 16; ++a) {
                const double r1 = i / 300.0;
                const double r2 = j / 300.0;
                const double phi = kPi * a / 16.0;
                const double d = std::sqrt(r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * std::cos(phi));
                if (d <= 0.0) {
                    continue;
                }
                const double w = std::pow(eval_X(1, d / c.D), 1.0 / 6.0);
                brute = std::max(brute, std::abs(u.value(r1) - u.value(r2)) / std::pow(d, alpha) * w);
            }
        }
    }
    EXPECT_GE(s, brute * (1.0 - 1e-9));
    EXPECT_LE(s, brute * 1.05);
    EXPECT_THROW(rhs_holder(u, HardyConfig{3, 2.0, 0, 1.0, 10.0}, 1.0), RegimeError);
}

TEST(Functionals, OnePointSupremum) {
    const HardyConfig c{3, 6.0, 0, 1.0, 2.0 * std::exp(4.0)};
    // |u| / r^{1/2} Y_1^{1/6}(r/D) = r^{1/2} X_1^{1/6}(r/D) increases, so the sup sits at r = 1.
    EXPECT_NEAR(onepoint_sup(identity_profile(), c), std::pow(1.0 / (5.0 + std::log(2.0)), 1.0 / 6.0),
                1e-12);
    const RadialProfile u = polynomial_bump(1.0, 1.0, 2.0).times(identity_profile());
    const double s = onepoint_sup(u, c);
    for (int i = 1; i < 100; ++i) {
        const double r = i / 100.0;
        EXPECT_GE(s, u.value(r) / std::sqrt(r) * std::pow(eval_X(1, r / c.D), 1.0 / 6.0));
    }
}

TEST(Functionals, ElementaryLogHardy) {
    const HardyConfig c{3, 2.0, 1, 1.0, kE};
    const Margin m = anilog_check(linear_profile(), c);
    // By parts the left side is 8 pi int_0^1 (1 - r) X_2(r/e) dr.
    EXPECT_NEAR(m.lhs, 5.7784006103562775233405631815, 1e-8);
    EXPECT_NEAR(m.rhs, 20.0 * kPi, 1e-10);
    EXPECT_GT(m.margin, 0.0);
    const Margin s = anilog_check(linear_profile().scaled(2.0), c);
    EXPECT_NEAR(s.margin, 4.0 * m.margin, 1e-9);
    EXPECT_DOUBLE_EQ(anilog_check(linear_profile().scaled(0.0), c).margin, 0.0);
}

TEST(Functionals, TraceInequality) {
    const HardyConfig c{3, 2.0, 1, 1.0, std::exp(4.0)};
    RadialProfile::Definition s;
    s.R = 1.0;
    s.value = [](double) { return 1.0; };
    s.derivative = [](double) { return 0.0; };
    const RadialProfile one(s);
    // A constant makes both sides equal: the trace term carries the whole inequality.
    const Margin m = trace_inequality_check(one, c, 1.0, 1.0, 1.0, 0.5);
    EXPECT_NEAR(m.lhs, 0.275910015493469483821515679302, 1e-12);
    EXPECT_NEAR(m.rhs, 0.275910015493469483821515679302, 1e-8);
    EXPECT_GE(m.margin, -m.err_est);
    EXPECT_THROW(trace_inequality_check(one, c, 0.5, 1.0, 1.0, 0.5), PreconditionError);
    EXPECT_THROW(trace_inequality_check(one, c, 1.0, 3.0, 1.0, 0.5), PreconditionError);
    EXPECT_THROW(trace_inequality_check(one, c, 1.0, 1.0, 0.0, 0.5), PreconditionError);
}

TEST(Functionals, LocalEstimatePair) {
    const RadialProfile u = polynomial_bump(1.0, 1.0, 1.0).times(identity_profile());
    const HardyConfig c{3, 6.0, 1, 1.0, 2.0 * std::exp(4.0)};
    const Margin a = local_estimate_check(u, c, 2.0, 0.5);
    QuadOptions fine;
    fine.order = 32;
    fine.splits = 2;
    const Margin b = local_estimate_check(u, c, 2.0, 0.5, fine);
    EXPECT_GT(a.lhs, 0.0);
    EXPECT_GT(a.rhs, 0.0);
    EXPECT_NEAR(a.lhs / a.rhs, b.lhs / b.rhs, 1e-9);
    HardyConfig far = c;
    far.D *= 100.0;
    EXPECT_LT(eval_Z(1, 0.5 / far.D), eval_Z(1, 0.5 / c.D));
    EXPECT_THROW(local_estimate_check(u, HardyConfig{3, 1.5, 0, 1.0, 10.0}, 1.2, 0.5), RegimeError);
    EXPECT_THROW(local_estimate_check(u, c, 6.0, 0.5), PreconditionError);
}

} // namespace
} // namespace hardylab
