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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "hardylab/config.hpp"
#include "hardylab/profiles.hpp"
#include "hardylab/quad.hpp"

namespace hardylab {

// f(r) = sgn(n - p) r^{1-n/p} Y_k^{-1/p}(r/D) (1 - a X_1(r/D)) on (0, R].
class GroundState {
public:
    // a defaults to 0 for p >= 2 and to p for p < 2. For p < 2 the constructor
    // checks 1 - a X_1(R/D) >= 2 - p, which then holds on all of (0, R].
    explicit GroundState(const HardyConfig& cfg, std::optional<double> a = std::nullopt);

    const HardyConfig& config() const { return cfg_; }
    double a() const { return a_; }

    static double default_a(double p) { return p < 2.0 ? p : 0.0; }

private:
    HardyConfig cfg_;
    double a_;
};

double eval_f(const GroundState& gs, double r);
double eval_f_derivative(const GroundState& gs, double r);

// A(t) = (p - n)/p - Z_k(t)/p - a X_1(t)^2 / (1 - a X_1(t)); f' = (f / r) A.
double eval_A(const GroundState& gs, double t);

// v = u / f with v' = (u' f - u f') / f^2.
RadialProfile ground_state_split(const RadialProfile& u, const GroundState& gs);

// u = f_{0,k,D} eta with eta the window 1 on [delta, R/2], 0 outside [delta/2, R].
RadialProfile quasi_extremal(const HardyConfig& cfg, double delta);

// Normalized residual of f in the p-Laplace equation with k + 1 singular
// potentials, (-Delta_p f - V |f|^{p-2} f / r^p) / (|f|^{p-1} / r^p) with
// V = |h|^p + (p-1)/(2p) |h|^{p-2} sum Y_i^2. Since -Delta_p f = |A|^{p-2} B
// |f|^{p-2} f / r^p this is sgn(n - p) (|A|^{p-2} B - V), and a supersolution
// has residual >= 0 in both regimes. Evaluated in a form that avoids the
// cancellation between the two leading terms.
double supersolution_residual(const GroundState& gs, double r);

// Emden-Fowler variable tau = 1 / X_{k+1}(r / D); tau0 = tau(R).
class EmdenFowlerMap {
public:
    explicit EmdenFowlerMap(const HardyConfig& cfg);

    double tau0() const { return tau0_; }
    double forward(double r) const;
    // Throws UnderflowError when the radius is not a normal double.
    double inverse(double tau) const;
    // Same, but returns 0 where the radius underflows.
    double inverse_or_zero(double tau) const;
    // d tau / d r = -Y_k(r / D) / r.
    double dtau_dr(double r) const;

private:
    HardyConfig cfg_;
    double tau0_;
};

struct QuotientPair {
    double q_r = 0.0;
    double q_tau = 0.0;
    double err_est = 0.0;      // on q_r
    double numerator = 0.0;    // radius side
    double denominator = 0.0;  // radius side, raised to p/p*
};

// The weighted quotient
//   int r^{p-n} |v'|^p Y_{k+1}^{2-p} Y_k^{-1} / (int r^{-n} |v|^{p*} Y_k X_{k+1}^{1+p*/p})^{p/p*}
// in the radius and, independently, after the change to tau:
//   int tau^{p-2} |w_tau|^p / (int tau^{-1-p*/p} |w|^{p*})^{p/p*}.
QuotientPair quotient_pair(const RadialProfile& v, const HardyConfig& cfg,
                           const QuadOptions& opts = {});

// A trial function written in the Emden-Fowler variable: u = f_{0,k,D} w(tau)
// with w supported in [tau0, tau_end].
struct TauProfile {
    double tau0 = 0.0;
    double tau_end = 0.0;
    std::function<double(double)> w;
    std::function<double(double)> dw;
};

// sin^2(pi (tau - tau0) / (tau_end - tau0)).
TauProfile sine_bump_in_tau(const HardyConfig& cfg, double tau_end);

// I_k of f w through the exact ground-state representation, integrated in tau.
QuadResult ik_in_tau(const HardyConfig& cfg, const TauProfile& w, const QuadOptions& opts = {});
// Integral of |u|^{p*} Y_k^{1+p*/p} X_{k+1}^{(1+p*/p) eps}, i.e. of tau^{-m} |w|^{p*}.
QuadResult sobolev_in_tau(const HardyConfig& cfg, const TauProfile& w, double eps,
                          const QuadOptions& opts = {});
// sup over tau of |w(tau)| tau^{-eps/p}: the weighted Hoelder quotient restricted
// to pairs (x, 0), a lower bound for the full seminorm.
double onepoint_in_tau(const HardyConfig& cfg, const TauProfile& w, double eps);
// The same trial function as a radial profile (tau_end must map to a normal radius).
RadialProfile tau_profile_to_radial(const HardyConfig& cfg, const TauProfile& w);

struct VectorInequalityReport {
    double p = 0.0;
    std::size_t trials = 0;
    // p >= 2: the smallest per-sample constants in
    //   |a+b|^p >= |a|^p + c |b|^p + p |a|^{p-2} a.b            (first form)
    //   |a+b|^p >= |a|^p + c |a|^{p-2} |b|^2 + p |a|^{p-2} a.b  (second form)
    double c_first = 0.0;
    double c_second = 0.0;
    // p < 2: smallest normalized margin of
    //   |a+b|^p - |a|^p - p |a|^{p-2} a.b - 3p(p-1)/16 |b|^2 / (|a| + |b|)^{2-p},
    // divided by (|a| + |b|)^p, and the number of negative samples.
    double l_constant = 0.0;
    double l_margin_min = 0.0;
    std::size_t l_violations = 0;
};

VectorInequalityReport vector_inequality_margin(double p, std::size_t trials, std::uint64_t seed);

// Infimum of the per-pair constant for the first (second = false) or second
// form, from a deterministic search over the reduced two-parameter problem
// a = e_1, b = rho (cos theta, sin theta). p >= 2.
double calibrate_vector_constant(double p, bool second);

// Smallest normalized margin of the given form with constant c over random
// pairs; negative values are violations.
double vector_inequality_check(double p, bool second, double c, std::size_t trials,
                               std::uint64_t seed);

} // namespace hardylab
