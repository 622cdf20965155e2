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
#include <optional>
#include <string>
#include <vector>

#include "hardylab/config.hpp"
#include "hardylab/functionals.hpp"
#include "hardylab/profiles.hpp"
#include "hardylab/quad.hpp"

namespace hardylab {

enum class Target { TheoremA, TheoremB, Lemma41, QuotientC };
enum class Family { Polynomial, QuasiExtremal, Separable };

Target parse_target(const std::string& s);
std::string to_string(Target t);
Family parse_family(const std::string& s);
std::string to_string(Family f);

// One member of a trial family. Parameters live in a box; the meaning of each
// coordinate depends on the family:
//   Polynomial     (m, s)        u = (1 - (r/R)^m)_+^s, times r/(r + R/10) for p > n
//   QuasiExtremal  (log10 d/R)   u = f_{0,k,D} times the window 1 on [d, R/2]
//   Separable      (m, s, l)     damped polynomial bump times the zonal harmonic h_l
struct TrialProfile {
    Family family = Family::Polynomial;
    std::vector<double> params;
    RadialProfile radial;
    int l = 0;

    bool separable() const { return family == Family::Separable && l > 0; }
    SeparableProfile as_separable(int n) const { return {radial, n, l}; }
    std::string describe() const;
};

struct ParamBox {
    std::vector<double> lo;
    std::vector<double> hi;
};

ParamBox family_box(Family f);
TrialProfile make_trial(Family f, const std::vector<double>& params, const HardyConfig& cfg);

// Mixture of the three families (1/2 polynomial, 1/4 quasi-extremal, 1/4
// separable), deterministic in the seed. radial_only replaces separable draws
// by polynomial ones.
std::vector<TrialProfile> random_trials(const HardyConfig& cfg, std::size_t count,
                                        std::uint64_t seed, bool radial_only = false);

// I_k on a trial profile, radial or separable.
FunctionalReport eval_trial(const TrialProfile& u, const HardyConfig& cfg,
                            const QuadOptions& opts = {});

struct Quotient {
    double numerator = 0.0;
    double denominator = 0.0;
    double ratio = 0.0;
};

// The quotient minimized by estimate_constant for the given target:
//   TheoremA   I_k / rhs_sobolev(eps = 1)
//   TheoremB   I_k^{1/p} / rhs_holder(eps = 1)
//   Lemma41    the p = 2 functional on zeta / the Lemma 4.1 integral, radial only
//   QuotientC  Q_r of the weighted one-dimensional quotient, radial only
Quotient target_quotient(Target t, const TrialProfile& u, const HardyConfig& cfg,
                         const QuadOptions& opts = {});

struct QuotientReport {
    Target target = Target::TheoremA;
    Family family = Family::Polynomial;
    HardyConfig cfg;
    double numerator = 0.0;
    double denominator = 0.0;
    double ratio = 0.0;
    std::vector<double> params;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
};

struct SearchOptions {
    std::size_t budget = 200;   // quotient evaluations over all restarts
    int restarts = 3;
    double initial_step = 0.25; // relative to the box width
    double min_step = 1e-3;
    std::uint64_t seed = 1;
};

// Pattern search with shrinking steps over the family box. The result is an
// upper bound for the best constant of the target inequality on the family.
QuotientReport estimate_constant(Target target, const HardyConfig& cfg, Family family,
                                 const SearchOptions& search = {}, const QuadOptions& opts = {});

// Sharpness sweeps run on u = f_{0,k,D} sin^2(pi (tau - tau0) / (T - tau0)) in the
// Emden-Fowler variable. A row at T has log10(delta/R), the radius where the
// bump starts, computed in logs since it leaves the double range fast.
struct SweepRow {
    double tau_end = 0.0;
    double log10_delta = 0.0;
    double log_x = 0.0;          // ln X_{k+1}(delta/D) = -ln T
    double numerator = 0.0;      // I_k
    double denominator = 0.0;    // right-hand side raised to the power p
    double ratio = 0.0;
    bool ok = false;
    std::string error;
};

struct SweepReport {
    Target target = Target::TheoremA;
    HardyConfig cfg;
    double eps = 1.0;
    std::vector<SweepRow> rows;   // sorted by tau_end, i.e. by decreasing delta
    bool monotone = false;        // non-increasing up to 10% noise
    bool decaying = false;        // last ratio <= first / 2
    bool control_bounded = false; // within [median / 2, 2 median]
    double slope = 0.0;           // least-squares d ln ratio / d ln X_{k+1}
    bool slope_valid = false;
    std::size_t failures = 0;
};

std::vector<double> default_sweep_taus();
double log10_delta_for_tau(const HardyConfig& cfg, double tau_end);
double tau_for_log10_delta(const HardyConfig& cfg, double log10_delta);

// eps in [0, 1]; eps = 1 is the control. TheoremA needs p < n and TheoremB p > n.
SweepReport sharpness_sweep(Target target, const HardyConfig& cfg, double eps,
                            const std::vector<double>& tau_ends, const QuadOptions& opts = {});

struct MinDRow {
    double multiplier = 0.0;
    bool positivity = false;
    bool residual = false;
    double worst_margin = 0.0;    // min over the suite of (I_k + err_est) / dirichlet
    double worst_residual = 0.0;
};

struct MinDReport {
    std::vector<MinDRow> rows;
    std::optional<double> positivity_threshold;
    std::optional<double> residual_threshold;
    std::optional<double> threshold;  // both hold
    bool monotone = true;             // no pass followed by a failure
};

// Grid of 200 log-spaced radii in (R 1e-12, R) used for residual checks.
std::vector<double> residual_grid(const HardyConfig& cfg);
// min of the supersolution residual on the grid; nullopt when the ground state
// cannot be built (for p < 2, when 1 - p X_1(R/D) < 2 - p).
std::optional<double> min_residual(const HardyConfig& cfg);

MinDReport find_min_D(int n, double p, int k, const std::vector<double>& multipliers,
                      std::size_t trials, std::uint64_t seed, const QuadOptions& opts = {});

struct SphericalModeReport {
    double ik = 0.0;
    double term1 = 0.0;   // integral of f^p |grad v|^p
    double term2 = 0.0;   // integral of g^2 |v|^{p-2} |grad v|^2
    double c_first = 0.0;
    double c_second = 0.0;
    double bound = 0.0;   // (c_first term1 + c_second |h|^{p-2} term2) / 2
    double margin = 0.0;  // ik - bound
    double err_est = 0.0;
};

// u = f_{0,k,D} v with v = radial(r) h_l(theta). 2 <= p < n.
SphericalModeReport spherical_mode_check(const HardyConfig& cfg, int l,
                                         const RadialProfile& radial,
                                         const QuadOptions& opts = {});

// lhs: the p = 2 functional on zeta (dimension n, depth k); rhs: the integral
// of |x|^{p*(p-2)/p} Y_{k+1}^{1+p*/p} |zeta|^{2p*/p} raised to p/p*. 2 <= p < n.
Margin radial_improvement_check(const HardyConfig& cfg, const RadialProfile& zeta,
                                const QuadOptions& opts = {});

// Margin suites. Each runs a fixed, seeded set of trials and keeps the worst
// margin in units of its own error estimate.
struct SuiteResult {
    std::string name;
    std::size_t count = 0;
    std::size_t failures = 0;
    double worst_margin = 0.0;   // min of margin + err_est over the suite
    double worst_relative = 0.0; // min of margin / max(lhs, rhs)
    double constant = 0.0;       // fitted constant where the check has one
    bool pass() const { return count > 0 && failures == 0; }
};

SuiteResult anilog_suite(const HardyConfig& cfg, std::size_t trials, std::uint64_t seed,
                         const QuadOptions& opts = {});
SuiteResult trace_suite(const HardyConfig& cfg, std::size_t trials, std::uint64_t seed,
                        const QuadOptions& opts = {});

// Checks with an unspecified constant: each calibration draw is pushed uphill
// in lhs/rhs by a short coordinate ascent, and the largest ratio found gives C.
// The check then requires C_ref rhs - lhs >= -err_est on an
// independent set with C_ref = kHeldOutSlack C.
inline constexpr double kHeldOutSlack = 1.25;
SuiteResult local_estimate_suite(const HardyConfig& cfg, std::size_t trials, std::uint64_t seed,
                                 const QuadOptions& opts = {});
SuiteResult onepoint_suite(const HardyConfig& cfg, std::size_t trials, std::uint64_t seed,
                           const QuadOptions& opts = {});

} // namespace hardylab
