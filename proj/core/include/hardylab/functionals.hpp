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

#include <vector>

#include "hardylab/config.hpp"
#include "hardylab/profiles.hpp"
#include "hardylab/quad.hpp"

namespace hardylab {

// The pieces of I_k[u; D] and their assembly.
struct FunctionalReport {
    HardyConfig cfg;
    double dirichlet = 0.0;          // integral of |grad u|^p
    double hardy = 0.0;              // integral of |u|^p / |x|^p
    std::vector<double> remainder;   // remainder[i-1]: integral of |u|^p / |x|^p Y_i^2(|x|/D)
    double value = 0.0;              // I_k
    double err_est = 0.0;

    // I_j for 0 <= j <= k, assembled from the same integrals.
    double value_at_depth(int j) const;

    static FunctionalReport assemble(const HardyConfig& cfg, double dirichlet, double hardy,
                                     std::vector<double> remainder, double err_est);
};

FunctionalReport eval_Ik(const RadialProfile& u, const HardyConfig& cfg,
                         const QuadOptions& opts = {});
FunctionalReport eval_Ik(const SeparableProfile& u, const HardyConfig& cfg,
                         const QuadOptions& opts = {});

// (integral of |u|^{p*} Y_k^{1+p*/p} X_{k+1}^{(1+p*/p) eps})^{p/p*}, p < n.
QuadResult rhs_sobolev(const RadialProfile& u, const HardyConfig& cfg, double eps,
                       const QuadOptions& opts = {});
QuadResult rhs_sobolev(const SeparableProfile& u, const HardyConfig& cfg, double eps,
                       const QuadOptions& opts = {});

// Weighted Hoelder seminorm
//   sup |u(x) - u(y)| / |x - y|^{1-n/p} * Y_k^{1/p} X_{k+1}^{eps/p}(|x - y| / D),
// p > n, radial u with u(0) = 0.
double rhs_holder(const RadialProfile& u, const HardyConfig& cfg, double eps,
                  const PairGridOptions& grid = {});

// sup |u(r)| / r^{1-n/p} * Y_{k+1}^{1/p}(r / D), p > n.
double onepoint_sup(const RadialProfile& u, const HardyConfig& cfg);

struct Margin {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;   // the side that should dominate minus the other
    double err_est = 0.0;
};

// The estimate
//   integral_0^r t^{alpha-1} Y_k^{-beta}(t/D) dt <= c r^alpha Y_k^{-beta}(r/D)
// behind the choice of D. margin = rhs - lhs.
Margin verify_integral_bound(double alpha, double beta, double c, double r, double D, int k,
                             const QuadOptions& opts = {});

// margin = p^p integral |x|^{p-n} |grad w|^p Y_k^{1-p} X_{k+1}^{2-p}
//          - integral |w|^p |x|^{-n} Y_k X_{k+1}^2.
Margin anilog_check(const RadialProfile& w, const HardyConfig& cfg, const QuadOptions& opts = {});

// Weighted Hardy inequality with a trace term on the centered ball B_r:
//   |q/(n-s)|^q integral |grad v|^q |x|^{q-s} Y_k^gamma
//     + q/(n-s) |v(r)|^q r^{n-s} Y_k^gamma(r/D) |S^{n-1}|
//   >= integral |v|^q |x|^{-s} Y_k^gamma [1 + gamma q Z_k / (n-s)].
// Uses cfg.n, cfg.k and cfg.D; margin = left - right.
Margin trace_inequality_check(const RadialProfile& v, const HardyConfig& cfg, double q, double s,
                              double gamma, double r, const QuadOptions& opts = {});

// lhs = integral over B_r of |u|^q / |x|^q [1 - q^2 Z_k / (n (p - q))],
// rhs = r^{n(1-q/p)} Y_{k+1}^{-q/p}(r/D) I_k^{q/p}  (no constant).
Margin local_estimate_check(const RadialProfile& u, const HardyConfig& cfg, double q, double r,
                            const QuadOptions& opts = {});

// lhs = onepoint_sup(u), rhs = I_k^{1/p} (no constant).
Margin onepoint_check(const RadialProfile& u, const HardyConfig& cfg,
                      const QuadOptions& opts = {});

} // namespace hardylab
