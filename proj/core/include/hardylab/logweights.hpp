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

#include <array>
#include <cstddef>
#include <cstdint>

namespace hardylab {

// Iterated logarithmic weights on (0, 1]:
//   X_1(t) = 1 / (1 - ln t),  X_k = X_1(X_{k-1}),
//   Y_k = X_1 X_2 ... X_k,    Z_k = Y_1 + ... + Y_k,
// with Y_0 = 1 and Z_0 = 0. F_i is the inverse of X_i.

inline constexpr int kMaxDepth = 64;

double eval_X(int k, double t);
double eval_Y(int k, double t);
double eval_Z(int k, double t);

struct WeightDerivatives {
    double dX = 0.0;
    double dY = 0.0;
    double dZ = 0.0;
};

// d/dt of X_k, Y_k, Z_k. dX is zero for k = 0 by convention.
WeightDerivatives eval_derivatives(int k, double t);

// F_i(s) for s in (0, 1]. F_0 is the identity. Throws UnderflowError when the
// result is below the smallest normal double.
double eval_F(int i, double s);

struct ZInfResult {
    double value = 0.0;        // partial sum Z_K
    double tail_bound = 0.0;   // Y_{K+1} / (1 - X_{K+2})
    std::int64_t terms = 0;    // K
    bool converged = false;    // tail_bound < tol reached before the term cap
};

ZInfResult eval_Z_inf(double t, double tol = 1e-12, std::int64_t max_terms = 1'000'000);

// All weights up to depth m at one point, computed in a single pass.
// Index j runs over 0..m; x(0) is undefined and reads as zero.
class WeightStack {
public:
    static constexpr std::size_t kCapacity = kMaxDepth + 2;

    // Weights at t in (0, 1].
    static WeightStack at(double t, int m);

    // Weights for the point where X_m equals s in (0, 1]. Inner levels that
    // underflow are stored as exact zeros, which is their limit.
    static WeightStack from_last(double s, int m);

    int depth() const { return m_; }
    double x(int j) const { return x_[j]; }
    double y(int j) const { return y_[j]; }
    double z(int j) const { return z_[j]; }
    double sum_y2(int j) const { return s2_[j]; }

    // Y_i / Y_j for i <= j, evaluated without forming Y_j, so it stays finite
    // when Y_j underflows. Returns +inf when the ratio itself overflows.
    double y_ratio(int i, int j) const;

private:
    void accumulate();

    int m_ = 0;
    std::array<double, kCapacity> x_{};
    std::array<double, kCapacity> y_{};
    std::array<double, kCapacity> z_{};
    std::array<double, kCapacity> s2_{};
};

} // namespace hardylab
