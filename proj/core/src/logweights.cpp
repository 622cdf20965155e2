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

#include "hardylab/logweights.hpp"

#include <cfloat>
#include <cmath>
#include <limits>
#include <string>

#include "hardylab/errors.hpp"

namespace hardylab {
namespace {

void check_depth(int k, int lo) {
    if (k < lo || k > kMaxDepth) {
        throw DepthError("depth " + std::to_string(k) + " outside [" + std::to_string(lo) + ", " +
                         std::to_string(kMaxDepth) + "]");
    }
}

void check_t(double t) {
    if (!(t > 0.0) || !(t <= 1.0)) {
        throw DomainError("weight argument must lie in (0, 1], got " + std::to_string(t));
    }
}

inline double x1(double t) { return 1.0 / (1.0 - std::log(t)); }

// exp(1 - 1/s), with exact zero for s == 0.
inline double f1(double s) { return s > 0.0 ? std::exp(1.0 - 1.0 / s) : 0.0; }

} // namespace

WeightStack WeightStack::at(double t, int m) {
    check_t(t);
    check_depth(m, 0);
    WeightStack w;
    w.m_ = m;
    double v = t;
    for (int j = 1; j <= m; ++j) {
        v = x1(v);
        w.x_[j] = v;
    }
    w.accumulate();
    return w;
}

WeightStack WeightStack::from_last(double s, int m) {
    check_depth(m, 1);
    if (!(s > 0.0) || !(s <= 1.0)) {
        throw DomainError("inverse argument must lie in (0, 1], got " + std::to_string(s));
    }
    WeightStack w;
    w.m_ = m;
    w.x_[m] = s;
    for (int j = m - 1; j >= 1; --j) {
        w.x_[j] = f1(w.x_[j + 1]);
    }
    w.accumulate();
    return w;
}

void WeightStack::accumulate() {
    y_[0] = 1.0;
    z_[0] = 0.0;
    s2_[0] = 0.0;
    for (int j = 1; j <= m_; ++j) {
        y_[j] = y_[j - 1] * x_[j];
        z_[j] = z_[j - 1] + y_[j];
        s2_[j] = s2_[j - 1] + y_[j] * y_[j];
    }
}

double WeightStack::y_ratio(int i, int j) const {
    double log_ratio = 0.0;
    for (int l = i + 1; l <= j; ++l) {
        if (x_[l] == 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        log_ratio -= std::log(x_[l]);
    }
    return std::exp(log_ratio);
}

double eval_X(int k, double t) {
    check_depth(k, 1);
    return WeightStack::at(t, k).x(k);
}

double eval_Y(int k, double t) {
    check_depth(k, 0);
    return WeightStack::at(t, k).y(k);
}

double eval_Z(int k, double t) {
    check_depth(k, 0);
    return WeightStack::at(t, k).z(k);
}

WeightDerivatives eval_derivatives(int k, double t) {
    check_depth(k, 0);
    const WeightStack w = WeightStack::at(t, k);
    WeightDerivatives d;
    if (k >= 1) {
        d.dX = w.y(k) * w.x(k) / t;
    }
    d.dY = w.y(k) * w.z(k) / t;
    d.dZ = (w.z(k) * w.z(k) + w.sum_y2(k)) / (2.0 * t);
    return d;
}

double eval_F(int i, double s) {
    check_depth(i, 0);
    if (!(s > 0.0) || !(s <= 1.0)) {
        throw DomainError("inverse argument must lie in (0, 1], got " + std::to_string(s));
    }
    double v = s;
    for (int j = 0; j < i; ++j) {
        v = f1(v);
        if (v < DBL_MIN) {
            throw UnderflowError("F_" + std::to_string(i) + "(" + std::to_string(s) +
                                 ") underflows at level " + std::to_string(j + 1));
        }
    }
    return v;
}

ZInfResult eval_Z_inf(double t, double tol, std::int64_t max_terms) {
    check_t(t);
    if (!(tol > 0.0) || max_terms < 1) {
        throw PreconditionError("eval_Z_inf needs tol > 0 and max_terms >= 1");
    }
    ZInfResult r;
    if (t == 1.0) {
        throw DivergenceError("Z_inf diverges at t = 1: every X_i(1) = 1", 1.0);
    }
    double x = x1(t);
    double y = x;
    double z = 0.0;
    for (std::int64_t K = 0; K < max_terms; ++K) {
        // Here y = Y_{K+1} and x = X_{K+1}.
        const double x_next = x1(x);
        const double gap = 1.0 - x_next;
        r.tail_bound = gap > 0.0 ? y / gap : std::numeric_limits<double>::infinity();
        r.terms = K;
        r.value = z;
        if (r.tail_bound < tol) {
            r.converged = true;
            return r;
        }
        z += y;
        x = x_next;
        y *= x;
    }
    r.terms = max_terms;
    r.value = z;
    const double gap = 1.0 - x1(x);
    r.tail_bound = gap > 0.0 ? y / gap : std::numeric_limits<double>::infinity();
    return r;
}

} // namespace hardylab
