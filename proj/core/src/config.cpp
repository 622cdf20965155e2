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

#include "hardylab/config.hpp"

#include <cmath>
#include <sstream>

#include "hardylab/errors.hpp"
#include "hardylab/logweights.hpp"

namespace hardylab {

void HardyConfig::validate() const {
    if (n < 2) {
        throw PreconditionError("dimension n must be at least 2");
    }
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw PreconditionError("exponent p must exceed 1");
    }
    if (p == static_cast<double>(n)) {
        throw RegimeError("p = n is outside both regimes");
    }
    if (k < 0 || k > kMaxDepth) {
        throw DepthError("depth k outside [0, " + std::to_string(kMaxDepth) + "]");
    }
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw PreconditionError("radius R must be positive");
    }
    if (!(D >= R) || !std::isfinite(D)) {
        throw PreconditionError("D must be finite and at least R");
    }
}

double HardyConfig::hardy_constant() const { return std::pow(std::abs(h()), p); }

double HardyConfig::remainder_coefficient() const {
    return (p - 1.0) / (2.0 * p) * std::pow(std::abs(h()), p - 2.0);
}

double HardyConfig::critical_exponent() const {
    if (!(p < n)) {
        throw RegimeError("critical Sobolev exponent needs p < n");
    }
    return n * p / (n - p);
}

std::string HardyConfig::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "n=" << n << " p=" << p << " k=" << k << " R=" << R << " D=" << D;
    return os.str();
}

HardyConfig HardyConfig::with_multiplier(int n, double p, int k, double multiplier, double R) {
    HardyConfig c{n, p, k, R, 1.0};
    c.D = multiplier * c.scale();
    c.validate();
    return c;
}

} // namespace hardylab
