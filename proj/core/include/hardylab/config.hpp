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

#include <string>

namespace hardylab {

enum class Regime { Subcritical, Supercritical };  // p < n, p > n

// Dimension, exponent, depth and the two radii of a Hardy problem posed on the
// ball of radius R with weights evaluated at |x| / D.
struct HardyConfig {
    int n = 3;
    double p = 2.0;
    int k = 0;
    double R = 1.0;
    double D = 1.0;

    void validate() const;

    Regime regime() const { return p < n ? Regime::Subcritical : Regime::Supercritical; }

    // (p - n) / p, the exponent that enters the ground state.
    double h() const { return (p - n) / p; }
    // |(n - p) / p|^p.
    double hardy_constant() const;
    // (p - 1) / (2p) * |(n - p) / p|^(p - 2).
    double remainder_coefficient() const;
    // np / (n - p); requires p < n.
    double critical_exponent() const;
    // Length the default D is measured against: R when p < n, the diameter 2R
    // when p > n.
    double scale() const { return p < n ? R : 2.0 * R; }

    std::string describe() const;

    static HardyConfig with_multiplier(int n, double p, int k, double multiplier, double R = 1.0);
};

// exp(4), the default ratio between D and the scale.
inline constexpr double kDefaultMultiplier = 54.598150033144236;

} // namespace hardylab
