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

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hardylab/quad.hpp"

namespace hardylab {

// A radial function u(|x|) on the ball of radius R, vanishing at |x| = R,
// together with its derivative. Copies share the immutable implementation.
class RadialProfile {
public:
    using Fn = std::function<double(double)>;

    struct Definition {
        double R = 1.0;
        Fn value;
        Fn derivative;
        std::vector<double> breakpoints;  // kinks or steep transitions
        double support_lower = 0.0;       // u == 0 on [0, support_lower)
        bool vanishes_at_origin = false;
        std::string label = "custom";
    };

    explicit RadialProfile(Definition def);

    double value(double r) const { return impl_->value(r); }
    double derivative(double r) const { return impl_->derivative(r); }
    double radius() const { return impl_->R; }
    const std::vector<double>& breakpoints() const { return impl_->breakpoints; }
    double support_lower() const { return impl_->support_lower; }
    bool vanishes_at_origin() const { return impl_->vanishes_at_origin; }
    const std::string& label() const { return impl_->label; }

    // Mesh over the support, with breakpoints as panel edges.
    GradedMesh mesh(const QuadOptions& opts) const;

    RadialProfile scaled(double c) const;
    // Pointwise product; breakpoints and support are merged.
    RadialProfile times(const RadialProfile& other) const;

private:
    std::shared_ptr<const Definition> impl_;
};

// (1 - (r/R)^m)^s on [0, R].
RadialProfile polynomial_bump(double R, double m, double s);

// r / (r + c), used to make a profile vanish at the origin.
RadialProfile origin_damper(double R, double c);

// Smooth step from 0 at x <= 0 to 1 at x >= 1, built from exp(-1/x).
double smooth_step(double x);
double smooth_step_derivative(double x);

// 0 below a0, rising on [a0, a1], 1 on [a1, b0], falling on [b0, b1], 0 above.
RadialProfile smooth_window(double R, double a0, double a1, double b0, double b1);

// Monotone cubic (PCHIP) interpolant of samples (r_i, u_i); r must increase,
// start at 0 and end at R with u(R) = 0.
RadialProfile tabulated_profile(std::vector<double> r, std::vector<double> u);

// Reads a two-column CSV (r, u) with a header row.
RadialProfile load_profile_csv(const std::string& path);

// Zonal spherical harmonic of degree l in R^n as a function of the polar angle,
// normalized so that its square averages to 1 over the sphere.
double zonal_harmonic(int n, int l, double theta);
double zonal_harmonic_derivative(int n, int l, double theta);
// l (l + n - 2).
double harmonic_eigenvalue(int n, int l);

// u(x) = phi(|x|) h_l(theta).
struct SeparableProfile {
    RadialProfile radial;
    int n = 3;
    int l = 0;

    double zonal(double theta) const { return zonal_harmonic(n, l, theta); }
    double zonal_derivative(double theta) const { return zonal_harmonic_derivative(n, l, theta); }
};

} // namespace hardylab
