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

#include "hardylab/profiles.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

// Boost 1.74 pchip calls isnan unqualified.
using std::isnan;

#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/gegenbauer.hpp>

#include "hardylab/errors.hpp"

namespace hardylab {

RadialProfile::RadialProfile(Definition def) {
    if (!(def.R > 0.0) || !def.value || !def.derivative) {
        throw PreconditionError("profile needs R > 0, a value and a derivative");
    }
    if (!(def.support_lower >= 0.0 && def.support_lower < def.R)) {
        throw PreconditionError("profile support must start inside [0, R)");
    }
    std::sort(def.breakpoints.begin(), def.breakpoints.end());
    def.breakpoints.erase(std::unique(def.breakpoints.begin(), def.breakpoints.end()),
                           def.breakpoints.end());
    impl_ = std::make_shared<const Definition>(std::move(def));
}

GradedMesh RadialProfile::mesh(const QuadOptions& opts) const {
    return GradedMesh(radius(), opts, breakpoints(), support_lower());
}

RadialProfile RadialProfile::scaled(double c) const {
    Definition s = *impl_;
    auto self = impl_;
    s.value = [self, c](double r) { return c * self->value(r); };
    s.derivative = [self, c](double r) { return c * self->derivative(r); };
    return RadialProfile(std::move(s));
}

RadialProfile RadialProfile::times(const RadialProfile& other) const {
    if (radius() != other.radius()) {
        throw PreconditionError("profiles live on different balls");
    }
    auto a = impl_;
    auto b = other.impl_;
    Definition s;
    s.R = a->R;
    s.value = [a, b](double r) { return a->value(r) * b->value(r); };
    s.derivative = [a, b](double r) {
        return a->derivative(r) * b->value(r) + a->value(r) * b->derivative(r);
    };
    s.breakpoints = a->breakpoints;
    s.breakpoints.insert(s.breakpoints.end(), b->breakpoints.begin(), b->breakpoints.end());
    s.support_lower = std::max(a->support_lower, b->support_lower);
    s.vanishes_at_origin = a->vanishes_at_origin || b->vanishes_at_origin || s.support_lower > 0.0;
    s.label = a->label + "*" + b->label;
    return RadialProfile(std::move(s));
}

namespace {

constexpr int kEdgeGrading = 30;

} // namespace

RadialProfile polynomial_bump(double R, double m, double s) {
    if (!(R > 0.0) || !(m >= 1.0) || !(s >= 1.0)) {
        throw PreconditionError("polynomial bump needs R > 0, m >= 1, s >= 1");
    }
    RadialProfile::Definition def;
    def.R = R;
    def.value = [R, m, s](double r) {
        const double base = 1.0 - std::pow(r / R, m);
        return base > 0.0 ? std::pow(base, s) : 0.0;
    };
    def.derivative = [R, m, s](double r) {
        const double x = r / R;
        const double base = 1.0 - std::pow(x, m);
        if (!(base > 0.0) || r == 0.0) {
            return m == 1.0 && r == 0.0 ? -s / R : 0.0;
        }
        return -s * std::pow(base, s - 1.0) * m * std::pow(x, m - 1.0) / R;
    };
    if (s != std::floor(s)) {
        // (1 - x^m)^s is not smooth at x = 1; grade the mesh toward R.
        for (int j = 1; j <= kEdgeGrading; ++j) {
            def.breakpoints.push_back(R * (1.0 - std::ldexp(1.0, -j)));
        }
    }
    std::ostringstream os;
    os.precision(17);
    os << "bump(m=" << m << ",s=" << s << ")";
    def.label = os.str();
    return RadialProfile(std::move(def));
}

RadialProfile origin_damper(double R, double c) {
    if (!(c > 0.0)) {
        throw PreconditionError("damper scale must be positive");
    }
    RadialProfile::Definition def;
    def.R = R;
    def.value = [c](double r) { return r / (r + c); };
    def.derivative = [c](double r) { return c / ((r + c) * (r + c)); };
    def.vanishes_at_origin = true;
    def.label = "damper";
    return RadialProfile(std::move(def));
}

double smooth_step(double x) {
    if (x <= 0.0) {
        return 0.0;
    }
    if (x >= 1.0) {
        return 1.0;
    }
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

double smooth_step_derivative(double x) {
    if (x <= 0.0 || x >= 1.0) {
        return 0.0;
    }
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    const double sum = a + b;
    return a * b * (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x))) / (sum * sum);
}

RadialProfile smooth_window(double R, double a0, double a1, double b0, double b1) {
    if (!(0.0 <= a0 && a0 < a1 && a1 <= b0 && b0 < b1 && b1 <= R)) {
        throw PreconditionError("window edges must satisfy 0 <= a0 < a1 <= b0 < b1 <= R");
    }
    RadialProfile::Definition def;
    def.R = R;
    def.value = [=](double r) {
        if (r <= a1) {
            return smooth_step((r - a0) / (a1 - a0));
        }
        if (r < b0) {
            return 1.0;
        }
        return 1.0 - smooth_step((r - b0) / (b1 - b0));
    };
    def.derivative = [=](double r) {
        if (r <= a1) {
            return smooth_step_derivative((r - a0) / (a1 - a0)) / (a1 - a0);
        }
        if (r < b0) {
            return 0.0;
        }
        return -smooth_step_derivative((r - b0) / (b1 - b0)) / (b1 - b0);
    };
    def.breakpoints = {a0, a1, b0, b1};
    def.support_lower = a0;
    def.vanishes_at_origin = a0 > 0.0;
    def.label = "window";
    return RadialProfile(std::move(def));
}

RadialProfile tabulated_profile(std::vector<double> r, std::vector<double> u) {
    if (r.size() != u.size() || r.size() < 4) {
        throw PreconditionError("tabulated profile needs at least 4 matching samples");
    }
    if (r.front() != 0.0 || !std::is_sorted(r.begin(), r.end()) ||
        std::adjacent_find(r.begin(), r.end()) != r.end()) {
        throw PreconditionError("tabulated radii must start at 0 and strictly increase");
    }
    if (u.back() != 0.0) {
        throw PreconditionError("tabulated profile must vanish at the outer radius");
    }
    RadialProfile::Definition def;
    def.R = r.back();
    def.vanishes_at_origin = u.front() == 0.0;
    def.breakpoints.assign(r.begin() + 1, r.end() - 1);
    using Interp = boost::math::interpolators::pchip<std::vector<double>>;
    auto interp = std::make_shared<Interp>(std::move(r), std::move(u));
    def.value = [interp](double x) { return (*interp)(x); };
    def.derivative = [interp](double x) { return interp->prime(x); };
    def.label = "tabulated";
    return RadialProfile(std::move(def));
}

RadialProfile load_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw PreconditionError("cannot open profile file " + path);
    }
    std::vector<double> r;
    std::vector<double> u;
    std::string line;
    bool header = true;
    std::size_t lineno = 0;
    auto parse = [&](std::string_view field) {
        while (!field.empty() && field.front() == ' ') {
            field.remove_prefix(1);
        }
        while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) {
            field.remove_suffix(1);
        }
        double v = 0.0;
        const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
            throw PreconditionError(path + ":" + std::to_string(lineno) + ": bad number");
        }
        return v;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (header) {
            header = false;
            continue;
        }
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw PreconditionError(path + ":" + std::to_string(lineno) + ": expected two columns");
        }
        const std::string_view view(line);
        r.push_back(parse(view.substr(0, comma)));
        u.push_back(parse(view.substr(comma + 1)));
    }
    return tabulated_profile(std::move(r), std::move(u));
}

namespace {

void check_harmonic(int n, int l) {
    if (n < 2 || l < 0) {
        throw PreconditionError("zonal harmonic needs n >= 2 and l >= 0");
    }
}

// Root mean square of the unnormalized Gegenbauer zonal over the sphere.
double gegenbauer_rms(int n, int l) {
    const double lambda = 0.5 * (n - 2);
    const double integral = std::numbers::pi * std::pow(2.0, 1.0 - 2.0 * lambda) *
                            boost::math::tgamma(l + 2.0 * lambda) /
                            (boost::math::factorial<double>(l) * (l + lambda) *
                             std::pow(boost::math::tgamma(lambda), 2));
    const double ratio = boost::math::tgamma(0.5 * n) /
                         (std::sqrt(std::numbers::pi) * boost::math::tgamma(0.5 * (n - 1)));
    return std::sqrt(integral * ratio);
}

} // namespace

double zonal_harmonic(int n, int l, double theta) {
    check_harmonic(n, l);
    if (l == 0) {
        return 1.0;
    }
    if (n == 2) {
        return std::numbers::sqrt2 * std::cos(l * theta);
    }
    const double lambda = 0.5 * (n - 2);
    return boost::math::gegenbauer(l, lambda, std::cos(theta)) / gegenbauer_rms(n, l);
}

double zonal_harmonic_derivative(int n, int l, double theta) {
    check_harmonic(n, l);
    if (l == 0) {
        return 0.0;
    }
    if (n == 2) {
        return -std::numbers::sqrt2 * l * std::sin(l * theta);
    }
    const double lambda = 0.5 * (n - 2);
    return -std::sin(theta) * boost::math::gegenbauer_derivative(l, lambda, std::cos(theta), 1) /
           gegenbauer_rms(n, l);
}

double harmonic_eigenvalue(int n, int l) { return static_cast<double>(l) * (l + n - 2); }

} // namespace hardylab
