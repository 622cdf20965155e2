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
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hardylab/errors.hpp"

namespace hardylab {

struct QuadOptions {
    double sigma = 0.5;          // geometric ratio between consecutive panel edges
    double r_min_ratio = 1e-12;  // innermost edge as a fraction of R
    int order = 16;              // Gauss-Legendre points per panel
    int splits = 1;              // equal subdivisions of every panel

    void validate() const;

    // Defaults, with the order overridden by HARDYLAB_QUAD_ORDER when set.
    static QuadOptions from_environment();
};

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_rule(int order);

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        err_est += o.err_est;
        return *this;
    }
};

// Panels tiling [lower, R]. With lower == 0 the panels are geometric toward
// r_min, the first edge R sigma^j at or below r_min_ratio * R, and the piece
// below r_min is treated as a tail whose size is estimated from the two
// innermost geometric cells. Breakpoints inside the range become panel edges.
class GradedMesh {
public:
    GradedMesh(double R, const QuadOptions& opts = {}, std::span<const double> breakpoints = {},
               double lower = 0.0);

    // Panels between consecutive increasing edges, each split opts.splits times.
    // No tail is assumed.
    static GradedMesh from_edges(std::span<const double> edges, const QuadOptions& opts = {});

    double radius() const { return R_; }
    double lower() const { return lower_; }
    bool has_tail() const { return tail_; }
    const std::vector<std::pair<double, double>>& panels() const { return panels_; }
    const GaussRule& rule() const { return *rule_; }
    // 0 for a panel in the innermost geometric cell, 1 for the next one, -1 otherwise.
    int tail_cell(double a, double b) const;

private:
    GradedMesh() = default;
    void split_edges(const std::vector<double>& edges, int splits);

    double R_ = 0.0;
    double lower_ = 0.0;
    bool tail_ = false;
    std::array<double, 3> cell_edges_{};
    std::vector<std::pair<double, double>> panels_;
    const GaussRule* rule_ = nullptr;
};

// Relative rounding charged to every radial integral.
inline constexpr double kSummationRoundoff = 64.0 * DBL_EPSILON;
// Cap on the cell ratio used by the tail estimate (a ratio near 1 means the
// integrand barely decays toward the origin).
inline constexpr double kMaxTailRatio = 0.999;

// Size of the piece below r_min from the integrals over the innermost cell and
// the next one: the inner cell times q / (1 - q) for the cell ratio q, and never
// less than the inner cell itself.
double tail_estimate(double inner, double next);

namespace detail {

[[noreturn]] void throw_nonfinite(double node);

template <class F>
double gauss_panel(F& f, const GaussRule& rule, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double r = mid + half * rule.nodes[i];
        const double v = f(r);
        if (!std::isfinite(v)) {
            throw_nonfinite(r);
        }
        s += rule.weights[i] * v;
    }
    return s * half;
}

} // namespace detail

// Integral of f over (0, R] (or [lower, R]). Each panel is integrated whole and
// as two halves; the halves give the value and the difference the error.
template <class F>
QuadResult integrate_radial(F&& f, const GradedMesh& mesh) {
    QuadResult out;
    double magnitude = 0.0;
    std::array<double, 2> cells{};
    for (const auto& [a, b] : mesh.panels()) {
        const double m = 0.5 * (a + b);
        const double whole = detail::gauss_panel(f, mesh.rule(), a, b);
        const double halves =
            detail::gauss_panel(f, mesh.rule(), a, m) + detail::gauss_panel(f, mesh.rule(), m, b);
        out.value += halves;
        out.err_est += std::abs(whole - halves);
        magnitude += std::abs(halves);
        if (const int cell = mesh.tail_cell(a, b); cell >= 0) {
            cells[cell] += halves;
        }
    }
    out.err_est += kSummationRoundoff * magnitude;
    if (mesh.has_tail()) {
        out.err_est += tail_estimate(cells[0], cells[1]);
    }
    return out;
}

// Several integrals sharing one set of nodes. f(r, out) writes `count` values.
std::vector<QuadResult> integrate_radial_many(
    std::size_t count, const std::function<void(double, std::span<double>)>& f,
    const GradedMesh& mesh);

// Surface measure of the unit sphere in R^n.
double sphere_area(int n);

// Integral over the unit sphere in R^n of a function of the polar angle.
QuadResult integrate_zonal(const std::function<double(double)>& g, int n, int order = 16,
                           int panels = 16);

struct PairGridOptions {
    int radii = 64;
    int angles = 32;
    int rounds = 3;
    double zoom = 4.0;
    double r_min_ratio = 1e-9;
};

struct PairSupResult {
    double value = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    double phi = 0.0;
    std::size_t evaluations = 0;
};

// Supremum of h(r1, r2, phi) over pairs x = r1 e1, y = r2 (cos phi, sin phi)
// in the ball of radius R. Coarse grid search, then local zoom rounds.
PairSupResult sup_over_pairs(const std::function<double(double, double, double)>& h, double R,
                             const PairGridOptions& opts = {});

} // namespace hardylab
