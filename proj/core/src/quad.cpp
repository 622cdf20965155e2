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

#include "hardylab/quad.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/legendre.hpp>

namespace hardylab {

void QuadOptions::validate() const {
    if (!(sigma > 0.0 && sigma < 1.0)) {
        throw PreconditionError("quadrature sigma must lie in (0, 1)");
    }
    if (!(r_min_ratio > 0.0 && r_min_ratio < 1.0)) {
        throw PreconditionError("quadrature r_min_ratio must lie in (0, 1)");
    }
    if (order < 2 || order > 256) {
        throw PreconditionError("quadrature order must lie in [2, 256]");
    }
    if (splits < 1) {
        throw PreconditionError("quadrature splits must be positive");
    }
}

QuadOptions QuadOptions::from_environment() {
    QuadOptions o;
    if (const char* env = std::getenv("HARDYLAB_QUAD_ORDER"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0') {
            throw PreconditionError(std::string("HARDYLAB_QUAD_ORDER is not an integer: ") + env);
        }
        o.order = static_cast<int>(v);
    }
    o.validate();
    return o;
}

const GaussRule& gauss_rule(int order) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[order];
    if (!slot) {
        auto rule = std::make_unique<GaussRule>();
        const auto zeros = boost::math::legendre_p_zeros<double>(order);
        for (double z : zeros) {
            const double dp = boost::math::legendre_p_prime(order, z);
            const double w = 2.0 / ((1.0 - z * z) * dp * dp);
            rule->nodes.push_back(z);
            rule->weights.push_back(w);
            if (z != 0.0) {
                rule->nodes.push_back(-z);
                rule->weights.push_back(w);
            }
        }
        slot = std::move(rule);
    }
    return *slot;
}

GradedMesh::GradedMesh(double R, const QuadOptions& opts, std::span<const double> breakpoints,
                       double lower)
    : R_(R), lower_(lower), tail_(lower == 0.0) {
    opts.validate();
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw PreconditionError("mesh radius must be positive and finite");
    }
    if (!(lower >= 0.0 && lower < R)) {
        throw PreconditionError("mesh lower edge must lie in [0, R)");
    }
    rule_ = &gauss_rule(opts.order);

    std::vector<double> edges;
    double floor_edge = lower;
    if (lower > 0.0) {
        for (double e = R; e > lower; e *= opts.sigma) {
            edges.push_back(e);
        }
    } else {
        // The innermost edge is itself geometric so the two innermost cells
        // have the full ratio sigma.
        double e = R;
        for (; e > opts.r_min_ratio * R; e *= opts.sigma) {
            edges.push_back(e);
        }
        floor_edge = e;
        cell_edges_ = {e, e / opts.sigma, e / (opts.sigma * opts.sigma)};
    }
    edges.push_back(floor_edge);
    for (double b : breakpoints) {
        if (b > floor_edge && b < R) {
            edges.push_back(b);
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double a, double b) { return b - a <= 1e-14 * b; }),
                edges.end());
    split_edges(edges, opts.splits);
}

GradedMesh GradedMesh::from_edges(std::span<const double> edges, const QuadOptions& opts) {
    opts.validate();
    if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
        throw PreconditionError("mesh edges must strictly increase");
    }
    GradedMesh m;
    m.R_ = edges.back();
    m.lower_ = edges.front();
    m.tail_ = false;
    m.rule_ = &gauss_rule(opts.order);
    m.split_edges(std::vector<double>(edges.begin(), edges.end()), opts.splits);
    return m;
}

void GradedMesh::split_edges(const std::vector<double>& edges, int splits) {
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i];
        const double h = (edges[i + 1] - a) / splits;
        for (int s = 0; s < splits; ++s) {
            const double lo = a + s * h;
            const double hi = s + 1 == splits ? edges[i + 1] : a + (s + 1) * h;
            panels_.emplace_back(lo, hi);
        }
    }
}

namespace detail {

void throw_nonfinite(double node) {
    throw DivergenceError("integrand is not finite at r = " + std::to_string(node), node);
}

} // namespace detail

std::vector<QuadResult> integrate_radial_many(
    std::size_t count, const std::function<void(double, std::span<double>)>& f,
    const GradedMesh& mesh) {
    std::vector<QuadResult> out(count);
    std::vector<double> buf(count);
    std::vector<double> whole(count);
    std::vector<double> halves(count);
    const GaussRule& rule = mesh.rule();

    auto panel = [&](double a, double b, std::vector<double>& acc) {
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double r = mid + half * rule.nodes[i];
            f(r, buf);
            for (std::size_t c = 0; c < count; ++c) {
                if (!std::isfinite(buf[c])) {
                    detail::throw_nonfinite(r);
                }
                acc[c] += rule.weights[i] * buf[c] * half;
            }
        }
    };

    std::vector<double> tmp(count);
    std::vector<double> magnitude(count);
    std::vector<std::array<double, 2>> cells(count);
    for (const auto& [a, b] : mesh.panels()) {
        const double m = 0.5 * (a + b);
        panel(a, b, whole);
        panel(a, m, halves);
        panel(m, b, tmp);
        const int cell = mesh.tail_cell(a, b);
        for (std::size_t c = 0; c < count; ++c) {
            const double h = halves[c] + tmp[c];
            out[c].value += h;
            out[c].err_est += std::abs(whole[c] - h);
            magnitude[c] += std::abs(h);
            if (cell >= 0) {
                cells[c][cell] += h;
            }
        }
    }
    for (std::size_t c = 0; c < count; ++c) {
        out[c].err_est += kSummationRoundoff * magnitude[c];
        if (mesh.has_tail()) {
            out[c].err_est += tail_estimate(cells[c][0], cells[c][1]);
        }
    }
    return out;
}

double tail_estimate(double inner, double next) {
    const double a = std::abs(inner);
    const double b = std::abs(next);
    if (a == 0.0) {
        return 0.0;
    }
    const double q = b > 0.0 ? std::min(a / b, kMaxTailRatio) : kMaxTailRatio;
    return a * std::max(1.0, q / (1.0 - q));
}

int GradedMesh::tail_cell(double a, double b) const {
    if (!tail_) {
        return -1;
    }
    constexpr double kSlack = 1e-13;
    if (b <= cell_edges_[1] * (1.0 + kSlack)) {
        return 0;
    }
    if (a >= cell_edges_[1] * (1.0 - kSlack) && b <= cell_edges_[2] * (1.0 + kSlack)) {
        return 1;
    }
    return -1;
}

double sphere_area(int n) {
    if (n < 1) {
        throw PreconditionError("dimension must be positive");
    }
    const double half_n = 0.5 * n;
    return 2.0 * std::pow(std::numbers::pi, half_n) / boost::math::tgamma(half_n);
}

QuadResult integrate_zonal(const std::function<double(double)>& g, int n, int order, int panels) {
    if (n < 2) {
        throw PreconditionError("zonal integration needs n >= 2");
    }
    if (panels < 1) {
        throw PreconditionError("zonal integration needs at least one panel");
    }
    const GaussRule& rule = gauss_rule(order);
    const double ring = sphere_area(n - 1);
    auto integrand = [&](double theta) {
        return g(theta) * (n == 2 ? 1.0 : std::pow(std::sin(theta), n - 2));
    };
    QuadResult out;
    const double h = std::numbers::pi / panels;
    for (int i = 0; i < panels; ++i) {
        const double a = i * h;
        const double b = (i + 1) * h;
        const double m = 0.5 * (a + b);
        const double whole = detail::gauss_panel(integrand, rule, a, b);
        const double halves = detail::gauss_panel(integrand, rule, a, m) +
                              detail::gauss_panel(integrand, rule, m, b);
        out.value += halves;
        out.err_est += std::abs(whole - halves);
    }
    out.value *= ring;
    out.err_est *= ring;
    return out;
}

namespace {

// Continuous grid coordinates: radius index a in [0, N-1] with a = 0 at the
// origin, a = 1 at the smallest positive radius and geometric spacing above.
struct PairGrid {
    double R;
    int nr;
    int na;
    double r_lo;
    double log_q;

    double radius(double a) const {
        a = std::clamp(a, 0.0, static_cast<double>(nr - 1));
        if (a <= 1.0) {
            return a * r_lo;
        }
        return std::min(R, r_lo * std::exp((a - 1.0) * log_q));
    }
    double angle(double b) const {
        b = std::clamp(b, 0.0, static_cast<double>(na - 1));
        return std::numbers::pi * b / (na - 1);
    }
};

} // namespace

PairSupResult sup_over_pairs(const std::function<double(double, double, double)>& h, double R,
                             const PairGridOptions& opts) {
    if (!(R > 0.0) || opts.radii < 3 || opts.angles < 2 || opts.rounds < 0 || !(opts.zoom > 1.0) ||
        !(opts.r_min_ratio > 0.0 && opts.r_min_ratio < 1.0)) {
        throw PreconditionError("invalid pair grid options");
    }
    const PairGrid grid{R, opts.radii, opts.angles, opts.r_min_ratio * R,
                        std::log(1.0 / opts.r_min_ratio) / (opts.radii - 2)};
    PairSupResult best;
    best.value = -1.0;
    double ba1 = 0.0;
    double ba2 = 0.0;
    double bb = 0.0;

    auto probe = [&](double a1, double a2, double b) {
        a1 = std::clamp(a1, 0.0, static_cast<double>(opts.radii - 1));
        a2 = std::clamp(a2, 0.0, static_cast<double>(opts.radii - 1));
        b = std::clamp(b, 0.0, static_cast<double>(opts.angles - 1));
        const double r1 = grid.radius(a1);
        const double r2 = grid.radius(a2);
        const double phi = grid.angle(b);
        const double v = h(r1, r2, phi);
        ++best.evaluations;
        if (!std::isfinite(v)) {
            throw DivergenceError("pair functional is not finite", r1);
        }
        if (v > best.value) {
            best.value = v;
            best.r1 = r1;
            best.r2 = r2;
            best.phi = phi;
            ba1 = a1;
            ba2 = a2;
            bb = b;
        }
    };

    for (int i = 0; i < opts.radii; ++i) {
        for (int j = i; j < opts.radii; ++j) {
            for (int l = 0; l < opts.angles; ++l) {
                probe(i, j, l);
            }
        }
    }
    double span = 1.0;
    for (int round = 0; round < opts.rounds; ++round) {
        const double c1 = ba1;
        const double c2 = ba2;
        const double cb = bb;
        constexpr int kSide = 4;
        for (int i = -kSide; i <= kSide; ++i) {
            for (int j = -kSide; j <= kSide; ++j) {
                for (int l = -kSide; l <= kSide; ++l) {
                    probe(c1 + span * i / kSide, c2 + span * j / kSide, cb + span * l / kSide);
                }
            }
        }
        span /= opts.zoom;
    }
    return best;
}

} // namespace hardylab
