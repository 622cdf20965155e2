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

#include "hardylab/functionals.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <numbers>

#include "hardylab/errors.hpp"
#include "hardylab/logweights.hpp"

namespace hardylab {
namespace {

void check_profile(const RadialProfile& u, const HardyConfig& cfg) {
    cfg.validate();
    if (std::abs(u.radius() - cfg.R) > 1e-12 * cfg.R) {
        throw PreconditionError("profile radius differs from the domain radius");
    }
    if (cfg.regime() == Regime::Supercritical && !u.vanishes_at_origin() &&
        std::abs(u.value(0.0)) > 1e-12 * (1.0 + std::abs(u.value(0.5 * cfg.R)))) {
        throw PreconditionError("for p > n the profile must vanish at the origin");
    }
}

// Zonal rule used for separable profiles: composite Gauss on [0, pi], evaluated
// both on whole panels and on halves so the inner error can be tracked.
struct ZonalTable {
    std::vector<double> w_whole, h_whole, dh_whole;
    std::vector<double> w_half, h_half, dh_half;
};

ZonalTable make_zonal_table(int n, int l, int order, int panels) {
    const GaussRule& rule = gauss_rule(order);
    const double ring = sphere_area(n - 1);
    ZonalTable t;
    auto add = [&](double a, double b, std::vector<double>& w, std::vector<double>& h,
                   std::vector<double>& dh) {
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double th = mid + half * rule.nodes[i];
            const double jac = n == 2 ? 1.0 : std::pow(std::sin(th), n - 2);
            w.push_back(ring * rule.weights[i] * half * jac);
            h.push_back(zonal_harmonic(n, l, th));
            dh.push_back(zonal_harmonic_derivative(n, l, th));
        }
    };
    const double step = std::numbers::pi / panels;
    for (int i = 0; i < panels; ++i) {
        const double a = i * step;
        const double b = a + step;
        add(a, b, t.w_whole, t.h_whole, t.dh_whole);
        add(a, 0.5 * (a + b), t.w_half, t.h_half, t.dh_half);
        add(0.5 * (a + b), b, t.w_half, t.h_half, t.dh_half);
    }
    return t;
}

QuadResult sphere_power(const ZonalTable& t, double p) {
    double whole = 0.0;
    double halves = 0.0;
    for (std::size_t i = 0; i < t.w_whole.size(); ++i) {
        whole += t.w_whole[i] * std::pow(std::abs(t.h_whole[i]), p);
    }
    for (std::size_t i = 0; i < t.w_half.size(); ++i) {
        halves += t.w_half[i] * std::pow(std::abs(t.h_half[i]), p);
    }
    return {halves, std::abs(whole - halves)};
}

constexpr int kZonalOrder = 16;
constexpr double kAssemblyRoundoff = 64.0 * DBL_EPSILON;
constexpr int kZonalPanels = 16;

// X_{k+1}(t)^j / j: the integral over (0, t D) of Y_k X_{k+1}^{j+1}(r/D) / r.
double log_tail(int k, double j, double t) {
    return std::pow(WeightStack::at(t, k + 1).x(k + 1), j) / j;
}

} // namespace

double FunctionalReport::value_at_depth(int j) const {
    if (j < 0 || j > cfg.k) {
        throw DepthError("depth outside the evaluated range");
    }
    const double coef = cfg.remainder_coefficient();
    double v = dirichlet - cfg.hardy_constant() * hardy;
    for (int i = 0; i < j; ++i) {
        v -= coef * remainder[i];
    }
    return v;
}

FunctionalReport FunctionalReport::assemble(const HardyConfig& cfg, double dirichlet,
                                            double hardy, std::vector<double> remainder,
                                            double err_est) {
    if (static_cast<int>(remainder.size()) != cfg.k) {
        throw PreconditionError("remainder count must equal k");
    }
    FunctionalReport r;
    r.cfg = cfg;
    r.dirichlet = dirichlet;
    r.hardy = hardy;
    r.remainder = std::move(remainder);
    r.value = r.value_at_depth(cfg.k);
    // The assembly is a difference of large terms; charge their rounding too.
    double magnitude = std::abs(dirichlet) + cfg.hardy_constant() * std::abs(hardy);
    for (double v : r.remainder) {
        magnitude += cfg.remainder_coefficient() * std::abs(v);
    }
    r.err_est = err_est + kAssemblyRoundoff * magnitude;
    return r;
}

namespace {

FunctionalReport assemble_from(const HardyConfig& cfg, const std::vector<QuadResult>& q,
                               double dir_scale, double rest_scale, double rest_err_rel,
                               const QuadResult* dir_override) {
    const double hc = cfg.hardy_constant();
    const double coef = cfg.remainder_coefficient();
    const QuadResult dir = dir_override ? *dir_override : q[0];
    double err = dir.err_est * dir_scale;
    const double hardy = q[1].value * rest_scale;
    err += hc * (q[1].err_est * rest_scale + std::abs(hardy) * rest_err_rel);
    std::vector<double> rem(cfg.k);
    for (int i = 0; i < cfg.k; ++i) {
        rem[i] = q[2 + i].value * rest_scale;
        err += coef * (q[2 + i].err_est * rest_scale + std::abs(rem[i]) * rest_err_rel);
    }
    return FunctionalReport::assemble(cfg, dir.value * dir_scale, hardy, std::move(rem), err);
}

} // namespace

FunctionalReport eval_Ik(const RadialProfile& u, const HardyConfig& cfg, const QuadOptions& opts) {
    check_profile(u, cfg);
    const int n = cfg.n;
    const double p = cfg.p;
    const int k = cfg.k;
    const auto q = integrate_radial_many(
        2 + k,
        [&](double r, std::span<double> out) {
            const WeightStack w = WeightStack::at(r / cfg.D, k);
            const double jac = std::pow(r, n - 1);
            out[0] = std::pow(std::abs(u.derivative(r)), p) * jac;
            const double hardy = std::pow(std::abs(u.value(r)) / r, p) * jac;
            out[1] = hardy;
            for (int i = 1; i <= k; ++i) {
                out[1 + i] = hardy * w.y(i) * w.y(i);
            }
        },
        u.mesh(opts));
    const double area = sphere_area(n);
    return assemble_from(cfg, q, area, area, 0.0, nullptr);
}

FunctionalReport eval_Ik(const SeparableProfile& u, const HardyConfig& cfg,
                         const QuadOptions& opts) {
    check_profile(u.radial, cfg);
    if (u.n != cfg.n) {
        throw PreconditionError("separable profile dimension differs from the configuration");
    }
    if (u.l >= 1 && !u.radial.vanishes_at_origin() &&
        std::abs(u.radial.value(0.0)) > 1e-12 * (1.0 + std::abs(u.radial.value(0.5 * cfg.R)))) {
        throw PreconditionError("a separable profile with l >= 1 must vanish at the origin");
    }
    const int n = cfg.n;
    const double p = cfg.p;
    const int k = cfg.k;
    const ZonalTable zt = make_zonal_table(n, u.l, kZonalOrder, kZonalPanels);
    const QuadResult hp = sphere_power(zt, p);

    // Index 0 holds the Dirichlet term with the sphere integral done inline,
    // index 2 + k its inner quadrature error.
    auto inner = [&](double a, double b, const std::vector<double>& w, const std::vector<double>& h,
                     const std::vector<double>& dh) {
        double s = 0.0;
        if (p == 2.0) {
            for (std::size_t i = 0; i < w.size(); ++i) {
                s += w[i] * (a * a * h[i] * h[i] + b * b * dh[i] * dh[i]);
            }
        } else {
            for (std::size_t i = 0; i < w.size(); ++i) {
                s += w[i] * std::pow(a * a * h[i] * h[i] + b * b * dh[i] * dh[i], 0.5 * p);
            }
        }
        return s;
    };
    const auto q = integrate_radial_many(
        3 + k,
        [&](double r, std::span<double> out) {
            const WeightStack w = WeightStack::at(r / cfg.D, k);
            const double jac = std::pow(r, n - 1);
            const double a = u.radial.derivative(r);
            const double b = u.radial.value(r) / r;
            const double whole = inner(a, b, zt.w_whole, zt.h_whole, zt.dh_whole);
            const double halves = inner(a, b, zt.w_half, zt.h_half, zt.dh_half);
            out[0] = halves * jac;
            const double hardy = std::pow(std::abs(b), p) * jac;
            out[1] = hardy;
            for (int i = 1; i <= k; ++i) {
                out[1 + i] = hardy * w.y(i) * w.y(i);
            }
            out[2 + k] = std::abs(whole - halves) * jac;
        },
        u.radial.mesh(opts));
    QuadResult dir = q[0];
    dir.err_est += q[2 + k].value;
    return assemble_from(cfg, q, 1.0, hp.value, hp.err_est / std::max(hp.value, 1e-300), &dir);
}

namespace {

QuadResult sobolev_integral(const RadialProfile& u, const HardyConfig& cfg, double eps,
                            const QuadOptions& opts) {
    check_profile(u, cfg);
    if (cfg.regime() != Regime::Subcritical) {
        throw RegimeError("the Sobolev right-hand side needs p < n");
    }
    if (!(eps >= 0.0)) {
        throw PreconditionError("eps must be nonnegative");
    }
    const double ps = cfg.critical_exponent();
    const double base = 1.0 + ps / cfg.p;
    const int k = cfg.k;
    const int n = cfg.n;
    return integrate_radial(
        [&](double r) {
            const WeightStack w = WeightStack::at(r / cfg.D, k + 1);
            return std::pow(std::abs(u.value(r)), ps) * std::pow(w.y(k), base) *
                   std::pow(w.x(k + 1), base * eps) * std::pow(r, n - 1);
        },
        u.mesh(opts));
}

QuadResult raise(const QuadResult& q, double e) {
    if (q.value <= 0.0) {
        return {0.0, std::pow(q.err_est, e)};
    }
    const double v = std::pow(q.value, e);
    return {v, v * e * q.err_est / q.value};
}

} // namespace

QuadResult rhs_sobolev(const RadialProfile& u, const HardyConfig& cfg, double eps,
                       const QuadOptions& opts) {
    QuadResult q = sobolev_integral(u, cfg, eps, opts);
    const double area = sphere_area(cfg.n);
    q.value *= area;
    q.err_est *= area;
    return raise(q, cfg.p / cfg.critical_exponent());
}

QuadResult rhs_sobolev(const SeparableProfile& u, const HardyConfig& cfg, double eps,
                       const QuadOptions& opts) {
    QuadResult q = sobolev_integral(u.radial, cfg, eps, opts);
    const ZonalTable zt = make_zonal_table(cfg.n, u.l, kZonalOrder, kZonalPanels);
    const QuadResult s = sphere_power(zt, cfg.critical_exponent());
    const QuadResult prod{q.value * s.value, q.err_est * s.value + std::abs(q.value) * s.err_est};
    return raise(prod, cfg.p / cfg.critical_exponent());
}

double rhs_holder(const RadialProfile& u, const HardyConfig& cfg, double eps,
                  const PairGridOptions& grid) {
    check_profile(u, cfg);
    if (cfg.regime() != Regime::Supercritical) {
        throw RegimeError("the Hoelder seminorm needs p > n");
    }
    if (!(eps >= 0.0)) {
        throw PreconditionError("eps must be nonnegative");
    }
    if (cfg.D < 2.0 * cfg.R) {
        throw PreconditionError("the Hoelder weight needs D at least the diameter");
    }
    const double alpha = 1.0 - cfg.n / cfg.p;
    const int k = cfg.k;
    const double inv_p = 1.0 / cfg.p;
    auto h = [&](double r1, double r2, double phi) {
        const double d2 = r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * std::cos(phi);
        const double d = std::sqrt(std::max(d2, 0.0));
        if (d == 0.0) {
            return 0.0;
        }
        const double diff = std::abs(u.value(r1) - u.value(r2));
        if (diff == 0.0) {
            return 0.0;
        }
        const WeightStack w = WeightStack::at(std::min(d / cfg.D, 1.0), k + 1);
        return diff * std::pow(d, -alpha) * std::pow(w.y(k), inv_p) *
               std::pow(w.x(k + 1), eps * inv_p);
    };
    return std::max(0.0, sup_over_pairs(h, cfg.R, grid).value);
}

double onepoint_sup(const RadialProfile& u, const HardyConfig& cfg) {
    check_profile(u, cfg);
    if (cfg.regime() != Regime::Supercritical) {
        throw RegimeError("the one-point estimate needs p > n");
    }
    const double e = cfg.n / cfg.p - 1.0;
    const double inv_p = 1.0 / cfg.p;
    auto g = [&](double log_r) {
        const double r = std::exp(log_r);
        const WeightStack w = WeightStack::at(std::min(r / cfg.D, 1.0), cfg.k + 1);
        return std::abs(u.value(r)) * std::pow(r, e) * std::pow(w.y(cfg.k + 1), inv_p);
    };
    constexpr int kPoints = 400;
    const double lo = std::log(1e-12 * cfg.R);
    const double hi = std::log(cfg.R);
    const double step = (hi - lo) / (kPoints - 1);
    int best = 0;
    double best_v = -1.0;
    for (int i = 0; i < kPoints; ++i) {
        const double v = g(lo + i * step);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    // Golden-section refinement on the bracketing cells.
    double a = lo + std::max(best - 1, 0) * step;
    double b = lo + std::min(best + 1, kPoints - 1) * step;
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double gc = g(c);
    double gd = g(d);
    for (int it = 0; it < 80; ++it) {
        if (gc > gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d);
        }
    }
    return std::max({best_v, gc, gd});
}

Margin verify_integral_bound(double alpha, double beta, double c, double r, double D, int k,
                             const QuadOptions& opts) {
    if (!(alpha > 0.0) || !(r > 0.0) || !(D >= r)) {
        throw PreconditionError("integral bound needs alpha > 0 and 0 < r <= D");
    }
    const GradedMesh mesh(r, opts);
    const QuadResult lhs = integrate_radial(
        [&](double t) { return std::pow(t, alpha - 1.0) * std::pow(eval_Y(k, t / D), -beta); },
        mesh);
    Margin m;
    m.lhs = lhs.value;
    m.rhs = c * std::pow(r, alpha) * std::pow(eval_Y(k, r / D), -beta);
    m.margin = m.rhs - m.lhs;
    m.err_est = lhs.err_est;
    return m;
}

Margin anilog_check(const RadialProfile& w, const HardyConfig& cfg, const QuadOptions& opts) {
    check_profile(w, cfg);
    const int k = cfg.k;
    const double p = cfg.p;
    const GradedMesh mesh = w.mesh(opts);
    const auto q = integrate_radial_many(
        2,
        [&](double r, std::span<double> out) {
            const WeightStack s = WeightStack::at(r / cfg.D, k + 1);
            const double x = s.x(k + 1);
            out[0] = std::pow(std::abs(w.value(r)), p) / r * s.y(k) * x * x;
            out[1] = std::pow(r, p - 1.0) * std::pow(std::abs(w.derivative(r)), p) *
                     std::pow(s.y(k), 1.0 - p) * std::pow(x, 2.0 - p);
        },
        mesh);
    const double area = sphere_area(cfg.n);
    Margin m;
    m.lhs = q[0].value;
    double err = q[0].err_est + std::pow(p, p) * q[1].err_est;
    if (mesh.has_tail()) {
        // Near the origin w is close to w(0) and the weight integrates in closed form.
        const double r_min = mesh.panels().front().first;
        const double weight = log_tail(k, 1.0, r_min / cfg.D);
        const double at_origin = std::pow(std::abs(w.value(0.0)), p);
        m.lhs += at_origin * weight;
        err += std::abs(std::pow(std::abs(w.value(r_min)), p) - at_origin) * weight;
    }
    m.lhs *= area;
    m.rhs = std::pow(p, p) * q[1].value * area;
    m.margin = m.rhs - m.lhs;
    m.err_est = err * area;
    return m;
}

Margin trace_inequality_check(const RadialProfile& v, const HardyConfig& cfg, double q, double s,
                              double gamma, double r, const QuadOptions& opts) {
    check_profile(v, cfg);
    if (!(q >= 1.0)) {
        throw PreconditionError("trace inequality needs q >= 1");
    }
    if (s == static_cast<double>(cfg.n)) {
        throw PreconditionError("trace inequality needs s != n");
    }
    if (gamma == 0.0) {
        throw PreconditionError("trace inequality needs gamma != 0");
    }
    if (!(r > 0.0 && r <= cfg.R)) {
        throw PreconditionError("ball radius must lie in (0, R]");
    }
    if (s >= cfg.n && v.support_lower() == 0.0) {
        throw PreconditionError("for s > n the profile must vanish near the origin");
    }
    const int n = cfg.n;
    const int k = cfg.k;
    const double ns = n - s;
    std::vector<double> bps;
    for (double b : v.breakpoints()) {
        if (b < r) {
            bps.push_back(b);
        }
    }
    const double lower = v.support_lower() < r ? v.support_lower() : 0.0;
    const GradedMesh mesh(r, opts, bps, lower);
    const auto res = integrate_radial_many(
        2,
        [&](double rho, std::span<double> out) {
            const WeightStack w = WeightStack::at(rho / cfg.D, k);
            const double yg = std::pow(w.y(k), gamma);
            const double jac = std::pow(rho, n - 1);
            out[0] = std::pow(std::abs(v.derivative(rho)), q) * std::pow(rho, q - s) * yg * jac;
            out[1] = std::pow(std::abs(v.value(rho)), q) * std::pow(rho, -s) * yg *
                     (1.0 + gamma * q * w.z(k) / ns) * jac;
        },
        mesh);
    const double area = sphere_area(n);
    const double trace = q / ns * std::pow(std::abs(v.value(r)), q) * std::pow(r, ns) *
                         std::pow(eval_Y(k, r / cfg.D), gamma) * area;
    Margin m;
    m.lhs = std::pow(std::abs(q / ns), q) * res[0].value * area + trace;
    m.rhs = res[1].value * area;
    m.margin = m.lhs - m.rhs;
    m.err_est = (std::pow(std::abs(q / ns), q) * res[0].err_est + res[1].err_est) * area;
    return m;
}

Margin local_estimate_check(const RadialProfile& u, const HardyConfig& cfg, double q, double r,
                            const QuadOptions& opts) {
    check_profile(u, cfg);
    if (cfg.p < 2.0) {
        throw RegimeError("the local estimate needs p >= 2");
    }
    if (!(q >= 1.0 && q < cfg.p)) {
        throw PreconditionError("the local estimate needs 1 <= q < p");
    }
    if (!(r > 0.0 && r <= cfg.R)) {
        throw PreconditionError("ball radius must lie in (0, R]");
    }
    if (q >= cfg.n && !u.vanishes_at_origin()) {
        throw PreconditionError("for q >= n the profile must vanish at the origin");
    }
    const int n = cfg.n;
    const int k = cfg.k;
    const double factor = q * q / (n * (cfg.p - q));
    std::vector<double> bps;
    for (double b : u.breakpoints()) {
        if (b < r) {
            bps.push_back(b);
        }
    }
    const double lower = u.support_lower() < r ? u.support_lower() : 0.0;
    const QuadResult lhs = integrate_radial(
        [&](double rho) {
            const double z = eval_Z(k, rho / cfg.D);
            return std::pow(std::abs(u.value(rho)) / rho, q) * (1.0 - factor * z) *
                   std::pow(rho, n - 1);
        },
        GradedMesh(r, opts, bps, lower));
    const FunctionalReport ik = eval_Ik(u, cfg, opts);
    const double area = sphere_area(n);
    Margin m;
    m.lhs = lhs.value * area;
    const double scale =
        std::pow(r, n * (1.0 - q / cfg.p)) * std::pow(eval_Y(k + 1, r / cfg.D), -q / cfg.p);
    const double ikp = std::max(ik.value, 0.0);
    m.rhs = scale * std::pow(ikp, q / cfg.p);
    m.margin = m.rhs - m.lhs;
    m.err_est = lhs.err_est * area +
                (ikp > 0.0 ? scale * q / cfg.p * std::pow(ikp, q / cfg.p - 1.0) * ik.err_est : 0.0);
    return m;
}

Margin onepoint_check(const RadialProfile& u, const HardyConfig& cfg, const QuadOptions& opts) {
    const FunctionalReport ik = eval_Ik(u, cfg, opts);
    Margin m;
    m.lhs = onepoint_sup(u, cfg);
    const double ikp = std::max(ik.value, 0.0);
    m.rhs = std::pow(ikp, 1.0 / cfg.p);
    m.margin = m.rhs - m.lhs;
    m.err_est = ikp > 0.0 ? m.rhs / cfg.p * ik.err_est / ikp : 0.0;
    return m;
}

} // namespace hardylab
