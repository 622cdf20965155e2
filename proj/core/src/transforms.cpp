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

#include "hardylab/transforms.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "hardylab/errors.hpp"
#include "hardylab/logweights.hpp"
#include "hardylab/random.hpp"

namespace hardylab {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// R3(x) / x^3 with R3(x) = (1 - x)^{-alpha} - 1 - alpha x - alpha (alpha + 1) x^2 / 2.
double r3_over_x3(double alpha, double x) {
    if (std::abs(x) < 1e-2) {
        double c = alpha * (alpha + 1.0) * (alpha + 2.0) / 6.0;
        double xp = 1.0;
        double sum = 0.0;
        for (int j = 3; j < 60; ++j) {
            const double term = c * xp;
            sum += term;
            if (std::abs(term) <= 1e-18 * std::abs(sum)) {
                break;
            }
            c *= (alpha + j) / (j + 1.0);
            xp *= x;
        }
        return sum;
    }
    const double r3 = std::pow(1.0 - x, -alpha) - (1.0 + alpha * x + 0.5 * alpha * (alpha + 1.0) * x * x);
    return r3 / (x * x * x);
}

// ((1 - x)^alpha - 1) / x.
double gm1_over_x(double alpha, double x) {
    if (x == 0.0) {
        return -alpha;
    }
    return std::expm1(alpha * std::log1p(-x)) / x;
}

double log_sum_exp(const double* v, int count) {
    double m = kNegInf;
    for (int i = 0; i < count; ++i) {
        m = std::max(m, v[i]);
    }
    if (m == kNegInf || std::isinf(m)) {
        return m;
    }
    double s = 0.0;
    for (int i = 0; i < count; ++i) {
        s += std::exp(v[i] - m);
    }
    return m + std::log(s);
}

// rho / Y_k^2 for a = 0 and k >= 1 from log X_1 .. log X_k. All products are
// formed in logarithms, so neither Y_k underflowing nor Y_i / Y_k overflowing
// breaks the evaluation.
double scaled_residual_from_logs(const HardyConfig& cfg, const double* logx) {
    const int k = cfg.k;
    if (k == 0) {
        return 0.0;
    }
    const double p = cfg.p;
    const double h = cfg.h();
    const double alpha = p - 2.0;
    std::array<double, kMaxDepth + 2> log_y{};
    std::array<double, kMaxDepth + 2> log_ratio{};
    std::array<double, kMaxDepth + 2> log_ratio2{};
    double acc = 0.0;
    for (int i = 1; i <= k; ++i) {
        acc += logx[i];
        log_y[i - 1] = acc;
    }
    // log(Y_i / Y_k) = -sum_{j > i} log X_j.
    double tail = 0.0;
    for (int i = k; i >= 1; --i) {
        log_ratio[i - 1] = tail;
        log_ratio2[i - 1] = 2.0 * tail;
        tail -= logx[i];
    }
    const double log_z = log_sum_exp(log_y.data(), k);
    if (log_z == kNegInf) {
        return 0.0;
    }
    const double log_ph = std::log(p * std::abs(h));
    const double log_abs_x = log_z - log_ph;
    const double sgn = h > 0.0 ? 1.0 : -1.0;
    const double x = sgn * std::exp(log_abs_x);
    const double log_s1 = log_sum_exp(log_ratio.data(), k);
    const double log_s2 = log_sum_exp(log_ratio2.data(), k);
    if (!std::isfinite(log_s1) || !std::isfinite(log_s2)) {
        throw UnderflowError("weight ratios are not representable at this point");
    }
    const double g = std::pow(1.0 - x, alpha);
    // x^3 / Y_k^2 and x lambda / Y_k^2.
    const double x3_y2 = sgn * std::exp(2.0 * (log_s1 - log_ph) + log_abs_x);
    const double xl_y2 = sgn * (p - 1.0) / (2.0 * p) * std::exp(log_s2 + log_abs_x);
    const double bracket =
        -h * h * g * r3_over_x3(alpha, x) * x3_y2 + xl_y2 * gm1_over_x(alpha, x);
    return std::pow(std::abs(h), p - 2.0) * bracket;
}

double residual_direct(const HardyConfig& cfg, double a, const WeightStack& w) {
    const double p = cfg.p;
    const double h = cfg.h();
    const int k = cfg.k;
    const double x1 = w.x(1);
    const double den = 1.0 - a * x1;
    const double A = h - w.z(k) / p - a * x1 * x1 / den;
    const double F = 2.0 * a * x1 * x1 * x1 / den + a * a * x1 * x1 * x1 * x1 / (den * den);
    const double B = p * h * A - (p - 1.0) * A * A +
                     (p - 1.0) / (2.0 * p) * (w.z(k) * w.z(k) + w.sum_y2(k)) + (p - 1.0) * F;
    const double K = std::pow(std::abs(h), p) +
                     (p - 1.0) / (2.0 * p) * std::pow(std::abs(h), p - 2.0) * w.sum_y2(k);
    return std::pow(std::abs(A), p - 2.0) * B - K;
}

void check_radius(const HardyConfig& cfg, double r) {
    if (!(r > 0.0) || r > cfg.R * (1.0 + 1e-12)) {
        throw DomainError("radius must lie in (0, R]");
    }
}

} // namespace

GroundState::GroundState(const HardyConfig& cfg, std::optional<double> a)
    : cfg_(cfg), a_(a.value_or(default_a(cfg.p))) {
    cfg_.validate();
    if (!(a_ >= 0.0)) {
        throw PreconditionError("ground state parameter a must be nonnegative");
    }
    const double x1 = eval_X(1, std::min(cfg_.R / cfg_.D, 1.0));
    const double gap = 1.0 - a_ * x1;
    if (cfg_.p < 2.0 && gap < 2.0 - cfg_.p) {
        throw PreconditionError("1 - a X_1(R/D) >= 2 - p fails; D is too small for this a");
    }
    if (!(gap > 0.0)) {
        throw PreconditionError("1 - a X_1 must stay positive on the domain");
    }
}

double eval_f(const GroundState& gs, double r) {
    const HardyConfig& c = gs.config();
    check_radius(c, r);
    const WeightStack w = WeightStack::at(std::min(r / c.D, 1.0), std::max(c.k, 1));
    const double sgn = c.p < c.n ? 1.0 : -1.0;
    return sgn * std::pow(r, 1.0 - c.n / c.p) * std::pow(w.y(c.k), -1.0 / c.p) *
           (1.0 - gs.a() * w.x(1));
}

double eval_f_derivative(const GroundState& gs, double r) {
    return eval_f(gs, r) * eval_A(gs, std::min(r / gs.config().D, 1.0)) / r;
}

double eval_A(const GroundState& gs, double t) {
    const HardyConfig& c = gs.config();
    const WeightStack w = WeightStack::at(t, std::max(c.k, 1));
    const double x1 = w.x(1);
    return c.h() - w.z(c.k) / c.p - gs.a() * x1 * x1 / (1.0 - gs.a() * x1);
}

RadialProfile ground_state_split(const RadialProfile& u, const GroundState& gs) {
    const HardyConfig& c = gs.config();
    if (std::abs(u.radius() - c.R) > 1e-12 * c.R) {
        throw PreconditionError("profile radius differs from the domain radius");
    }
    const double origin = c.R * 1e-300;
    RadialProfile::Definition s;
    s.R = c.R;
    s.value = [u, gs, origin](double r) {
        r = std::max(r, origin);
        return u.value(r) / eval_f(gs, r);
    };
    s.derivative = [u, gs, origin](double r) {
        r = std::max(r, origin);
        const double f = eval_f(gs, r);
        const double A = eval_A(gs, std::min(r / gs.config().D, 1.0));
        return u.derivative(r) / f - u.value(r) * A / (r * f);
    };
    s.breakpoints = u.breakpoints();
    s.support_lower = u.support_lower();
    s.vanishes_at_origin = c.p < c.n || u.support_lower() > 0.0;
    s.label = u.label() + "/f";
    return RadialProfile(std::move(s));
}

RadialProfile quasi_extremal(const HardyConfig& cfg, double delta) {
    cfg.validate();
    if (!(delta > 0.0 && delta < 0.5 * cfg.R)) {
        throw PreconditionError("quasi-extremal cutoff needs 0 < delta < R/2");
    }
    const GroundState gs(cfg, 0.0);
    const RadialProfile eta = smooth_window(cfg.R, 0.5 * delta, delta, 0.5 * cfg.R, cfg.R);
    RadialProfile::Definition s;
    s.R = cfg.R;
    s.value = [gs, eta](double r) {
        const double e = eta.value(r);
        return e == 0.0 ? 0.0 : eval_f(gs, r) * e;
    };
    s.derivative = [gs, eta](double r) {
        if (r < eta.support_lower() || r >= eta.radius()) {
            return 0.0;
        }
        const double f = eval_f(gs, r);
        const double A = eval_A(gs, std::min(r / gs.config().D, 1.0));
        return f * (A / r * eta.value(r) + eta.derivative(r));
    };
    s.breakpoints = eta.breakpoints();
    s.support_lower = eta.support_lower();
    s.vanishes_at_origin = true;
    s.label = "quasi_extremal";
    return RadialProfile(std::move(s));
}

namespace {
double balance_residual(const GroundState& gs, double r);
} // namespace

double supersolution_residual(const GroundState& gs, double r) {
    const HardyConfig& c = gs.config();
    if (!(r > 0.0) || !(r < c.R)) {
        throw DomainError("residual is evaluated on the open interval (0, R)");
    }
    // sgn f = sgn(n - p), so dividing by |f|^{p-1} instead of |f|^{p-2} f flips p > n.
    return (c.n > c.p ? 1.0 : -1.0) * balance_residual(gs, r);
}

namespace {

// |A|^{p-2} B - |h|^p - (p-1)/(2p) |h|^{p-2} sum Y_i^2.
double balance_residual(const GroundState& gs, double r) {
    const HardyConfig& c = gs.config();
    const int depth = std::max(c.k, 1);
    const WeightStack w = WeightStack::at(r / c.D, depth);
    if (gs.a() == 0.0) {
        if (c.k == 0) {
            return 0.0;
        }
        std::array<double, kMaxDepth + 2> logx{};
        for (int i = 1; i <= c.k; ++i) {
            logx[i] = std::log(w.x(i));
        }
        const double y = w.y(c.k);
        return scaled_residual_from_logs(c, logx.data()) * y * y;
    }
    const double p = c.p;
    const double h = c.h();
    const double t = w.z(c.k) / p;
    const double x1 = w.x(1);
    const double s = gs.a() * x1 * x1 / (1.0 - gs.a() * x1);
    const double x = (t + s) / h;
    if (!(1.0 - x > 0.0)) {
        return residual_direct(c, gs.a(), w);
    }
    const double alpha = p - 2.0;
    const double g = std::pow(1.0 - x, alpha);
    const double lambda = (p - 1.0) / (2.0 * p) * w.sum_y2(c.k);
    const double bracket = -h * h * g * r3_over_x3(alpha, x) * x * x * x +
                           lambda * gm1_over_x(alpha, x) * x +
                           g * (p - 1.0) * (s * (2.0 * x1 - p * t) + s * s * (1.0 - 0.5 * p));
    return std::pow(std::abs(h), p - 2.0) * bracket;
}

} // namespace

EmdenFowlerMap::EmdenFowlerMap(const HardyConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    tau0_ = 1.0 / eval_X(cfg_.k + 1, std::min(cfg_.R / cfg_.D, 1.0));
}

double EmdenFowlerMap::forward(double r) const {
    check_radius(cfg_, r);
    return 1.0 / eval_X(cfg_.k + 1, std::min(r / cfg_.D, 1.0));
}

double EmdenFowlerMap::inverse(double tau) const {
    if (!(tau >= tau0_ * (1.0 - 1e-12))) {
        throw DomainError("tau must be at least tau0");
    }
    return cfg_.D * eval_F(cfg_.k + 1, std::min(1.0 / tau, 1.0));
}

double EmdenFowlerMap::inverse_or_zero(double tau) const {
    if (!(tau >= tau0_ * (1.0 - 1e-12))) {
        throw DomainError("tau must be at least tau0");
    }
    double s = std::min(1.0 / tau, 1.0);
    for (int i = 0; i <= cfg_.k && s > 0.0; ++i) {
        s = std::exp(1.0 - 1.0 / s);
    }
    return cfg_.D * s;
}

double EmdenFowlerMap::dtau_dr(double r) const {
    check_radius(cfg_, r);
    return -eval_Y(cfg_.k, std::min(r / cfg_.D, 1.0)) / r;
}

QuotientPair quotient_pair(const RadialProfile& v, const HardyConfig& cfg, const QuadOptions& opts) {
    cfg.validate();
    if (cfg.regime() != Regime::Subcritical) {
        throw RegimeError("the weighted quotient needs p < n");
    }
    const double p = cfg.p;
    const double ps = cfg.critical_exponent();
    const int k = cfg.k;
    const double area = sphere_area(cfg.n);

    // Radius side. Below r_min the denominator tail is added analytically and
    // the numerator, whose integrand is r^{p-1} |v'|^p up to log factors, is
    // bounded by r_min times twice its value there.
    const double r_min = v.support_lower() > 0.0 ? v.support_lower() : opts.r_min_ratio * cfg.R;
    const GradedMesh mesh(cfg.R, opts, v.breakpoints(), r_min);
    auto radial_integrands = [&](double r, std::span<double> out) {
        const WeightStack w = WeightStack::at(std::min(r / cfg.D, 1.0), k + 1);
        const double x = w.x(k + 1);
        out[0] = std::pow(r, p - 1.0) * std::pow(std::abs(v.derivative(r)), p) *
                 std::pow(w.y(k + 1), 2.0 - p) / w.y(k);
        out[1] = std::pow(std::abs(v.value(r)), ps) * w.y(k) * std::pow(x, 1.0 + ps / p) / r;
    };
    const auto qr = integrate_radial_many(2, radial_integrands, mesh);
    double num_r = qr[0].value;
    double num_err = qr[0].err_est;
    double den_r = qr[1].value;
    double den_err = qr[1].err_est;
    if (v.support_lower() == 0.0) {
        double at_min[2];
        radial_integrands(r_min, at_min);
        num_err += 2.0 * r_min * at_min[0];
        const double x = eval_X(k + 1, r_min / cfg.D);
        const double weight = std::pow(x, ps / p) / (ps / p);
        const double v0 = std::pow(std::abs(v.value(0.0)), ps);
        den_r += v0 * weight;
        den_err += std::abs(std::pow(std::abs(v.value(r_min)), ps) - v0) * weight;
    }
    if (!(den_r > 0.0)) {
        throw PreconditionError("quotient denominator vanishes");
    }

    // Emden-Fowler side.
    const EmdenFowlerMap map(cfg);
    const double tau0 = map.tau0();
    auto w_of = [&](double tau, double& dw) {
        const double r = map.inverse_or_zero(tau);
        if (r == 0.0) {
            dw = 0.0;
            return v.value(0.0);
        }
        const double y = eval_Y(k, std::min(r / cfg.D, 1.0));
        dw = -v.derivative(r) * r / y;
        return v.value(r);
    };
    std::vector<double> edges{0.0};
    for (double e = 1.0 / 64.0; e < 1e12; e *= 2.0) {
        edges.push_back(e);
    }
    for (double& e : edges) {
        e += tau0;
    }
    // Kinks and steep transitions of v map to these points.
    for (double b : v.breakpoints()) {
        if (b > 0.0 && b < cfg.R) {
            edges.push_back(map.forward(b));
        }
    }
    if (v.support_lower() > 0.0) {
        edges.push_back(map.forward(v.support_lower()));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double a, double b) { return b - a <= 1e-12 * b; }),
                edges.end());
    QuadOptions tau_opts = opts;
    tau_opts.splits = std::max(opts.splits, 2);
    const auto qt = integrate_radial_many(
        2,
        [&](double tau, std::span<double> out) {
            double dw = 0.0;
            const double w = w_of(tau, dw);
            out[0] = std::pow(tau, p - 2.0) * std::pow(std::abs(dw), p);
            out[1] = std::pow(tau, -1.0 - ps / p) * std::pow(std::abs(w), ps);
        },
        GradedMesh::from_edges(edges, tau_opts));
    const double tau_end = edges.back();
    const double den_t =
        qt[1].value + std::pow(std::abs(v.value(0.0)), ps) * std::pow(tau_end, -ps / p) / (ps / p);

    QuotientPair out;
    const double e = p / ps;
    out.numerator = num_r * area;
    out.denominator = std::pow(den_r * area, e);
    out.q_r = out.numerator / out.denominator;
    out.q_tau = qt[0].value * area / std::pow(den_t * area, e);
    out.err_est = out.q_r * (num_err / std::max(num_r, DBL_MIN) + e * den_err / den_r);
    return out;
}

TauProfile sine_bump_in_tau(const HardyConfig& cfg, double tau_end) {
    const double tau0 = EmdenFowlerMap(cfg).tau0();
    if (!(tau_end > tau0)) {
        throw PreconditionError("tau_end must exceed tau0");
    }
    const double len = tau_end - tau0;
    TauProfile t;
    t.tau0 = tau0;
    t.tau_end = tau_end;
    t.w = [tau0, len](double tau) {
        const double s = std::sin(std::numbers::pi * (tau - tau0) / len);
        return s * s;
    };
    t.dw = [tau0, len](double tau) {
        const double a = std::numbers::pi * (tau - tau0) / len;
        return std::numbers::pi / len * std::sin(2.0 * a);
    };
    return t;
}

namespace {

// (|1 + x|^p - 1 - p x) / x^2.
double psi(double p, double x) {
    if (std::abs(x) < 1e-3) {
        return p * (p - 1.0) / 2.0 + p * (p - 1.0) * (p - 2.0) / 6.0 * x +
               p * (p - 1.0) * (p - 2.0) * (p - 3.0) / 24.0 * x * x;
    }
    return (std::pow(std::abs(1.0 + x), p) - 1.0 - p * x) / (x * x);
}

struct TauWeights {
    std::array<double, kMaxDepth + 2> x{};
    std::array<double, kMaxDepth + 2> logx{};
    double y = 1.0;   // Y_k
    double z = 0.0;   // Z_k
};

TauWeights tau_weights(int k, double tau) {
    TauWeights t;
    t.x[k + 1] = 1.0 / tau;
    t.logx[k + 1] = -std::log(tau);
    for (int j = k; j >= 1; --j) {
        t.logx[j] = 1.0 - 1.0 / t.x[j + 1];
        t.x[j] = std::exp(t.logx[j]);
    }
    double y = 1.0;
    for (int j = 1; j <= k; ++j) {
        y *= t.x[j];
        t.z += y;
    }
    t.y = y;
    return t;
}

GradedMesh tau_mesh(const TauProfile& w, const QuadOptions& opts) {
    QuadOptions o = opts;
    o.splits = std::max(o.splits, 16);
    o.r_min_ratio = std::max(o.r_min_ratio, 1e-9);
    return GradedMesh(w.tau_end - w.tau0, o);
}

void check_tau_profile(const HardyConfig& cfg, const TauProfile& w) {
    cfg.validate();
    if (!w.w || !w.dw || !(w.tau_end > w.tau0)) {
        throw PreconditionError("tau profile needs w, dw and tau_end > tau0");
    }
}

} // namespace

QuadResult ik_in_tau(const HardyConfig& cfg, const TauProfile& w, const QuadOptions& opts) {
    check_tau_profile(cfg, w);
    const double p = cfg.p;
    const double h = cfg.h();
    const int k = cfg.k;
    QuadResult q = integrate_radial(
        [&](double y) {
            const double tau = w.tau0 + y;
            const TauWeights tw = tau_weights(k, tau);
            const double v = w.w(tau);
            const double dv = w.dw(tau);
            const double A = h - tw.z / p;
            double kinetic = 0.0;
            if (v == 0.0) {
                kinetic = std::pow(std::abs(dv), p) * std::pow(tw.y, p - 2.0);
            } else {
                const double ratio = dv / (A * v);
                kinetic = std::pow(std::abs(v * A), p) * ratio * ratio * psi(p, -tw.y * ratio);
            }
            const double potential =
                k == 0 ? 0.0 : std::pow(std::abs(v), p) * scaled_residual_from_logs(cfg, tw.logx.data());
            return kinetic + potential;
        },
        tau_mesh(w, opts));
    const double area = sphere_area(cfg.n);
    q.value *= area;
    q.err_est *= area;
    return q;
}

QuadResult sobolev_in_tau(const HardyConfig& cfg, const TauProfile& w, double eps,
                          const QuadOptions& opts) {
    check_tau_profile(cfg, w);
    const double ps = cfg.critical_exponent();
    const double m = (1.0 + ps / cfg.p) * eps;
    QuadResult q = integrate_radial(
        [&](double y) {
            const double tau = w.tau0 + y;
            return std::pow(tau, -m) * std::pow(std::abs(w.w(tau)), ps);
        },
        tau_mesh(w, opts));
    const double area = sphere_area(cfg.n);
    q.value *= area;
    q.err_est *= area;
    return q;
}

double onepoint_in_tau(const HardyConfig& cfg, const TauProfile& w, double eps) {
    check_tau_profile(cfg, w);
    const double e = eps / cfg.p;
    auto g = [&](double tau) { return std::abs(w.w(tau)) * std::pow(tau, -e); };
    constexpr int kPoints = 4001;
    const double step = (w.tau_end - w.tau0) / (kPoints - 1);
    int best = 0;
    double best_v = -1.0;
    for (int i = 0; i < kPoints; ++i) {
        const double v = g(w.tau0 + i * step);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    double a = w.tau0 + std::max(best - 1, 0) * step;
    double b = w.tau0 + std::min(best + 1, kPoints - 1) * step;
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

RadialProfile tau_profile_to_radial(const HardyConfig& cfg, const TauProfile& w) {
    check_tau_profile(cfg, w);
    const EmdenFowlerMap map(cfg);
    const double delta = map.inverse(w.tau_end);
    const GroundState gs(cfg, 0.0);
    RadialProfile::Definition s;
    s.R = cfg.R;
    s.value = [=](double r) {
        if (r <= delta || r >= cfg.R) {
            return 0.0;
        }
        return eval_f(gs, r) * w.w(map.forward(r));
    };
    s.derivative = [=](double r) {
        if (r <= delta || r >= cfg.R) {
            return 0.0;
        }
        const double f = eval_f(gs, r);
        const double A = eval_A(gs, std::min(r / cfg.D, 1.0));
        const double tau = map.forward(r);
        return f * (A / r * w.w(tau) + w.dw(tau) * map.dtau_dr(r));
    };
    s.support_lower = delta;
    s.vanishes_at_origin = true;
    s.label = "tau_profile";
    return RadialProfile(std::move(s));
}

namespace {

double norm(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) {
        s += v * v;
    }
    return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

struct PairSample {
    double na = 0.0;   // |a|
    double nb = 0.0;   // |b|
    double nab = 0.0;  // |a + b|
    double ab = 0.0;   // a.b
};

PairSample draw_pair(Rng& rng) {
    const int d = rng.integer(1, 5);
    std::vector<double> a(d);
    std::vector<double> b(d);
    const double sa = std::exp(rng.uniform(-3.0, 3.0));
    const double sb = std::exp(rng.uniform(-3.0, 3.0));
    for (int i = 0; i < d; ++i) {
        a[i] = sa * rng.normal();
        b[i] = sb * rng.normal();
    }
    const double mode = rng.uniform();
    if (mode < 0.2) {
        // Nearly antiparallel pairs, where the constants are decided.
        const double t = rng.uniform(0.0, 3.0);
        for (int i = 0; i < d; ++i) {
            b[i] = -t * a[i] + 1e-3 * sb * rng.normal();
        }
    } else if (mode < 0.25) {
        std::fill(a.begin(), a.end(), 0.0);
    }
    std::vector<double> s(d);
    for (int i = 0; i < d; ++i) {
        s[i] = a[i] + b[i];
    }
    return {norm(a), norm(b), norm(s), dot(a, b)};
}

// |a+b|^p - |a|^p - p |a|^{p-2} a.b.
double excess(double p, const PairSample& s) {
    const double lin = s.na > 0.0 ? p * std::pow(s.na, p - 2.0) * s.ab : 0.0;
    return std::pow(s.nab, p) - std::pow(s.na, p) - lin;
}

double reduced_ratio(double p, bool second, double log_rho, double theta) {
    const double rho = std::exp(log_rho);
    const double bx = rho * std::cos(theta);
    const double by = rho * std::sin(theta);
    const double nab = std::hypot(1.0 + bx, by);
    const double ex = std::pow(nab, p) - 1.0 - p * bx;
    return second ? ex / (rho * rho) : ex / std::pow(rho, p);
}

} // namespace

VectorInequalityReport vector_inequality_margin(double p, std::size_t trials, std::uint64_t seed) {
    if (!(p > 1.0) || trials < 1) {
        throw PreconditionError("vector inequality needs p > 1 and at least one trial");
    }
    VectorInequalityReport rep;
    rep.p = p;
    rep.trials = trials;
    rep.c_first = std::numeric_limits<double>::infinity();
    rep.c_second = std::numeric_limits<double>::infinity();
    rep.l_constant = 3.0 * p * (p - 1.0) / 16.0;
    rep.l_margin_min = std::numeric_limits<double>::infinity();
    Rng rng(seed);
    for (std::size_t i = 0; i < trials; ++i) {
        const PairSample s = draw_pair(rng);
        if (s.nb == 0.0) {
            continue;
        }
        const double ex = excess(p, s);
        if (p >= 2.0) {
            rep.c_first = std::min(rep.c_first, ex / std::pow(s.nb, p));
            if (s.na > 0.0) {
                rep.c_second = std::min(rep.c_second, ex / (std::pow(s.na, p - 2.0) * s.nb * s.nb));
            }
        } else {
            const double scale = s.na + s.nb;
            const double m =
                (ex - rep.l_constant * s.nb * s.nb * std::pow(scale, p - 2.0)) / std::pow(scale, p);
            rep.l_margin_min = std::min(rep.l_margin_min, m);
            if (m < 0.0) {
                ++rep.l_violations;
            }
        }
    }
    return rep;
}

double calibrate_vector_constant(double p, bool second) {
    if (!(p >= 2.0)) {
        throw PreconditionError("constant calibration needs p >= 2");
    }
    constexpr int kRho = 321;
    constexpr int kTheta = 181;
    double best = std::numeric_limits<double>::infinity();
    double bl = 0.0;
    double bt = 0.0;
    for (int i = 0; i < kRho; ++i) {
        const double lr = -8.0 + 16.0 * i / (kRho - 1);
        for (int j = 0; j < kTheta; ++j) {
            const double th = std::numbers::pi * j / (kTheta - 1);
            const double v = reduced_ratio(p, second, lr, th);
            if (v < best) {
                best = v;
                bl = lr;
                bt = th;
            }
        }
    }
    // Compass search from the best grid point.
    double step = 0.05;
    while (step > 1e-13) {
        bool moved = false;
        const std::array<std::pair<double, double>, 4> dirs{
            {{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}};
        for (const auto& [dl, dt] : dirs) {
            const double th = std::clamp(bt + dt, 0.0, std::numbers::pi);
            const double v = reduced_ratio(p, second, bl + dl, th);
            if (v < best) {
                best = v;
                bl += dl;
                bt = th;
                moved = true;
            }
        }
        if (!moved) {
            step *= 0.5;
        }
    }
    return best;
}

double vector_inequality_check(double p, bool second, double c, std::size_t trials,
                               std::uint64_t seed) {
    if (!(p >= 2.0) || trials < 1) {
        throw PreconditionError("vector inequality check needs p >= 2 and trials >= 1");
    }
    Rng rng(seed);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < trials; ++i) {
        const PairSample s = draw_pair(rng);
        const double scale = s.na + s.nb;
        if (scale == 0.0) {
            continue;
        }
        const double term = second ? c * std::pow(s.na, p - 2.0) * s.nb * s.nb : c * std::pow(s.nb, p);
        worst = std::min(worst, (excess(p, s) - term) / std::pow(scale, p));
    }
    return worst;
}

} // namespace hardylab
