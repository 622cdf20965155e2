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

// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria (capped at 1).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hardylab/errors.hpp"
#include "hardylab/functionals.hpp"
#include "hardylab/logweights.hpp"
#include "hardylab/probes.hpp"
#include "hardylab/transforms.hpp"

namespace {

using namespace hardylab;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) {
        g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (points - 1));
    }
    return g;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

struct NP {
    int n;
    double p;
};

const std::vector<NP> kPositivityConfigs = {{3, 2.0}, {5, 3.0}, {2, 1.5}, {3, 6.0}, {2, 4.0}};

Outcome weight_calculus() {
    double worst_fd = 0.0;
    for (int k = 1; k <= 8; ++k) {
        for (double t : log_grid(1e-6, 1.0 - 1e-6, 200)) {
            const double h = 1e-6 * t;
            if (t + h > 1.0) {
                continue;
            }
            const WeightDerivatives d = eval_derivatives(k, t);
            const double fx = (eval_X(k, t + h) - eval_X(k, t - h)) / (2.0 * h);
            const double fy = (eval_Y(k, t + h) - eval_Y(k, t - h)) / (2.0 * h);
            const double fz = (eval_Z(k, t + h) - eval_Z(k, t - h)) / (2.0 * h);
            worst_fd = std::max({worst_fd, std::abs(fx / d.dX - 1.0), std::abs(fy / d.dY - 1.0),
                                 std::abs(fz / d.dZ - 1.0)});
        }
    }
    bool z_exact = true;
    for (int k = 0; k <= kMaxDepth; ++k) {
        z_exact = z_exact && eval_Z(k, 1.0) == static_cast<double>(k);
    }
    // F_i(s) leaves the normal range quickly as i grows; those points are skipped.
    double worst_inv = 0.0;
    std::size_t checked = 0;
    for (int i = 1; i <= 8; ++i) {
        for (double s : log_grid(1e-3, 1.0, 200)) {
            double t = 0.0;
            try {
                t = eval_F(i, s);
            } catch (const UnderflowError&) {
                continue;
            }
            worst_inv = std::max(worst_inv, std::abs(eval_X(i, t) - s) / s);
            ++checked;
        }
    }
    Outcome o;
    o.pass = worst_fd <= 1e-6 && z_exact && worst_inv <= 1e-12 && checked > 0;
    o.detail = "max FD rel err " + fmt("%.2e", worst_fd) + ", Z_k(1)=k " + (z_exact ? "exact" : "INEXACT") +
               ", inverse rel err " + fmt("%.2e", worst_inv) + " over " + std::to_string(checked) +
               " representable points";
    return o;
}

Outcome p2_oracle() {
    double worst_res = 0.0;
    for (int n : {3, 4, 5}) {
        for (int k = 0; k <= 4; ++k) {
            const HardyConfig cfg = HardyConfig::with_multiplier(n, 2.0, k, kDefaultMultiplier);
            const GroundState gs(cfg);
            for (double r : residual_grid(cfg)) {
                worst_res = std::max(worst_res, std::abs(supersolution_residual(gs, r)));
            }
        }
    }
    // I_k[u] equals the energy of v = u / f in the weight |x|^{2-n} Y_k^{-1}.
    const std::vector<std::pair<double, double>> shapes = {{1, 1}, {1, 2}, {1, 3}, {2, 1}, {2, 2},
                                                           {2, 3}, {3, 2}, {4, 1}, {4, 2}, {4, 3}};
    const std::vector<std::pair<int, int>> configs = {{3, 0}, {3, 1}, {4, 2}, {5, 3}};
    double worst_energy = 0.0;
    for (const auto& [m, s] : shapes) {
        const RadialProfile u = polynomial_bump(1.0, m, s);
        for (const auto& [n, k] : configs) {
            const HardyConfig cfg = HardyConfig::with_multiplier(n, 2.0, k, kDefaultMultiplier);
            const double ik = eval_Ik(u, cfg).value;
            const double energy = quotient_pair(ground_state_split(u, GroundState(cfg)), cfg).numerator;
            worst_energy = std::max(worst_energy, std::abs(energy / ik - 1.0));
        }
    }
    Outcome o;
    o.pass = worst_res <= 1e-10 && worst_energy <= 1e-8;
    o.detail = "max |residual| " + fmt("%.2e", worst_res) + ", energy identity rel err " +
               fmt("%.2e", worst_energy);
    return o;
}

Outcome positivity() {
    std::size_t failures = 0;
    std::size_t count = 0;
    double worst = 1e300;
    for (const NP& c : kPositivityConfigs) {
        for (int k = 0; k <= 3; ++k) {
            const HardyConfig cfg{c.n, c.p, k, 1.0, kDefaultMultiplier * 2.0};
            for (const TrialProfile& t : random_trials(cfg, 30, 1000 + 10 * c.n + k)) {
                const FunctionalReport r = eval_trial(t, cfg);
                ++count;
                if (!(r.value >= -r.err_est)) {
                    ++failures;
                }
                worst = std::min(worst, r.value / r.dirichlet);
            }
        }
    }
    Outcome o;
    o.pass = failures == 0 && count == 600;
    o.detail = std::to_string(count) + " profiles, " + std::to_string(failures) +
               " with I_k < -err_est, min I_k/dirichlet " + fmt("%.3f", worst);
    return o;
}

// Smallest quotient over the families at two budgets; the second budget doubles
// the trial set visited by the search.
Outcome constant_stability(Target target, const std::vector<NP>& configs,
                           const std::vector<Family>& families) {
    constexpr std::size_t kBudget = 30;
    double worst_dev = 0.0;
    double smallest = 1e300;
    bool positive = true;
    std::ostringstream rows;
    for (const NP& c : configs) {
        for (int k = 0; k <= 2; ++k) {
            const HardyConfig cfg = HardyConfig::with_multiplier(c.n, c.p, k, kDefaultMultiplier);
            double base = 1e300;
            double doubled = 1e300;
            for (Family f : families) {
                SearchOptions s;
                s.budget = kBudget;
                base = std::min(base, estimate_constant(target, cfg, f, s).ratio);
                s.budget = 2 * kBudget;
                doubled = std::min(doubled, estimate_constant(target, cfg, f, s).ratio);
            }
            positive = positive && base > 0.0 && doubled > 0.0 && std::isfinite(base);
            const double dev = std::abs(doubled / base - 1.0);
            worst_dev = std::max(worst_dev, dev);
            smallest = std::min(smallest, doubled);
            rows << " n" << c.n << "p" << c.p << "k" << k << "=" << fmt("%.4g", doubled);
        }
    }
    Outcome o;
    o.pass = positive && worst_dev <= 0.2;
    o.detail = "min C " + fmt("%.4g", smallest) + ", max change under doubling " +
               fmt("%.1f%%", 100.0 * worst_dev) + ";" + rows.str();
    return o;
}

Outcome emden_fowler() {
    const std::vector<HardyConfig> configs = {
        HardyConfig::with_multiplier(3, 2.0, 0, kDefaultMultiplier),
        HardyConfig::with_multiplier(3, 2.0, 1, kDefaultMultiplier),
        HardyConfig::with_multiplier(5, 3.0, 1, kDefaultMultiplier),
        HardyConfig::with_multiplier(3, 1.5, 2, kDefaultMultiplier)};
    double worst = 0.0;
    int count = 0;
    for (int i = 0; i < 20; ++i) {
        const double m = 1.0 + 3.0 * (i % 5) / 4.0;
        const double s = 1.0 + 0.5 * (i / 5);
        const QuotientPair q = quotient_pair(polynomial_bump(1.0, m, s), configs[i % configs.size()]);
        worst = std::max(worst, std::abs(q.q_r - q.q_tau) / q.q_r);
        ++count;
    }
    Outcome o;
    o.pass = worst <= 1e-6 && count == 20;
    o.detail = std::to_string(count) + " profiles, max |Q_r - Q_tau| / Q_r " + fmt("%.2e", worst);
    return o;
}

Outcome sharpness() {
    struct Case {
        Target target;
        int n;
        double p;
        int k;
    };
    const std::vector<Case> cases = {{Target::TheoremA, 3, 2.0, 0}, {Target::TheoremA, 3, 2.0, 1},
                                     {Target::TheoremA, 3, 1.5, 0}, {Target::TheoremA, 3, 1.5, 1},
                                     {Target::TheoremB, 3, 6.0, 0}, {Target::TheoremB, 3, 6.0, 1}};
    bool pass = true;
    std::ostringstream rows;
    for (const Case& c : cases) {
        const HardyConfig cfg = HardyConfig::with_multiplier(c.n, c.p, c.k, kDefaultMultiplier);
        const SweepReport red = sharpness_sweep(c.target, cfg, 0.5, default_sweep_taus());
        const SweepReport ctl = sharpness_sweep(c.target, cfg, 1.0, default_sweep_taus());
        std::vector<const SweepRow*> ok;
        for (const SweepRow& r : red.rows) {
            if (r.ok) {
                ok.push_back(&r);
            }
        }
        const double decades = ok.size() >= 2 ? ok.front()->log10_delta - ok.back()->log10_delta : 0.0;
        const double drop = ok.size() >= 2 ? ok.front()->ratio / ok.back()->ratio : 0.0;
        const bool good = red.decaying && decades >= 3.0 && ctl.control_bounded &&
                          ctl.failures * 5 <= ctl.rows.size() && red.failures * 5 <= red.rows.size();
        pass = pass && good;
        rows << " " << to_string(c.target) << " n" << c.n << "p" << c.p << "k" << c.k << ": drop "
             << fmt("%.2fx", drop) << " over " << fmt("%.3g", decades) << " decades, control "
             << (ctl.control_bounded ? "bounded" : "UNBOUNDED") << ";";
    }
    return {pass, "eps 0.5 vs control eps 1:" + rows.str()};
}

Outcome margin_suites() {
    constexpr std::size_t kTrials = 20;
    const std::vector<NP> all = kPositivityConfigs;
    const std::vector<NP> local = {{3, 2.0}, {5, 3.0}, {3, 6.0}, {2, 4.0}};
    const std::vector<NP> sup = {{3, 6.0}, {2, 4.0}};
    std::size_t failures = 0;
    std::size_t count = 0;
    std::ostringstream names;
    auto tally = [&](const SuiteResult& r) {
        count += r.count;
        failures += r.failures;
        if (!r.pass()) {
            names << " " << r.name;
        }
    };
    for (int k = 0; k <= 2; ++k) {
        for (const NP& c : all) {
            tally(anilog_suite(HardyConfig::with_multiplier(c.n, c.p, k, kDefaultMultiplier), kTrials, 11 + k));
        }
        for (const NP& c : local) {
            const HardyConfig cfg = HardyConfig::with_multiplier(c.n, c.p, k, kDefaultMultiplier);
            tally(trace_suite(cfg, kTrials, 21 + k));
            tally(local_estimate_suite(cfg, kTrials, 31 + k));
        }
        for (const NP& c : sup) {
            tally(onepoint_suite(HardyConfig::with_multiplier(c.n, c.p, k, kDefaultMultiplier), kTrials, 41 + k));
        }
    }
    Outcome o;
    o.pass = failures == 0 && count > 0;
    o.detail = std::to_string(count) + " margins, " + std::to_string(failures) + " below -err_est" +
               (names.str().empty() ? "" : "; failing:" + names.str());
    return o;
}

Outcome vector_inequalities() {
    constexpr std::size_t kPairs = 100000;
    bool pass = true;
    std::ostringstream rows;
    for (double p : {2.0, 3.0, 4.0}) {
        const double c1 = calibrate_vector_constant(p, false);
        const double c2 = calibrate_vector_constant(p, true);
        const double m1 = vector_inequality_check(p, false, c1, kPairs, 5);
        const double m2 = vector_inequality_check(p, true, c2, kPairs, 6);
        pass = pass && c1 > 0.0 && c2 > 0.0 && m1 >= -1e-12 && m2 >= -1e-12;
        rows << " p" << p << ": c " << fmt("%.4f", c1) << "/" << fmt("%.4f", c2) << " min margin "
             << fmt("%.1e", std::min(m1, m2)) << ";";
    }
    for (double p : {1.2, 1.5, 1.8}) {
        const VectorInequalityReport r = vector_inequality_margin(p, kPairs, 7);
        pass = pass && r.l_violations == 0 && r.trials == kPairs;
        rows << " p" << p << ": " << r.l_violations << " violations;";
    }
    return {pass, std::to_string(kPairs) + " pairs each:" + rows.str()};
}

Outcome cli_contract() {
    const std::string cmd = std::string("\"") + HARDYLAB_CMAKE_COMMAND + "\" -DCLI=\"" + HARDYLAB_CLI_PATH +
                            "\" -DWORK=\"" + HARDYLAB_CLI_WORKDIR + "\" -P \"" + HARDYLAB_CLI_SCRIPT +
                            "\" > \"" + HARDYLAB_CLI_WORKDIR + "/contract.log\" 2>&1";
    const int rc = std::system(cmd.c_str());
    return {rc == 0, std::string("end-to-end script ") + (rc == 0 ? "passed" : "failed, see ") +
                         (rc == 0 ? "" : std::string(HARDYLAB_CLI_WORKDIR) + "/contract.log")};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<NP> sub = {{3, 2.0}, {5, 3.0}, {2, 1.5}};
    const std::vector<NP> sup = {{3, 6.0}, {2, 4.0}};
    const std::vector<Criterion> criteria = {
        {1, "weight calculus", 5, weight_calculus},
        {2, "p = 2 exact oracle", 30, p2_oracle},
        {3, "positivity", 120, positivity},
        {4, "Theorem A constant", 300,
         [&] {
             return constant_stability(Target::TheoremA, sub,
                                       {Family::Polynomial, Family::QuasiExtremal, Family::Separable});
         }},
        {5, "Theorem B constant", 300,
         [&] { return constant_stability(Target::TheoremB, sup, {Family::Polynomial, Family::QuasiExtremal}); }},
        {6, "Emden-Fowler invariance", 60, emden_fowler},
        {7, "sharpness sweeps", 600, sharpness},
        {8, "margin suites", 300, margin_suites},
        {9, "vector inequalities", 30, vector_inequalities},
        {10, "CLI contract", 60, cli_contract},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::printf("%s %2d %s: %s [%.1f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
