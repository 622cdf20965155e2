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

// Batch harness: weight tables, verification suites, constant estimates,
// sharpness sweeps and minimal-multiplier reports. Exit codes: 0 success,
// 1 failed checks, 2 usage or configuration errors.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hardylab/csv.hpp"
#include "hardylab/errors.hpp"
#include "hardylab/functionals.hpp"
#include "hardylab/logweights.hpp"
#include "hardylab/probes.hpp"
#include "hardylab/profiles.hpp"
#include "hardylab/transforms.hpp"

namespace {

using namespace hardylab;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// Raised for configuration problems found after parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    int n = 3;
    double p = 2.0;
    int k = 1;
    double d_mult = kDefaultMultiplier;
    std::uint64_t seed = 1;
    std::string out;
};

HardyConfig make_config(const Common& c) {
    try {
        return HardyConfig::with_multiplier(c.n, c.p, c.k, c.d_mult);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

std::string plot_path(const std::string& out) {
    const auto dot = out.rfind('.');
    const auto slash = out.find_last_of('/');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (has_ext ? out.substr(0, dot) : out) + ".plot.dat";
}

std::string plot_data(const std::vector<std::pair<double, double>>& xy) {
    std::string s;
    for (const auto& [x, y] : xy) {
        s += format_double(x) + ' ' + format_double(y) + '\n';
    }
    return s;
}

// Data goes to the output file (stdout when none is given for tables that
// allow it); plot data goes next to the output file.
void emit(const Common& c, const CsvTable& table, const std::vector<std::pair<double, double>>* plot,
          bool stdout_ok) {
    if (c.out.empty()) {
        if (!stdout_ok) {
            throw UsageError("--out is required for this subcommand");
        }
        std::cout << table.str();
        return;
    }
    write_file_atomic(c.out, table.str());
    if (plot != nullptr) {
        write_file_atomic(plot_path(c.out), plot_data(*plot));
    }
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? ";" : "") + format_double(v[i]);
    }
    return s;
}

// weights -------------------------------------------------------------------

struct WeightsArgs {
    std::vector<double> t;
    int grid = 50;
};

int run_weights(const Common& c, const WeightsArgs& a) {
    if (c.k < 0 || c.k > kMaxDepth) {
        throw UsageError("k must lie in [0, " + std::to_string(kMaxDepth) + "]");
    }
    std::vector<double> ts = a.t;
    if (ts.empty()) {
        if (a.grid < 2) {
            throw UsageError("--grid needs at least 2 points");
        }
        for (int i = 0; i < a.grid; ++i) {
            ts.push_back(std::pow(10.0, -6.0 + 6.0 * i / (a.grid - 1)));
        }
    }
    std::vector<std::string> header{"t"};
    for (int i = 1; i <= c.k; ++i) {
        header.push_back("X_" + std::to_string(i));
    }
    for (const char* h : {"Y_k", "Z_k", "dX", "dY", "dZ"}) {
        header.emplace_back(h);
    }
    CsvTable table(header);
    std::vector<std::pair<double, double>> plot;
    for (double t : ts) {
        if (!(t > 0.0 && t <= 1.0)) {
            throw DomainError("t = " + format_double(t) + " lies outside (0, 1]");
        }
        std::vector<CsvCell> row{t};
        for (int i = 1; i <= c.k; ++i) {
            row.emplace_back(eval_X(i, t));
        }
        const WeightDerivatives d = eval_derivatives(c.k, t);
        row.emplace_back(eval_Y(c.k, t));
        row.emplace_back(eval_Z(c.k, t));
        row.emplace_back(d.dX);
        row.emplace_back(d.dY);
        row.emplace_back(d.dZ);
        table.add_row(std::move(row));
        plot.emplace_back(t, c.k > 0 ? eval_X(c.k, t) : t);
    }
    emit(c, table, &plot, true);
    return 0;
}

// verify --------------------------------------------------------------------

struct VerifyArgs {
    std::size_t trials = 10;
    std::string profile;
};

class CheckTable {
public:
    explicit CheckTable(std::string config)
        : config_(std::move(config)), table_({"check", "config", "margin", "err_est", "verdict"}) {}

    void add(const std::string& id, double margin, double err, bool pass) {
        table_.add_row({id, config_, margin, err, std::string(pass ? "pass" : "fail")});
        failures_ += pass ? 0 : 1;
        if (!pass) {
            std::cerr << "check failed: " << id << " margin " << format_double(margin) << " err_est "
                      << format_double(err) << "\n";
        }
    }
    void add_margin(const std::string& id, double margin, double err) {
        add(id, margin, err, margin >= -err);
    }
    void add_suite(const SuiteResult& r) {
        add(r.name, r.worst_margin, 0.0, r.pass());
    }
    void add_error(const std::string& id, const std::exception& e) {
        std::cerr << "check failed: " << id << ": " << e.what() << "\n";
        table_.add_row({id, config_, std::nan(""), std::nan(""), std::string("fail")});
        ++failures_;
    }

    const CsvTable& table() const { return table_; }
    std::size_t failures() const { return failures_; }

private:
    std::string config_;
    CsvTable table_;
    std::size_t failures_ = 0;
};

template <class F>
void guarded(CheckTable& t, const std::string& id, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        t.add_error(id, e);
    }
}

int run_verify(const Common& c, const VerifyArgs& a, const QuadOptions& opts) {
    if (a.trials == 0) {
        throw UsageError("the trial set is empty (--trials 0)");
    }
    const HardyConfig cfg = make_config(c);
    std::vector<TrialProfile> trials = random_trials(cfg, a.trials, c.seed);
    if (!a.profile.empty()) {
        try {
            RadialProfile u = load_profile_csv(a.profile);
            trials.push_back(TrialProfile{Family::Polynomial, {}, std::move(u), 0});
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
    }
    CheckTable t(cfg.describe());
    const bool subcritical = cfg.regime() == Regime::Subcritical;

    guarded(t, "ground_state_residual", [&] {
        const std::optional<double> r = min_residual(cfg);
        if (!r) {
            throw PreconditionError("1 - a X_1(R/D) >= 2 - p fails for this D");
        }
        t.add_margin("ground_state_residual", *r, 1e-12);
    });
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const std::string id = "positivity[" + std::to_string(i) + "]";
        guarded(t, id, [&] {
            const FunctionalReport r = eval_trial(trials[i], cfg, opts);
            t.add_margin(id, r.value, r.err_est);
        });
    }
    guarded(t, "assembly_identity", [&] {
        const FunctionalReport r = eval_trial(trials.front(), cfg, opts);
        const FunctionalReport again = FunctionalReport::assemble(cfg, r.dirichlet, r.hardy, r.remainder, r.err_est);
        t.add("assembly_identity", -std::abs(again.value - r.value), 0.0, again.value == r.value);
    });
    guarded(t, "homogeneity", [&] {
        const TrialProfile& u = trials.front();
        TrialProfile scaled = u;
        scaled.radial = u.radial.scaled(-2.5);
        const double a1 = eval_trial(u, cfg, opts).value;
        const double a2 = eval_trial(scaled, cfg, opts).value;
        const double rel = std::abs(a2 - std::pow(2.5, cfg.p) * a1) / std::abs(a2);
        t.add_margin("homogeneity", -rel, 1e-12);
    });
    guarded(t, "weights_round_trip", [&] {
        double worst = 0.0;
        for (int i = 1; i <= std::max(cfg.k, 1); ++i) {
            for (double s : {0.05, 0.3, 0.7, 1.0}) {
                try {
                    worst = std::max(worst, std::abs(eval_X(i, eval_F(i, s)) - s) / s);
                } catch (const UnderflowError&) {
                }
            }
        }
        t.add_margin("weights_round_trip", -worst, 1e-12);
    });
    guarded(t, "emden_fowler_round_trip", [&] {
        const EmdenFowlerMap map(cfg);
        double worst = 0.0;
        for (double r : {1e-8, 1e-4, 0.1, 0.5, 1.0}) {
            worst = std::max(worst, std::abs(map.inverse(map.forward(r * cfg.R)) - r * cfg.R) / (r * cfg.R));
        }
        t.add_margin("emden_fowler_round_trip", -worst, 1e-10);
    });
    guarded(t, "anilog", [&] { t.add_suite(anilog_suite(cfg, a.trials, c.seed, opts)); });
    if (cfg.p >= 2.0) {
        guarded(t, "trace", [&] { t.add_suite(trace_suite(cfg, a.trials, c.seed, opts)); });
        guarded(t, "local_estimate", [&] { t.add_suite(local_estimate_suite(cfg, a.trials, c.seed, opts)); });
    }
    if (!subcritical) {
        guarded(t, "onepoint", [&] { t.add_suite(onepoint_suite(cfg, a.trials, c.seed, opts)); });
    }
    if (subcritical) {
        guarded(t, "quotient_invariance", [&] {
            const QuotientPair q = quotient_pair(polynomial_bump(cfg.R, 2.0, 2.0), cfg, opts);
            t.add_margin("quotient_invariance", -std::abs(q.q_r - q.q_tau) / q.q_r, 1e-6);
        });
    }
    if (subcritical && cfg.p >= 2.0) {
        guarded(t, "spherical_mode", [&] {
            const RadialProfile phi = polynomial_bump(cfg.R, 2.0, 2.0).times(origin_damper(cfg.R, 0.1 * cfg.R));
            const SphericalModeReport r = spherical_mode_check(cfg, 1, phi, opts);
            t.add_margin("spherical_mode", r.margin, r.err_est);
        });
    }
    guarded(t, "vector_inequality", [&] {
        if (cfg.p >= 2.0) {
            const double c1 = calibrate_vector_constant(cfg.p, false);
            const double m = vector_inequality_check(cfg.p, false, c1, 10000, c.seed);
            t.add("vector_inequality", m, 1e-12, c1 > 0.0 && m >= -1e-12);
        } else {
            const VectorInequalityReport r = vector_inequality_margin(cfg.p, 10000, c.seed);
            t.add("vector_inequality", r.l_margin_min, 0.0, r.l_violations == 0);
        }
    });

    emit(c, t.table(), nullptr, true);
    std::cerr << (t.failures() == 0 ? "all checks passed" : std::to_string(t.failures()) + " checks failed")
              << " for " << cfg.describe() << "\n";
    return t.failures() == 0 ? 0 : kExitFail;
}

// estimate ------------------------------------------------------------------

struct EstimateArgs {
    std::string target = "theoremA";
    std::string family = "polynomial";
    std::size_t budget = 200;
};

Target parse_target_or_usage(const std::string& s) {
    try {
        return parse_target(s);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

void check_target_regime(Target target, const HardyConfig& cfg) {
    const bool sub = cfg.regime() == Regime::Subcritical;
    if ((target == Target::TheoremB && sub) || (target != Target::TheoremB && !sub)) {
        throw UsageError(to_string(target) + " does not apply to " + cfg.describe());
    }
    if (target == Target::Lemma41 && cfg.p < 2.0) {
        throw UsageError("lemma41 needs 2 <= p < n");
    }
}

int run_estimate(const Common& c, const EstimateArgs& a, const QuadOptions& opts) {
    const HardyConfig cfg = make_config(c);
    const Target target = parse_target_or_usage(a.target);
    Family family;
    try {
        family = parse_family(a.family);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    check_target_regime(target, cfg);
    if (a.budget == 0) {
        throw UsageError("--budget must be positive");
    }
    SearchOptions s;
    s.budget = a.budget;
    s.seed = c.seed;
    const QuotientReport r = estimate_constant(target, cfg, family, s, opts);
    CsvTable table({"target", "family", "n", "p", "k", "R", "D", "numerator", "denominator", "ratio",
                    "params", "iterations", "evaluations", "converged"});
    table.add_row({to_string(r.target), to_string(r.family), std::int64_t{cfg.n}, cfg.p, std::int64_t{cfg.k},
                   cfg.R, cfg.D, r.numerator, r.denominator, r.ratio, join(r.params),
                   static_cast<std::int64_t>(r.iterations), static_cast<std::int64_t>(r.evaluations),
                   std::int64_t{r.converged ? 1 : 0}});
    emit(c, table, nullptr, true);
    return 0;
}

// sweep ---------------------------------------------------------------------

struct SweepArgs {
    std::string target = "theoremA";
    double eps = 0.5;
    std::vector<double> taus;
};

int run_sweep(const Common& c, const SweepArgs& a, const QuadOptions& opts) {
    const HardyConfig cfg = make_config(c);
    const Target target = parse_target_or_usage(a.target);
    if (target != Target::TheoremA && target != Target::TheoremB) {
        throw UsageError("sweeps exist for theoremA and theoremB only");
    }
    check_target_regime(target, cfg);
    if (!(a.eps >= 0.0 && a.eps <= 1.0)) {
        throw UsageError("--eps must lie in [0, 1]");
    }
    const std::vector<double> taus = a.taus.empty() ? default_sweep_taus() : a.taus;
    const SweepReport s = sharpness_sweep(target, cfg, a.eps, taus, opts);
    CsvTable table({"target", "n", "p", "k", "D", "eps", "tau_end", "log10_delta", "log_x", "numerator",
                    "denominator", "ratio", "ok", "error"});
    std::vector<std::pair<double, double>> plot;
    for (const SweepRow& r : s.rows) {
        table.add_row({to_string(target), std::int64_t{cfg.n}, cfg.p, std::int64_t{cfg.k}, cfg.D, a.eps,
                       r.tau_end, r.log10_delta, r.log_x, r.numerator, r.denominator, r.ratio,
                       std::int64_t{r.ok ? 1 : 0}, r.error});
        if (r.ok) {
            plot.emplace_back(r.log10_delta, r.ratio);
        }
    }
    emit(c, table, &plot, true);
    std::cerr << "sweep: " << s.rows.size() << " rows, " << s.failures << " failed, monotone "
              << (s.monotone ? "yes" : "no") << ", decaying " << (s.decaying ? "yes" : "no")
              << ", control bounded " << (s.control_bounded ? "yes" : "no") << "\n";
    return s.failures * 5 > s.rows.size() ? kExitFail : 0;
}

// report --------------------------------------------------------------------

struct ReportArgs {
    std::vector<double> multipliers{1.0, 2.0, 4.0, 8.0, 16.0, 32.0, kDefaultMultiplier};
    std::size_t trials = 10;
};

int run_report(const Common& c, const ReportArgs& a, const QuadOptions& opts) {
    make_config(c);
    if (a.trials == 0) {
        throw UsageError("the trial set is empty (--trials 0)");
    }
    if (a.multipliers.empty() || !std::is_sorted(a.multipliers.begin(), a.multipliers.end()) ||
        a.multipliers.front() < 1.0) {
        throw UsageError("--multipliers must increase and start at 1 or more");
    }
    const MinDReport r = find_min_D(c.n, c.p, c.k, a.multipliers, a.trials, c.seed, opts);
    CsvTable table({"n", "p", "k", "multiplier", "positivity", "residual", "worst_margin", "worst_residual"});
    std::vector<std::pair<double, double>> plot;
    for (const MinDRow& row : r.rows) {
        table.add_row({std::int64_t{c.n}, c.p, std::int64_t{c.k}, row.multiplier,
                       std::int64_t{row.positivity ? 1 : 0}, std::int64_t{row.residual ? 1 : 0},
                       row.worst_margin, row.worst_residual});
        plot.emplace_back(row.multiplier, row.worst_residual);
    }
    emit(c, table, &plot, true);
    auto show = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("none"); };
    std::cerr << "thresholds: positivity " << show(r.positivity_threshold) << ", residual "
              << show(r.residual_threshold) << ", both " << show(r.threshold)
              << (r.monotone ? "" : " (not monotone in the multiplier)") << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hardylab: numerical probes of improved Hardy inequalities"};
    app.set_config("--config", "", "key = value file with [section] headers; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    app.fallthrough();

    Common c;
    app.add_option("--n", c.n, "dimension")->capture_default_str();
    app.add_option("--p", c.p, "exponent")->capture_default_str();
    app.add_option("--k", c.k, "depth")->capture_default_str();
    app.add_option("--D-mult", c.d_mult, "D as a multiple of R (p < n) or of the diameter (p > n)")
        ->capture_default_str();
    app.add_option("--seed", c.seed, "random seed")->capture_default_str();
    app.add_option("--out", c.out, "output CSV; plot data goes to the same stem with .plot.dat");

    WeightsArgs wa;
    auto* weights = app.add_subcommand("weights", "tabulate X_i, Y_k, Z_k and derivatives");
    weights->add_option("--t", wa.t, "points in (0, 1]");
    weights->add_option("--grid", wa.grid, "log-spaced points in [1e-6, 1] when --t is absent")
        ->capture_default_str();

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "run the property suite for one configuration");
    verify->add_option("--trials", va.trials, "random profiles per suite")->capture_default_str();
    verify->add_option("--profile", va.profile, "extra radial profile from a CSV with columns r,u[,du]");

    EstimateArgs ea;
    auto* estimate = app.add_subcommand("estimate", "estimate an empirical constant by pattern search");
    estimate->add_option("--target", ea.target, "theoremA, theoremB, lemma41 or quotientC")->capture_default_str();
    estimate->add_option("--family", ea.family, "polynomial, quasi-extremal or separable")->capture_default_str();
    estimate->add_option("--budget", ea.budget, "quotient evaluations")->capture_default_str();

    SweepArgs sa;
    auto* sweep = app.add_subcommand("sweep", "sharpness sweep toward the origin");
    sweep->add_option("--target", sa.target, "theoremA or theoremB")->capture_default_str();
    sweep->add_option("--eps", sa.eps, "reduced exponent in [0, 1]; 1 is the control")->capture_default_str();
    sweep->add_option("--taus", sa.taus, "Emden-Fowler end points of the trial bumps");

    ReportArgs ra;
    auto* report = app.add_subcommand("report", "smallest workable D multiplier");
    report->add_option("--multipliers", ra.multipliers, "increasing multipliers, each >= 1");
    report->add_option("--trials", ra.trials, "random profiles per multiplier")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        const QuadOptions opts = QuadOptions::from_environment();
        if (*weights) {
            return run_weights(c, wa);
        }
        if (*verify) {
            return run_verify(c, va, opts);
        }
        if (*estimate) {
            return run_estimate(c, ea, opts);
        }
        if (*sweep) {
            return run_sweep(c, sa, opts);
        }
        return run_report(c, ra, opts);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DepthError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const RegimeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
}
