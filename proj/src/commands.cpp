#include "mrkc/commands.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "mrkc/csv.hpp"
#include "mrkc/errors.hpp"
#include "mrkc/problems.hpp"
#include "mrkc/stability.hpp"

namespace mrkc {

Problem make_problem(const ProblemOptions& opts) {
    if (opts.name == "robertson") return robertson_problem();
    if (opts.name == "multirate-test") return multirate_test_problem(opts.lambda, opts.zeta);
    if (opts.name == "heat") return refined_heat_1d().problem;
    if (opts.name == "intdiff") return integro_differential_problem().problem;
    throw InvalidInputError("unknown problem: " + opts.name);
}

Mode default_mode(const std::string& name) {
    // Parabolic splittings run under the relaxed conditions; the ODE
    // benchmarks under the strict ones.
    if (name == "heat" || name == "intdiff") return Mode::relaxed;
    return Mode::strict;
}

double default_t_end(const std::string& name) {
    if (name == "robertson") return 100.0;
    if (name == "heat") return 0.5;
    return 1.0;
}

std::vector<double> default_taus(const std::string& name) {
    std::vector<double> taus;
    int k_lo = 2, k_hi = 7;
    if (name == "heat") {
        k_lo = 4;
        k_hi = 9;
    } else if (name == "intdiff") {
        k_lo = 2;
        k_hi = 6;
    } else if (name == "multirate-test") {
        k_lo = 1;
        k_hi = 6;
    }
    for (int k = k_lo; k <= k_hi; ++k) taus.push_back(std::pow(2.0, -k));
    return taus;
}

ReferenceSpec default_reference(const std::string& name) {
    if (name == "heat") return {ReferenceSpec::Kind::rk4, 2e-5};
    if (name == "intdiff") return {ReferenceSpec::Kind::rkc, std::pow(2.0, -14)};
    if (name == "multirate-test") return {ReferenceSpec::Kind::exact, 0.0};
    return {ReferenceSpec::Kind::rk4, 1e-4};  // robertson
}

double observed_order(const std::vector<double>& taus, const std::vector<double>& errs) {
    const size_t n = taus.size();
    if (n < 2 || errs.size() != n) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0.0, sy = 0.0;
    std::vector<double> xs(n), ys(n);
    for (size_t i = 0; i < n; ++i) {
        xs[i] = std::log(taus[i]);
        ys[i] = std::log(std::max(errs[i], 1e-300));
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < n; ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return num / den;
}

namespace {

std::string method_name(Method m) { return m == Method::rkc ? "rkc" : "mrkc"; }
std::string mode_name(Mode m) { return m == Mode::strict ? "strict" : "relaxed"; }

Vec reference_solution(const ProblemOptions& popts, double t_end, double eps,
                       const ReferenceSpec& ref, std::uint64_t seed) {
    Problem p = make_problem(popts);
    switch (ref.kind) {
        case ReferenceSpec::Kind::rk4: {
            const SplitSystem& sys = p.system;
            return rk4_reference(
                [&sys](double t, const Vec& y, Vec& out) { sys.eval_full(t, y, out); }, p.y0, p.t0,
                t_end, ref.tau);
        }
        case ReferenceSpec::Kind::rkc: {
            RhoPolicy rho;
            rho.power.seed = seed;
            return integrate(p.system, p.y0, p.t0, t_end, ref.tau, Method::rkc, Mode::strict, eps, rho).y;
        }
        case ReferenceSpec::Kind::exact: {
            if (popts.name != "multirate-test") {
                throw InvalidInputError("exact reference only available for multirate-test");
            }
            return {p.y0[0] * std::exp((popts.lambda + popts.zeta) * (t_end - p.t0))};
        }
    }
    throw InvalidInputError("unknown reference kind");
}

}  // namespace

ConvergenceOutput run_convergence(const ConvergenceOptions& opts) {
    const std::string& pname = opts.problem.name;
    const Mode mode = opts.mode_set ? opts.mode : default_mode(pname);
    const double t_end = opts.t_end > 0.0 ? opts.t_end : default_t_end(pname);
    const std::vector<double> taus = opts.taus.empty() ? default_taus(pname) : opts.taus;
    const ReferenceSpec ref = opts.ref_set ? opts.ref : default_reference(pname);

    const Vec y_ref = reference_solution(opts.problem, t_end, opts.eps, ref, opts.seed);
    const Problem norm_holder = make_problem(opts.problem);

    ConvergenceOutput out;
    out.records.resize(taus.size());
    std::vector<double> errs(taus.size());
    for (size_t i = 0; i < taus.size(); ++i) {
        Problem p = make_problem(opts.problem);
        RhoPolicy rho;
        rho.power.seed = opts.seed;
        IntegrationResult res =
            integrate(p.system, p.y0, p.t0, t_end, taus[i], opts.method, mode, opts.eps, rho);
        ConvergenceRecord rec;
        rec.dt = taus[i];
        rec.err = error_norm(norm_holder, res.y, y_ref);
        rec.s_mean = res.mean_s();
        rec.m_mean = res.mean_m();
        rec.eta_mean = res.mean_eta();
        rec.n_fast_evals = res.counters.fast;
        rec.n_slow_evals = res.counters.slow;
        out.records[i] = rec;
        errs[i] = rec.err;
    }

    CsvBuilder csv({"dt", "err", "s_mean", "m_mean", "eta_mean", "n_fast_evals", "n_slow_evals"});
    for (const auto& r : out.records) {
        csv.add_row({r.dt, r.err, r.s_mean, r.m_mean, r.eta_mean,
                     static_cast<double>(r.n_fast_evals), static_cast<double>(r.n_slow_evals)});
    }

    CommandSummary& s = out.summary;
    s.command = "convergence";
    s.parameters = {{"problem", pname},
                    {"method", method_name(opts.method)},
                    {"mode", mode_name(mode)},
                    {"t_end", format_value(t_end)},
                    {"eps", format_value(opts.eps)},
                    {"n_taus", std::to_string(taus.size())}};
    s.observed_order = observed_order(taus, errs);
    s.pass = std::isfinite(s.observed_order);
    s.max_violation = 0.0;
    s.csv = csv.str();
    s.text = "observed order " + format_value(s.observed_order);
    return out;
}

namespace {

CommandSummary scan_scalar_cmd(const ScanOptions& o) {
    const ChebTableau outer = build_tableau(o.s, o.eps);
    const ChebTableau inner = build_tableau(o.m, o.eps);
    const double eta = o.eta_factor * (6.0 * o.tau / outer.ell) *
                       (static_cast<double>(o.m) * o.m) / (static_cast<double>(o.m) * o.m - 1.0);
    const int n = o.grid_points;
    Vec zetas(n), lambdas(n);
    for (int i = 0; i < n; ++i) {
        zetas[i] = -outer.ell / o.tau * (static_cast<double>(i) / (n - 1));
        lambdas[i] = -inner.ell / eta * (static_cast<double>(i) / (n - 1));
    }
    const auto records = scan_scalar_stability(o.s, o.m, o.eps, o.eps, o.tau, eta, zetas, lambdas);
    double max_violation = -std::numeric_limits<double>::infinity();
    for (const auto& r : records) max_violation = std::max(max_violation, r.value - r.threshold);

    CommandSummary s;
    s.command = "scan";
    s.parameters = {{"name", "scalar"},         {"s", std::to_string(o.s)},
                    {"m", std::to_string(o.m)}, {"eps", format_value(o.eps)},
                    {"tau", format_value(o.tau)}, {"eta", format_value(eta)}};
    s.max_violation = max_violation;
    s.pass = max_violation <= 1e-10;
    CsvBuilder csv({"abscissa", "value", "threshold"});
    for (const auto& r : records) csv.add_row({r.abscissa, r.value, r.threshold});
    s.csv = csv.str();
    s.text = std::string(s.pass ? "PASS" : "FAIL") + " max(|R| - 1) = " + format_value(max_violation);
    return s;
}

CommandSummary scan_phi_window_cmd(const ScanOptions& o) {
    const PhiM phim(o.m, o.eps);
    const double w = -o.w_factor * 2.0 / phim.second_deriv_at_zero();
    const int n = o.grid_points;
    Vec grid(n);
    for (int i = 0; i < n; ++i) grid[i] = -phim.tableau().ell * (static_cast<double>(i) / (n - 1));
    const auto [lo, hi] = scan_phi_window(o.m, o.eps, w, grid);

    CommandSummary s;
    s.command = "scan";
    s.parameters = {{"name", "phi-window"},
                    {"m", std::to_string(o.m)},
                    {"eps", format_value(o.eps)},
                    {"w", format_value(w)}};
    // window condition: Phi_m(z)(z+w) in [w, 0] <=> lo >= 0 and hi <= 0
    s.max_violation = std::max(-lo, hi);
    s.pass = lo >= -1e-9 && hi <= 1e-9;
    CsvBuilder csv({"abscissa", "value", "threshold"});
    csv.add_row({w, lo, 0.0});
    csv.add_row({w, hi, 0.0});
    s.csv = csv.str();
    s.text = std::string(s.pass ? "PASS" : "FAIL") + " min(Phi(z)(z+w) - w) = " + format_value(lo);
    return s;
}

CommandSummary scan_phi_continuous_cmd(const ScanOptions& o) {
    const double eta = o.eta_factor * 2.0 / std::abs(o.zeta);
    const int n = o.grid_points;
    Vec grid;
    grid.reserve(n + 1);
    grid.push_back(0.0);
    // log-spaced |lambda| from 1e-6 to 1e6: the interesting violations sit
    // close to the origin.
    for (int i = 0; i < n; ++i) {
        grid.push_back(-std::pow(10.0, -6.0 + 12.0 * static_cast<double>(i) / (n - 1)));
    }
    const bool ok = scan_phi_continuous(eta, o.zeta, grid);

    CommandSummary s;
    s.command = "scan";
    s.parameters = {{"name", "phi-continuous"},
                    {"zeta", format_value(o.zeta)},
                    {"eta", format_value(eta)}};
    s.pass = ok;
    s.max_violation = ok ? 0.0 : 1.0;
    CsvBuilder csv({"abscissa", "value", "threshold"});
    csv.add_row({eta, ok ? 1.0 : 0.0, 1.0});
    s.csv = csv.str();
    s.text = std::string(ok ? "PASS" : "FAIL") + std::string(" phi window at eta = ") + format_value(eta);
    return s;
}

CommandSummary scan_two_by_two_cmd(const ScanOptions& o) {
    const ChebTableau inner = build_tableau(o.m, o.eps);
    const int n = o.grid_points;
    Vec grid(n);
    // z in [-ell_m, 0), endpoint excluded: at z = 0 the bound holds with
    // equality by construction.
    for (int i = 0; i < n; ++i) grid[i] = -inner.ell * (1.0 - static_cast<double>(i) / n);
    const auto records = scan_two_by_two(o.s, o.m, o.eps, o.tau, o.sigma_factor, o.eta_factor, grid);
    double max_violation = -std::numeric_limits<double>::infinity();
    double argmax = 0.0;
    for (const auto& r : records) {
        if (r.value - r.threshold > max_violation) {
            max_violation = r.value - r.threshold;
            argmax = r.abscissa;
        }
    }
    CommandSummary s;
    s.command = "scan";
    s.parameters = {{"name", "two-by-two"},
                    {"s", std::to_string(o.s)},
                    {"m", std::to_string(o.m)},
                    {"eps", format_value(o.eps)},
                    {"sigma_factor", format_value(o.sigma_factor)},
                    {"eta_factor", format_value(o.eta_factor)}};
    s.max_violation = max_violation;
    s.pass = max_violation <= 1e-9;
    CsvBuilder csv({"abscissa", "value", "threshold"});
    for (const auto& r : records) csv.add_row({r.abscissa, r.value, r.threshold});
    s.csv = csv.str();
    s.text = std::string(s.pass ? "PASS" : "FAIL") + " max(eta*rho - |w|) = " + format_value(max_violation) +
             " at z = " + format_value(argmax);
    return s;
}

CommandSummary scan_splitting_cmd(const ScanOptions& o) {
    if (o.problem.name != "heat") {
        throw InvalidInputError("splitting scan operates on the heat problem");
    }
    const RefinedHeatProblem heat = refined_heat_1d();
    const double rho_slow = dense_spectral_radius(heat.splitting.a_slow);
    const double rho_fast = dense_spectral_radius(heat.splitting.a_fast);
    const int s = o.s_set ? o.s : select_stages(o.tau, rho_slow, o.eps);
    const double beta = 2.0 - 4.0 * o.eps / 3.0;
    const double bs2 = beta * static_cast<double>(s) * s;
    // strict eta as the grid's upper end
    SpectralEstimates est{rho_fast, rho_slow, 0.0};
    const MrkcParameters params = select_mrkc_parameters(o.tau, est, Mode::strict, o.eps);
    const int n = o.grid_points;
    Vec grid(n);
    for (int i = 0; i < n; ++i) grid[i] = params.eta * static_cast<double>(i + 1) / n;
    const auto records = scan_splitting_stability(heat.splitting, o.tau, s, o.eps, grid);

    double max_violation = -std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
        if (std::abs(r.abscissa) >= 2.0) {
            max_violation = std::max(max_violation, r.value - r.threshold);
        }
    }
    CommandSummary s_out;
    s_out.command = "scan";
    s_out.parameters = {{"name", "splitting"},
                        {"problem", "heat"},
                        {"s", std::to_string(s)},
                        {"tau", format_value(o.tau)},
                        {"eps", format_value(o.eps)},
                        {"eta_max", format_value(params.eta)}};
    s_out.max_violation = max_violation;
    s_out.pass = max_violation <= bs2 * 1e-9;
    CsvBuilder csv({"abscissa", "value", "threshold"});
    for (const auto& r : records) csv.add_row({r.abscissa, r.value, r.threshold});
    s_out.csv = csv.str();
    s_out.text = std::string(s_out.pass ? "PASS" : "FAIL") +
                 " max(tau*rho - beta*s^2 | |w|>=2) = " + format_value(max_violation);
    return s_out;
}

}  // namespace

CommandSummary run_scan(const ScanOptions& opts) {
    if (opts.name == "scalar") return scan_scalar_cmd(opts);
    if (opts.name == "phi-window") return scan_phi_window_cmd(opts);
    if (opts.name == "phi-continuous") return scan_phi_continuous_cmd(opts);
    if (opts.name == "two-by-two") return scan_two_by_two_cmd(opts);
    if (opts.name == "splitting") return scan_splitting_cmd(opts);
    throw InvalidInputError("unknown scan: " + opts.name +
                            " (expected scalar|phi-window|phi-continuous|two-by-two|splitting)");
}

CommandSummary run_speedup(const SpeedupOptions& opts) {
    if (opts.c_fast_points < 2) throw InvalidInputError("speedup: need at least 2 grid points");
    CsvBuilder csv({"r_rho", "c_f", "S", "S_bar", "c_f_max"});
    for (double r : opts.rho_ratios) {
        for (int i = 0; i < opts.c_fast_points; ++i) {
            const double cf = static_cast<double>(i) / (opts.c_fast_points - 1);
            const SpeedupResult res = speedup_model({cf, r});
            csv.add_row({r, cf, res.speedup, res.speedup_relaxed, res.c_fast_max});
        }
    }
    CommandSummary s;
    s.command = "speedup";
    s.parameters = {{"c_fast_points", std::to_string(opts.c_fast_points)},
                    {"n_ratios", std::to_string(opts.rho_ratios.size())}};
    s.pass = true;
    s.csv = csv.str();
    s.text = "speed-up table with " + std::to_string(opts.rho_ratios.size()) + " stiffness ratios";
    return s;
}

RunOutput run_single(const RunOptions& opts) {
    const std::string& pname = opts.problem.name;
    const Mode mode = opts.mode_set ? opts.mode : default_mode(pname);
    const double t_end = opts.t_end > 0.0 ? opts.t_end : default_t_end(pname);

    Problem p = make_problem(opts.problem);
    RhoPolicy rho;
    rho.power.seed = opts.seed;

    RunOutput out;
    out.result = integrate(p.system, p.y0, p.t0, t_end, opts.tau, opts.method, mode, opts.eps, rho);

    if (opts.method == Method::mrkc) {
        CsvBuilder csv({"t", "s", "m", "eta", "rhoF", "rhoS"});
        for (const auto& r : out.result.steps) {
            csv.add_row({r.t, static_cast<double>(r.s), static_cast<double>(r.m), r.eta, r.rho_fast,
                         r.rho_slow});
        }
        out.summary.csv = csv.str();
    } else {
        CsvBuilder csv({"t", "s", "rho"});
        for (const auto& r : out.result.steps) {
            csv.add_row({r.t, static_cast<double>(r.s), r.rho_full});
        }
        out.summary.csv = csv.str();
    }

    CommandSummary& s = out.summary;
    s.command = "run";
    s.parameters = {{"problem", pname},
                    {"method", method_name(opts.method)},
                    {"mode", mode_name(mode)},
                    {"tau", format_value(opts.tau)},
                    {"t_end", format_value(t_end)},
                    {"eps", format_value(opts.eps)},
                    {"n_steps", std::to_string(out.result.steps.size())},
                    {"n_fast_evals", std::to_string(out.result.counters.fast)},
                    {"n_slow_evals", std::to_string(out.result.counters.slow)}};
    s.pass = true;
    s.text = std::to_string(out.result.steps.size()) + " steps, " +
             std::to_string(out.result.counters.fast) + " fast evals, " +
             std::to_string(out.result.counters.slow) + " slow evals";
    return out;
}

std::string summary_to_json(const CommandSummary& summary) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : summary.parameters) params[k] = v;
    nlohmann::json j{{"command", summary.command},
                     {"parameters", params},
                     {"pass", summary.pass},
                     {"max_violation", summary.max_violation},
                     {"observed_order",
                      std::isfinite(summary.observed_order)
                          ? nlohmann::json(summary.observed_order)
                          : nlohmann::json(nullptr)}};
    return j.dump();
}

}  // namespace mrkc
