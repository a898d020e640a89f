#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mrkc/integrators.hpp"
#include "mrkc/system.hpp"

namespace mrkc {

/// Problem selection by CLI name; lambda/zeta only apply to multirate-test.
struct ProblemOptions {
    std::string name = "robertson";  // robertson | multirate-test | heat | intdiff
    double lambda = -1e4;
    double zeta = -1.0;
};

Problem make_problem(const ProblemOptions& opts);
Mode default_mode(const std::string& problem_name);
double default_t_end(const std::string& problem_name);
std::vector<double> default_taus(const std::string& problem_name);

struct ReferenceSpec {
    enum class Kind { rk4, rkc, exact };
    Kind kind = Kind::rk4;
    double tau = 1e-4;
};
ReferenceSpec default_reference(const std::string& problem_name);

struct ConvergenceRecord {
    double dt = 0.0;
    double err = 0.0;
    double s_mean = 0.0;
    double m_mean = 0.0;
    double eta_mean = 0.0;
    std::int64_t n_fast_evals = 0;
    std::int64_t n_slow_evals = 0;
};

/// Result of a command: the CSV artifact plus the pass/violation summary the
/// CLI prints (and serializes with --json).
struct CommandSummary {
    std::string command;
    std::vector<std::pair<std::string, std::string>> parameters;
    bool pass = true;
    double max_violation = 0.0;
    double observed_order = std::numeric_limits<double>::quiet_NaN();
    std::string csv;
    std::string text;
};

std::string summary_to_json(const CommandSummary& summary);

struct ConvergenceOptions {
    ProblemOptions problem;
    Method method = Method::mrkc;
    Mode mode = Mode::strict;
    bool mode_set = false;  // false -> per-problem default
    std::vector<double> taus;
    double t_end = -1.0;
    double eps = kOuterDamping;
    ReferenceSpec ref;
    bool ref_set = false;
    std::uint64_t seed = PowerMethodConfig{}.seed;
};

struct ConvergenceOutput {
    std::vector<ConvergenceRecord> records;
    CommandSummary summary;
};

ConvergenceOutput run_convergence(const ConvergenceOptions& opts);

struct ScanOptions {
    std::string name = "two-by-two";  // scalar | phi-window | phi-continuous | two-by-two | splitting
    int s = 10;
    bool s_set = false;
    int m = 8;
    double eps = kOuterDamping;
    double tau = 1.0;
    double sigma_factor = 0.1;
    double eta_factor = 1.0;
    double w_factor = 1.0;   // phi-window: scale on |w| = 2/P_m''(0)
    double zeta = -1.0;      // phi-continuous
    int grid_points = 1000;
    ProblemOptions problem;  // splitting scan operand
};

CommandSummary run_scan(const ScanOptions& opts);

struct SpeedupOptions {
    int c_fast_points = 101;
    std::vector<double> rho_ratios = {4.0, 16.0, 64.0};
};

CommandSummary run_speedup(const SpeedupOptions& opts);

struct RunOptions {
    ProblemOptions problem;
    Method method = Method::mrkc;
    Mode mode = Mode::strict;
    bool mode_set = false;
    double tau = 1.0;
    double t_end = -1.0;
    double eps = kOuterDamping;
    std::uint64_t seed = PowerMethodConfig{}.seed;
};

struct RunOutput {
    IntegrationResult result;
    CommandSummary summary;
};

RunOutput run_single(const RunOptions& opts);

/// Least-squares slope of log(err) against log(tau).
double observed_order(const std::vector<double>& taus, const std::vector<double>& errs);

}  // namespace mrkc
