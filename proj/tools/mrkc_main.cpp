#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrkc/commands.hpp"
#include "mrkc/csv.hpp"
#include "mrkc/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitBlowUp = 3;

mrkc::Method parse_method(const std::string& s) {
    if (s == "rkc") return mrkc::Method::rkc;
    if (s == "mrkc") return mrkc::Method::mrkc;
    throw mrkc::InvalidInputError("unknown method: " + s + " (expected rkc|mrkc)");
}

mrkc::Mode parse_mode(const std::string& s) {
    if (s == "strict") return mrkc::Mode::strict;
    if (s == "relaxed") return mrkc::Mode::relaxed;
    throw mrkc::InvalidInputError("unknown mode: " + s + " (expected strict|relaxed)");
}

std::vector<double> parse_tau_list(const std::string& s) {
    std::vector<double> taus;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        taus.push_back(std::stod(s.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return taus;
}

// Flag > config file > built-in default: config values only land on options
// the user did not pass on the command line.
class ConfigOverlay {
public:
    explicit ConfigOverlay(const std::string& path) {
        if (path.empty()) return;
        std::ifstream in(path);
        if (!in) throw mrkc::InvalidInputError("cannot open config file: " + path);
        in >> json_;
    }

    template <class T>
    void apply(const CLI::Option* opt, const std::string& key, T& target) const {
        if (json_.is_null() || opt == nullptr || opt->count() > 0) return;
        if (auto it = json_.find(key); it != json_.end()) target = it->get<T>();
    }

private:
    nlohmann::json json_;
};

void emit(const mrkc::CommandSummary& summary, const std::string& out_path, bool as_json) {
    if (!out_path.empty() && !summary.csv.empty()) {
        mrkc::write_file(out_path, summary.csv);
    }
    if (as_json) {
        std::cout << mrkc::summary_to_json(summary) << "\n";
    } else {
        std::cout << summary.command << ": " << summary.text << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stabilized multirate Chebyshev integrators: experiments and stability scans"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string problem = "robertson", method = "mrkc", mode, out_path, config_path;
    std::string scan_name = "two-by-two", scan_problem = "heat", tau_list, ref_spec;
    double tau = 1.0, t_end = -1.0, eps = mrkc::kOuterDamping;
    double lambda = -1e4, zeta = -1.0, sigma_factor = 0.1, eta_factor = 1.0, w_factor = 1.0;
    double scan_zeta = -1.0;
    std::uint64_t seed = mrkc::PowerMethodConfig{}.seed;
    int s_stages = 10, m_stages = 8, grid_points = 1000, cf_points = 101;
    std::vector<double> rho_ratios = {4.0, 16.0, 64.0};
    bool as_json = false;

    app.add_option("--config", config_path, "optional JSON config file (flags take precedence)");
    app.add_flag("--json", as_json, "emit the summary as JSON");

    auto* conv = app.add_subcommand("convergence", "error vs step size, observed order");
    auto* o_cp = conv->add_option("--problem", problem, "robertson|multirate-test|heat|intdiff");
    auto* o_cm = conv->add_option("--method", method, "rkc|mrkc");
    auto* o_cmo = conv->add_option("--mode", mode, "strict|relaxed (default per problem)");
    auto* o_ct = conv->add_option("--tau", tau_list, "comma-separated step sizes");
    auto* o_ce = conv->add_option("--t-end", t_end, "final time (default per problem)");
    auto* o_cd = conv->add_option("--eps", eps, "outer damping");
    auto* o_cr = conv->add_option("--ref", ref_spec, "reference: rk4@<tau>|rkc@<tau>|exact");
    auto* o_cs = conv->add_option("--seed", seed, "power-method seed");
    conv->add_option("--lambda", lambda, "multirate-test fast rate");
    conv->add_option("--zeta", zeta, "multirate-test slow rate");
    conv->add_option("--out", out_path, "CSV output path");

    auto* scan = app.add_subcommand("scan", "stability scans");
    scan->add_option("--name", scan_name, "scalar|phi-window|phi-continuous|two-by-two|splitting");
    auto* o_ss = scan->add_option("--s", s_stages, "outer stage count");
    scan->add_option("--m", m_stages, "inner stage count");
    auto* o_sd = scan->add_option("--eps", eps, "damping");
    auto* o_st = scan->add_option("--tau", tau, "step size");
    scan->add_option("--sigma-factor", sigma_factor, "coupling strength factor");
    scan->add_option("--eta-factor", eta_factor, "scale on the eta lower bound");
    scan->add_option("--w-factor", w_factor, "scale on |w| for phi-window");
    scan->add_option("--zeta", scan_zeta, "zeta for phi-continuous");
    scan->add_option("--grid", grid_points, "grid points");
    scan->add_option("--problem", scan_problem, "operand for the splitting scan");
    scan->add_option("--out", out_path, "CSV output path");

    auto* speed = app.add_subcommand("speedup", "cost-model table");
    speed->add_option("--cf-points", cf_points, "c_F grid size");
    speed->add_option("--r-rho", rho_ratios, "stiffness ratios");
    speed->add_option("--out", out_path, "CSV output path");

    auto* runc = app.add_subcommand("run", "single integration with per-step records");
    auto* o_rp = runc->add_option("--problem", problem, "robertson|multirate-test|heat|intdiff");
    auto* o_rm = runc->add_option("--method", method, "rkc|mrkc");
    auto* o_rmo = runc->add_option("--mode", mode, "strict|relaxed (default per problem)");
    auto* o_rt = runc->add_option("--tau", tau, "step size");
    auto* o_re = runc->add_option("--t-end", t_end, "final time (default per problem)");
    auto* o_rd = runc->add_option("--eps", eps, "outer damping");
    auto* o_rs = runc->add_option("--seed", seed, "power-method seed");
    runc->add_option("--lambda", lambda, "multirate-test fast rate");
    runc->add_option("--zeta", zeta, "multirate-test slow rate");
    runc->add_option("--out", out_path, "CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const ConfigOverlay config(config_path);
        if (conv->parsed()) {
            config.apply(o_cp, "problem", problem);
            config.apply(o_cm, "method", method);
            config.apply(o_cmo, "mode", mode);
            config.apply(o_ct, "tau", tau_list);
            config.apply(o_ce, "t_end", t_end);
            config.apply(o_cd, "eps", eps);
            config.apply(o_cr, "ref", ref_spec);
            config.apply(o_cs, "seed", seed);

            mrkc::ConvergenceOptions opts;
            opts.problem = {problem, lambda, zeta};
            opts.method = parse_method(method);
            if (!mode.empty()) {
                opts.mode = parse_mode(mode);
                opts.mode_set = true;
            }
            if (!tau_list.empty()) opts.taus = parse_tau_list(tau_list);
            opts.t_end = t_end;
            opts.eps = eps;
            opts.seed = seed;
            if (!ref_spec.empty()) {
                opts.ref_set = true;
                if (ref_spec == "exact") {
                    opts.ref.kind = mrkc::ReferenceSpec::Kind::exact;
                } else if (auto at = ref_spec.find('@'); at != std::string::npos) {
                    const std::string kind = ref_spec.substr(0, at);
                    opts.ref.tau = std::stod(ref_spec.substr(at + 1));
                    if (kind == "rk4") {
                        opts.ref.kind = mrkc::ReferenceSpec::Kind::rk4;
                    } else if (kind == "rkc") {
                        opts.ref.kind = mrkc::ReferenceSpec::Kind::rkc;
                    } else {
                        throw mrkc::InvalidInputError("unknown reference kind: " + kind);
                    }
                } else {
                    throw mrkc::InvalidInputError("bad --ref, expected rk4@<tau>|rkc@<tau>|exact");
                }
            }
            emit(mrkc::run_convergence(opts).summary, out_path, as_json);
        } else if (scan->parsed()) {
            config.apply(o_sd, "eps", eps);
            config.apply(o_st, "tau", tau);
            mrkc::ScanOptions opts;
            opts.name = scan_name;
            opts.s = s_stages;
            opts.s_set = o_ss->count() > 0;
            opts.m = m_stages;
            opts.eps = eps;
            opts.tau = tau;
            opts.sigma_factor = sigma_factor;
            opts.eta_factor = eta_factor;
            opts.w_factor = w_factor;
            opts.zeta = scan_zeta;
            opts.grid_points = grid_points;
            opts.problem.name = scan_problem;
            emit(mrkc::run_scan(opts), out_path, as_json);
        } else if (speed->parsed()) {
            mrkc::SpeedupOptions opts;
            opts.c_fast_points = cf_points;
            opts.rho_ratios = rho_ratios;
            emit(mrkc::run_speedup(opts), out_path, as_json);
        } else if (runc->parsed()) {
            config.apply(o_rp, "problem", problem);
            config.apply(o_rm, "method", method);
            config.apply(o_rmo, "mode", mode);
            config.apply(o_rt, "tau", tau);
            config.apply(o_re, "t_end", t_end);
            config.apply(o_rd, "eps", eps);
            config.apply(o_rs, "seed", seed);

            mrkc::RunOptions opts;
            opts.problem = {problem, lambda, zeta};
            opts.method = parse_method(method);
            if (!mode.empty()) {
                opts.mode = parse_mode(mode);
                opts.mode_set = true;
            }
            opts.tau = tau;
            opts.t_end = t_end;
            opts.eps = eps;
            opts.seed = seed;
            const mrkc::RunOutput out = mrkc::run_single(opts);
            emit(out.summary, out_path, as_json);
            if (!as_json) {
                std::cout << "final:";
                for (double v : out.result.y) std::cout << ' ' << mrkc::format_value(v);
                std::cout << "\n";
            }
        }
    } catch (const mrkc::BlowUpError& e) {
        std::cerr << "blow-up: " << e.what() << "\n";
        return kExitBlowUp;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}
