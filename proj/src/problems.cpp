#include "mrkc/problems.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "mrkc/errors.hpp"
#include "mrkc/spectral.hpp"

namespace mrkc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double error_norm(const Problem& p, const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw InvalidInputError("error_norm: size mismatch");
    if (p.norm == ErrorNorm::linf) {
        double m = 0.0;
        for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
        return m;
    }
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double w = i < p.weights.size() ? p.weights[i] : 0.0;
        acc += w * (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(acc);
}

MatrixSplitting build_masked_splitting(const DenseMatrix& a, const std::vector<char>& mask) {
    if (a.rows() != a.cols()) {
        throw InvalidInputError("build_masked_splitting: matrix must be square");
    }
    if (static_cast<int>(mask.size()) != a.rows()) {
        throw InvalidInputError("build_masked_splitting: mask length " + std::to_string(mask.size()) +
                                " does not match dimension " + std::to_string(a.rows()));
    }
    MatrixSplitting split;
    split.a = a;
    split.a_fast = DenseMatrix(a.rows(), a.cols());
    split.a_slow = DenseMatrix(a.rows(), a.cols());
    split.mask = mask;
    for (int i = 0; i < a.rows(); ++i) {
        DenseMatrix& dst = mask[i] ? split.a_fast : split.a_slow;
        for (int j = 0; j < a.cols(); ++j) dst(i, j) = a(i, j);
    }
    return split;
}

SplitSystem make_linear_system(const MatrixSplitting& split) {
    auto data = std::make_shared<MatrixSplitting>(split);
    SplitSystem sys(
        split.a.rows(), [data](double, const Vec& y, Vec& out) { matvec(data->a_fast, y, out); },
        [data](double, const Vec& y, Vec& out) { matvec(data->a_slow, y, out); });
    const double rho_f = dense_spectral_radius(split.a_fast);
    const double rho_s = dense_spectral_radius(split.a_slow);
    const double rho = dense_spectral_radius(split.a);
    sys.rho_fast = [rho_f](double, const Vec&) { return rho_f; };
    sys.rho_slow = [rho_s](double, const Vec&) { return rho_s; };
    sys.rho_full = [rho](double, const Vec&) { return rho; };
    return sys;
}

Problem robertson_problem() {
    Problem p;
    p.name = "robertson";
    p.system = SplitSystem(
        3,
        [](double, const Vec& y, Vec& out) {
            out[0] = 0.0;
            out[1] = -1e4 * y[1] * y[2];
            out[2] = 0.0;
        },
        [](double, const Vec& y, Vec& out) {
            out[0] = -0.04 * y[0] + 1e4 * y[1] * y[2];
            out[1] = 0.04 * y[0] - 3e7 * y[1] * y[1];
            out[2] = 3e7 * y[1] * y[1];
        });
    p.y0 = {1.0, 2e-5, 1e-1};
    p.t_end = 100.0;
    p.norm = ErrorNorm::linf;
    return p;
}

Problem multirate_test_problem(double lambda, double zeta) {
    if (lambda > 0.0 || zeta > 0.0) {
        throw InvalidInputError("multirate_test_problem: lambda and zeta must be <= 0");
    }
    Problem p;
    p.name = "multirate-test";
    p.system = SplitSystem(
        1, [lambda](double, const Vec& y, Vec& out) { out[0] = lambda * y[0]; },
        [zeta](double, const Vec& y, Vec& out) { out[0] = zeta * y[0]; });
    p.system.rho_fast = [lambda](double, const Vec&) { return std::abs(lambda); };
    p.system.rho_slow = [zeta](double, const Vec&) { return std::abs(zeta); };
    p.system.rho_full = [lambda, zeta](double, const Vec&) { return std::abs(lambda + zeta); };
    p.y0 = {1.0};
    p.t_end = 1.0;
    p.norm = ErrorNorm::linf;
    return p;
}

TwoByTwoProblem two_by_two_problem(double lambda, double zeta, double sigma) {
    if (lambda > 0.0 || zeta > 0.0 || sigma * sigma > lambda * zeta) {
        throw InvalidInputError("two_by_two_problem: need lambda, zeta <= 0 and sigma^2 <= lambda*zeta");
    }
    DenseMatrix a(2, 2);
    a(0, 0) = zeta;
    a(0, 1) = sigma;
    a(1, 0) = sigma;
    a(1, 1) = lambda;
    TwoByTwoProblem out;
    out.splitting = build_masked_splitting(a, {false, true});
    out.problem.name = "two-by-two";
    out.problem.system = make_linear_system(out.splitting);
    // rho_F = |lambda| and rho_S = |zeta| exactly for this splitting.
    out.problem.system.rho_fast = [lambda](double, const Vec&) { return std::abs(lambda); };
    out.problem.system.rho_slow = [zeta](double, const Vec&) { return std::abs(zeta); };
    out.problem.y0 = {1.0, 1.0};
    out.problem.t_end = 1.0;
    out.problem.norm = ErrorNorm::linf;
    return out;
}

namespace {

struct HeatData {
    DenseMatrix a_fast;
    DenseMatrix a_slow;
    Vec nodes;  // interior coordinates
};

}  // namespace

RefinedHeatProblem refined_heat_1d(const RefinedHeatConfig& cfg) {
    const double h_coarse = cfg.coarse_spacing;
    if (!(h_coarse > 0.0) || cfg.refine_levels < 0) {
        throw InvalidInputError("refined_heat_1d: bad spacing or refinement level");
    }
    if (!(cfg.fine_lo > 0.0) || !(cfg.fine_hi < 1.0) || !(cfg.fine_lo < cfg.fine_hi)) {
        throw InvalidInputError("refined_heat_1d: fine region must lie strictly inside (0,1)");
    }
    const auto aligned = [&](double x) {
        const double k = x / h_coarse;
        return std::abs(k - std::round(k)) < 1e-9;
    };
    if (!aligned(cfg.fine_lo) || !aligned(cfg.fine_hi) || !aligned(1.0)) {
        throw InvalidInputError("refined_heat_1d: fine region and domain must align with the coarse grid");
    }

    const double h_fine = h_coarse / std::pow(2.0, cfg.refine_levels);
    Vec all_nodes;
    for (double x = 0.0; x < cfg.fine_lo - 1e-12; x += h_coarse) all_nodes.push_back(x);
    for (double x = cfg.fine_lo; x < cfg.fine_hi - 1e-12; x += h_fine) all_nodes.push_back(x);
    for (double x = cfg.fine_hi; x < 1.0 - 1e-12; x += h_coarse) all_nodes.push_back(x);
    all_nodes.push_back(1.0);

    const int n_int = static_cast<int>(all_nodes.size()) - 2;
    DenseMatrix a(n_int, n_int);
    std::vector<char> mask(n_int, 0);
    Vec nodes(n_int);
    for (int k = 0; k < n_int; ++k) {
        const double xl = all_nodes[k], xc = all_nodes[k + 1], xr = all_nodes[k + 2];
        const double hl = xc - xl, hr = xr - xc;
        nodes[k] = xc;
        // Three-point Laplacian on unequal spacings; Dirichlet columns dropped.
        if (k > 0) a(k, k - 1) = 2.0 / (hl * (hl + hr));
        a(k, k) = -2.0 / (hl * hr);
        if (k < n_int - 1) a(k, k + 1) = 2.0 / (hr * (hl + hr));
        // Fast rows: nodes of refined cells and their direct neighbors.
        mask[k] = xc >= cfg.fine_lo - h_coarse - 1e-12 && xc <= cfg.fine_hi + h_coarse + 1e-12;
    }

    RefinedHeatProblem out;
    out.splitting = build_masked_splitting(a, mask);
    out.nodes = nodes;

    auto data = std::make_shared<HeatData>(HeatData{out.splitting.a_fast, out.splitting.a_slow, nodes});
    const int dim = n_int + 1;  // trailing component carries the time
    SplitSystem sys(
        dim,
        [data, n_int](double, const Vec& y, Vec& out_v) {
            for (int i = 0; i < n_int; ++i) {
                double acc = 0.0;
                for (int j = 0; j < n_int; ++j) acc += data->a_fast(i, j) * y[j];
                out_v[i] = acc;
            }
            out_v[n_int] = 0.0;
        },
        [data, n_int](double, const Vec& y, Vec& out_v) {
            const double t = y[n_int];
            const double st = std::sin(kPi * t);
            const double source_t = kPi * std::sin(2.0 * kPi * t);
            for (int i = 0; i < n_int; ++i) {
                double acc = 0.0;
                for (int j = 0; j < n_int; ++j) acc += data->a_slow(i, j) * y[j];
                const double sx = std::sin(kPi * data->nodes[i]);
                out_v[i] = acc + sx * (source_t + kPi * kPi * st * st);
            }
            out_v[n_int] = 1.0;
        });
    const double rho_f = dense_spectral_radius(out.splitting.a_fast);
    const double rho_s = dense_spectral_radius(out.splitting.a_slow);
    const double rho = dense_spectral_radius(out.splitting.a);
    sys.rho_fast = [rho_f](double, const Vec&) { return rho_f; };
    sys.rho_slow = [rho_s](double, const Vec&) { return rho_s; };
    sys.rho_full = [rho](double, const Vec&) { return rho; };

    out.problem.name = "heat";
    out.problem.system = std::move(sys);
    out.problem.y0.assign(dim, 0.0);  // u(x, 0) = 0, t = 0
    out.problem.t_end = cfg.t_end;
    out.problem.norm = ErrorNorm::l2_weighted;
    out.problem.weights.assign(dim, 0.0);
    for (int k = 0; k < n_int; ++k) {
        out.problem.weights[k] = 0.5 * (all_nodes[k + 2] - all_nodes[k]);
    }
    out.exact = [nodes, n_int](double t) {
        Vec u(n_int + 1);
        const double st = std::sin(kPi * t);
        for (int i = 0; i < n_int; ++i) u[i] = std::sin(kPi * nodes[i]) * st * st;
        u[n_int] = t;
        return u;
    };
    return out;
}

IntegroDiffProblem integro_differential_problem(const IntegroDiffConfig& cfg) {
    const int n = cfg.n_cells;
    if (n < 4) throw InvalidInputError("integro_differential_problem: need at least 4 cells");
    const double dx = 1.0 / n;
    const double inv_dx2 = 1.0 / (dx * dx);
    const double sigma = cfg.sigma;

    Vec nodes(n);
    for (int i = 0; i < n; ++i) nodes[i] = (i + 1) * dx;  // unknowns at x_1..x_N

    const auto boundary = [](double t) { return 1.0 - 0.5 * std::sqrt(std::max(t, 0.0)); };

    const int dim = n + 1;
    SplitSystem sys(
        dim,
        [n, inv_dx2, boundary](double, const Vec& y, Vec& out) {
            const double u0 = boundary(y[n]);
            out[0] = (u0 - 2.0 * y[0] + y[1]) * inv_dx2;
            for (int k = 1; k < n - 1; ++k) {
                out[k] = (y[k - 1] - 2.0 * y[k] + y[k + 1]) * inv_dx2;
            }
            out[n - 1] = 2.0 * (y[n - 2] - y[n - 1]) * inv_dx2;  // mirrored ghost node
            out[n] = 0.0;
        },
        [n, dx, sigma, nodes, boundary](double, const Vec& y, Vec& out) {
            const double u0 = boundary(y[n]);
            const double u0_4 = u0 * u0 * u0 * u0;
            for (int k = 0; k < n; ++k) {
                const double xk = nodes[k];
                // composite trapezoid over all N+1 grid nodes, boundary included
                double acc = 0.5 * u0_4 / ((1.0 + xk) * (1.0 + xk));
                for (int j = 0; j < n; ++j) {
                    const double uj = y[j];
                    const double d = 1.0 + std::abs(xk - nodes[j]);
                    const double w = (j == n - 1) ? 0.5 : 1.0;
                    acc += w * uj * uj * uj * uj / (d * d);
                }
                out[k] = -sigma * dx * acc;
            }
            out[n] = 1.0;
        });

    IntegroDiffProblem out;
    out.nodes = nodes;
    out.problem.name = "intdiff";
    out.problem.system = std::move(sys);
    out.problem.y0.assign(dim, 0.0);
    for (int k = 0; k < n; ++k) {
        const double c = std::cos(nodes[k] * kPi / 2.0);
        out.problem.y0[k] = c * c;
    }
    out.problem.t_end = 1.0;
    out.problem.norm = ErrorNorm::l2_weighted;
    out.problem.weights.assign(dim, 0.0);
    for (int k = 0; k < n; ++k) out.problem.weights[k] = (k == n - 1) ? 0.5 * dx : dx;
    return out;
}

}  // namespace mrkc
