#include "mrkc/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mrkc/cheb.hpp"
#include "mrkc/errors.hpp"
#include "mrkc/integrators.hpp"
#include "mrkc/problems.hpp"
#include "mrkc/spectral.hpp"

namespace mrkc {

double phi(double z) {
    if (!std::isfinite(z)) throw InvalidInputError("phi: z must be finite");
    if (std::abs(z) < 1e-4) {
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
    }
    return std::expm1(z) / z;
}

double rkc_stability_poly(const ChebTableau& tab, double z) {
    return tab.b[tab.stages] * cheb_eval(tab.stages, tab.omega0 + tab.omega1 * z).value;
}

double rkc_stability_poly(int s, double damping, double z) {
    return rkc_stability_poly(build_tableau(s, damping), z);
}

double inner_stability_poly(int m, double damping, double z) {
    return rkc_stability_poly(build_tableau(m, damping), z);
}

PhiM::PhiM(int m, double damping) : tab_(build_tableau(m, damping)) {
    // Taylor coefficients of Phi_m at 0: Phi_m(z) = sum_k P^(k+1)(0)/(k+1)! z^k
    // with P^(j)(0) = a_m upsilon1^j T_m^(j)(upsilon0).
    const int order = static_cast<int>(taylor_.size());
    const std::vector<double> derivs = cheb_derivatives(m, tab_.omega0, order);
    double pow_u1 = tab_.omega1;  // upsilon1^(k+1)
    double fact = 1.0;            // (k+1)!
    for (int k = 0; k < order; ++k) {
        fact *= static_cast<double>(k + 1);
        taylor_[k] = tab_.b[m] * pow_u1 * derivs[k + 1] / fact;
        pow_u1 *= tab_.omega1;
    }
    // P_m'(0) = a_m upsilon1 T_m'(upsilon0) = 1 identically; pin the leading
    // coefficient so Phi_m(0) = 1 holds exactly.
    taylor_[0] = 1.0;
}

double PhiM::inner_poly(double z) const { return rkc_stability_poly(tab_, z); }

double PhiM::second_deriv_at_zero() const {
    // P_m''(0) = a_m T_m''(upsilon0) upsilon1^2 = 2 * taylor_[1]
    return 2.0 * taylor_[1];
}

double PhiM::operator()(double z) const {
    if (!std::isfinite(z)) throw InvalidInputError("PhiM: z must be finite");
    if (std::abs(z) < 0.5) {
        double acc = taylor_[taylor_.size() - 1];
        for (int k = static_cast<int>(taylor_.size()) - 2; k >= 0; --k) {
            acc = taylor_[k] + z * acc;
        }
        return acc;
    }
    return (inner_poly(z) - 1.0) / z;
}

double phi_m(int m, double damping, double z) { return PhiM(m, damping)(z); }

double mrkc_stability_poly(int s, int m, double outer_damping, double inner_damping, double lambda,
                           double zeta, double tau, double eta) {
    const PhiM phim(m, inner_damping);
    const ChebTableau outer = build_tableau(s, outer_damping);
    return rkc_stability_poly(outer, tau * phim(eta * lambda) * (lambda + zeta));
}

std::vector<ScanRecord> scan_scalar_stability(int s, int m, double outer_damping,
                                              double inner_damping, double tau, double eta,
                                              const Vec& zeta_grid, const Vec& lambda_grid,
                                              Exec exec) {
    if (m < 2) throw InvalidInputError("scan_scalar_stability: m must be >= 2");
    if (!(tau > 0.0) || !(eta > 0.0)) {
        throw InvalidInputError("scan_scalar_stability: tau and eta must be positive");
    }
    const ChebTableau outer = build_tableau(s, outer_damping);
    const PhiM phim(m, inner_damping);
    const double ell_s = outer.ell;
    const double ell_m = phim.tableau().ell;
    const double slack = 1.0 + 1e-12;

    const double eta_min = 6.0 * tau / ell_s * (static_cast<double>(m) * m) /
                           (static_cast<double>(m) * m - 1.0);
    if (eta * slack < eta_min) {
        throw PreconditionError("scan_scalar_stability: eta >= (6 tau/ell_s) m^2/(m^2-1) violated (eta = " +
                                std::to_string(eta) + ", lower bound = " + std::to_string(eta_min) + ")");
    }
    for (double zeta : zeta_grid) {
        if (!(zeta <= 0.0) || tau * std::abs(zeta) > ell_s * slack) {
            throw PreconditionError("scan_scalar_stability: tau*|zeta| <= ell_s violated (zeta = " +
                                    std::to_string(zeta) + ", ell_s = " + std::to_string(ell_s) + ")");
        }
    }
    for (double lambda : lambda_grid) {
        if (!(lambda <= 0.0) || eta * std::abs(lambda) > ell_m * slack) {
            throw PreconditionError("scan_scalar_stability: eta*|lambda| <= ell_m violated (lambda = " +
                                    std::to_string(lambda) + ", ell_m = " + std::to_string(ell_m) + ")");
        }
    }

    std::vector<ScanRecord> records(zeta_grid.size() * lambda_grid.size());
    const std::int64_t nl = static_cast<std::int64_t>(lambda_grid.size());
    parallel_for(static_cast<std::int64_t>(records.size()), exec, [&](std::int64_t idx) {
        const double zeta = zeta_grid[static_cast<size_t>(idx / nl)];
        const double lambda = lambda_grid[static_cast<size_t>(idx % nl)];
        const double r = rkc_stability_poly(outer, tau * phim(eta * lambda) * (lambda + zeta));
        records[idx] = {lambda, std::abs(r), 1.0};
    });
    return records;
}

std::pair<double, double> scan_phi_window(int m, double damping, double w, const Vec& z_grid) {
    const PhiM phim(m, damping);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double z : z_grid) {
        const double v = phim(z) * (z + w);
        lo = std::min(lo, v - w);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

bool scan_phi_continuous(double eta, double zeta, const Vec& lambda_grid) {
    const double tol = 1e-12 * (1.0 + std::abs(zeta));
    for (double lambda : lambda_grid) {
        const double v = phi(eta * lambda) * (lambda + zeta);
        if (v < zeta - tol || v > tol) return false;
    }
    return true;
}

DenseMatrix averaged_matrix(const MatrixSplitting& split, double eta, int m, double damping,
                            Exec exec) {
    const int n = split.a.rows();
    if (split.a_fast.rows() != n || split.a_slow.rows() != n) {
        throw InvalidInputError("averaged_matrix: splitting dimensions disagree");
    }
    if (!(eta > 0.0) || m < 1) {
        throw InvalidInputError("averaged_matrix: need eta > 0 and m >= 1");
    }
    const ChebTableau inner = build_tableau(m, damping);
    MrkcParameters params;
    params.m = m;
    params.eta = eta;
    params.inner_damping = damping;

    DenseMatrix result(n, n);
    parallel_for(n, exec, [&](std::int64_t j) {
        // Per-column system: keeps counters and scratch local to this cell.
        SplitSystem sys(
            n, [&](double, const Vec& y, Vec& out) { matvec(split.a_fast, y, out); },
            [&](double, const Vec& y, Vec& out) { matvec(split.a_slow, y, out); });
        Vec e(n, 0.0);
        e[static_cast<size_t>(j)] = 1.0;
        const Vec col = averaged_force(sys, 0.0, e, params, inner);
        for (int i = 0; i < n; ++i) result(i, static_cast<int>(j)) = col[i];
    });
    return result;
}

std::vector<ScanRecord> scan_two_by_two(int s, int m, double damping, double tau,
                                        double sigma_factor, double eta_factor, const Vec& z_grid,
                                        Exec exec) {
    if (!(tau > 0.0) || m < 2) throw InvalidInputError("scan_two_by_two: need tau > 0 and m >= 2");
    const ChebTableau outer = build_tableau(s, damping);
    const double zeta = -outer.ell / tau;
    const double eta = eta_factor * (6.0 * tau / outer.ell) * (static_cast<double>(m) * m) /
                       (static_cast<double>(m) * m - 1.0);
    const double w_abs = eta * std::abs(zeta);

    std::vector<ScanRecord> records(z_grid.size());
    parallel_for(static_cast<std::int64_t>(z_grid.size()), exec, [&](std::int64_t idx) {
        const double z = z_grid[static_cast<size_t>(idx)];
        const double lambda = z / eta;
        const double sigma = sigma_factor * std::sqrt(lambda * zeta);
        DenseMatrix a(2, 2);
        a(0, 0) = zeta;
        a(0, 1) = sigma;
        a(1, 0) = sigma;
        a(1, 1) = lambda;
        const MatrixSplitting split = build_masked_splitting(a, {false, true});
        const DenseMatrix a_eta = averaged_matrix(split, eta, m, damping, Exec::seq);
        records[idx] = {z, eta * dense_spectral_radius(a_eta), w_abs};
    });
    return records;
}

std::vector<ScanRecord> scan_splitting_stability(const MatrixSplitting& split, double tau, int s,
                                                 double outer_damping, const Vec& etabar_grid,
                                                 Exec exec) {
    if (!(tau > 0.0) || s < 1) {
        throw InvalidInputError("scan_splitting_stability: need tau > 0 and s >= 1");
    }
    const bool has_fast = std::find(split.mask.begin(), split.mask.end(), char(1)) != split.mask.end();
    const bool has_slow = std::find(split.mask.begin(), split.mask.end(), char(0)) != split.mask.end();
    if (!has_fast || !has_slow) {
        throw PreconditionError("scan_splitting_stability: mask must mark both fast and slow rows");
    }
    const double beta = 2.0 - 4.0 * outer_damping / 3.0;
    const double bs2 = beta * static_cast<double>(s) * s;
    const double rho_slow = dense_spectral_radius(split.a_slow);
    if (tau * rho_slow > bs2 * (1.0 + 1e-12)) {
        throw PreconditionError("scan_splitting_stability: tau*rho(A_S) <= beta*s^2 violated (tau*rho = " +
                                std::to_string(tau * rho_slow) + ", beta*s^2 = " + std::to_string(bs2) + ")");
    }
    for (double etabar : etabar_grid) {
        if (!(etabar > 0.0)) {
            throw PreconditionError("scan_splitting_stability: etabar > 0 violated");
        }
    }
    const double rho_fast = dense_spectral_radius(split.a_fast);
    const double beta_bar = 2.0 - 4.0 * kInnerDampingRelaxed / 3.0;

    std::vector<ScanRecord> records(etabar_grid.size());
    parallel_for(static_cast<std::int64_t>(etabar_grid.size()), exec, [&](std::int64_t idx) {
        const double etabar = etabar_grid[static_cast<size_t>(idx)];
        int mbar = std::max(1, static_cast<int>(std::floor(std::sqrt(etabar * rho_fast / beta_bar))));
        while (etabar * rho_fast > beta_bar * static_cast<double>(mbar) * mbar) ++mbar;
        const DenseMatrix a_eta = averaged_matrix(split, etabar, mbar, kInnerDampingRelaxed, Exec::seq);
        records[idx] = {-etabar * bs2 / tau, tau * dense_spectral_radius(a_eta), bs2};
    });
    return records;
}

SpeedupResult speedup_model(const CostInputs& in) {
    if (!(in.c_fast >= 0.0) || !(in.c_fast <= 1.0) || !(in.rho_ratio >= 0.0)) {
        throw InvalidInputError("speedup_model: need c_fast in [0,1] and rho_ratio >= 0");
    }
    const double r = in.rho_ratio;
    SpeedupResult out;
    out.speedup = std::sqrt(1.0 + r) / (1.0 + in.c_fast * (std::sqrt(1.0 + 3.0 * r) - 1.0));
    // Relaxed inner stage count in continuous relaxation, floored at one stage.
    const double beta_bar = 2.0 - 4.0 * 0.1 / 3.0;
    const double m_relaxed = std::max(1.0, std::sqrt(2.0 * r / beta_bar));
    out.speedup_relaxed = std::sqrt(1.0 + r) / (1.0 + in.c_fast * (m_relaxed - 1.0));
    out.c_fast_max = r > 0.0 ? (std::sqrt(1.0 + r) - 1.0) / (std::sqrt(1.0 + 3.0 * r) - 1.0)
                             : 1.0 / 3.0;  // continuous limit as rho_ratio -> 0
    return out;
}

ErrorBoundResult modified_eq_error_bound(const Vec& lambdas, const Vec& zetas, double eta, double t,
                                         const Vec& y0) {
    const size_t n = lambdas.size();
    if (zetas.size() != n || y0.size() != n) {
        throw InvalidInputError("modified_eq_error_bound: vectors must have equal length");
    }
    if (!(eta >= 0.0) || !(t > 0.0)) {
        throw InvalidInputError("modified_eq_error_bound: need eta >= 0 and t > 0");
    }
    for (size_t i = 0; i < n; ++i) {
        if (lambdas[i] > 0.0 || zetas[i] > 0.0) {
            throw InvalidInputError("modified_eq_error_bound: lambdas and zetas must be <= 0");
        }
    }

    double gap_sq = 0.0;
    double mu = -std::numeric_limits<double>::infinity();
    double min_phi = std::numeric_limits<double>::infinity();
    double max_dev = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double rate = lambdas[i] + zetas[i];
        const double phi_i = phi(eta * lambdas[i]);
        const double exact = y0[i] * std::exp(rate * t);
        const double modified = y0[i] * std::exp(phi_i * rate * t);
        gap_sq += (exact - modified) * (exact - modified);
        mu = std::max(mu, rate);
        min_phi = std::min(min_phi, phi_i);
        max_dev = std::max(max_dev, std::abs(1.0 - phi_i));
    }
    const double mu_eta = mu * min_phi;

    // integral of exp(mu_eta (t - s)) ||f(y(s))|| ds by composite Simpson.
    const int intervals = 2000;
    const double h = t / intervals;
    double integral = 0.0;
    for (int k = 0; k <= intervals; ++k) {
        const double sk = k * h;
        double norm_f_sq = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double rate = lambdas[i] + zetas[i];
            const double fi = rate * y0[i] * std::exp(rate * sk);
            norm_f_sq += fi * fi;
        }
        const double g = std::exp(mu_eta * (t - sk)) * std::sqrt(norm_f_sq);
        const double weight = (k == 0 || k == intervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        integral += weight * g;
    }
    integral *= h / 3.0;

    return {std::sqrt(gap_sq), max_dev * integral};
}

bool check_ddR_monotone(int m, const Vec& v0_grid) {
    if (m < 1) throw InvalidInputError("check_ddR_monotone: m must be >= 1");
    double prev = -std::numeric_limits<double>::infinity();
    for (double v0 : v0_grid) {
        const ChebTriple c = cheb_eval(m, v0);
        const double val = c.value * c.d2 / (c.d1 * c.d1);
        if (val < prev - 1e-12 * std::max(1.0, std::abs(prev))) return false;
        prev = val;
    }
    return true;
}

}  // namespace mrkc
