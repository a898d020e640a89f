#pragma once

#include <array>
#include <utility>
#include <vector>

#include "mrkc/matrix.hpp"
#include "mrkc/parallel.hpp"
#include "mrkc/tableau.hpp"

namespace mrkc {

struct MatrixSplitting;  // problems.hpp

/// phi(z) = (e^z - 1)/z, phi(0) = 1; series branch below |z| = 1e-4.
double phi(double z);

/// Stability polynomial R_s(z) = b_s T_s(omega0 + omega1 z) of the s-stage
/// Chebyshev method; the same formula evaluated on an inner tableau is the
/// inner polynomial P_m.
double rkc_stability_poly(const ChebTableau& tab, double z);
double rkc_stability_poly(int s, double damping, double z);
double inner_stability_poly(int m, double damping, double z);

/// Phi_m(z) = (P_m(z) - 1)/z with Phi_m(0) = 1, the discrete counterpart of
/// phi. Evaluations near the origin cancel badly in the direct quotient, so
/// a Taylor expansion around 0 is used for |z| < 0.5; the expansion is exact
/// to machine precision there (the underlying entire function has
/// factorially decaying coefficients).
class PhiM {
public:
    PhiM(int m, double damping);

    double operator()(double z) const;
    double inner_poly(double z) const;       // P_m(z)
    double second_deriv_at_zero() const;     // P_m''(0); Phi_m'(0) = P_m''(0)/2
    const ChebTableau& tableau() const { return tab_; }

private:
    ChebTableau tab_;
    std::array<double, 16> taylor_{};  // Taylor coefficients of Phi_m at 0
};

double phi_m(int m, double damping, double z);

/// R_{s,m}(lambda, zeta, tau, eta) = R_s(tau Phi_m(eta lambda)(lambda + zeta)).
double mrkc_stability_poly(int s, int m, double outer_damping, double inner_damping,
                           double lambda, double zeta, double tau, double eta);

struct ScanRecord {
    double abscissa = 0.0;
    double value = 0.0;
    double threshold = 0.0;
};

/// |R_{s,m}| over a (zeta, lambda) product grid inside the stability-theorem
/// region; the grids and eta must satisfy tau*|zeta| <= ell_s,
/// eta*|lambda| <= ell_m and eta >= (6 tau/ell_s) m^2/(m^2-1), or a
/// precondition error naming the violated inequality is thrown.
std::vector<ScanRecord> scan_scalar_stability(int s, int m, double outer_damping,
                                              double inner_damping, double tau, double eta,
                                              const Vec& zeta_grid, const Vec& lambda_grid,
                                              Exec exec = Exec::par);

/// min over the grid of Phi_m(z)(z + w) - w and max of Phi_m(z)(z + w); the
/// window condition holds iff the min is >= 0 (and the max <= 0).
std::pair<double, double> scan_phi_window(int m, double damping, double w, const Vec& z_grid);

/// true iff phi(eta*lambda)(lambda + zeta) stays in [zeta, 0] on the grid.
bool scan_phi_continuous(double eta, double zeta, const Vec& lambda_grid);

/// A_eta = Phi_m(eta A_F) A, assembled column by column by running the inner
/// recurrence on unit vectors (exact for linear systems).
DenseMatrix averaged_matrix(const MatrixSplitting& split, double eta, int m, double damping,
                            Exec exec = Exec::par);

/// eta*rho(A_eta) against |w| = eta*|zeta| on the weakly coupled 2x2 model:
/// zeta = -ell_s/tau, sigma = sigma_factor*sqrt(lambda*zeta), lambda = z/eta,
/// eta = eta_factor times the stability-theorem lower bound.
std::vector<ScanRecord> scan_two_by_two(int s, int m, double damping, double tau,
                                        double sigma_factor, double eta_factor, const Vec& z_grid,
                                        Exec exec = Exec::par);

/// tau*rho(Phi_mbar(etabar A_F) A) against w(etabar) = -etabar*beta*s^2/tau
/// on a masked matrix splitting; mbar follows the relaxed inner condition.
std::vector<ScanRecord> scan_splitting_stability(const MatrixSplitting& split, double tau, int s,
                                                 double outer_damping, const Vec& etabar_grid,
                                                 Exec exec = Exec::par);

struct CostInputs {
    double c_fast = 0.0;    // relative cost of one f_F evaluation, in [0, 1]
    double rho_ratio = 0.0; // rho_F / rho_S
};

struct SpeedupResult {
    double speedup = 1.0;          // S, strict conditions
    double speedup_relaxed = 1.0;  // S-bar, relaxed conditions
    double c_fast_max = 0.0;       // largest c_F with S > 1
};

SpeedupResult speedup_model(const CostInputs& in);

struct ErrorBoundResult {
    double gap = 0.0;    // ||y(t) - y_eta(t)||_2
    double bound = 0.0;  // stiffness-independent a priori bound
};

/// Exact solution vs. exact modified-equation solution for a diagonal linear
/// split system, together with the a priori bound evaluated by quadrature.
ErrorBoundResult modified_eq_error_bound(const Vec& lambdas, const Vec& zetas, double eta, double t,
                                         const Vec& y0);

/// true iff P_m''(0) as a function of upsilon0, i.e.
/// T_m(v) T_m''(v)/T_m'(v)^2, is non-decreasing along the grid.
bool check_ddR_monotone(int m, const Vec& v0_grid);

}  // namespace mrkc
