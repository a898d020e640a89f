#pragma once

#include <vector>

namespace mrkc {

/// Recurrence coefficients of an s-stage Chebyshev method for a given damping
/// parameter. The same tableau drives the outer integrator (read the fields
/// as omega0/omega1/b/mu/nu/kappa) and the inner auxiliary solver (read them
/// as upsilon0/upsilon1/a/alpha/beta/gamma): the formulas are identical, only
/// the stage count and damping differ.
///
/// Coefficient arrays are indexed by stage number j: mu[j], nu[j], kappa[j]
/// for j in [1, stages] (slot 0 unused, nu[1]/kappa[1] unused), and
/// b[j] = 1/T_j(omega0) for j in [0, stages].
struct ChebTableau {
    int stages = 0;
    double damping = 0.0;
    double omega0 = 0.0;  // 1 + damping/stages^2
    double omega1 = 0.0;  // T_s(omega0)/T_s'(omega0)
    std::vector<double> b;
    std::vector<double> mu;
    std::vector<double> nu;
    std::vector<double> kappa;
    double ell = 0.0;   // real stability interval length, 2*omega0/omega1
    double beta = 0.0;  // 2 - 4*damping/3; beta*stages^2 <= ell
};

/// Build all coefficients eagerly in O(stages).
ChebTableau build_tableau(int stages, double damping);

/// Length of the real stability interval [-ell, 0] of the s-stage method.
double stability_interval(int stages, double damping);

}  // namespace mrkc
