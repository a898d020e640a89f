#include "mrkc/tableau.hpp"

#include <cmath>
#include <string>

#include "mrkc/cheb.hpp"
#include "mrkc/errors.hpp"

namespace mrkc {

ChebTableau build_tableau(int stages, double damping) {
    if (stages < 1) {
        throw InvalidInputError("build_tableau: stages must be >= 1, got " + std::to_string(stages));
    }
    if (!(damping >= 0.0) || !std::isfinite(damping)) {
        throw InvalidInputError("build_tableau: damping must be finite and >= 0");
    }

    ChebTableau tab;
    tab.stages = stages;
    tab.damping = damping;
    tab.omega0 = 1.0 + damping / (static_cast<double>(stages) * stages);
    tab.beta = 2.0 - 4.0 * damping / 3.0;

    // One recurrence pass gives every T_j(omega0) and, at j = stages, the
    // derivative needed for omega1.
    tab.b.assign(stages + 1, 0.0);
    double t_prev = 1.0, t_cur = tab.omega0;  // T_0, T_1
    double d_prev = 0.0, d_cur = 1.0;         // T_0', T_1'
    tab.b[0] = 1.0;
    if (stages >= 1) tab.b[1] = 1.0 / t_cur;
    for (int j = 2; j <= stages; ++j) {
        const double t_next = 2.0 * tab.omega0 * t_cur - t_prev;
        const double d_next = 2.0 * t_cur + 2.0 * tab.omega0 * d_cur - d_prev;
        t_prev = t_cur;
        t_cur = t_next;
        d_prev = d_cur;
        d_cur = d_next;
        if (!std::isfinite(t_cur)) {
            throw NumericOverflowError("build_tableau: T_" + std::to_string(j) +
                                       "(omega0) overflowed (stages=" + std::to_string(stages) +
                                       ", damping=" + std::to_string(damping) + ")");
        }
        tab.b[j] = 1.0 / t_cur;
    }
    tab.omega1 = t_cur / d_cur;
    tab.ell = 2.0 * tab.omega0 / tab.omega1;

    tab.mu.assign(stages + 1, 0.0);
    tab.nu.assign(stages + 1, 0.0);
    tab.kappa.assign(stages + 1, 0.0);
    tab.mu[1] = tab.omega1 / tab.omega0;
    for (int j = 2; j <= stages; ++j) {
        tab.mu[j] = 2.0 * tab.omega1 * tab.b[j] / tab.b[j - 1];
        tab.nu[j] = 2.0 * tab.omega0 * tab.b[j] / tab.b[j - 1];
        tab.kappa[j] = -tab.b[j] / tab.b[j - 2];
    }

    if (!std::isfinite(tab.omega1) || !std::isfinite(tab.ell)) {
        throw NumericOverflowError("build_tableau: non-finite coefficients");
    }
    return tab;
}

double stability_interval(int stages, double damping) {
    return build_tableau(stages, damping).ell;
}

}  // namespace mrkc
