#pragma once

#include <cstdint>

#include "mrkc/matrix.hpp"
#include "mrkc/system.hpp"

namespace mrkc {

/// Settings for the nonlinear power method. The loose defaults mirror common
/// stabilized-integrator practice: stage counts only need the spectral radius
/// to within ~10%.
struct PowerMethodConfig {
    int max_iters = 50;
    double rel_tol = 1e-2;
    double perturbation = 0.0;  // 0 -> sqrt(machine eps) * (1 + ||y||)
    double safety = 1.05;
    std::uint64_t seed = 20240117;
};

/// Estimate the spectral radius of the Jacobian of rhs at (t, y) by power
/// iteration on forward-difference Jacobian-vector products. Returns
/// safety * estimate. If `warm` is non-null it supplies the start direction
/// when non-empty and receives the final direction, so consecutive calls
/// along a trajectory converge in a few iterations.
double estimate_spectral_radius(const RhsFn& rhs, double t, const Vec& y,
                                const PowerMethodConfig& cfg = {}, Vec* warm = nullptr);

/// Spectral radius of a dense matrix: closed form for 2x2, otherwise power
/// iteration with a two-term recurrence fit to catch complex-conjugate
/// dominant pairs, falling back to a Gelfand estimate by repeated squaring
/// when the iteration stagnates. Reliable when the dominant eigenvalue is
/// real or a clean conjugate pair, which covers the diffusion-dominated
/// matrices built here.
double dense_spectral_radius(const DenseMatrix& a, double rel_tol = 1e-10);

}  // namespace mrkc
