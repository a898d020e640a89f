#pragma once

#include <functional>
#include <vector>

#include "mrkc/matrix.hpp"
#include "mrkc/system.hpp"

namespace mrkc {

/// Row partition A = DA + (I-D)A of a discrete operator by a 0/1 mask
/// marking the fast degrees of freedom.
struct MatrixSplitting {
    DenseMatrix a;
    DenseMatrix a_fast;  // DA: rows of A where mask is set, zero elsewhere
    DenseMatrix a_slow;  // (I-D)A
    std::vector<char> mask;
};

MatrixSplitting build_masked_splitting(const DenseMatrix& a, const std::vector<char>& mask);

/// Linear split system f_F = A_F y, f_S = A_S y with analytic spectral-radius
/// callbacks taken from the dense matrices.
SplitSystem make_linear_system(const MatrixSplitting& split);

/// Robertson's chemical kinetics benchmark with the severely stiff reaction
/// term split into the fast part. Spectral radii are left to the power
/// method.
Problem robertson_problem();

/// Scalar multirate test equation y' = lambda y + zeta y (lambda, zeta <= 0).
Problem multirate_test_problem(double lambda, double zeta);

struct TwoByTwoProblem {
    MatrixSplitting splitting;
    Problem problem;
};

/// The weakly coupled 2x2 model with A = [[zeta, sigma], [sigma, lambda]]
/// and D = diag(0, 1); requires sigma^2 <= lambda*zeta.
TwoByTwoProblem two_by_two_problem(double lambda, double zeta, double sigma);

struct RefinedHeatConfig {
    double coarse_spacing = 1.0 / 32.0;  // H
    int refine_levels = 2;               // each level halves the spacing; h = H/2^levels
    double fine_lo = 0.25;               // fine region [fine_lo, fine_hi], aligned to H
    double fine_hi = 0.75;
    double t_end = 0.5;
};

struct RefinedHeatProblem {
    MatrixSplitting splitting;  // PDE block only (no time augmentation)
    Vec nodes;                  // interior node coordinates
    Problem problem;            // augmented system (last component carries t)
    std::function<Vec(double)> exact;  // manufactured solution on the augmented layout
};

/// 1D heat equation with homogeneous Dirichlet ends on a piecewise-uniform
/// grid, locally refined on [fine_lo, fine_hi]; the mask covers fine-region
/// nodes and their direct neighbors. The source is manufactured so that
/// u(x,t) = sin(pi x) sin(pi t)^2 solves the problem, and it rides on the
/// slow part together with the augmented time derivative.
RefinedHeatProblem refined_heat_1d(const RefinedHeatConfig& cfg = {});

struct IntegroDiffConfig {
    int n_cells = 100;    // N; nodes x_i = i/N, i = 0..N
    double sigma = 0.01;
};

struct IntegroDiffProblem {
    Vec nodes;  // unknown node coordinates x_1..x_N
    Problem problem;
};

/// Nonlinear integro-differential model of a temperature profile: central
/// differences for the Laplacian (fast part), composite trapezoidal rule for
/// the integral term (slow part). Dirichlet value 1 - sqrt(t)/2 at x = 0
/// enters the fast stencil through the augmented time; Neumann at x = 1 via
/// a mirrored ghost node.
IntegroDiffProblem integro_differential_problem(const IntegroDiffConfig& cfg = {});

}  // namespace mrkc
