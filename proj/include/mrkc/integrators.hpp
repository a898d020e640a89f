#pragma once

#include <vector>

#include "mrkc/spectral.hpp"
#include "mrkc/system.hpp"
#include "mrkc/tableau.hpp"

namespace mrkc {

enum class Method { rkc, mrkc };

/// Stage-selection rule: strict always guarantees stability; relaxed uses a
/// smaller eta and fewer inner stages, sufficient under scale separation and
/// observed sufficient for parabolic splittings.
enum class Mode { strict, relaxed };

inline constexpr double kOuterDamping = 0.05;
inline constexpr double kInnerDampingStrict = 0.05;
inline constexpr double kInnerDampingRelaxed = 0.1;

struct SpectralEstimates {
    double rho_fast = 0.0;
    double rho_slow = 0.0;
    double rho_full = 0.0;
};

/// The (s, m, eta) triple driving one multirate step. eta == 0 is the
/// degenerate m = 1 sentinel: the averaged force falls back to f itself.
struct MrkcParameters {
    int s = 1;
    int m = 1;
    double eta = 0.0;
    double tau = 0.0;
    Mode mode = Mode::strict;
    double outer_damping = kOuterDamping;
    double inner_damping = kInnerDampingStrict;
};

/// Smallest integer s with tau * rho <= beta * s^2 (s >= 1).
int select_stages(double tau, double rho, double damping);

MrkcParameters select_mrkc_parameters(double tau, const SpectralEstimates& est, Mode mode,
                                      double outer_damping = kOuterDamping);

/// One step of the s-stage Chebyshev method on a monolithic right-hand side.
/// Exactly `tableau.stages` rhs evaluations; three state vectors of workspace.
Vec rkc_step(const RhsFn& rhs, double t, const Vec& y, double tau, const ChebTableau& tableau);

/// Same, on the combined rhs of a split system (bumps both counters per eval).
Vec rkc_step(const SplitSystem& sys, double t, const Vec& y, double tau, const ChebTableau& tableau);

/// The discrete averaged force: one m-stage auxiliary solve of length eta
/// with f_S and the time frozen, returning (u_eta - y)/eta. Exactly m fast
/// and 1 slow evaluation; for the eta == 0 sentinel returns f_F + f_S
/// directly (one evaluation of each).
Vec averaged_force(const SplitSystem& sys, double t, const Vec& y, const MrkcParameters& params,
                   const ChebTableau& inner);

/// One multirate step: the s-stage recurrence driven by the averaged force.
/// Exactly s slow and s*m fast evaluations.
Vec mrkc_step(const SplitSystem& sys, double t, const Vec& y, const MrkcParameters& params,
              const ChebTableau& outer, const ChebTableau& inner);

/// Classical fixed-step RK4, used only to manufacture reference solutions.
Vec rk4_reference(const RhsFn& rhs, Vec y0, double t0, double t_end, double tau);

struct StepRecord {
    double t = 0.0;  // time at the start of the step
    int s = 0;
    int m = 0;
    double eta = 0.0;
    double rho_fast = 0.0;
    double rho_slow = 0.0;
    double rho_full = 0.0;  // rkc only
};

struct RhoPolicy {
    PowerMethodConfig power{};
    bool prefer_analytic = true;  // use the system's callbacks when present
};

struct IntegrationResult {
    Vec y;
    std::vector<StepRecord> steps;
    EvalCounters counters;

    double mean_s() const;
    double mean_m() const;
    double mean_eta() const;
};

/// Fixed-step integration from t0 to t_end (final step shortened to land on
/// t_end exactly). Spectral radii are re-estimated every step; stage counts
/// and tableaus follow them.
IntegrationResult integrate(SplitSystem& sys, Vec y0, double t0, double t_end, double tau,
                            Method method, Mode mode = Mode::strict,
                            double outer_damping = kOuterDamping, const RhoPolicy& rho = {});

}  // namespace mrkc
