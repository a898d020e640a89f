#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mrkc/matrix.hpp"

namespace mrkc {

using RhsFn = std::function<void(double t, const Vec& y, Vec& out)>;
using RhoFn = std::function<double(double t, const Vec& y)>;

struct EvalCounters {
    std::int64_t fast = 0;
    std::int64_t slow = 0;
};

/// A right-hand side split as f = f_F + f_S with per-part evaluation
/// counters. Each integration run owns its system exclusively; the counters
/// (and the eval_full scratch buffer) are not synchronized.
class SplitSystem {
public:
    SplitSystem() = default;
    SplitSystem(int dim, RhsFn fast, RhsFn slow)
        : dim_(dim), fast_(std::move(fast)), slow_(std::move(slow)), scratch_(dim) {}

    int dim() const { return dim_; }

    void eval_fast(double t, const Vec& y, Vec& out) const {
        ++counters_.fast;
        out.resize(dim_);
        fast_(t, y, out);
    }

    void eval_slow(double t, const Vec& y, Vec& out) const {
        ++counters_.slow;
        out.resize(dim_);
        slow_(t, y, out);
    }

    /// f = f_F + f_S; bumps both counters.
    void eval_full(double t, const Vec& y, Vec& out) const {
        eval_fast(t, y, out);
        eval_slow(t, y, scratch_);
        for (int i = 0; i < dim_; ++i) out[i] += scratch_[i];
    }

    const EvalCounters& counters() const { return counters_; }
    void reset_counters() const { counters_ = EvalCounters{}; }
    void restore_counters(const EvalCounters& saved) const { counters_ = saved; }

    /// Optional analytic spectral-radius callbacks; when absent the
    /// integrator falls back to the nonlinear power method.
    RhoFn rho_fast;
    RhoFn rho_slow;
    RhoFn rho_full;

private:
    int dim_ = 0;
    RhsFn fast_;
    RhsFn slow_;
    mutable EvalCounters counters_;
    mutable Vec scratch_;
};

/// Error measure used when comparing trajectories of a problem.
enum class ErrorNorm { linf, l2_weighted };

/// A registered test problem: the split system plus everything needed to
/// integrate and measure it.
struct Problem {
    std::string name;
    SplitSystem system;
    Vec y0;
    double t0 = 0.0;
    double t_end = 1.0;
    ErrorNorm norm = ErrorNorm::linf;
    Vec weights;  // for l2_weighted; entry 0 silences a component (e.g. augmented time)
};

/// Distance between two states in the problem's norm.
double error_norm(const Problem& p, const Vec& a, const Vec& b);

}  // namespace mrkc
