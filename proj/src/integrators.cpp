#include "mrkc/integrators.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "mrkc/errors.hpp"

namespace mrkc {

namespace {

bool all_finite(const Vec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

void check_stage(const Vec& v, int stage, double t) {
    if (!all_finite(v)) {
        throw BlowUpError("integrator blow-up at stage " + std::to_string(stage) + ", t = " + std::to_string(t),
                          stage, t);
    }
}

}  // namespace

int select_stages(double tau, double rho, double damping) {
    if (!(tau > 0.0) || !(rho >= 0.0) || !std::isfinite(rho)) {
        throw InvalidInputError("select_stages: need tau > 0 and finite rho >= 0");
    }
    const double beta = 2.0 - 4.0 * damping / 3.0;
    int s = std::max(1, static_cast<int>(std::floor(std::sqrt(tau * rho / beta))));
    while (tau * rho > beta * static_cast<double>(s) * s) ++s;
    return s;
}

MrkcParameters select_mrkc_parameters(double tau, const SpectralEstimates& est, Mode mode,
                                      double outer_damping) {
    MrkcParameters p;
    p.tau = tau;
    p.mode = mode;
    p.outer_damping = outer_damping;
    // Strict mode drives both recurrences with the same damping; relaxed mode
    // uses the slightly larger inner damping.
    p.inner_damping = mode == Mode::strict ? outer_damping : kInnerDampingRelaxed;

    const double beta = 2.0 - 4.0 * outer_damping / 3.0;
    p.s = select_stages(tau, est.rho_slow, outer_damping);
    const double bs2 = beta * static_cast<double>(p.s) * p.s;

    if (mode == Mode::strict) {
        // 6*tau*rho_F <= beta^2 s^2 (m^2 - 1); m = 1 only reachable for rho_F = 0.
        if (est.rho_fast <= 0.0) {
            p.m = 1;
            p.eta = 0.0;  // sentinel: averaged force degenerates to f
            return p;
        }
        const double rhs = 6.0 * tau * est.rho_fast / (beta * bs2);
        int m = std::max(2, static_cast<int>(std::floor(std::sqrt(rhs + 1.0))));
        while (static_cast<double>(m) * m - 1.0 < rhs) ++m;
        p.m = m;
        p.eta = 6.0 * tau / bs2 * (static_cast<double>(m) * m) / (static_cast<double>(m) * m - 1.0);
    } else {
        p.eta = 2.0 * tau / bs2;
        const double beta_bar = 2.0 - 4.0 * p.inner_damping / 3.0;
        int m = std::max(1, static_cast<int>(std::floor(std::sqrt(p.eta * est.rho_fast / beta_bar))));
        while (p.eta * est.rho_fast > beta_bar * static_cast<double>(m) * m) ++m;
        p.m = m;
    }
    return p;
}

Vec rkc_step(const RhsFn& rhs, double t, const Vec& y, double tau, const ChebTableau& tab) {
    const int n = static_cast<int>(y.size());
    Vec km2 = y;            // k_{j-2}
    Vec km1(n), work(n);    // k_{j-1}, rhs buffer/new stage
    rhs(t, km2, work);
    for (int i = 0; i < n; ++i) km1[i] = km2[i] + tab.mu[1] * tau * work[i];
    check_stage(km1, 1, t);
    for (int j = 2; j <= tab.stages; ++j) {
        rhs(t, km1, work);
        for (int i = 0; i < n; ++i) {
            work[i] = tab.nu[j] * km1[i] + tab.kappa[j] * km2[i] + tab.mu[j] * tau * work[i];
        }
        check_stage(work, j, t);
        std::swap(km2, km1);
        std::swap(km1, work);
    }
    return km1;
}

Vec rkc_step(const SplitSystem& sys, double t, const Vec& y, double tau, const ChebTableau& tab) {
    return rkc_step([&sys](double tt, const Vec& yy, Vec& out) { sys.eval_full(tt, yy, out); }, t, y,
                    tau, tab);
}

Vec averaged_force(const SplitSystem& sys, double t, const Vec& y, const MrkcParameters& params,
                   const ChebTableau& inner) {
    const int n = sys.dim();
    if (params.eta <= 0.0) {
        // m = 1 sentinel: f_eta = f.
        Vec out(n), fs(n);
        sys.eval_fast(t, y, out);
        sys.eval_slow(t, y, fs);
        for (int i = 0; i < n; ++i) out[i] += fs[i];
        return out;
    }
    if (inner.stages != params.m || inner.damping != params.inner_damping) {
        throw InvalidInputError("averaged_force: inner tableau does not match parameters");
    }
    const double eta = params.eta;
    Vec fs(n);
    sys.eval_slow(t, y, fs);  // frozen slow force, one evaluation per averaged force

    Vec um2 = y;
    Vec um1(n), work(n);
    sys.eval_fast(t, um2, work);
    for (int i = 0; i < n; ++i) um1[i] = um2[i] + inner.mu[1] * eta * (work[i] + fs[i]);
    check_stage(um1, 1, t);
    for (int j = 2; j <= inner.stages; ++j) {
        sys.eval_fast(t, um1, work);
        for (int i = 0; i < n; ++i) {
            work[i] = inner.nu[j] * um1[i] + inner.kappa[j] * um2[i] +
                      inner.mu[j] * eta * (work[i] + fs[i]);
        }
        check_stage(work, j, t);
        std::swap(um2, um1);
        std::swap(um1, work);
    }
    for (int i = 0; i < n; ++i) um1[i] = (um1[i] - y[i]) / eta;
    return um1;
}

Vec mrkc_step(const SplitSystem& sys, double t, const Vec& y, const MrkcParameters& params,
              const ChebTableau& outer, const ChebTableau& inner) {
    if (outer.stages != params.s || outer.damping != params.outer_damping) {
        throw InvalidInputError("mrkc_step: outer tableau does not match parameters");
    }
    const int n = sys.dim();
    const double tau = params.tau;
    Vec km2 = y;
    Vec km1(n);
    Vec force = averaged_force(sys, t, km2, params, inner);
    for (int i = 0; i < n; ++i) km1[i] = km2[i] + outer.mu[1] * tau * force[i];
    check_stage(km1, 1, t);
    for (int j = 2; j <= outer.stages; ++j) {
        force = averaged_force(sys, t, km1, params, inner);
        for (int i = 0; i < n; ++i) {
            force[i] = outer.nu[j] * km1[i] + outer.kappa[j] * km2[i] + outer.mu[j] * tau * force[i];
        }
        check_stage(force, j, t);
        std::swap(km2, km1);
        std::swap(km1, force);
    }
    return km1;
}

Vec rk4_reference(const RhsFn& rhs, Vec y, double t0, double t_end, double tau) {
    if (!(t_end > t0) || !(tau > 0.0)) {
        throw InvalidInputError("rk4_reference: need t_end > t0 and tau > 0");
    }
    const int n = static_cast<int>(y.size());
    Vec k1(n), k2(n), k3(n), k4(n), tmp(n);
    double t = t0;
    while (t < t_end - 1e-14 * (std::abs(t_end) + 1.0)) {
        const double h = std::min(tau, t_end - t);
        rhs(t, y, k1);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        rhs(t + 0.5 * h, tmp, k2);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        rhs(t + 0.5 * h, tmp, k3);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        rhs(t + h, tmp, k4);
        for (int i = 0; i < n; ++i) {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        check_stage(y, 4, t);
        t += h;
    }
    return y;
}

double IntegrationResult::mean_s() const {
    if (steps.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& r : steps) acc += r.s;
    return acc / static_cast<double>(steps.size());
}

double IntegrationResult::mean_m() const {
    if (steps.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& r : steps) acc += r.m;
    return acc / static_cast<double>(steps.size());
}

double IntegrationResult::mean_eta() const {
    if (steps.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& r : steps) acc += r.eta;
    return acc / static_cast<double>(steps.size());
}

namespace {

// Rebuilds only when the stage count or damping changed; stage counts drift
// slowly along a trajectory.
class TableauCache {
public:
    const ChebTableau& get(int stages, double damping) {
        if (tab_.stages != stages || tab_.damping != damping || tab_.b.empty()) {
            tab_ = build_tableau(stages, damping);
        }
        return tab_;
    }

private:
    ChebTableau tab_;
};

}  // namespace

IntegrationResult integrate(SplitSystem& sys, Vec y0, double t0, double t_end, double tau,
                            Method method, Mode mode, double outer_damping, const RhoPolicy& rho) {
    if (!(t_end > t0) || !(tau > 0.0)) {
        throw InvalidInputError("integrate: need t_end > t0 and tau > 0");
    }
    IntegrationResult res;
    res.y = std::move(y0);

    TableauCache outer_cache, inner_cache;
    Vec warm_fast, warm_slow, warm_full;

    // Estimation work is not integration work: the counters keep the exact
    // per-step identities (s slow + s*m fast for mrkc, s full for rkc).
    const auto estimate = [&](const RhsFn& f, double t, const Vec& y, Vec& warm) {
        const EvalCounters saved = sys.counters();
        const double value = estimate_spectral_radius(f, t, y, rho.power, &warm);
        sys.restore_counters(saved);
        return value;
    };

    double t = t0;
    while (t < t_end - 1e-14 * (std::abs(t_end) + 1.0)) {
        const double h = std::min(tau, t_end - t);
        StepRecord rec;
        rec.t = t;
        try {
            if (method == Method::rkc) {
                rec.rho_full = (rho.prefer_analytic && sys.rho_full)
                                   ? sys.rho_full(t, res.y)
                                   : estimate([&](double tt, const Vec& yy, Vec& out) { sys.eval_full(tt, yy, out); },
                                              t, res.y, warm_full);
                rec.s = select_stages(h, rec.rho_full, outer_damping);
                rec.m = 0;
                rec.eta = 0.0;
                const ChebTableau& tab = outer_cache.get(rec.s, outer_damping);
                res.y = rkc_step(sys, t, res.y, h, tab);
            } else {
                rec.rho_fast = (rho.prefer_analytic && sys.rho_fast)
                                   ? sys.rho_fast(t, res.y)
                                   : estimate([&](double tt, const Vec& yy, Vec& out) { sys.eval_fast(tt, yy, out); },
                                              t, res.y, warm_fast);
                rec.rho_slow = (rho.prefer_analytic && sys.rho_slow)
                                   ? sys.rho_slow(t, res.y)
                                   : estimate([&](double tt, const Vec& yy, Vec& out) { sys.eval_slow(tt, yy, out); },
                                              t, res.y, warm_slow);
                MrkcParameters params =
                    select_mrkc_parameters(h, {rec.rho_fast, rec.rho_slow, 0.0}, mode, outer_damping);
                rec.s = params.s;
                rec.m = params.m;
                rec.eta = params.eta;
                static const ChebTableau kUnusedInner{};
                const ChebTableau& outer = outer_cache.get(params.s, params.outer_damping);
                const ChebTableau& inner =
                    params.eta > 0.0 ? inner_cache.get(params.m, params.inner_damping) : kUnusedInner;
                res.y = mrkc_step(sys, t, res.y, params, outer, inner);
            }
        } catch (const BlowUpError& e) {
            throw BlowUpError(std::string(e.what()) + " (during step starting at t = " + std::to_string(t) + ")",
                              e.stage(), t);
        }
        res.steps.push_back(rec);
        t += h;
    }
    res.counters = sys.counters();
    return res;
}

}  // namespace mrkc
