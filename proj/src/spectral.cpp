#include "mrkc/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include "mrkc/errors.hpp"

namespace mrkc {

namespace {

// splitmix64: deterministic across platforms, which keeps runs reproducible.
double next_unit(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

double norm2(const Vec& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

void fill_random_unit(Vec& v, std::uint64_t& state) {
    double n = 0.0;
    while (n == 0.0) {
        for (double& x : v) x = 2.0 * next_unit(state) - 1.0;
        n = norm2(v);
    }
    for (double& x : v) x /= n;
}

bool all_finite(const Vec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

double estimate_spectral_radius(const RhsFn& rhs, double t, const Vec& y,
                                const PowerMethodConfig& cfg, Vec* warm) {
    const int n = static_cast<int>(y.size());
    if (n == 0) return 0.0;

    Vec fbase(n), fpert(n), yp(n), u(n);
    rhs(t, y, fbase);
    if (!all_finite(fbase)) {
        throw EstimationFailedError("estimate_spectral_radius: rhs not finite at base point");
    }

    const double delta =
        cfg.perturbation > 0.0
            ? cfg.perturbation
            : std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + norm2(y));

    std::uint64_t rng = cfg.seed;
    if (warm != nullptr && static_cast<int>(warm->size()) == n && norm2(*warm) > 0.0) {
        u = *warm;
        const double nu = norm2(u);
        for (double& x : u) x /= nu;
    } else {
        fill_random_unit(u, rng);
    }

    double rho = 0.0, rho_prev = -1.0;
    int zero_streak = 0;
    for (int k = 0; k < cfg.max_iters; ++k) {
        for (int i = 0; i < n; ++i) yp[i] = y[i] + delta * u[i];
        rhs(t, yp, fpert);
        if (!all_finite(fpert)) {
            throw EstimationFailedError("estimate_spectral_radius: rhs not finite at perturbed point");
        }
        // v = J u by forward differences, reusing u as storage.
        for (int i = 0; i < n; ++i) u[i] = (fpert[i] - fbase[i]) / delta;
        rho = norm2(u);
        if (rho == 0.0) {
            if (++zero_streak >= 3) return 0.0;  // rhs locally constant
            fill_random_unit(u, rng);
            continue;
        }
        zero_streak = 0;
        for (double& x : u) x /= rho;
        if (rho_prev >= 0.0 && std::abs(rho - rho_prev) <= cfg.rel_tol * rho) break;
        rho_prev = rho;
    }
    if (warm != nullptr) *warm = u;
    return cfg.safety * rho;
}

namespace {

double spectral_radius_2x2(const DenseMatrix& m) {
    const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const double half_tr = 0.5 * (a + d);
    const double det = a * d - b * c;
    const double disc = half_tr * half_tr - det;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        return std::max(std::abs(half_tr + root), std::abs(half_tr - root));
    }
    return std::sqrt(det);  // conjugate pair: |lambda|^2 = det
}

double dot(const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

// Gelfand estimate by repeated squaring of the Frobenius-normalized matrix:
// rho(A) = lim ||A^(2^k)||^(1/2^k). Always an upper estimate, decreasing in k.
double gelfand_spectral_radius(const DenseMatrix& a, double rel_tol, Exec exec) {
    DenseMatrix n = a;
    double s = frobenius_norm(n);
    if (s == 0.0 || !std::isfinite(s)) return s == 0.0 ? 0.0 : s;
    for (double& v : n.data()) v /= s;
    double log_norm = std::log(s);  // log ||A^(2^k)||_F, maintained exactly in log space
    double est = std::exp(log_norm);
    for (int k = 1; k <= 48; ++k) {
        n = matmul(n, n, exec);
        const double t = frobenius_norm(n);
        if (t == 0.0) return 0.0;  // nilpotent
        log_norm = 2.0 * log_norm + std::log(t);
        for (double& v : n.data()) v /= t;
        const double next = std::exp(log_norm / std::exp2(k));
        if (std::abs(next - est) <= rel_tol * next) return next;
        est = next;
    }
    return est;
}

}  // namespace

double dense_spectral_radius(const DenseMatrix& a, double rel_tol) {
    if (a.rows() != a.cols()) {
        throw InvalidInputError("dense_spectral_radius: matrix must be square");
    }
    const int n = a.rows();
    if (n == 0) return 0.0;
    if (n == 1) return std::abs(a(0, 0));
    if (n == 2) return spectral_radius_2x2(a);

    std::uint64_t rng = 0x5851f42d4c957f2dULL;
    Vec x(n), w1(n), w2(n);
    fill_random_unit(x, rng);

    const int max_iters = std::min(5000, std::max(300, 12 * n));
    double est_prev = -1.0;
    int settled = 0, restarts = 0;
    for (int k = 0; k < max_iters; ++k) {
        matvec(a, x, w1);
        const double r1 = norm2(w1);
        if (r1 == 0.0 || !std::isfinite(r1)) {
            if (++restarts > 3) break;
            fill_random_unit(x, rng);
            continue;
        }
        matvec(a, w1, w2);

        // Fit w2 ~ p*w1 + q*x; the quadratic z^2 - p z - q carries the two
        // dominant eigenvalues, including conjugate pairs.
        const double a11 = dot(w1, w1), a12 = dot(w1, x), a22 = dot(x, x);
        const double b1 = dot(w1, w2), b2 = dot(x, w2);
        const double det = a11 * a22 - a12 * a12;
        double est;
        if (det > 1e-12 * a11 * a22) {
            const double p = (b1 * a22 - b2 * a12) / det;
            const double q = (a11 * b2 - a12 * b1) / det;
            const double disc = p * p + 4.0 * q;
            if (disc >= 0.0) {
                const double root = std::sqrt(disc);
                est = std::max(std::abs(0.5 * (p + root)), std::abs(0.5 * (p - root)));
            } else {
                est = std::sqrt(-q);
            }
        } else {
            est = r1;  // x is (numerically) an eigenvector already
        }

        if (std::isfinite(est) && est_prev >= 0.0 && std::abs(est - est_prev) <= rel_tol * std::max(est, 1e-300)) {
            if (++settled >= 3) return est;
        } else {
            settled = 0;
        }
        est_prev = est;

        const double r2 = norm2(w2);
        if (r2 == 0.0) {
            if (++restarts > 3) break;
            fill_random_unit(x, rng);
            continue;
        }
        for (int i = 0; i < n; ++i) x[i] = w2[i] / r2;
    }
    // Clustered spectrum: the fit stagnates, the Gelfand estimate does not.
    return gelfand_spectral_radius(a, rel_tol, Exec::seq);
}

}  // namespace mrkc
