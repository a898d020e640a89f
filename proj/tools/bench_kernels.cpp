// Times the OpenMP kernels against their serial reference paths and checks
// that both produce identical bytes. Run after building with -DMRKC_OPENMP=ON
// to see the effect of threading on the scan and matrix-assembly kernels.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "mrkc/integrators.hpp"
#include "mrkc/matrix.hpp"
#include "mrkc/parallel.hpp"
#include "mrkc/problems.hpp"
#include "mrkc/stability.hpp"
#include "mrkc/tableau.hpp"

using namespace mrkc;

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <class F>
double time_ms(F&& f, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_ms();
        f();
        best = std::min(best, now_ms() - t0);
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-24s %10.2f ms %10.2f ms %8.2fx   %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
    std::printf("threads: %d\n", max_threads());
    std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    {
        const int s = 10, m = 8, n = 400;
        const ChebTableau outer = build_tableau(s, kOuterDamping);
        const ChebTableau inner = build_tableau(m, kOuterDamping);
        const double tau = 1.0;
        const double eta = 6.0 * tau / outer.ell * (m * m) / (m * m - 1.0);
        Vec zetas(n), lambdas(n);
        for (int i = 0; i < n; ++i) {
            zetas[i] = -outer.ell * i / (n - 1.0);
            lambdas[i] = -inner.ell / eta * i / (n - 1.0);
        }
        std::vector<ScanRecord> a, b;
        const double ts = time_ms(
            [&] { a = scan_scalar_stability(s, m, kOuterDamping, kOuterDamping, tau, eta, zetas, lambdas, Exec::seq); },
            3);
        const double tp = time_ms(
            [&] { b = scan_scalar_stability(s, m, kOuterDamping, kOuterDamping, tau, eta, zetas, lambdas, Exec::par); },
            3);
        bool same = a.size() == b.size();
        for (size_t i = 0; same && i < a.size(); ++i) same = a[i].value == b[i].value;
        report("scalar stability scan", ts, tp, same);
    }

    {
        RefinedHeatConfig cfg;
        cfg.coarse_spacing = 1.0 / 64.0;
        const RefinedHeatProblem heat = refined_heat_1d(cfg);
        DenseMatrix a, b;
        const double ts = time_ms([&] { a = averaged_matrix(heat.splitting, 1e-3, 8, 0.1, Exec::seq); }, 3);
        const double tp = time_ms([&] { b = averaged_matrix(heat.splitting, 1e-3, 8, 0.1, Exec::par); }, 3);
        report("averaged matrix (159^2)", ts, tp, a.data() == b.data());
    }

    {
        const int n = 320;
        DenseMatrix a(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) a(i, j) = std::sin(0.001 * (i * n + j));
        }
        DenseMatrix c1, c2;
        const double ts = time_ms([&] { c1 = matmul(a, a, Exec::seq); }, 3);
        const double tp = time_ms([&] { c2 = matmul(a, a, Exec::par); }, 3);
        report("dense matmul (320^2)", ts, tp, c1.data() == c2.data());
    }

    {
        const RefinedHeatProblem heat = refined_heat_1d();
        const ChebTableau outer = build_tableau(20, kOuterDamping);
        Vec grid(24);
        const double eta_max = 1.5e-3;
        for (size_t i = 0; i < grid.size(); ++i) grid[i] = eta_max * (i + 1) / grid.size();
        std::vector<ScanRecord> a, b;
        const double ts = time_ms(
            [&] { a = scan_splitting_stability(heat.splitting, 1.0, 47, kOuterDamping, grid, Exec::seq); }, 2);
        const double tp = time_ms(
            [&] { b = scan_splitting_stability(heat.splitting, 1.0, 47, kOuterDamping, grid, Exec::par); }, 2);
        bool same = a.size() == b.size();
        for (size_t i = 0; same && i < a.size(); ++i) same = a[i].value == b[i].value;
        report("splitting scan (24 cells)", ts, tp, same);
    }

    return 0;
}
