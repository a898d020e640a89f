#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <functional>

#include "mrkc/errors.hpp"
#include "mrkc/integrators.hpp"
#include "mrkc/problems.hpp"
#include "mrkc/spectral.hpp"

using namespace mrkc;

namespace {

constexpr double kPi = 3.14159265358979323846;

double rng_unit(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<double>((z ^ (z >> 31)) >> 11) * 0x1.0p-53;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    double acc = f(a) + f(b);
    const double h = (b - a) / n;
    for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("Robertson split values") {
    Problem p = robertson_problem();
    REQUIRE(p.y0.size() == 3);
    CHECK(p.y0[0] == 1.0);
    CHECK(p.y0[1] == 2e-5);
    CHECK(p.y0[2] == 1e-1);

    Vec f(3);
    p.system.eval_fast(0.0, p.y0, f);
    CHECK(f[0] == 0.0);
    CHECK(f[1] == doctest::Approx(-0.02).epsilon(1e-15));
    CHECK(f[2] == 0.0);

    p.system.eval_slow(0.0, {1.0, 0.0, 0.0}, f);
    CHECK(f[0] == doctest::Approx(-0.04));
    CHECK(f[1] == doctest::Approx(0.04));
    CHECK(f[2] == 0.0);
}

TEST_CASE("Robertson full rhs conserves mass at random states") {
    // The split parts exchange mass through the 1e4 y2 y3 term; only their
    // sum is conservative.
    Problem p = robertson_problem();
    std::uint64_t rng = 5;
    Vec f(3);
    for (int trial = 0; trial < 10000; ++trial) {
        const Vec y{rng_unit(rng), 1e-4 * rng_unit(rng), rng_unit(rng)};
        p.system.eval_full(0.0, y, f);
        const double scale = std::abs(f[0]) + std::abs(f[1]) + std::abs(f[2]) + 1.0;
        CHECK(std::abs(f[0] + f[1] + f[2]) <= 1e-12 * scale);
    }
}

TEST_CASE("multirate test system") {
    Problem p = multirate_test_problem(-100.0, -1.0);
    Vec f(1);
    p.system.eval_fast(0.0, {2.0}, f);
    CHECK(f[0] == -200.0);
    p.system.eval_slow(0.0, {2.0}, f);
    CHECK(f[0] == -2.0);
    CHECK(p.system.rho_fast(0.0, p.y0) == 100.0);
    CHECK(p.system.rho_slow(0.0, p.y0) == 1.0);
    CHECK_THROWS_AS(multirate_test_problem(1.0, -1.0), InvalidInputError);
    CHECK_THROWS_AS(multirate_test_problem(-1.0, 2.0), InvalidInputError);
}

TEST_CASE("two-by-two splitting structure") {
    const double lambda = -100.0, zeta = -4.0, sigma = 0.1 * 20.0;
    TwoByTwoProblem p = two_by_two_problem(lambda, zeta, sigma);
    CHECK(p.splitting.a_fast(0, 0) == 0.0);
    CHECK(p.splitting.a_fast(0, 1) == 0.0);
    CHECK(p.splitting.a_fast(1, 0) == sigma);
    CHECK(p.splitting.a_fast(1, 1) == lambda);
    CHECK(p.splitting.a_slow(0, 0) == zeta);
    CHECK(p.splitting.a_slow(0, 1) == sigma);
    CHECK(p.splitting.a_slow(1, 0) == 0.0);
    CHECK(p.splitting.a_slow(1, 1) == 0.0);
    CHECK(p.splitting.mask[0] == 0);
    CHECK(p.splitting.mask[1] == 1);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            CHECK(p.splitting.a_fast(i, j) + p.splitting.a_slow(i, j) == p.splitting.a(i, j));
        }
    }
    CHECK(p.problem.system.rho_fast(0.0, p.problem.y0) == 100.0);
    CHECK(p.problem.system.rho_slow(0.0, p.problem.y0) == 4.0);

    // sigma = 0 decouples the rows
    TwoByTwoProblem d = two_by_two_problem(lambda, zeta, 0.0);
    CHECK(d.splitting.a_fast(1, 0) == 0.0);

    CHECK_THROWS_AS(two_by_two_problem(-1.0, -1.0, 1.5), InvalidInputError);
}

TEST_CASE("masked splitting is an exact row partition") {
    std::uint64_t rng = 9;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng_unit(rng) * 12);
        DenseMatrix a(n, n);
        std::vector<char> mask(n);
        for (int i = 0; i < n; ++i) {
            mask[i] = rng_unit(rng) < 0.5;
            for (int j = 0; j < n; ++j) a(i, j) = 2.0 * rng_unit(rng) - 1.0;
        }
        const MatrixSplitting s = build_masked_splitting(a, mask);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                CHECK(s.a_fast(i, j) + s.a_slow(i, j) == a(i, j));
                CHECK((mask[i] ? s.a_slow(i, j) : s.a_fast(i, j)) == 0.0);
            }
        }
    }
    DenseMatrix a(3, 3);
    a(0, 0) = 1.0;
    const MatrixSplitting none = build_masked_splitting(a, {false, false, false});
    CHECK(none.a_fast(0, 0) == 0.0);
    const MatrixSplitting all = build_masked_splitting(a, {true, true, true});
    CHECK(all.a_slow(0, 0) == 0.0);
    CHECK(all.a_fast(0, 0) == 1.0);
    CHECK_THROWS_AS(build_masked_splitting(a, {true, false}), InvalidInputError);
}

TEST_CASE("uniform heat grid reduces to the classical Laplacian") {
    RefinedHeatConfig cfg;
    cfg.coarse_spacing = 1.0 / 32.0;
    cfg.refine_levels = 0;
    RefinedHeatProblem heat = refined_heat_1d(cfg);
    const int n = static_cast<int>(heat.nodes.size());
    CHECK(n == 31);
    const double h2 = 32.0 * 32.0;
    for (int i = 0; i < n; ++i) {
        CHECK(heat.splitting.a(i, i) == doctest::Approx(-2.0 * h2).epsilon(1e-13));
        if (i > 0) CHECK(heat.splitting.a(i, i - 1) == doctest::Approx(h2).epsilon(1e-13));
    }
    const double expected_rho = 4.0 * h2 * std::pow(std::sin(n * kPi / (2.0 * (n + 1))), 2);
    CHECK(dense_spectral_radius(heat.splitting.a, 1e-9) ==
          doctest::Approx(expected_rho).epsilon(1e-6));
}

TEST_CASE("two refinement levels give a fast/slow radius ratio near 16") {
    RefinedHeatProblem heat = refined_heat_1d();
    const double rho_f = dense_spectral_radius(heat.splitting.a_fast);
    const double rho_s = dense_spectral_radius(heat.splitting.a_slow);
    const double ratio = rho_f / rho_s;
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 24.0);
}

TEST_CASE("heat mask covers the fine region and its direct neighbors") {
    RefinedHeatProblem heat = refined_heat_1d();
    const double h_coarse = 1.0 / 32.0;
    for (size_t k = 0; k < heat.nodes.size(); ++k) {
        const bool in = heat.nodes[k] >= 0.25 - h_coarse - 1e-12 && heat.nodes[k] <= 0.75 + h_coarse + 1e-12;
        CHECK(static_cast<bool>(heat.splitting.mask[k]) == in);
    }
}

TEST_CASE("heat initial state and source") {
    RefinedHeatProblem heat = refined_heat_1d();
    const int dim = heat.problem.system.dim();
    for (double v : heat.problem.y0) CHECK(v == 0.0);
    Vec g(dim);
    heat.problem.system.eval_slow(0.0, heat.problem.y0, g);
    for (double v : g) CHECK(std::isfinite(v));
    CHECK(g[dim - 1] == 1.0);  // augmented time
    // at t = 0 the source vanishes with sin(pi t)^2 and sin(2 pi t)
    for (int i = 0; i + 1 < dim; ++i) CHECK(std::abs(g[i]) <= 1e-12);
}

TEST_CASE("heat semi-discrete residual orders") {
    // residual r = A u + g - u_t at the exact solution: O(h^2) away from
    // interfaces, O(h) at them
    auto residual = [](const RefinedHeatConfig& cfg, double t, double& interior, double& interface) {
        RefinedHeatProblem heat = refined_heat_1d(cfg);
        const int n = static_cast<int>(heat.nodes.size());
        Vec u = heat.exact(t);
        Vec full(n + 1);
        heat.problem.system.eval_full(t, u, full);
        interior = 0.0;
        interface = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = heat.nodes[i];
            const double ut = kPi * std::sin(2.0 * kPi * t) * std::sin(kPi * x);
            const double r = std::abs(full[i] - ut);
            // fixed physical band so both resolutions sample the same region
            const bool near_interface =
                std::abs(x - cfg.fine_lo) < 0.1 || std::abs(x - cfg.fine_hi) < 0.1;
            if (near_interface) {
                interface = std::max(interface, r);
            } else {
                interior = std::max(interior, r);
            }
        }
    };
    RefinedHeatConfig coarse;
    coarse.coarse_spacing = 1.0 / 16.0;
    RefinedHeatConfig fine;
    fine.coarse_spacing = 1.0 / 32.0;
    double int_c, ifc_c, int_f, ifc_f;
    residual(coarse, 0.3, int_c, ifc_c);
    residual(fine, 0.3, int_f, ifc_f);
    CHECK(int_c / int_f >= 3.0);  // ~4 for second order
    CHECK(int_c / int_f <= 5.5);
    CHECK(ifc_c / ifc_f >= 1.6);  // ~2 for first order
    CHECK(ifc_c / ifc_f <= 3.0);
}

TEST_CASE("integro-differential: sigma = 0 kills the integral term") {
    IntegroDiffConfig cfg;
    cfg.sigma = 0.0;
    IntegroDiffProblem p = integro_differential_problem(cfg);
    const int dim = p.problem.system.dim();
    Vec f(dim);
    p.problem.system.eval_slow(0.0, p.problem.y0, f);
    for (int i = 0; i + 1 < dim; ++i) CHECK(f[i] == 0.0);
    CHECK(f[dim - 1] == 1.0);
}

TEST_CASE("integro-differential initial and boundary data agree") {
    IntegroDiffProblem p = integro_differential_problem();
    CHECK(p.problem.y0[0] == doctest::Approx(std::pow(std::cos(0.01 * kPi / 2.0), 2)).epsilon(1e-14));
    // u(0, 0) = cos(0)^2 = 1 matches the Dirichlet value 1 - sqrt(0)/2
    Vec f(p.problem.system.dim());
    p.problem.system.eval_fast(0.0, p.problem.y0, f);
    for (double v : f) CHECK(std::isfinite(v));
    // Laplacian of the initial profile: u'' = -pi^2/2 cos(pi x)
    for (int k : {10, 50, 90}) {
        const double x = p.nodes[k - 1];
        CHECK(f[k - 1] == doctest::Approx(-kPi * kPi / 2.0 * std::cos(kPi * x)).epsilon(2e-3));
    }
}

TEST_CASE("integro-differential slow term against fine quadrature") {
    // independent oracle: Simpson on the continuum integrand, split at the
    // kernel kink
    const auto oracle = [](double x) {
        const auto integrand = [x](double s) {
            const double u = std::pow(std::cos(s * kPi / 2.0), 2);
            const double d = 1.0 + std::abs(x - s);
            return u * u * u * u / (d * d);
        };
        return -0.01 * (simpson(integrand, 0.0, x, 20000) + simpson(integrand, x, 1.0, 20000));
    };
    double err100 = 0.0, err200 = 0.0;
    for (int n : {100, 200}) {
        IntegroDiffConfig cfg;
        cfg.n_cells = n;
        IntegroDiffProblem p = integro_differential_problem(cfg);
        Vec f(p.problem.system.dim());
        p.problem.system.eval_slow(0.0, p.problem.y0, f);
        double worst = 0.0;
        for (int k = 0; k < n; ++k) {
            worst = std::max(worst, std::abs(f[k] - oracle(p.nodes[k])));
        }
        (n == 100 ? err100 : err200) = worst;
    }
    CHECK(err100 <= 1e-6);
    // composite trapezoid is second order: doubling N quarters the error
    CHECK(err100 / err200 >= 3.0);
    CHECK(err100 / err200 <= 5.5);
}

TEST_CASE("integro-differential rejects tiny grids") {
    IntegroDiffConfig cfg;
    cfg.n_cells = 3;
    CHECK_THROWS_AS(integro_differential_problem(cfg), InvalidInputError);
}

TEST_CASE("heat rejects a misaligned fine region") {
    RefinedHeatConfig cfg;
    cfg.fine_lo = 0.26;
    CHECK_THROWS_AS(refined_heat_1d(cfg), InvalidInputError);
    RefinedHeatConfig cfg2;
    cfg2.fine_lo = 0.9;
    cfg2.fine_hi = 0.2;
    CHECK_THROWS_AS(refined_heat_1d(cfg2), InvalidInputError);
}

TEST_CASE("error norms") {
    Problem p;
    p.norm = ErrorNorm::linf;
    CHECK(error_norm(p, {1.0, 2.0}, {1.5, 1.0}) == doctest::Approx(1.0));
    p.norm = ErrorNorm::l2_weighted;
    p.weights = {0.25, 0.25, 0.0};
    CHECK(error_norm(p, {1.0, 1.0, 5.0}, {0.0, 0.0, 0.0}) == doctest::Approx(std::sqrt(0.5)));
    CHECK_THROWS_AS(error_norm(p, {1.0}, {1.0, 2.0}), InvalidInputError);
}
