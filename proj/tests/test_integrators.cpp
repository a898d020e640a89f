#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "mrkc/commands.hpp"
#include "mrkc/errors.hpp"
#include "mrkc/integrators.hpp"
#include "mrkc/problems.hpp"
#include "mrkc/stability.hpp"

using namespace mrkc;

namespace {

double rng_unit(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<double>((z ^ (z >> 31)) >> 11) * 0x1.0p-53;
}

// reference stage selection by direct search, used to cross-check the
// closed-form picks
int smallest_s(double tau, double rho, double beta) {
    int s = 1;
    while (tau * rho > beta * static_cast<double>(s) * s) ++s;
    return s;
}

}  // namespace

TEST_CASE("one stage is explicit Euler") {
    const ChebTableau tab = build_tableau(1, 0.0);
    const Vec y{1.0};
    const Vec out = rkc_step([](double, const Vec& v, Vec& o) { o[0] = -v[0]; }, 0.0, y, 0.1, tab);
    CHECK(out[0] == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("two stages at the stability boundary: R_2(-4) = T_2(0) = -1") {
    const ChebTableau tab = build_tableau(2, 0.0);
    const double tau = 0.5, lambda = -8.0;  // tau*lambda = -4
    const Vec out =
        rkc_step([lambda](double, const Vec& v, Vec& o) { o[0] = lambda * v[0]; }, 0.0, {1.0}, tau, tab);
    CHECK(out[0] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(out[0] == doctest::Approx(rkc_stability_poly(2, 0.0, -4.0)).epsilon(1e-13));
}

TEST_CASE("rkc_step performs exactly s full evaluations and conserves Robertson mass") {
    Problem p = robertson_problem();
    const double tau = 1.0 / 128.0;
    const double rho = estimate_spectral_radius(
        [&](double t, const Vec& y, Vec& o) { p.system.eval_full(t, y, o); }, 0.0, p.y0);
    const int s = select_stages(tau, rho, kOuterDamping);
    const ChebTableau tab = build_tableau(s, kOuterDamping);
    p.system.reset_counters();
    const Vec out = rkc_step(p.system, 0.0, p.y0, tau, tab);
    CHECK(p.system.counters().fast == s);
    CHECK(p.system.counters().slow == s);
    const double mass0 = p.y0[0] + p.y0[1] + p.y0[2];
    CHECK(std::abs(out[0] + out[1] + out[2] - mass0) <= 1e-12);
    for (double v : out) CHECK(std::isfinite(v));
}

TEST_CASE("strict parameter selection example") {
    const MrkcParameters p = select_mrkc_parameters(1.0, {1600.0, 16.0, 0.0}, Mode::strict, 0.0);
    CHECK(p.s == 3);
    CHECK(p.m == 17);
    CHECK(p.eta == doctest::Approx(289.0 / 864.0).epsilon(1e-15));
    CHECK(p.eta * 1600.0 <= 2.0 * 17.0 * 17.0);
    // brute-force the minimality of s and m
    CHECK(smallest_s(1.0, 16.0, 2.0) == 3);
    for (int m = 2; m < 17; ++m) {
        CHECK(6.0 * 1600.0 > 4.0 * 9.0 * (m * m - 1.0));
    }
    CHECK(6.0 * 1600.0 <= 4.0 * 9.0 * (17.0 * 17.0 - 1.0));
}

TEST_CASE("relaxed parameter selection example") {
    const MrkcParameters p = select_mrkc_parameters(1.0, {1600.0, 16.0, 0.0}, Mode::relaxed, 0.05);
    const double beta = 2.0 - 4.0 * 0.05 / 3.0;
    CHECK(p.s == 3);
    CHECK(p.eta == doctest::Approx(2.0 / (beta * 9.0)).epsilon(1e-15));
    CHECK(p.eta == doctest::Approx(0.114942528735632).epsilon(1e-12));
    CHECK(p.m == 10);
    CHECK(p.inner_damping == 0.1);
    const double beta_bar = 2.0 - 4.0 * 0.1 / 3.0;
    for (int m = 1; m < 10; ++m) CHECK(p.eta * 1600.0 > beta_bar * m * m);
    CHECK(p.eta * 1600.0 <= beta_bar * 100.0);
}

TEST_CASE("rho_F = 0 selects the degenerate inner method") {
    const MrkcParameters p = select_mrkc_parameters(1.0, {0.0, 16.0, 0.0}, Mode::strict, 0.0);
    CHECK(p.s == 3);
    CHECK(p.m == 1);
    CHECK(p.eta == 0.0);
}

TEST_CASE("eta <= 8 tau in strict mode") {
    std::uint64_t rng = 3;
    for (int trial = 0; trial < 200; ++trial) {
        const double tau = std::pow(2.0, -6.0 + 8.0 * rng_unit(rng));
        const double rho_f = 1e5 * rng_unit(rng);
        const double rho_s = 1e3 * rng_unit(rng);
        const MrkcParameters p = select_mrkc_parameters(tau, {rho_f, rho_s, 0.0}, Mode::strict);
        if (p.m >= 2) CHECK(p.eta <= 8.0 * tau * (1.0 + 1e-12));
    }
}

TEST_CASE("averaged force with zero fast part returns the slow force") {
    const double zeta = -3.5;
    SplitSystem sys(
        2, [](double, const Vec&, Vec& o) { o[0] = o[1] = 0.0; },
        [zeta](double, const Vec& y, Vec& o) {
            o[0] = zeta * y[0];
            o[1] = zeta * y[1];
        });
    for (int m : {2, 5, 9}) {
        MrkcParameters params;
        params.m = m;
        params.eta = 0.01;
        params.inner_damping = 0.05;
        const ChebTableau inner = build_tableau(m, 0.05);
        const Vec f = averaged_force(sys, 0.0, {1.0, -2.0}, params, inner);
        CHECK(f[0] == doctest::Approx(zeta * 1.0).epsilon(1e-13));
        CHECK(f[1] == doctest::Approx(zeta * -2.0).epsilon(1e-13));
    }
}

TEST_CASE("averaged force matches Phi_m(eta lambda)(lambda + zeta) y") {
    std::uint64_t rng = 11;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2 + static_cast<int>(rng_unit(rng) * 18);
        const double eps = 0.05;
        const ChebTableau inner = build_tableau(m, eps);
        const PhiM phim(m, eps);
        const double eta = 1e-3 + rng_unit(rng);
        const double lambda = -phim.tableau().ell / eta * rng_unit(rng);
        const double zeta = -20.0 / eta * rng_unit(rng) * 0.3;
        SplitSystem sys(
            1, [lambda](double, const Vec& y, Vec& o) { o[0] = lambda * y[0]; },
            [zeta](double, const Vec& y, Vec& o) { o[0] = zeta * y[0]; });
        MrkcParameters params;
        params.m = m;
        params.eta = eta;
        params.inner_damping = eps;
        const double y = 0.5 + rng_unit(rng);
        const Vec f = averaged_force(sys, 0.0, {y}, params, inner);
        const double expected = phim(eta * lambda) * (lambda + zeta) * y;
        CHECK(f[0] == doctest::Approx(expected).epsilon(1e-12));
        CHECK(sys.counters().fast == m);
        CHECK(sys.counters().slow == 1);
    }
}

TEST_CASE("degenerate averaged force is a passthrough of f") {
    Problem p = robertson_problem();
    MrkcParameters params;  // m = 1, eta = 0 sentinel
    const Vec f = averaged_force(p.system, 0.0, p.y0, params, ChebTableau{});
    Vec expected(3), fs(3);
    Problem q = robertson_problem();
    q.system.eval_fast(0.0, p.y0, expected);
    q.system.eval_slow(0.0, p.y0, fs);
    for (int i = 0; i < 3; ++i) CHECK(f[i] == expected[i] + fs[i]);
    CHECK(p.system.counters().fast == 1);
    CHECK(p.system.counters().slow == 1);
}

TEST_CASE("mrkc_step reproduces the multirate stability polynomial") {
    std::uint64_t rng = 23;
    for (int trial = 0; trial < 60; ++trial) {
        const double lambda = -std::pow(10.0, 1.0 + 3.0 * rng_unit(rng));
        const double zeta = -std::pow(10.0, 2.0 * rng_unit(rng));
        const double tau = 0.5 + rng_unit(rng);
        const MrkcParameters params = select_mrkc_parameters(
            tau, {std::abs(lambda), std::abs(zeta), 0.0}, trial % 2 ? Mode::strict : Mode::relaxed);
        if (params.eta == 0.0) continue;
        Problem p = multirate_test_problem(lambda, zeta);
        const ChebTableau outer = build_tableau(params.s, params.outer_damping);
        const ChebTableau inner = build_tableau(params.m, params.inner_damping);
        const Vec out = mrkc_step(p.system, 0.0, {1.0}, params, outer, inner);
        const double expected = mrkc_stability_poly(params.s, params.m, params.outer_damping,
                                                    params.inner_damping, lambda, zeta, tau, params.eta);
        CHECK(out[0] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("linear equivalence on a diagonal split system") {
    const Vec lambdas{-4000.0, -900.0, -5.0, 0.0};
    const Vec zetas{-8.0, -2.0, -1.0, -0.5};
    SplitSystem sys(
        4,
        [&](double, const Vec& y, Vec& o) {
            for (int i = 0; i < 4; ++i) o[i] = lambdas[i] * y[i];
        },
        [&](double, const Vec& y, Vec& o) {
            for (int i = 0; i < 4; ++i) o[i] = zetas[i] * y[i];
        });
    const double tau = 0.7;
    const MrkcParameters params = select_mrkc_parameters(tau, {4000.0, 8.0, 0.0}, Mode::strict);
    const ChebTableau outer = build_tableau(params.s, params.outer_damping);
    const ChebTableau inner = build_tableau(params.m, params.inner_damping);
    const Vec y0{1.0, -0.5, 2.0, 0.25};
    const Vec out = mrkc_step(sys, 0.0, y0, params, outer, inner);
    for (int i = 0; i < 4; ++i) {
        const double r = mrkc_stability_poly(params.s, params.m, params.outer_damping,
                                             params.inner_damping, lambdas[i], zetas[i], tau, params.eta);
        CHECK(out[i] == doctest::Approx(r * y0[i]).epsilon(1e-12));
    }
}

TEST_CASE("degenerate mrkc step equals an rkc step on f") {
    Problem p = robertson_problem();
    Problem q = robertson_problem();
    MrkcParameters params;
    params.s = 9;
    params.tau = 1.0 / 64.0;
    const ChebTableau outer = build_tableau(9, params.outer_damping);
    const Vec a = mrkc_step(p.system, 0.0, p.y0, params, outer, ChebTableau{});
    const Vec b = rkc_step(q.system, 0.0, q.y0, params.tau, outer);
    for (int i = 0; i < 3; ++i) {
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
    }
}

TEST_CASE("evaluation counters of one mrkc step") {
    std::uint64_t rng = 99;
    for (int trial = 0; trial < 100; ++trial) {
        const double tau = std::pow(2.0, -4.0 + 6.0 * rng_unit(rng));
        const double rho_f = trial % 10 == 0 ? 0.0 : 2e4 * rng_unit(rng);
        const double rho_s = 200.0 * rng_unit(rng);
        const MrkcParameters params =
            select_mrkc_parameters(tau, {rho_f, rho_s, 0.0}, trial % 2 ? Mode::strict : Mode::relaxed);
        const double lambda = -rho_f, zeta = -rho_s;
        SplitSystem sys(
            1, [lambda](double, const Vec& y, Vec& o) { o[0] = lambda * y[0]; },
            [zeta](double, const Vec& y, Vec& o) { o[0] = zeta * y[0]; });
        const ChebTableau outer = build_tableau(params.s, params.outer_damping);
        static const ChebTableau empty{};
        const ChebTableau inner =
            params.eta > 0.0 ? build_tableau(params.m, params.inner_damping) : empty;
        mrkc_step(sys, 0.0, {1.0}, params, outer, inner);
        CHECK(sys.counters().slow == params.s);
        CHECK(sys.counters().fast == static_cast<std::int64_t>(params.s) * params.m);
    }
}

TEST_CASE("mrkc mass drift on Robertson stays at the method's error scale") {
    // The split parts exchange mass through the -1e4 y2 y3 term, so exact
    // conservation holds only for the full f; the averaged force recovers it
    // to first order in eta.
    Problem p = robertson_problem();
    IntegrationResult res = integrate(p.system, p.y0, 0.0, 100.0, 0.25, Method::mrkc, Mode::strict);
    const double mass0 = p.y0[0] + p.y0[1] + p.y0[2];
    const double drift = std::abs(res.y[0] + res.y[1] + res.y[2] - mass0);
    CHECK(drift <= 1e-3);

    Problem q = robertson_problem();
    IntegrationResult res2 = integrate(q.system, q.y0, 0.0, 100.0, 0.25, Method::rkc, Mode::strict);
    CHECK(std::abs(res2.y[0] + res2.y[1] + res2.y[2] - mass0) <= 1e-10);
}

TEST_CASE("rk4 on the exponential") {
    // classical fourth-order error: ~3.3e-7 at tau = 0.1, ~2.1e-8 at 0.05
    const Vec out = rk4_reference([](double, const Vec& y, Vec& o) { o[0] = -y[0]; }, {1.0}, 0.0, 1.0, 0.1);
    CHECK(std::abs(out[0] - std::exp(-1.0)) <= 5e-7);
    const Vec fine = rk4_reference([](double, const Vec& y, Vec& o) { o[0] = -y[0]; }, {1.0}, 0.0, 1.0, 0.05);
    CHECK(std::abs(fine[0] - std::exp(-1.0)) <= 1e-7);
}

TEST_CASE("one rk4 step is the quartic Taylor polynomial") {
    for (double z : {-0.5, -1.3, 0.7}) {
        const Vec out =
            rk4_reference([z](double, const Vec& y, Vec& o) { o[0] = z * y[0]; }, {1.0}, 0.0, 1.0, 1.0);
        const double expected = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
        CHECK(out[0] == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("rk4 Robertson reference conserves mass") {
    Problem p = robertson_problem();
    const Vec ref = rk4_reference(
        [&](double t, const Vec& y, Vec& o) { p.system.eval_full(t, y, o); }, p.y0, 0.0, 10.0, 1e-4);
    const double mass0 = p.y0[0] + p.y0[1] + p.y0[2];
    CHECK(std::abs(ref[0] + ref[1] + ref[2] - mass0) <= 1e-10);
    for (double v : ref) CHECK(std::isfinite(v));
}

TEST_CASE("integrate on y' = -y rides the Euler path") {
    SplitSystem sys(
        1, [](double, const Vec&, Vec& o) { o[0] = 0.0; },
        [](double, const Vec& y, Vec& o) { o[0] = -y[0]; });
    sys.rho_fast = [](double, const Vec&) { return 0.0; };
    sys.rho_slow = [](double, const Vec&) { return 1.0; };
    sys.rho_full = [](double, const Vec&) { return 1.0; };
    // tau*rho = 0.1 <= beta keeps s = 1 throughout: ten Euler steps
    IntegrationResult res = integrate(sys, {1.0}, 0.0, 1.0, 0.1, Method::rkc, Mode::strict, 0.0);
    CHECK(res.steps.size() == 10);
    CHECK(res.y[0] == doctest::Approx(0.3486784401).epsilon(1e-12));
}

TEST_CASE("integrate shortens the final step") {
    SplitSystem sys(
        1, [](double, const Vec&, Vec& o) { o[0] = 0.0; },
        [](double, const Vec& y, Vec& o) { o[0] = -y[0]; });
    sys.rho_fast = [](double, const Vec&) { return 0.0; };
    sys.rho_slow = [](double, const Vec&) { return 1.0; };
    sys.rho_full = [](double, const Vec&) { return 1.0; };
    IntegrationResult res = integrate(sys, {1.0}, 0.0, 1.0, 0.4, Method::rkc, Mode::strict, 0.0);
    CHECK(res.steps.size() == 3);  // 0.4 + 0.4 + 0.2
    CHECK(res.y[0] == doctest::Approx(0.6 * 0.6 * 0.8).epsilon(1e-12));
}

TEST_CASE("blow-up carries the failing stage and time") {
    // rhs turns non-finite from t = 0.3 on; the step starting at 0.4 fails
    SplitSystem sys(
        1, [](double, const Vec&, Vec& o) { o[0] = 0.0; },
        [](double t, const Vec& y, Vec& o) { o[0] = t < 0.3 ? -y[0] : std::nan(""); });
    sys.rho_fast = [](double, const Vec&) { return 0.0; };
    sys.rho_slow = [](double, const Vec&) { return 1.0; };
    sys.rho_full = [](double, const Vec&) { return 1.0; };
    try {
        integrate(sys, {1.0}, 0.0, 1.0, 0.2, Method::rkc, Mode::strict, 0.0);
        FAIL("expected a blow-up");
    } catch (const BlowUpError& e) {
        CHECK(e.time() == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(e.stage() >= 1);
    }
}

TEST_CASE("first-order convergence of both methods on Robertson") {
    std::vector<double> taus, errs_rkc, errs_mrkc;
    Problem pref = robertson_problem();
    const Vec ref = rk4_reference(
        [&](double t, const Vec& y, Vec& o) { pref.system.eval_full(t, y, o); }, pref.y0, 0.0, 25.0, 1e-4);
    for (int k = 2; k <= 5; ++k) {
        const double tau = std::pow(2.0, -k);
        taus.push_back(tau);
        for (Method method : {Method::rkc, Method::mrkc}) {
            Problem p = robertson_problem();
            IntegrationResult res = integrate(p.system, p.y0, 0.0, 25.0, tau, method, Mode::strict);
            double err = 0.0;
            for (int i = 0; i < 3; ++i) err = std::max(err, std::abs(res.y[i] - ref[i]));
            (method == Method::rkc ? errs_rkc : errs_mrkc).push_back(err);
        }
    }
    const double order_rkc = observed_order(taus, errs_rkc);
    const double order_mrkc = observed_order(taus, errs_mrkc);
    CHECK(order_rkc >= 0.7);
    CHECK(order_rkc <= 1.3);
    CHECK(order_mrkc >= 0.7);
    CHECK(order_mrkc <= 1.3);
}
