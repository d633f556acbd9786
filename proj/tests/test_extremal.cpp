#include "normsol/extremal.hpp"
#include "normsol/fibering.hpp"
#include "normsol/sharp_constants.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace normsol;

namespace {

Params params(double p, double a = 1.0) {
    Params P;
    P.N = 3;
    P.q = 8.0 / 3.0;
    P.p = p;
    P.a = a;
    P.mu = 0.0;
    return P;
}

}  // namespace

TEST_CASE("oracle: mass exponent at p = 4 is -4/3") {
    CHECK(extremal::mass_exponent(params(4.0)) == doctest::Approx(-4.0 / 3.0).epsilon(1e-14));
    // at p = 2* the exponent is -q(1 - gamma_q)/2
    CHECK(extremal::mass_exponent(params(6.0)) == doctest::Approx(-(8.0 / 3.0) * 0.625 / 2.0).epsilon(1e-14));
}

TEST_CASE("property: amplitude and dilation forms of the mass exponent agree") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> U(0.05, 0.95);
    for (int k = 0; k < 100; ++k) {
        Params P;
        P.N = 3 + k % 4;
        const double mid = 2.0 + 4.0 / P.N, ts = P.two_star();
        P.q = 2.0 + (mid - 2.0) * U(rng);
        P.p = mid + (ts - mid) * U(rng);
        CHECK(extremal::mass_exponent(P) == doctest::Approx(extremal::mass_exponent_dilation(P)).epsilon(1e-12));
    }
}

TEST_CASE("minimized threshold respects the GN lower bound and the scaling law") {
    auto g = radial::make_grid(3, 40.0, 1000);
    const Params P = params(4.0);
    const extremal::ExtremalResult r = extremal::minimize_mu(P, g);
    CHECK(r.converged);
    CHECK(r.minimizer.admissible());
    CHECK(r.mu_star >= sharp::gn_lower_bound(3, P.q, P.p, P.a));
    CHECK(r.mu_star == doctest::Approx(fiber::mu_threshold(radial::norms(r.minimizer, P.q, P.p), P)).epsilon(1e-14));
    for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
    const extremal::ExtremalResult r2 = extremal::minimize_mu(params(4.0, 2.0), g);
    CHECK(r2.mu_star == doctest::Approx(extremal::mass_scaling(P, 1.0, 2.0, r.mu_star)).epsilon(1e-6));
}

TEST_CASE("critical limit ladder decreases toward the critical value") {
    auto g = radial::make_grid(3, 40.0, 1000);
    const extremal::CriticalLimit cl = extremal::critical_limit(params(6.0), g, {5.6, 5.8, 5.9, 5.95});
    CHECK(cl.complete);
    for (std::size_t i = 1; i < cl.mu.size(); ++i) CHECK(cl.mu[i] < cl.mu[i - 1]);
    CHECK(cl.limit < cl.mu.back());
    CHECK(cl.limit > sharp::gn_lower_bound(3, 8.0 / 3.0, 6.0, 1.0));
    CHECK_THROWS_AS(extremal::critical_limit(params(6.0), g, {5.6}), std::invalid_argument);
}

TEST_CASE("degenerate Euler-Lagrange residual of the critical minimizer is small") {
    auto g = radial::make_grid(3, 40.0, 4000);
    const Params P = params(6.0);
    const extremal::ExtremalResult r = extremal::minimize_mu(P, g);
    REQUIRE(r.converged);
    const extremal::ElResidual el = extremal::degenerate_el_residual(r.minimizer, r.mu_star, P);
    CHECK(el.residual < 1e-3);
    CHECK(el.lambda < 0.0);
}
