#include "normsol/descent.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace normsol;
using namespace normsol::descent;

TEST_CASE("oracle: lowest Dirichlet eigenvalue of the ball") {
    // minimizing |grad u|^2 on the sphere gives (pi/R)^2 for N = 3
    auto g = radial::make_grid(3, std::numbers::pi, 400);
    const Objective F = [&g](const Vec& u, Vec* grad) {
        if (grad) radial::kinetic_gradient(*g, u, *grad);
        return radial::kinetic(*g, u);
    };
    Options opt;
    opt.project_dilation = false;
    opt.rtol = 1e-13;
    const Result r = sphere_descent(*g, radial::gaussian(g, 0.5, 1.0).values, 1.0, F, opt);
    CHECK(r.converged);
    CHECK(radial::kinetic(*g, r.u) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(radial::mass(*g, r.u) == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
}

TEST_CASE("oracle: pool adjacent violators") {
    Vec u = {3.0, 1.0, 2.0, 0.0};
    monotone_projection(u, Vec(4, 1.0));
    CHECK(u[0] == 3.0);
    CHECK(u[1] == doctest::Approx(1.5));
    CHECK(u[2] == doctest::Approx(1.5));
    CHECK(u[3] == 0.0);
    Vec v = {1.0, 2.0};
    monotone_projection(v, {3.0, 1.0});
    CHECK(v[0] == doctest::Approx(1.25));
    CHECK(v[1] == doctest::Approx(1.25));
}

TEST_CASE("property: isotonic projection is idempotent and nonincreasing") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 30; ++k) {
        Vec u(50), w(50);
        for (int i = 0; i < 50; ++i) u[i] = U(rng), w[i] = 0.1 + U(rng);
        monotone_projection(u, w);
        for (int i = 1; i < 50; ++i) CHECK(u[i] <= u[i - 1] + 1e-15);
        Vec again = u;
        monotone_projection(again, w);
        for (int i = 0; i < 50; ++i) CHECK(again[i] == doctest::Approx(u[i]).epsilon(1e-14));
    }
}

TEST_CASE("metric solve inverts apply") {
    auto g = radial::make_grid(3, 5.0, 200);
    const Metric H(*g);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Vec v(g->M + 1);
    for (double& x : v) x = U(rng);
    v[g->M] = 0.0;
    const Vec w = H.solve(H.apply(v));
    for (int i = 0; i <= g->M; ++i) CHECK(w[i] == doctest::Approx(v[i]).epsilon(1e-9));
    CHECK(H.inner(v, v) > 0.0);
}

TEST_CASE("dilation generator is the derivative of the exact dilation") {
    // d/dt of t^{N/2} u(t r) at t = 1 is r u' + (N/2) u
    auto g = radial::make_grid(3, 20.0, 2000);
    const radial::RadialFunction u = radial::gaussian(g, 2.0, 1.0);
    const Vec z = dilation_generator(*g, u.values);
    for (int i : {0, 100, 400, 900}) {
        const double r = g->r[i], s = 2.0;
        const double exact = u.values[i] * (1.5 - r * r / (s * s));
        CHECK(z[i] == doctest::Approx(exact).epsilon(1e-4));
    }
}

TEST_CASE("descent rejects bad input") {
    auto g = radial::make_grid(3, 5.0, 50);
    const Objective F = [](const Vec&, Vec*) { return 0.0; };
    CHECK_THROWS_AS(sphere_descent(*g, Vec(10, 1.0), 1.0, F, {}), std::invalid_argument);
    CHECK_THROWS_AS(sphere_descent(*g, Vec(51, 0.0), 1.0, F, {}), std::invalid_argument);
    const Objective Inf = [](const Vec&, Vec*) { return HUGE_VAL; };
    CHECK_THROWS_AS(sphere_descent(*g, radial::gaussian(g, 1.0, 1.0).values, 1.0, Inf, {}), std::domain_error);
}
