#include "normsol/sharp_constants.hpp"
#include "normsol/solvers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace normsol;

namespace {

Params params(double mu, double p = 6.0) {
    Params P;
    P.N = 3;
    P.q = 8.0 / 3.0;
    P.p = p;
    P.a = 1.0;
    P.mu = mu;
    return P;
}

void check_invariants(const solve::SolveResult& r, ManifoldKind want) {
    CHECK(r.converged);
    CHECK(std::abs(r.norms.mass2 - r.params.a) <= 1e-10);
    CHECK(std::abs(r.pohozaev) <= 1e-6 * (std::abs(r.energy) + r.norms.grad2));
    CHECK(r.lambda < 0.0);
    CHECK(r.manifold.kind == want);
    CHECK(r.u.admissible());
    CHECK(r.lambda_fit == doctest::Approx(r.lambda).epsilon(1e-3));
}

double ansatz_energy(const radial::GridPtr& g, const Params& P, const std::vector<double>& x) {
    // two stretched exponentials; parameters: log widths, log shapes, log weight, tail power
    std::vector<double> v(g->M + 1);
    const double w1 = std::exp(x[0]), w2 = std::exp(x[1]), s1 = std::exp(x[2]), s2 = std::exp(x[3]), c = std::exp(x[4]);
    for (int i = 0; i <= g->M; ++i) {
        const double r = g->r[i];
        v[i] = std::exp(-std::pow(r / w1, s1)) + c * std::exp(-std::pow(r / w2, s2)) * std::pow(1.0 + r * r, -std::abs(x[5]));
    }
    v[g->M] = 0.0;
    const radial::RadialFunction u = radial::project_mass(radial::RadialFunction(g, v), P.a);
    const auto F = solve::reduced_objective(*g, P, fiber::Branch::Plus);
    return F(u.values, nullptr);
}

}  // namespace

TEST_CASE("oracle: brute-force ansatz search on a coarse grid") {
    auto g = radial::make_grid(3, 12.0, 64);
    const Params P = params(10.0);
    const solve::SolveResult r = solve::solve_ground(P, g);
    REQUIRE(r.converged);
    std::vector<double> x = {0.0, 1.0, 0.7, 0.0, -1.0, 0.5};
    double best = ansatz_energy(g, P, x), step = 0.5;
    while (step > 1e-4) {
        bool moved = false;
        for (std::size_t k = 0; k < x.size(); ++k)
            for (double sgn : {1.0, -1.0}) {
                auto y = x;
                y[k] += sgn * step;
                const double e = ansatz_energy(g, P, y);
                if (e < best) best = e, x = y, moved = true;
            }
        if (!moved) step *= 0.5;
    }
    CHECK(best >= r.energy - 1e-9);
    CHECK(std::abs(best - r.energy) <= 0.05 * std::abs(r.energy));
}

TEST_CASE("ground and mountain-pass solutions satisfy the solution invariants") {
    auto g = radial::make_grid(3, 40.0, 4000);
    const Params P = params(10.0);
    const solve::SolveResult gr = solve::solve_ground(P, g);
    check_invariants(gr, ManifoldKind::Plus);
    CHECK(gr.energy < 0.0);
    CHECK(gr.lambda * P.a == doctest::Approx((P.gamma_q() - 1.0) * P.mu * gr.norms.massq).epsilon(1e-10));
    solve::Options o;
    o.ground_energy = gr.energy;
    const solve::ContinuationResult mp = solve::continue_to_critical(P, g, solve::default_p_seq(3), o);
    check_invariants(mp.final, ManifoldKind::Minus);
    CHECK(mp.final.energy > gr.energy);
    CHECK(mp.final.energy < gr.energy + std::pow(sharp::sobolev_constant(3), 1.5) / 3.0);
    CHECK(mp.final.warnings.empty());
    for (const auto& c : mp.chain) {
        CHECK(c.converged);
        const double rhs = c.params.mu * (c.params.gamma_q() - 1.0) * c.norms.massq + (c.params.gamma_p() - 1.0) * c.norms.massp;
        CHECK(c.lambda * c.params.a == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("subcritical mountain pass lies above the ground state") {
    auto g = radial::make_grid(3, 40.0, 2000);
    const Params P = params(3.0, 4.0);
    const solve::SolveResult gr = solve::solve_ground(P, g);
    const solve::SolveResult mp = solve::solve_mp_subcritical(P, g);
    check_invariants(gr, ManifoldKind::Plus);
    check_invariants(mp, ManifoldKind::Minus);
    CHECK(mp.energy > gr.energy);
    CHECK_THROWS_AS(solve::solve_mp_subcritical(params(3.0), g), std::invalid_argument);
}

TEST_CASE("property: ground energy is nonincreasing in the coupling") {
    auto g = radial::make_grid(3, 40.0, 2000);
    double prev = HUGE_VAL;
    for (double mu : {2.0, 5.0, 8.0, 11.0, 14.0}) {
        const solve::SolveResult r = solve::solve_ground(params(mu), g);
        CHECK(r.converged);
        CHECK(r.energy <= prev);
        prev = r.energy;
    }
}

TEST_CASE("property: reduced gradient matches central differences on tangent directions") {
    auto g = radial::make_grid(3, 20.0, 800);
    const Params P = params(10.0);
    const auto F = solve::reduced_objective(*g, P, fiber::Branch::Plus);
    const std::vector<double> u = radial::gaussian(g, 2.0, 1.0).values;
    std::vector<double> grad;
    F(u, &grad);
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < 5; ++k) {
        std::vector<double> phi(g->M + 1);
        const double c1 = U(rng), c2 = U(rng), w = 1.0 + 2.0 * std::abs(U(rng));
        for (int i = 0; i <= g->M; ++i) phi[i] = c1 * std::exp(-g->r[i] * g->r[i] / (w * w)) + c2 * std::exp(-g->r[i] / w);
        phi[g->M] = 0.0;
        double pu = 0.0, uu = 0.0;
        for (int i = 0; i <= g->M; ++i) pu += g->w[i] * phi[i] * u[i], uu += g->w[i] * u[i] * u[i];
        for (int i = 0; i <= g->M; ++i) phi[i] -= pu / uu * u[i];
        const double h = 1e-5;
        auto up = u, um = u;
        double dir = 0.0;
        for (int i = 0; i <= g->M; ++i) up[i] += h * phi[i], um[i] -= h * phi[i], dir += grad[i] * phi[i];
        const double fd = (F(up, nullptr) - F(um, nullptr)) / (2 * h);
        CHECK(dir == doctest::Approx(fd).epsilon(1e-3));
    }
}

TEST_CASE("coupling beyond the threshold is infeasible") {
    auto g = radial::make_grid(3, 40.0, 1000);
    CHECK_THROWS_AS(solve::solve_ground(params(30.0), g), solve::InfeasibleBranch);
    CHECK_THROWS_AS(solve::solve_ground(params(-1.0), g), std::invalid_argument);
    CHECK_THROWS_AS(solve::continue_to_critical(params(5.0), g, {5.8, 5.6}), std::invalid_argument);
    CHECK_THROWS_AS(solve::continue_to_critical(params(5.0, 5.0), g, {5.6}), std::invalid_argument);
}

TEST_CASE("dual equation coefficient grows with the coupling") {
    // h = t^{2/(x-q)-1} - (1-gamma)/(a mu^{2/(q-x)}) |v_t|_q^q with q > x, so h increases in mu
    const double q = 8.0 / 3.0;
    for (double t : {2.0, 5.0, 20.0}) {
        const double h1 = solve::dual_h(3, q, 1.0, 5.0, t, 3.0), h2 = solve::dual_h(3, q, 1.0, 10.0, t, 3.0);
        CHECK(h2 > h1);
    }
}

TEST_CASE("scalar field solve satisfies its identities") {
    auto g = radial::make_grid(3, 20.0, 8000);
    const solve::ScalarFieldResult r = solve::scalar_field_solve(3, 8.0 / 3.0, 5.0, g);
    CHECK(r.point.converged);
    CHECK(r.residual < 1e-8);
    CHECK(r.nehari_rel < 1e-8);
    CHECK(r.pohozaev_rel < 1e-6);
    CHECK(r.v.admissible());
}

TEST_CASE("dual scan brackets skip unresolved points") {
    const std::vector<solve::DualBranchPoint> pts = {
        {1.0, 1e-6, 0.0, true}, {2.0, 1e6, 0.0, true}, {3.0, 1e-6, 0.0, false}, {4.0, 1e6, 0.0, true}};
    const solve::DualScan s = solve::dual_scan_from(3, 8.0 / 3.0, 1.0, 10.0, pts);
    REQUIRE(s.brackets.size() == 1);
    CHECK(s.brackets[0].first == 1.0);
    CHECK(s.brackets[0].second == 2.0);
    CHECK(s.points[0].h > 0.0);
    CHECK(s.points[1].h < 0.0);
}
