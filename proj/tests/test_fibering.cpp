#include "normsol/fibering.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace normsol;
using namespace normsol::fiber;

namespace {

Params critical3(double mu) {
    Params P;
    P.N = 3;
    P.q = 8.0 / 3.0;
    P.p = 6.0;
    P.a = 1.0;
    P.mu = mu;
    return P;
}

// Plain bisection on Phi' over a bracket; independent of the library root finder.
double bisect_dphi(const NormProfile& np, const Params& P, double lo, double hi) {
    double flo = fibering(np, P, lo).dphi;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fibering(np, P, mid).dphi;
        if ((fm > 0) == (flo > 0)) lo = mid, flo = fm;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("oracle: unit triple at mu = 1 against scalar bisection") {
    const Params P = critical3(1.0);
    const NormProfile np = make_profile(1.0, 1.0, 1.0, P);
    const FiberingReport r = fiber_roots(np, P);
    REQUIRE(r.kind == Case::TwoCritical);
    const double s0 = s_star(np, P);
    CHECK(r.t_plus == doctest::Approx(bisect_dphi(np, P, 1e-3, s0)).epsilon(1e-13));
    CHECK(r.t_minus == doctest::Approx(bisect_dphi(np, P, s0, 10.0)).epsilon(1e-13));
    CHECK(r.t_plus == doctest::Approx(0.3833).epsilon(1e-3));
    CHECK(r.t_minus == doctest::Approx(0.8682).epsilon(1e-3));
    CHECK(fibering(np, P, r.t_plus).d2phi > 0);
    CHECK(fibering(np, P, r.t_minus).d2phi < 0);
}

TEST_CASE("oracle: degenerate anchor") {
    const Params P = critical3(1.0);
    const NormProfile np = make_profile(1.0, 1.0, 1.0, P);
    CHECK(mu_threshold(np, P) == doctest::Approx(32.0 / 3.0 * std::pow(5.0, -1.25)).epsilon(1e-14));
    CHECK(s_star(np, P) == doctest::Approx(std::pow(0.2, 0.25)).epsilon(1e-14));
    CHECK(ctilde(P) == doctest::Approx(32.0 / 3.0 * std::pow(5.0, -1.25)).epsilon(1e-14));
    const Params Pd = critical3(mu_threshold(np, P));
    const FiberingReport r = fiber_roots(np, Pd);
    CHECK(r.kind == Case::Degenerate);
    CHECK(r.t_zero == doctest::Approx(std::pow(0.2, 0.25)).epsilon(1e-10));
    const auto te = tau_extension(np, Pd);
    CHECK(te.first == te.second);
}

TEST_CASE("oracle: above threshold there are no critical points") {
    const Params P = critical3(2.0);
    const NormProfile np = make_profile(1.0, 1.0, 1.0, P);
    CHECK(fiber_roots(np, P).kind == Case::NoCritical);
    CHECK_THROWS_AS(tau_extension(np, P), std::domain_error);
    CHECK_THROWS_AS(fiber_sensitivity(np, P, Branch::Plus), std::domain_error);
}

TEST_CASE("non-positive coupling is rejected") {
    const Params P = critical3(0.0);
    CHECK_THROWS_AS(fiber_roots(make_profile(1.0, 1.0, 1.0, P), P), std::invalid_argument);
}

TEST_CASE("property: roots straddle the degenerate scale and solve the fiber equation") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        Params P = critical3(1.0);
        P.N = 3 + k % 3;
        const double mid = 2.0 + 4.0 / P.N, ts = P.two_star();
        P.q = 2.0 + (mid - 2.0) * (0.05 + 0.9 * U(rng));
        P.p = k % 4 ? mid + (ts - mid) * (0.05 + 0.9 * U(rng)) : ts;
        const NormProfile np = make_profile(std::exp(3 * U(rng) - 1.5), std::exp(3 * U(rng) - 1.5), std::exp(3 * U(rng) - 1.5), P);
        P.mu = (0.02 + 0.96 * U(rng)) * mu_threshold(np, P);
        const FiberingReport r = fiber_roots(np, P);
        REQUIRE(r.kind == Case::TwoCritical);
        CHECK(r.t_plus < r.s_star);
        CHECK(r.s_star < r.t_minus);
        const double scale = np.grad2 * r.t_minus * r.t_minus;
        CHECK(std::abs(fibering(np, P, r.t_minus).dphi * r.t_minus) <= 1e-12 * scale);
        // t+ is the minimum of the fiber on (0, t-)
        CHECK(fibering(np, P, r.t_plus).phi < fibering(np, P, 0.5 * (r.t_plus + r.t_minus)).phi);
        CHECK(fibering(np, P, r.t_plus).phi < 0.0);
    }
}

TEST_CASE("property: sensitivity matches central differences") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(0.1, 0.9);
    for (int k = 0; k < 50; ++k) {
        Params P = critical3(1.0);
        const NormProfile np = make_profile(U(rng) * 3, U(rng) * 3, U(rng) * 3, P);
        P.mu = U(rng) * mu_threshold(np, P);
        const double h = 1e-5 * P.mu;
        Params Pl = P, Pr = P;
        Pl.mu -= h;
        Pr.mu += h;
        for (Branch b : {Branch::Plus, Branch::Minus}) {
            const Sensitivity s = fiber_sensitivity(np, P, b);
            const double fd = (fiber_roots(np, Pr).root(b) - fiber_roots(np, Pl).root(b)) / (2 * h);
            CHECK(s.dt_dmu == doctest::Approx(fd).epsilon(1e-6));
            CHECK(s.dpsi_dmu < 0.0);
            CHECK((b == Branch::Plus ? s.dt_dmu > 0.0 : s.dt_dmu < 0.0));
        }
    }
}

TEST_CASE("roots follow the dilation action") {
    // t(u_s) = t(u)/s because the fiber of u_s is the fiber of u shifted in scale
    const Params P = critical3(0.8);
    const NormProfile np = make_profile(1.3, 0.9, 0.7, P);
    const FiberingReport r = fiber_roots(np, P);
    for (double s : {0.25, 0.5, 2.0, 7.0}) {
        const FiberingReport rs = fiber_roots(dilate_profile(np, P, s), P);
        CHECK(rs.t_plus == doctest::Approx(r.t_plus / s).epsilon(1e-12));
        CHECK(rs.t_minus == doctest::Approx(r.t_minus / s).epsilon(1e-12));
        CHECK(rs.mu_threshold == doctest::Approx(r.mu_threshold).epsilon(1e-13));
    }
}
