#include "normsol/verify.hpp"

#include "normsol/fibering.hpp"
#include "normsol/pool.hpp"
#include "normsol/sharp_constants.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace normsol::verify {

using cli::greater_row;
using cli::identity_row;
using cli::info_row;
using cli::less_row;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* const kTitles[kCriteria] = {
    "fibering trichotomy",
    "degenerate anchor",
    "0-homogeneity of mu_p",
    "mass-scaling law",
    "critical limit",
    "threshold bound chain",
    "ground state",
    "mountain pass",
    "multiplier identities",
    "fiber sensitivity",
    "monotonicity sweeps",
    "sharp constants",
    "dual branch",
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double loguniform(std::mt19937_64& rng, double lo_exp, double hi_exp) {
    return std::pow(10.0, std::uniform_real_distribution<double>(lo_exp, hi_exp)(rng));
}

// Random admissible exponents 2 < q < 2+4/N < p <= 2*, with p = 2* a quarter of the time.
Params random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Params P;
    P.N = 3 + static_cast<int>(rng() % 4);
    const double mid = 2.0 + 4.0 / P.N, ts = P.two_star();
    P.q = 2.0 + (mid - 2.0) * (0.02 + 0.96 * U(rng));
    P.p = U(rng) < 0.25 ? ts : mid + (ts - mid) * (0.02 + 0.97 * U(rng));
    P.a = 1.0;
    return P;
}

CheckRow bool_row(std::string name, std::string statement, bool ok) {
    return identity_row(std::move(name), std::move(statement), ok ? 1.0 : 0.0, 1.0, 0.0, false);
}

// s Phi'(s) and the sum of the magnitudes of its three terms.
std::pair<double, double> scaled_derivative(const NormProfile& np, const Params& P, double s) {
    const double A = np.grad2, B = np.massq, C = upper(np, P);
    const double t1 = s * s * A, t2 = P.mu * P.gamma_q() * std::pow(s, P.qg()) * B, t3 = P.gamma_p() * std::pow(s, P.pg()) * C;
    return {t1 - t2 - t3, t1 + t2 + t3};
}

std::vector<CheckRow> c1_trichotomy(Context& ctx) {
    std::mt19937_64 rng(ctx.config().seed);
    int agree = 0, total = 0;
    double worst = 0.0;
    std::string first_mismatch;
    constexpr int kScan = 10000;
    for (int n = 0; n < 1000; ++n) {
        Params P = random_params(rng);
        const NormProfile np =
            make_profile(loguniform(rng, -2, 2), loguniform(rng, -2, 2), loguniform(rng, -2, 2), P);
        P.mu = 1.0;
        const double mth = fiber::mu_threshold(np, P);
        do {
            P.mu = mth * loguniform(rng, -1.5, 0.5);
        } while (std::abs(P.mu / mth - 1.0) < 1e-3);  // keep the two roots resolvable by the scan
        const fiber::FiberingReport rep = fiber::fiber_roots(np, P);

        const double A = np.grad2, B = np.massq, C = upper(np, P), x = P.qg(), y = P.pg();
        const double s_low = std::pow(P.mu * P.gamma_q() * B / A, 1.0 / (2.0 - x));
        const double s_up = std::pow(A / (P.gamma_p() * C), 1.0 / (y - 2.0));
        const double lo = 0.5 * std::min(s_low, s_up), hi = 2.0 * std::max(s_low, s_up);
        std::vector<std::pair<double, double>> brackets;
        double s_prev = lo, f_prev = fibering(np, P, lo).dphi;
        for (int k = 1; k < kScan; ++k) {
            const double s = lo * std::pow(hi / lo, static_cast<double>(k) / (kScan - 1));
            const double f = fibering(np, P, s).dphi;
            if ((f > 0.0) != (f_prev > 0.0)) brackets.emplace_back(s_prev, s);
            s_prev = s;
            f_prev = f;
        }
        bool ok;
        if (brackets.size() == 2) {
            ok = rep.kind == fiber::Case::TwoCritical && rep.t_plus >= brackets[0].first && rep.t_plus <= brackets[0].second &&
                 rep.t_minus >= brackets[1].first && rep.t_minus <= brackets[1].second;
            for (double t : {rep.t_plus, rep.t_minus}) {
                const auto [v, scale] = scaled_derivative(np, P, t);
                worst = std::max(worst, std::abs(v) / scale);
            }
        } else {
            ok = brackets.empty() && rep.kind == fiber::Case::NoCritical;
        }
        ++total;
        if (ok) ++agree;
        else if (first_mismatch.empty()) {
            std::ostringstream os;
            os << "sample " << n << ": scan sign changes " << brackets.size() << ", root finder " << fiber::to_string(rep.kind);
            first_mismatch = os.str();
        }
    }
    std::vector<CheckRow> rows;
    rows.push_back(identity_row("trichotomy agreement", "cases agreeing with a 1e4-point sign scan = samples",
                                agree, total, 0.0, false));
    rows.back().detail = first_mismatch;
    rows.push_back(less_row("root residual", "max |s Phi'(s)| / (sum of term magnitudes) at the roots < 1e-12", worst, 1e-12));
    return rows;
}

std::vector<CheckRow> c2_degenerate(Context&) {
    Params P;
    P.N = 3;
    P.q = 8.0 / 3.0;
    P.p = P.two_star();
    P.a = 1.0;
    P.mu = 1.0;
    const NormProfile np = make_profile(1.0, 1.0, 1.0, P);
    const double mu_exact = 32.0 / 3.0 * std::pow(5.0, -1.25);
    const double t_exact = std::pow(0.2, 0.25);
    std::vector<CheckRow> rows;
    rows.push_back(identity_row("threshold closed form", "mu_p(u) = (32/3) 5^{-5/4}", fiber::mu_threshold(np, P), mu_exact, 1e-10));
    rows.push_back(identity_row("degenerate scale closed form", "s_p(u) = 5^{-1/4}", fiber::s_star(np, P), t_exact, 1e-10));

    P.mu = fiber::mu_threshold(np, P);
    const fiber::FiberingReport rep = fiber::fiber_roots(np, P);
    rows.push_back(bool_row("root finder case", "fiber_roots reports Degenerate at mu = mu_p(u)", rep.kind == fiber::Case::Degenerate));
    rows.push_back(identity_row("root finder t0", "t0 = 5^{-1/4}", rep.kind == fiber::Case::Degenerate ? rep.t_zero : kNaN,
                                t_exact, 1e-8));

    // independent: the maximizer of s^{2-x} A - s^{y-x} C solves a scalar equation
    const double x = P.qg(), y = P.pg();
    auto dh = [&](double s) { return (2.0 - x) * std::pow(s, 1.0 - x) - (y - x) * std::pow(s, y - x - 1.0); };
    std::uintmax_t iters = 200;
    const auto br = boost::math::tools::toms748_solve(dh, 0.1, 2.0, boost::math::tools::eps_tolerance<double>(52), iters);
    rows.push_back(identity_row("bracketed maximizer", "argmax of s^{2-x}A - s^{y-x}C = 5^{-1/4}", 0.5 * (br.first + br.second),
                                t_exact, 1e-8));
    return rows;
}

std::vector<CheckRow> c3_homogeneity(Context& ctx) {
    std::mt19937_64 rng(ctx.config().seed + 3);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
        Params P = random_params(rng);
        P.mu = 1.0;
        const NormProfile np =
            make_profile(loguniform(rng, -2, 2), loguniform(rng, -2, 2), loguniform(rng, -2, 2), P);
        const double s = loguniform(rng, -2, 2);
        const double m0 = fiber::mu_threshold(np, P);
        const double m1 = fiber::mu_threshold(dilate_profile(np, P, s), P);
        worst = std::max(worst, std::abs(m1 - m0) / m0);
    }
    return {less_row("dilation invariance", "max |mu_p(u_s) - mu_p(u)| / mu_p(u) < 100 eps", worst,
                     100.0 * std::numeric_limits<double>::epsilon())};
}

extremal::Options extremal_options(const cli::RunConfig& c) {
    extremal::Options o;
    o.rtol = c.tol;
    o.max_iter = c.max_iter;
    return o;
}

solve::Options solve_options(const cli::RunConfig& c) {
    solve::Options o;
    o.rtol = c.tol;
    o.max_iter = c.max_iter;
    return o;
}

std::vector<CheckRow> c4_mass_scaling(Context& ctx) {
    const auto t0 = std::chrono::steady_clock::now();
    Params P = ctx.base_params();
    P.p = 4.0;
    const auto opt = extremal_options(ctx.config());
    const extremal::ExtremalResult r1 = extremal::minimize_mu(P, ctx.grid(), opt);
    Params P2 = P;
    P2.a = 2.0 * P.a;
    const extremal::ExtremalResult r2 = extremal::minimize_mu(P2, ctx.grid(), opt);
    const double expected = std::pow(2.0, extremal::mass_exponent(P));
    std::vector<CheckRow> rows;
    rows.push_back(bool_row("extremal convergence", "both minimizations converged", r1.converged && r2.converged));
    rows.push_back(identity_row("scaling ratio", "mu*(2a) / mu*(a) = 2^{e}", r2.mu_star / r1.mu_star, expected, 0.02));
    rows.push_back(identity_row("exponent forms", "amplitude exponent = dilation exponent", extremal::mass_exponent(P),
                                extremal::mass_exponent_dilation(P), 1e-12));
    rows.push_back(less_row("runtime", "wall time [s] < 120", seconds_since(t0), 120.0));
    return rows;
}

std::vector<CheckRow> c5_critical_limit(Context& ctx) {
    const auto t0 = std::chrono::steady_clock::now();
    const extremal::CriticalLimit& cl = ctx.critical_limit();
    std::vector<CheckRow> rows;
    rows.push_back(bool_row("ladder convergence", "every minimization along the ladder converged", cl.complete));
    int sign_sum = 0;
    for (std::size_t i = 1; i < cl.mu.size(); ++i) sign_sum += cl.mu[i] > cl.mu[i - 1] ? 1 : -1;
    rows.push_back(identity_row("monotone trend", "|sum of step signs| = steps", std::abs(sign_sum),
                                static_cast<double>(cl.mu.size() - 1), 0.0, false));
    std::ostringstream os;
    for (std::size_t i = 0; i < cl.mu.size(); ++i) os << (i ? "; " : "") << "p=" << cl.p[i] << " mu=" << cl.mu[i];
    rows.back().detail = os.str();
    rows.push_back(less_row("last-step change", "relative change over the last step < 0.05", cl.last_change, 0.05));
    rows.push_back(info_row("extrapolated limit", "linear extrapolation to 2*", cl.limit, cl.mu.back()));
    rows.push_back(less_row("runtime", "wall time [s] < 600 (cached across criteria)", seconds_since(t0), 600.0));
    return rows;
}

std::vector<CheckRow> c6_bound_chain(Context& ctx) {
    const Params P = ctx.base_params();
    const double est = ctx.mu_star_estimate() * std::pow(P.a, P.q * (1.0 - P.gamma_q()) / 2.0);
    const sharp::ConstantBundle cb = sharp::alpha_threshold(P.N, P.q);
    const double thr = sharp::remark_threshold(P.N, P.q);
    std::vector<CheckRow> rows;
    rows.push_back(greater_row("estimate above chain value",
                               "mu*_a a^{q(1-gamma_q)/2} > C1 (2/(q gamma_q)) (2*/2)^{(2-q gamma_q)/(2*-2)}", est, thr));
    rows.push_back(greater_row("chain value above alpha", "C1 (2/(q gamma_q)) (2*/2)^{(2-q gamma_q)/(2*-2)} > alpha_{N,q}", thr,
                               cb.alpha));
    const double x = P.qg(), ts = P.two_star();
    const double corrected = cb.C1 * (2.0 / x) * std::pow(2.0 / ts, (2.0 - x) / (ts - 2.0));
    rows.push_back(info_row("estimate above reciprocal-power chain",
                            "mu*_a a^{q(1-gamma_q)/2} > C1 (2/(q gamma_q)) (2/2*)^{(2-q gamma_q)/(2*-2)}", est, corrected));
    rows.push_back(info_row("estimate above GN/Sobolev bound", "mu*_a >= lower bound from the GN and Sobolev inequalities",
                            ctx.mu_star_estimate(), sharp::gn_lower_bound(P.N, P.q, P.p, P.a)));
    rows.push_back(info_row("C1 and C2", "C1 vs C2", cb.C1, cb.C2));
    return rows;
}

std::vector<CheckRow> solution_rows(const solve::SolveResult& r, ManifoldKind want) {
    std::vector<CheckRow> rows;
    rows.push_back(bool_row("convergence", "descent window criterion and Pohozaev tolerance met", r.converged));
    rows.push_back(less_row("multiplier", "lambda < 0", r.lambda, 0.0));
    rows.push_back(less_row("mass error", "|mass - a| < 1e-10", std::abs(r.norms.mass2 - r.params.a), 1e-10));
    rows.push_back(less_row("Pohozaev residual", "relative Pohozaev residual < 1e-6", r.pohozaev_rel, 1e-6));
    rows.push_back(bool_row("manifold class", "class = " + to_string(want), r.manifold.kind == want));
    rows.back().detail = "class " + to_string(r.manifold.kind) + ", D = " + cli::format_double(r.manifold.D);
    rows.push_back(info_row("least-squares multiplier", "lambda_fit vs lambda", r.lambda_fit, r.lambda));
    rows.push_back(info_row("equation residual", "relative dual-norm residual at lambda_fit", r.pde_residual, 0.0));
    for (const std::string& w : r.warnings) rows.back().detail += (rows.back().detail.empty() ? "" : "; ") + w;
    return rows;
}

std::vector<CheckRow> c7_ground(Context& ctx) {
    ctx.mu_star_estimate();
    const auto t0 = std::chrono::steady_clock::now();
    const solve::SolveResult& r = ctx.ground();
    const double dt = seconds_since(t0);
    std::vector<CheckRow> rows;
    rows.push_back(less_row("ground energy", "m+ < 0", r.energy, 0.0));
    for (CheckRow& row : solution_rows(r, ManifoldKind::Plus)) rows.push_back(std::move(row));
    rows.push_back(info_row("coupling", "mu = 0.5 mu*-estimate", r.params.mu, ctx.mu_star_estimate()));
    rows.push_back(less_row("runtime", "wall time [s] < 60", dt, 60.0));
    return rows;
}

std::vector<CheckRow> c8_mountain_pass(Context& ctx) {
    ctx.ground();
    const auto t0 = std::chrono::steady_clock::now();
    const solve::ContinuationResult& mp = ctx.mountain_pass();
    const double dt = seconds_since(t0);
    const Params P = ctx.base_params();
    const double quantum = std::pow(sharp::sobolev_constant(P.N), P.N / 2.0) / P.N;
    const double mplus = ctx.ground().energy;
    std::vector<CheckRow> rows;
    rows.push_back(greater_row("above ground level", "m- > m+", mp.final.energy, mplus));
    rows.push_back(less_row("below compactness level", "m- < m+ + S^{N/2}/N", mp.final.energy, mplus + quantum));
    for (CheckRow& row : solution_rows(mp.final, ManifoldKind::Minus)) rows.push_back(std::move(row));
    if (P.N == 3) rows.push_back(identity_row("energy quantum", "S^{3/2}/3 = 4.2736", quantum, 4.2736, 1e-4));
    rows.push_back(less_row("runtime", "wall time [s] < 600", dt, 600.0));
    return rows;
}

CheckRow multiplier_row(const std::string& name, const solve::SolveResult& r) {
    const Params& P = r.params;
    const double B = r.norms.massq, C = upper(r.norms, P);
    double rhs = P.mu * (P.gamma_q() - 1.0) * B;
    std::string stmt = "lambda a = (gamma_q - 1) mu |u|_q^q";
    if (!P.critical()) {
        rhs += (P.gamma_p() - 1.0) * C;
        stmt = "lambda a = mu (gamma_q - 1) |u|_q^q + (gamma_p - 1) |u|_p^p";
    }
    CheckRow row = identity_row(name, stmt, r.lambda * r.norms.mass2, rhs, 1e-6);
    row.detail = "p = " + cli::format_double(P.p);
    return row;
}

std::vector<CheckRow> c9_multipliers(Context& ctx) {
    const solve::SolveResult& g = ctx.ground();
    const solve::ContinuationResult& mp = ctx.mountain_pass();
    std::vector<CheckRow> rows;
    rows.push_back(multiplier_row("ground, p = 2*", g));
    rows.push_back(multiplier_row("mountain pass, p = 2*", mp.final));
    for (const solve::SolveResult& r : mp.chain) rows.push_back(multiplier_row("mountain pass, p < 2*", r));
    for (const solve::SolveResult* r : {&g, &mp.final}) {
        const double lhs = r->lambda_fit * r->norms.mass2;
        rows.push_back(info_row("least-squares cross-check (" + solve::to_string(r->branch) + ")",
                                "lambda_fit a vs (gamma_q - 1) mu |u|_q^q", lhs,
                                r->params.mu * (r->params.gamma_q() - 1.0) * r->norms.massq));
    }
    return rows;
}

std::vector<CheckRow> c10_sensitivity(Context& ctx) {
    std::mt19937_64 rng(ctx.config().seed + 10);
    std::uniform_real_distribution<double> U(0.05, 0.95);
    double err_t = 0.0, err_psi = 0.0, min_plus = HUGE_VAL, max_minus = -HUGE_VAL, max_psi = -HUGE_VAL;
    for (int n = 0; n < 100; ++n) {
        Params P = random_params(rng);
        P.mu = 1.0;
        const NormProfile np =
            make_profile(loguniform(rng, -1, 1), loguniform(rng, -1, 1), loguniform(rng, -1, 1), P);
        P.mu = U(rng) * fiber::mu_threshold(np, P);
        const double hm = 1e-5 * P.mu;
        Params Pl = P, Pr = P;
        Pl.mu -= hm;
        Pr.mu += hm;
        const fiber::FiberingReport rl = fiber::fiber_roots(np, Pl), rr = fiber::fiber_roots(np, Pr);
        for (fiber::Branch b : {fiber::Branch::Plus, fiber::Branch::Minus}) {
            const fiber::Sensitivity s = fiber::fiber_sensitivity(np, P, b);
            const double fd_t = (rr.root(b) - rl.root(b)) / (2.0 * hm);
            const double fd_psi = (fibering(np, Pr, rr.root(b)).phi - fibering(np, Pl, rl.root(b)).phi) / (2.0 * hm);
            err_t = std::max(err_t, std::abs(s.dt_dmu - fd_t) / std::abs(fd_t));
            err_psi = std::max(err_psi, std::abs(s.dpsi_dmu - fd_psi) / std::abs(fd_psi));
            if (b == fiber::Branch::Plus) min_plus = std::min(min_plus, s.dt_dmu);
            else max_minus = std::max(max_minus, s.dt_dmu);
            max_psi = std::max(max_psi, s.dpsi_dmu);
        }
    }
    return {
        less_row("root derivative", "max relative error of dt/dmu vs central difference < 1e-3", err_t, 1e-3),
        greater_row("t+ increases", "min dt+/dmu > 0", min_plus, 0.0),
        less_row("t- decreases", "max dt-/dmu < 0", max_minus, 0.0),
        less_row("energy decreases", "max dPsi/dmu < 0", max_psi, 0.0),
        info_row("energy derivative", "max relative error of dPsi/dmu vs central difference", err_psi, 0.0),
    };
}

struct SweepPoint {
    double m_plus = kNaN, m_minus = kNaN;
    bool ok = false;
    std::string note;
};

SweepPoint branch_pair(const Params& P, radial::GridPtr grid, const cli::RunConfig& c) {
    SweepPoint sp;
    try {
        solve::Options o = solve_options(c);
        const solve::SolveResult g = solve::solve_ground(P, grid, o);
        o.ground_energy = g.energy;
        const solve::ContinuationResult mp = solve::continue_to_critical(P, grid, c.ladder(), o);
        sp.m_plus = g.energy;
        sp.m_minus = mp.final.energy;
        sp.ok = g.converged && mp.final.converged;
        if (!sp.ok) sp.note = "not converged";
    } catch (const std::exception& e) {
        sp.note = e.what();
    }
    return sp;
}

// Largest increase along a sequence that should be nonincreasing, relative to max(1, |value|).
double worst_increase(const std::vector<double>& v) {
    double w = -HUGE_VAL;
    for (std::size_t i = 1; i < v.size(); ++i) w = std::max(w, (v[i] - v[i - 1]) / std::max(1.0, std::abs(v[i - 1])));
    return std::isnan(w) ? HUGE_VAL : w;
}

std::vector<CheckRow> c11_monotonicity(Context& ctx) {
    const double est = ctx.mu_star_estimate();
    const cli::RunConfig& c = ctx.config();
    const Params base = ctx.base_params();
    constexpr double kTol = 1e-8;

    std::vector<double> mus;
    for (int k = 0; k < 10; ++k) mus.push_back(est * (0.1 + 0.07 * k));
    const std::vector<double> as = {0.6 * base.a, 0.7 * base.a, 0.8 * base.a, 0.9 * base.a, base.a};
    const double mu_a = 0.5 * est;

    auto grid = ctx.grid();
    const auto mu_pts = parallel_map<SweepPoint>(mus.size(), c.workers, [&](std::size_t i) {
        Params P = base;
        P.mu = mus[i];
        return branch_pair(P, grid, c);
    });
    const auto a_pts = parallel_map<SweepPoint>(as.size(), c.workers, [&](std::size_t i) {
        Params P = base;
        P.a = as[i];
        P.mu = mu_a;
        return branch_pair(P, grid, c);
    });

    auto column = [](const std::vector<SweepPoint>& pts, bool plus) {
        std::vector<double> v;
        for (const auto& s : pts) v.push_back(plus ? s.m_plus : s.m_minus);
        return v;
    };
    auto listing = [](const std::vector<double>& x, const std::vector<SweepPoint>& pts) {
        std::ostringstream os;
        for (std::size_t i = 0; i < pts.size(); ++i)
            os << (i ? "; " : "") << cli::format_double(x[i]) << ": " << cli::format_double(pts[i].m_plus) << ", "
               << cli::format_double(pts[i].m_minus) << (pts[i].note.empty() ? "" : " (" + pts[i].note + ")");
        return os.str();
    };
    int ok = 0;
    for (const auto& s : mu_pts) ok += s.ok;
    for (const auto& s : a_pts) ok += s.ok;

    std::vector<CheckRow> rows;
    rows.push_back(identity_row("sweep convergence", "converged runs = 15", ok, 15.0, 0.0, false));
    rows.push_back(less_row("m+ in mu", "max relative increase of m+ along increasing mu < 1e-8", worst_increase(column(mu_pts, true)), kTol));
    rows.back().detail = "mu: m+, m- = " + listing(mus, mu_pts);
    rows.push_back(less_row("m- in mu", "max relative increase of m- along increasing mu < 1e-8", worst_increase(column(mu_pts, false)), kTol));
    rows.push_back(less_row("m+ in a", "max relative increase of m+ along increasing a < 1e-8", worst_increase(column(a_pts, true)), kTol));
    rows.back().detail = "a: m+, m- = " + listing(as, a_pts);
    rows.push_back(less_row("m- in a", "max relative increase of m- along increasing a < 1e-8", worst_increase(column(a_pts, false)), kTol));
    return rows;
}

double bubble_error(int N, double R, int M, double eps) {
    auto g = radial::make_grid(N, R, M);
    const radial::RadialFunction W = sharp::talenti_bubble(N, eps, g, R);
    const double ts = g->two_star();
    const double quotient = radial::kinetic(*g, W.values) / std::pow(radial::sum_power(*g, W.values, ts), 2.0 / ts);
    return std::abs(quotient / sharp::sobolev_constant(N) - 1.0);
}

std::vector<CheckRow> c12_sharp_constants(Context& ctx) {
    const Params P = ctx.base_params();
    constexpr double eps = 0.05;
    const double e1 = bubble_error(P.N, 40.0, 4000, eps);
    const double e2 = bubble_error(P.N, 80.0, 16000, eps);
    std::vector<CheckRow> rows;
    rows.push_back(less_row("bubble quotient, coarse", "|Q(U_eps)/S - 1| < 0.01 on R=40, M=4000", e1, 0.01));
    rows.push_back(less_row("bubble quotient, fine", "|Q(U_eps)/S - 1| < 0.01 on R=80, M=16000", e2, 0.01));
    rows.push_back(less_row("bubble refinement", "fine error < coarse error", e2, e1));

    const double Cgn = sharp::gn_constant(P.N, P.q);
    const double gq = P.gamma_q();
    auto g = radial::make_grid(P.N, 40.0, 4000);
    std::mt19937_64 rng(ctx.config().seed + 12);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = -HUGE_VAL;
    for (int n = 0; n < 100; ++n) {
        std::vector<double> v(g->M + 1, 0.0);
        const int terms = 1 + static_cast<int>(rng() % 3);
        for (int j = 0; j < terms; ++j) {
            const double c = 0.1 + 0.9 * U(rng), w = loguniform(rng, -0.3, 0.7);
            const int shape = static_cast<int>(rng() % 3);
            const double b = 1.5 + 1.5 * U(rng);
            for (int i = 0; i <= g->M; ++i) {
                const double z = g->r[i] / w;
                v[i] += c * (shape == 0 ? std::exp(-z * z) : shape == 1 ? 1.0 / std::cosh(z) : std::pow(1.0 + z * z, -b));
            }
        }
        v[g->M] = 0.0;
        const radial::RadialFunction u(g, std::move(v));
        const radial::NormProfile np = radial::norms(u, P.q, P.two_star());
        const double ratio =
            std::pow(np.massq, 1.0 / P.q) / (Cgn * std::pow(np.grad2, gq / 2.0) * std::pow(np.mass2, (1.0 - gq) / 2.0));
        worst = std::max(worst, ratio - 1.0);
    }
    rows.push_back(less_row("GN inequality", "max over 100 random functions of |u|_q/(C |grad u|^g |u|^{1-g}) - 1 < 1e-8",
                            worst, 1e-8));
    rows.push_back(info_row("GN constant", "C_{N,q} from the shooting ground state", Cgn, 0.0));
    return rows;
}

std::vector<double> dual_t_grid(const cli::RunConfig& c) {
    if (!c.t_grid.empty()) return c.t_grid;
    std::vector<double> t;
    for (int k = 0; k < 24; ++k) t.push_back(2.0 * std::pow(20.0, k / 23.0));
    for (int k = 0; k <= 15; ++k) t.push_back(2.10 + 0.02 * k);
    std::sort(t.begin(), t.end());
    std::vector<double> out;
    for (double x : t)
        if (out.empty() || x - out.back() > 1e-9) out.push_back(x);
    return out;
}

// Scale t at which the scalar-field family reproduces a normalized solution with multiplier lambda.
double implied_t(int N, double q, double mu, double lambda) {
    const double sigma = std::sqrt(-lambda);
    return mu * std::pow(sigma, (N - 2.0) * (q - 2.0) / 2.0 - 2.0);
}

std::vector<CheckRow> c13_dual_branch(Context& ctx) {
    const auto t0 = std::chrono::steady_clock::now();
    const Params P = ctx.base_params();
    const double est = ctx.mu_star_estimate();
    const double mu_small = 0.5 * est, mu_large = 2.0 * est;
    auto g = radial::make_grid(P.N, 20.0, 16000);
    solve::ScalarFieldOptions so;
    so.rtol = ctx.config().tol;
    so.max_iter = ctx.config().max_iter;
    const solve::DualScan small = solve::dual_branch_scan(P.N, P.q, P.a, mu_small, dual_t_grid(ctx.config()), g, so);
    const solve::DualScan large = solve::dual_scan_from(P.N, P.q, P.a, mu_large, small.points);
    int converged = 0;
    for (const auto& p : small.points) converged += p.converged;

    std::vector<CheckRow> rows;
    rows.push_back(greater_row("two-solution regime", "zeros of h at mu = 0.5 mu*-estimate >= 2",
                               static_cast<double>(small.brackets.size()), 1.5));
    std::ostringstream os;
    for (const auto& b : small.brackets) os << "[" << cli::format_double(b.first) << ", " << cli::format_double(b.second) << "] ";
    os << "resolved points " << converged << "/" << small.points.size();
    rows.back().detail = os.str();
    rows.push_back(identity_row("no-solution regime", "zeros of h at mu = 2 mu*-estimate = 0",
                                static_cast<double>(large.brackets.size()), 0.0, 0.0, false));
    const auto br = crossover_bracket(P.N, P.q, P.a, small.points, mu_small, mu_large);
    rows.push_back(info_row("crossover bracket", "mu-hat in [lower, upper], no tolerance claimed", br.first, br.second));

    // zero locations against the multipliers of the two constrained solutions
    if (P.N == 3 && ctx.ground().params.mu == mu_small) {
        const double tp = implied_t(P.N, P.q, mu_small, ctx.ground().lambda);
        const double tm = implied_t(P.N, P.q, mu_small, ctx.mountain_pass().final.lambda);
        if (small.brackets.size() >= 2) {
            const auto& lo = small.brackets.front();
            const auto& hi = small.brackets.back();
            rows.push_back(info_row("mountain-pass zero", "bracket midpoint vs t implied by lambda-", 0.5 * (lo.first + lo.second), tm));
            rows.push_back(info_row("ground zero", "bracket midpoint vs t implied by lambda+", 0.5 * (hi.first + hi.second), tp));
        }
    }
    rows.push_back(info_row("runtime", "wall time [s]", seconds_since(t0), 0.0));
    return rows;
}

// ---- extra checks

double witness_energy(const radial::RadialGrid& g, const std::vector<double>& u, const std::vector<double>& W, double t,
                      const Params& P) {
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] + t * W[i];
    const double s = std::sqrt(radial::mass(g, v) / P.a);
    const double A = radial::kinetic(g, v);
    const double B = std::pow(s, P.q * (P.N - 2.0) / 2.0 - P.N) * radial::sum_power(g, v, P.q);
    const double C = radial::sum_power(g, v, P.two_star());
    return A / 2.0 - P.mu * B / P.q - C / P.two_star();
}

std::vector<CheckRow> gap_witness(Context& ctx) {
    const solve::SolveResult& gr = ctx.ground();
    const Params& P = gr.params;
    const radial::RadialGrid& g0 = *gr.u.grid;
    // refine by 4: the piecewise-linear profile is reproduced exactly
    constexpr int k = 4;
    auto g = radial::make_grid(P.N, g0.R, g0.M * k);
    std::vector<double> u(g->M + 1);
    for (int i = 0; i <= g->M; ++i) {
        const int c = std::min(i / k, g0.M - 1);
        const double f = static_cast<double>(i - c * k) / k;
        u[i] = (1.0 - f) * gr.u.values[c] + f * gr.u.values[c + 1];
    }
    const double level = gr.energy + std::pow(sharp::sobolev_constant(P.N), P.N / 2.0) / P.N;
    std::vector<CheckRow> rows;
    for (double eps : {0.1, 0.05, 0.025}) {
        const radial::RadialFunction W = sharp::talenti_bubble(P.N, eps, g, 0.5 * g->R);
        double best = -HUGE_VAL, tb = 0.0;
        constexpr int n = 600;
        for (int j = 0; j <= n; ++j) {
            const double t = 3.0 * j / n;
            const double e = witness_energy(*g, u, W.values, t, P);
            if (e > best) best = e, tb = t;
        }
        const double lo = std::max(0.0, tb - 3.0 / n), hi = tb + 3.0 / n;
        const auto m = boost::math::tools::brent_find_minima(
            [&](double t) { return -witness_energy(*g, u, W.values, t, P); }, lo, hi, 40);
        best = std::max(best, -m.second);
        CheckRow row = less_row("gap witness, eps = " + cli::format_double(eps),
                                "sup_t Psi(normalized u+ + t U_eps) < m+ + S^{N/2}/N", best, level);
        row.informational = eps != 0.025;
        row.detail = "maximizing t = " + cli::format_double(m.first);
        rows.push_back(row);
    }
    return rows;
}

std::vector<CheckRow> ratio_grid(Context& ctx) {
    const int N = ctx.base_params().N;
    const double mid = 2.0 + 4.0 / N, ts = 2.0 * N / (N - 2.0);
    double best = HUGE_VAL, bq = 0.0, bp = 0.0;
    constexpr int n = 60;
    for (int i = 1; i < n; ++i)
        for (int j = 1; j <= n; ++j) {
            const double q = 2.0 + (mid - 2.0) * i / n, p = mid + (ts - mid) * j / n;
            const double r = sharp::improvement_ratio(N, q, p);
            if (r < best) best = r, bq = q, bp = p;
        }
    CheckRow row = greater_row("improvement ratio", "min over a (q, p) grid of the improvement ratio >= 1", best, 1.0 - 1e-12);
    row.detail = "minimum at q = " + cli::format_double(bq) + ", p = " + cli::format_double(bp);
    std::vector<CheckRow> rows{row};
    rows.push_back(info_row("ratio on the edge q = 2+4/N", "ratio at q = 2+4/N, p = 2*", sharp::improvement_ratio(N, mid, ts), 1.0));
    rows.push_back(info_row("ratio on the edge p = 2+4/N", "ratio at q = 2+2/N, p = 2+4/N",
                            sharp::improvement_ratio(N, 2.0 + 2.0 / N, mid), 1.0));
    return rows;
}

}  // namespace

const char* criterion_title(int k) {
    if (k < 1 || k > kCriteria) throw std::out_of_range("criterion_title: no criterion " + std::to_string(k));
    return kTitles[k - 1];
}

Context::Context(cli::RunConfig cfg) : cfg_(std::move(cfg)) {}

radial::GridPtr Context::grid() {
    if (!grid_) grid_ = radial::make_grid(cfg_.N, cfg_.R, cfg_.M);
    return grid_;
}

Params Context::base_params() const {
    Params P;
    P.N = cfg_.N;
    P.q = cfg_.q;
    P.p = P.two_star();
    P.a = cfg_.a;
    P.mu = 0.0;
    return P;
}

const extremal::CriticalLimit& Context::critical_limit() {
    if (!limit_) limit_ = extremal::critical_limit(base_params(), grid(), cfg_.ladder(), extremal_options(cfg_));
    return *limit_;
}

double Context::mu_star_estimate() { return critical_limit().limit; }

double Context::half_mu() { return 0.5 * mu_star_estimate(); }

const solve::SolveResult& Context::ground() {
    if (!ground_) {
        Params P = base_params();
        P.mu = half_mu();
        ground_ = solve::solve_ground(P, grid(), solve_options(cfg_));
    }
    return *ground_;
}

const solve::ContinuationResult& Context::mountain_pass() {
    if (!mp_) {
        Params P = base_params();
        P.mu = half_mu();
        solve::Options o = solve_options(cfg_);
        o.ground_energy = ground().energy;
        mp_ = solve::continue_to_critical(P, grid(), cfg_.ladder(), o);
    }
    return *mp_;
}

bool rows_pass(const std::vector<CheckRow>& rows) {
    for (const CheckRow& r : rows)
        if (!r.informational && !r.pass) return false;
    return true;
}

std::vector<CheckRow> criterion(int k, Context& ctx) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<CheckRow> rows;
    try {
        switch (k) {
            case 1: rows = c1_trichotomy(ctx); break;
            case 2: rows = c2_degenerate(ctx); break;
            case 3: rows = c3_homogeneity(ctx); break;
            case 4: rows = c4_mass_scaling(ctx); break;
            case 5: rows = c5_critical_limit(ctx); break;
            case 6: rows = c6_bound_chain(ctx); break;
            case 7: rows = c7_ground(ctx); break;
            case 8: rows = c8_mountain_pass(ctx); break;
            case 9: rows = c9_multipliers(ctx); break;
            case 10: rows = c10_sensitivity(ctx); break;
            case 11: rows = c11_monotonicity(ctx); break;
            case 12: rows = c12_sharp_constants(ctx); break;
            case 13: rows = c13_dual_branch(ctx); break;
            default: throw std::out_of_range("criterion: no criterion " + std::to_string(k));
        }
    } catch (const std::out_of_range&) {
        throw;
    } catch (const std::exception& e) {
        CheckRow row = bool_row("evaluation", "criterion evaluated without error", false);
        row.detail = e.what();
        rows.push_back(row);
    }
    const double dt = seconds_since(t0);
    const std::string prefix = std::to_string(k) + ". " + criterion_title(k) + ": ";
    if (k == 1 || k == 2)
        rows.push_back(less_row("runtime", k == 1 ? "wall time [s] < 10" : "wall time [s] < 1", dt, k == 1 ? 10.0 : 1.0));
    for (CheckRow& r : rows) {
        r.name = prefix + r.name;
        r.runtime = dt;
    }
    return rows;
}

std::vector<CheckRow> extra_checks(Context& ctx) {
    std::vector<CheckRow> rows;
    for (auto* fn : {&gap_witness, &ratio_grid}) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<CheckRow> part;
        try {
            part = fn(ctx);
        } catch (const std::exception& e) {
            CheckRow row = bool_row("evaluation", "check evaluated without error", false);
            row.detail = e.what();
            part.push_back(row);
        }
        const double dt = seconds_since(t0);
        for (CheckRow& r : part) {
            r.name = "extra: " + r.name;
            r.runtime = dt;
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

std::pair<double, double> crossover_bracket(int N, double q, double a, const std::vector<solve::DualBranchPoint>& data,
                                            double mu_lo, double mu_hi, int iterations) {
    auto zeros = [&](double mu) { return solve::dual_scan_from(N, q, a, mu, data).brackets.size(); };
    if (zeros(mu_lo) < 2 || zeros(mu_hi) >= 2) return {kNaN, kNaN};
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (mu_lo + mu_hi);
        if (zeros(mid) >= 2) mu_lo = mid;
        else mu_hi = mid;
    }
    return {mu_lo, mu_hi};
}

}  // namespace normsol::verify
