#include "normsol/solvers.hpp"

#include "normsol/extremal.hpp"
#include "normsol/sharp_constants.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace normsol::solve {

std::string to_string(Branch b) { return b == Branch::Ground ? "ground" : "mp"; }

namespace {

using descent::Vec;

fiber::Branch fiber_branch(Branch b) { return b == Branch::Ground ? fiber::Branch::Plus : fiber::Branch::Minus; }

double spow(double v, double e) { return std::pow(std::max(v, 0.0), e); }

radial::NormProfile profile_of(const radial::RadialGrid& g, const Vec& u, const Params& P) {
    return make_profile(radial::kinetic(g, u), radial::sum_power(g, u, P.q), radial::sum_power(g, u, P.p), P);
}

double dual_norm2(const descent::Metric& H, const Vec& r) {
    const Vec x = H.solve(r);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) s += x[i] * r[i];
    return s;
}

// Gaussian start whose fiber root on the requested branch sits near t = 1.
std::optional<radial::RadialFunction> matched_gaussian(const Params& P, radial::GridPtr grid, double sigma,
                                                       fiber::Branch b) {
    for (int k = 0; k < 4; ++k) {
        radial::RadialFunction u = radial::gaussian(grid, sigma, P.a);
        const fiber::FiberingReport rep = fiber::fiber_roots(radial::norms(u, P.q, P.p), P);
        if (rep.kind != fiber::Case::TwoCritical) return std::nullopt;
        const double t = rep.root(b);
        if (std::abs(t - 1.0) < 1e-3 || k == 3) return u;
        sigma /= t;
        if (sigma < 20.0 * grid->h || sigma > grid->R / 8.0) return u;
    }
    return std::nullopt;
}

radial::RadialFunction start_profile(const Params& P, radial::GridPtr grid, const Options& opt, fiber::Branch b) {
    if (opt.initial) return radial::project_mass(*opt.initial, P.a);
    if (auto g = matched_gaussian(P, grid, opt.sigma, b)) return *g;
    // The Gaussian lies above its own threshold; the extremal profile has the
    // smallest threshold on the sphere.
    extremal::ExtremalResult ex = extremal::minimize_mu(P, grid);
    if (!(P.mu < ex.mu_star)) {
        std::ostringstream os;
        os << "coupling mu=" << P.mu << " is not below the extremal estimate " << ex.mu_star << " for this branch";
        throw InfeasibleBranch(os.str());
    }
    const fiber::FiberingReport rep = fiber::fiber_roots(radial::norms(ex.minimizer, P.q, P.p), P);
    return radial::project_mass(radial::dilate(ex.minimizer, rep.root(b)), P.a);
}

SolveResult solve_branch(const Params& P, radial::GridPtr grid, const Options& opt, Branch br) {
    P.validate();
    if (!(P.mu > 0.0)) throw std::invalid_argument("solver: coupling mu must be positive");
    if (!grid || grid->N != P.N) throw std::invalid_argument("solver: grid dimension mismatch");
    const fiber::Branch fb = fiber_branch(br);
    // Below the GN/Sobolev lower bound every profile has both fiber roots;
    // at or above it, compare with the extremal value on this grid.
    if (P.mu >= sharp::gn_lower_bound(P.N, P.q, P.p, P.a)) {
        const double mu_star = extremal::minimize_mu(P, grid).mu_star;
        if (!(P.mu < mu_star)) {
            std::ostringstream os;
            os << "coupling mu=" << P.mu << " is not below the extremal estimate " << mu_star;
            throw InfeasibleBranch(os.str());
        }
    }
    radial::RadialFunction u0 = start_profile(P, grid, opt, fb);

    descent::Options dopt;
    dopt.max_iter = opt.max_iter;
    dopt.window = opt.window;
    dopt.rtol = opt.rtol;
    const radial::RadialGrid& g = *grid;
    const descent::StepCap cap = [&g, &P, tmax = dopt.tau_max](const Vec& u) {
        const double mth = fiber::mu_threshold(profile_of(g, u, P), P);
        const double room = 1.0 - P.mu / mth;
        return tmax * std::clamp(10.0 * room, 1e-3, 1.0);
    };
    descent::Result r = descent::sphere_descent(g, u0.values, P.a, reduced_objective(g, P, fb), dopt, cap);

    SolveResult res = finalize(P, radial::RadialFunction(grid, std::move(r.u)), fb);
    res.iterations = r.iterations;
    res.branch = br;
    const ManifoldKind want = br == Branch::Ground ? ManifoldKind::Plus : ManifoldKind::Minus;
    res.converged = r.converged && res.pohozaev_rel <= opt.poh_tol && res.manifold.kind == want;
    if (!r.converged) res.warnings.push_back("descent stopped: " + r.stop_reason);
    return res;
}

}  // namespace

descent::Objective reduced_objective(const radial::RadialGrid& g, const Params& P, fiber::Branch b) {
    return [&g, P, b](const Vec& u, Vec* grad) {
        const radial::NormProfile np = profile_of(g, u, P);
        if (!(np.grad2 > 0.0 && np.massq > 0.0 && upper(np, P) > 0.0)) return std::numeric_limits<double>::infinity();
        const fiber::FiberingReport rep = fiber::fiber_roots(np, P);
        if (rep.kind != fiber::Case::TwoCritical) return std::numeric_limits<double>::infinity();
        const double t = rep.root(b);
        if (grad) {
            radial::kinetic_gradient(g, u, *grad);
            const double ca = 0.5 * t * t, cq = P.mu * std::pow(t, P.qg()), cp = std::pow(t, P.pg());
            for (int i = 0; i <= g.M; ++i)
                (*grad)[i] = ca * (*grad)[i] - cq * g.w[i] * spow(u[i], P.q - 1.0) - cp * g.w[i] * spow(u[i], P.p - 1.0);
        }
        return fibering(np, P, t).phi;
    };
}

SolveResult finalize(const Params& P, const radial::RadialFunction& base, fiber::Branch b) {
    const fiber::FiberingReport rep = fiber::fiber_roots(radial::norms(base, P.q, P.p), P);
    if (rep.kind != fiber::Case::TwoCritical) throw InfeasibleBranch("fiber of the final state has no critical points");
    SolveResult res;
    res.params = P;
    res.base = base;
    res.fiber_scale = rep.root(b);
    res.u = radial::dilate_exact(base, res.fiber_scale);
    const radial::RadialGrid& g = *res.u.grid;
    const Vec& u = res.u.values;
    res.norms = radial::norms(res.u, P.q, P.p);
    const double A = res.norms.grad2, B = res.norms.massq, C = upper(res.norms, P);
    res.energy = energy(res.norms, P);
    res.lambda = (A - P.mu * B - C) / res.norms.mass2;
    res.pohozaev = pohozaev_residual(res.norms, P);
    res.pohozaev_rel = std::abs(res.pohozaev) / (A + P.mu * P.gamma_q() * B + P.gamma_p() * C);
    res.manifold = classify(res.norms, P, 1e-8);
    res.branch = b == fiber::Branch::Plus ? Branch::Ground : Branch::MountainPass;

    const descent::Metric H(g);
    Vec rE, kin, e(g.M + 1);
    radial::kinetic_gradient(g, u, kin);
    rE = kin;
    for (int i = 0; i <= g.M; ++i) {
        kin[i] *= 0.5;
        rE[i] = kin[i] - P.mu * g.w[i] * spow(u[i], P.q - 1.0) - g.w[i] * spow(u[i], P.p - 1.0);
        e[i] = g.w[i] * u[i];
    }
    const Vec He = H.solve(e);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g.M; ++i) {
        num += He[i] * rE[i];
        den += He[i] * e[i];
    }
    res.lambda_fit = num / den;
    Vec rr(rE);
    for (int i = 0; i <= g.M; ++i) rr[i] -= res.lambda_fit * e[i];
    rr[g.M] = 0.0;
    res.pde_residual = std::sqrt(dual_norm2(H, rr) / dual_norm2(H, kin));
    return res;
}

SolveResult solve_ground(const Params& P, radial::GridPtr grid, const Options& opt) {
    return solve_branch(P, std::move(grid), opt, Branch::Ground);
}

SolveResult solve_mp_subcritical(const Params& P, radial::GridPtr grid, const Options& opt) {
    if (!(P.p < P.two_star())) throw std::invalid_argument("solve_mp_subcritical: requires p < 2*");
    return solve_branch(P, std::move(grid), opt, Branch::MountainPass);
}

ContinuationResult continue_to_critical(const Params& P, radial::GridPtr grid, const std::vector<double>& p_seq,
                                        const Options& opt) {
    if (!P.critical()) throw std::invalid_argument("continue_to_critical: target exponent must be 2*");
    for (std::size_t i = 0; i < p_seq.size(); ++i) {
        if (!(p_seq[i] > 2.0 + 4.0 / P.N && p_seq[i] < P.two_star()))
            throw std::invalid_argument("continue_to_critical: ladder exponents must lie in (2+4/N, 2*)");
        if (i > 0 && !(p_seq[i] > p_seq[i - 1])) throw std::invalid_argument("continue_to_critical: ladder must increase");
    }
    ContinuationResult out;
    Options o = opt;
    for (double p : p_seq) {
        Params Pk = P;
        Pk.p = p;
        SolveResult r = solve_mp_subcritical(Pk, grid, o);
        o.initial = r.base;
        out.chain.push_back(std::move(r));
    }
    out.final = solve_branch(P, grid, o, Branch::MountainPass);

    double m_plus;
    if (opt.ground_energy) {
        m_plus = *opt.ground_energy;
    } else {
        Options og = opt;
        og.initial.reset();
        m_plus = solve_ground(P, grid, og).energy;
    }
    const double level = m_plus + std::pow(sharp::sobolev_constant(P.N), P.N / 2.0) / P.N;
    for (const SolveResult& r : out.chain) {
        if (r.energy >= level) {
            std::ostringstream os;
            os << "compactness loss: chain energy " << r.energy << " at p=" << r.params.p << " reaches m+ + S^{N/2}/N = " << level;
            out.final.warnings.push_back(os.str());
        }
    }
    if (out.final.energy >= level) out.final.warnings.push_back("compactness loss: final energy reaches m+ + S^{N/2}/N");
    return out;
}

std::vector<double> default_p_seq(int N) {
    const double ts = 2.0 * N / (N - 2.0);
    return {ts - 0.4, ts - 0.2, ts - 0.1, ts - 0.05};
}

// ---------------------------------------------------------------- dual branch

double dual_h(int N, double q, double a, double mu, double t, double v_norm_q) {
    const double gq = N * (q - 2.0) / (2.0 * q);
    const double x = q * gq;
    return std::pow(t, 2.0 / (x - q) - 1.0) - (1.0 - gq) / (a * std::pow(mu, 2.0 / (q - x))) * v_norm_q;
}

namespace {

struct ActionNorms {
    double A, M, B, C;
};

ActionNorms action_norms(const radial::RadialGrid& g, const Vec& v, double q) {
    return {radial::kinetic(g, v), radial::mass(g, v), radial::sum_power(g, v, q), radial::sum_power(g, v, g.two_star())};
}

// c > 0 with (A+M) = t c^{q-2} B + c^{2*-2} C
double nehari_scale(const ActionNorms& n, double t, double q, double ts) {
    auto f = [&](double c) { return (n.A + n.M) - t * std::pow(c, q - 2.0) * n.B - std::pow(c, ts - 2.0) * n.C; };
    double hi = 1.0;
    while (f(hi) > 0.0) hi *= 2.0;
    double lo = hi;
    while (f(lo) <= 0.0) lo *= 0.5;
    boost::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(50);
    auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    return 0.5 * (r.first + r.second);
}

descent::Objective nehari_objective(const radial::RadialGrid& g, double t, double q) {
    const double ts = g.two_star();
    return [&g, t, q, ts](const Vec& u, Vec* grad) {
        const ActionNorms n = action_norms(g, u, q);
        if (!(n.B > 0.0)) return std::numeric_limits<double>::infinity();
        const double c = nehari_scale(n, t, q, ts);
        if (grad) {
            radial::kinetic_gradient(g, u, *grad);
            const double c2 = 0.5 * c * c, cq = t * std::pow(c, q), cs = std::pow(c, ts);
            for (int i = 0; i <= g.M; ++i)
                (*grad)[i] = c2 * ((*grad)[i] + 2.0 * g.w[i] * u[i]) - cq * g.w[i] * spow(u[i], q - 1.0) -
                             cs * g.w[i] * spow(u[i], ts - 1.0);
        }
        return 0.5 * c * c * (n.A + n.M) - t * std::pow(c, q) * n.B / q - std::pow(c, ts) * n.C / ts;
    };
}

Vec field_residual(const radial::RadialGrid& g, const Vec& v, double t, double q) {
    const double ts = g.two_star();
    Vec r;
    radial::kinetic_gradient(g, v, r);
    for (int i = 0; i <= g.M; ++i) {
        const double av = std::abs(v[i]);
        r[i] = 0.5 * r[i] + g.w[i] * (v[i] - t * std::pow(av, q - 2.0) * v[i] - std::pow(av, ts - 2.0) * v[i]);
    }
    r[g.M] = 0.0;
    return r;
}

// relative residual |R|_{H^-1} / |v|_H
double field_residual_rel(const radial::RadialGrid& g, const descent::Metric& H, const Vec& v, double t, double q) {
    const Vec r = field_residual(g, v, t, q);
    return std::sqrt(dual_norm2(H, r) / H.inner(v, v));
}

bool newton_polish(const radial::RadialGrid& g, Vec& v, double t, double q, double tol, double& rel) {
    const double ts = g.two_star();
    const int n = g.M;
    const double ih2 = 1.0 / (g.h * g.h);
    const descent::Metric H(g);
    rel = field_residual_rel(g, H, v, t, q);
    for (int it = 0; it < 30 && rel > tol; ++it) {
        const Vec r = field_residual(g, v, t, q);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(3 * n);
        for (int i = 0; i < n; ++i) {
            const double av = std::abs(v[i]);
            double d = g.w[i] * (1.0 - t * (q - 1.0) * std::pow(av, q - 2.0) - (ts - 1.0) * std::pow(av, ts - 2.0));
            d += g.m[i] * ih2;
            if (i > 0) d += g.m[i - 1] * ih2;
            trip.emplace_back(i, i, d);
            if (i + 1 < n) {
                trip.emplace_back(i, i + 1, -g.m[i] * ih2);
                trip.emplace_back(i + 1, i, -g.m[i] * ih2);
            }
        }
        Eigen::SparseMatrix<double> J(n, n);
        J.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(J);
        if (lu.info() != Eigen::Success) return false;
        Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(r.data(), n);
        Eigen::VectorXd dx = lu.solve(rhs);
        if (lu.info() != Eigen::Success) return false;
        for (int i = 0; i < n; ++i) v[i] -= dx[i];
        rel = field_residual_rel(g, H, v, t, q);
        if (!std::isfinite(rel)) return false;
    }
    return rel <= tol;
}

int half_width_cells(const Vec& v) {
    const double half = 0.5 * v[0];
    int k = 0;
    while (k + 1 < static_cast<int>(v.size()) && v[k] > half) ++k;
    return k;
}

}  // namespace

ScalarFieldResult scalar_field_solve(int N, double q, double t, radial::GridPtr grid, const ScalarFieldOptions& opt) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("scalar_field_solve: t must be positive");
    if (!grid || grid->N != N) throw std::invalid_argument("scalar_field_solve: grid dimension mismatch");
    const double ts = grid->two_star();
    if (!(q > 2.0 && q < ts)) throw std::invalid_argument("scalar_field_solve: need 2 < q < 2*");

    radial::RadialFunction start = opt.initial ? radial::project_mass(*opt.initial, 1.0) : radial::gaussian(grid, 1.0, 1.0);
    descent::Options dopt;
    dopt.max_iter = opt.max_iter;
    dopt.window = opt.window;
    dopt.rtol = opt.rtol;
    dopt.project_dilation = false;
    descent::Result dr = descent::sphere_descent(*grid, start.values, 1.0, nehari_objective(*grid, t, q), dopt);

    ScalarFieldResult out;
    out.point.t = t;
    Vec v = dr.u;
    {
        const double c = nehari_scale(action_norms(*grid, v, q), t, q, ts);
        for (double& x : v) x *= c;
    }
    radial::GridPtr g = grid;
    bool ok = dr.converged;
    if (!ok) out.status = "descent: " + dr.stop_reason;
    double rel = 1.0;
    if (ok && !newton_polish(*g, v, t, q, opt.newton_tol, rel)) {
        ok = false;
        out.status = "newton polish failed";
    }
    for (double& x : v) x = std::max(x, 0.0);
    v[g->M] = 0.0;
    if (ok && half_width_cells(v) < 5) {
        ok = false;
        out.status = "concentrated at grid scale";
    }
    out.v = radial::RadialFunction(g, v);
    const ActionNorms n = action_norms(*g, v, q);
    const descent::Metric H(*g);
    out.residual = field_residual_rel(*g, H, v, t, q);
    out.nehari_rel = std::abs(n.A + n.M - t * n.B - n.C) / (n.A + n.M + t * n.B + n.C);
    const double pa = (N - 2.0) / 2.0 * n.A, pb = N / 2.0 * n.M, pc = N * t / q * n.B, pd = N / ts * n.C;
    out.pohozaev_rel = std::abs(pa + pb - pc - pd) / (pa + pb + pc + pd);
    out.action = 0.5 * (n.A + n.M) - t * n.B / q - n.C / ts;
    out.point.v_norm_q = n.B;
    if (ok && !(out.pohozaev_rel <= opt.identity_tol)) {
        ok = false;
        out.status = "identity audit failed (under-resolved profile)";
    }
    out.point.converged = ok && n.B > 0.0;
    if (out.status.empty()) out.status = ok ? "converged" : "failed";
    return out;
}

DualScan dual_scan_from(int N, double q, double a, double mu, const std::vector<DualBranchPoint>& data) {
    DualScan s;
    s.points = data;
    for (DualBranchPoint& p : s.points) p.h = dual_h(N, q, a, mu, p.t, p.v_norm_q);
    const DualBranchPoint* prev = nullptr;
    for (const DualBranchPoint& p : s.points) {
        if (!p.converged) continue;
        if (prev && ((prev->h < 0.0) != (p.h < 0.0))) s.brackets.emplace_back(prev->t, p.t);
        prev = &p;
    }
    return s;
}

DualScan dual_branch_scan(int N, double q, double a, double mu, const std::vector<double>& t_grid, radial::GridPtr grid,
                          const ScalarFieldOptions& opt) {
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0)) throw std::invalid_argument("dual_branch_scan: t values must be positive");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("dual_branch_scan: t grid must increase");
    }
    std::vector<DualBranchPoint> pts(t_grid.size());
    ScalarFieldOptions o = opt;
    // large t first: the profile is wide and smooth there
    for (std::size_t k = t_grid.size(); k-- > 0;) {
        ScalarFieldResult r = scalar_field_solve(N, q, t_grid[k], grid, o);
        pts[k] = r.point;
        if (r.point.converged) o.initial = radial::RadialFunction(grid, r.v.values);
    }
    DualScan s = dual_scan_from(N, q, a, mu, pts);
    bool any = false;
    for (const auto& p : s.points) any = any || p.converged;
    if (!any) throw std::runtime_error("dual_branch_scan: no point converged");
    return s;
}

}  // namespace normsol::solve
