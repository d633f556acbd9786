#include "normsol/extremal.hpp"

#include "normsol/fibering.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace normsol::extremal {

descent::Objective log_mu_objective(const radial::RadialGrid& g, const Params& P) {
    const double x = P.qg(), y = P.pg();
    const double al = (y - x) / (y - 2.0), be = (2.0 - x) / (y - 2.0);
    const double lc = std::log(fiber::ctilde(P));
    const double q = P.q, p = P.p;
    return [&g, al, be, lc, q, p](const descent::Vec& u, descent::Vec* grad) {
        const double A = radial::kinetic(g, u);
        const double B = radial::sum_power(g, u, q);
        const double C = radial::sum_power(g, u, p);
        if (!(A > 0.0 && B > 0.0 && C > 0.0)) return std::numeric_limits<double>::infinity();
        if (grad) {
            radial::kinetic_gradient(g, u, *grad);
            for (int i = 0; i <= g.M; ++i) {
                const double ui = std::max(u[i], 0.0);
                (*grad)[i] = al * (*grad)[i] / A - q * g.w[i] * std::pow(ui, q - 1.0) / B -
                             be * p * g.w[i] * std::pow(ui, p - 1.0) / C;
            }
        }
        return lc + al * std::log(A) - std::log(B) - be * std::log(C);
    };
}

ExtremalResult minimize_mu(const Params& P, radial::GridPtr grid, const Options& opt) {
    validate_exponents(P.N, P.q, P.p);
    if (!(P.a > 0.0)) throw std::invalid_argument("minimize_mu: mass must be positive");
    if (!grid || grid->N != P.N) throw std::invalid_argument("minimize_mu: grid dimension mismatch");
    radial::RadialFunction u0 = opt.initial ? radial::project_mass(*opt.initial, P.a)
                                            : radial::gaussian(grid, opt.sigma, P.a);
    if (u0.grid->M != grid->M || u0.grid->h != grid->h) throw std::invalid_argument("minimize_mu: initial profile on another grid");

    descent::Options dopt;
    dopt.max_iter = opt.max_iter;
    dopt.window = opt.window;
    dopt.rtol = opt.rtol;
    const auto F = log_mu_objective(*grid, P);
    descent::Result r = descent::sphere_descent(*grid, u0.values, P.a, F, dopt);

    ExtremalResult out;
    out.minimizer = radial::RadialFunction(grid, std::move(r.u));
    out.mu_star = std::exp(F(out.minimizer.values, nullptr));
    for (double h : r.history) out.history.push_back(std::exp(h));
    out.converged = r.converged;
    out.iterations = r.iterations;
    return out;
}

double mass_exponent(const Params& P) {
    const double x = P.qg(), y = P.pg();
    const double al = (y - x) / (y - 2.0), be = (2.0 - x) / (y - 2.0);
    return al - P.q / 2.0 - be * P.p / 2.0;
}

double mass_exponent_dilation(const Params& P) {
    const double x = P.qg(), y = P.pg(), N = P.N, p = P.p, q = P.q;
    const double e = (2.0 * (1.0 - P.gamma_p()) + ((p - q) * N / p) * (y - 2.0) / (y - x)) * p / (N * (p - 2.0));
    return -e * (y - x) / (y - 2.0);
}

double mass_scaling(const Params& P, double a_from, double a_to, double mu_from) {
    if (!(a_from > 0.0 && a_to > 0.0)) throw std::invalid_argument("mass_scaling: masses must be positive");
    return mu_from * std::pow(a_to / a_from, mass_exponent(P));
}

CriticalLimit critical_limit(const Params& P, radial::GridPtr grid, const std::vector<double>& p_seq, const Options& opt) {
    if (p_seq.size() < 2) throw std::invalid_argument("critical_limit: need at least two exponents");
    const double ts = P.two_star();
    for (std::size_t i = 0; i < p_seq.size(); ++i) {
        if (!(p_seq[i] > 2.0 + 4.0 / P.N && p_seq[i] < ts))
            throw std::invalid_argument("critical_limit: each exponent must lie in (2+4/N, 2*)");
        if (i > 0 && !(p_seq[i] > p_seq[i - 1])) throw std::invalid_argument("critical_limit: exponents must increase");
    }
    CriticalLimit cl;
    cl.complete = true;
    Options o = opt;
    for (double p : p_seq) {
        Params Pk = P;
        Pk.p = p;
        ExtremalResult r = minimize_mu(Pk, grid, o);
        o.initial = r.minimizer;
        cl.p.push_back(p);
        cl.mu.push_back(r.mu_star);
        cl.converged.push_back(r.converged);
        cl.complete = cl.complete && r.converged;
        cl.runs.push_back(std::move(r));
    }
    const std::size_t n = cl.p.size();
    const double d1 = ts - cl.p[n - 1], d0 = ts - cl.p[n - 2];
    cl.limit = cl.mu[n - 1] - d1 * (cl.mu[n - 2] - cl.mu[n - 1]) / (d0 - d1);
    cl.last_change = std::abs(cl.mu[n - 1] - cl.mu[n - 2]) / cl.mu[n - 2];
    return cl;
}

ElResidual degenerate_el_residual(const radial::RadialFunction& u, double mu_star, const Params& P) {
    if (!u.grid) throw std::invalid_argument("degenerate_el_residual: function has no grid");
    Params Pc = P;
    Pc.p = Pc.two_star();
    const double ts = Pc.two_star();
    const radial::NormProfile np0 = radial::norms(u, Pc.q, Pc.p);
    if (!(np0.mass2 > 0.0)) throw std::domain_error("degenerate_el_residual: zero function");
    const radial::RadialFunction v = radial::dilate_exact(u, fiber::s_star(np0, Pc));
    const radial::RadialGrid& g = *v.grid;

    descent::Vec L;
    radial::kinetic_gradient(g, v.values, L);
    const double x = Pc.qg();
    for (int i = 0; i <= g.M; ++i) {
        const double ui = std::max(v.values[i], 0.0);
        L[i] -= g.w[i] * (mu_star * x * std::pow(ui, Pc.q - 1.0) + ts * std::pow(ui, ts - 1.0));
    }
    double lu = 0.0, uu = 0.0;
    for (int i = 0; i < g.M; ++i) {
        lu += L[i] * v.values[i];
        uu += g.w[i] * v.values[i] * v.values[i];
    }
    ElResidual out;
    out.lambda = lu / uu;
    double rn = 0.0, ln = 0.0;
    for (int i = 1; i < g.M; ++i) {
        const double ri = L[i] - out.lambda * g.w[i] * v.values[i];
        rn += ri * ri / g.w[i];
        ln += L[i] * L[i] / g.w[i];
    }
    out.residual = ln > 0.0 ? std::sqrt(rn / ln) : 0.0;
    return out;
}

}  // namespace normsol::extremal
