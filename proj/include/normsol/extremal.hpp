#pragma once

#include "normsol/descent.hpp"
#include "normsol/functionals.hpp"

#include <optional>
#include <vector>

namespace normsol::extremal {

struct Options {
    int max_iter = 20000;
    int window = 50;
    double rtol = 1e-10;
    double sigma = 2.0;  // width of the Gaussian start
    std::optional<radial::RadialFunction> initial;
};

struct ExtremalResult {
    double mu_star = 0.0;
    radial::RadialFunction minimizer;
    std::vector<double> history;  // mu_p per accepted iterate
    bool converged = false;
    int iterations = 0;
};

// Objective log mu_p(u) with gradient; +inf for degenerate profiles.
descent::Objective log_mu_objective(const radial::RadialGrid& g, const Params& P);

// Minimizes mu_p over the admissible mass sphere S_a (P.mu is ignored).
ExtremalResult minimize_mu(const Params& P, radial::GridPtr grid, const Options& opt = {});

// Exponent e in mu*_{a,p} = mu*_{1,p} a^{e}, from amplitude scaling u -> sqrt(a) u.
double mass_exponent(const Params& P);

// The same exponent through the substitution s^{N/p} u(s x), s^{N(p-2)/p} = a.
double mass_exponent_dilation(const Params& P);

double mass_scaling(const Params& P, double a_from, double a_to, double mu_from);

struct CriticalLimit {
    std::vector<double> p;
    std::vector<double> mu;
    std::vector<bool> converged;
    double limit = 0.0;         // linear extrapolation in 2* - p from the last two entries
    double last_change = 0.0;   // relative change over the last step
    bool complete = false;      // every run converged
    std::vector<ExtremalResult> runs;
};

// Runs minimize_mu along p_seq (each in (2+4/N, 2*)) with warm starts.
CriticalLimit critical_limit(const Params& P, radial::GridPtr grid, const std::vector<double>& p_seq,
                             const Options& opt = {});

struct ElResidual {
    double residual = 0.0;
    double lambda = 0.0;
};

// Residual of -2 Lap u - mu* q gamma_q u^{q-1} - 2* u^{2*-1} = lambda u after
// placing u at its degenerate fiber point s_p(u) (p = 2*).
ElResidual degenerate_el_residual(const radial::RadialFunction& u, double mu_star, const Params& P);

}  // namespace normsol::extremal
