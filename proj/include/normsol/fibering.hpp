#pragma once

#include "normsol/functionals.hpp"

#include <string>

namespace normsol::fiber {

enum class Case { TwoCritical, Degenerate, NoCritical };
enum class Branch { Plus, Minus };

std::string to_string(Case c);
std::string to_string(Branch b);

struct FiberingReport {
    Case kind = Case::NoCritical;
    double t_plus = 0.0;   // local minimum of the fiber (TwoCritical)
    double t_minus = 0.0;  // local maximum of the fiber (TwoCritical)
    double t_zero = 0.0;   // double root (Degenerate)
    double s_star = 0.0;
    double mu_threshold = 0.0;

    double root(Branch b) const;
};

struct Sensitivity {
    double t = 0.0;
    double dt_dmu = 0.0;
    double dpsi_dmu = 0.0;
    double denominator = 0.0;
};

inline constexpr double kDegeneracyBand = 1e-10;

// Prefactor of mu_threshold for the triple A = B = C = 1.
double ctilde(const Params& P);

double s_star(const NormProfile& np, const Params& P);
double mu_threshold(const NormProfile& np, const Params& P);

// Both critical points of the fiber s -> Phi(s). Bisection to 1e-6 then a
// safeguarded Newton polish to 1e-14.
FiberingReport fiber_roots(const NormProfile& np, const Params& P);

// Derivatives of t^{+/-} and of the fiber energy at t^{+/-} with respect to mu.
Sensitivity fiber_sensitivity(const NormProfile& np, const Params& P, Branch b);

// (t+, t-) below the threshold, (t0, t0) on it.
std::pair<double, double> tau_extension(const NormProfile& np, const Params& P);

}  // namespace normsol::fiber
