#pragma once

#include "normsol/radial_core.hpp"

namespace normsol::sharp {

struct ConstantBundle {
    double S = 0.0;       // sharp Sobolev constant
    double C_Nq = 0.0;    // sharp Gagliardo-Nirenberg constant
    double C1 = 0.0;
    double C2 = 0.0;
    double alpha = 0.0;   // min(C1, C2)
    double Ctilde = 0.0;  // mu_threshold prefactor at p = 2*
};

// Positive radial solution Q of Q'' + (N-1)Q'/r = Q - Q^{q-1}, found by
// shooting on Q(0).
struct GroundState {
    double C = 0.0;       // |Q|_q / (|grad Q|^{gamma_q} |Q|_2^{1-gamma_q})
    double Q0 = 0.0;
    double r_end = 0.0;   // where the shot was stopped
    double grad2 = 0.0;
    double mass2 = 0.0;
    double massq = 0.0;
};

double sobolev_constant(int N);

// chi(r) * [N(N-2)]^{(N-2)/4} (eps/(eps^2+r^2))^{(N-2)/2}, with chi a C^2
// cut-off equal to 1 on [0, cutoff/2] and 0 beyond cutoff.
radial::RadialFunction talenti_bubble(int N, double eps, radial::GridPtr grid, double cutoff);

double cutoff_profile(double r, double cutoff);

// Convention: |u|_q <= C |grad u|_2^{gamma_q} |u|_2^{1-gamma_q}. Memoized per
// (N, q); safe under concurrent callers.
double gn_constant(int N, double q);

GroundState gn_ground_state(int N, double q);

// Q sampled on a grid (zero past the shooting end point).
radial::RadialFunction gn_profile(int N, double q, radial::GridPtr grid);

ConstantBundle alpha_threshold(int N, double q);

// Lower bound for mu*_{a,p} from the GN inequality in q and either the GN
// inequality in p (p < 2*) or the Sobolev inequality (p = 2*).
double gn_lower_bound(int N, double q, double p, double a);

// The chain value C1 * (2/(q gamma_q)) * (2*/2)^{(2 - q gamma_q)/(2* - 2)}.
double remark_threshold(int N, double q);

// (2/(p gamma_p))^{2 - q gamma_q} (2/(q gamma_q))^{p gamma_p - 2}
double improvement_ratio(int N, double q, double p);

}  // namespace normsol::sharp
