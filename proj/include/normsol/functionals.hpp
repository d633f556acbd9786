#pragma once

#include "normsol/radial_core.hpp"

#include <string>

namespace normsol {

using radial::NormProfile;

// Problem data (N, q, p, a, mu). The upper exponent p may equal 2*, in which
// case gamma_p is exactly 1.
struct Params {
    int N = 3;
    double q = 8.0 / 3.0;
    double p = 6.0;
    double a = 1.0;
    double mu = 1.0;

    double two_star() const { return 2.0 * N / (N - 2.0); }
    bool critical() const { return p == two_star(); }
    double gamma_q() const { return N * (q - 2.0) / (2.0 * q); }
    double gamma_p() const { return critical() ? 1.0 : N * (p - 2.0) / (2.0 * p); }
    double qg() const { return q * gamma_q(); }  // in (0, 2)
    double pg() const { return p * gamma_p(); }  // in (2, 2*]

    // Throws std::invalid_argument unless 2 < q < 2+4/N < p <= 2*, a > 0, mu >= 0.
    void validate() const;
};

// Exponents only; a and mu unchecked.
void validate_exponents(int N, double q, double p);

enum class ManifoldKind { Plus, Zero, Minus, Off };

std::string to_string(ManifoldKind k);

struct ManifoldClass {
    ManifoldKind kind = ManifoldKind::Off;
    double residual = 0.0;  // Pohozaev residual
    double D = 0.0;         // second-variation discriminant
};

struct FiberValue {
    double phi = 0.0;
    double dphi = 0.0;
    double d2phi = 0.0;
};

// Profile from the triple (A, B, C) = (grad2, massq, upper power); mass2 = a.
NormProfile make_profile(double A, double B, double C, const Params& P);

// The upper-power slot: mass2s when p = 2*, massp otherwise.
double upper(const NormProfile& np, const Params& P);

double energy(const NormProfile& np, const Params& P);

// Energy of the mass-preserving dilation at scale s, with two derivatives.
FiberValue fibering(const NormProfile& np, const Params& P, double s);

double pohozaev_residual(const NormProfile& np, const Params& P);

// D = 2A - mu q gamma_q^2 B - p gamma_p^2 C
double discriminant(const NormProfile& np, const Params& P);

ManifoldClass classify(const NormProfile& np, const Params& P, double tol = 1e-8);

// Analytic action of the dilation (u)_s on the norm profile.
NormProfile dilate_profile(const NormProfile& np, const Params& P, double s);

}  // namespace normsol
