#include "normsol/functionals.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace normsol {

void validate_exponents(int N, double q, double p) {
    if (N < 3) throw std::invalid_argument("dimension must be >= 3");
    const double ts = 2.0 * N / (N - 2.0);
    const double l2c = 2.0 + 4.0 / N;
    if (!(q > 2.0 && q < l2c && l2c < p && p <= ts)) {
        std::ostringstream os;
        os << "exponents must satisfy 2 < q < " << l2c << " < p <= " << ts << " (got q=" << q << ", p=" << p << ")";
        throw std::invalid_argument(os.str());
    }
}

void Params::validate() const {
    validate_exponents(N, q, p);
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("mass a must be positive");
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("coupling mu must be nonnegative");
}

std::string to_string(ManifoldKind k) {
    switch (k) {
        case ManifoldKind::Plus: return "Plus";
        case ManifoldKind::Zero: return "Zero";
        case ManifoldKind::Minus: return "Minus";
        case ManifoldKind::Off: return "Off";
    }
    return "Off";
}

NormProfile make_profile(double A, double B, double C, const Params& P) {
    NormProfile np;
    np.grad2 = A;
    np.mass2 = P.a;
    np.massq = B;
    np.massp = C;
    if (P.critical()) np.mass2s = C;
    return np;
}

double upper(const NormProfile& np, const Params& P) { return P.critical() ? np.mass2s : np.massp; }

double energy(const NormProfile& np, const Params& P) {
    return 0.5 * np.grad2 - P.mu / P.q * np.massq - upper(np, P) / P.p;
}

FiberValue fibering(const NormProfile& np, const Params& P, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("fibering: scale must be positive");
    const double x = P.qg(), y = P.pg();
    const double A = np.grad2, B = np.massq, C = upper(np, P);
    const double sx = std::pow(s, x), sy = std::pow(s, y);
    FiberValue f;
    f.phi = 0.5 * s * s * A - P.mu * sx * B / P.q - sy * C / P.p;
    f.dphi = s * A - P.mu * P.gamma_q() * sx / s * B - P.gamma_p() * sy / s * C;
    f.d2phi = A - P.mu * P.gamma_q() * (x - 1.0) * sx / (s * s) * B - P.gamma_p() * (y - 1.0) * sy / (s * s) * C;
    return f;
}

double pohozaev_residual(const NormProfile& np, const Params& P) {
    return np.grad2 - P.mu * P.gamma_q() * np.massq - P.gamma_p() * upper(np, P);
}

double discriminant(const NormProfile& np, const Params& P) {
    const double gq = P.gamma_q(), gp = P.gamma_p();
    return 2.0 * np.grad2 - P.mu * P.q * gq * gq * np.massq - P.p * gp * gp * upper(np, P);
}

ManifoldClass classify(const NormProfile& np, const Params& P, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("classify: tolerance must be positive");
    ManifoldClass c;
    c.residual = pohozaev_residual(np, P);
    c.D = discriminant(np, P);
    const double scale = np.grad2 + P.mu * np.massq + upper(np, P);
    if (std::abs(c.residual) > tol * scale) c.kind = ManifoldKind::Off;
    else if (std::abs(c.D) <= tol * scale) c.kind = ManifoldKind::Zero;
    else c.kind = c.D > 0.0 ? ManifoldKind::Plus : ManifoldKind::Minus;
    return c;
}

NormProfile dilate_profile(const NormProfile& np, const Params& P, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("dilate_profile: scale must be positive");
    NormProfile o = np;
    o.grad2 = s * s * np.grad2;
    o.massq = std::pow(s, P.qg()) * np.massq;
    o.massp = std::pow(s, P.pg()) * np.massp;
    o.mass2s = std::pow(s, P.two_star()) * np.mass2s;
    if (P.critical()) o.massp = o.mass2s;
    return o;
}

}  // namespace normsol
