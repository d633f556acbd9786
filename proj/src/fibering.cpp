#include "normsol/fibering.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace normsol::fiber {

std::string to_string(Case c) {
    switch (c) {
        case Case::TwoCritical: return "TwoCritical";
        case Case::Degenerate: return "Degenerate";
        case Case::NoCritical: return "NoCritical";
    }
    return "NoCritical";
}

std::string to_string(Branch b) { return b == Branch::Plus ? "Plus" : "Minus"; }

double FiberingReport::root(Branch b) const {
    if (kind == Case::Degenerate) return t_zero;
    if (kind == Case::NoCritical) throw std::domain_error("fiber has no critical points");
    return b == Branch::Plus ? t_plus : t_minus;
}

namespace {

struct Triple {
    double A, B, C;
};

Triple triple(const NormProfile& np, const Params& P, bool need_b) {
    Triple t{np.grad2, np.massq, upper(np, P)};
    if (!(t.A > 0.0) || !(t.C > 0.0) || (need_b && !(t.B > 0.0)))
        throw std::domain_error("fibering: norms must be positive");
    return t;
}

// h(s) = s^{2-x} A - gamma_p s^{y-x} C; the fiber is critical where h = mu gamma_q B.
struct HFun {
    double A, C, x, y, gp;
    double operator()(double s) const { return std::pow(s, 2.0 - x) * A - gp * std::pow(s, y - x) * C; }
    double deriv(double s) const {
        return (2.0 - x) * std::pow(s, 1.0 - x) * A - gp * (y - x) * std::pow(s, y - x - 1.0) * C;
    }
};

// Root of h(s) = c inside [lo, hi] where h - c changes sign.
double solve_bracket(const HFun& h, double c, double lo, double hi) {
    double flo = h(lo) - c;
    for (int it = 0; it < 400 && hi / lo - 1.0 > 1e-6; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double fm = h(mid) - c;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double s = std::sqrt(lo * hi);
    for (int it = 0; it < 60; ++it) {
        const double f = h(s) - c;
        const double d = h.deriv(s);
        double sn = (d != 0.0) ? s - f / d : 0.5 * (lo + hi);
        if (!(sn > lo && sn < hi)) sn = 0.5 * (lo + hi);
        if ((f < 0.0) == (flo < 0.0)) lo = s;
        else hi = s;
        const double step = std::abs(sn - s);
        s = sn;
        if (step <= 1e-14 * s) break;
    }
    return s;
}

}  // namespace

double ctilde(const Params& P) {
    const double x = P.qg(), y = P.pg();
    const double al = (y - x) / (y - 2.0), be = (2.0 - x) / (y - 2.0);
    return (y - 2.0) * std::pow(2.0 - x, be) / (P.gamma_q() * std::pow(y - x, al) * std::pow(P.gamma_p(), be));
}

double s_star(const NormProfile& np, const Params& P) {
    const Triple t = triple(np, P, false);
    const double x = P.qg(), y = P.pg();
    return std::pow((2.0 - x) * t.A / ((y - x) * P.gamma_p() * t.C), 1.0 / (y - 2.0));
}

double mu_threshold(const NormProfile& np, const Params& P) {
    const Triple t = triple(np, P, true);
    const double x = P.qg(), y = P.pg();
    const double al = (y - x) / (y - 2.0), be = (2.0 - x) / (y - 2.0);
    return ctilde(P) * std::pow(t.A, al) / (t.B * std::pow(t.C, be));
}

FiberingReport fiber_roots(const NormProfile& np, const Params& P) {
    const Triple t = triple(np, P, true);
    if (!(P.mu > 0.0)) throw std::invalid_argument("fiber_roots: coupling must be positive");
    FiberingReport r;
    r.s_star = s_star(np, P);
    r.mu_threshold = mu_threshold(np, P);
    if (std::abs(P.mu - r.mu_threshold) <= kDegeneracyBand * r.mu_threshold) {
        r.kind = Case::Degenerate;
        r.t_zero = r.s_star;
        return r;
    }
    if (P.mu > r.mu_threshold) {
        r.kind = Case::NoCritical;
        return r;
    }
    const double x = P.qg(), y = P.pg();
    const HFun h{t.A, t.C, x, y, P.gamma_p()};
    const double c = P.mu * P.gamma_q() * t.B;

    double lo = r.s_star;
    while (h(lo) >= c) {
        lo *= 0.5;
        if (lo < std::numeric_limits<double>::min()) throw std::runtime_error("fiber_roots: lower bracket underflow");
    }
    r.t_plus = solve_bracket(h, c, lo, r.s_star);

    double hi = 2.0 * std::pow(t.A / (P.gamma_p() * t.C), 1.0 / (y - 2.0));
    if (hi < r.s_star) hi = 2.0 * r.s_star;
    while (h(hi) >= c) {
        hi *= 2.0;
        if (!std::isfinite(hi)) throw std::runtime_error("fiber_roots: upper bracket overflow");
    }
    r.t_minus = solve_bracket(h, c, r.s_star, hi);
    r.kind = Case::TwoCritical;
    return r;
}

Sensitivity fiber_sensitivity(const NormProfile& np, const Params& P, Branch b) {
    const FiberingReport rep = fiber_roots(np, P);
    if (rep.kind != Case::TwoCritical)
        throw std::domain_error("fiber_sensitivity: fiber is degenerate or empty, derivative is singular");
    const Triple tr = triple(np, P, true);
    const double x = P.qg(), y = P.pg(), gq = P.gamma_q(), gp = P.gamma_p();
    Sensitivity s;
    s.t = rep.root(b);
    const double tx = std::pow(s.t, x), ty = std::pow(s.t, y);
    s.denominator = 2.0 * s.t * s.t * tr.A - P.mu * x * gq * tx * tr.B - y * gp * ty * tr.C;
    if (s.denominator == 0.0) throw std::domain_error("fiber_sensitivity: singular denominator");
    s.dt_dmu = gq * tx * s.t * tr.B / s.denominator;
    s.dpsi_dmu = -tx / P.q * tr.B;
    return s;
}

std::pair<double, double> tau_extension(const NormProfile& np, const Params& P) {
    const FiberingReport rep = fiber_roots(np, P);
    switch (rep.kind) {
        case Case::TwoCritical: return {rep.t_plus, rep.t_minus};
        case Case::Degenerate: return {rep.t_zero, rep.t_zero};
        case Case::NoCritical: break;
    }
    throw std::domain_error("tau_extension: coupling exceeds the fiber threshold");
}

}  // namespace normsol::fiber
