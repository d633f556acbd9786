#include "normsol/radial_core.hpp"

// pchip in Boost 1.74 calls isnan unqualified
#include <math.h>
#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace normsol::radial {

namespace {

double unit_sphere_area(int N) {
    return 2.0 * std::pow(std::numbers::pi, N / 2.0) / std::tgamma(N / 2.0);
}

void fill_weights(RadialGrid& g) {
    const int M = g.M;
    g.r.resize(M + 1);
    g.w.resize(M + 1);
    g.m.resize(M);
    for (int i = 0; i <= M; ++i) g.r[i] = i * g.h;
    g.r[M] = g.R;
    for (int i = 0; i <= M; ++i) {
        double c = 1.0;
        if (i == M) c = 3.0 / 8.0;
        else if (i == M - 1) c = 7.0 / 6.0;
        else if (i == M - 2) c = 23.0 / 24.0;
        g.w[i] = g.omega * g.h * std::pow(g.r[i], g.N - 1) * c;
    }
    for (int c = 0; c < M; ++c)
        g.m[c] = g.omega * (std::pow(g.r[c + 1], g.N) - std::pow(g.r[c], g.N)) / g.N;
}

double pw(double x, double e) {
    x = std::abs(x);
    if (e == 2.0) return x * x;
    return std::pow(x, e);
}

}  // namespace

double RadialGrid::volume() const {
    double s = 0.0;
    for (double wi : w) s += wi;
    return s;
}

GridPtr make_grid(int N, double R, int M) {
    if (N < 3) throw std::invalid_argument("make_grid: dimension must be >= 3, got " + std::to_string(N));
    if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("make_grid: radius must be positive");
    if (M < 16) throw std::invalid_argument("make_grid: need at least 16 intervals, got " + std::to_string(M));
    auto g = std::make_shared<RadialGrid>();
    g->N = N;
    g->R = R;
    g->M = M;
    g->h = R / M;
    g->omega = unit_sphere_area(N);
    fill_weights(*g);
    return g;
}

GridPtr scale_grid(const RadialGrid& g, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw std::invalid_argument("scale_grid: factor must be positive");
    auto s = std::make_shared<RadialGrid>(g);
    s->R = g.R * factor;
    s->h = s->R / s->M;
    fill_weights(*s);
    return s;
}

RadialFunction::RadialFunction(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid) throw std::invalid_argument("RadialFunction: null grid");
    if (static_cast<int>(values.size()) != grid->M + 1)
        throw std::invalid_argument("RadialFunction: expected " + std::to_string(grid->M + 1) + " samples");
}

bool RadialFunction::admissible() const {
    if (values.empty() || values.back() != 0.0) return false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0) return false;
        if (i > 0 && values[i] > values[i - 1]) return false;
    }
    return true;
}

double sum_power(const RadialGrid& g, const std::vector<double>& u, double e) {
    double s = 0.0;
    for (int i = 0; i <= g.M; ++i) s += g.w[i] * pw(u[i], e);
    return s;
}

double mass(const RadialGrid& g, const std::vector<double>& u) { return sum_power(g, u, 2.0); }

double kinetic(const RadialGrid& g, const std::vector<double>& u) {
    double s = 0.0;
    for (int c = 0; c < g.M; ++c) {
        const double d = (u[c + 1] - u[c]) / g.h;
        s += g.m[c] * d * d;
    }
    return s;
}

void kinetic_gradient(const RadialGrid& g, const std::vector<double>& u, std::vector<double>& out) {
    out.assign(g.M + 1, 0.0);
    const double ih2 = 1.0 / (g.h * g.h);
    for (int c = 0; c < g.M; ++c) {
        const double f = 2.0 * g.m[c] * (u[c + 1] - u[c]) * ih2;
        out[c] -= f;
        out[c + 1] += f;
    }
}

NormProfile norms(const RadialFunction& u, double q, double p) {
    if (!u.grid) throw std::invalid_argument("norms: function has no grid");
    const RadialGrid& g = *u.grid;
    const double ts = g.two_star();
    if (!(q > 2.0 && q < p && p <= ts * (1.0 + 1e-14)))
        throw std::invalid_argument("norms: exponents must satisfy 2 < q < p <= 2*");
    NormProfile np;
    np.grad2 = kinetic(g, u.values);
    np.mass2 = mass(g, u.values);
    np.massq = sum_power(g, u.values, q);
    np.mass2s = sum_power(g, u.values, ts);
    np.massp = (p == ts) ? np.mass2s : sum_power(g, u.values, p);
    return np;
}

RadialFunction dilate(const RadialFunction& u, double s, bool* under_resolved) {
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("dilate: scale must be positive");
    const RadialGrid& g = *u.grid;
    if (s == 1.0) {
        if (under_resolved) *under_resolved = false;
        return u;
    }
    std::vector<double> x(g.r), y(u.values);
    boost::math::interpolators::pchip<std::vector<double>> interp(std::move(x), std::move(y));
    const double amp = std::pow(s, g.N / 2.0);
    std::vector<double> out(g.M + 1, 0.0);
    for (int i = 0; i < g.M; ++i) {
        const double rs = s * g.r[i];
        if (rs >= g.R) break;
        out[i] = std::max(0.0, amp * interp(rs));
    }
    out[g.M] = 0.0;
    if (under_resolved) {
        // half-maximum radius of the result, in grid cells
        const double half = 0.5 * out[0];
        int k = 0;
        while (k < g.M && out[k] > half) ++k;
        *under_resolved = k < 4;
    }
    return RadialFunction(u.grid, std::move(out));
}

RadialFunction dilate_exact(const RadialFunction& u, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("dilate_exact: scale must be positive");
    auto g = scale_grid(*u.grid, 1.0 / t);
    const double amp = std::pow(t, u.grid->N / 2.0);
    std::vector<double> v(u.values);
    for (double& x : v) x *= amp;
    return RadialFunction(g, std::move(v));
}

RadialFunction project_mass(const RadialFunction& u, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("project_mass: mass must be positive");
    const double m = mass(*u.grid, u.values);
    if (!(m > 0.0)) throw std::domain_error("project_mass: zero function cannot be normalized");
    const double c = std::sqrt(a / m);
    std::vector<double> v(u.values);
    for (double& x : v) x *= c;
    return RadialFunction(u.grid, std::move(v));
}

RadialFunction gaussian(GridPtr g, double sigma, double a) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: width must be positive");
    std::vector<double> v(g->M + 1);
    for (int i = 0; i <= g->M; ++i) v[i] = std::exp(-g->r[i] * g->r[i] / (2.0 * sigma * sigma));
    v[g->M] = 0.0;
    return project_mass(RadialFunction(std::move(g), std::move(v)), a);
}

}  // namespace normsol::radial
