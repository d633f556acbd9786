#pragma once

#include <memory>
#include <vector>

namespace normsol::radial {

// Uniform radial grid r_i = i*h on [0, R] with Dirichlet truncation at r_M.
//
// Quadrature: trapezoid on omega*r^{N-1}*f with a Gregory end correction at
// r = R, so the weights stay positive and integrate low-order polynomials in
// r exactly. Every weight scales like h^N, which makes a change of spacing an
// exact discrete dilation (see dilate_exact).
struct RadialGrid {
    int N = 3;
    double R = 0.0;
    int M = 0;
    double h = 0.0;
    double omega = 0.0;          // surface area of the unit (N-1)-sphere
    std::vector<double> r;       // nodes, size M+1
    std::vector<double> w;       // mass weights, size M+1
    std::vector<double> m;       // cell weights for the gradient, size M

    double volume() const;       // quadrature of f == 1
    double two_star() const { return 2.0 * N / (N - 2.0); }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(int N, double R, int M);

// Same node count, spacing h*factor.
GridPtr scale_grid(const RadialGrid& g, double factor);

struct RadialFunction {
    GridPtr grid;
    std::vector<double> values;

    RadialFunction() = default;
    RadialFunction(GridPtr g, std::vector<double> v);

    // nonnegative, nonincreasing, finite, vanishing at r = R
    bool admissible() const;
};

struct NormProfile {
    double grad2 = 0.0;   // |grad u|_2^2
    double mass2 = 0.0;   // |u|_2^2
    double massq = 0.0;   // |u|_q^q
    double massp = 0.0;   // |u|_p^p
    double mass2s = 0.0;  // |u|_{2*}^{2*}
};

double sum_power(const RadialGrid& g, const std::vector<double>& u, double e);
double kinetic(const RadialGrid& g, const std::vector<double>& u);
double mass(const RadialGrid& g, const std::vector<double>& u);

// out = d(kinetic)/du on all nodes.
void kinetic_gradient(const RadialGrid& g, const std::vector<double>& u, std::vector<double>& out);

NormProfile norms(const RadialFunction& u, double q, double p);

// Mass-preserving dilation s^{N/2} u(s r), resampled with monotone cubic
// interpolation on the same grid. Sets *under_resolved when the dilated
// profile is narrower than a few grid cells.
RadialFunction dilate(const RadialFunction& u, double s, bool* under_resolved = nullptr);

// Exact discrete dilation: values t^{N/2} u_i on spacing h/t.
RadialFunction dilate_exact(const RadialFunction& u, double t);

RadialFunction project_mass(const RadialFunction& u, double a);

// Sampled exp(-r^2/(2 sigma^2)) with u(R) = 0, scaled to mass a.
RadialFunction gaussian(GridPtr g, double sigma, double a);

}  // namespace normsol::radial
