#pragma once

#include "normsol/radial_core.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace normsol::descent {

using Vec = std::vector<double>;

// value(u, grad): returns F(u) (+inf when u is infeasible) and fills grad when
// it is non-null.
using Objective = std::function<double(const Vec& u, Vec* grad)>;

// Upper bound on the step length at u; an empty function means no cap.
using StepCap = std::function<double(const Vec& u)>;

struct Options {
    int max_iter = 20000;
    int window = 50;
    double rtol = 1e-10;
    bool project_dilation = true;
    bool monotone = true;  // project onto nonincreasing profiles
    double tau0 = 1.0;
    double tau_max = 1e3;
};

struct Result {
    Vec u;
    Vec history;
    bool converged = false;
    int iterations = 0;
    std::string stop_reason;
};

// Sobolev metric H = K + W on the free nodes 0..M-1, where K is half the
// Hessian of the kinetic term and W the mass weights.
class Metric {
public:
    explicit Metric(const radial::RadialGrid& g);
    ~Metric();
    Metric(const Metric&) = delete;
    Metric& operator=(const Metric&) = delete;

    Vec solve(const Vec& rhs) const;       // H^{-1} rhs, zero at node M
    Vec apply(const Vec& v) const;         // H v, zero at node M
    double inner(const Vec& a, const Vec& b) const;  // a . H b

private:
    struct Impl;
    const radial::RadialGrid& g_;
    std::unique_ptr<Impl> impl_;
};

// Generator of the mass-preserving dilation, r u'(r) + (N/2) u.
Vec dilation_generator(const radial::RadialGrid& g, const Vec& u);

// Weighted isotonic (nonincreasing) regression.
void monotone_projection(Vec& u, const Vec& weights);

// Projected preconditioned gradient descent of F over the admissible part of
// the mass sphere {sum w u^2 = a} with Armijo backtracking.
Result sphere_descent(const radial::RadialGrid& g, Vec u0, double a, const Objective& F, const Options& opt,
                      const StepCap& cap = {});

}  // namespace normsol::descent
