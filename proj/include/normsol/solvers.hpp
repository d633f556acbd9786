#pragma once

#include "normsol/descent.hpp"
#include "normsol/fibering.hpp"
#include "normsol/functionals.hpp"

#include <optional>
#include <string>
#include <vector>

namespace normsol::solve {

enum class Branch { Ground, MountainPass };

std::string to_string(Branch b);

struct Options {
    int max_iter = 20000;
    int window = 100;
    double rtol = 1e-10;
    double poh_tol = 1e-6;
    double sigma = 2.0;  // Gaussian start before scale matching
    std::optional<radial::RadialFunction> initial;  // on the solver grid
    std::optional<double> ground_energy;            // m+ used by the compactness check
};

// Raised when the fiber loses its critical points along the whole start set.
struct InfeasibleBranch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveResult {
    radial::RadialFunction u;     // solution, realized on the rescaled grid
    radial::RadialFunction base;  // descent state on the solver grid
    double lambda = 0.0;          // from lambda a = A - mu B - C
    double lambda_fit = 0.0;      // least-squares fit of the weak equation
    double pde_residual = 0.0;    // relative dual-norm residual at lambda_fit
    double energy = 0.0;
    ManifoldClass manifold;
    double pohozaev = 0.0;
    double pohozaev_rel = 0.0;
    double fiber_scale = 1.0;     // t at which base was realized
    radial::NormProfile norms;
    Branch branch = Branch::Ground;
    Params params;
    bool converged = false;
    int iterations = 0;
    std::vector<std::string> warnings;
};

// J(u) = Phi_u(t(u)) with t the fiber root of the branch; gradient by the
// envelope theorem. +inf where the fiber has no two critical points.
descent::Objective reduced_objective(const radial::RadialGrid& g, const Params& P, fiber::Branch b);

SolveResult solve_ground(const Params& P, radial::GridPtr grid, const Options& opt = {});
SolveResult solve_mp_subcritical(const Params& P, radial::GridPtr grid, const Options& opt = {});

struct ContinuationResult {
    SolveResult final;
    std::vector<SolveResult> chain;
};

ContinuationResult continue_to_critical(const Params& P, radial::GridPtr grid, const std::vector<double>& p_seq,
                                        const Options& opt = {});

// Realize a descent state as a solution: exact dilation to its fiber root,
// multipliers, residuals, classification.
SolveResult finalize(const Params& P, const radial::RadialFunction& base, fiber::Branch b);

struct DualBranchPoint {
    double t = 0.0;
    double v_norm_q = 0.0;
    double h = 0.0;
    bool converged = false;
};

struct ScalarFieldOptions {
    int max_iter = 20000;
    int window = 50;
    double rtol = 1e-10;
    double newton_tol = 1e-12;
    double identity_tol = 1e-6;  // Pohozaev audit; larger defects mean an under-resolved profile
    std::optional<radial::RadialFunction> initial;
};

struct ScalarFieldResult {
    radial::RadialFunction v;
    DualBranchPoint point;
    double residual = 0.0;      // relative dual-norm residual of the equation
    double nehari_rel = 0.0;
    double pohozaev_rel = 0.0;
    double action = 0.0;
    std::string status;
};

// Left side of the dual equation: t^{2/(q gamma_q - q) - 1} - (1-gamma_q)/(a mu^{2/(q - q gamma_q)}) |v_t|_q^q.
double dual_h(int N, double q, double a, double mu, double t, double v_norm_q);

// Positive radial solution of -Lap v + v = t v^{q-1} + v^{2*-1}.
ScalarFieldResult scalar_field_solve(int N, double q, double t, radial::GridPtr grid, const ScalarFieldOptions& opt = {});

struct DualScan {
    std::vector<DualBranchPoint> points;
    std::vector<std::pair<double, double>> brackets;  // sign changes of h over converged points
};

// Zero brackets of h for given v_t data (no solves).
DualScan dual_scan_from(int N, double q, double a, double mu, const std::vector<DualBranchPoint>& data);

DualScan dual_branch_scan(int N, double q, double a, double mu, const std::vector<double>& t_grid, radial::GridPtr grid,
                          const ScalarFieldOptions& opt = {});

// Default exponent ladder toward 2*: 2* - {0.4, 0.2, 0.1, 0.05}.
std::vector<double> default_p_seq(int N);

}  // namespace normsol::solve
