#include "normsol/cli_verify.hpp"
#include "normsol/extremal.hpp"
#include "normsol/fibering.hpp"
#include "normsol/sharp_constants.hpp"
#include "normsol/solvers.hpp"
#include "normsol/verify.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace normsol;

namespace {

Params make_params(int N, double q, std::optional<double> p, double a, double mu) {
    Params P;
    P.N = N;
    P.q = q;
    P.p = p ? *p : P.two_star();
    P.a = a;
    P.mu = mu;
    return P;
}

py::dict solution_dict(const solve::SolveResult& r) {
    py::dict d;
    d["branch"] = solve::to_string(r.branch);
    d["converged"] = r.converged;
    d["energy"] = r.energy;
    d["lambda"] = r.lambda;
    d["lambda_fit"] = r.lambda_fit;
    d["pde_residual"] = r.pde_residual;
    d["pohozaev_rel"] = r.pohozaev_rel;
    d["manifold"] = to_string(r.manifold.kind);
    d["mass"] = r.norms.mass2;
    d["grad2"] = r.norms.grad2;
    d["r"] = r.u.grid->r;
    d["u"] = r.u.values;
    d["warnings"] = r.warnings;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Normalized solutions with combined power nonlinearities";

    py::register_exception<solve::InfeasibleBranch>(m, "InfeasibleBranch", PyExc_RuntimeError);

    m.def(
        "fiber_roots",
        [](double A, double B, double C, double mu, int N, double q, std::optional<double> p) {
            const Params P = make_params(N, q, p, 1.0, mu);
            P.validate();
            const fiber::FiberingReport r = fiber::fiber_roots(make_profile(A, B, C, P), P);
            py::dict d;
            d["case"] = fiber::to_string(r.kind);
            d["t_plus"] = r.t_plus;
            d["t_minus"] = r.t_minus;
            d["t_zero"] = r.t_zero;
            d["s_star"] = r.s_star;
            d["mu_threshold"] = r.mu_threshold;
            return d;
        },
        py::arg("A"), py::arg("B"), py::arg("C"), py::arg("mu"), py::arg("N") = 3, py::arg("q") = 8.0 / 3.0,
        py::arg("p") = py::none(), "Critical points of the fiber map for a norm triple.");

    m.def(
        "mu_threshold",
        [](double A, double B, double C, int N, double q, std::optional<double> p) {
            const Params P = make_params(N, q, p, 1.0, 1.0);
            return fiber::mu_threshold(make_profile(A, B, C, P), P);
        },
        py::arg("A"), py::arg("B"), py::arg("C"), py::arg("N") = 3, py::arg("q") = 8.0 / 3.0, py::arg("p") = py::none());

    m.def(
        "minimize_mu",
        [](int N, double q, std::optional<double> p, double a, double R, int M, double tol) {
            const Params P = make_params(N, q, p, a, 0.0);
            extremal::Options o;
            o.rtol = tol;
            const extremal::ExtremalResult r = [&] {
                py::gil_scoped_release release;
                return extremal::minimize_mu(P, radial::make_grid(N, R, M), o);
            }();
            py::dict d;
            d["mu_star"] = r.mu_star;
            d["converged"] = r.converged;
            d["iterations"] = r.iterations;
            d["r"] = r.minimizer.grid->r;
            d["u"] = r.minimizer.values;
            return d;
        },
        py::arg("N") = 3, py::arg("q") = 8.0 / 3.0, py::arg("p") = py::none(), py::arg("a") = 1.0, py::arg("R") = 40.0,
        py::arg("M") = 4000, py::arg("tol") = 1e-10, "Extremal coupling over the mass sphere.");

    m.def(
        "solve",
        [](double mu, const std::string& branch, int N, double q, std::optional<double> p, double a, double R, int M,
           double tol) {
            const Params P = make_params(N, q, p, a, mu);
            if (branch != "ground" && branch != "mp") throw std::invalid_argument("branch must be 'ground' or 'mp'");
            solve::Options o;
            o.rtol = tol;
            py::gil_scoped_release release;
            auto grid = radial::make_grid(N, R, M);
            solve::SolveResult r;
            if (branch == "ground") r = solve::solve_ground(P, grid, o);
            else if (!P.critical()) r = solve::solve_mp_subcritical(P, grid, o);
            else r = solve::continue_to_critical(P, grid, solve::default_p_seq(N), o).final;
            py::gil_scoped_acquire acquire;
            return solution_dict(r);
        },
        py::arg("mu"), py::arg("branch") = "ground", py::arg("N") = 3, py::arg("q") = 8.0 / 3.0, py::arg("p") = py::none(),
        py::arg("a") = 1.0, py::arg("R") = 40.0, py::arg("M") = 4000, py::arg("tol") = 1e-10,
        "Ground state (branch='ground') or mountain-pass solution (branch='mp').");

    m.def("sobolev_constant", &sharp::sobolev_constant, py::arg("N"));
    m.def("gn_constant", &sharp::gn_constant, py::arg("N"), py::arg("q"));
    m.def("improvement_ratio", &sharp::improvement_ratio, py::arg("N"), py::arg("q"), py::arg("p"));

    m.def(
        "verify",
        [](int k) {
            std::vector<cli::CheckRow> rows;
            {
                py::gil_scoped_release release;
                verify::Context ctx{cli::RunConfig{}};
                rows = verify::criterion(k, ctx);
            }
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["name"] = r.name;
                d["statement"] = r.statement;
                d["lhs"] = r.lhs;
                d["rhs"] = r.rhs;
                d["margin"] = r.margin;
                d["pass"] = r.pass;
                d["informational"] = r.informational;
                out.append(d);
            }
            return out;
        },
        py::arg("criterion"), "Rows of one acceptance criterion (1..13) at the default configuration.");

    m.def(
        "config_to_kv",
        [](const std::string& text) {
            cli::RunConfig c;
            cli::apply_config_text(c, text);
            return cli::to_kv(c);
        },
        py::arg("text"), "Parse a key=value or JSON config and re-emit it in key=value form.");
}
