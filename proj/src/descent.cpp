#include "normsol/descent.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace normsol::descent {

struct Metric::Impl {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

Metric::Metric(const radial::RadialGrid& g) : g_(g), impl_(std::make_unique<Impl>()) {
    const int n = g.M;
    const double ih2 = 1.0 / (g.h * g.h);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(3 * n);
    for (int i = 0; i < n; ++i) {
        double d = g.w[i] + g.m[i] * ih2;
        if (i > 0) d += g.m[i - 1] * ih2;
        trip.emplace_back(i, i, d);
        if (i + 1 < n) {
            trip.emplace_back(i, i + 1, -g.m[i] * ih2);
            trip.emplace_back(i + 1, i, -g.m[i] * ih2);
        }
    }
    Eigen::SparseMatrix<double> H(n, n);
    H.setFromTriplets(trip.begin(), trip.end());
    impl_->ldlt.compute(H);
    if (impl_->ldlt.info() != Eigen::Success) throw std::runtime_error("Metric: factorization failed");
}

Metric::~Metric() = default;

Vec Metric::solve(const Vec& rhs) const {
    const int n = g_.M;
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n);
    Eigen::VectorXd x = impl_->ldlt.solve(b);
    Vec out(n + 1, 0.0);
    for (int i = 0; i < n; ++i) out[i] = x[i];
    return out;
}

Vec Metric::apply(const Vec& v) const {
    const int n = g_.M;
    const double ih2 = 1.0 / (g_.h * g_.h);
    Vec out(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = g_.w[i] * v[i] + g_.m[i] * ih2 * (v[i] - v[i + 1]);
        if (i > 0) s += g_.m[i - 1] * ih2 * (v[i] - v[i - 1]);
        out[i] = s;
    }
    return out;
}

double Metric::inner(const Vec& a, const Vec& b) const {
    const Vec hb = apply(b);
    double s = 0.0;
    for (int i = 0; i < g_.M; ++i) s += a[i] * hb[i];
    return s;
}

Vec dilation_generator(const radial::RadialGrid& g, const Vec& u) {
    Vec z(g.M + 1, 0.0);
    z[0] = 0.5 * g.N * u[0];
    for (int i = 1; i < g.M; ++i) z[i] = g.r[i] * (u[i + 1] - u[i - 1]) / (2.0 * g.h) + 0.5 * g.N * u[i];
    return z;
}

void monotone_projection(Vec& u, const Vec& weights) {
    // pool adjacent violators; blocks hold (value, weight, length)
    struct Block {
        double v, w;
        std::size_t n;
    };
    std::vector<Block> st;
    st.reserve(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        st.push_back({u[i], weights[i], 1});
        while (st.size() > 1 && st[st.size() - 2].v < st.back().v) {
            Block b = st.back();
            st.pop_back();
            Block& a = st.back();
            const double W = a.w + b.w;
            a.v = (a.v * a.w + b.v * b.w) / W;
            a.w = W;
            a.n += b.n;
        }
    }
    std::size_t k = 0;
    for (const Block& b : st)
        for (std::size_t j = 0; j < b.n; ++j) u[k++] = b.v;
}

namespace {

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

Result sphere_descent(const radial::RadialGrid& g, Vec u, double a, const Objective& F, const Options& opt,
                      const StepCap& cap) {
    if (static_cast<int>(u.size()) != g.M + 1) throw std::invalid_argument("sphere_descent: size mismatch");
    const Metric H(g);
    Vec pw(g.w);
    pw[0] = g.w[1];  // the origin carries no quadrature weight; keep the regression well posed

    auto admissible = [&](Vec& v) {
        v[g.M] = 0.0;
        for (double& x : v) x = std::max(x, 0.0);
        if (opt.monotone) monotone_projection(v, pw);
        v[g.M] = 0.0;
        const double m = radial::mass(g, v);
        if (!(m > 0.0)) return false;
        const double c = std::sqrt(a / m);
        for (double& x : v) x *= c;
        return true;
    };
    if (!admissible(u)) throw std::invalid_argument("sphere_descent: initial profile is zero");

    Result res;
    Vec grad;
    double f = F(u, &grad);
    if (!std::isfinite(f)) throw std::domain_error("sphere_descent: initial profile is infeasible");
    res.history.push_back(f);
    double tau = opt.tau0;

    for (int it = 0; it < opt.max_iter; ++it) {
        Vec wu(g.M + 1);
        for (int i = 0; i <= g.M; ++i) wu[i] = g.w[i] * u[i];
        const Vec d = H.solve(grad);

        std::vector<Vec> basis;
        basis.push_back(H.solve(wu));
        if (opt.project_dilation) basis.push_back(dilation_generator(g, u));
        std::vector<Vec> hb;
        for (const Vec& b : basis) hb.push_back(H.apply(b));
        const std::size_t k = basis.size();
        double G[2][2] = {{0, 0}, {0, 0}}, rhs[2] = {0, 0}, c[2] = {0, 0};
        for (std::size_t i = 0; i < k; ++i) {
            rhs[i] = dot(d, hb[i]);
            for (std::size_t j = 0; j < k; ++j) G[i][j] = dot(basis[i], hb[j]);
        }
        if (k == 1) {
            c[0] = rhs[0] / G[0][0];
        } else {
            const double det = G[0][0] * G[1][1] - G[0][1] * G[1][0];
            c[0] = (rhs[0] * G[1][1] - G[0][1] * rhs[1]) / det;
            c[1] = (G[0][0] * rhs[1] - G[1][0] * rhs[0]) / det;
        }
        Vec dt(d);
        for (std::size_t i = 0; i < k; ++i)
            for (int j = 0; j <= g.M; ++j) dt[j] -= c[i] * basis[i][j];
        dt[g.M] = 0.0;
        const double slope = H.inner(dt, dt);

        if (cap) tau = std::min(tau, cap(u));
        bool accepted = false;
        Vec un, gn;
        double fn = f;
        while (tau >= 1e-14) {
            un = u;
            for (int j = 0; j <= g.M; ++j) un[j] -= tau * dt[j];
            if (admissible(un)) {
                fn = F(un, &gn);
                // Armijo along the projection arc: decrease measured by the actual displacement
                Vec step(g.M + 1);
                for (int j = 0; j <= g.M; ++j) step[j] = un[j] - u[j];
                step[g.M] = 0.0;
                if (std::isfinite(fn) && fn <= f - 1e-4 * H.inner(step, step) / tau) {
                    accepted = true;
                    break;
                }
            }
            tau *= 0.5;
        }
        res.iterations = it + 1;
        if (!accepted) {
            // round-off stall: the energy is already flat over the accepted history
            const int n = static_cast<int>(res.history.size());
            const int back = std::min({opt.window, 10, n - 1});
            const bool flat = back >= 5 && std::abs(res.history[n - 1 - back] - f) <= opt.rtol * std::max(1.0, std::abs(f));
            if (slope <= 1e-24 * std::max(1.0, std::abs(f))) {
                res.converged = true;
                res.stop_reason = "stationary";
            } else if (flat) {
                res.converged = true;
                res.stop_reason = "line search stalled at round-off";
            } else {
                res.stop_reason = "line search failed";
            }
            break;
        }
        u.swap(un);
        grad.swap(gn);
        f = fn;
        res.history.push_back(f);
        tau = std::min(tau * 1.5, opt.tau_max);
        const int n = static_cast<int>(res.history.size());
        if (n > opt.window && std::abs(res.history[n - 1 - opt.window] - f) <= opt.rtol * std::max(1.0, std::abs(f))) {
            res.converged = true;
            res.stop_reason = "relative change below tolerance";
            break;
        }
    }
    if (res.stop_reason.empty()) res.stop_reason = "iteration limit";
    res.u = std::move(u);
    return res;
}

}  // namespace normsol::descent
