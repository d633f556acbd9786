#include "normsol/sharp_constants.hpp"

#include "normsol/fibering.hpp"
#include "normsol/functionals.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>

namespace normsol::sharp {

namespace odeint = boost::numeric::odeint;

double sobolev_constant(int N) {
    if (N < 3) throw std::invalid_argument("sobolev_constant: dimension must be >= 3");
    return std::numbers::pi * N * (N - 2) * std::pow(std::tgamma(N / 2.0) / std::tgamma(double(N)), 2.0 / N);
}

double cutoff_profile(double r, double cutoff) {
    const double half = 0.5 * cutoff;
    if (r <= half) return 1.0;
    if (r >= cutoff) return 0.0;
    const double z = (r - half) / half;
    return 1.0 - z * z * z * (10.0 - 15.0 * z + 6.0 * z * z);
}

radial::RadialFunction talenti_bubble(int N, double eps, radial::GridPtr grid, double cutoff) {
    if (N < 3) throw std::invalid_argument("talenti_bubble: dimension must be >= 3");
    if (!(eps > 0.0)) throw std::invalid_argument("talenti_bubble: eps must be positive");
    if (!grid || grid->N != N) throw std::invalid_argument("talenti_bubble: grid dimension mismatch");
    if (!(cutoff > 0.0) || cutoff > grid->R * (1.0 + 1e-14))
        throw std::invalid_argument("talenti_bubble: cutoff must lie in (0, R]");
    const double c = std::pow(N * (N - 2.0), (N - 2.0) / 4.0);
    std::vector<double> v(grid->M + 1);
    for (int i = 0; i <= grid->M; ++i) {
        const double r = grid->r[i];
        v[i] = c * std::pow(eps / (eps * eps + r * r), (N - 2.0) / 2.0) * cutoff_profile(r, cutoff);
    }
    v[grid->M] = 0.0;
    return radial::RadialFunction(std::move(grid), std::move(v));
}

namespace {

using State = std::array<double, 5>;  // u, u', grad2, mass2, massq (partial integrals)

struct Rhs {
    int N;
    double q, omega;
    void operator()(const State& y, State& dy, double r) const {
        const double u = y[0], v = y[1];
        const double au = std::abs(u);
        const double jac = omega * std::pow(r, N - 1);
        dy[0] = v;
        dy[1] = -(N - 1) / r * v + u - std::pow(au, q - 2.0) * u;
        dy[2] = jac * v * v;
        dy[3] = jac * u * u;
        dy[4] = jac * std::pow(au, q);
    }
};

enum class Shot { Over, Under };

struct ShotResult {
    Shot kind;
    double r_end;
    State y;
};

double start_radius(double Q0, double q) { return 1e-7 * std::min(1.0, std::pow(Q0, -(q - 2.0) / 2.0)); }

State start_state(int N, double q, double omega, double Q0, double r0) {
    const double c = (Q0 - std::pow(Q0, q - 1.0)) / (2.0 * N);
    const double vol = omega * std::pow(r0, N) / N;
    return {Q0 + c * r0 * r0, 2.0 * c * r0, omega * 4.0 * c * c * std::pow(r0, N + 2) / (N + 2), vol * Q0 * Q0,
            vol * std::pow(Q0, q)};
}

constexpr double kRmax = 80.0;

ShotResult shoot(int N, double q, double Q0) {
    const double omega = 2.0 * std::pow(std::numbers::pi, N / 2.0) / std::tgamma(N / 2.0);
    const Rhs rhs{N, q, omega};
    const double r0 = start_radius(Q0, q);
    State y = start_state(N, q, omega, Q0, r0);
    auto stepper = odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
    stepper.initialize(y, r0, 1e-3 * r0);
    while (stepper.current_time() < kRmax) {
        stepper.do_step(rhs);
        const State& s = stepper.current_state();
        if (s[0] < 0.0) return {Shot::Over, stepper.current_time(), s};
        if (s[1] > 0.0) return {Shot::Under, stepper.current_time(), s};
    }
    return {Shot::Under, stepper.current_time(), stepper.current_state()};
}

GroundState compute_ground_state(int N, double q) {
    double lo = 1.0, hi = 2.0;
    int guard = 0;
    while (shoot(N, q, hi).kind == Shot::Under) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 60) {
            std::ostringstream os;
            os << "gn_constant: failed to bracket the shooting parameter (N=" << N << ", q=" << q << ", last Q0=" << hi << ")";
            throw std::runtime_error(os.str());
        }
    }
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (shoot(N, q, mid).kind == Shot::Over) hi = mid;
        else lo = mid;
    }
    const ShotResult s = shoot(N, q, lo);
    GroundState g;
    g.Q0 = lo;
    g.r_end = s.r_end;
    g.grad2 = s.y[2];
    g.mass2 = s.y[3];
    g.massq = s.y[4];
    const double gq = N * (q - 2.0) / (2.0 * q);
    g.C = std::pow(g.massq, 1.0 / q) / (std::pow(g.grad2, gq / 2.0) * std::pow(g.mass2, (1.0 - gq) / 2.0));
    return g;
}

struct Memo {
    std::shared_mutex mtx;
    std::map<std::pair<int, double>, GroundState> data;
};

Memo& memo() {
    static Memo m;
    return m;
}

}  // namespace

GroundState gn_ground_state(int N, double q) {
    if (N < 3) throw std::invalid_argument("gn_constant: dimension must be >= 3");
    const double ts = 2.0 * N / (N - 2.0);
    if (!(q > 2.0 && q < ts)) throw std::invalid_argument("gn_ground_state: need 2 < q < 2*");
    const auto key = std::make_pair(N, q);
    Memo& m = memo();
    {
        std::shared_lock lock(m.mtx);
        auto it = m.data.find(key);
        if (it != m.data.end()) return it->second;
    }
    GroundState g = compute_ground_state(N, q);
    std::unique_lock lock(m.mtx);
    return m.data.emplace(key, g).first->second;
}

double gn_constant(int N, double q) {
    if (N < 3) throw std::invalid_argument("gn_constant: dimension must be >= 3");
    const double ts = 2.0 * N / (N - 2.0);
    if (!(q >= 2.0 && q < ts)) throw std::invalid_argument("gn_constant: need 2 <= q < 2*");
    if (q == 2.0) return 1.0;
    return gn_ground_state(N, q).C;
}

radial::RadialFunction gn_profile(int N, double q, radial::GridPtr grid) {
    if (!grid || grid->N != N) throw std::invalid_argument("gn_profile: grid dimension mismatch");
    const GroundState gs = gn_ground_state(N, q);
    const double omega = grid->omega;
    const Rhs rhs{N, q, omega};
    const double r0 = start_radius(gs.Q0, q);
    State y = start_state(N, q, omega, gs.Q0, r0);
    std::vector<double> v(grid->M + 1, 0.0);
    v[0] = gs.Q0;
    auto stepper = odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
    stepper.initialize(y, r0, 1e-3 * r0);
    int i = 1;
    while (i < grid->M && grid->r[i] < gs.r_end) {
        while (stepper.current_time() < grid->r[i]) stepper.do_step(rhs);
        State s;
        stepper.calc_state(grid->r[i], s);
        v[i] = std::max(0.0, s[0]);
        ++i;
    }
    return radial::RadialFunction(std::move(grid), std::move(v));
}

ConstantBundle alpha_threshold(int N, double q) {
    if (!(q > 2.0 && q < 2.0 + 4.0 / N)) throw std::invalid_argument("alpha_threshold: need 2 < q < 2 + 4/N");
    ConstantBundle c;
    c.S = sobolev_constant(N);
    c.C_Nq = gn_constant(N, q);
    const double ts = 2.0 * N / (N - 2.0);
    const double gq = N * (q - 2.0) / (2.0 * q);
    const double x = q * gq;
    const double Cq = std::pow(c.C_Nq, q);
    c.C1 = std::pow(ts * std::pow(c.S, ts / 2.0) * (2.0 - x) / (2.0 * (ts - x)), (2.0 - x) / (ts - 2.0)) * q * (ts - 2.0) /
           (2.0 * Cq * (ts - x));
    c.C2 = 2.0 * ts / (N * gq * Cq * (ts - x)) * std::pow(x * std::pow(c.S, N / 2.0) / (2.0 - x), (2.0 - x) / 2.0);
    c.alpha = std::min(c.C1, c.C2);
    Params P;
    P.N = N;
    P.q = q;
    P.p = ts;
    c.Ctilde = fiber::ctilde(P);
    return c;
}

double gn_lower_bound(int N, double q, double p, double a) {
    Params P;
    P.N = N;
    P.q = q;
    P.p = p;
    P.a = a;
    P.validate();
    const double x = P.qg(), y = P.pg();
    const double be = (2.0 - x) / (y - 2.0);
    const double Bmax = std::pow(gn_constant(N, q), q) * std::pow(a, q * (1.0 - P.gamma_q()) / 2.0);
    double Cmax;
    if (P.critical()) Cmax = std::pow(sobolev_constant(N), -P.two_star() / 2.0);
    else Cmax = std::pow(gn_constant(N, p), p) * std::pow(a, p * (1.0 - P.gamma_p()) / 2.0);
    return fiber::ctilde(P) / (Bmax * std::pow(Cmax, be));
}

double remark_threshold(int N, double q) {
    const ConstantBundle c = alpha_threshold(N, q);
    const double ts = 2.0 * N / (N - 2.0);
    const double x = q * N * (q - 2.0) / (2.0 * q);
    return c.C1 * (2.0 / x) * std::pow(ts / 2.0, (2.0 - x) / (ts - 2.0));
}

double improvement_ratio(int N, double q, double p) {
    const double x = N * (q - 2.0) / 2.0;
    const double y = N * (p - 2.0) / 2.0;
    return std::pow(2.0 / y, 2.0 - x) * std::pow(2.0 / x, y - 2.0);
}

}  // namespace normsol::sharp
