#include "normsol/cli_verify.hpp"

#include "normsol/extremal.hpp"
#include "normsol/fibering.hpp"
#include "normsol/pool.hpp"
#include "normsol/sharp_constants.hpp"
#include "normsol/solvers.hpp"
#include "normsol/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

namespace normsol::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "normsol/1";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (trim(v.substr(pos)).empty()) return x;
    } catch (const std::exception&) {
    }
    throw UsageError("config: '" + key + "' expects a number, got '" + v + "'");
}

long long parse_int(const std::string& key, const std::string& v) {
    const double x = parse_double(key, v);
    if (x != std::floor(x)) throw UsageError("config: '" + key + "' expects an integer, got '" + v + "'");
    return static_cast<long long>(x);
}

std::uint64_t parse_seed(const std::string& v) {
    // integers past 2^53 do not survive a trip through double
    const std::string t = trim(v);
    std::size_t pos = 0;
    unsigned long long x = 0;
    try {
        if (!t.empty() && t[0] != '-') x = std::stoull(t, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != t.size()) throw UsageError("config: 'seed' expects a nonnegative integer, got '" + v + "'");
    return x;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

std::string join_int(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::string normalize_key(std::string k) {
    for (char& ch : k)
        if (ch == '-') ch = '_';
    return k;
}

void set_key(RunConfig& c, const std::string& raw_key, const std::string& v) {
    const std::string k = normalize_key(raw_key);
    if (k == "command") c.command = v;
    else if (k == "dim" || k == "N") c.N = static_cast<int>(parse_int(k, v));
    else if (k == "q") c.q = parse_double(k, v);
    else if (k == "p") c.p = parse_double(k, v);
    else if (k == "mass" || k == "a") c.a = parse_double(k, v);
    else if (k == "mu") c.mu = parse_double(k, v);
    else if (k == "grid_R") c.R = parse_double(k, v);
    else if (k == "grid_M") c.M = static_cast<int>(parse_int(k, v));
    else if (k == "tol") c.tol = parse_double(k, v);
    else if (k == "max_iter") c.max_iter = static_cast<int>(parse_int(k, v));
    else if (k == "p_seq") c.p_seq = parse_list(v);
    else if (k == "out") c.out = v;
    else if (k == "seed") c.seed = parse_seed(v);
    else if (k == "workers") c.workers = static_cast<int>(parse_int(k, v));
    else if (k == "branch") c.branch = v;
    else if (k == "A") c.A = parse_double(k, v);
    else if (k == "B") c.B = parse_double(k, v);
    else if (k == "C") c.C = parse_double(k, v);
    else if (k == "function_file") c.function_file = v;
    else if (k == "mass2") c.a2 = parse_double(k, v);
    else if (k == "mu_grid") c.mu_grid = parse_list(v);
    else if (k == "a_grid") c.a_grid = parse_list(v);
    else if (k == "t_grid") c.t_grid = parse_list(v);
    else if (k == "criteria") {
        c.criteria.clear();
        for (double x : parse_list(v)) {
            if (x != std::floor(x) || x < 1 || x > verify::kCriteria)
                throw UsageError("config: criteria must be integers in 1.." + std::to_string(verify::kCriteria));
            c.criteria.push_back(static_cast<int>(x));
        }
    } else throw UsageError("config: unknown key '" + raw_key + "'");
}

// Ordered (key, value) view shared by both file formats.
std::vector<std::pair<std::string, std::string>> fields(const RunConfig& c) {
    std::vector<std::pair<std::string, std::string>> f;
    if (!c.command.empty()) f.emplace_back("command", c.command);
    f.emplace_back("dim", std::to_string(c.N));
    f.emplace_back("q", format_double(c.q));
    if (c.p) f.emplace_back("p", format_double(*c.p));
    f.emplace_back("mass", format_double(c.a));
    if (c.mu) f.emplace_back("mu", format_double(*c.mu));
    f.emplace_back("grid_R", format_double(c.R));
    f.emplace_back("grid_M", std::to_string(c.M));
    f.emplace_back("tol", format_double(c.tol));
    f.emplace_back("max_iter", std::to_string(c.max_iter));
    if (!c.p_seq.empty()) f.emplace_back("p_seq", join(c.p_seq));
    if (!c.out.empty()) f.emplace_back("out", c.out);
    f.emplace_back("seed", std::to_string(c.seed));
    f.emplace_back("workers", std::to_string(c.workers));
    f.emplace_back("branch", c.branch);
    if (c.A) f.emplace_back("A", format_double(*c.A));
    if (c.B) f.emplace_back("B", format_double(*c.B));
    if (c.C) f.emplace_back("C", format_double(*c.C));
    if (!c.function_file.empty()) f.emplace_back("function_file", c.function_file);
    if (c.a2) f.emplace_back("mass2", format_double(*c.a2));
    if (!c.mu_grid.empty()) f.emplace_back("mu_grid", join(c.mu_grid));
    if (!c.a_grid.empty()) f.emplace_back("a_grid", join(c.a_grid));
    if (!c.t_grid.empty()) f.emplace_back("t_grid", join(c.t_grid));
    if (!c.criteria.empty()) f.emplace_back("criteria", join_int(c.criteria));
    return f;
}

bool is_list_key(const std::string& k) {
    return k == "p_seq" || k == "mu_grid" || k == "a_grid" || k == "t_grid" || k == "criteria";
}
bool is_string_key(const std::string& k) {
    return k == "command" || k == "out" || k == "branch" || k == "function_file";
}

void write_output(const RunConfig& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw UsageError("cannot open output file '" + c.out + "'");
    f << text;
}

Json params_json(const Params& P) {
    return Json{{"N", P.N}, {"q", P.q}, {"p", P.p}, {"a", P.a}, {"mu", P.mu}};
}

Json norms_json(const NormProfile& n) {
    return Json{{"grad2", n.grad2}, {"mass2", n.mass2}, {"massq", n.massq}, {"massp", n.massp}, {"mass2s", n.mass2s}};
}

Json header(const std::string& command) { return Json{{"schema", kSchema}, {"command", command}}; }

Json solve_json(const solve::SolveResult& r, bool with_profile) {
    Json j;
    j["branch"] = solve::to_string(r.branch);
    j["params"] = params_json(r.params);
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["energy"] = r.energy;
    j["lambda"] = r.lambda;
    j["lambda_fit"] = r.lambda_fit;
    j["pde_residual"] = r.pde_residual;
    j["pohozaev"] = r.pohozaev;
    j["pohozaev_rel"] = r.pohozaev_rel;
    j["manifold"] = to_string(r.manifold.kind);
    j["discriminant"] = r.manifold.D;
    j["fiber_scale"] = r.fiber_scale;
    j["norms"] = norms_json(r.norms);
    j["warnings"] = r.warnings;
    if (with_profile) j["profile"] = Json{{"h", r.u.grid->h}, {"R", r.u.grid->R}, {"u", r.u.values}};
    return j;
}

radial::GridPtr config_grid(const RunConfig& c) { return radial::make_grid(c.N, c.R, c.M); }

solve::Options solve_options(const RunConfig& c) {
    solve::Options o;
    o.rtol = c.tol;
    o.max_iter = c.max_iter;
    return o;
}

extremal::Options extremal_options(const RunConfig& c) {
    extremal::Options o;
    o.rtol = c.tol;
    o.max_iter = c.max_iter;
    return o;
}

double require_mu(const RunConfig& c) {
    if (!c.mu) throw UsageError(c.command + ": missing required field 'mu'");
    return *c.mu;
}

radial::RadialFunction read_function_file(const std::string& path, int N) {
    std::ifstream f(path);
    if (!f) throw UsageError("fiber: cannot open function file '" + path + "'");
    std::vector<double> r, u;
    std::string line;
    while (std::getline(f, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        for (char& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream is(line);
        double a, b;
        if (!(is >> a >> b)) throw UsageError("fiber: malformed row in function file: '" + line + "'");
        r.push_back(a);
        u.push_back(b);
    }
    if (r.size() < 17) throw UsageError("fiber: function file needs at least 17 rows");
    const int M = static_cast<int>(r.size()) - 1;
    const double h = r.back() / M;
    for (int i = 0; i <= M; ++i)
        if (std::abs(r[i] - i * h) > 1e-9 * r.back())
            throw UsageError("fiber: function file must sample a uniform grid starting at r = 0");
    return radial::RadialFunction(radial::make_grid(N, r.back(), M), std::move(u));
}

}  // namespace

std::vector<double> RunConfig::ladder() const { return p_seq.empty() ? solve::default_p_seq(N) : p_seq; }

Params RunConfig::params() const {
    Params P;
    P.N = N;
    P.q = q;
    P.p = p_or_critical();
    P.a = a;
    P.mu = mu.value_or(0.0);
    return P;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<double> parse_list(const std::string& s) {
    std::string t = s;
    for (char& ch : t)
        if (ch == ',' || ch == ';' || ch == '[' || ch == ']') ch = ' ';
    std::istringstream is(t);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) out.push_back(parse_double("list", tok));
    return out;
}

std::string to_kv(const RunConfig& c) {
    std::string s;
    for (const auto& [k, v] : fields(c)) s += k + "=" + v + "\n";
    return s;
}

std::string to_json(const RunConfig& c) {
    Json j = Json::object();
    for (const auto& [k, v] : fields(c)) {
        if (is_string_key(k)) j[k] = v;
        else if (is_list_key(k)) j[k] = parse_list(v);
        else if (k == "seed") j[k] = c.seed;
        else j[k] = std::stod(v);
    }
    // integral fields stay integers
    j["dim"] = c.N;
    j["grid_M"] = c.M;
    j["max_iter"] = c.max_iter;
    j["workers"] = c.workers;
    if (!c.criteria.empty()) j["criteria"] = c.criteria;
    return j.dump(2) + "\n";
}

void apply_config_text(RunConfig& c, const std::string& text) {
    const std::string t = trim(text);
    if (!t.empty() && t[0] == '{') {
        Json j;
        try {
            j = Json::parse(t);
        } catch (const Json::parse_error& e) {
            throw UsageError(std::string("config: invalid JSON: ") + e.what());
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            const Json& v = it.value();
            std::string s;
            if (v.is_string()) s = v.get<std::string>();
            else if (v.is_number_integer() || v.is_number_unsigned()) s = v.dump();
            else if (v.is_number()) s = format_double(v.get<double>());
            else if (v.is_array()) {
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (!v[i].is_number()) throw UsageError("config: list '" + it.key() + "' must hold numbers");
                    s += (i ? "," : "") + format_double(v[i].get<double>());
                }
            } else throw UsageError("config: unsupported value for '" + it.key() + "'");
            set_key(c, it.key(), s);
        }
        return;
    }
    std::istringstream is(text);
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config line " + std::to_string(n) + ": expected key=value");
        set_key(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    apply_config_text(base, ss.str());
    return base;
}

bool VerifyReport::all_pass() const { return verify::rows_pass(rows); }

CheckRow less_row(std::string name, std::string statement, double lhs, double rhs) {
    CheckRow r;
    r.name = std::move(name);
    r.statement = std::move(statement);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.pass = r.margin > 0.0;
    return r;
}

CheckRow greater_row(std::string name, std::string statement, double lhs, double rhs) {
    CheckRow r = less_row(std::move(name), std::move(statement), lhs, rhs);
    r.margin = lhs - rhs;
    r.pass = r.margin > 0.0;
    return r;
}

CheckRow identity_row(std::string name, std::string statement, double lhs, double rhs, double tol, bool relative) {
    CheckRow r;
    r.name = std::move(name);
    r.statement = std::move(statement);
    r.lhs = lhs;
    r.rhs = rhs;
    r.identity = true;
    r.tol = tol;
    const double scale = relative ? std::max(std::abs(rhs), std::numeric_limits<double>::min()) : 1.0;
    r.margin = (lhs - rhs) / scale;
    r.pass = std::abs(r.margin) <= tol;
    return r;
}

CheckRow info_row(std::string name, std::string statement, double lhs, double rhs) {
    CheckRow r;
    r.name = std::move(name);
    r.statement = std::move(statement);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = lhs - rhs;
    r.pass = true;
    r.informational = true;
    return r;
}

std::string report_json(const VerifyReport& rep) {
    Json j = header("verify");
    Json rows = Json::array();
    for (const CheckRow& r : rep.rows) {
        Json x;
        x["name"] = r.name;
        x["statement"] = r.statement;
        x["kind"] = r.informational ? "info" : r.identity ? "identity" : "strict";
        x["lhs"] = r.lhs;
        x["rhs"] = r.rhs;
        x["margin"] = r.margin;
        if (r.identity) x["tol"] = r.tol;
        x["pass"] = r.pass;
        x["runtime"] = r.runtime;
        if (!r.detail.empty()) x["detail"] = r.detail;
        rows.push_back(x);
    }
    j["rows"] = rows;
    j["all_pass"] = rep.all_pass();
    return j.dump(2) + "\n";
}

int cmd_fiber(const RunConfig& c) {
    Params P = c.params();
    P.mu = require_mu(c);
    P.validate();
    const int given = (c.A ? 1 : 0) + (c.B ? 1 : 0) + (c.C ? 1 : 0);
    NormProfile np;
    Json src;
    if (given == 3) {
        if (!c.function_file.empty()) throw UsageError("fiber: give either a norm triple or a function file, not both");
        if (!(*c.A > 0 && *c.B > 0 && *c.C > 0)) throw UsageError("fiber: A, B, C must be positive");
        np = make_profile(*c.A, *c.B, *c.C, P);
        src = Json{{"source", "triple"}};
    } else if (given == 0 && !c.function_file.empty()) {
        const radial::RadialFunction u = read_function_file(c.function_file, c.N);
        np = radial::norms(u, P.q, P.p);
        src = Json{{"source", "function_file"}, {"path", c.function_file}, {"R", u.grid->R}, {"M", u.grid->M}};
    } else {
        throw UsageError("fiber: need all of A, B, C or a function file");
    }
    const fiber::FiberingReport rep = fiber::fiber_roots(np, P);
    Json j = header("fiber");
    j["params"] = params_json(P);
    j["input"] = src;
    j["A"] = np.grad2;
    j["B"] = np.massq;
    j["C"] = upper(np, P);
    j["case"] = fiber::to_string(rep.kind);
    j["t_plus"] = rep.kind == fiber::Case::TwoCritical ? Json(rep.t_plus) : Json(nullptr);
    j["t_minus"] = rep.kind == fiber::Case::TwoCritical ? Json(rep.t_minus) : Json(nullptr);
    j["t_zero"] = rep.kind == fiber::Case::Degenerate ? Json(rep.t_zero) : Json(nullptr);
    j["s_star"] = rep.s_star;
    j["mu_threshold"] = rep.mu_threshold;
    if (rep.kind == fiber::Case::TwoCritical) {
        j["energy_plus"] = fibering(np, P, rep.t_plus).phi;
        j["energy_minus"] = fibering(np, P, rep.t_minus).phi;
    }
    write_output(c, j.dump(2) + "\n");
    return kOk;
}

int cmd_extremal(const RunConfig& c) {
    Params P = c.params();
    P.mu = 0.0;
    P.validate();
    auto grid = config_grid(c);
    const auto opt = extremal_options(c);
    Json j = header("extremal");
    j["params"] = params_json(P);
    bool ok;
    if (!c.p_seq.empty()) {
        if (!P.critical()) throw UsageError("extremal: the p-seq mode targets p = 2*; omit p");
        const extremal::CriticalLimit cl = extremal::critical_limit(P, grid, c.p_seq, opt);
        Json seq = Json::array();
        for (std::size_t i = 0; i < cl.p.size(); ++i)
            seq.push_back(Json{{"p", cl.p[i]}, {"mu_star", cl.mu[i]}, {"converged", static_cast<bool>(cl.converged[i])}});
        j["sequence"] = seq;
        j["limit"] = cl.limit;
        j["last_change"] = cl.last_change;
        j["complete"] = cl.complete;
        ok = cl.complete;
    } else {
        const extremal::ExtremalResult r = extremal::minimize_mu(P, grid, opt);
        j["mu_star"] = r.mu_star;
        j["converged"] = r.converged;
        j["iterations"] = r.iterations;
        j["minimizer_norms"] = norms_json(radial::norms(r.minimizer, P.q, P.p));
        ok = r.converged;
        if (c.a2) {
            Params P2 = P;
            P2.a = *c.a2;
            const extremal::ExtremalResult r2 = extremal::minimize_mu(P2, grid, opt);
            const double predicted = extremal::mass_scaling(P, P.a, P2.a, r.mu_star);
            j["scaling"] = Json{{"a2", P2.a},
                                {"mu_star_a2", r2.mu_star},
                                {"predicted", predicted},
                                {"exponent", extremal::mass_exponent(P)},
                                {"relative_error", r2.mu_star / predicted - 1.0},
                                {"converged", r2.converged}};
            ok = ok && r2.converged;
        }
    }
    write_output(c, j.dump(2) + "\n");
    return ok ? kOk : kNoConvergence;
}

int cmd_solve(const RunConfig& c) {
    Params P = c.params();
    P.mu = require_mu(c);
    P.validate();
    if (c.branch != "ground" && c.branch != "mp") throw UsageError("solve: branch must be 'ground' or 'mp'");
    auto grid = config_grid(c);
    const solve::Options o = solve_options(c);
    Json j = header("solve");
    bool ok;
    try {
        if (c.branch == "ground") {
            const solve::SolveResult r = solve::solve_ground(P, grid, o);
            j["result"] = solve_json(r, true);
            ok = r.converged;
        } else if (!P.critical()) {
            const solve::SolveResult r = solve::solve_mp_subcritical(P, grid, o);
            j["result"] = solve_json(r, true);
            ok = r.converged;
        } else {
            const solve::ContinuationResult cr = solve::continue_to_critical(P, grid, c.ladder(), o);
            j["result"] = solve_json(cr.final, true);
            Json chain = Json::array();
            for (const auto& r : cr.chain) chain.push_back(solve_json(r, false));
            j["chain"] = chain;
            ok = cr.final.converged;
        }
    } catch (const solve::InfeasibleBranch& e) {
        j["error"] = Json{{"kind", "infeasible_branch"}, {"message", e.what()}};
        write_output(c, j.dump(2) + "\n");
        std::cerr << "normsol solve: " << e.what() << "\n";
        return kNoConvergence;
    }
    write_output(c, j.dump(2) + "\n");
    return ok ? kOk : kNoConvergence;
}

int cmd_verify(const RunConfig& c) {
    Params P = c.params();
    P.p = P.two_star();
    P.mu = 0.0;
    P.validate();
    verify::Context ctx(c);
    VerifyReport rep;
    std::vector<int> which = c.criteria;
    if (which.empty())
        for (int k = 1; k <= verify::kCriteria; ++k) which.push_back(k);
    for (int k : which) {
        auto rows = verify::criterion(k, ctx);
        std::cerr << (verify::rows_pass(rows) ? "PASS " : "FAIL ") << k << ". " << verify::criterion_title(k) << "\n";
        for (auto& r : rows) rep.rows.push_back(std::move(r));
    }
    if (c.criteria.empty()) {
        auto rows = verify::extra_checks(ctx);
        std::cerr << (verify::rows_pass(rows) ? "PASS " : "FAIL ") << "extra checks\n";
        for (auto& r : rows) rep.rows.push_back(std::move(r));
    }
    write_output(c, report_json(rep));
    return rep.all_pass() ? kOk : kCheckFailed;
}

int cmd_sweep(const RunConfig& c) {
    if (c.mu_grid.empty() && c.a_grid.empty()) throw UsageError("sweep: need a mu grid, an a grid, or both");
    if (c.mu_grid.empty() && !c.mu) throw UsageError("sweep: an a grid alone needs a fixed 'mu'");
    Params base = c.params();
    base.p = base.two_star();
    base.mu = 0.0;
    base.validate();
    const std::vector<double> as = c.a_grid.empty() ? std::vector<double>{c.a} : c.a_grid;
    const std::vector<double> mus = c.mu_grid.empty() ? std::vector<double>{*c.mu} : c.mu_grid;
    for (double x : as)
        if (!(x > 0)) throw UsageError("sweep: masses must be positive");
    for (double x : mus)
        if (!(x > 0)) throw UsageError("sweep: couplings must be positive");
    auto grid = config_grid(c);

    // threshold at unit mass, carried to other masses by the scaling law
    Params unit = base;
    unit.a = 1.0;
    const extremal::CriticalLimit cl = extremal::critical_limit(unit, grid, c.ladder(), extremal_options(c));

    // the scalar-field family does not depend on (a, mu); solve it once
    std::vector<solve::DualBranchPoint> dual;
    if (!c.t_grid.empty()) {
        solve::ScalarFieldOptions so;
        so.rtol = c.tol;
        so.max_iter = c.max_iter;
        dual = solve::dual_branch_scan(base.N, base.q, 1.0, 1.0, c.t_grid, radial::make_grid(base.N, 20.0, 16000), so).points;
    }

    struct Row {
        double a, mu, est;
        bool ground_ok = false, mp_ok = false;
        double mp = kNaN, lp = kNaN, mm = kNaN, lm = kNaN;
        long zeros = -1;
        std::string note;
    };
    std::vector<std::pair<double, double>> jobs;
    for (double a : as)
        for (double mu : mus) jobs.emplace_back(a, mu);
    const auto rows = parallel_map<Row>(jobs.size(), c.workers, [&](std::size_t i) {
        Row r;
        r.a = jobs[i].first;
        r.mu = jobs[i].second;
        Params P = base;
        P.a = r.a;
        P.mu = r.mu;
        r.est = extremal::mass_scaling(P, 1.0, r.a, cl.limit);
        if (!dual.empty()) r.zeros = static_cast<long>(solve::dual_scan_from(P.N, P.q, P.a, P.mu, dual).brackets.size());
        try {
            solve::Options o = solve_options(c);
            const solve::SolveResult g = solve::solve_ground(P, grid, o);
            r.mp = g.energy;
            r.lp = g.lambda;
            r.ground_ok = g.converged;
            o.ground_energy = g.energy;
            const solve::ContinuationResult mp = solve::continue_to_critical(P, grid, c.ladder(), o);
            r.mm = mp.final.energy;
            r.lm = mp.final.lambda;
            r.mp_ok = mp.final.converged;
        } catch (const solve::InfeasibleBranch& e) {
            r.note = std::string("infeasible: ") + e.what();
        } catch (const std::exception& e) {
            r.note = std::string("error: ") + e.what();
        }
        return r;
    });

    std::ostringstream os;
    os << "# schema=" << kSchema << " command=sweep\n";
    os << "a,mu,mu_star_estimate,feasible,ground_converged,m_plus,lambda_plus,mp_converged,m_minus,lambda_minus,dual_zeros,note\n";
    for (const Row& r : rows) {
        std::string note = r.note;
        for (char& ch : note)
            if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
        os << format_double(r.a) << ',' << format_double(r.mu) << ',' << format_double(r.est) << ','
           << (r.note.rfind("infeasible", 0) == 0 ? 0 : 1) << ',' << r.ground_ok << ',' << format_double(r.mp) << ','
           << format_double(r.lp) << ',' << r.mp_ok << ',' << format_double(r.mm) << ',' << format_double(r.lm) << ','
           << (r.zeros < 0 ? std::string() : std::to_string(r.zeros)) << ',' << note << '\n';
    }
    write_output(c, os.str());
    return kOk;
}

int run(int argc, char** argv) {
    CLI::App app{"Normalized solutions with combined nonlinearities: fibering, extremal values, solvers, verification"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string config_path;
    std::string p_seq, mu_grid, a_grid, t_grid, criteria;
    double p = 0, mu = 0, A = 0, B = 0, C = 0, a2 = 0;

    const std::vector<std::string> names = {"fiber", "extremal", "solve", "verify", "sweep"};
    const std::map<std::string, std::string> about = {
        {"fiber", "critical points of the fiber map for a norm triple or a tabulated profile"},
        {"extremal", "threshold coupling mu* at one exponent or along a ladder toward 2*"},
        {"solve", "ground state or mountain-pass solution on the radial grid"},
        {"verify", "acceptance checks with pass/fail rows"},
        {"sweep", "branch energies over a (a, mu) grid as CSV"}};
    std::map<std::string, CLI::App*> subs;
    std::map<std::string, std::map<std::string, CLI::Option*>> opts;
    for (const std::string& name : names) {
        CLI::App* s = app.add_subcommand(name, about.at(name));
        auto& o = opts[name];
        s->add_option("--dim", cfg.N, "space dimension N >= 3");
        s->add_option("--q", cfg.q, "lower exponent, 2 < q < 2+4/N");
        o["p"] = s->add_option("--p", p, "upper exponent in (2+4/N, 2*]; default 2*");
        s->add_option("--mass", cfg.a, "prescribed mass a");
        o["mu"] = s->add_option("--mu", mu, "coupling mu");
        s->add_option("--grid-R", cfg.R, "truncation radius");
        s->add_option("--grid-M", cfg.M, "number of grid intervals");
        s->add_option("--tol", cfg.tol, "relative energy change over the stopping window");
        s->add_option("--max-iter", cfg.max_iter, "iteration cap per descent");
        o["p_seq"] = s->add_option("--p-seq", p_seq, "comma-separated exponent ladder toward 2*");
        s->add_option("--out", cfg.out, "output path (default stdout)");
        s->add_option("--seed", cfg.seed, "seed for randomized audits");
        s->add_option("--workers", cfg.workers, "worker threads for sweeps");
        s->add_option("--config", config_path, "key=value or JSON config; overrides flags");
        if (name == "fiber") {
            o["A"] = s->add_option("--A", A, "|grad u|_2^2");
            o["B"] = s->add_option("--B", B, "|u|_q^q");
            o["C"] = s->add_option("--C", C, "|u|_p^p");
            s->add_option("--function-file", cfg.function_file, "two-column r,u table on a uniform grid");
        }
        if (name == "extremal") o["mass2"] = s->add_option("--mass2", a2, "second mass for the scaling check");
        if (name == "solve") s->add_option("--branch", cfg.branch, "ground or mp");
        if (name == "verify") o["criteria"] = s->add_option("--criteria", criteria, "comma-separated subset of 1..13");
        if (name == "sweep") {
            o["mu_grid"] = s->add_option("--mu-grid", mu_grid, "comma-separated couplings");
            o["a_grid"] = s->add_option("--a-grid", a_grid, "comma-separated masses");
            o["t_grid"] = s->add_option("--t-grid", t_grid, "scalar-field scales for the dual zero count");
        }
        subs[name] = s;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        for (const auto& [name, s] : subs) {
            if (!s->parsed()) continue;
            cfg.command = name;
            auto& o = opts[name];
            auto given = [&](const char* k) { return o.count(k) && o[k]->count() > 0; };
            if (given("p")) cfg.p = p;
            if (given("mu")) cfg.mu = mu;
            if (given("p_seq")) cfg.p_seq = parse_list(p_seq);
            if (given("A")) cfg.A = A;
            if (given("B")) cfg.B = B;
            if (given("C")) cfg.C = C;
            if (given("mass2")) cfg.a2 = a2;
            if (given("mu_grid")) cfg.mu_grid = parse_list(mu_grid);
            if (given("a_grid")) cfg.a_grid = parse_list(a_grid);
            if (given("t_grid")) cfg.t_grid = parse_list(t_grid);
            if (given("criteria")) set_key(cfg, "criteria", criteria);
        }
        if (!config_path.empty()) {
            const std::string command = cfg.command;
            cfg = load_config(config_path, cfg);
            cfg.command = command;
        }
        if (cfg.workers < 1) throw UsageError("workers must be >= 1");
        if (cfg.command == "fiber") return cmd_fiber(cfg);
        if (cfg.command == "extremal") return cmd_extremal(cfg);
        if (cfg.command == "solve") return cmd_solve(cfg);
        if (cfg.command == "verify") return cmd_verify(cfg);
        return cmd_sweep(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "normsol: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "normsol: " << e.what() << "\n";
        return kNoConvergence;
    }
}

}  // namespace normsol::cli
