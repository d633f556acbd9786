#include "normsol/cli_verify.hpp"
#include "normsol/pool.hpp"
#include "normsol/verify.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace normsol;
using namespace normsol::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("normsol_test_" + name); }

int run_args(std::vector<std::string> args) {
    args.insert(args.begin(), "normsol");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run(static_cast<int>(argv.size()), argv.data());
}

RunConfig random_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    RunConfig c;
    c.command = "solve";
    c.N = 3 + static_cast<int>(rng() % 3);
    c.q = 2.0 + U(rng);
    if (U(rng) < 0.5) c.p = 4.0 + U(rng) / 3.0;
    c.a = U(rng) * 3.0;
    if (U(rng) < 0.5) c.mu = U(rng) * 20.0;
    c.R = 10.0 + U(rng);
    c.M = 100 + static_cast<int>(rng() % 1000);
    c.tol = U(rng) * 1e-8;
    c.max_iter = 10 + static_cast<int>(rng() % 100);
    if (U(rng) < 0.5) c.p_seq = {5.6 + U(rng) * 0.1, 5.8 + U(rng) * 0.1};
    c.out = "result.json";
    c.seed = rng();
    c.workers = 1 + static_cast<int>(rng() % 4);
    c.branch = U(rng) < 0.5 ? "ground" : "mp";
    if (U(rng) < 0.5) c.A = U(rng), c.B = U(rng), c.C = U(rng);
    if (U(rng) < 0.5) c.a2 = 2.0 * U(rng);
    c.mu_grid = {U(rng), U(rng) * 10};
    if (U(rng) < 0.5) c.a_grid = {0.1, U(rng)};
    if (U(rng) < 0.5) c.t_grid = {2.0, 3.0 + U(rng)};
    if (U(rng) < 0.5) c.criteria = {1, 5, 13};
    return c;
}

void check_same(const RunConfig& a, const RunConfig& b) {
    CHECK(a.command == b.command);
    CHECK(a.N == b.N);
    CHECK(a.q == b.q);
    CHECK(a.p == b.p);
    CHECK(a.a == b.a);
    CHECK(a.mu == b.mu);
    CHECK(a.R == b.R);
    CHECK(a.M == b.M);
    CHECK(a.tol == b.tol);
    CHECK(a.max_iter == b.max_iter);
    CHECK(a.p_seq == b.p_seq);
    CHECK(a.out == b.out);
    CHECK(a.seed == b.seed);
    CHECK(a.workers == b.workers);
    CHECK(a.branch == b.branch);
    CHECK(a.A == b.A);
    CHECK(a.B == b.B);
    CHECK(a.C == b.C);
    CHECK(a.a2 == b.a2);
    CHECK(a.mu_grid == b.mu_grid);
    CHECK(a.a_grid == b.a_grid);
    CHECK(a.t_grid == b.t_grid);
    CHECK(a.criteria == b.criteria);
}

}  // namespace

TEST_CASE("oracle: fiber command reproduces the unit-triple roots") {
    const fs::path out = temp_path("fiber.json");
    REQUIRE(run_args({"fiber", "--A", "1", "--B", "1", "--C", "1", "--p", "6", "--mu", "1", "--out", out.string()}) == kOk);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["schema"] == "normsol/1");
    CHECK(j["case"] == "TwoCritical");
    CHECK(j["t_plus"].get<double>() == doctest::Approx(0.3833).epsilon(1e-3));
    CHECK(j["t_minus"].get<double>() == doctest::Approx(0.8682).epsilon(1e-3));
    const std::string first = slurp(out);
    REQUIRE(run_args({"fiber", "--A", "1", "--B", "1", "--C", "1", "--p", "6", "--mu", "1", "--out", out.string()}) == kOk);
    CHECK(slurp(out) == first);

    REQUIRE(run_args({"fiber", "--A", "1", "--B", "1", "--C", "1", "--mu", "2", "--out", out.string()}) == kOk);
    CHECK(nlohmann::json::parse(slurp(out))["case"] == "NoCritical");
    fs::remove(out);
}

TEST_CASE("usage errors map to exit code 2") {
    CHECK(run_args({"fiber", "--A", "1", "--B", "1", "--mu", "1"}) == kUsage);
    CHECK(run_args({"fiber", "--A", "1", "--B", "1", "--C", "1"}) == kUsage);
    CHECK(run_args({"fiber", "--A", "1", "--B", "1", "--C", "1", "--mu", "1", "--q", "5"}) == kUsage);
    CHECK(run_args({"fiber", "--bogus"}) == kUsage);
    CHECK(run_args({}) == kUsage);
    CHECK(run_args({"solve", "--mu", "1", "--branch", "sideways"}) == kUsage);
    CHECK(run_args({"sweep"}) == kUsage);
}

TEST_CASE("infeasible coupling maps to exit code 3") {
    const fs::path out = temp_path("solve.json");
    CHECK(run_args({"solve", "--mu", "30", "--grid-M", "800", "--out", out.string()}) == kNoConvergence);
    CHECK(nlohmann::json::parse(slurp(out))["error"]["kind"] == "infeasible_branch");
    fs::remove(out);
}

TEST_CASE("config file overrides flags") {
    const fs::path cfg = temp_path("cfg.txt"), out = temp_path("cfg_out.json");
    {
        std::ofstream f(cfg);
        f << "# coupling above the unit-triple threshold\nmu = 2\nA=1\nB=1\nC=1\n";
    }
    REQUIRE(run_args({"fiber", "--mu", "1", "--config", cfg.string(), "--out", out.string()}) == kOk);
    CHECK(nlohmann::json::parse(slurp(out))["case"] == "NoCritical");
    {
        std::ofstream f(cfg);
        f << R"({"mu": 1, "A": 1, "B": 1, "C": 1})";
    }
    REQUIRE(run_args({"fiber", "--mu", "2", "--config", cfg.string(), "--out", out.string()}) == kOk);
    CHECK(nlohmann::json::parse(slurp(out))["case"] == "TwoCritical");
    fs::remove(cfg);
    fs::remove(out);
}

TEST_CASE("function file input matches the grid norms") {
    const fs::path ff = temp_path("u.txt"), out = temp_path("ff.json");
    auto g = radial::make_grid(3, 10.0, 400);
    const radial::RadialFunction u = radial::gaussian(g, 1.0, 1.0);
    {
        std::ofstream f(ff);
        f << "# r u\n";
        for (int i = 0; i <= g->M; ++i) f << format_double(g->r[i]) << " " << format_double(u.values[i]) << "\n";
    }
    REQUIRE(run_args({"fiber", "--function-file", ff.string(), "--mu", "1", "--out", out.string()}) == kOk);
    const auto j = nlohmann::json::parse(slurp(out));
    const radial::NormProfile np = radial::norms(u, 8.0 / 3.0, 6.0);
    CHECK(j["A"].get<double>() == doctest::Approx(np.grad2).epsilon(1e-14));
    CHECK(j["B"].get<double>() == doctest::Approx(np.massq).epsilon(1e-14));
    fs::remove(ff);
    fs::remove(out);
}

TEST_CASE("property: configurations round-trip through both file formats") {
    std::mt19937_64 rng(15);
    for (int k = 0; k < 50; ++k) {
        const RunConfig c = random_config(rng);
        RunConfig kv;
        apply_config_text(kv, to_kv(c));
        check_same(c, kv);
        RunConfig js;
        apply_config_text(js, to_json(c));
        check_same(c, js);
    }
    const RunConfig d;
    RunConfig e;
    apply_config_text(e, to_kv(d));
    check_same(d, e);
}

TEST_CASE("config parsing errors") {
    RunConfig c;
    CHECK_THROWS_AS(apply_config_text(c, "nonsense_key=1"), UsageError);
    CHECK_THROWS_AS(apply_config_text(c, "mu=abc"), UsageError);
    CHECK_THROWS_AS(apply_config_text(c, "dim=3.5"), UsageError);
    CHECK_THROWS_AS(apply_config_text(c, "just a line"), UsageError);
    CHECK_THROWS_AS(apply_config_text(c, "{\"mu\": "), UsageError);
    CHECK_THROWS_AS(apply_config_text(c, "criteria=14"), UsageError);
    CHECK_THROWS_AS(load_config("/nonexistent/normsol.cfg", c), UsageError);
    apply_config_text(c, "grid-R = 12.5  # dashes and comments\n\n");
    CHECK(c.R == 12.5);
}

TEST_CASE("property: full-precision formatting round-trips") {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> U(-300.0, 300.0);
    for (int k = 0; k < 1000; ++k) {
        const double x = std::pow(10.0, U(rng)) * (k % 2 ? 1 : -1);
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(parse_list("1, 2;3 [4]") == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("check rows follow the margin rules") {
    CHECK(less_row("x", "a < b", 1.0, 2.0).pass);
    CHECK_FALSE(less_row("x", "a < b", 2.0, 2.0).pass);
    CHECK(greater_row("x", "a > b", 3.0, 2.0).margin == 1.0);
    CHECK_FALSE(greater_row("x", "a > b", 1.0, 2.0).pass);
    CHECK(identity_row("x", "a = b", 1.0 + 1e-9, 1.0, 1e-8).pass);
    CHECK_FALSE(identity_row("x", "a = b", 1.1, 1.0, 1e-8).pass);
    CHECK_FALSE(identity_row("x", "a = b", std::nan(""), 1.0, 1e-8).pass);
    CheckRow info = info_row("x", "note", 5.0, 1.0);
    CHECK(info.informational);
    VerifyReport rep;
    rep.rows = {less_row("x", "", 1.0, 2.0), info};
    CHECK(rep.all_pass());
    rep.rows.push_back(less_row("y", "", 3.0, 2.0));
    CHECK_FALSE(rep.all_pass());
    const auto j = nlohmann::json::parse(report_json(rep));
    CHECK(j["rows"].size() == 3);
    CHECK(j["all_pass"] == false);
}

TEST_CASE("worker pool keeps index order and propagates errors") {
    for (int workers : {1, 3, 8}) {
        const auto v = parallel_map<int>(100, workers, [](std::size_t i) { return static_cast<int>(i * i); });
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<int>(i * i));
    }
    CHECK_THROWS_AS(parallel_map<int>(10, 4,
                                      [](std::size_t i) -> int {
                                          if (i == 7) throw std::runtime_error("boom");
                                          return 0;
                                      }),
                    std::runtime_error);
}

TEST_CASE("verify criteria are addressable and deterministic") {
    RunConfig c;
    verify::Context ctx(c);
    const auto a = verify::criterion(2, ctx);
    CHECK(verify::rows_pass(a));
    const auto b1 = verify::criterion(3, ctx), b2 = verify::criterion(3, ctx);
    REQUIRE(b1.size() == b2.size());
    for (std::size_t i = 0; i < b1.size(); ++i) CHECK(b1[i].lhs == b2[i].lhs);
    CHECK_THROWS_AS(verify::criterion(14, ctx), std::out_of_range);
    CHECK(std::string(verify::criterion_title(13)) == "dual branch");
}
