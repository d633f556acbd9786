#pragma once

#include "normsol/functionals.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace normsol::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kNoConvergence = 3 };

// Raised for malformed input; maps to exit code 2.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    std::string command;
    int N = 3;
    double q = 8.0 / 3.0;
    std::optional<double> p;      // defaults to 2*
    double a = 1.0;
    std::optional<double> mu;
    double R = 40.0;
    int M = 4000;
    double tol = 1e-10;           // relative change over the stopping window
    int max_iter = 20000;
    std::vector<double> p_seq;    // empty: 2* - {0.4, 0.2, 0.1, 0.05}
    std::string out;
    std::uint64_t seed = 20240601;
    int workers = 1;
    std::string branch = "ground";
    std::optional<double> A, B, C;  // fiber: explicit norm triple
    std::string function_file;      // fiber: two-column r,u table
    std::optional<double> a2;       // extremal: second mass for the scaling row
    std::vector<double> mu_grid;    // sweep
    std::vector<double> a_grid;     // sweep
    std::vector<double> t_grid;     // sweep / verify dual scan
    std::vector<int> criteria;      // verify: subset, empty = all

    double p_or_critical() const { return p ? *p : 2.0 * N / (N - 2.0); }
    std::vector<double> ladder() const;
    Params params() const;  // mu = 0 when unset
};

std::string to_kv(const RunConfig& c);
std::string to_json(const RunConfig& c);
// Updates c from key=value lines (# comments) or a JSON object.
void apply_config_text(RunConfig& c, const std::string& text);
RunConfig load_config(const std::string& path, RunConfig base);

std::vector<double> parse_list(const std::string& s);
std::string format_double(double x);

struct CheckRow {
    std::string name;
    std::string statement;   // the inequality or identity being checked
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;     // > 0 for strict checks; |lhs - rhs| within tol for identities
    bool identity = false;
    double tol = 0.0;
    bool pass = false;
    bool informational = false;  // printed but not counted
    double runtime = 0.0;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckRow> rows;
    bool all_pass() const;
};

// Strict inequality rows: lhs < rhs (less_row) or lhs > rhs (greater_row).
CheckRow less_row(std::string name, std::string statement, double lhs, double rhs);
CheckRow greater_row(std::string name, std::string statement, double lhs, double rhs);
CheckRow identity_row(std::string name, std::string statement, double lhs, double rhs, double tol, bool relative = true);
CheckRow info_row(std::string name, std::string statement, double lhs, double rhs);

std::string report_json(const VerifyReport& r);

// Command entry points; each writes its artifact and returns an exit code.
int cmd_fiber(const RunConfig& c);
int cmd_extremal(const RunConfig& c);
int cmd_solve(const RunConfig& c);
int cmd_verify(const RunConfig& c);
int cmd_sweep(const RunConfig& c);

int run(int argc, char** argv);

}  // namespace normsol::cli
