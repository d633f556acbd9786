// Acceptance runner: one PASS/FAIL line per criterion, followed by its rows.
#include "normsol/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace normsol;

namespace {

void print_rows(const std::vector<cli::CheckRow>& rows) {
    for (const cli::CheckRow& r : rows) {
        const char* tag = r.informational ? "info" : r.pass ? "ok  " : "FAIL";
        std::printf("    [%s] %s | %s | lhs=%s rhs=%s margin=%s", tag, r.name.c_str(), r.statement.c_str(),
                    cli::format_double(r.lhs).c_str(), cli::format_double(r.rhs).c_str(),
                    cli::format_double(r.margin).c_str());
        if (r.identity) std::printf(" tol=%s", cli::format_double(r.tol).c_str());
        std::printf(" t=%.3fs\n", r.runtime);
        if (!r.detail.empty()) std::printf("           %s\n", r.detail.c_str());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    int only = 0;
    bool extras = false;
    app.add_option("--criterion", only, "run a single criterion (1..13)")->check(CLI::Range(1, verify::kCriteria));
    app.add_flag("--extras", extras, "also run the extra checks");
    CLI11_PARSE(app, argc, argv);

    verify::Context ctx{cli::RunConfig{}};
    bool all = true;
    for (int k = 1; k <= verify::kCriteria; ++k) {
        if (only && k != only) continue;
        const auto rows = verify::criterion(k, ctx);
        const bool pass = verify::rows_pass(rows);
        all = all && pass;
        std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", k, verify::criterion_title(k));
        print_rows(rows);
        std::fflush(stdout);
    }
    if (extras) {
        const auto rows = verify::extra_checks(ctx);
        const bool pass = verify::rows_pass(rows);
        all = all && pass;
        std::printf("%s extra checks\n", pass ? "PASS" : "FAIL");
        print_rows(rows);
    }
    return all ? 0 : 1;
}
