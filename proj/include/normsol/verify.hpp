#pragma once

#include "normsol/cli_verify.hpp"
#include "normsol/extremal.hpp"
#include "normsol/solvers.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace normsol::verify {

using cli::CheckRow;

inline constexpr int kCriteria = 13;

const char* criterion_title(int k);

// Shared, lazily computed state for a verification run. The expensive pieces
// (the critical-limit sequence, the two solutions at half the threshold
// estimate) are computed once and reused across criteria.
class Context {
public:
    explicit Context(cli::RunConfig cfg);

    const cli::RunConfig& config() const { return cfg_; }
    radial::GridPtr grid();
    Params base_params() const;  // (N, q, 2*, a) with mu unset

    const extremal::CriticalLimit& critical_limit();
    double mu_star_estimate();
    double half_mu();

    const solve::SolveResult& ground();
    const solve::ContinuationResult& mountain_pass();

private:
    cli::RunConfig cfg_;
    radial::GridPtr grid_;
    std::optional<extremal::CriticalLimit> limit_;
    std::optional<solve::SolveResult> ground_;
    std::optional<solve::ContinuationResult> mp_;
};

// Rows for acceptance criterion k (1..13). A criterion passes when every
// non-informational row passes.
std::vector<CheckRow> criterion(int k, Context& ctx);

// Checks beyond the numbered criteria: bubble-family gap witness and the
// improvement-ratio grid.
std::vector<CheckRow> extra_checks(Context& ctx);

bool rows_pass(const std::vector<CheckRow>& rows);

// Bisection for the largest coupling with at least two zeros of h, from the
// data of an existing scan. Returns the final bracket.
std::pair<double, double> crossover_bracket(int N, double q, double a, const std::vector<solve::DualBranchPoint>& data,
                                            double mu_lo, double mu_hi, int iterations = 60);

}  // namespace normsol::verify
