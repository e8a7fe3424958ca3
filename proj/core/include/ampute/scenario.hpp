// Scenario-based amputation: K fixed row patterns, rows shuffled and
// partitioned into candidate blocks, each candidate row accepting its block's
// pattern with a logistic probability in the row's covariates.

#ifndef AMPUTE_SCENARIO_HPP
#define AMPUTE_SCENARIO_HPP

#include "ampute/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ampute {

struct ScenarioSpec {
    /// K x d rows of {0,1}; pattern k is the mask a selected row receives.
    MaskMatrix patterns;
    /// Exactly one of the two allocations must be set.
    std::optional<std::vector<std::vector<int>>> partition; // explicit 0-based row ids per scenario
    std::optional<std::vector<double>> frequencies;         // nonnegative, sums to 1
    /// K x (d+1) weights, intercept first: P(pattern) = logit^{-1}(w0 + w.y).
    Matrix weights;
    bool permute_rows = true;

    int scenario_count() const { return patterns.rows(); }
    void validate(int n_rows, int n_cols) const;
};

struct ScenarioResult {
    MaskMatrix mask;
    AmputedDataset data;
    /// Scenario index each original row was a candidate for.
    std::vector<int> assignment;
};

/// Relative frequencies are converted to block sizes by largest-remainder
/// rounding. Outputs are in the caller's original row order; the internal
/// permutation is inverted before returning.
ScenarioResult scenario_ampute(const CompleteDataset& y, const ScenarioSpec& spec,
                               std::uint64_t seed);

} // namespace ampute

#endif // AMPUTE_SCENARIO_HPP
