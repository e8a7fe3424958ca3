#include "ampute/scenario.hpp"

#include "ampute/engine.hpp"
#include "ampute/normal.hpp"
#include "ampute/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ampute {

void ScenarioSpec::validate(int n_rows, int n_cols) const {
    const int k = patterns.rows();
    if (k < 1) throw ValidationError("scenario: needs at least one pattern");
    if (patterns.cols() != n_cols)
        throw ValidationError("scenario: pattern width " + std::to_string(patterns.cols()) +
                              " does not match " + std::to_string(n_cols) + " columns");
    for (auto v : patterns.data())
        if (v != 0 && v != 1) throw ValidationError("scenario: patterns must be 0/1");
    if (weights.rows() != k || weights.cols() != n_cols + 1)
        throw ValidationError("scenario: weights must be K x (d+1), intercept first");
    for (double w : weights.data())
        if (!std::isfinite(w)) throw ValidationError("scenario: weights must be finite");

    if (partition.has_value() == frequencies.has_value())
        throw ValidationError("scenario: specify exactly one of partition or frequencies");
    if (partition) {
        if (static_cast<int>(partition->size()) != k)
            throw ValidationError("scenario: partition must have one row set per pattern");
        std::vector<char> seen(static_cast<std::size_t>(n_rows), 0);
        for (const auto& block : *partition)
            for (int i : block) {
                if (i < 0 || i >= n_rows)
                    throw ValidationError("scenario: partition row " + std::to_string(i + 1) +
                                          " outside the dataset");
                if (seen[static_cast<std::size_t>(i)]++)
                    throw ValidationError("scenario: partition row " + std::to_string(i + 1) +
                                          " assigned twice");
            }
        for (int i = 0; i < n_rows; ++i)
            if (!seen[static_cast<std::size_t>(i)])
                throw ValidationError("scenario: partition misses row " + std::to_string(i + 1));
    } else {
        if (static_cast<int>(frequencies->size()) != k)
            throw ValidationError("scenario: one frequency per pattern required");
        double total = 0.0;
        for (double f : *frequencies) {
            if (!(f >= 0.0)) throw ValidationError("scenario: frequencies must be nonnegative");
            total += f;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw ValidationError("scenario: frequencies must sum to 1");
    }
}

namespace {

// Largest-remainder conversion of relative frequencies into block sizes.
std::vector<int> allocate_sizes(const std::vector<double>& freq, int n) {
    const int k = static_cast<int>(freq.size());
    std::vector<int> sizes(k);
    std::vector<std::pair<double, int>> remainder(k);
    int assigned = 0;
    for (int i = 0; i < k; ++i) {
        const double exact = freq[static_cast<std::size_t>(i)] * n;
        sizes[static_cast<std::size_t>(i)] = static_cast<int>(std::floor(exact));
        assigned += sizes[static_cast<std::size_t>(i)];
        remainder[static_cast<std::size_t>(i)] = {exact - std::floor(exact), i};
    }
    std::sort(remainder.begin(), remainder.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second; // deterministic tie-break by scenario order
    });
    for (int t = 0; t < n - assigned; ++t)
        ++sizes[static_cast<std::size_t>(remainder[static_cast<std::size_t>(t)].second)];
    for (int i = 0; i < k; ++i)
        if (freq[static_cast<std::size_t>(i)] > 0.0 && sizes[static_cast<std::size_t>(i)] == 0)
            throw ValidationError("scenario: positive frequency for pattern " +
                                  std::to_string(i + 1) + " yields an empty block (n too small)");
    return sizes;
}

} // namespace

ScenarioResult scenario_ampute(const CompleteDataset& y, const ScenarioSpec& spec,
                               std::uint64_t seed) {
    y.validate();
    spec.validate(y.rows(), y.cols());
    const int n = y.rows();
    const int d = y.cols();
    const int k = spec.scenario_count();

    // Permute row indices; data itself stays in place and the permutation is
    // inverted on output.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    if (spec.permute_rows) {
        RngStream shuffle(seed, StreamPurpose::Permutation, 0);
        for (int i = n - 1; i > 0; --i) {
            const auto j = static_cast<int>(shuffle.below(static_cast<std::uint64_t>(i + 1)));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }
    }

    // Scenario of each slot in the permuted order.
    std::vector<int> slot_scenario(static_cast<std::size_t>(n));
    if (spec.partition) {
        for (int s = 0; s < k; ++s)
            for (int slot : (*spec.partition)[static_cast<std::size_t>(s)])
                slot_scenario[static_cast<std::size_t>(slot)] = s;
    } else {
        const auto sizes = allocate_sizes(*spec.frequencies, n);
        int slot = 0;
        for (int s = 0; s < k; ++s)
            for (int t = 0; t < sizes[static_cast<std::size_t>(s)]; ++t)
                slot_scenario[static_cast<std::size_t>(slot++)] = s;
    }

    MaskMatrix mask(n, d);
    std::vector<int> assignment(static_cast<std::size_t>(n));
    for (int slot = 0; slot < n; ++slot) {
        const int row = order[static_cast<std::size_t>(slot)];
        const int s = slot_scenario[static_cast<std::size_t>(slot)];
        assignment[static_cast<std::size_t>(row)] = s;

        double eta = spec.weights(s, 0);
        for (int j = 0; j < d; ++j) eta += spec.weights(s, j + 1) * y.values(row, j);
        RngStream decide(seed, StreamPurpose::ScenarioDecision, static_cast<std::uint64_t>(slot));
        if (decide.uniform() <= inv_logit(eta))
            for (int j = 0; j < d; ++j) mask(row, j) = spec.patterns(s, j);
    }

    return ScenarioResult{mask, apply_mask(y, mask), std::move(assignment)};
}

} // namespace ampute
