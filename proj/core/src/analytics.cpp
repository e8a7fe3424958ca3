#include "ampute/analytics.hpp"

#include <array>
#include <cmath>
#include <set>

namespace ampute {

void CellSelection::validate() const {
    if (cells.empty()) throw ValidationError("cell selection: empty");
    if (cells.size() != probabilities.size())
        throw ValidationError("cell selection: one probability per cell required");
    std::set<std::pair<int, int>> unique(cells.begin(), cells.end());
    if (unique.size() != cells.size())
        throw ValidationError("cell selection: cells must be distinct");
    for (double p : probabilities)
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError("cell selection: probabilities must lie in [0,1]");
}

double joint_missingness_prob(const CopulaSpec& copula_on_s, std::span<const double> p_s) {
    if (copula_on_s.dim() != static_cast<int>(p_s.size()))
        throw ValidationError("joint_missingness_prob: copula dimension must equal |S|");
    return survival_cdf(copula_on_s, p_s);
}

double pairwise_correlation(const CopulaSpec& bivariate_copula, double p1, double p2) {
    if (bivariate_copula.dim() != 2)
        throw ValidationError("pairwise_correlation: copula must be bivariate");
    if (!(p1 > 0.0 && p1 < 1.0) || !(p2 > 0.0 && p2 < 1.0))
        throw ValidationError("correlation undefined for degenerate margin (p in {0,1})");
    const double joint = survival_cdf(bivariate_copula, std::array<double, 2>{p1, p2});
    return (joint - p1 * p2) / std::sqrt(p1 * (1.0 - p1) * p2 * (1.0 - p2));
}

CorrelationBounds correlation_bounds(double p1, double p2) {
    if (!(p1 > 0.0 && p1 < 1.0) || !(p2 > 0.0 && p2 < 1.0))
        throw ValidationError("correlation undefined for degenerate margin (p in {0,1})");
    const double denom = std::sqrt(p1 * (1.0 - p1) * p2 * (1.0 - p2));
    const double w = std::max(p1 + p2 - 1.0, 0.0); // countermonotone survival value
    const double m = std::min(p1, p2);             // comonotone survival value
    return CorrelationBounds{(w - p1 * p2) / denom, (m - p1 * p2) / denom};
}

namespace {

McEstimate binomial_estimate(std::int64_t hits, std::int64_t total) {
    const double est = static_cast<double>(hits) / static_cast<double>(total);
    const double hw = 1.96 * std::sqrt(est * (1.0 - est) / static_cast<double>(total));
    return McEstimate{est, hw};
}

} // namespace

McEstimate empirical_joint_prob(std::span<const MaskMatrix> masks, const CellSelection& sel) {
    sel.validate();
    if (masks.size() < 1000)
        throw ValidationError("empirical_joint_prob: needs at least 1000 masks");
    std::int64_t hits = 0;
    for (const auto& m : masks) {
        bool all = true;
        for (auto [i, j] : sel.cells)
            if (!m(i, j)) {
                all = false;
                break;
            }
        hits += all;
    }
    return binomial_estimate(hits, static_cast<std::int64_t>(masks.size()));
}

McEstimate empirical_joint_prob_rows(const MaskMatrix& replicated_rows,
                                     std::span<const int> columns) {
    if (replicated_rows.rows() < 1000)
        throw ValidationError("empirical_joint_prob: needs at least 1000 replications");
    if (columns.empty()) throw ValidationError("empirical_joint_prob: no columns selected");
    std::int64_t hits = 0;
    for (int i = 0; i < replicated_rows.rows(); ++i) {
        bool all = true;
        for (int j : columns)
            if (!replicated_rows(i, j)) {
                all = false;
                break;
            }
        hits += all;
    }
    return binomial_estimate(hits, replicated_rows.rows());
}

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const auto n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        ma += a[t];
        mb += b[t];
    }
    ma /= n;
    mb /= n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        saa += (a[t] - ma) * (a[t] - ma);
        sbb += (b[t] - mb) * (b[t] - mb);
        sab += (a[t] - ma) * (b[t] - mb);
    }
    if (saa == 0.0 || sbb == 0.0)
        throw ValidationError("empirical_correlation: an indicator series has zero variance");
    return sab / std::sqrt(saa * sbb);
}

} // namespace

double empirical_correlation(std::span<const MaskMatrix> masks, std::pair<int, int> cell_a,
                             std::pair<int, int> cell_b) {
    if (masks.empty()) throw ValidationError("empirical_correlation: no masks");
    std::vector<double> a, b;
    a.reserve(masks.size());
    b.reserve(masks.size());
    for (const auto& m : masks) {
        a.push_back(m(cell_a.first, cell_a.second));
        b.push_back(m(cell_b.first, cell_b.second));
    }
    return pearson(a, b);
}

double empirical_correlation_rows(const MaskMatrix& replicated_rows, int col_a, int col_b) {
    std::vector<double> a, b;
    a.reserve(static_cast<std::size_t>(replicated_rows.rows()));
    b.reserve(static_cast<std::size_t>(replicated_rows.rows()));
    for (int i = 0; i < replicated_rows.rows(); ++i) {
        a.push_back(replicated_rows(i, col_a));
        b.push_back(replicated_rows(i, col_b));
    }
    return pearson(a, b);
}

} // namespace ampute
