// Closed forms for joint missingness probabilities and indicator
// correlations, plus empirical estimators over sampled masks for
// cross-validation of the analytic routes.

#ifndef AMPUTE_ANALYTICS_HPP
#define AMPUTE_ANALYTICS_HPP

#include "ampute/copula.hpp"
#include "ampute/types.hpp"

#include <span>
#include <utility>
#include <vector>

namespace ampute {

/// An ordered set S of cells with their marginal missingness probabilities.
struct CellSelection {
    std::vector<std::pair<int, int>> cells; // (row, column), 0-based, distinct
    std::vector<double> probabilities;      // matching p_S

    void validate() const;
};

/// P(M_{i,j} = 1 for all (i,j) in S) = C-bar_S(p_S), where copula_on_s is the
/// marginal copula of the selected cells. Evaluability errors propagate;
/// callers may fall back to mc_cdf.
double joint_missingness_prob(const CopulaSpec& copula_on_s, std::span<const double> p_s);

/// cor(M_a, M_b) = (C-bar(p1,p2) - p1 p2) / sqrt(p1(1-p1) p2(1-p2)).
/// Degenerate margins (p in {0,1}) have zero variance and are rejected.
double pairwise_correlation(const CopulaSpec& bivariate_copula, double p1, double p2);

struct CorrelationBounds {
    double rho_min; // attained by the countermonotone copula W
    double rho_max; // attained by the comonotone copula M
};

CorrelationBounds correlation_bounds(double p1, double p2);

/// Fraction of masks with every selected cell equal to 1, with a 95% binomial
/// half-width. Requires at least 1000 masks.
McEstimate empirical_joint_prob(std::span<const MaskMatrix> masks, const CellSelection& cells);

/// Same estimator with each ROW of one matrix treated as an independent
/// replication of a single mask row (the iid-rows sampling layout).
McEstimate empirical_joint_prob_rows(const MaskMatrix& replicated_rows,
                                     std::span<const int> columns);

/// Sample Pearson correlation of two indicator series across masks.
/// Throws when either series has zero variance.
double empirical_correlation(std::span<const MaskMatrix> masks, std::pair<int, int> cell_a,
                             std::pair<int, int> cell_b);

/// Row-replication variant of empirical_correlation.
double empirical_correlation_rows(const MaskMatrix& replicated_rows, int col_a, int col_b);

} // namespace ampute

#endif // AMPUTE_ANALYTICS_HPP
