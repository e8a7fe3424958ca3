// Amputation engine: turns (Y, P, dependence) into a missingness mask M and
// the amputed dataset X. Masks are thresholded survival-copula samples,
// M_{i,j} = 1{U_{i,j} <= p_{i,j}}, with rows independent given Y.

#ifndef AMPUTE_ENGINE_HPP
#define AMPUTE_ENGINE_HPP

#include "ampute/copula.hpp"
#include "ampute/model.hpp"
#include "ampute/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace ampute {

/// The survival flip U <- 1-U makes U a sample from the survival copula. It is
/// skipped when radial symmetry is certified (both paths are distributionally
/// identical then). Force* exists so tests can compare the two paths.
enum class SurvivalHandling { Auto, ForceFlip, ForceSkip };

struct AmputeResult {
    MaskMatrix mask;
    AmputedDataset data;
};

/// X = *M + Y (1 - M): NA exactly where the mask is 1.
AmputedDataset apply_mask(const CompleteDataset& y, const MaskMatrix& mask);

/// Rows iid from one d-dimensional row copula (assumption A3).
AmputeResult ampute_rows_iid(const CompleteDataset& y, const MissProbMatrix& p,
                             const CopulaSpec& row_copula, std::uint64_t seed, int threads = 1,
                             SurvivalHandling survival = SurvivalHandling::Auto);

/// Rows independent with one copula per row (assumption A1).
AmputeResult ampute_rows_independent(const CompleteDataset& y, const MissProbMatrix& p,
                                     const std::vector<CopulaSpec>& row_copulas,
                                     std::uint64_t seed, int threads = 1,
                                     SurvivalHandling survival = SurvivalHandling::Auto);

/// Grouped comonotone cell sets: all cells of group k share one uniform V_k,
/// the groups are coupled by a K-dimensional cross copula, and ungrouped
/// cells are amputed independently at default_p.
struct CellSetGroup {
    std::vector<std::pair<int, int>> cells; // (row, column), 0-based
    double prob;
};
struct CellSetGroupSpec {
    std::vector<CellSetGroup> groups;
    CopulaSpec cross_copula; // dimension == groups.size()
    double default_p = 0.0;

    void validate(int n_rows, int n_cols) const;
};

AmputeResult ampute_cell_sets(const CompleteDataset& y, const CellSetGroupSpec& spec,
                              std::uint64_t seed,
                              SurvivalHandling survival = SurvivalHandling::Auto);

/// Random monotone missingness: row i is complete with probability
/// 1 - miss_row_prob, otherwise missing from column J_i + 1 on, where
/// J_i = ceil(d F_Beta^{-1}(U_i)) - 1 and (U_1,...,U_n) ~ row_dependence.
/// The mixture selector is drawn independently of the U_i.
struct MonotoneMixtureSpec {
    double miss_row_prob;
    double alpha;
    double beta;
    CopulaSpec row_dependence; // dimension == n_rows

    void validate(int n_rows) const;
};

AmputeResult ampute_monotone_mixture(const CompleteDataset& y, const MonotoneMixtureSpec& spec,
                                     std::uint64_t seed);

/// P = compute_probs(model, y), then rows-iid amputation; P returned for audit.
struct MechanismAmputeResult {
    MaskMatrix mask;
    AmputedDataset data;
    MissProbMatrix probs;
};

MechanismAmputeResult ampute_mechanism(const CompleteDataset& y, const LogisticMissModel& model,
                                       const CopulaSpec& row_copula, std::uint64_t seed,
                                       int threads = 1);

} // namespace ampute

#endif // AMPUTE_ENGINE_HPP
