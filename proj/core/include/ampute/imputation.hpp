// Desk-scale bias study machinery: complete-case estimation and a minimal
// FCS imputer with predictive mean matching, plus the repeated-amputation
// harness comparing mechanisms.

#ifndef AMPUTE_IMPUTATION_HPP
#define AMPUTE_IMPUTATION_HPP

#include "ampute/copula.hpp"
#include "ampute/model.hpp"
#include "ampute/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ampute {

/// Mean of `column` over rows with no NA in any column (complete cases, not
/// column-wise deletion). Throws when no complete row exists.
double complete_case_mean(const AmputedDataset& x, int column);

/// Mean of `column` over its observed cells (column-wise deletion). The
/// listwise estimator above is undefined whenever no complete row exists,
/// which is guaranteed under wide suicide-MNAR calibrations: every row then
/// holds a cell with p = 0.999 and the Frechet-Hoeffding upper bound caps
/// P(row complete) at 0.001 for every copula. This estimator always exists
/// as long as the column has one observed cell.
double available_case_mean(const AmputedDataset& x, int column);

struct PmmOptions {
    int donors = 5;           // K nearest-prediction donors
    int n_imputations = 5;    // m independent completed datasets
    int gibbs_iterations = 5; // FCS sweeps over incomplete columns
};

/// FCS + predictive mean matching. Each imputation: fill missing cells with
/// random observed draws of their column, then sweep the incomplete columns:
/// least-squares fit of column j on all others over the originally-complete
/// rows, coefficients randomised by a normal draw with the classical
/// sigma^2 (X'X)^{-1} covariance, predictions for all rows from the current
/// matrix, and each missing cell copies the observed value of one of the K
/// donors with nearest predictions (uniform pick, ties to the lowest row).
/// Singular designs fall back to a ridge with lambda = 1e-8.
std::vector<CompleteDataset> pmm_impute(const AmputedDataset& x, const PmmOptions& options,
                                        std::uint64_t seed);

enum class Estimator { CompleteCase, AvailableCase, PmmMice };

struct MechanismArm {
    std::string label;
    LogisticMissModel model;
    CopulaSpec copula;
};

struct BiasStudyConfig {
    CompleteDataset data;
    int target_column = 0;
    int replications = 200;
    std::vector<MechanismArm> mechanisms;
    Estimator estimator = Estimator::CompleteCase;
    PmmOptions pmm{};
    std::uint64_t seed = 0;
    int threads = 1;
};

struct BiasSample {
    std::string mechanism;
    int replication;
    bool failed = false;  // e.g. zero complete cases; recorded, never dropped
    std::string failure;  // reason when failed
    double estimate = 0.0;
    double bias = 0.0;    // estimate - complete-data mean
};

struct MechanismSummary {
    std::string mechanism;
    int n_ok = 0;
    int n_failed = 0;
    double mean_bias = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    std::int64_t donor_violations = 0; // PMM estimator only; must stay 0
};

struct BiasStudyResult {
    double complete_data_mean = 0.0;
    std::vector<BiasSample> samples;
    std::vector<MechanismSummary> summary;
};

/// Repeatedly ampute via ampute_mechanism and estimate the target-column mean.
/// PMM estimates average the m per-imputation means (Rubin's point estimate
/// for a scalar mean). Deterministic given cfg.seed, for any thread count.
BiasStudyResult run_bias_study(const BiasStudyConfig& cfg);

} // namespace ampute

#endif // AMPUTE_IMPUTATION_HPP
