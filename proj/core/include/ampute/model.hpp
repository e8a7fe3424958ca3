// Logistic models for marginal missingness probabilities: p = logit^{-1}(b0 +
// sum_k b_k Y_k), mechanism classification (MCAR/MAR/MNAR), and the
// probability-implied coefficient calibration.

#ifndef AMPUTE_MODEL_HPP
#define AMPUTE_MODEL_HPP

#include "ampute/types.hpp"

#include <optional>
#include <vector>

namespace ampute {

enum class SharingMode { PerCell, PerColumn, Global };

struct LogisticTerm {
    int column; // 0-based index into Y's columns
    double weight;
};

/// Model for one cell (or one column / all cells, depending on sharing mode).
/// Either a logistic record, or a pinned probability. Pinned probabilities may
/// be degenerate (0 or 1); the logistic path requires finite coefficients and
/// can never reach 0 or 1 — the two entry paths are deliberately distinct.
struct CellModel {
    std::optional<double> fixed_prob;
    double intercept = 0.0;
    std::vector<LogisticTerm> terms;

    static CellModel fixed(double p) { return CellModel{p, 0.0, {}}; }
    static CellModel logistic(double intercept, std::vector<LogisticTerm> terms = {}) {
        return CellModel{std::nullopt, intercept, std::move(terms)};
    }
};

class LogisticMissModel {
public:
    /// One record applied to every cell.
    static LogisticMissModel global(CellModel shared, int n_cols);
    /// One record per column, shared across rows (beta_{1,j} = ... = beta_{n,j}).
    static LogisticMissModel per_column(std::vector<CellModel> by_column);
    /// Full n x d table of records, row-major.
    static LogisticMissModel per_cell(int n_rows, int n_cols, std::vector<CellModel> cells);

    SharingMode sharing() const { return sharing_; }
    int cols() const { return cols_; }
    /// Declared row count (per-cell mode only; 0 means any).
    int rows() const { return rows_; }

    const CellModel& cell(int row, int col) const;

    /// Column references in range, finite coefficients, probabilities in [0,1].
    void validate() const;

private:
    LogisticMissModel(SharingMode mode, int rows, int cols, std::vector<CellModel> cells)
        : sharing_(mode), rows_(rows), cols_(cols), cells_(std::move(cells)) {}

    SharingMode sharing_;
    int rows_;
    int cols_;
    std::vector<CellModel> cells_;
};

enum class MechanismKind { MCAR, MAR, MNAR };
enum class MechanismFlavor { None, Suicide, Group };

struct MechanismLabel {
    MechanismKind kind;
    int degree; // number of covariates with nonzero weight (max across rows)
    MechanismFlavor flavor;
};

/// Evaluate p_{i,j} for every cell. Throws when a linear predictor is not
/// finite, identifying the offending cell.
MissProbMatrix compute_probs(const LogisticMissModel& model, const CompleteDataset& y);

struct ImpliedCoefficients {
    double beta0;
    double beta_each; // weight for each of the n_covariates referenced columns
};

/// Coefficients such that covariates in [c_min, c_max] yield p in
/// [p_target - eps, p_target + eps], with the boundary attained at the
/// interval endpoints. Requires the target interval inside (0,1).
ImpliedCoefficients implied_coefficients(double p_target, double eps, double c_min, double c_max,
                                         int n_covariates);

/// MCAR / MAR / MNAR per the weight pattern of column j; suicide = MNAR of
/// degree 1 on the own column, group = MNAR of degree >= 2.
MechanismLabel classify_mechanism(const LogisticMissModel& model, int column, int n_rows = 0);

namespace presets {

/// Homogeneous MCAR at probability p (intercept-only; pinned if degenerate).
LogisticMissModel mcar(int n_cols, double p);

/// The driver column is never missing; every other column's probability is
/// driven by the driver's value, calibrated into [p - eps, p + eps].
LogisticMissModel mar_on_column(int n_cols, int driver_column, double p, double eps, double c_min,
                                double c_max);

/// Each column's probability is driven by its own value (degree-1 MNAR).
LogisticMissModel mnar_suicide(int n_cols, double p, double eps, double c_min, double c_max);

/// Every column contributes equally to every probability (degree-d MNAR).
LogisticMissModel mnar_group(int n_cols, double p, double eps, double c_min, double c_max);

} // namespace presets

} // namespace ampute

#endif // AMPUTE_MODEL_HPP
