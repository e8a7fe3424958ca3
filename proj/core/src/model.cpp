#include "ampute/model.hpp"

#include "ampute/normal.hpp"

#include <cmath>

namespace ampute {

LogisticMissModel LogisticMissModel::global(CellModel shared, int n_cols) {
    return LogisticMissModel(SharingMode::Global, 0, n_cols, {std::move(shared)});
}

LogisticMissModel LogisticMissModel::per_column(std::vector<CellModel> by_column) {
    const int d = static_cast<int>(by_column.size());
    return LogisticMissModel(SharingMode::PerColumn, 0, d, std::move(by_column));
}

LogisticMissModel LogisticMissModel::per_cell(int n_rows, int n_cols,
                                              std::vector<CellModel> cells) {
    if (static_cast<int>(cells.size()) != n_rows * n_cols)
        throw ValidationError("per-cell model: expected n_rows * n_cols records");
    return LogisticMissModel(SharingMode::PerCell, n_rows, n_cols, std::move(cells));
}

const CellModel& LogisticMissModel::cell(int row, int col) const {
    switch (sharing_) {
    case SharingMode::Global: return cells_[0];
    case SharingMode::PerColumn: return cells_[static_cast<std::size_t>(col)];
    case SharingMode::PerCell:
    default: return cells_[static_cast<std::size_t>(row) * cols_ + col];
    }
}

void LogisticMissModel::validate() const {
    if (cols_ < 1) throw ValidationError("model: needs at least one column");
    for (const auto& c : cells_) {
        if (c.fixed_prob) {
            if (!(*c.fixed_prob >= 0.0 && *c.fixed_prob <= 1.0))
                throw ValidationError("model: fixed probability must lie in [0,1]");
            continue;
        }
        if (!std::isfinite(c.intercept))
            throw ValidationError("model: intercept must be finite");
        for (const auto& t : c.terms) {
            if (t.column < 0 || t.column >= cols_)
                throw ValidationError("model: term references column " +
                                      std::to_string(t.column + 1) + ", dataset has " +
                                      std::to_string(cols_));
            if (!std::isfinite(t.weight)) throw ValidationError("model: weight must be finite");
        }
    }
}

MissProbMatrix compute_probs(const LogisticMissModel& model, const CompleteDataset& y) {
    model.validate();
    y.validate();
    if (y.cols() != model.cols())
        throw ValidationError("compute_probs: model has " + std::to_string(model.cols()) +
                              " columns, dataset has " + std::to_string(y.cols()));
    if (model.sharing() == SharingMode::PerCell && model.rows() != y.rows())
        throw ValidationError("compute_probs: per-cell model row count does not match dataset");

    Matrix p(y.rows(), y.cols());
    for (int i = 0; i < y.rows(); ++i) {
        for (int j = 0; j < y.cols(); ++j) {
            const CellModel& c = model.cell(i, j);
            if (c.fixed_prob) {
                p(i, j) = *c.fixed_prob;
                continue;
            }
            double eta = c.intercept;
            for (const auto& t : c.terms) eta += t.weight * y.values(i, t.column);
            if (!std::isfinite(eta))
                throw ValidationError("compute_probs: non-finite linear predictor at row " +
                                      std::to_string(i + 1) + ", column " + std::to_string(j + 1));
            p(i, j) = inv_logit(eta);
        }
    }
    return MissProbMatrix(std::move(p));
}

ImpliedCoefficients implied_coefficients(double p_target, double eps, double c_min, double c_max,
                                         int n_covariates) {
    if (!(c_min < c_max)) throw ValidationError("implied_coefficients: c_min must be < c_max");
    if (n_covariates < 1) throw ValidationError("implied_coefficients: n_covariates must be >= 1");
    if (!(eps > 0.0)) throw ValidationError("implied_coefficients: eps must be positive");
    if (!(p_target - eps > 0.0 && p_target + eps < 1.0))
        throw ValidationError(
            "implied_coefficients: [p - eps, p + eps] must lie strictly inside (0,1)");

    const double lo = logit(p_target - eps);
    const double hi = logit(p_target + eps);
    const double beta_each = (hi - lo) / (n_covariates * (c_max - c_min));
    const double beta0 = lo - c_min * n_covariates * beta_each;
    return ImpliedCoefficients{beta0, beta_each};
}

MechanismLabel classify_mechanism(const LogisticMissModel& model, int column, int n_rows) {
    model.validate();
    if (column < 0 || column >= model.cols())
        throw ValidationError("classify_mechanism: column out of range");

    int rows = 1;
    if (model.sharing() == SharingMode::PerCell) rows = model.rows();
    if (n_rows > 0 && model.sharing() != SharingMode::PerCell) rows = 1; // rows share one record

    int degree = 0;
    bool own_column_active = false;
    for (int i = 0; i < rows; ++i) {
        const CellModel& c = model.cell(i, column);
        if (c.fixed_prob) continue; // no covariate dependence
        int active = 0;
        for (const auto& t : c.terms) {
            if (t.weight == 0.0) continue;
            ++active;
            if (t.column == column) own_column_active = true;
        }
        degree = std::max(degree, active);
    }

    if (degree == 0) return MechanismLabel{MechanismKind::MCAR, 0, MechanismFlavor::None};
    if (!own_column_active) return MechanismLabel{MechanismKind::MAR, degree, MechanismFlavor::None};
    return MechanismLabel{MechanismKind::MNAR, degree,
                          degree == 1 ? MechanismFlavor::Suicide : MechanismFlavor::Group};
}

namespace presets {

LogisticMissModel mcar(int n_cols, double p) {
    if (p <= 0.0 || p >= 1.0)
        return LogisticMissModel::global(CellModel::fixed(p), n_cols);
    return LogisticMissModel::global(CellModel::logistic(logit(p)), n_cols);
}

LogisticMissModel mar_on_column(int n_cols, int driver_column, double p, double eps, double c_min,
                                double c_max) {
    if (driver_column < 0 || driver_column >= n_cols)
        throw ValidationError("mar_on_column: driver column out of range");
    const auto ic = implied_coefficients(p, eps, c_min, c_max, 1);
    std::vector<CellModel> cols;
    cols.reserve(static_cast<std::size_t>(n_cols));
    for (int j = 0; j < n_cols; ++j) {
        if (j == driver_column)
            cols.push_back(CellModel::fixed(0.0));
        else
            cols.push_back(CellModel::logistic(ic.beta0, {{driver_column, ic.beta_each}}));
    }
    return LogisticMissModel::per_column(std::move(cols));
}

LogisticMissModel mnar_suicide(int n_cols, double p, double eps, double c_min, double c_max) {
    const auto ic = implied_coefficients(p, eps, c_min, c_max, 1);
    std::vector<CellModel> cols;
    cols.reserve(static_cast<std::size_t>(n_cols));
    for (int j = 0; j < n_cols; ++j)
        cols.push_back(CellModel::logistic(ic.beta0, {{j, ic.beta_each}}));
    return LogisticMissModel::per_column(std::move(cols));
}

LogisticMissModel mnar_group(int n_cols, double p, double eps, double c_min, double c_max) {
    const auto ic = implied_coefficients(p, eps, c_min, c_max, n_cols);
    std::vector<LogisticTerm> terms;
    terms.reserve(static_cast<std::size_t>(n_cols));
    for (int k = 0; k < n_cols; ++k) terms.push_back({k, ic.beta_each});
    return LogisticMissModel::global(CellModel::logistic(ic.beta0, terms), n_cols);
}

} // namespace presets

} // namespace ampute
