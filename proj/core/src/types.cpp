#include "ampute/types.hpp"

#include <algorithm>

namespace ampute {

namespace {
int find_column(const std::vector<std::string>& columns, const std::string& name) {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ValidationError("unknown column name: " + name);
    return static_cast<int>(it - columns.begin());
}
} // namespace

int CompleteDataset::column_index(const std::string& name) const {
    return find_column(columns, name);
}

int AmputedDataset::column_index(const std::string& name) const {
    return find_column(columns, name);
}

void CompleteDataset::validate() const {
    if (static_cast<int>(columns.size()) != values.cols())
        throw ValidationError("dataset: column name count does not match value columns");
    for (int i = 0; i < values.rows(); ++i)
        for (int j = 0; j < values.cols(); ++j)
            if (!std::isfinite(values(i, j)))
                throw ValidationError("dataset: non-finite value at row " + std::to_string(i + 1) +
                                      ", column " + std::to_string(j + 1));
}

MissProbMatrix::MissProbMatrix(Matrix v) : values(std::move(v)) {
    for (double p : values.data())
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError("missingness probabilities must lie in [0,1]");
}

MissProbMatrix::MissProbMatrix(int rows, int cols, double p) : values(rows, cols, p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("missingness probabilities must lie in [0,1]");
}

} // namespace ampute
