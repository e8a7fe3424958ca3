// Core value types shared by all amputation components.

#ifndef AMPUTE_TYPES_HPP
#define AMPUTE_TYPES_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ampute {

/// Invalid user input: bad spec fields, dimension mismatches, malformed files.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by exact evaluators when only Monte Carlo estimation is available
/// for the requested copula/dimension; callers should fall back to mc_cdf().
class UseMonteCarloError : public std::runtime_error {
public:
    explicit UseMonteCarloError(const std::string& what) : std::runtime_error(what) {}
};

/// Dense row-major grid. Small helper, not a linear-algebra library.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int rows, int cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0) throw ValidationError("Grid: negative dimensions");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    const T& operator()(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    T* row_ptr(int i) { return data_.data() + static_cast<std::size_t>(i) * cols_; }
    const T* row_ptr(int i) const { return data_.data() + static_cast<std::size_t>(i) * cols_; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool same_shape(const Grid& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    friend bool operator==(const Grid& a, const Grid& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

using Matrix = Grid<double>;

/// Missingness indicator matrix M; 1 marks a cell treated as missing.
using MaskMatrix = Grid<std::uint8_t>;

/// Complete data: no NA cells, finite reals, one name per column.
struct CompleteDataset {
    std::vector<std::string> columns;
    Matrix values;

    int rows() const { return values.rows(); }
    int cols() const { return values.cols(); }

    /// Column index by name; throws if absent.
    int column_index(const std::string& name) const;

    void validate() const;
};

/// Matrix P of marginal missingness probabilities p_{i,j} in [0,1].
/// Degenerate entries 0 and 1 are deliberately allowed (deterministic SM).
struct MissProbMatrix {
    Matrix values;

    MissProbMatrix() = default;
    explicit MissProbMatrix(Matrix v);
    MissProbMatrix(int rows, int cols, double p);

    int rows() const { return values.rows(); }
    int cols() const { return values.cols(); }
    double operator()(int i, int j) const { return values(i, j); }
};

/// X = *M + Y (1-M): data with an explicit mask; masked cells are NA.
/// The mask is the source of truth; masked value slots hold quiet NaN so
/// accidental reads poison downstream arithmetic instead of looking valid.
struct AmputedDataset {
    std::vector<std::string> columns;
    Matrix values;
    MaskMatrix mask;

    int rows() const { return values.rows(); }
    int cols() const { return values.cols(); }
    bool is_na(int i, int j) const { return mask(i, j) != 0; }

    int column_index(const std::string& name) const;
};

inline int count_missing(const MaskMatrix& m) {
    int c = 0;
    for (auto v : m.data()) c += v;
    return c;
}

} // namespace ampute

#endif // AMPUTE_TYPES_HPP
