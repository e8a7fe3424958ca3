// Copula construction, sampling, and CDF evaluation.
//
// Supported families: independence, comonotone, countermonotone (d=2), Gauss
// (general correlation matrix or homogeneous rho), survival transforms,
// convex combinations, and block products of independent sub-copulas.

#ifndef AMPUTE_COPULA_HPP
#define AMPUTE_COPULA_HPP

#include "ampute/rng.hpp"
#include "ampute/types.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace ampute {

class CopulaSpec;
using CopulaPtr = std::shared_ptr<const CopulaSpec>;

struct IndependenceCopula {
    int dim;
};
struct ComonotoneCopula {
    int dim;
};
struct CountermonotoneCopula {}; // dim is always 2
struct GaussCopula {
    Matrix correlation; // symmetric, unit diagonal, PSD
};
struct HomogeneousGaussCopula {
    double rho; // in [0,1]: rho J + (1-rho) I
    int dim;
};
struct SurvivalCopula {
    CopulaPtr inner;
};
struct ConvexCombinationCopula {
    double lambda; // weight on `first`
    CopulaPtr first;
    CopulaPtr second;
};
struct CopulaBlock {
    std::vector<int> indices; // 0-based coordinates of the parent spec
    CopulaPtr copula;         // dimension == indices.size()
};
struct BlockProductCopula {
    std::vector<CopulaBlock> blocks; // index sets partition {0..dim-1}
};

/// Declarative copula description. Immutable value type; cheap to copy
/// (children are shared). Construct through the factory functions, then
/// validate() before use (samplers/evaluators validate on entry).
class CopulaSpec {
public:
    using Variant = std::variant<IndependenceCopula, ComonotoneCopula, CountermonotoneCopula,
                                 GaussCopula, HomogeneousGaussCopula, SurvivalCopula,
                                 ConvexCombinationCopula, BlockProductCopula>;

    static CopulaSpec independence(int dim);
    static CopulaSpec comonotone(int dim);
    static CopulaSpec countermonotone();
    static CopulaSpec gauss(Matrix correlation);
    static CopulaSpec homogeneous_gauss(double rho, int dim);
    static CopulaSpec survival(CopulaSpec inner);
    static CopulaSpec convex_combination(double lambda, CopulaSpec first, CopulaSpec second);
    static CopulaSpec block_product(std::vector<std::pair<std::vector<int>, CopulaSpec>> blocks);

    int dim() const;
    const Variant& node() const { return node_; }

    /// Full structural validation; throws ValidationError naming the field.
    void validate() const;

    /// Human-readable family tree, e.g. "convex(0.4; comonotone(3), independence(3))".
    std::string describe() const;

private:
    explicit CopulaSpec(Variant v) : node_(std::move(v)) {}
    Variant node_;
};

/// n_rows independent draws from the copula; entries clamped to the open
/// interval. Deterministic function of (spec, n_rows, seed): row i is derived
/// from (seed, RowSample, row_offset + i) regardless of thread count.
struct UniformSample {
    Matrix values; // n_rows x dim, entries in (0,1)
};

UniformSample sample(const CopulaSpec& spec, int n_rows, std::uint64_t seed, int threads = 1);

/// Sample a single row into `out` using an explicit stream. Exposed so the
/// amputation engine can keep one substream per dataset row.
void sample_row(const CopulaSpec& spec, RngStream& stream, std::span<double> out);

/// Spec compiled for repeated row draws (validation and Cholesky factors are
/// resolved once). Thread-safe: draw() only mutates the caller's stream.
class PreparedCopulaSampler {
public:
    explicit PreparedCopulaSampler(const CopulaSpec& spec);
    ~PreparedCopulaSampler();
    PreparedCopulaSampler(PreparedCopulaSampler&&) noexcept;
    PreparedCopulaSampler& operator=(PreparedCopulaSampler&&) noexcept;

    int dim() const { return dim_; }
    void draw(RngStream& stream, std::span<double> out) const;

private:
    struct Impl;
    std::unique_ptr<const Impl> impl_;
    int dim_;
};

/// Exact C(u). Gauss families are evaluable up to dim 2 only; above that a
/// UseMonteCarloError directs the caller to mc_cdf().
double cdf(const CopulaSpec& spec, std::span<const double> point);

/// Survival copula value C-bar(u). Uses the identity C-bar = C for radially
/// symmetric specs, otherwise the 2^dim inclusion-exclusion expansion up to
/// `max_exact_dim` coordinates.
double survival_cdf(const CopulaSpec& spec, std::span<const double> point,
                    int max_exact_dim = 12);

/// The raw inclusion-exclusion expansion of the survival copula, with no
/// symmetry shortcut. Second evaluation route, kept public so tests can pit
/// it against cdf() on radially symmetric specs.
double survival_cdf_by_inclusion_exclusion(const CopulaSpec& spec, std::span<const double> point,
                                           int max_exact_dim = 12);

/// True when radial symmetry (C-bar == C) is structurally certain: the basic
/// families, survival/convex/block compositions of symmetric parts. False
/// only means "not certified".
bool is_radially_symmetric(const CopulaSpec& spec);

struct McEstimate {
    double estimate;
    double half_width_95;
};

/// Monte Carlo estimate of C(point) with a 95% binomial half-width.
McEstimate mc_cdf(const CopulaSpec& spec, std::span<const double> point, int n_samples,
                  std::uint64_t seed);

namespace detail {
/// B with B B^T = A for a symmetric PSD matrix, via diagonally pivoted
/// Cholesky. Pivots below -tol reject the matrix; tiny negative pivots within
/// tol are treated as rank deficiency (columns zeroed), which is what makes
/// rho = 1 and other singular correlation matrices sampleable.
Matrix psd_factor(const Matrix& a, double tol = 1e-10);
} // namespace detail

} // namespace ampute

#endif // AMPUTE_COPULA_HPP
