#include "ampute/copula.hpp"

#include "ampute/normal.hpp"
#include "ampute/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ampute {

namespace {

double clamp_open(double u) {
    if (u < 1e-15) return 1e-15;
    if (u > 1.0 - 1e-15) return 1.0 - 1e-15;
    return u;
}

void check_point(const CopulaSpec& spec, std::span<const double> point) {
    if (static_cast<int>(point.size()) != spec.dim())
        throw ValidationError("cdf: point has dimension " + std::to_string(point.size()) +
                              ", copula has dimension " + std::to_string(spec.dim()));
    for (double u : point)
        if (!(u >= 0.0 && u <= 1.0)) throw ValidationError("cdf: point must lie in [0,1]^dim");
}

} // namespace

// ---------------------------------------------------------------------------
// Construction and validation

CopulaSpec CopulaSpec::independence(int dim) { return CopulaSpec(IndependenceCopula{dim}); }
CopulaSpec CopulaSpec::comonotone(int dim) { return CopulaSpec(ComonotoneCopula{dim}); }
CopulaSpec CopulaSpec::countermonotone() { return CopulaSpec(CountermonotoneCopula{}); }
CopulaSpec CopulaSpec::gauss(Matrix correlation) {
    return CopulaSpec(GaussCopula{std::move(correlation)});
}
CopulaSpec CopulaSpec::homogeneous_gauss(double rho, int dim) {
    return CopulaSpec(HomogeneousGaussCopula{rho, dim});
}
CopulaSpec CopulaSpec::survival(CopulaSpec inner) {
    return CopulaSpec(SurvivalCopula{std::make_shared<CopulaSpec>(std::move(inner))});
}
CopulaSpec CopulaSpec::convex_combination(double lambda, CopulaSpec first, CopulaSpec second) {
    return CopulaSpec(ConvexCombinationCopula{lambda,
                                              std::make_shared<CopulaSpec>(std::move(first)),
                                              std::make_shared<CopulaSpec>(std::move(second))});
}
CopulaSpec CopulaSpec::block_product(
    std::vector<std::pair<std::vector<int>, CopulaSpec>> blocks) {
    BlockProductCopula bp;
    bp.blocks.reserve(blocks.size());
    for (auto& [indices, child] : blocks)
        bp.blocks.push_back(
            CopulaBlock{std::move(indices), std::make_shared<CopulaSpec>(std::move(child))});
    return CopulaSpec(std::move(bp));
}

int CopulaSpec::dim() const {
    return std::visit(
        [](const auto& node) -> int {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, IndependenceCopula> ||
                          std::is_same_v<T, ComonotoneCopula>)
                return node.dim;
            else if constexpr (std::is_same_v<T, CountermonotoneCopula>)
                return 2;
            else if constexpr (std::is_same_v<T, GaussCopula>)
                return node.correlation.rows();
            else if constexpr (std::is_same_v<T, HomogeneousGaussCopula>)
                return node.dim;
            else if constexpr (std::is_same_v<T, SurvivalCopula>)
                return node.inner->dim();
            else if constexpr (std::is_same_v<T, ConvexCombinationCopula>)
                return node.first->dim();
            else {
                int d = 0;
                for (const auto& b : node.blocks) d += static_cast<int>(b.indices.size());
                return d;
            }
        },
        node_);
}

void CopulaSpec::validate() const {
    std::visit(
        [this](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, IndependenceCopula> ||
                          std::is_same_v<T, ComonotoneCopula>) {
                if (node.dim < 1) throw ValidationError("copula: dim must be >= 1");
            } else if constexpr (std::is_same_v<T, CountermonotoneCopula>) {
                // nothing to check; dimension is fixed at 2
            } else if constexpr (std::is_same_v<T, GaussCopula>) {
                const Matrix& c = node.correlation;
                if (c.rows() < 1 || c.rows() != c.cols())
                    throw ValidationError("gauss copula: correlation matrix must be square");
                for (int i = 0; i < c.rows(); ++i) {
                    if (std::abs(c(i, i) - 1.0) > 1e-12)
                        throw ValidationError("gauss copula: correlation diagonal must be 1");
                    for (int j = 0; j < c.cols(); ++j) {
                        if (!std::isfinite(c(i, j)) || std::abs(c(i, j)) > 1.0 + 1e-12)
                            throw ValidationError(
                                "gauss copula: correlation entries must lie in [-1,1]");
                        if (std::abs(c(i, j) - c(j, i)) > 1e-12)
                            throw ValidationError("gauss copula: correlation must be symmetric");
                    }
                }
                detail::psd_factor(c); // throws when not PSD within tolerance
            } else if constexpr (std::is_same_v<T, HomogeneousGaussCopula>) {
                if (node.dim < 1) throw ValidationError("copula: dim must be >= 1");
                if (!(node.rho >= 0.0 && node.rho <= 1.0))
                    throw ValidationError("homogeneous gauss copula: rho must lie in [0,1]");
            } else if constexpr (std::is_same_v<T, SurvivalCopula>) {
                node.inner->validate();
            } else if constexpr (std::is_same_v<T, ConvexCombinationCopula>) {
                if (!(node.lambda >= 0.0 && node.lambda <= 1.0))
                    throw ValidationError("convex combination: lambda must lie in [0,1]");
                node.first->validate();
                node.second->validate();
                if (node.first->dim() != node.second->dim())
                    throw ValidationError(
                        "convex combination: children must have equal dimension");
            } else { // BlockProductCopula
                if (node.blocks.empty())
                    throw ValidationError("block product: needs at least one block");
                std::vector<int> seen(static_cast<std::size_t>(dim()), 0);
                for (const auto& b : node.blocks) {
                    b.copula->validate();
                    if (b.copula->dim() != static_cast<int>(b.indices.size()))
                        throw ValidationError(
                            "block product: child dimension must equal its index-set size");
                    for (int ix : b.indices) {
                        if (ix < 0 || ix >= static_cast<int>(seen.size()) || seen[ix]++)
                            throw ValidationError(
                                "block product: index sets must partition the coordinates");
                    }
                }
            }
        },
        node_);
}

std::string CopulaSpec::describe() const {
    std::ostringstream os;
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, IndependenceCopula>)
                os << "independence(" << node.dim << ")";
            else if constexpr (std::is_same_v<T, ComonotoneCopula>)
                os << "comonotone(" << node.dim << ")";
            else if constexpr (std::is_same_v<T, CountermonotoneCopula>)
                os << "countermonotone";
            else if constexpr (std::is_same_v<T, GaussCopula>)
                os << "gauss(" << node.correlation.rows() << "x" << node.correlation.cols() << ")";
            else if constexpr (std::is_same_v<T, HomogeneousGaussCopula>)
                os << "homogeneous-gauss(rho=" << node.rho << ", " << node.dim << ")";
            else if constexpr (std::is_same_v<T, SurvivalCopula>)
                os << "survival(" << node.inner->describe() << ")";
            else if constexpr (std::is_same_v<T, ConvexCombinationCopula>)
                os << "convex(" << node.lambda << "; " << node.first->describe() << ", "
                   << node.second->describe() << ")";
            else {
                os << "block-product(";
                bool sep = false;
                for (const auto& b : node.blocks) {
                    if (sep) os << ", ";
                    sep = true;
                    os << b.copula->describe();
                }
                os << ")";
            }
        },
        node_);
    return os.str();
}

// ---------------------------------------------------------------------------
// Pivoted Cholesky

namespace detail {

Matrix psd_factor(const Matrix& a, double tol) {
    const int n = a.rows();
    Matrix lower(n, n, 0.0);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = a(i, i);

    int rank = n;
    for (int k = 0; k < n; ++k) {
        int q = k;
        for (int i = k + 1; i < n; ++i)
            if (diag[i] > diag[q]) q = i;
        if (q != k) {
            std::swap(perm[k], perm[q]);
            std::swap(diag[k], diag[q]);
            for (int t = 0; t < k; ++t) std::swap(lower(k, t), lower(q, t));
        }
        const double pivot = diag[k];
        if (pivot < -tol)
            throw ValidationError("correlation matrix is not positive semidefinite (pivot " +
                                  std::to_string(pivot) + ")");
        if (pivot <= tol) {
            rank = k; // remaining directions carry no variance
            break;
        }
        lower(k, k) = std::sqrt(pivot);
        for (int i = k + 1; i < n; ++i) {
            double s = a(perm[i], perm[k]);
            for (int t = 0; t < k; ++t) s -= lower(i, t) * lower(k, t);
            lower(i, k) = s / lower(k, k);
            diag[i] -= lower(i, k) * lower(i, k);
        }
    }

    (void)rank;
    // Undo the permutation: row perm[i] of the result is row i of `lower`.
    // The result satisfies B B^T = A but is only triangular up to row order.
    Matrix factor(n, n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) factor(perm[i], j) = lower(i, j);
    return factor;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Sampling

namespace {

// Spec mirror with Gauss factors resolved once per sample() call.
struct SamplerNode {
    const CopulaSpec* spec;
    Matrix gauss_factor;                            // Gauss nodes only
    std::vector<std::unique_ptr<SamplerNode>> kids; // survival 1, convex 2, block K

    explicit SamplerNode(const CopulaSpec& s) : spec(&s) {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, GaussCopula>) {
                    gauss_factor = detail::psd_factor(node.correlation);
                } else if constexpr (std::is_same_v<T, HomogeneousGaussCopula>) {
                    Matrix corr(node.dim, node.dim, node.rho);
                    for (int i = 0; i < node.dim; ++i) corr(i, i) = 1.0;
                    gauss_factor = detail::psd_factor(corr);
                } else if constexpr (std::is_same_v<T, SurvivalCopula>) {
                    kids.push_back(std::make_unique<SamplerNode>(*node.inner));
                } else if constexpr (std::is_same_v<T, ConvexCombinationCopula>) {
                    kids.push_back(std::make_unique<SamplerNode>(*node.first));
                    kids.push_back(std::make_unique<SamplerNode>(*node.second));
                } else if constexpr (std::is_same_v<T, BlockProductCopula>) {
                    for (const auto& b : node.blocks)
                        kids.push_back(std::make_unique<SamplerNode>(*b.copula));
                }
            },
            s.node());
    }

    void draw(RngStream& stream, std::span<double> out) const {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, IndependenceCopula>) {
                    for (auto& u : out) u = stream.uniform();
                } else if constexpr (std::is_same_v<T, ComonotoneCopula>) {
                    const double u = stream.uniform();
                    std::fill(out.begin(), out.end(), u);
                } else if constexpr (std::is_same_v<T, CountermonotoneCopula>) {
                    const double u = stream.uniform();
                    out[0] = u;
                    out[1] = clamp_open(1.0 - u);
                } else if constexpr (std::is_same_v<T, GaussCopula> ||
                                     std::is_same_v<T, HomogeneousGaussCopula>) {
                    const int d = static_cast<int>(out.size());
                    std::vector<double> z(d);
                    for (auto& v : z) v = norm_quantile(stream.uniform());
                    for (int i = 0; i < d; ++i) {
                        double w = 0.0;
                        for (int j = 0; j < d; ++j) w += gauss_factor(i, j) * z[j];
                        out[i] = clamp_open(norm_cdf(w));
                    }
                } else if constexpr (std::is_same_v<T, SurvivalCopula>) {
                    kids[0]->draw(stream, out);
                    for (auto& u : out) u = clamp_open(1.0 - u);
                } else if constexpr (std::is_same_v<T, ConvexCombinationCopula>) {
                    const double v = stream.uniform();
                    kids[v <= node.lambda ? 0 : 1]->draw(stream, out);
                } else { // BlockProductCopula
                    std::vector<double> tmp;
                    for (std::size_t b = 0; b < node.blocks.size(); ++b) {
                        const auto& indices = node.blocks[b].indices;
                        tmp.resize(indices.size());
                        kids[b]->draw(stream, tmp);
                        for (std::size_t t = 0; t < indices.size(); ++t)
                            out[static_cast<std::size_t>(indices[t])] = tmp[t];
                    }
                }
            },
            spec->node());
    }
};

} // namespace

struct PreparedCopulaSampler::Impl {
    CopulaSpec spec; // keeps the tree the SamplerNode points into alive
    SamplerNode node;
    explicit Impl(const CopulaSpec& s) : spec(s), node(spec) {}
};

PreparedCopulaSampler::PreparedCopulaSampler(const CopulaSpec& spec) : dim_(spec.dim()) {
    spec.validate();
    impl_ = std::make_unique<const Impl>(spec);
}
PreparedCopulaSampler::~PreparedCopulaSampler() = default;
PreparedCopulaSampler::PreparedCopulaSampler(PreparedCopulaSampler&&) noexcept = default;
PreparedCopulaSampler& PreparedCopulaSampler::operator=(PreparedCopulaSampler&&) noexcept =
    default;

void PreparedCopulaSampler::draw(RngStream& stream, std::span<double> out) const {
    if (static_cast<int>(out.size()) != dim_)
        throw ValidationError("draw: output span size must equal copula dimension");
    impl_->node.draw(stream, out);
}

void sample_row(const CopulaSpec& spec, RngStream& stream, std::span<double> out) {
    PreparedCopulaSampler(spec).draw(stream, out);
}

UniformSample sample(const CopulaSpec& spec, int n_rows, std::uint64_t seed, int threads) {
    if (n_rows < 1) throw ValidationError("sample: n_rows must be >= 1");
    const PreparedCopulaSampler prepared(spec);
    const int d = prepared.dim();
    UniformSample result{Matrix(n_rows, d)};
    parallel_for(n_rows, threads, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            RngStream stream(seed, StreamPurpose::RowSample, static_cast<std::uint64_t>(i));
            prepared.draw(stream, std::span<double>(result.values.row_ptr(i), d));
        }
    });
    return result;
}

// ---------------------------------------------------------------------------
// CDF evaluation

double cdf(const CopulaSpec& spec, std::span<const double> point) {
    check_point(spec, point);
    return std::visit(
        [&](const auto& node) -> double {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, IndependenceCopula>) {
                double p = 1.0;
                for (double u : point) p *= u;
                return p;
            } else if constexpr (std::is_same_v<T, ComonotoneCopula>) {
                return *std::min_element(point.begin(), point.end());
            } else if constexpr (std::is_same_v<T, CountermonotoneCopula>) {
                return std::max(point[0] + point[1] - 1.0, 0.0);
            } else if constexpr (std::is_same_v<T, GaussCopula> ||
                                 std::is_same_v<T, HomogeneousGaussCopula>) {
                const int d = spec.dim();
                if (d == 1) return point[0];
                if (d > 2)
                    throw UseMonteCarloError(
                        "gauss copula cdf is exact only up to dimension 2; use mc_cdf");
                double rho;
                if constexpr (std::is_same_v<T, GaussCopula>)
                    rho = node.correlation(0, 1);
                else
                    rho = node.rho;
                const double u1 = point[0], u2 = point[1];
                if (u1 == 0.0 || u2 == 0.0) return 0.0;
                if (u1 == 1.0) return u2;
                if (u2 == 1.0) return u1;
                if (rho >= 1.0) return std::min(u1, u2);
                if (rho <= -1.0) return std::max(u1 + u2 - 1.0, 0.0);
                return bivariate_norm_cdf(norm_quantile(u1), norm_quantile(u2), rho);
            } else if constexpr (std::is_same_v<T, SurvivalCopula>) {
                return survival_cdf(*node.inner, point);
            } else if constexpr (std::is_same_v<T, ConvexCombinationCopula>) {
                return node.lambda * cdf(*node.first, point) +
                       (1.0 - node.lambda) * cdf(*node.second, point);
            } else { // BlockProductCopula
                double p = 1.0;
                std::vector<double> sub;
                for (const auto& b : node.blocks) {
                    sub.clear();
                    for (int ix : b.indices) sub.push_back(point[static_cast<std::size_t>(ix)]);
                    p *= cdf(*b.copula, sub);
                }
                return p;
            }
        },
        spec.node());
}

bool is_radially_symmetric(const CopulaSpec& spec) {
    return std::visit(
        [](const auto& node) -> bool {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, SurvivalCopula>)
                return is_radially_symmetric(*node.inner);
            else if constexpr (std::is_same_v<T, ConvexCombinationCopula>)
                return is_radially_symmetric(*node.first) && is_radially_symmetric(*node.second);
            else if constexpr (std::is_same_v<T, BlockProductCopula>) {
                for (const auto& b : node.blocks)
                    if (!is_radially_symmetric(*b.copula)) return false;
                return true;
            } else {
                return true; // the elementary families are all radially symmetric
            }
        },
        spec.node());
}

double survival_cdf_by_inclusion_exclusion(const CopulaSpec& spec, std::span<const double> point,
                                           int max_exact_dim) {
    check_point(spec, point);
    const int d = spec.dim();
    if (d > max_exact_dim)
        throw UseMonteCarloError("survival cdf expansion needs 2^" + std::to_string(d) +
                                 " terms; use mc_cdf");
    std::vector<double> v(static_cast<std::size_t>(d));
    double total = 0.0;
    for (std::uint64_t bits = 0; bits < (1ULL << d); ++bits) {
        for (int j = 0; j < d; ++j)
            v[static_cast<std::size_t>(j)] =
                (bits >> j) & 1ULL ? 1.0 - point[static_cast<std::size_t>(j)] : 1.0;
        const int sign = (std::popcount(bits) % 2 == 0) ? 1 : -1;
        total += sign * cdf(spec, v);
    }
    return std::clamp(total, 0.0, 1.0);
}

double survival_cdf(const CopulaSpec& spec, std::span<const double> point, int max_exact_dim) {
    check_point(spec, point);
    return std::visit(
        [&](const auto& node) -> double {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, SurvivalCopula>) {
                // survival of a survival copula is the original copula
                return cdf(*node.inner, point);
            } else if constexpr (std::is_same_v<T, ConvexCombinationCopula>) {
                return node.lambda * survival_cdf(*node.first, point, max_exact_dim) +
                       (1.0 - node.lambda) * survival_cdf(*node.second, point, max_exact_dim);
            } else if constexpr (std::is_same_v<T, BlockProductCopula>) {
                double p = 1.0;
                std::vector<double> sub;
                for (const auto& b : node.blocks) {
                    sub.clear();
                    for (int ix : b.indices) sub.push_back(point[static_cast<std::size_t>(ix)]);
                    p *= survival_cdf(*b.copula, sub, max_exact_dim);
                }
                return p;
            } else {
                if (is_radially_symmetric(spec)) return cdf(spec, point);
                return survival_cdf_by_inclusion_exclusion(spec, point, max_exact_dim);
            }
        },
        spec.node());
}

McEstimate mc_cdf(const CopulaSpec& spec, std::span<const double> point, int n_samples,
                  std::uint64_t seed) {
    check_point(spec, point);
    if (n_samples < 1000) throw ValidationError("mc_cdf: n_samples must be >= 1000");
    spec.validate();
    const int d = spec.dim();
    const SamplerNode prepared(spec);
    std::vector<double> row(static_cast<std::size_t>(d));
    std::int64_t hits = 0;
    for (int i = 0; i < n_samples; ++i) {
        RngStream stream(seed, StreamPurpose::McEstimate, static_cast<std::uint64_t>(i));
        prepared.draw(stream, row);
        bool inside = true;
        for (int j = 0; j < d; ++j)
            if (row[static_cast<std::size_t>(j)] > point[static_cast<std::size_t>(j)]) {
                inside = false;
                break;
            }
        hits += inside;
    }
    const double est = static_cast<double>(hits) / n_samples;
    const double hw = 1.96 * std::sqrt(est * (1.0 - est) / n_samples);
    return McEstimate{est, hw};
}

} // namespace ampute
