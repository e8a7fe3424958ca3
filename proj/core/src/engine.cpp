#include "ampute/engine.hpp"

#include "ampute/normal.hpp"
#include "ampute/parallel.hpp"

#include <cmath>
#include <limits>

namespace ampute {

namespace {

constexpr double kNa = std::numeric_limits<double>::quiet_NaN();

void check_shapes(const CompleteDataset& y, const MissProbMatrix& p) {
    y.validate();
    if (p.rows() != y.rows() || p.cols() != y.cols())
        throw ValidationError("amputation: probability matrix shape " + std::to_string(p.rows()) +
                              "x" + std::to_string(p.cols()) + " does not match dataset " +
                              std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
}

bool should_flip(const CopulaSpec& spec, SurvivalHandling mode) {
    switch (mode) {
    case SurvivalHandling::ForceFlip: return true;
    case SurvivalHandling::ForceSkip: return false;
    case SurvivalHandling::Auto:
    default: return !is_radially_symmetric(spec);
    }
}

} // namespace

AmputedDataset apply_mask(const CompleteDataset& y, const MaskMatrix& mask) {
    y.validate();
    if (mask.rows() != y.rows() || mask.cols() != y.cols())
        throw ValidationError("apply_mask: mask shape does not match dataset");
    AmputedDataset x;
    x.columns = y.columns;
    x.values = y.values;
    x.mask = mask;
    for (int i = 0; i < y.rows(); ++i)
        for (int j = 0; j < y.cols(); ++j)
            if (mask(i, j)) x.values(i, j) = kNa;
    return x;
}

AmputeResult ampute_rows_iid(const CompleteDataset& y, const MissProbMatrix& p,
                             const CopulaSpec& row_copula, std::uint64_t seed, int threads,
                             SurvivalHandling survival) {
    check_shapes(y, p);
    if (row_copula.dim() != y.cols())
        throw ValidationError("ampute_rows_iid: row copula dimension " +
                              std::to_string(row_copula.dim()) + " does not match " +
                              std::to_string(y.cols()) + " columns");
    const PreparedCopulaSampler sampler(row_copula);
    const bool flip = should_flip(row_copula, survival);
    const int d = y.cols();

    MaskMatrix mask(y.rows(), d);
    parallel_for(y.rows(), threads, [&](int begin, int end) {
        std::vector<double> u(static_cast<std::size_t>(d));
        for (int i = begin; i < end; ++i) {
            RngStream stream(seed, StreamPurpose::RowSample, static_cast<std::uint64_t>(i));
            sampler.draw(stream, u);
            for (int j = 0; j < d; ++j) {
                const double v = flip ? 1.0 - u[static_cast<std::size_t>(j)]
                                      : u[static_cast<std::size_t>(j)];
                mask(i, j) = v <= p(i, j) ? 1 : 0;
            }
        }
    });
    return AmputeResult{mask, apply_mask(y, mask)};
}

AmputeResult ampute_rows_independent(const CompleteDataset& y, const MissProbMatrix& p,
                                     const std::vector<CopulaSpec>& row_copulas,
                                     std::uint64_t seed, int threads,
                                     SurvivalHandling survival) {
    check_shapes(y, p);
    if (static_cast<int>(row_copulas.size()) != y.rows())
        throw ValidationError("ampute_rows_independent: expected one copula per row (" +
                              std::to_string(y.rows()) + "), got " +
                              std::to_string(row_copulas.size()));
    const int d = y.cols();
    std::vector<PreparedCopulaSampler> samplers;
    std::vector<char> flips;
    samplers.reserve(row_copulas.size());
    for (const auto& c : row_copulas) {
        if (c.dim() != d)
            throw ValidationError("ampute_rows_independent: every row copula must have dimension " +
                                  std::to_string(d));
        samplers.emplace_back(c);
        flips.push_back(should_flip(c, survival));
    }

    MaskMatrix mask(y.rows(), d);
    parallel_for(y.rows(), threads, [&](int begin, int end) {
        std::vector<double> u(static_cast<std::size_t>(d));
        for (int i = begin; i < end; ++i) {
            RngStream stream(seed, StreamPurpose::RowSample, static_cast<std::uint64_t>(i));
            samplers[static_cast<std::size_t>(i)].draw(stream, u);
            for (int j = 0; j < d; ++j) {
                const double v = flips[static_cast<std::size_t>(i)]
                                     ? 1.0 - u[static_cast<std::size_t>(j)]
                                     : u[static_cast<std::size_t>(j)];
                mask(i, j) = v <= p(i, j) ? 1 : 0;
            }
        }
    });
    return AmputeResult{mask, apply_mask(y, mask)};
}

void CellSetGroupSpec::validate(int n_rows, int n_cols) const {
    if (groups.empty()) throw ValidationError("cell sets: needs at least one group");
    if (cross_copula.dim() != static_cast<int>(groups.size()))
        throw ValidationError("cell sets: cross copula dimension must equal the group count " +
                              std::to_string(groups.size()));
    cross_copula.validate();
    if (!(default_p >= 0.0 && default_p <= 1.0))
        throw ValidationError("cell sets: default_p must lie in [0,1]");
    std::vector<char> seen(static_cast<std::size_t>(n_rows) * n_cols, 0);
    for (const auto& g : groups) {
        if (!(g.prob >= 0.0 && g.prob <= 1.0))
            throw ValidationError("cell sets: group probability must lie in [0,1]");
        if (g.cells.empty()) throw ValidationError("cell sets: group has no cells");
        for (auto [i, j] : g.cells) {
            if (i < 0 || i >= n_rows || j < 0 || j >= n_cols)
                throw ValidationError("cell sets: cell (" + std::to_string(i + 1) + "," +
                                      std::to_string(j + 1) + ") outside the dataset");
            auto& flag = seen[static_cast<std::size_t>(i) * n_cols + j];
            if (flag)
                throw ValidationError("cell sets: cell (" + std::to_string(i + 1) + "," +
                                      std::to_string(j + 1) + ") appears in two groups");
            flag = 1;
        }
    }
}

AmputeResult ampute_cell_sets(const CompleteDataset& y, const CellSetGroupSpec& spec,
                              std::uint64_t seed, SurvivalHandling survival) {
    y.validate();
    spec.validate(y.rows(), y.cols());
    const int k = static_cast<int>(spec.groups.size());

    // One shared uniform per group, coupled by the (survival-adjusted) cross
    // copula; this is the stochastic representation of within-set comonotone
    // cells without materializing an (n*d)-dimensional copula.
    std::vector<double> v(static_cast<std::size_t>(k));
    RngStream group_stream(seed, StreamPurpose::GroupDraw, 0);
    sample_row(spec.cross_copula, group_stream, v);
    if (should_flip(spec.cross_copula, survival))
        for (auto& u : v) u = 1.0 - u;

    const int d = y.cols();
    MaskMatrix mask(y.rows(), d);

    std::vector<char> grouped(static_cast<std::size_t>(y.rows()) * d, 0);
    for (int g = 0; g < k; ++g) {
        const std::uint8_t bit = v[static_cast<std::size_t>(g)] <= spec.groups[g].prob ? 1 : 0;
        for (auto [i, j] : spec.groups[g].cells) {
            mask(i, j) = bit;
            grouped[static_cast<std::size_t>(i) * d + j] = 1;
        }
    }

    for (int i = 0; i < y.rows(); ++i) {
        RngStream cell_stream(seed, StreamPurpose::CellFill, static_cast<std::uint64_t>(i));
        for (int j = 0; j < d; ++j) {
            if (grouped[static_cast<std::size_t>(i) * d + j]) continue;
            mask(i, j) = cell_stream.uniform() <= spec.default_p ? 1 : 0;
        }
    }
    return AmputeResult{mask, apply_mask(y, mask)};
}

void MonotoneMixtureSpec::validate(int n_rows) const {
    if (!(miss_row_prob >= 0.0 && miss_row_prob <= 1.0))
        throw ValidationError("monotone mixture: miss_row_prob must lie in [0,1]");
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw ValidationError("monotone mixture: alpha and beta must be positive");
    if (row_dependence.dim() != n_rows)
        throw ValidationError("monotone mixture: row dependence copula must have dimension " +
                              std::to_string(n_rows) + " (one per row)");
    row_dependence.validate();
}

AmputeResult ampute_monotone_mixture(const CompleteDataset& y, const MonotoneMixtureSpec& spec,
                                     std::uint64_t seed) {
    y.validate();
    spec.validate(y.rows());
    const int n = y.rows();
    const int d = y.cols();

    std::vector<double> u(static_cast<std::size_t>(n));
    RngStream row_stream(seed, StreamPurpose::GroupDraw, 0);
    sample_row(spec.row_dependence, row_stream, u);

    MaskMatrix mask(n, d);
    for (int i = 0; i < n; ++i) {
        RngStream selector(seed, StreamPurpose::MixtureSelector, static_cast<std::uint64_t>(i));
        int cutoff = d; // complete row
        if (selector.uniform() <= spec.miss_row_prob) {
            const double q = beta_quantile(spec.alpha, spec.beta, u[static_cast<std::size_t>(i)]);
            cutoff = static_cast<int>(std::ceil(d * q)) - 1; // in {0, ..., d-1}
            if (cutoff < 0) cutoff = 0;
            if (cutoff > d - 1) cutoff = d - 1;
        }
        for (int j = 0; j < d; ++j) mask(i, j) = (j + 1) > cutoff ? 1 : 0;
    }
    return AmputeResult{mask, apply_mask(y, mask)};
}

MechanismAmputeResult ampute_mechanism(const CompleteDataset& y, const LogisticMissModel& model,
                                       const CopulaSpec& row_copula, std::uint64_t seed,
                                       int threads) {
    MissProbMatrix probs = compute_probs(model, y);
    AmputeResult r = ampute_rows_iid(y, probs, row_copula, seed, threads);
    return MechanismAmputeResult{std::move(r.mask), std::move(r.data), std::move(probs)};
}

} // namespace ampute
