#include "ampute/imputation.hpp"

#include "ampute/engine.hpp"
#include "ampute/normal.hpp"
#include "ampute/parallel.hpp"
#include "ampute/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ampute {

double complete_case_mean(const AmputedDataset& x, int column) {
    if (column < 0 || column >= x.cols())
        throw ValidationError("complete_case_mean: column out of range");
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < x.rows(); ++i) {
        bool complete = true;
        for (int j = 0; j < x.cols(); ++j)
            if (x.is_na(i, j)) {
                complete = false;
                break;
            }
        if (complete) {
            sum += x.values(i, column);
            ++count;
        }
    }
    if (count == 0) throw ValidationError("complete_case_mean: zero complete rows");
    return sum / count;
}

double available_case_mean(const AmputedDataset& x, int column) {
    if (column < 0 || column >= x.cols())
        throw ValidationError("available_case_mean: column out of range");
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < x.rows(); ++i)
        if (!x.is_na(i, column)) {
            sum += x.values(i, column);
            ++count;
        }
    if (count == 0) throw ValidationError("available_case_mean: no observed cells in the column");
    return sum / count;
}

namespace {

// Non-pivoted Cholesky solve of A b = rhs; returns the factor for reuse.
// Throws on a non-positive pivot.
Matrix cholesky(const Matrix& a) {
    const int n = a.rows();
    Matrix l(n, n, 0.0);
    for (int k = 0; k < n; ++k) {
        double pivot = a(k, k);
        for (int t = 0; t < k; ++t) pivot -= l(k, t) * l(k, t);
        if (!(pivot > 1e-12)) throw ValidationError("cholesky: singular design");
        l(k, k) = std::sqrt(pivot);
        for (int i = k + 1; i < n; ++i) {
            double s = a(i, k);
            for (int t = 0; t < k; ++t) s -= l(i, t) * l(k, t);
            l(i, k) = s / l(k, k);
        }
    }
    return l;
}

std::vector<double> solve_lower(const Matrix& l, std::vector<double> b) {
    const int n = l.rows();
    for (int i = 0; i < n; ++i) {
        for (int t = 0; t < i; ++t) b[static_cast<std::size_t>(i)] -= l(i, t) * b[static_cast<std::size_t>(t)];
        b[static_cast<std::size_t>(i)] /= l(i, i);
    }
    return b;
}

struct FitResult {
    std::vector<double> beta;
    Matrix factor;  // Cholesky factor of X'X (possibly ridged)
    double sigma2;  // residual variance estimate
};

// Least squares of column `target` on all other columns plus intercept,
// restricted to `rows`. Ridge fallback (lambda = 1e-8) on singular designs.
FitResult fit_column(const Matrix& values, const std::vector<int>& rows, int target) {
    const int d = values.cols();
    const int p = d;             // intercept + (d-1) covariates
    const int n_fit = static_cast<int>(rows.size());

    Matrix xtx(p, p, 0.0);
    std::vector<double> xty(static_cast<std::size_t>(p), 0.0);
    std::vector<double> xrow(static_cast<std::size_t>(p));
    for (int r : rows) {
        xrow[0] = 1.0;
        int c = 1;
        for (int j = 0; j < d; ++j)
            if (j != target) xrow[static_cast<std::size_t>(c++)] = values(r, j);
        const double yv = values(r, target);
        for (int a = 0; a < p; ++a) {
            xty[static_cast<std::size_t>(a)] += xrow[static_cast<std::size_t>(a)] * yv;
            for (int b = a; b < p; ++b)
                xtx(a, b) += xrow[static_cast<std::size_t>(a)] * xrow[static_cast<std::size_t>(b)];
        }
    }
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < a; ++b) xtx(a, b) = xtx(b, a);

    Matrix factor;
    try {
        factor = cholesky(xtx);
    } catch (const ValidationError&) {
        for (int a = 0; a < p; ++a) xtx(a, a) += 1e-8; // documented ridge fallback
        factor = cholesky(xtx);
    }

    // beta = (X'X)^{-1} X'y via forward/back substitution.
    std::vector<double> w = solve_lower(factor, xty);
    std::vector<double> beta(static_cast<std::size_t>(p));
    for (int i = p - 1; i >= 0; --i) {
        double s = w[static_cast<std::size_t>(i)];
        for (int t = i + 1; t < p; ++t) s -= factor(t, i) * beta[static_cast<std::size_t>(t)];
        beta[static_cast<std::size_t>(i)] = s / factor(i, i);
    }

    double rss = 0.0;
    for (int r : rows) {
        double pred = beta[0];
        int c = 1;
        for (int j = 0; j < d; ++j)
            if (j != target) pred += beta[static_cast<std::size_t>(c++)] * values(r, j);
        const double e = values(r, target) - pred;
        rss += e * e;
    }
    const int df = std::max(n_fit - p, 1);
    return FitResult{std::move(beta), std::move(factor), rss / df};
}

double predict_row(const Matrix& values, const std::vector<double>& beta, int row, int target) {
    double pred = beta[0];
    int c = 1;
    for (int j = 0; j < values.cols(); ++j)
        if (j != target) pred += beta[static_cast<std::size_t>(c++)] * values(row, j);
    return pred;
}

std::uint64_t encode_mij(int m, int iteration, int column) {
    return (static_cast<std::uint64_t>(m) << 40) |
           (static_cast<std::uint64_t>(iteration) << 20) | static_cast<std::uint64_t>(column);
}

} // namespace

std::vector<CompleteDataset> pmm_impute(const AmputedDataset& x, const PmmOptions& options,
                                        std::uint64_t seed) {
    if (options.donors < 1) throw ValidationError("pmm: donors must be >= 1");
    if (options.n_imputations < 1) throw ValidationError("pmm: n_imputations must be >= 1");
    if (options.gibbs_iterations < 0) throw ValidationError("pmm: negative iteration count");
    if (x.cols() < 2) throw ValidationError("pmm: needs at least 2 columns");

    const int n = x.rows();
    const int d = x.cols();

    std::vector<std::vector<int>> observed_rows(static_cast<std::size_t>(d));
    std::vector<int> incomplete_columns;
    std::vector<int> complete_rows;
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < n; ++i)
            if (!x.is_na(i, j)) observed_rows[static_cast<std::size_t>(j)].push_back(i);
        if (static_cast<int>(observed_rows[static_cast<std::size_t>(j)].size()) < n)
            incomplete_columns.push_back(j);
    }
    for (int i = 0; i < n; ++i) {
        bool complete = true;
        for (int j = 0; j < d; ++j)
            if (x.is_na(i, j)) {
                complete = false;
                break;
            }
        if (complete) complete_rows.push_back(i);
    }

    std::vector<CompleteDataset> result;
    result.reserve(static_cast<std::size_t>(options.n_imputations));

    if (incomplete_columns.empty()) {
        CompleteDataset full{x.columns, x.values};
        for (int m = 0; m < options.n_imputations; ++m) result.push_back(full);
        return result;
    }

    for (int j : incomplete_columns) {
        const auto obs = static_cast<int>(observed_rows[static_cast<std::size_t>(j)].size());
        if (obs == 0)
            throw ValidationError("pmm: column " + std::to_string(j + 1) + " has no observed values");
        if (obs < options.donors + 1)
            throw ValidationError("pmm: column " + std::to_string(j + 1) + " has " +
                                  std::to_string(obs) + " observed values, need at least K+1 = " +
                                  std::to_string(options.donors + 1));
    }
    if (complete_rows.empty())
        throw ValidationError("pmm: no originally-complete rows to fit regressions on");

    for (int m = 0; m < options.n_imputations; ++m) {
        Matrix values = x.values;

        // First fill-in: random draws from each column's observed values.
        RngStream fill(seed, StreamPurpose::ImputeFill, static_cast<std::uint64_t>(m));
        for (int j : incomplete_columns) {
            const auto& donors = observed_rows[static_cast<std::size_t>(j)];
            for (int i = 0; i < n; ++i)
                if (x.is_na(i, j)) {
                    const auto pick = fill.below(donors.size());
                    values(i, j) = x.values(donors[static_cast<std::size_t>(pick)], j);
                }
        }

        for (int it = 0; it < options.gibbs_iterations; ++it) {
            for (int j : incomplete_columns) {
                FitResult fit = fit_column(values, complete_rows, j);

                // Randomise coefficients: beta + sigma * solve(L', z).
                RngStream coef(seed, StreamPurpose::ImputeCoef, encode_mij(m, it, j));
                const int p = static_cast<int>(fit.beta.size());
                std::vector<double> z(static_cast<std::size_t>(p));
                for (auto& v : z) v = norm_quantile(coef.uniform());
                // back-substitution against L^T
                for (int i = p - 1; i >= 0; --i) {
                    double s = z[static_cast<std::size_t>(i)];
                    for (int t = i + 1; t < p; ++t)
                        s -= fit.factor(t, i) * z[static_cast<std::size_t>(t)];
                    z[static_cast<std::size_t>(i)] = s / fit.factor(i, i);
                }
                const double sigma = std::sqrt(fit.sigma2);
                std::vector<double> beta = fit.beta;
                for (int i = 0; i < p; ++i)
                    beta[static_cast<std::size_t>(i)] += sigma * z[static_cast<std::size_t>(i)];

                // Predictions for everyone from the current matrix.
                std::vector<double> pred(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i)
                    pred[static_cast<std::size_t>(i)] = predict_row(values, beta, i, j);

                const auto& donors = observed_rows[static_cast<std::size_t>(j)];
                RngStream pickstream(seed, StreamPurpose::ImputeDonor, encode_mij(m, it, j));
                std::vector<std::pair<double, int>> dist(donors.size());
                for (int i = 0; i < n; ++i) {
                    if (!x.is_na(i, j)) continue;
                    for (std::size_t t = 0; t < donors.size(); ++t) {
                        const int r = donors[t];
                        dist[t] = {std::abs(pred[static_cast<std::size_t>(r)] -
                                            pred[static_cast<std::size_t>(i)]),
                                   r};
                    }
                    const auto kth = dist.begin() + options.donors;
                    std::partial_sort(dist.begin(), kth, dist.end());
                    const double u = pickstream.uniform();
                    auto idx = static_cast<int>(std::ceil(options.donors * u)) - 1;
                    idx = std::clamp(idx, 0, options.donors - 1);
                    values(i, j) = x.values(dist[static_cast<std::size_t>(idx)].second, j);
                }
            }
        }
        result.push_back(CompleteDataset{x.columns, std::move(values)});
    }
    return result;
}

namespace {

double quantile_type7(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - std::floor(h)) * (v[hi] - v[lo]);
}

double column_mean(const Matrix& values, int column) {
    double s = 0.0;
    for (int i = 0; i < values.rows(); ++i) s += values(i, column);
    return s / values.rows();
}

} // namespace

BiasStudyResult run_bias_study(const BiasStudyConfig& cfg) {
    cfg.data.validate();
    if (cfg.target_column < 0 || cfg.target_column >= cfg.data.cols())
        throw ValidationError("bias study: target column out of range");
    if (cfg.replications < 1) throw ValidationError("bias study: replications must be >= 1");
    if (cfg.mechanisms.empty()) throw ValidationError("bias study: no mechanisms");

    BiasStudyResult out;
    out.complete_data_mean = column_mean(cfg.data.values, cfg.target_column);

    const int arms = static_cast<int>(cfg.mechanisms.size());
    const int total = arms * cfg.replications;
    out.samples.resize(static_cast<std::size_t>(total));
    std::vector<std::int64_t> violations(static_cast<std::size_t>(arms), 0);
    std::vector<std::int64_t> violation_buf(static_cast<std::size_t>(total), 0);

    // Donor membership check: observed values per column of the *original*
    // data; every imputed value must be one of them.
    parallel_for(total, cfg.threads, [&](int begin, int end) {
        for (int t = begin; t < end; ++t) {
            const int a = t / cfg.replications;
            const int r = t % cfg.replications;
            const auto& arm = cfg.mechanisms[static_cast<std::size_t>(a)];
            const std::uint64_t rep_seed = RngStream::derive(
                cfg.seed, static_cast<std::uint64_t>(StreamPurpose::Replication),
                (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(r));

            BiasSample& s = out.samples[static_cast<std::size_t>(t)];
            s.mechanism = arm.label;
            s.replication = r;
            try {
                const auto amputed =
                    ampute_mechanism(cfg.data, arm.model, arm.copula, rep_seed, 1);
                double estimate;
                if (cfg.estimator == Estimator::CompleteCase) {
                    estimate = complete_case_mean(amputed.data, cfg.target_column);
                } else if (cfg.estimator == Estimator::AvailableCase) {
                    estimate = available_case_mean(amputed.data, cfg.target_column);
                } else {
                    const auto imputed = pmm_impute(amputed.data, cfg.pmm, rep_seed);
                    double acc = 0.0;
                    for (const auto& ds : imputed) acc += column_mean(ds.values, cfg.target_column);
                    estimate = acc / static_cast<double>(imputed.size());

                    std::int64_t bad = 0;
                    for (int j = 0; j < cfg.data.cols(); ++j) {
                        std::set<double> observed;
                        for (int i = 0; i < cfg.data.rows(); ++i)
                            if (!amputed.data.is_na(i, j)) observed.insert(cfg.data.values(i, j));
                        for (const auto& ds : imputed)
                            for (int i = 0; i < cfg.data.rows(); ++i)
                                if (amputed.data.is_na(i, j) && !observed.count(ds.values(i, j)))
                                    ++bad;
                    }
                    violation_buf[static_cast<std::size_t>(t)] = bad;
                }
                s.estimate = estimate;
                s.bias = estimate - out.complete_data_mean;
            } catch (const ValidationError& err) {
                s.failed = true;
                s.failure = err.what();
            }
        }
    });

    for (int t = 0; t < total; ++t)
        violations[static_cast<std::size_t>(t / cfg.replications)] +=
            violation_buf[static_cast<std::size_t>(t)];

    for (int a = 0; a < arms; ++a) {
        MechanismSummary sum;
        sum.mechanism = cfg.mechanisms[static_cast<std::size_t>(a)].label;
        sum.donor_violations = violations[static_cast<std::size_t>(a)];
        std::vector<double> biases;
        for (int r = 0; r < cfg.replications; ++r) {
            const auto& s = out.samples[static_cast<std::size_t>(a * cfg.replications + r)];
            if (s.failed)
                ++sum.n_failed;
            else {
                ++sum.n_ok;
                biases.push_back(s.bias);
            }
        }
        if (!biases.empty()) {
            double acc = 0.0;
            for (double b : biases) acc += b;
            sum.mean_bias = acc / static_cast<double>(biases.size());
            sum.q1 = quantile_type7(biases, 0.25);
            sum.median = quantile_type7(biases, 0.5);
            sum.q3 = quantile_type7(biases, 0.75);
        }
        out.summary.push_back(std::move(sum));
    }
    return out;
}

} // namespace ampute
