#include "ampute/imputation.hpp"

#include "ampute/engine.hpp"
#include "doctest.h"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace ampute;

TEST_CASE("complete-case mean") {
    // 5-row fixture; masking the rows with the 2 largest target values leaves
    // the mean of the remaining three: (1 + 2 + 3) / 3 = 2.
    CompleteDataset y;
    y.columns = {"t", "u"};
    y.values = Matrix(5, 2);
    for (int i = 0; i < 5; ++i) {
        y.values(i, 0) = i + 1.0; // 1..5
        y.values(i, 1) = 0.0;
    }
    MaskMatrix none(5, 2, 0);
    CHECK(complete_case_mean(apply_mask(y, none), 0) == doctest::Approx(3.0));

    MaskMatrix two_largest(5, 2, 0);
    two_largest(3, 1) = 1;
    two_largest(4, 0) = 1;
    CHECK(complete_case_mean(apply_mask(y, two_largest), 0) == doctest::Approx(2.0));

    MaskMatrix all_but_one(5, 2, 1);
    all_but_one(2, 0) = all_but_one(2, 1) = 0;
    CHECK(complete_case_mean(apply_mask(y, all_but_one), 0) == doctest::Approx(3.0));

    MaskMatrix everything(5, 2, 1);
    CHECK_THROWS_AS(complete_case_mean(apply_mask(y, everything), 0), ValidationError);
}

TEST_CASE("complete-case mean equals a brute-force row filter on comonotone masks") {
    const auto y = support::toy_dataset(40, 5);
    const MissProbMatrix p(40, 5, 0.4);
    const auto r = ampute_rows_iid(y, p, CopulaSpec::comonotone(5), 17);
    double sum = 0.0;
    int n = 0;
    for (int i = 0; i < 40; ++i)
        if (!r.mask(i, 0)) { // row-comonotone: cell 0 decides the whole row
            sum += y.values(i, 2);
            ++n;
        }
    REQUIRE(n > 0);
    CHECK(complete_case_mean(r.data, 2) == doctest::Approx(sum / n).epsilon(1e-15));
}

TEST_CASE("pmm returns m identical copies when nothing is missing") {
    const auto y = support::toy_dataset(12, 3);
    MaskMatrix none(12, 3, 0);
    const auto out = pmm_impute(apply_mask(y, none), PmmOptions{3, 4, 2}, 5);
    CHECK(out.size() == 4);
    for (const auto& ds : out) CHECK(ds.values == y.values);
}

TEST_CASE("pmm imputes only originally observed values of each column") {
    const auto y = support::toy_dataset(60, 4);
    const MissProbMatrix p(60, 4, 0.2);
    const auto r = ampute_rows_iid(y, p, CopulaSpec::independence(4), 23);
    const auto out = pmm_impute(r.data, PmmOptions{5, 3, 5}, 99);
    for (const auto& ds : out) {
        for (int j = 0; j < 4; ++j) {
            std::set<double> observed;
            for (int i = 0; i < 60; ++i)
                if (!r.data.is_na(i, j)) observed.insert(y.values(i, j));
            for (int i = 0; i < 60; ++i)
                if (r.data.is_na(i, j)) CHECK(observed.count(ds.values(i, j)) == 1);
        }
    }
}

TEST_CASE("pmm with an exact linear relation matches brute-force nearest matching") {
    // y2 = y1 exactly; the regression fit is perfect, so predictions reduce to
    // y1 and the K = 1 donor is the observed row with nearest y1.
    const int n = 50;
    CompleteDataset y;
    y.columns = {"a", "b"};
    y.values = Matrix(n, 2);
    RngStream rng(3, StreamPurpose::RowSample, 50);
    for (int i = 0; i < n; ++i) y.values(i, 0) = y.values(i, 1) = rng.uniform();

    MaskMatrix holes(n, 2, 0);
    for (int i = 0; i < n; i += 10) holes(i, 1) = 1; // 10% holes in column 2
    const auto x = apply_mask(y, holes);
    const auto out = pmm_impute(x, PmmOptions{1, 1, 3}, 7);
    REQUIRE(out.size() == 1);

    double worst_gap = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!holes(i, 1)) continue;
        // brute-force oracle: nearest observed y1, ties to the lowest row
        int best = -1;
        double best_dist = 1e300;
        for (int r = 0; r < n; ++r) {
            if (holes(r, 1)) continue;
            const double dist = std::abs(y.values(r, 0) - y.values(i, 0));
            if (dist < best_dist) {
                best_dist = dist;
                best = r;
            }
        }
        CHECK(out[0].values(i, 1) == y.values(best, 1));
        worst_gap = std::max(worst_gap, best_dist);
    }
    // imputation error bounded by the nearest-neighbor spacing
    double mae = 0.0;
    int holes_n = 0;
    for (int i = 0; i < n; ++i)
        if (holes(i, 1)) {
            mae += std::abs(out[0].values(i, 1) - y.values(i, 1));
            ++holes_n;
        }
    CHECK(mae / holes_n <= worst_gap + 1e-12);
}

TEST_CASE("coefficient randomisation makes the m imputations differ") {
    const int n = 60;
    CompleteDataset y;
    y.columns = {"a", "b", "c"};
    y.values = Matrix(n, 3);
    RngStream rng(5, StreamPurpose::RowSample, 51);
    for (int i = 0; i < n; ++i) {
        y.values(i, 0) = rng.uniform();
        y.values(i, 1) = y.values(i, 0) + 0.3 * rng.uniform(); // noisy relation
        y.values(i, 2) = rng.uniform();
    }
    const MissProbMatrix p(n, 3, 0.25);
    const auto r = ampute_rows_iid(y, p, CopulaSpec::independence(3), 31);
    const auto out = pmm_impute(r.data, PmmOptions{5, 5, 5}, 8);
    std::set<std::vector<double>> distinct;
    for (const auto& ds : out) distinct.insert(ds.values.data());
    CHECK(distinct.size() > 1);
}

TEST_CASE("pmm input validation") {
    const auto y = support::toy_dataset(10, 2);
    MaskMatrix heavy(10, 2, 0);
    for (int i = 0; i < 7; ++i) heavy(i, 1) = 1; // 3 observed < K + 1 = 6
    CHECK_THROWS_AS(pmm_impute(apply_mask(y, heavy), PmmOptions{5, 1, 1}, 1), ValidationError);

    MaskMatrix empty_col(10, 2, 0);
    for (int i = 0; i < 10; ++i) empty_col(i, 1) = 1;
    CHECK_THROWS_AS(pmm_impute(apply_mask(y, empty_col), PmmOptions{2, 1, 1}, 1), ValidationError);

    // no complete rows at all
    MaskMatrix diag(10, 2, 0);
    for (int i = 0; i < 10; ++i) diag(i, i % 2) = 1;
    CHECK_THROWS_AS(pmm_impute(apply_mask(y, diag), PmmOptions{2, 1, 1}, 1), ValidationError);
}

TEST_CASE("bias study: zero missingness gives exactly zero bias") {
    BiasStudyConfig cfg;
    cfg.data = support::toy_dataset(20, 3);
    cfg.target_column = 1;
    cfg.replications = 10;
    cfg.mechanisms.push_back({"none", presets::mcar(3, 0.0), CopulaSpec::independence(3)});
    cfg.seed = 77;
    const auto res = run_bias_study(cfg);
    CHECK(res.summary.size() == 1);
    CHECK(res.summary[0].n_failed == 0);
    for (const auto& s : res.samples) CHECK(s.bias == 0.0);
}

TEST_CASE("bias study: complete-case MCAR is unbiased, failures recorded not dropped") {
    BiasStudyConfig cfg;
    cfg.data = support::toy_dataset(32, 6);
    cfg.target_column = 2;
    cfg.replications = 60;
    cfg.mechanisms.push_back({"mcar", presets::mcar(6, 1.0 / 3.0), CopulaSpec::comonotone(6)});
    cfg.mechanisms.push_back(
        {"always", presets::mcar(6, 1.0), CopulaSpec::comonotone(6)}); // never a complete case
    cfg.seed = 42;
    const auto res = run_bias_study(cfg);
    CHECK(res.summary[0].n_failed == 0);
    CHECK(std::abs(res.summary[0].mean_bias) < 0.05);
    CHECK(res.summary[1].n_failed == 60);
    CHECK(res.summary[1].n_ok == 0);
    CHECK(static_cast<int>(res.samples.size()) == 120);
}

TEST_CASE("bias study runs the pmm estimator with zero donor violations") {
    BiasStudyConfig cfg;
    cfg.data = support::toy_dataset(32, 4);
    cfg.target_column = 0;
    cfg.replications = 8;
    cfg.estimator = Estimator::PmmMice;
    cfg.pmm = PmmOptions{3, 2, 2};
    cfg.mechanisms.push_back({"mcar", presets::mcar(4, 0.25), CopulaSpec::comonotone(4)});
    cfg.seed = 9;
    const auto res = run_bias_study(cfg);
    CHECK(res.summary[0].donor_violations == 0);
    CHECK(res.summary[0].n_ok + res.summary[0].n_failed == 8);
    CHECK(res.summary[0].n_ok > 0);
}

TEST_CASE("bias study is deterministic for any thread count") {
    BiasStudyConfig cfg;
    cfg.data = support::toy_dataset(24, 4);
    cfg.target_column = 3;
    cfg.replications = 20;
    cfg.mechanisms.push_back({"mcar", presets::mcar(4, 0.3), CopulaSpec::comonotone(4)});
    cfg.mechanisms.push_back(
        {"mnar", presets::mnar_suicide(4, 0.5, 0.45, 0.0, 1.0), CopulaSpec::comonotone(4)});
    cfg.seed = 2025;

    auto run = [&](int threads) {
        cfg.threads = threads;
        return run_bias_study(cfg);
    };
    const auto a = run(1);
    const auto b = run(4);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].bias == b.samples[i].bias);
        CHECK(a.samples[i].failed == b.samples[i].failed);
    }
    const auto c = run(1);
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        CHECK(a.samples[i].estimate == c.samples[i].estimate);
}
