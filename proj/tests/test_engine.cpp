#include "ampute/engine.hpp"

#include "ampute/analytics.hpp"
#include "doctest.h"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace ampute;

namespace {

double row_missing_fraction(const MaskMatrix& m) {
    int full = 0;
    for (int i = 0; i < m.rows(); ++i) {
        bool all = true;
        for (int j = 0; j < m.cols(); ++j)
            if (!m(i, j)) {
                all = false;
                break;
            }
        full += all;
    }
    return static_cast<double>(full) / m.rows();
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    const auto rank = [](const std::vector<double>& v) {
        std::vector<int> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            return v[static_cast<std::size_t>(a)] < v[static_cast<std::size_t>(b)];
        });
        std::vector<double> r(v.size());
        for (std::size_t t = 0; t < idx.size(); ++t)
            r[static_cast<std::size_t>(idx[t])] = static_cast<double>(t);
        return r;
    };
    const auto rx = rank(x), ry = rank(y);
    double mx = 0, my = 0;
    for (std::size_t t = 0; t < rx.size(); ++t) {
        mx += rx[t];
        my += ry[t];
    }
    mx /= static_cast<double>(rx.size());
    my /= static_cast<double>(ry.size());
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t t = 0; t < rx.size(); ++t) {
        sxx += (rx[t] - mx) * (rx[t] - mx);
        syy += (ry[t] - my) * (ry[t] - my);
        sxy += (rx[t] - mx) * (ry[t] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

TEST_CASE("apply_mask couples NA cells to the mask exactly") {
    const auto y = support::toy_dataset(2, 2);
    MaskMatrix m(2, 2, 0);
    m(0, 1) = 1;
    const auto x = apply_mask(y, m);
    CHECK(!x.is_na(0, 0));
    CHECK(x.is_na(0, 1));
    CHECK(std::isnan(x.values(0, 1)));
    CHECK(x.values(1, 0) == y.values(1, 0));

    MaskMatrix all1(2, 2, 1), all0(2, 2, 0);
    const auto everything = apply_mask(y, all1);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(everything.is_na(i, j));
    const auto nothing = apply_mask(y, all0);
    CHECK(nothing.values == y.values);
}

TEST_CASE("degenerate probabilities produce deterministic masks for any copula") {
    const auto y = support::toy_dataset(8, 4);
    // random 0/1 probability matrix
    Matrix pv(8, 4);
    RngStream rng(5, StreamPurpose::RowSample, 77);
    for (auto& v : pv.data()) v = rng.below(2) ? 1.0 : 0.0;
    const MissProbMatrix p(pv);

    const auto a = ampute_rows_iid(y, p, CopulaSpec::independence(4), 1).mask;
    const auto b = ampute_rows_iid(y, p, CopulaSpec::comonotone(4), 999).mask;
    const auto c = ampute_rows_iid(y, p, CopulaSpec::homogeneous_gauss(0.5, 4), 123).mask;
    CHECK(a == b);
    CHECK(a == c);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 4; ++j) CHECK(a(i, j) == (pv(i, j) == 1.0 ? 1 : 0));
}

TEST_CASE("comonotone rows are entirely missing or entirely complete") {
    const auto y = support::toy_dataset(30000, 11);
    const MissProbMatrix p(y.rows(), y.cols(), 1.0 / 3.0);
    const auto r = ampute_rows_iid(y, p, CopulaSpec::comonotone(11), 7);
    for (int i = 0; i < y.rows(); ++i) {
        int count = 0;
        for (int j = 0; j < y.cols(); ++j) count += r.mask(i, j);
        CHECK((count == 0 || count == 11));
    }
    CHECK(row_missing_fraction(r.mask) == doctest::Approx(1.0 / 3.0).epsilon(0.03));
}

TEST_CASE("marginal law: cell frequencies match p within binomial tolerance") {
    const int reps = 20000;
    const auto y = support::toy_dataset(reps, 3);
    Matrix pv(reps, 3);
    for (int i = 0; i < reps; ++i) {
        pv(i, 0) = 0.1;
        pv(i, 1) = 0.5;
        pv(i, 2) = 0.9;
    }
    const auto r =
        ampute_rows_iid(y, MissProbMatrix(pv), CopulaSpec::homogeneous_gauss(0.7181, 3), 21);
    for (int j = 0; j < 3; ++j) {
        double freq = 0;
        for (int i = 0; i < reps; ++i) freq += r.mask(i, j);
        freq /= reps;
        const double p = pv(0, j);
        CHECK(std::abs(freq - p) <= 4.0 * std::sqrt(p * (1.0 - p) / reps));
    }
}

TEST_CASE("joint law within a row matches the analytic survival value") {
    const int reps = 100000;
    const auto y = support::toy_dataset(reps, 2);
    const MissProbMatrix p(reps, 2, 0.4);
    for (const auto& spec :
         {CopulaSpec::independence(2), CopulaSpec::comonotone(2), CopulaSpec::countermonotone(),
          CopulaSpec::homogeneous_gauss(0.7181, 2)}) {
        const auto r = ampute_rows_iid(y, p, spec, 31);
        const auto est = empirical_joint_prob_rows(r.mask, std::vector<int>{0, 1});
        const double analytic = joint_missingness_prob(spec, std::vector{0.4, 0.4});
        CHECK(std::abs(est.estimate - analytic) <= std::max(4.0 * est.half_width_95, 1e-9));
    }
}

TEST_CASE("forced survival flip is distributionally identical for symmetric copulas") {
    const int reps = 200000;
    const auto y = support::toy_dataset(reps, 2);
    const MissProbMatrix p(reps, 2, 0.3);
    const auto spec = CopulaSpec::homogeneous_gauss(0.7181, 2);
    const auto flipped = ampute_rows_iid(y, p, spec, 11, 1, SurvivalHandling::ForceFlip);
    const auto skipped = ampute_rows_iid(y, p, spec, 12, 1, SurvivalHandling::ForceSkip);

    const auto ef = empirical_joint_prob_rows(flipped.mask, std::vector<int>{0, 1});
    const auto es = empirical_joint_prob_rows(skipped.mask, std::vector<int>{0, 1});
    CHECK(std::abs(ef.estimate - es.estimate) <=
          2.0 * std::sqrt(ef.half_width_95 * ef.half_width_95 +
                          es.half_width_95 * es.half_width_95));
    double f1 = 0, s1 = 0;
    for (int i = 0; i < reps; ++i) {
        f1 += flipped.mask(i, 0);
        s1 += skipped.mask(i, 0);
    }
    CHECK(std::abs(f1 - s1) / reps < 0.01);
}

TEST_CASE("per-row copulas: comonotone row is all-or-none, independent row is not") {
    const auto y = support::toy_dataset(2, 4);
    const MissProbMatrix p(2, 4, 0.5);
    const std::vector<CopulaSpec> rows = {CopulaSpec::comonotone(4), CopulaSpec::independence(4)};
    int row1_partial = 0;
    int row2_partial = 0;
    for (int rep = 0; rep < 2000; ++rep) {
        const auto r =
            ampute_rows_independent(y, p, rows, static_cast<std::uint64_t>(rep));
        int c1 = 0, c2 = 0;
        for (int j = 0; j < 4; ++j) {
            c1 += r.mask(0, j);
            c2 += r.mask(1, j);
        }
        row1_partial += (c1 != 0 && c1 != 4);
        row2_partial += (c2 != 0 && c2 != 4);
    }
    CHECK(row1_partial == 0);
    CHECK(row2_partial > 1000); // 1 - 2 (1/2)^4 = 7/8 of draws are partial
}

TEST_CASE("ampute_rows_independent equals ampute_rows_iid when all rows share the copula") {
    const auto y = support::toy_dataset(50, 3);
    const MissProbMatrix p(50, 3, 0.4);
    const auto spec = CopulaSpec::homogeneous_gauss(0.3, 3);
    const auto a = ampute_rows_iid(y, p, spec, 91);
    const auto b = ampute_rows_independent(y, p, std::vector<CopulaSpec>(50, spec), 91);
    CHECK(a.mask == b.mask); // same per-row streams, same copula
}

TEST_CASE("cell-set groups: within-set comonotone, deterministic blocks") {
    const auto y = support::toy_dataset(10, 5);
    CellSetGroupSpec spec{
        {{{{0, 0}, {1, 0}, {2, 0}}, 1.0}, {{{3, 1}, {4, 1}, {5, 2}}, 0.5}, {{{6, 3}}, 0.0}},
        CopulaSpec::independence(3),
        0.0};
    int joint = 0;
    const int reps = 4000;
    for (int rep = 0; rep < reps; ++rep) {
        const auto r = ampute_cell_sets(y, spec, static_cast<std::uint64_t>(rep));
        // group 1 (p = 1) always masked
        CHECK(r.mask(0, 0) == 1);
        CHECK(r.mask(1, 0) == 1);
        CHECK(r.mask(2, 0) == 1);
        // group 2 cells move together
        CHECK(r.mask(3, 1) == r.mask(4, 1));
        CHECK(r.mask(3, 1) == r.mask(5, 2));
        joint += r.mask(3, 1);
        // group 3 (p = 0) never masked, ungrouped cells at default_p = 0
        CHECK(r.mask(6, 3) == 0);
        CHECK(r.mask(9, 4) == 0);
    }
    CHECK(static_cast<double>(joint) / reps == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("cell-set validation rejects overlap and bad cells") {
    const auto y = support::toy_dataset(4, 3);
    CellSetGroupSpec overlap{{{{{0, 0}}, 0.5}, {{{0, 0}}, 0.5}}, CopulaSpec::independence(2), 0.0};
    CHECK_THROWS_AS(ampute_cell_sets(y, overlap, 1), ValidationError);
    CellSetGroupSpec outside{{{{{9, 0}}, 0.5}}, CopulaSpec::independence(1), 0.0};
    CHECK_THROWS_AS(ampute_cell_sets(y, outside, 1), ValidationError);
    CellSetGroupSpec wrong_dim{{{{{0, 0}}, 0.5}}, CopulaSpec::independence(2), 0.0};
    CHECK_THROWS_AS(ampute_cell_sets(y, wrong_dim, 1), ValidationError);
}

TEST_CASE("countermonotone cross-copula masks exactly one of two groups") {
    const auto y = support::toy_dataset(6, 4);
    CellSetGroupSpec spec{{{{{0, 0}, {1, 0}}, 0.5}, {{{0, 3}, {1, 3}}, 0.5}},
                          CopulaSpec::countermonotone(),
                          0.0};
    for (int rep = 0; rep < 500; ++rep) {
        const auto r = ampute_cell_sets(y, spec, static_cast<std::uint64_t>(rep));
        CHECK(r.mask(0, 0) + r.mask(0, 3) == 1);
    }
}

TEST_CASE("monotone mixture masks are monotone and mix at the right rate") {
    const auto y = support::toy_dataset(32, 11);
    MonotoneMixtureSpec spec{1.0 / 3.0, 1.0, 1.0, CopulaSpec::independence(32)};
    int complete = 0, total = 0;
    for (int rep = 0; rep < 3000; ++rep) {
        const auto r = ampute_monotone_mixture(y, spec, static_cast<std::uint64_t>(rep));
        for (int i = 0; i < 32; ++i) {
            for (int j = 1; j < 11; ++j)
                CHECK(r.mask(i, j) >= r.mask(i, j - 1)); // nondecreasing left to right
            bool none = true;
            for (int j = 0; j < 11; ++j)
                if (r.mask(i, j)) none = false;
            complete += none;
            ++total;
        }
    }
    CHECK(static_cast<double>(complete) / total == doctest::Approx(2.0 / 3.0).epsilon(0.02));
}

TEST_CASE("comonotone row dependence shares one cutoff among incomplete rows") {
    const auto y = support::toy_dataset(32, 11);
    MonotoneMixtureSpec spec{1.0 / 3.0, 4.0, 1.0, CopulaSpec::comonotone(32)};
    int late = 0, incomplete_rows = 0;
    for (int rep = 0; rep < 300; ++rep) {
        const auto r = ampute_monotone_mixture(y, spec, static_cast<std::uint64_t>(rep));
        int shared_first = -1;
        for (int i = 0; i < 32; ++i) {
            int first = 11;
            for (int j = 0; j < 11; ++j)
                if (r.mask(i, j)) {
                    first = j;
                    break;
                }
            if (first == 11) continue; // complete row
            ++incomplete_rows;
            if (shared_first < 0) shared_first = first;
            CHECK(first == shared_first);
            late += first >= 6; // Beta(4,1) puts the cutoff late
        }
    }
    CHECK(incomplete_rows > 0);
    CHECK(static_cast<double>(late) / incomplete_rows > 0.5);
}

TEST_CASE("mechanism amputation: MCAR overall fraction near p") {
    const auto y = support::toy_dataset(64, 11);
    const auto model = presets::mcar(11, 1.0 / 3.0);
    double fraction = 0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        const auto r = ampute_mechanism(y, model, CopulaSpec::independence(11),
                                        static_cast<std::uint64_t>(rep));
        fraction += static_cast<double>(count_missing(r.mask)) / (64.0 * 11.0);
        for (double v : r.probs.values.data()) CHECK(v == doctest::Approx(1.0 / 3.0));
    }
    CHECK(fraction / reps == doctest::Approx(1.0 / 3.0).epsilon(0.03 * 3.0));
}

TEST_CASE("MAR: rows with a large driver value lose more cells") {
    // wide calibration so the driver dominates
    const int n = 64;
    auto y = support::toy_dataset(n, 11);
    const auto model = presets::mar_on_column(11, 0, 0.5, 0.499, 0.0, 1.0);
    std::vector<double> driver, missing_count(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) driver.push_back(y.values(i, 0));
    const int reps = 50;
    for (int rep = 0; rep < reps; ++rep) {
        const auto r = ampute_mechanism(y, model, CopulaSpec::independence(11),
                                        static_cast<std::uint64_t>(rep));
        for (int i = 0; i < n; ++i) {
            int c = 0;
            for (int j = 0; j < 11; ++j) c += r.mask(i, j);
            missing_count[static_cast<std::size_t>(i)] += c;
        }
    }
    CHECK(spearman(driver, missing_count) > 0.5);
}

TEST_CASE("suicide MNAR: masked cells carry larger values than unmasked") {
    const auto y = support::toy_dataset(64, 11);
    const auto model = presets::mnar_suicide(11, 0.5, 0.499, 0.0, 1.0);
    const auto r = ampute_mechanism(y, model, CopulaSpec::independence(11), 4242);
    int higher = 0;
    for (int j = 0; j < 11; ++j) {
        double masked = 0, unmasked = 0;
        int nm = 0, nu = 0;
        for (int i = 0; i < 64; ++i) {
            if (r.mask(i, j)) {
                masked += y.values(i, j);
                ++nm;
            } else {
                unmasked += y.values(i, j);
                ++nu;
            }
        }
        if (nm && nu && masked / nm > unmasked / nu) ++higher;
    }
    CHECK(higher >= 10); // effectively every column
}

TEST_CASE("engine determinism across reruns and thread counts") {
    const auto y = support::toy_dataset(500, 6);
    const MissProbMatrix p(500, 6, 0.4);
    const auto spec = CopulaSpec::homogeneous_gauss(0.7181, 6);
    const auto a = ampute_rows_iid(y, p, spec, 77, 1);
    const auto b = ampute_rows_iid(y, p, spec, 77, 4);
    const auto c = ampute_rows_iid(y, p, spec, 77, 3);
    CHECK(a.mask == b.mask);
    CHECK(a.mask == c.mask);
}

TEST_CASE("shape mismatches are rejected") {
    const auto y = support::toy_dataset(4, 3);
    CHECK_THROWS_AS(ampute_rows_iid(y, MissProbMatrix(3, 3, 0.5), CopulaSpec::independence(3), 1),
                    ValidationError);
    CHECK_THROWS_AS(ampute_rows_iid(y, MissProbMatrix(4, 3, 0.5), CopulaSpec::independence(2), 1),
                    ValidationError);
    CHECK_THROWS_AS(ampute_rows_independent(y, MissProbMatrix(4, 3, 0.5),
                                            std::vector<CopulaSpec>(3, CopulaSpec::independence(3)),
                                            1),
                    ValidationError);
}
