#include "ampute/config.hpp"
#include "ampute/csv.hpp"
#include "ampute/engine.hpp"
#include "ampute/render.hpp"

#include "doctest.h"
#include "support.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace ampute;

namespace {

std::string tmp_path(const std::string& name) { return "/tmp/ampute_test_" + name; }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kMtcarsPath = AMPUTE_TEST_DATA;

} // namespace

TEST_CASE("csv round-trip is exact") {
    const auto y = load_csv(kMtcarsPath);
    CHECK(y.rows() == 32);
    CHECK(y.cols() == 11);
    CHECK(y.columns[0] == "mpg");
    const auto path = tmp_path("roundtrip.csv");
    save_csv(y, path);
    const auto back = load_csv(path);
    CHECK(back.columns == y.columns);
    for (int i = 0; i < y.rows(); ++i)
        for (int j = 0; j < y.cols(); ++j) CHECK(back.values(i, j) == y.values(i, j));
    std::remove(path.c_str());
}

TEST_CASE("the bundled fixture matches the documented column ranges") {
    const auto y = load_csv(kMtcarsPath);
    const std::vector<std::pair<double, double>> ranges = {
        {10.4, 33.9}, {4, 8},   {71.1, 472.0}, {52, 335}, {2.76, 4.93}, {1.513, 5.424},
        {14.5, 22.9}, {0, 1},   {0, 1},        {3, 5},    {1, 8}};
    for (int j = 0; j < 11; ++j) {
        double lo = y.values(0, j), hi = y.values(0, j);
        for (int i = 1; i < 32; ++i) {
            lo = std::min(lo, y.values(i, j));
            hi = std::max(hi, y.values(i, j));
        }
        CHECK(lo == doctest::Approx(ranges[static_cast<std::size_t>(j)].first));
        CHECK(hi == doctest::Approx(ranges[static_cast<std::size_t>(j)].second));
    }
}

TEST_CASE("amputed csv writes NA and reconstructs the mask") {
    auto y = support::toy_dataset(6, 3);
    MaskMatrix m(6, 3, 0);
    m(0, 0) = m(3, 2) = m(5, 1) = 1;
    const auto x = apply_mask(y, m);
    const auto path = tmp_path("amputed.csv");
    save_csv(x, path);
    const auto back = load_csv_amputed(path);
    CHECK(back.mask == m);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 3; ++j)
            if (!m(i, j)) CHECK(back.values(i, j) == x.values(i, j));
    // the same file refuses to load as complete, naming the cell
    CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("row 1"), ValidationError);
    std::remove(path.c_str());
}

TEST_CASE("mask csv round-trip and parse errors") {
    MaskMatrix m(3, 2, 0);
    m(1, 0) = 1;
    const auto path = tmp_path("mask.csv");
    save_mask_csv(m, {"a", "b"}, path);
    CHECK(load_mask_csv(path) == m);
    std::remove(path.c_str());

    const auto bad = tmp_path("bad.csv");
    std::ofstream(bad) << "a,b\n1,x\n";
    CHECK_THROWS_WITH_AS(load_csv(bad), doctest::Contains("column b"), ValidationError);
    std::ofstream(bad) << "a,b\n1\n";
    CHECK_THROWS_WITH_AS(load_csv(bad), doctest::Contains("fields"), ValidationError);
    std::remove(bad.c_str());
}

TEST_CASE("range transform maps ranges onto [0,1] and sorts stably") {
    const auto y = load_csv(kMtcarsPath);
    const auto t = range_transform(y, y.column_index("mpg"));
    // mpg: 10.4 -> 0, 33.9 -> 1; sorted ascending so first row is 0, last is 1
    CHECK(t.values(0, 0) == 0.0);
    CHECK(t.values(31, 0) == 1.0);
    for (int i = 1; i < 32; ++i) CHECK(t.values(i, 0) >= t.values(i - 1, 0));
    for (int j = 0; j < 11; ++j)
        for (int i = 0; i < 32; ++i) {
            CHECK(t.values(i, j) >= 0.0);
            CHECK(t.values(i, j) <= 1.0);
        }

    // already-[0,1] columns are unchanged
    CompleteDataset unit;
    unit.columns = {"u"};
    unit.values = Matrix(3, 1);
    unit.values(0, 0) = 0.0;
    unit.values(1, 0) = 0.4;
    unit.values(2, 0) = 1.0;
    const auto same = range_transform(unit);
    CHECK(same.values == unit.values);

    // two-row column (a, b) with a < b maps to (0, 1)
    CompleteDataset two;
    two.columns = {"x"};
    two.values = Matrix(2, 1);
    two.values(0, 0) = 3.7;
    two.values(1, 0) = 9.1;
    const auto tt = range_transform(two);
    CHECK(tt.values(0, 0) == 0.0);
    CHECK(tt.values(1, 0) == 1.0);

    // constant columns are an error
    CompleteDataset constant;
    constant.columns = {"c"};
    constant.values = Matrix(2, 1, 5.0);
    CHECK_THROWS_AS(range_transform(constant), ValidationError);
}

TEST_CASE("config parse, access, and round-trip") {
    const std::string text = "schema = 1\nmode = rows-iid\nseed = 42\n\n# comment\n"
                             "[copula]\nfamily = homogeneous-gauss\nrho = 0.7181\ndim = 11\n"
                             "[probabilities]\nkind = constant\nvalue = 0.3333\n";
    const auto cfg = parse_config(text);
    check_schema(cfg);
    CHECK(cfg.get("mode") == "rows-iid");
    CHECK(cfg.get_u64("seed") == 42);
    CHECK(cfg.child("copula").get_double("rho") == 0.7181);
    CHECK(cfg.child("probabilities").get("kind") == "constant");
    CHECK_THROWS_AS(cfg.get("nope"), ValidationError);
    CHECK_THROWS_AS(cfg.child("nope"), ValidationError);

    const auto again = parse_config(serialize_config(cfg));
    CHECK(serialize_config(again) == serialize_config(cfg));
}

TEST_CASE("copula specs survive the config round-trip") {
    RngStream rng(12, StreamPurpose::RowSample, 6);
    for (int trial = 0; trial < 30; ++trial) {
        const auto spec = support::random_spec(rng, 2 + static_cast<int>(rng.below(3)), 2);
        ConfigNode node;
        copula_to_config(spec, node);
        const auto back = copula_from_config(parse_config(serialize_config(node)));
        CHECK(back.describe() == spec.describe());
        // same distribution: identical samples under the same seed
        const auto a = sample(spec, 50, 9);
        const auto b = sample(back, 50, 9);
        CHECK(a.values == b.values);
    }
}

TEST_CASE("model config: presets and explicit records") {
    const auto y = support::toy_dataset(8, 3);

    const auto preset = parse_config("preset = mcar\np = 0.25\n");
    const auto m1 = model_from_config(preset, 8, 3);
    const auto p1 = compute_probs(m1, y);
    for (double v : p1.values.data()) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));

    const auto percol = parse_config("sharing = per-column\n[column.1]\nfixed = 0\n"
                                     "[column.default]\nintercept = 0\nterms = 1:1.0\n");
    const auto m2 = model_from_config(percol, 8, 3);
    const auto p2 = compute_probs(m2, y);
    for (int i = 0; i < 8; ++i) {
        CHECK(p2(i, 0) == 0.0);
        CHECK(p2(i, 1) > 0.0);
    }

    const auto groups = parse_config(
        "sharing = per-cell\n[group.1]\nrows = 1 2 3 4\n[group.1.column.default]\nfixed = 0.2\n"
        "[group.2]\nrows = 5 6 7 8\n[group.2.column.default]\nfixed = 0.8\n");
    const auto m3 = model_from_config(groups, 8, 3);
    const auto p3 = compute_probs(m3, y);
    CHECK(p3(0, 0) == 0.2);
    CHECK(p3(7, 2) == 0.8);

    CHECK_THROWS_AS(model_from_config(parse_config("preset = bogus\np = 0.5\n"), 8, 3),
                    ValidationError);
}

TEST_CASE("ppm renders have the right size and missing cells") {
    Matrix v(2, 2, 0.0);
    v(0, 1) = 1.0;
    const auto path = tmp_path("img.ppm");
    RenderOptions opt;
    opt.cell_size = 1;
    render_heatmap(v, path, opt);
    const auto bytes = slurp(path);
    CHECK(bytes.substr(0, 2) == "P6");
    CHECK(bytes.size() == std::string("P6\n2 2\n255\n").size() + 12);

    // one NA cell -> exactly one missing-color pixel
    auto y = support::toy_dataset(2, 2);
    for (auto& val : y.values.data()) val = 0.5;
    MaskMatrix m(2, 2, 0);
    m(1, 0) = 1;
    render_heatmap(apply_mask(y, m), path, opt);
    const auto img = slurp(path);
    const std::size_t header = std::string("P6\n2 2\n255\n").size();
    int red_cells = 0;
    for (int c = 0; c < 4; ++c) {
        const auto px = img.substr(header + static_cast<std::size_t>(c) * 3, 3);
        if (static_cast<unsigned char>(px[0]) == 227 && static_cast<unsigned char>(px[1]) == 26)
            ++red_cells;
    }
    CHECK(red_cells == 1);

    // deterministic bytes
    render_heatmap(apply_mask(y, m), tmp_path("img2.ppm"), opt);
    CHECK(slurp(tmp_path("img2.ppm")) == img);
    std::remove(path.c_str());
    std::remove(tmp_path("img2.ppm").c_str());
}

TEST_CASE("all-NA render is uniformly the missing color") {
    auto y = support::toy_dataset(3, 2);
    MaskMatrix m(3, 2, 1);
    const auto path = tmp_path("allna.ppm");
    RenderOptions opt;
    opt.cell_size = 1;
    render_heatmap(apply_mask(y, m), path, opt);
    const auto img = slurp(path);
    const std::size_t header = std::string("P6\n2 3\n255\n").size();
    for (std::size_t c = header; c + 2 < img.size(); c += 3)
        CHECK(static_cast<unsigned char>(img[c]) == 227);
    std::remove(path.c_str());
}

TEST_CASE("svg renders are emitted and deterministic") {
    Matrix v(2, 3, 0.25);
    const auto path = tmp_path("img.svg");
    render_heatmap(v, path);
    const auto a = slurp(path);
    CHECK(a.find("<svg") != std::string::npos);
    CHECK(a.find("rect") != std::string::npos);
    render_heatmap(v, path);
    CHECK(slurp(path) == a);
    std::remove(path.c_str());
}

TEST_CASE("mtcars01 render darkens down the sorted first column") {
    const auto y = load_csv(kMtcarsPath);
    const auto t = range_transform(y, 0);
    const auto path = tmp_path("mtcars01.ppm");
    RenderOptions opt;
    opt.cell_size = 1;
    opt.palette = "grays";
    render_heatmap(t.values, path, opt);
    const auto img = slurp(path);
    const std::size_t header = std::string("P6\n11 32\n255\n").size();
    // grayscale of column 0 must be nonincreasing with the sorted rows
    int prev = 256;
    for (int i = 0; i < 32; ++i) {
        const auto px = static_cast<unsigned char>(img[header + static_cast<std::size_t>(i) * 11 * 3]);
        CHECK(px <= prev);
        prev = px;
    }
    std::remove(path.c_str());
}

TEST_CASE("render rejects out-of-range values and unknown formats") {
    Matrix v(1, 1, 1.5);
    CHECK_THROWS_AS(render_heatmap(v, tmp_path("x.ppm")), ValidationError);
    Matrix ok(1, 1, 0.5);
    CHECK_THROWS_AS(render_heatmap(ok, tmp_path("x.gif")), ValidationError);
}
