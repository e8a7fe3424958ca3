// Shared helpers for unit and acceptance tests.

#ifndef AMPUTE_TEST_SUPPORT_HPP
#define AMPUTE_TEST_SUPPORT_HPP

#include "ampute/copula.hpp"
#include "ampute/rng.hpp"
#include "ampute/types.hpp"

#include <string>
#include <vector>

namespace support {

/// Random copula spec over the evaluable families (Gauss only up to dim 2).
/// depth limits nesting of survival/convex/block-product wrappers.
inline ampute::CopulaSpec random_spec(ampute::RngStream& rng, int dim, int depth) {
    using ampute::CopulaSpec;
    const int structural = depth > 0 ? 3 : 0;
    int families = 3 + (dim == 2 ? 2 : 0) + structural; // leaf families first
    auto pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(families)));

    if (pick == 0) return CopulaSpec::independence(dim);
    if (pick == 1) return CopulaSpec::comonotone(dim);
    if (pick == 2)
        return CopulaSpec::convex_combination(rng.uniform(), CopulaSpec::comonotone(dim),
                                              CopulaSpec::independence(dim));
    if (dim == 2) {
        if (pick == 3) return CopulaSpec::countermonotone();
        if (pick == 4) return CopulaSpec::homogeneous_gauss(rng.uniform(), 2);
    }
    const int structural_pick = pick - (dim == 2 ? 5 : 3);
    if (structural_pick == 0) return CopulaSpec::survival(random_spec(rng, dim, depth - 1));
    if (structural_pick == 1)
        return CopulaSpec::convex_combination(rng.uniform(), random_spec(rng, dim, depth - 1),
                                              random_spec(rng, dim, depth - 1));
    // block product: split coordinates into two interleaved blocks when possible
    if (dim < 2) return CopulaSpec::independence(dim);
    std::vector<int> a, b;
    for (int j = 0; j < dim; ++j) (j % 2 == 0 ? a : b).push_back(j);
    std::vector<std::pair<std::vector<int>, ampute::CopulaSpec>> blocks;
    blocks.emplace_back(a, random_spec(rng, static_cast<int>(a.size()), depth - 1));
    blocks.emplace_back(b, random_spec(rng, static_cast<int>(b.size()), depth - 1));
    return CopulaSpec::block_product(std::move(blocks));
}

inline std::vector<double> random_point(ampute::RngStream& rng, int dim, double lo = 0.05,
                                        double hi = 0.95) {
    std::vector<double> u(static_cast<std::size_t>(dim));
    for (auto& v : u) v = lo + (hi - lo) * rng.uniform();
    return u;
}

inline ampute::CompleteDataset toy_dataset(int rows, int cols, std::uint64_t seed = 7) {
    ampute::CompleteDataset ds;
    ds.values = ampute::Matrix(rows, cols);
    ampute::RngStream rng(seed, ampute::StreamPurpose::RowSample, 999);
    for (int j = 0; j < cols; ++j) ds.columns.push_back("v" + std::to_string(j + 1));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) ds.values(i, j) = rng.uniform();
    return ds;
}

} // namespace support

#endif // AMPUTE_TEST_SUPPORT_HPP
