// Heatmap emission for matrices over [0,1] with NA cells: binary PPM (P6) or
// SVG 1.1, chosen by file extension. Byte output is deterministic.

#ifndef AMPUTE_RENDER_HPP
#define AMPUTE_RENDER_HPP

#include "ampute/types.hpp"

#include <array>
#include <string>

namespace ampute {

struct RenderOptions {
    std::string palette = "blues"; // blues | grays
    std::array<int, 3> missing_rgb = {227, 26, 28};
    int cell_size = 16; // pixels per cell (PPM) / user units (SVG)
};

/// All entries must lie in [0,1]; out-of-range values are an error.
void render_heatmap(const Matrix& values, const std::string& path,
                    const RenderOptions& options = {});

/// NA cells take the designated missing color.
void render_heatmap(const AmputedDataset& data, const std::string& path,
                    const RenderOptions& options = {});

} // namespace ampute

#endif // AMPUTE_RENDER_HPP
