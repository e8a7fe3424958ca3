#include "ampute/render.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace ampute {

namespace {

struct Rgb {
    int r, g, b;
};

Rgb palette_color(const std::string& palette, double v) {
    // v in [0,1]; darker = larger.
    if (palette == "blues") {
        const auto lerp = [v](int from, int to) {
            return static_cast<int>(std::lround(from + v * (to - from)));
        };
        return Rgb{lerp(247, 8), lerp(251, 48), lerp(255, 107)};
    }
    if (palette == "grays") {
        const int g = static_cast<int>(std::lround(255.0 * (1.0 - v)));
        return Rgb{g, g, g};
    }
    throw ValidationError("render: unknown palette \"" + palette + "\"");
}

struct CellSource {
    const Matrix* values;
    const MaskMatrix* mask; // may be null
    int rows() const { return values->rows(); }
    int cols() const { return values->cols(); }
    bool missing(int i, int j) const { return mask && (*mask)(i, j) != 0; }
    double value(int i, int j) const { return (*values)(i, j); }
};

void check_range(const CellSource& src) {
    for (int i = 0; i < src.rows(); ++i)
        for (int j = 0; j < src.cols(); ++j) {
            if (src.missing(i, j)) continue;
            const double v = src.value(i, j);
            if (!(v >= 0.0 && v <= 1.0))
                throw ValidationError("render: value " + std::to_string(v) + " at row " +
                                      std::to_string(i + 1) + ", column " + std::to_string(j + 1) +
                                      " outside [0,1]");
        }
}

void write_ppm(const CellSource& src, const std::string& path, const RenderOptions& opt) {
    const int s = opt.cell_size;
    const int width = src.cols() * s;
    const int height = src.rows() * s;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << "P6\n" << width << " " << height << "\n255\n";
    std::string row_bytes(static_cast<std::size_t>(width) * 3, '\0');
    for (int i = 0; i < src.rows(); ++i) {
        for (int j = 0; j < src.cols(); ++j) {
            const Rgb c = src.missing(i, j)
                              ? Rgb{opt.missing_rgb[0], opt.missing_rgb[1], opt.missing_rgb[2]}
                              : palette_color(opt.palette, src.value(i, j));
            for (int px = 0; px < s; ++px) {
                const auto at = (static_cast<std::size_t>(j) * s + px) * 3;
                row_bytes[at] = static_cast<char>(c.r);
                row_bytes[at + 1] = static_cast<char>(c.g);
                row_bytes[at + 2] = static_cast<char>(c.b);
            }
        }
        for (int py = 0; py < s; ++py) out.write(row_bytes.data(), static_cast<long>(row_bytes.size()));
    }
}

void write_svg(const CellSource& src, const std::string& path, const RenderOptions& opt) {
    const int s = opt.cell_size;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
        << src.cols() * s << "\" height=\"" << src.rows() * s << "\">\n";
    char buf[160];
    for (int i = 0; i < src.rows(); ++i)
        for (int j = 0; j < src.cols(); ++j) {
            const Rgb c = src.missing(i, j)
                              ? Rgb{opt.missing_rgb[0], opt.missing_rgb[1], opt.missing_rgb[2]}
                              : palette_color(opt.palette, src.value(i, j));
            std::snprintf(buf, sizeof(buf),
                          "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" "
                          "fill=\"rgb(%d,%d,%d)\"/>\n",
                          j * s, i * s, s, s, c.r, c.g, c.b);
            out << buf;
        }
    out << "</svg>\n";
}

void render(const CellSource& src, const std::string& path, const RenderOptions& opt) {
    if (opt.cell_size < 1) throw ValidationError("render: cell_size must be >= 1");
    check_range(src);
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".svg") == 0)
        write_svg(src, path, opt);
    else if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".ppm") == 0)
        write_ppm(src, path, opt);
    else
        throw ValidationError("render: output must end in .ppm or .svg");
}

} // namespace

void render_heatmap(const Matrix& values, const std::string& path, const RenderOptions& options) {
    render(CellSource{&values, nullptr}, path, options);
}

void render_heatmap(const AmputedDataset& data, const std::string& path,
                    const RenderOptions& options) {
    render(CellSource{&data.values, &data.mask}, path, options);
}

} // namespace ampute
