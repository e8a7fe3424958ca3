#include "ampute/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace ampute {

std::string format_double(double x) {
    char buf[40];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

namespace {

constexpr const char* kNaToken = "NA";

// One CSV record, honoring double quotes with "" escapes.
std::vector<std::string> split_record(const std::string& line, int line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted)
        throw ValidationError("csv: unterminated quote on line " + std::to_string(line_no));
    fields.push_back(std::move(field));
    return fields;
}

struct RawCsv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

RawCsv read_raw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    RawCsv raw;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        auto fields = split_record(line, line_no);
        if (line_no == 1) {
            raw.header = std::move(fields);
        } else {
            if (fields.size() != raw.header.size())
                throw ValidationError(path + ": row " + std::to_string(line_no - 1) + " has " +
                                      std::to_string(fields.size()) + " fields, expected " +
                                      std::to_string(raw.header.size()));
            raw.rows.push_back(std::move(fields));
        }
    }
    if (raw.header.empty()) throw ValidationError(path + ": missing header row");
    return raw;
}

double parse_cell(const std::string& text, const std::string& path, int row,
                  const std::string& column) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v))
        throw ValidationError(path + ": cannot parse \"" + text + "\" at row " +
                              std::to_string(row + 1) + ", column " + column);
    return v;
}

} // namespace

CompleteDataset load_csv(const std::string& path) {
    const RawCsv raw = read_raw(path);
    const int n = static_cast<int>(raw.rows.size());
    const int d = static_cast<int>(raw.header.size());
    CompleteDataset ds;
    ds.columns = raw.header;
    ds.values = Matrix(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
            const auto& cell = raw.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (cell == kNaToken)
                throw ValidationError(path + ": NA at row " + std::to_string(i + 1) +
                                      ", column " + ds.columns[static_cast<std::size_t>(j)] +
                                      " in a dataset loaded as complete");
            ds.values(i, j) = parse_cell(cell, path, i, ds.columns[static_cast<std::size_t>(j)]);
        }
    return ds;
}

AmputedDataset load_csv_amputed(const std::string& path) {
    const RawCsv raw = read_raw(path);
    const int n = static_cast<int>(raw.rows.size());
    const int d = static_cast<int>(raw.header.size());
    AmputedDataset ds;
    ds.columns = raw.header;
    ds.values = Matrix(n, d);
    ds.mask = MaskMatrix(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
            const auto& cell = raw.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (cell == kNaToken) {
                ds.mask(i, j) = 1;
                ds.values(i, j) = std::numeric_limits<double>::quiet_NaN();
            } else {
                ds.values(i, j) =
                    parse_cell(cell, path, i, ds.columns[static_cast<std::size_t>(j)]);
            }
        }
    return ds;
}

namespace {

void write_header(std::ofstream& out, const std::vector<std::string>& columns) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (j) out << ',';
        out << columns[j];
    }
    out << '\n';
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // \n endings on every platform
    if (!out) throw ValidationError("cannot write file: " + path);
    return out;
}

} // namespace

void save_csv(const CompleteDataset& data, const std::string& path) {
    auto out = open_out(path);
    write_header(out, data.columns);
    for (int i = 0; i < data.rows(); ++i) {
        for (int j = 0; j < data.cols(); ++j) {
            if (j) out << ',';
            out << format_double(data.values(i, j));
        }
        out << '\n';
    }
}

void save_csv(const AmputedDataset& data, const std::string& path) {
    auto out = open_out(path);
    write_header(out, data.columns);
    for (int i = 0; i < data.rows(); ++i) {
        for (int j = 0; j < data.cols(); ++j) {
            if (j) out << ',';
            if (data.is_na(i, j))
                out << kNaToken;
            else
                out << format_double(data.values(i, j));
        }
        out << '\n';
    }
}

void save_mask_csv(const MaskMatrix& mask, const std::vector<std::string>& columns,
                   const std::string& path) {
    if (static_cast<int>(columns.size()) != mask.cols())
        throw ValidationError("save_mask_csv: column name count does not match mask");
    auto out = open_out(path);
    write_header(out, columns);
    for (int i = 0; i < mask.rows(); ++i) {
        for (int j = 0; j < mask.cols(); ++j) {
            if (j) out << ',';
            out << (mask(i, j) ? '1' : '0');
        }
        out << '\n';
    }
}

MaskMatrix load_mask_csv(const std::string& path) {
    const RawCsv raw = read_raw(path);
    MaskMatrix mask(static_cast<int>(raw.rows.size()), static_cast<int>(raw.header.size()));
    for (int i = 0; i < mask.rows(); ++i)
        for (int j = 0; j < mask.cols(); ++j) {
            const auto& cell = raw.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (cell == "0")
                mask(i, j) = 0;
            else if (cell == "1")
                mask(i, j) = 1;
            else
                throw ValidationError(path + ": mask cell must be 0 or 1 at row " +
                                      std::to_string(i + 1) + ", column " +
                                      raw.header[static_cast<std::size_t>(j)]);
        }
    return mask;
}

CompleteDataset range_transform(const CompleteDataset& y, std::optional<int> sort_by) {
    y.validate();
    if (sort_by && (*sort_by < 0 || *sort_by >= y.cols()))
        throw ValidationError("range_transform: sort column out of range");

    CompleteDataset out = y;
    for (int j = 0; j < y.cols(); ++j) {
        double lo = y.values(0, j), hi = y.values(0, j);
        for (int i = 1; i < y.rows(); ++i) {
            lo = std::min(lo, y.values(i, j));
            hi = std::max(hi, y.values(i, j));
        }
        if (lo == hi)
            throw ValidationError("range_transform: column " + y.columns[static_cast<std::size_t>(j)] +
                                  " is constant");
        for (int i = 0; i < y.rows(); ++i)
            out.values(i, j) = (y.values(i, j) - lo) / (hi - lo);
    }

    if (sort_by) {
        std::vector<int> order(static_cast<std::size_t>(y.rows()));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return out.values(a, *sort_by) < out.values(b, *sort_by);
        });
        Matrix sorted(out.values.rows(), out.values.cols());
        for (int i = 0; i < out.rows(); ++i)
            for (int j = 0; j < out.cols(); ++j)
                sorted(i, j) = out.values(order[static_cast<std::size_t>(i)], j);
        out.values = std::move(sorted);
    }
    return out;
}

} // namespace ampute
