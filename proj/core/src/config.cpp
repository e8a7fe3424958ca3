#include "ampute/config.hpp"

#include "ampute/csv.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ampute {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(s);
    while (std::getline(in, part, sep)) parts.push_back(part);
    return parts;
}

double parse_double(const std::string& text, const std::string& key) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *trim(end).c_str() != '\0')
        throw ValidationError("config: key \"" + key + "\" is not a number: " + text);
    return v;
}

} // namespace

const std::string& ConfigNode::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ValidationError("config: missing key \"" + key + "\"");
    return it->second;
}

std::string ConfigNode::get_or(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double ConfigNode::get_double(const std::string& key) const {
    return parse_double(get(key), key);
}

double ConfigNode::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int ConfigNode::get_int(const std::string& key) const {
    const double v = get_double(key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ValidationError("config: key \"" + key + "\" must be an integer");
    return i;
}

int ConfigNode::get_int_or(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t ConfigNode::get_u64(const std::string& key) const {
    const std::string& text = get(key);
    const char* begin = text.c_str();
    char* end = nullptr;
    const unsigned long long v = std::strtoull(begin, &end, 10);
    if (end == begin || *trim(end).c_str() != '\0')
        throw ValidationError("config: key \"" + key + "\" must be an unsigned integer");
    return v;
}

bool ConfigNode::get_bool_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = get(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ValidationError("config: key \"" + key + "\" must be true or false");
}

std::vector<double> ConfigNode::get_doubles(const std::string& key) const {
    std::istringstream in(get(key));
    std::vector<double> out;
    std::string token;
    while (in >> token) out.push_back(parse_double(token, key));
    if (out.empty()) throw ValidationError("config: key \"" + key + "\" is empty");
    return out;
}

std::vector<int> ConfigNode::get_ints(const std::string& key) const {
    std::vector<int> out;
    for (double v : get_doubles(key)) {
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw ValidationError("config: key \"" + key + "\" must hold integers");
        out.push_back(i);
    }
    return out;
}

void ConfigNode::set_double(const std::string& key, double value) {
    values_[key] = format_double(value);
}

void ConfigNode::set_int(const std::string& key, long long value) {
    values_[key] = std::to_string(value);
}

const ConfigNode& ConfigNode::child(const std::string& name) const {
    const auto it = children_.find(name);
    if (it == children_.end())
        throw ValidationError("config: missing section [" + name + "]");
    return it->second;
}

ConfigNode parse_config(const std::string& text) {
    ConfigNode root;
    ConfigNode* current = &root;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ValidationError("config: malformed section header on line " +
                                      std::to_string(line_no));
            current = &root;
            for (const auto& part : split(t.substr(1, t.size() - 2), '.')) {
                const std::string name = trim(part);
                if (name.empty())
                    throw ValidationError("config: empty section name on line " +
                                          std::to_string(line_no));
                current = &current->ensure_child(name);
            }
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config: expected key = value on line " +
                                  std::to_string(line_no));
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ValidationError("config: empty key on line " + std::to_string(line_no));
        current->set(key, value);
    }
    return root;
}

ConfigNode load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace {

void serialize_node(const ConfigNode& node, const std::string& path, std::ostringstream& out) {
    if (!path.empty() && !node.values().empty()) out << "[" << path << "]\n";
    for (const auto& [key, value] : node.values()) out << key << " = " << value << "\n";
    for (const auto& [name, sub] : node.children()) {
        out << "\n";
        serialize_node(sub, path.empty() ? name : path + "." + name, out);
    }
}

} // namespace

std::string serialize_config(const ConfigNode& root) {
    std::ostringstream out;
    serialize_node(root, "", out);
    return out.str();
}

void save_config(const ConfigNode& root, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write config file: " + path);
    out << serialize_config(root);
}

void check_schema(const ConfigNode& root) {
    if (root.get_int_or("schema", -1) != kConfigSchema)
        throw ValidationError("config: expected schema = " + std::to_string(kConfigSchema));
}

// ---------------------------------------------------------------------------
// Copula mapping

namespace {

// Children named "1".."K" in numeric order.
std::vector<const ConfigNode*> numbered_children(const ConfigNode& node,
                                                 const std::string& what) {
    std::vector<std::pair<int, const ConfigNode*>> entries;
    for (const auto& [name, sub] : node.children()) {
        char* end = nullptr;
        const long k = std::strtol(name.c_str(), &end, 10);
        if (*end != '\0' || k < 1)
            throw ValidationError("config: " + what + " sections must be numbered from 1");
        entries.emplace_back(static_cast<int>(k), &sub);
    }
    std::sort(entries.begin(), entries.end());
    std::vector<const ConfigNode*> out;
    for (std::size_t t = 0; t < entries.size(); ++t) {
        if (entries[t].first != static_cast<int>(t) + 1)
            throw ValidationError("config: " + what + " sections must be consecutive from 1");
        out.push_back(entries[t].second);
    }
    if (out.empty()) throw ValidationError("config: no " + what + " sections found");
    return out;
}

} // namespace

CopulaSpec copula_from_config(const ConfigNode& node) {
    const std::string family = node.get("family");
    if (family == "independence") return CopulaSpec::independence(node.get_int("dim"));
    if (family == "comonotone") return CopulaSpec::comonotone(node.get_int("dim"));
    if (family == "countermonotone") return CopulaSpec::countermonotone();
    if (family == "homogeneous-gauss")
        return CopulaSpec::homogeneous_gauss(node.get_double("rho"), node.get_int("dim"));
    if (family == "gauss") {
        const auto rows = split(node.get("matrix"), ';');
        const int d = static_cast<int>(rows.size());
        Matrix corr(d, d);
        for (int i = 0; i < d; ++i) {
            std::istringstream in(rows[static_cast<std::size_t>(i)]);
            for (int j = 0; j < d; ++j)
                if (!(in >> corr(i, j)))
                    throw ValidationError("config: gauss matrix row " + std::to_string(i + 1) +
                                          " needs " + std::to_string(d) + " entries");
        }
        return CopulaSpec::gauss(std::move(corr));
    }
    if (family == "survival") return CopulaSpec::survival(copula_from_config(node.child("inner")));
    if (family == "convex")
        return CopulaSpec::convex_combination(node.get_double("lambda"),
                                              copula_from_config(node.child("first")),
                                              copula_from_config(node.child("second")));
    if (family == "block-product") {
        std::vector<std::pair<std::vector<int>, CopulaSpec>> blocks;
        for (const ConfigNode* sub : numbered_children(node.child("block"), "block")) {
            std::vector<int> indices;
            for (int ix : sub->get_ints("indices")) indices.push_back(ix - 1); // 1-based in config
            blocks.emplace_back(std::move(indices), copula_from_config(*sub));
        }
        return CopulaSpec::block_product(std::move(blocks));
    }
    throw ValidationError("config: unknown copula family \"" + family + "\"");
}

void copula_to_config(const CopulaSpec& spec, ConfigNode& node) {
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, IndependenceCopula>) {
                node.set("family", "independence");
                node.set_int("dim", v.dim);
            } else if constexpr (std::is_same_v<T, ComonotoneCopula>) {
                node.set("family", "comonotone");
                node.set_int("dim", v.dim);
            } else if constexpr (std::is_same_v<T, CountermonotoneCopula>) {
                node.set("family", "countermonotone");
            } else if constexpr (std::is_same_v<T, HomogeneousGaussCopula>) {
                node.set("family", "homogeneous-gauss");
                node.set_double("rho", v.rho);
                node.set_int("dim", v.dim);
            } else if constexpr (std::is_same_v<T, GaussCopula>) {
                node.set("family", "gauss");
                std::string text;
                for (int i = 0; i < v.correlation.rows(); ++i) {
                    if (i) text += "; ";
                    for (int j = 0; j < v.correlation.cols(); ++j) {
                        if (j) text += " ";
                        text += format_double(v.correlation(i, j));
                    }
                }
                node.set("matrix", text);
            } else if constexpr (std::is_same_v<T, SurvivalCopula>) {
                node.set("family", "survival");
                copula_to_config(*v.inner, node.ensure_child("inner"));
            } else if constexpr (std::is_same_v<T, ConvexCombinationCopula>) {
                node.set("family", "convex");
                node.set_double("lambda", v.lambda);
                copula_to_config(*v.first, node.ensure_child("first"));
                copula_to_config(*v.second, node.ensure_child("second"));
            } else {
                node.set("family", "block-product");
                ConfigNode& blocks = node.ensure_child("block");
                int k = 1;
                for (const auto& b : v.blocks) {
                    ConfigNode& sub = blocks.ensure_child(std::to_string(k++));
                    std::string indices;
                    for (std::size_t t = 0; t < b.indices.size(); ++t) {
                        if (t) indices += " ";
                        indices += std::to_string(b.indices[t] + 1);
                    }
                    sub.set("indices", indices);
                    copula_to_config(*b.copula, sub);
                }
            }
        },
        spec.node());
}

// ---------------------------------------------------------------------------
// Model mapping

namespace {

CellModel cell_from_config(const ConfigNode& node) {
    if (node.has("fixed")) return CellModel::fixed(node.get_double("fixed"));
    CellModel c = CellModel::logistic(node.get_double("intercept"));
    if (node.has("terms")) {
        std::istringstream in(node.get("terms"));
        std::string token;
        while (in >> token) {
            const auto colon = token.find(':');
            if (colon == std::string::npos)
                throw ValidationError("config: terms must be column:weight pairs");
            const int col = static_cast<int>(std::strtol(token.substr(0, colon).c_str(), nullptr, 10));
            char* end = nullptr;
            const double w = std::strtod(token.c_str() + colon + 1, &end);
            if (*end != '\0')
                throw ValidationError("config: bad term weight in \"" + token + "\"");
            c.terms.push_back({col - 1, w}); // columns are 1-based in config
        }
    }
    return c;
}

LogisticMissModel model_from_preset(const ConfigNode& node, int n_cols) {
    const std::string preset = node.get("preset");
    const double p = node.get_double("p");
    if (preset == "mcar") return presets::mcar(n_cols, p);
    const double eps = node.get_double("eps");
    const double cmin = node.get_double_or("cmin", 0.0);
    const double cmax = node.get_double_or("cmax", 1.0);
    if (preset == "mar-on-column")
        return presets::mar_on_column(n_cols, node.get_int("driver") - 1, p, eps, cmin, cmax);
    if (preset == "mnar-suicide") return presets::mnar_suicide(n_cols, p, eps, cmin, cmax);
    if (preset == "mnar-group") return presets::mnar_group(n_cols, p, eps, cmin, cmax);
    throw ValidationError("config: unknown model preset \"" + preset + "\"");
}

} // namespace

LogisticMissModel model_from_config(const ConfigNode& node, int n_rows, int n_cols) {
    if (node.has("preset")) return model_from_preset(node, n_cols);

    const std::string sharing = node.get_or("sharing", "per-column");
    if (sharing == "global") return LogisticMissModel::global(cell_from_config(node.child("global")), n_cols);

    if (sharing == "per-column") {
        const ConfigNode& columns = node.child("column");
        const ConfigNode* fallback =
            columns.has_child("default") ? &columns.child("default") : nullptr;
        std::vector<CellModel> cells;
        for (int j = 1; j <= n_cols; ++j) {
            const std::string name = std::to_string(j);
            if (columns.has_child(name))
                cells.push_back(cell_from_config(columns.child(name)));
            else if (fallback)
                cells.push_back(cell_from_config(*fallback));
            else
                throw ValidationError("config: no record for column " + name +
                                      " and no [model.column.default]");
        }
        return LogisticMissModel::per_column(std::move(cells));
    }

    if (sharing == "per-cell") {
        // Row groups with explicit row-index lists; each group holds
        // per-column records. Expanded to a full per-cell table.
        const ConfigNode& groups = node.child("group");
        std::vector<CellModel> cells(static_cast<std::size_t>(n_rows) * n_cols);
        std::vector<char> covered(static_cast<std::size_t>(n_rows), 0);
        for (const ConfigNode* g : numbered_children(groups, "model group")) {
            const ConfigNode& columns = g->child("column");
            const ConfigNode* fallback =
                columns.has_child("default") ? &columns.child("default") : nullptr;
            for (int row1 : g->get_ints("rows")) {
                if (row1 < 1 || row1 > n_rows)
                    throw ValidationError("config: group row " + std::to_string(row1) +
                                          " outside the dataset");
                if (covered[static_cast<std::size_t>(row1 - 1)]++)
                    throw ValidationError("config: row " + std::to_string(row1) +
                                          " assigned to two groups");
                for (int j = 1; j <= n_cols; ++j) {
                    const std::string name = std::to_string(j);
                    const ConfigNode* rec = columns.has_child(name) ? &columns.child(name) : fallback;
                    if (!rec)
                        throw ValidationError("config: group lacks a record for column " + name);
                    cells[static_cast<std::size_t>(row1 - 1) * n_cols + (j - 1)] =
                        cell_from_config(*rec);
                }
            }
        }
        for (int i = 0; i < n_rows; ++i)
            if (!covered[static_cast<std::size_t>(i)])
                throw ValidationError("config: row " + std::to_string(i + 1) +
                                      " belongs to no model group");
        return LogisticMissModel::per_cell(n_rows, n_cols, std::move(cells));
    }

    throw ValidationError("config: unknown sharing mode \"" + sharing + "\"");
}

// ---------------------------------------------------------------------------
// Engine spec mappings

CellSetGroupSpec cell_sets_from_config(const ConfigNode& node) {
    std::vector<CellSetGroup> groups;
    for (const ConfigNode* g : numbered_children(node.child("group"), "cell-set group")) {
        CellSetGroup group;
        group.prob = g->get_double("p");
        std::istringstream in(g->get("cells"));
        std::string token;
        while (in >> token) {
            const auto colon = token.find(':');
            if (colon == std::string::npos)
                throw ValidationError("config: cells must be row:column pairs");
            const int row = static_cast<int>(std::strtol(token.substr(0, colon).c_str(), nullptr, 10));
            const int col = static_cast<int>(std::strtol(token.c_str() + colon + 1, nullptr, 10));
            group.cells.emplace_back(row - 1, col - 1);
        }
        groups.push_back(std::move(group));
    }
    CellSetGroupSpec spec{std::move(groups), copula_from_config(node.child("cross-copula")),
                          node.get_double_or("default_p", 0.0)};
    return spec;
}

MonotoneMixtureSpec monotone_from_config(const ConfigNode& node) {
    return MonotoneMixtureSpec{node.get_double("miss_row_prob"), node.get_double("alpha"),
                               node.get_double("beta"),
                               copula_from_config(node.child("row-dependence"))};
}

ScenarioSpec scenario_from_config(const ConfigNode& node, int n_cols) {
    ScenarioSpec spec;
    spec.permute_rows = node.get_bool_or("permute_rows", true);
    const auto patterns = numbered_children(node.child("pattern"), "pattern");
    const int k = static_cast<int>(patterns.size());
    spec.patterns = MaskMatrix(k, n_cols);
    spec.weights = Matrix(k, n_cols + 1);

    int with_freq = 0, with_rows = 0;
    std::vector<double> freqs;
    std::vector<std::vector<int>> partition;
    for (int s = 0; s < k; ++s) {
        const ConfigNode& p = *patterns[static_cast<std::size_t>(s)];
        const auto cells = p.get_ints("cells");
        if (static_cast<int>(cells.size()) != n_cols)
            throw ValidationError("config: pattern " + std::to_string(s + 1) + " needs " +
                                  std::to_string(n_cols) + " cells");
        for (int j = 0; j < n_cols; ++j)
            spec.patterns(s, j) = static_cast<std::uint8_t>(cells[static_cast<std::size_t>(j)]);
        const auto weights = p.get_doubles("weights");
        if (static_cast<int>(weights.size()) != n_cols + 1)
            throw ValidationError("config: pattern " + std::to_string(s + 1) +
                                  " needs d+1 weights (intercept first)");
        for (int j = 0; j <= n_cols; ++j)
            spec.weights(s, j) = weights[static_cast<std::size_t>(j)];
        if (p.has("frequency")) {
            ++with_freq;
            freqs.push_back(p.get_double("frequency"));
        }
        if (p.has("rows")) {
            ++with_rows;
            std::vector<int> rows;
            for (int r : p.get_ints("rows")) rows.push_back(r - 1);
            partition.push_back(std::move(rows));
        }
    }
    if (with_freq == k && with_rows == 0)
        spec.frequencies = std::move(freqs);
    else if (with_rows == k && with_freq == 0)
        spec.partition = std::move(partition);
    else
        throw ValidationError(
            "config: every pattern needs either a frequency or an explicit rows list");
    return spec;
}

} // namespace ampute
