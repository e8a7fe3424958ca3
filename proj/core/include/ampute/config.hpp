// The declarative config format: flat `key = value` lines grouped by
// [dotted.section] headers, `#` comment lines, schema-versioned. Plus the
// mappings between config trees and the domain specs (copulas, models,
// cell-set groups, monotone mixtures, scenarios).

#ifndef AMPUTE_CONFIG_HPP
#define AMPUTE_CONFIG_HPP

#include "ampute/copula.hpp"
#include "ampute/engine.hpp"
#include "ampute/model.hpp"
#include "ampute/scenario.hpp"
#include "ampute/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ampute {

/// Config schema understood by this build.
inline constexpr int kConfigSchema = 1;

class ConfigNode {
public:
    bool has(const std::string& key) const { return values_.count(key) > 0; }
    bool has_child(const std::string& name) const { return children_.count(name) > 0; }

    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int_or(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool_or(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key) const; // space-separated
    std::vector<int> get_ints(const std::string& key) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void set_double(const std::string& key, double value);
    void set_int(const std::string& key, long long value);

    const ConfigNode& child(const std::string& name) const;
    ConfigNode& ensure_child(const std::string& name) { return children_[name]; }

    const std::map<std::string, std::string>& values() const { return values_; }
    const std::map<std::string, ConfigNode>& children() const { return children_; }

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, ConfigNode> children_;
};

ConfigNode parse_config(const std::string& text);
ConfigNode load_config(const std::string& path);
std::string serialize_config(const ConfigNode& root);
void save_config(const ConfigNode& root, const std::string& path);

/// Throws unless the node carries `schema = 1`.
void check_schema(const ConfigNode& root);

// --- domain spec mappings --------------------------------------------------

CopulaSpec copula_from_config(const ConfigNode& node);
void copula_to_config(const CopulaSpec& spec, ConfigNode& node);

/// Models accept explicit per-column/per-cell records, row-group records, or
/// one of the named presets (mcar, mar-on-column, mnar-suicide, mnar-group).
LogisticMissModel model_from_config(const ConfigNode& node, int n_rows, int n_cols);

CellSetGroupSpec cell_sets_from_config(const ConfigNode& node);
MonotoneMixtureSpec monotone_from_config(const ConfigNode& node);
ScenarioSpec scenario_from_config(const ConfigNode& node, int n_cols);

} // namespace ampute

#endif // AMPUTE_CONFIG_HPP
