// CSV ingestion and serialization. Header row required, decimal-point reals,
// missing cells as the literal token NA, masks as 0/1 columns.

#ifndef AMPUTE_CSV_HPP
#define AMPUTE_CSV_HPP

#include "ampute/types.hpp"

#include <optional>
#include <string>

namespace ampute {

/// Load a complete dataset; an NA cell is an error naming its location.
CompleteDataset load_csv(const std::string& path);

/// Load a dataset that may contain NA tokens; the mask is reconstructed.
AmputedDataset load_csv_amputed(const std::string& path);

void save_csv(const CompleteDataset& data, const std::string& path);
void save_csv(const AmputedDataset& data, const std::string& path);

void save_mask_csv(const MaskMatrix& mask, const std::vector<std::string>& columns,
                   const std::string& path);
MaskMatrix load_mask_csv(const std::string& path);

/// Map every column through (x - min) / (max - min) and optionally sort rows
/// by one column, ascending and stable. Constant columns are an error.
CompleteDataset range_transform(const CompleteDataset& y,
                                std::optional<int> sort_by = std::nullopt);

/// Shortest decimal form of x that parses back to exactly x.
std::string format_double(double x);

} // namespace ampute

#endif // AMPUTE_CSV_HPP
