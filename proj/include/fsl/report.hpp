#pragma once

#include <string>

#include "fsl/pipeline.hpp"

namespace fsl {

enum class TableStyle { TSV, MARKDOWN };

// Compact premium cell, journal-table style: bp rounded to an integer, t to two
// decimals, stars per |t| >= 1.96 / 2.576. (0.0079, 3.68) -> "79, 3.68**".
std::string format_premium(double lambda_raw, double t);

// Alpha rows sorted by descending |t| (undefined t last). TSV carries
// separate full-precision-free columns (factor, lambda_bp, t, stars,
// estimator); markdown renders the compact cell. Rounding happens only
// here, at render time.
std::string render_table(const PremiumTable& table, TableStyle style);

// Parse a TSV report back into a table (for `report` restyling).
PremiumTable parse_table_tsv(const std::string& text);

}  // namespace fsl
