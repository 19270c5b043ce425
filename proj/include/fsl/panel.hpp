#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fsl/common.hpp"
#include "fsl/dates.hpp"

namespace fsl {

enum class Exchange { NYSE, AMEX, NASDAQ, OTHER };
enum class ShareClass { COMMON, OTHER };

Exchange parse_exchange(const std::string& s);
ShareClass parse_share_class(const std::string& s);

// Immutable daily panel. The calendar is the union of all asset calendars;
// cells without an observation hold NaN. Matrices are dates x assets.
struct PricePanel {
  std::vector<std::string> assets;
  std::vector<Date> calendar;  // strictly increasing
  MatrixXd open, high, low, close, vwap, volume, market_cap;
  Eigen::MatrixXi exchange_code;  // Exchange as int; -1 where missing
  Eigen::MatrixXi share_class;    // ShareClass as int; -1 where missing

  Eigen::Index n_dates() const { return Eigen::Index(calendar.size()); }
  Eigen::Index n_assets() const { return Eigen::Index(assets.size()); }
  int asset_index(const std::string& id) const;
};

// Simple net returns; close(t)/close(t-1) - 1, present only when both
// closes are (gap-adjacent returns stay missing rather than spanning days).
struct ReturnPanel {
  std::vector<std::string> assets;
  std::vector<Date> calendar;
  MatrixXd returns;
};

struct FilterPolicy {
  double min_price = 5.0;
  std::set<Exchange> allowed_exchanges = {Exchange::NYSE, Exchange::AMEX,
                                          Exchange::NASDAQ};
  bool common_equity_only = true;
  bool drop_duplicates = true;   // applied at load time
  bool drop_nonpositive = true;  // applied at load time
  bool min_price_enabled = true;
  bool exchange_filter_enabled = true;
};

// Maps file column names to panel roles. date/asset/close are required,
// everything else optional (missing columns yield all-NaN series).
struct PanelSchema {
  std::string date = "date";
  std::string asset = "asset";
  std::string open = "open";
  std::string high = "high";
  std::string low = "low";
  std::string close = "close";
  std::string vwap = "vwap";
  std::string volume = "volume";
  std::string market_cap = "market_cap";
  std::string exchange = "exchange";
  std::string share_class = "share_class";
};

struct LoadStats {
  long rows_read = 0;
  long duplicates_dropped = 0;
  long nonpositive_dropped = 0;
  long ohlc_violations_dropped = 0;
};

struct FilterStats {
  long removed_min_price = 0;
  long removed_exchange = 0;
  long removed_share_class = 0;
  long assets_dropped = 0;
  std::string to_json() const;
};

// Delimited text, comma or tab, header row required, ISO-8601 dates.
// Duplicate (asset, date) rows keep the last occurrence.
PricePanel load_panel(const std::string& path, const PanelSchema& schema,
                      LoadStats* stats = nullptr);

PricePanel apply_filters(const PricePanel& panel, const FilterPolicy& policy,
                         FilterStats* stats = nullptr);

ReturnPanel compute_returns(const PricePanel& panel);

// Snapshot of the (filtered) panel in the same delimited layout load_panel
// accepts, so snapshots round-trip.
void write_panel(const PricePanel& panel, const std::string& path);

}  // namespace fsl
