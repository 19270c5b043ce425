#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fsl/dsl/eval.hpp"
#include "fsl/panel.hpp"

namespace fsl {

enum class Weighting { VALUE, EQUAL };
enum class TiePolicy { OVERLAPPING_BINS, STRICT };
enum class Frequency { DAILY, MONTHLY };

struct SortSpec {
  int size_bins = 3;
  int signal_bins = 2;
  Weighting weighting = Weighting::VALUE;
  TiePolicy tie_policy = TiePolicy::OVERLAPPING_BINS;
};

struct FactorSeries {
  std::string name;
  Frequency frequency = Frequency::DAILY;
  std::vector<Date> dates;
  VectorXd returns;  // NaN = missing
  bool standardized = false;
};

// Monthly value-weighted cell returns from a bivariate independent sort.
struct TestAssetPanel {
  std::vector<std::string> portfolio_ids;  // factor|size<i>|sig<j>
  std::vector<Date> months;                // last trading day of return month
  MatrixXd returns;                        // months x portfolios, NaN = missing
};

// Quantile-bin assignment used by both sorts. Assets are ordered by value
// (ties broken by input order); the bottom and top bins take exactly
// floor(n/B) members each so that negating the values mirrors the tails
// exactly, interior positions split evenly. Tied values form a block: under
// STRICT the whole block lands in the bin of its first position, under
// OVERLAPPING_BINS every member joins every bin the block touches.
// Returns per-input list of bin memberships (empty for missing values).
std::vector<std::vector<int>> assign_bins(const std::vector<double>& values,
                                          int n_bins, TiePolicy policy);

struct SortDiagnostics {
  int skipped_rebalances = 0;  // too few eligible assets
  int empty_cells = 0;
};

// Value-weighted high-minus-low decile factor, monthly rebalance at the
// last trading day, held over the following month with weights fixed at
// the rebalance from market cap. Days outside any holding period, and
// holding periods with fewer than min_assets eligible names, are missing.
FactorSeries hml_decile_factor(const dsl::SignalPanel& signal,
                               const PricePanel& panel,
                               const ReturnPanel& returns,
                               Weighting weighting = Weighting::VALUE,
                               TiePolicy tie_policy = TiePolicy::STRICT,
                               int min_assets = 10,
                               SortDiagnostics* diag = nullptr);

// Independent size x signal quantile sort; monthly buy-and-hold
// value-weighted cell returns, lagged market cap weights.
TestAssetPanel bivariate_independent_sort(const dsl::SignalPanel& signal,
                                          const PricePanel& panel,
                                          const ReturnPanel& returns,
                                          const SortSpec& spec,
                                          SortDiagnostics* diag = nullptr);

// One value per calendar month: 21 * mean(daily returns in the month);
// all-missing months stay missing.
FactorSeries aggregate_daily_to_monthly(const FactorSeries& series);

// Scale to unit sample variance (mean is not removed).
FactorSeries standardize(const FactorSeries& series);

}  // namespace fsl
