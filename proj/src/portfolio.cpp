#include "fsl/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace fsl {

namespace {

// (month_key, indices of calendar dates in that month), in calendar order
std::vector<std::pair<int, std::vector<int>>> month_groups(
    const std::vector<Date>& calendar) {
  std::vector<std::pair<int, std::vector<int>>> groups;
  for (size_t i = 0; i < calendar.size(); ++i) {
    int key = calendar[i].month_key();
    if (groups.empty() || groups.back().first != key) groups.push_back({key, {}});
    groups.back().second.push_back(int(i));
  }
  return groups;
}

}  // namespace

std::vector<std::vector<int>> assign_bins(const std::vector<double>& values,
                                          int n_bins, TiePolicy policy) {
  if (n_bins < 2) throw Error("assign_bins: need at least 2 bins");
  const int n = int(values.size());
  std::vector<int> order;
  for (int i = 0; i < n; ++i)
    if (!is_missing(values[i])) order.push_back(i);
  std::vector<std::vector<int>> bins(n);
  const int m = int(order.size());
  if (m == 0) return bins;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] < values[b]; });

  // Mirrored tails; interior positions split evenly across interior bins.
  const int tail = std::max(1, m / n_bins);
  auto bin_of_position = [&](int pos) {
    if (pos < tail) return 0;
    if (pos >= m - tail) return n_bins - 1;
    if (n_bins == 2) return pos < m - tail ? 0 : 1;  // unreachable guard
    int interior = m - 2 * tail;
    return 1 + (pos - tail) * (n_bins - 2) / std::max(1, interior);
  };

  int i = 0;
  while (i < m) {
    int j = i;
    while (j + 1 < m && values[order[j + 1]] == values[order[i]]) ++j;
    if (policy == TiePolicy::STRICT) {
      int b = bin_of_position(i);
      for (int k = i; k <= j; ++k) bins[order[k]].push_back(b);
    } else {
      int lo = bin_of_position(i), hi = bin_of_position(j);
      for (int k = i; k <= j; ++k)
        for (int b = lo; b <= hi; ++b) bins[order[k]].push_back(b);
    }
    i = j + 1;
  }
  return bins;
}

namespace {

struct Holding {
  std::vector<int> assets;
  std::vector<double> weights;  // normalized within the portfolio
};

std::optional<Holding> make_holding(const std::vector<int>& members,
                                    const PricePanel& panel, int rebalance_idx,
                                    Weighting weighting) {
  Holding h;
  double total = 0.0;
  for (int a : members) {
    double w = weighting == Weighting::VALUE
                   ? panel.market_cap(rebalance_idx, a)
                   : 1.0;
    if (is_missing(w) || w <= 0) continue;
    h.assets.push_back(a);
    h.weights.push_back(w);
    total += w;
  }
  if (h.assets.empty() || total <= 0) return std::nullopt;
  for (double& w : h.weights) w /= total;
  return h;
}

// Weighted return over members with a present return that day, weights
// renormalized over the present subset.
double holding_day_return(const Holding& h, const ReturnPanel& returns,
                          int t) {
  double num = 0, den = 0;
  for (size_t i = 0; i < h.assets.size(); ++i) {
    double r = returns.returns(t, h.assets[i]);
    if (is_missing(r)) continue;
    num += h.weights[i] * r;
    den += h.weights[i];
  }
  return den > 0 ? num / den : missing();
}

}  // namespace

FactorSeries hml_decile_factor(const dsl::SignalPanel& signal,
                               const PricePanel& panel,
                               const ReturnPanel& returns, Weighting weighting,
                               TiePolicy tie_policy, int min_assets,
                               SortDiagnostics* diag) {
  if (signal.values.rows() != panel.n_dates() ||
      signal.values.cols() != panel.n_assets())
    throw Error("hml_decile_factor: signal and panel shapes differ");
  constexpr int kDeciles = 10;
  FactorSeries f;
  f.name = signal.name;
  f.frequency = Frequency::DAILY;
  f.dates = panel.calendar;
  f.returns = VectorXd::Constant(panel.n_dates(), missing());
  SortDiagnostics local;

  auto groups = month_groups(panel.calendar);
  for (size_t g = 0; g + 1 < groups.size(); ++g) {
    int rb = groups[g].second.back();  // last trading day of month g
    std::vector<double> vals(panel.n_assets(), missing());
    for (Eigen::Index a = 0; a < panel.n_assets(); ++a) {
      if (!is_missing(signal.values(rb, a)) &&
          (weighting == Weighting::EQUAL ||
           (!is_missing(panel.market_cap(rb, a)) &&
            panel.market_cap(rb, a) > 0)))
        vals[a] = signal.values(rb, a);
    }
    int eligible = 0;
    for (double v : vals) eligible += !is_missing(v);
    if (eligible < min_assets) {
      ++local.skipped_rebalances;
      continue;
    }
    auto bins = assign_bins(vals, kDeciles, tie_policy);
    std::vector<int> low, high;
    for (Eigen::Index a = 0; a < panel.n_assets(); ++a)
      for (int b : bins[a]) {
        if (b == 0) low.push_back(int(a));
        if (b == kDeciles - 1) high.push_back(int(a));
      }
    auto long_leg = make_holding(high, panel, rb, weighting);
    auto short_leg = make_holding(low, panel, rb, weighting);
    if (!long_leg || !short_leg) {
      ++local.skipped_rebalances;
      continue;
    }
    for (int t : groups[g + 1].second) {
      double lr = holding_day_return(*long_leg, returns, t);
      double sr = holding_day_return(*short_leg, returns, t);
      if (!is_missing(lr) && !is_missing(sr)) f.returns[t] = lr - sr;
    }
  }
  if (diag) *diag = local;
  return f;
}

TestAssetPanel bivariate_independent_sort(const dsl::SignalPanel& signal,
                                          const PricePanel& panel,
                                          const ReturnPanel& returns,
                                          const SortSpec& spec,
                                          SortDiagnostics* diag) {
  if (spec.size_bins < 2 || spec.signal_bins < 2)
    throw Error("bivariate_independent_sort: degenerate SortSpec");
  TestAssetPanel out;
  const int cells = spec.size_bins * spec.signal_bins;
  for (int i = 0; i < spec.size_bins; ++i)
    for (int j = 0; j < spec.signal_bins; ++j)
      out.portfolio_ids.push_back(signal.name + "|size" + std::to_string(i) +
                                  "|sig" + std::to_string(j));
  SortDiagnostics local;
  auto groups = month_groups(panel.calendar);
  std::vector<Eigen::RowVectorXd> rows;
  for (size_t g = 0; g + 1 < groups.size(); ++g) {
    int rb = groups[g].second.back();
    std::vector<double> size_vals(panel.n_assets(), missing());
    std::vector<double> sig_vals(panel.n_assets(), missing());
    for (Eigen::Index a = 0; a < panel.n_assets(); ++a) {
      double mc = panel.market_cap(rb, a), sv = signal.values(rb, a);
      if (!is_missing(mc) && mc > 0 && !is_missing(sv)) {
        size_vals[a] = mc;
        sig_vals[a] = sv;
      }
    }
    auto size_bins = assign_bins(size_vals, spec.size_bins, spec.tie_policy);
    auto sig_bins = assign_bins(sig_vals, spec.signal_bins, spec.tie_policy);

    // buy-and-hold monthly return per asset over the following month
    const auto& next_days = groups[g + 1].second;
    std::vector<double> monthly(panel.n_assets(), missing());
    for (Eigen::Index a = 0; a < panel.n_assets(); ++a) {
      double gross = 1.0;
      bool any = false;
      for (int t : next_days) {
        double r = returns.returns(t, a);
        if (!is_missing(r)) {
          gross *= 1.0 + r;
          any = true;
        }
      }
      if (any) monthly[a] = gross - 1.0;
    }

    Eigen::RowVectorXd row = Eigen::RowVectorXd::Constant(cells, missing());
    for (int i = 0; i < spec.size_bins; ++i)
      for (int j = 0; j < spec.signal_bins; ++j) {
        std::vector<int> members;
        for (Eigen::Index a = 0; a < panel.n_assets(); ++a) {
          bool in_size = std::count(size_bins[a].begin(), size_bins[a].end(), i);
          bool in_sig = std::count(sig_bins[a].begin(), sig_bins[a].end(), j);
          if (in_size && in_sig && !is_missing(monthly[a]))
            members.push_back(int(a));
        }
        auto h = make_holding(members, panel, rb, spec.weighting);
        if (!h) {
          ++local.empty_cells;
          continue;
        }
        double ret = 0;
        for (size_t k = 0; k < h->assets.size(); ++k)
          ret += h->weights[k] * monthly[h->assets[k]];
        row[i * spec.signal_bins + j] = ret;
      }
    out.months.push_back(panel.calendar[next_days.back()]);
    rows.push_back(row);
  }
  out.returns.resize(Eigen::Index(rows.size()), cells);
  for (size_t i = 0; i < rows.size(); ++i) out.returns.row(Eigen::Index(i)) = rows[i];
  if (diag) *diag = local;
  return out;
}

FactorSeries aggregate_daily_to_monthly(const FactorSeries& series) {
  if (series.frequency != Frequency::DAILY)
    throw Error("aggregate_daily_to_monthly: series is not daily");
  FactorSeries out;
  out.name = series.name;
  out.frequency = Frequency::MONTHLY;
  auto groups = month_groups(series.dates);
  std::vector<double> vals;
  for (auto& [key, idx] : groups) {
    double sum = 0;
    int count = 0;
    for (int t : idx) {
      if (!is_missing(series.returns[t])) {
        sum += series.returns[t];
        ++count;
      }
    }
    out.dates.push_back(series.dates[idx.back()]);
    vals.push_back(count > 0 ? 21.0 * sum / count : missing());
  }
  out.returns = Eigen::Map<VectorXd>(vals.data(), Eigen::Index(vals.size()));
  return out;
}

FactorSeries standardize(const FactorSeries& series) {
  double sum = 0, sumsq = 0;
  int count = 0;
  for (Eigen::Index t = 0; t < series.returns.size(); ++t) {
    double v = series.returns[t];
    if (is_missing(v)) continue;
    sum += v;
    sumsq += v * v;
    ++count;
  }
  if (count < 2) throw Error("standardize: need at least 2 observations");
  double var = (sumsq - sum * sum / count) / (count - 1);
  if (var <= 0) throw Error("standardize: zero variance in '" + series.name + "'");
  FactorSeries out = series;
  out.returns /= std::sqrt(var);
  out.standardized = true;
  return out;
}

}  // namespace fsl
