#include "fsl/panel.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace fsl {

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

double parse_opt_double(const std::string& s) {
  if (s.empty() || s == "NA" || s == "nan" || s == "NaN" || s == ".")
    return missing();
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) return missing();
    return v;
  } catch (...) {
    return missing();
  }
}

}  // namespace

Exchange parse_exchange(const std::string& s) {
  std::string u = lower(s);
  if (u == "nyse") return Exchange::NYSE;
  if (u == "amex") return Exchange::AMEX;
  if (u == "nasdaq") return Exchange::NASDAQ;
  return Exchange::OTHER;
}

ShareClass parse_share_class(const std::string& s) {
  return lower(s) == "common" ? ShareClass::COMMON : ShareClass::OTHER;
}

int PricePanel::asset_index(const std::string& id) const {
  auto it = std::find(assets.begin(), assets.end(), id);
  return it == assets.end() ? -1 : int(it - assets.begin());
}

PricePanel load_panel(const std::string& path, const PanelSchema& schema,
                      LoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw Error("load_panel: cannot open '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw Error("load_panel: empty file");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  char delim = header.find('\t') != std::string::npos ? '\t' : ',';

  std::unordered_map<std::string, int> col;
  {
    auto names = split_line(header, delim);
    for (size_t i = 0; i < names.size(); ++i) col[names[i]] = int(i);
  }
  auto require = [&](const std::string& name) {
    auto it = col.find(name);
    if (it == col.end())
      throw Error("load_panel: missing required column '" + name + "'");
    return it->second;
  };
  auto optional = [&](const std::string& name) {
    auto it = col.find(name);
    return it == col.end() ? -1 : it->second;
  };
  int c_date = require(schema.date);
  int c_asset = require(schema.asset);
  int c_close = require(schema.close);
  int c_open = optional(schema.open), c_high = optional(schema.high),
      c_low = optional(schema.low), c_vwap = optional(schema.vwap),
      c_volume = optional(schema.volume), c_mcap = optional(schema.market_cap),
      c_exch = optional(schema.exchange), c_cls = optional(schema.share_class);

  struct Row {
    double open, high, low, close, vwap, volume, mcap;
    int exch, cls;
  };
  // keep-last dedup: later rows overwrite earlier ones for the same key
  std::map<std::pair<std::string, Date>, Row> rows;
  LoadStats local;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_line(line, delim);
    auto get = [&](int c) {
      return c >= 0 && c < int(f.size()) ? parse_opt_double(f[c]) : missing();
    };
    ++local.rows_read;
    Row r{get(c_open), get(c_high), get(c_low), get(c_close),
          get(c_vwap), get(c_volume), get(c_mcap), -1, -1};
    if (c_exch >= 0 && c_exch < int(f.size()) && !f[c_exch].empty())
      r.exch = int(parse_exchange(f[c_exch]));
    if (c_cls >= 0 && c_cls < int(f.size()) && !f[c_cls].empty())
      r.cls = int(parse_share_class(f[c_cls]));

    // positivity: any present price/volume must be > 0
    bool bad = false;
    for (double v : {r.open, r.high, r.low, r.close, r.vwap, r.volume, r.mcap})
      if (!is_missing(v) && v <= 0) bad = true;
    if (bad) {
      ++local.nonpositive_dropped;
      continue;
    }
    if (!is_missing(r.high) && !is_missing(r.low) && !is_missing(r.open) &&
        !is_missing(r.close)) {
      if (r.high < std::max(r.open, r.close) ||
          r.low > std::min(r.open, r.close)) {
        ++local.ohlc_violations_dropped;
        continue;
      }
    }
    Date d = parse_date(f[c_date]);
    auto key = std::make_pair(f[c_asset], d);
    if (rows.count(key)) ++local.duplicates_dropped;
    rows[key] = r;
  }
  if (rows.empty()) throw Error("load_panel: empty panel after parsing");

  std::set<std::string> asset_set;
  std::set<Date> date_set;
  for (auto& [k, v] : rows) {
    asset_set.insert(k.first);
    date_set.insert(k.second);
  }
  PricePanel p;
  p.assets.assign(asset_set.begin(), asset_set.end());
  p.calendar.assign(date_set.begin(), date_set.end());
  const auto nd = p.n_dates(), na = Eigen::Index(p.assets.size());
  for (MatrixXd* m : {&p.open, &p.high, &p.low, &p.close, &p.vwap, &p.volume,
                      &p.market_cap})
    m->setConstant(nd, na, missing());
  p.exchange_code.setConstant(nd, na, -1);
  p.share_class.setConstant(nd, na, -1);

  std::map<std::string, int> aidx;
  for (size_t i = 0; i < p.assets.size(); ++i) aidx[p.assets[i]] = int(i);
  std::map<Date, int> didx;
  for (size_t i = 0; i < p.calendar.size(); ++i) didx[p.calendar[i]] = int(i);

  for (auto& [k, r] : rows) {
    int a = aidx[k.first], t = didx[k.second];
    p.open(t, a) = r.open;
    p.high(t, a) = r.high;
    p.low(t, a) = r.low;
    p.close(t, a) = r.close;
    p.vwap(t, a) = r.vwap;
    p.volume(t, a) = r.volume;
    p.market_cap(t, a) = r.mcap;
    p.exchange_code(t, a) = r.exch;
    p.share_class(t, a) = r.cls;
  }
  if (stats) *stats = local;
  return p;
}

PricePanel apply_filters(const PricePanel& panel, const FilterPolicy& policy,
                         FilterStats* stats) {
  if (policy.min_price <= 0) throw Error("apply_filters: min_price must be > 0");
  if (policy.allowed_exchanges.empty())
    throw Error("apply_filters: allowed_exchanges must be non-empty");
  PricePanel out = panel;
  FilterStats local;
  for (Eigen::Index a = 0; a < panel.n_assets(); ++a) {
    for (Eigen::Index t = 0; t < panel.n_dates(); ++t) {
      if (is_missing(panel.close(t, a)) &&
          panel.exchange_code(t, a) < 0)  // no observation here at all
        continue;
      bool drop = false;
      if (policy.min_price_enabled && !is_missing(panel.close(t, a)) &&
          panel.close(t, a) < policy.min_price) {
        ++local.removed_min_price;
        drop = true;
      }
      if (!drop && policy.exchange_filter_enabled &&
          panel.exchange_code(t, a) >= 0 &&
          !policy.allowed_exchanges.count(
              Exchange(panel.exchange_code(t, a)))) {
        ++local.removed_exchange;
        drop = true;
      }
      if (!drop && policy.common_equity_only && panel.share_class(t, a) >= 0 &&
          ShareClass(panel.share_class(t, a)) != ShareClass::COMMON) {
        ++local.removed_share_class;
        drop = true;
      }
      if (drop) {
        out.open(t, a) = out.high(t, a) = out.low(t, a) = out.close(t, a) =
            out.vwap(t, a) = out.volume(t, a) = out.market_cap(t, a) =
                missing();
        out.exchange_code(t, a) = -1;
        out.share_class(t, a) = -1;
      }
    }
  }
  // drop assets left with no data
  std::vector<int> keep;
  for (Eigen::Index a = 0; a < out.n_assets(); ++a) {
    bool any = false;
    for (Eigen::Index t = 0; t < out.n_dates() && !any; ++t)
      any = !is_missing(out.close(t, a));
    if (any)
      keep.push_back(int(a));
    else
      ++local.assets_dropped;
  }
  if (keep.size() != out.assets.size()) {
    PricePanel trimmed;
    trimmed.calendar = out.calendar;
    const auto nd = out.n_dates();
    const auto na = Eigen::Index(keep.size());
    for (MatrixXd* m : {&trimmed.open, &trimmed.high, &trimmed.low,
                        &trimmed.close, &trimmed.vwap, &trimmed.volume,
                        &trimmed.market_cap})
      m->resize(nd, na);
    trimmed.exchange_code.resize(nd, na);
    trimmed.share_class.resize(nd, na);
    for (Eigen::Index i = 0; i < na; ++i) {
      int a = keep[i];
      trimmed.assets.push_back(out.assets[a]);
      trimmed.open.col(i) = out.open.col(a);
      trimmed.high.col(i) = out.high.col(a);
      trimmed.low.col(i) = out.low.col(a);
      trimmed.close.col(i) = out.close.col(a);
      trimmed.vwap.col(i) = out.vwap.col(a);
      trimmed.volume.col(i) = out.volume.col(a);
      trimmed.market_cap.col(i) = out.market_cap.col(a);
      trimmed.exchange_code.col(i) = out.exchange_code.col(a);
      trimmed.share_class.col(i) = out.share_class.col(a);
    }
    out = std::move(trimmed);
  }
  if (stats) *stats = local;
  return out;
}

ReturnPanel compute_returns(const PricePanel& panel) {
  ReturnPanel r;
  r.assets = panel.assets;
  r.calendar = panel.calendar;
  r.returns.setConstant(panel.n_dates(), panel.n_assets(), missing());
  for (Eigen::Index a = 0; a < panel.n_assets(); ++a)
    for (Eigen::Index t = 1; t < panel.n_dates(); ++t) {
      double c0 = panel.close(t - 1, a), c1 = panel.close(t, a);
      if (!is_missing(c0) && !is_missing(c1))
        r.returns(t, a) = c1 / c0 - 1.0;
    }
  return r;
}

std::string FilterStats::to_json() const {
  std::ostringstream os;
  os << "{\"removed_min_price\":" << removed_min_price
     << ",\"removed_exchange\":" << removed_exchange
     << ",\"removed_share_class\":" << removed_share_class
     << ",\"assets_dropped\":" << assets_dropped << "}";
  return os.str();
}

void write_panel(const PricePanel& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_panel: cannot open '" + path + "'");
  out << "date,asset,open,high,low,close,vwap,volume,market_cap,exchange,"
         "share_class\n";
  auto cell = [](double v) {
    if (is_missing(v)) return std::string();
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  static const char* exch_names[] = {"NYSE", "AMEX", "NASDAQ", "OTHER"};
  static const char* cls_names[] = {"COMMON", "OTHER"};
  for (Eigen::Index t = 0; t < panel.n_dates(); ++t)
    for (Eigen::Index a = 0; a < panel.n_assets(); ++a) {
      if (is_missing(panel.close(t, a))) continue;
      out << to_string(panel.calendar[t]) << ',' << panel.assets[a] << ','
          << cell(panel.open(t, a)) << ',' << cell(panel.high(t, a)) << ','
          << cell(panel.low(t, a)) << ',' << cell(panel.close(t, a)) << ','
          << cell(panel.vwap(t, a)) << ',' << cell(panel.volume(t, a)) << ','
          << cell(panel.market_cap(t, a)) << ','
          << (panel.exchange_code(t, a) >= 0
                  ? exch_names[panel.exchange_code(t, a)]
                  : "")
          << ','
          << (panel.share_class(t, a) >= 0 ? cls_names[panel.share_class(t, a)]
                                           : "")
          << '\n';
    }
}

}  // namespace fsl
