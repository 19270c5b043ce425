#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "fsl/panel.hpp"

using namespace fsl;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& text) {
    static int counter = 0;
    path = "panel_test_" + std::to_string(counter++) + ".csv";
    std::ofstream(path) << text;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

const char* kHeader =
    "date,asset,open,high,low,close,vwap,volume,market_cap,exchange,"
    "share_class\n";

std::string row(const std::string& date, const std::string& asset,
                double close, double cap = 100.0,
                const std::string& exch = "NYSE",
                const std::string& cls = "COMMON") {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%s,%g,%g,%g,%g,%g,1000,%g,%s,%s\n",
                date.c_str(), asset.c_str(), close, close + 1, close - 1,
                close, close, cap, exch.c_str(), cls.c_str());
  return buf;
}

}  // namespace

TEST_CASE("load_panel: well-formed 3-row file") {
  TempFile f(kHeader + row("2020-01-02", "AAA", 10) +
             row("2020-01-03", "AAA", 11) + row("2020-01-06", "AAA", 12));
  LoadStats st;
  PricePanel p = load_panel(f.path, {}, &st);
  CHECK(p.n_assets() == 1);
  CHECK(p.n_dates() == 3);
  CHECK(st.rows_read == 3);
  CHECK(p.close(2, 0) == 12.0);
  CHECK(p.calendar[0] == parse_date("2020-01-02"));
}

TEST_CASE("load_panel: duplicate (asset, date) keeps last, counts one") {
  TempFile f(kHeader + row("2020-01-02", "AAA", 10) +
             row("2020-01-02", "AAA", 99));
  LoadStats st;
  PricePanel p = load_panel(f.path, {}, &st);
  CHECK(p.n_dates() == 1);
  CHECK(st.duplicates_dropped == 1);
  CHECK(p.close(0, 0) == 99.0);
}

TEST_CASE("load_panel: missing close column is a schema error naming it") {
  TempFile f("date,asset,open\n2020-01-02,AAA,10\n");
  CHECK_THROWS_WITH_AS((void)load_panel(f.path, {}),
                       doctest::Contains("close"), Error);
}

TEST_CASE("load_panel: unreadable file and empty panel") {
  CHECK_THROWS_AS((void)load_panel("no_such_file.csv", {}), Error);
  TempFile f{std::string(kHeader)};
  CHECK_THROWS_WITH_AS((void)load_panel(f.path, {}),
                       doctest::Contains("empty"), Error);
}

TEST_CASE("load_panel: nonpositive prices dropped and counted") {
  TempFile f(kHeader + row("2020-01-02", "AAA", 10) +
             row("2020-01-03", "AAA", -5) + row("2020-01-06", "AAA", 12));
  LoadStats st;
  PricePanel p = load_panel(f.path, {}, &st);
  CHECK(st.nonpositive_dropped == 1);
  CHECK(p.n_dates() == 2);
}

TEST_CASE("load_panel: tab-separated input and schema remapping") {
  TempFile f(
      "dt\tticker\tpx\n2020-01-02\tAAA\t10\n2020-01-03\tAAA\t11\n");
  PanelSchema s;
  s.date = "dt";
  s.asset = "ticker";
  s.close = "px";
  PricePanel p = load_panel(f.path, s);
  CHECK(p.n_dates() == 2);
  CHECK(is_missing(p.volume(0, 0)));  // unmapped optional column
}

TEST_CASE("apply_filters: $5 minimum price removes a penny-stock asset") {
  TempFile f(kHeader + row("2020-01-02", "CHEAP", 4.99) +
             row("2020-01-03", "CHEAP", 4.99) +
             row("2020-01-02", "OK", 50) + row("2020-01-03", "OK", 50));
  PricePanel p = load_panel(f.path, {});
  FilterStats st;
  PricePanel out = apply_filters(p, {}, &st);
  CHECK(out.n_assets() == 1);
  CHECK(out.assets[0] == "OK");
  CHECK(st.removed_min_price == 2);
  CHECK(st.assets_dropped == 1);
}

TEST_CASE("apply_filters: all predicates disabled is the identity") {
  TempFile f(kHeader + row("2020-01-02", "CHEAP", 1.0, 5, "OTHER", "OTHER") +
             row("2020-01-03", "OK", 50));
  PricePanel p = load_panel(f.path, {});
  FilterPolicy off;
  off.min_price_enabled = false;
  off.exchange_filter_enabled = false;
  off.common_equity_only = false;
  PricePanel out = apply_filters(p, off);
  CHECK(out.n_assets() == p.n_assets());
  CHECK((out.close - p.close).array().isNaN().count() ==
        p.close.array().isNaN().count());
}

TEST_CASE("apply_filters: exchange predicate drops OTHER-venue assets") {
  std::string text = kHeader;
  for (int i = 0; i < 10; ++i)
    text += row("2020-01-02", "A" + std::to_string(i), 50, 100,
                i < 3 ? "OTHER" : "NYSE");
  TempFile f(text);
  PricePanel p = load_panel(f.path, {});
  FilterStats st;
  PricePanel out = apply_filters(p, {}, &st);
  CHECK(out.n_assets() == 7);
  CHECK(st.removed_exchange == 3);
}

TEST_CASE("apply_filters is idempotent") {
  std::string text = kHeader;
  for (int i = 0; i < 8; ++i) {
    text += row("2020-01-02", "A" + std::to_string(i), 3 + i, 100,
                i % 3 == 0 ? "OTHER" : "NASDAQ",
                i % 4 == 0 ? "OTHER" : "COMMON");
    text += row("2020-01-03", "A" + std::to_string(i), 4 + i);
  }
  TempFile f(text);
  PricePanel p = load_panel(f.path, {});
  PricePanel once = apply_filters(p, {});
  PricePanel twice = apply_filters(once, {});
  REQUIRE(once.assets == twice.assets);
  REQUIRE(once.calendar == twice.calendar);
  for (Eigen::Index i = 0; i < once.n_dates(); ++i)
    for (Eigen::Index j = 0; j < once.n_assets(); ++j) {
      bool m1 = is_missing(once.close(i, j)), m2 = is_missing(twice.close(i, j));
      REQUIRE(m1 == m2);
      if (!m1) REQUIRE(once.close(i, j) == twice.close(i, j));
    }
}

TEST_CASE("filter monotonicity: raising min_price never adds cells") {
  std::string text = kHeader;
  for (int i = 0; i < 6; ++i)
    text += row("2020-01-02", "A" + std::to_string(i), 2.0 + 2 * i);
  TempFile f(text);
  PricePanel p = load_panel(f.path, {});
  FilterPolicy loose, tight;
  loose.min_price = 3.0;
  tight.min_price = 8.0;
  PricePanel a = apply_filters(p, loose), b = apply_filters(p, tight);
  for (const std::string& asset : b.assets)
    CHECK(std::find(a.assets.begin(), a.assets.end(), asset) != a.assets.end());
}

TEST_CASE("compute_returns: arithmetic, gaps, constants") {
  TempFile f(kHeader + row("2020-01-02", "AAA", 100) +
             row("2020-01-03", "AAA", 110) + row("2020-01-02", "GAP", 100) +
             row("2020-01-06", "GAP", 121) + row("2020-01-02", "FLAT", 50) +
             row("2020-01-03", "FLAT", 50) + row("2020-01-06", "FLAT", 50));
  PricePanel p = load_panel(f.path, {});
  ReturnPanel r = compute_returns(p);
  int a = p.asset_index("AAA"), g = p.asset_index("GAP"),
      fl = p.asset_index("FLAT");
  CHECK(is_missing(r.returns(0, a)));
  CHECK(r.returns(1, a) == doctest::Approx(0.10));
  // GAP has no close on 2020-01-03: both surrounding returns stay missing.
  CHECK(is_missing(r.returns(1, g)));
  CHECK(is_missing(r.returns(2, g)));
  CHECK(r.returns(1, fl) == 0.0);
  CHECK(r.returns(2, fl) == 0.0);
}

TEST_CASE("return reconstruction compounds back to the price ratio") {
  std::string text = kHeader;
  double px = 100.0;
  std::vector<std::string> dates = {"2020-01-02", "2020-01-03", "2020-01-06",
                                    "2020-01-07", "2020-01-08"};
  double first = px;
  for (size_t i = 0; i < dates.size(); ++i) {
    text += row(dates[i], "AAA", px);
    px *= (1.0 + 0.01 * double(i) - 0.015);
  }
  TempFile f(text);
  PricePanel p = load_panel(f.path, {});
  ReturnPanel r = compute_returns(p);
  double acc = 1.0;
  for (Eigen::Index t = 1; t < p.n_dates(); ++t) acc *= 1.0 + r.returns(t, 0);
  CHECK(acc == doctest::Approx(p.close(p.n_dates() - 1, 0) / first)
                   .epsilon(1e-12));
}

TEST_CASE("write_panel round-trips through load_panel") {
  TempFile f(kHeader + row("2020-01-02", "AAA", 10, 111) +
             row("2020-01-03", "AAA", 11, 112) +
             row("2020-01-03", "BBB", 20, 500, "NASDAQ"));
  PricePanel p = load_panel(f.path, {});
  const std::string snap = "panel_test_snapshot.csv";
  write_panel(p, snap);
  PricePanel q = load_panel(snap, {});
  std::remove(snap.c_str());
  REQUIRE(q.assets == p.assets);
  REQUIRE(q.calendar == p.calendar);
  for (Eigen::Index i = 0; i < p.n_dates(); ++i)
    for (Eigen::Index j = 0; j < p.n_assets(); ++j) {
      CHECK(is_missing(q.close(i, j)) == is_missing(p.close(i, j)));
      if (!is_missing(p.close(i, j))) {
        CHECK(q.close(i, j) == doctest::Approx(p.close(i, j)).epsilon(1e-12));
        CHECK(q.market_cap(i, j) ==
              doctest::Approx(p.market_cap(i, j)).epsilon(1e-12));
        CHECK(q.exchange_code(i, j) == p.exchange_code(i, j));
      }
    }
}

TEST_CASE("calendar is the union of asset calendars") {
  TempFile f(kHeader + row("2020-01-02", "AAA", 10) +
             row("2020-01-06", "BBB", 20));
  PricePanel p = load_panel(f.path, {});
  CHECK(p.n_dates() == 2);
  CHECK(is_missing(p.close(1, p.asset_index("AAA"))));
  CHECK(is_missing(p.close(0, p.asset_index("BBB"))));
}

TEST_CASE("strict ISO-8601 dates") {
  CHECK(parse_date("2020-01-02").ymd == 20200102);
  CHECK_THROWS_AS((void)parse_date("2020/01/02"), Error);
  CHECK_THROWS_AS((void)parse_date("2020-13-02"), Error);
  CHECK_THROWS_AS((void)parse_date("20-01-02"), Error);
  CHECK(to_string(Date(20200102)) == "2020-01-02");
}
