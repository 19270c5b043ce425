#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fsl/report.hpp"

using namespace fsl;

namespace {

PremiumTable sample_table() {
  PremiumTable t;
  t.gamma0 = 0.002;
  t.alphas.push_back({"Multi-Period Mean Reversion Ratio (046)", 0.0079, 3.68,
                      significance_stars(3.68), "DS"});
  t.alphas.push_back({"Price-Volume Rank Correlation (001)", -0.0031, -2.10,
                      significance_stars(-2.10), "DS"});
  t.alphas.push_back({"Volume MACD Histogram (155)", 0.0004, 0.55,
                      significance_stars(0.55), "DS"});
  t.controls.push_back({"mktrf", 0.0051, 4.20, 2, "DS"});
  return t;
}

std::string golden_path(const std::string& name) {
  return std::string(FSL_SOURCE_DIR) + "/tests/golden/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("format_premium: compact cell format") {
  CHECK(format_premium(0.0079, 3.68) == "79, 3.68**");
  CHECK(format_premium(-0.0031, -2.10) == "-31, -2.10*");
  CHECK(format_premium(0.0004, 0.55) == "4, 0.55");
}

TEST_CASE("star thresholds sit exactly at 1.96 and 2.576") {
  // display rounds to 1.96 but the star uses the raw value
  CHECK(format_premium(0.001, 1.9599) == "10, 1.96");
  CHECK(format_premium(0.001, 1.96) == "10, 1.96*");
  CHECK(format_premium(0.001, 2.5759) == "10, 2.58*");
  CHECK(format_premium(0.001, 2.576) == "10, 2.58**");
  CHECK(format_premium(0.001, -2.576) == "10, -2.58**");
}

TEST_CASE("undefined t renders explicitly") {
  std::string cell = format_premium(0.001, missing());
  CHECK(cell.find("undefined") != std::string::npos);
  CHECK(cell.find('*') == std::string::npos);
}

TEST_CASE("rows sort by descending |t|, undefined last") {
  PremiumTable t = sample_table();
  t.alphas.push_back({"broken", 0.001, missing(), 0, "DS"});
  std::string tsv = render_table(t, TableStyle::TSV);
  size_t a = tsv.find("046");
  size_t b = tsv.find("001");
  size_t c = tsv.find("155");
  size_t d = tsv.find("broken");
  CHECK(a < b);
  CHECK(b < c);
  CHECK(c < d);
}

TEST_CASE("empty table renders header only") {
  PremiumTable t;
  std::string tsv = render_table(t, TableStyle::TSV);
  CHECK(tsv.find("factor") != std::string::npos);
  std::istringstream is(tsv);
  std::string line;
  int lines = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 1);
}

TEST_CASE("tsv output matches the golden file") {
  std::string got = render_table(sample_table(), TableStyle::TSV);
  CHECK(got == slurp(golden_path("report_sample.tsv")));
}

TEST_CASE("markdown output matches the golden file") {
  std::string got = render_table(sample_table(), TableStyle::MARKDOWN);
  CHECK(got == slurp(golden_path("report_sample.md")));
}

TEST_CASE("tsv round-trips through parse_table_tsv") {
  PremiumTable t = sample_table();
  std::string tsv = render_table(t, TableStyle::TSV);
  PremiumTable back = parse_table_tsv(tsv);
  REQUIRE(back.alphas.size() == t.alphas.size());
  for (size_t i = 0; i < t.alphas.size(); ++i) {
    CHECK(back.alphas[i].factor == t.alphas[i].factor);
    CHECK(back.alphas[i].stars == t.alphas[i].stars);
    CHECK(back.alphas[i].estimator == t.alphas[i].estimator);
  }
  // render of the parsed table is identical (rounding is stable)
  CHECK(render_table(back, TableStyle::TSV) == tsv);
}
