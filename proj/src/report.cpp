#include "fsl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fsl {

namespace {

std::string stars_text(int stars) {
  return stars == 2 ? "**" : (stars == 1 ? "*" : "");
}

std::string fmt_bp(double lambda_raw) {
  return std::to_string(long(std::llround(lambda_raw * 1e4)));
}

std::string fmt_t(double t) {
  if (std::isnan(t)) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", t);
  return buf;
}

std::vector<PremiumRow> sorted_rows(const PremiumTable& table) {
  std::vector<PremiumRow> rows = table.alphas;
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    double ta = std::isnan(a.t) ? -1 : std::abs(a.t);
    double tb = std::isnan(b.t) ? -1 : std::abs(b.t);
    return ta > tb;
  });
  return rows;
}

}  // namespace

std::string format_premium(double lambda_raw, double t) {
  return fmt_bp(lambda_raw) + ", " + fmt_t(t) + stars_text(significance_stars(t));
}

std::string render_table(const PremiumTable& table, TableStyle style) {
  auto rows = sorted_rows(table);
  std::ostringstream os;
  if (style == TableStyle::TSV) {
    os << "factor\tlambda_bp\tt\tstars\testimator\n";
    for (const auto& r : rows)
      os << r.factor << '\t' << fmt_bp(r.lambda) << '\t' << fmt_t(r.t) << '\t'
         << stars_text(r.stars) << '\t' << r.estimator << '\n';
    return os.str();
  }
  os << "| Factor | lambda_s (bp), t | Estimator |\n";
  os << "| --- | --- | --- |\n";
  for (const auto& r : rows)
    os << "| " << r.factor << " | " << format_premium(r.lambda, r.t) << " | "
       << r.estimator << " |\n";
  return os.str();
}

PremiumTable parse_table_tsv(const std::string& text) {
  PremiumTable table;
  std::istringstream is(text);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (first) {
      first = false;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string factor, bp, t, stars, estimator;
    std::getline(ls, factor, '\t');
    std::getline(ls, bp, '\t');
    std::getline(ls, t, '\t');
    std::getline(ls, stars, '\t');
    std::getline(ls, estimator, '\t');
    PremiumRow row;
    row.factor = factor;
    row.lambda = std::stod(bp) / 1e4;
    row.t = t == "undefined" ? missing() : std::stod(t);
    row.stars = int(stars.size());
    row.estimator = estimator;
    table.alphas.push_back(row);
  }
  return table;
}

}  // namespace fsl
