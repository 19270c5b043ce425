#pragma once

#include "fsl/dsl/ast.hpp"
#include "fsl/panel.hpp"

namespace fsl::dsl {

// One evaluated expression: dates x assets, NaN where the expression's
// inputs were incomplete inside its lookback.
struct SignalPanel {
  std::string name;
  int window = 0;  // evaluation window length, provenance only
  std::vector<std::string> assets;
  std::vector<Date> calendar;
  MatrixXd values;
};

// Recursive AST evaluation over the panel columns. Rolling operators run
// per asset (parallel across assets); rank runs per date over the assets
// present that date, average-rank ties, scaled to (0, 1].
// Throws if window < the expression's lookback.
SignalPanel evaluate(const AlphaExpression& expr, const PricePanel& panel,
                     const ReturnPanel& returns, int window = 252);

// Cross-sectional fractional rank of one date row; exposed for tests.
void rank_row(Eigen::RowVectorXd& row);

}  // namespace fsl::dsl
