#pragma once

#include <vector>

#include "fsl/common.hpp"

namespace fsl::reg {

// Least squares with the HC3 heteroskedasticity-robust covariance
//   (X'X)^-1 X' diag(e_i^2 / (1 - h_ii)^2) X (X'X)^-1.
// The caller supplies an intercept column when one is wanted.
struct OlsFit {
  VectorXd coef;
  VectorXd hc3_se;      // 0 where the fit is exact
  VectorXd t;           // NaN where hc3_se == 0
  VectorXd residuals;
  VectorXd leverage;    // h_ii
};

// Throws Error on rank deficiency (naming the dependent columns) or on a
// perfect-leverage row (h_ii == 1).
OlsFit ols_hc3(const MatrixXd& X, const VectorXd& y,
               const std::vector<std::string>* col_names = nullptr);

}  // namespace fsl::reg
