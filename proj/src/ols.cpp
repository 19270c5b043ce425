#include "fsl/reg/ols.hpp"

#include <cmath>
#include <sstream>

namespace fsl::reg {

OlsFit ols_hc3(const MatrixXd& X, const VectorXd& y,
               const std::vector<std::string>* col_names) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (y.size() != n) throw Error("ols_hc3: X and y are not conformable");
  if (n <= p)
    throw Error("ols_hc3: under-identified (" + std::to_string(n) +
                " rows for " + std::to_string(p) + " columns)");

  Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    // The trailing permuted columns are the ones the pivoting rejected;
    // name each together with the kept columns that span it.
    auto label = [&](Eigen::Index j) {
      return col_names && j < Eigen::Index(col_names->size())
                 ? (*col_names)[j]
                 : "#" + std::to_string(j);
    };
    auto perm = qr.colsPermutation().indices();
    MatrixXd kept(n, qr.rank());
    for (Eigen::Index i = 0; i < qr.rank(); ++i) kept.col(i) = X.col(perm[i]);
    std::ostringstream os;
    os << "ols_hc3: rank-deficient design; dependent columns:";
    for (Eigen::Index i = qr.rank(); i < p; ++i) {
      Eigen::Index j = perm[i];
      os << " " << label(j) << " (spanned by";
      VectorXd w = kept.colPivHouseholderQr().solve(X.col(j));
      double scale = w.lpNorm<Eigen::Infinity>();
      for (Eigen::Index k = 0; k < qr.rank(); ++k)
        if (std::abs(w[k]) > 1e-8 * std::max(1.0, scale))
          os << " " << label(perm[k]);
      os << ")";
    }
    throw Error(os.str());
  }

  OlsFit fit;
  fit.coef = qr.solve(y);
  fit.residuals = y - X * fit.coef;
  // An exact fit leaves rounding dust in the residuals; snap it to zero so
  // the standard errors come out exactly 0 (and t undefined).
  double ref = std::max(1.0, y.lpNorm<Eigen::Infinity>());
  if (fit.residuals.lpNorm<Eigen::Infinity>() <= 1e-12 * ref)
    fit.residuals.setZero();

  MatrixXd xtx_inv = (X.transpose() * X).ldlt().solve(MatrixXd::Identity(p, p));
  fit.leverage.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    fit.leverage[i] = X.row(i) * xtx_inv * X.row(i).transpose();
    if (fit.leverage[i] >= 1.0 - 1e-12)
      throw Error("ols_hc3: perfect-leverage observation at row " +
                  std::to_string(i));
  }

  VectorXd w = fit.residuals.array().square() /
               (1.0 - fit.leverage.array()).square();
  MatrixXd meat = X.transpose() * w.asDiagonal() * X;
  MatrixXd cov = xtx_inv * meat * xtx_inv;

  fit.hc3_se.resize(p);
  fit.t.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    fit.hc3_se[j] = std::sqrt(std::max(0.0, cov(j, j)));
    fit.t[j] = fit.hc3_se[j] > 0 ? fit.coef[j] / fit.hc3_se[j] : missing();
  }
  return fit;
}

}  // namespace fsl::reg
