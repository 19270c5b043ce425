#include "fsl/reg/cv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fsl/rng.hpp"

namespace fsl::reg {

std::vector<int> fold_assignment(int n, int k, uint64_t seed) {
  if (k < 2) throw Error("kfold_cv: k must be >= 2");
  if (k > n) throw Error("kfold_cv: k exceeds the number of observations");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<int> fold(n);
  int base = n / k, rem = n % k, pos = 0;
  for (int f = 0; f < k; ++f) {
    int size = base + (f < rem ? 1 : 0);
    for (int i = 0; i < size; ++i) fold[order[pos++]] = f;
  }
  return fold;
}

CvCurve summarize_cv(const std::vector<double>& taus,
                     const MatrixXd& fold_mse) {
  const int k = int(fold_mse.rows());
  const int m = int(fold_mse.cols());
  CvCurve c;
  c.taus = taus;
  c.mean_error.resize(m);
  c.std_error.resize(m);
  for (int t = 0; t < m; ++t) {
    double mean = fold_mse.col(t).mean();
    double var = (fold_mse.col(t).array() - mean).square().sum() /
                 std::max(1, k - 1);
    c.mean_error[t] = mean;
    c.std_error[t] = std::sqrt(var / k);
  }
  // Grid is decreasing, so the first index attaining the minimum is the
  // largest tau (tie-break toward sparsity).
  c.idx_min = 0;
  for (int t = 1; t < m; ++t)
    if (c.mean_error[t] < c.mean_error[c.idx_min]) c.idx_min = t;
  double threshold = c.mean_error[c.idx_min] + c.std_error[c.idx_min];
  c.idx_1se = c.idx_min;
  for (int t = 0; t <= c.idx_min; ++t) {
    if (c.mean_error[t] <= threshold) {
      c.idx_1se = t;
      break;
    }
  }
  c.tau_min = taus[c.idx_min];
  c.tau_1se = taus[c.idx_1se];
  return c;
}

namespace {

MatrixXd cv_fold_mse(const MatrixXd& X, const VectorXd& y, int k,
                     uint64_t seed, const std::vector<double>& taus,
                     double l1_ratio, const FitOptions& opts) {
  const int n = int(X.rows());
  std::vector<int> fold = fold_assignment(n, k, seed);
  MatrixXd fold_mse(k, taus.size());

#pragma omp parallel for schedule(dynamic)
  for (int f = 0; f < k; ++f) {
    std::vector<int> train, test;
    for (int i = 0; i < n; ++i) (fold[i] == f ? test : train).push_back(i);
    MatrixXd Xtr(train.size(), X.cols()), Xte(test.size(), X.cols());
    VectorXd ytr(train.size()), yte(test.size());
    for (size_t i = 0; i < train.size(); ++i) {
      Xtr.row(i) = X.row(train[i]);
      ytr[i] = y[train[i]];
    }
    for (size_t i = 0; i < test.size(); ++i) {
      Xte.row(i) = X.row(test[i]);
      yte[i] = y[test[i]];
    }
    // Warm-started descent along the shared (full-data) grid.
    VectorXd warm;
    for (size_t t = 0; t < taus.size(); ++t) {
      LassoFit fit = elastic_net_fit(Xtr, ytr, taus[t], l1_ratio, opts,
                                     warm.size() ? &warm : nullptr);
      warm = fit.coef;
      VectorXd err = yte - fit.predict(Xte);
      fold_mse(f, t) = err.squaredNorm() / double(test.size());
    }
  }
  return fold_mse;
}

}  // namespace

CvCurve kfold_cv(const MatrixXd& X, const VectorXd& y, int k, uint64_t seed,
                 int n_taus, double eps, double l1_ratio,
                 const FitOptions& opts) {
  Path path = lasso_path(X, y, n_taus, eps, l1_ratio, opts);
  if (path.degenerate) {
    CvCurve c;
    c.taus = path.taus;
    c.mean_error.assign(path.taus.size(), 0.0);
    c.std_error.assign(path.taus.size(), 0.0);
    return c;
  }
  MatrixXd fold_mse = cv_fold_mse(X, y, k, seed, path.taus, l1_ratio, opts);
  return summarize_cv(path.taus, fold_mse);
}

EnetCvResult enet_cv(const MatrixXd& X, const VectorXd& y,
                     const std::vector<double>& l1_ratios, int k,
                     uint64_t seed, int n_taus, double eps,
                     const FitOptions& opts) {
  if (l1_ratios.empty()) throw Error("enet_cv: empty l1_ratio grid");
  EnetCvResult best;
  bool have = false;
  for (double rho : l1_ratios) {
    CvCurve c = kfold_cv(X, y, k, seed, n_taus, eps, rho, opts);
    if (!have || c.mean_error[c.idx_min] <
                     best.curve.mean_error[best.curve.idx_min]) {
      best.l1_ratio = rho;
      best.curve = c;
      have = true;
    }
  }
  best.fit = elastic_net_fit(X, y, best.curve.tau_1se, best.l1_ratio, opts);
  return best;
}

}  // namespace fsl::reg
