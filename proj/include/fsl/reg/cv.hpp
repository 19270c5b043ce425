#pragma once

#include <vector>

#include "fsl/common.hpp"
#include "fsl/reg/lasso.hpp"

namespace fsl::reg {

// Cross-validation curve over a decreasing tau grid. tau_1se is the largest
// tau whose mean error is within one standard error of the minimum (the
// 1-SE rule); ties in the argmin break toward the larger tau.
struct CvCurve {
  std::vector<double> taus;        // strictly decreasing
  std::vector<double> mean_error;  // mean held-out MSE per tau
  std::vector<double> std_error;   // std(fold MSEs) / sqrt(k)
  int idx_min = 0;
  int idx_1se = 0;
  double tau_min = 0.0;
  double tau_1se = 0.0;
};

// Deterministic fold assignment: a seeded permutation (SplitMix64
// Fisher-Yates) split into contiguous blocks; the first n % k folds take one
// extra observation. fold_of[i] in [0, k).
std::vector<int> fold_assignment(int n, int k, uint64_t seed);

// Selects tau_min / tau_1se given fold MSEs (folds x taus).
CvCurve summarize_cv(const std::vector<double>& taus,
                     const MatrixXd& fold_mse);

CvCurve kfold_cv(const MatrixXd& X, const VectorXd& y, int k, uint64_t seed,
                 int n_taus = 200, double eps = 0.05, double l1_ratio = 1.0,
                 const FitOptions& opts = {});

// Cross-validates the cross product of l1_ratios x tau grid; picks the
// l1_ratio with the smallest minimum mean CV error, then applies the 1-SE
// rule within that ratio's curve and refits on the full data.
struct EnetCvResult {
  double l1_ratio = 1.0;
  CvCurve curve;
  LassoFit fit;  // full-data fit at (l1_ratio, tau_1se)
};

EnetCvResult enet_cv(const MatrixXd& X, const VectorXd& y,
                     const std::vector<double>& l1_ratios, int k,
                     uint64_t seed, int n_taus = 200, double eps = 0.05,
                     const FitOptions& opts = {});

}  // namespace fsl::reg
