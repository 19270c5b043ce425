#pragma once

#include <string>
#include <vector>

#include "fsl/portfolio.hpp"
#include "fsl/reg/cv.hpp"
#include "fsl/reg/ols.hpp"

namespace fsl {

// Regression design of the cross-sectional stages: mean test-asset returns
// and covariance blocks against standardized control / candidate factors,
// all over one aligned monthly sample.
struct MomentSet {
  VectorXd rbar;   // n
  MatrixXd C_h;    // n x p, Cov(r, controls)
  MatrixXd C_g;    // n x d, Cov(r, alphas)
  int T = 0;       // aligned sample length
  std::vector<std::string> asset_labels;
  std::vector<std::string> control_labels;
  std::vector<std::string> alpha_labels;
};

struct MomentLog {
  std::vector<std::string> dropped_assets;  // incomplete over the aligned sample
};

// Aligns every factor and the asset panel on their common months
// (requiring at least min_overlap), standardizes factors over that sample,
// and computes means and T-1 covariances.
MomentSet compute_moments(const TestAssetPanel& assets,
                          const std::vector<FactorSeries>& controls,
                          const std::vector<FactorSeries>& alphas,
                          int min_overlap = 24, MomentLog* log = nullptr);

struct CvConfig {
  int k = 10;
  int n_taus = 200;
  double eps = 0.05;
  uint64_t seed = 0;
};

struct SelectionSets {
  std::vector<int> I1;
  std::vector<int> I2;                          // union over alphas
  std::vector<std::vector<int>> stage2_active;  // per alpha
};

struct PremiumRow {
  std::string factor;
  double lambda = 0.0;  // raw coefficient; bp value = lambda * 1e4
  double t = 0.0;       // NaN when the HC3 se is zero
  int stars = 0;        // 0 / 1 (5%) / 2 (1%)
  std::string estimator;
};

struct PremiumTable {
  double gamma0 = 0.0;
  std::vector<PremiumRow> alphas;
  std::vector<PremiumRow> controls;  // selected controls only
};

inline int significance_stars(double t) {
  double a = std::abs(t);
  if (std::isnan(a)) return 0;
  return a >= 2.576 ? 2 : (a >= 1.96 ? 1 : 0);
}

// Stage 1: 1-SE lasso of rbar on the control covariances.
std::vector<int> stage1_select(const MomentSet& m, const CvConfig& cfg);

// Stage 2: per-alpha 1-SE lasso of that alpha's covariances on the full
// control universe; independent tau per alpha, seeds derived per alpha.
SelectionSets stage2_select(const MomentSet& m, const CvConfig& cfg,
                            std::vector<int> stage1 = {});

// Stage 3: HC3 OLS of rbar on intercept + selected controls + all alphas.
// Exact-duplicate selected control columns are dropped with a warning count.
PremiumTable stage3_infer(const MomentSet& m, const SelectionSets& sets,
                          int* duplicate_controls_dropped = nullptr);

struct DsResult {
  SelectionSets sets;
  PremiumTable table;
};

DsResult run_double_selection(const MomentSet& m, const CvConfig& cfg);
DsResult run_single_selection(const MomentSet& m, const CvConfig& cfg);

PremiumTable run_enet_benchmark(
    const MomentSet& m, const CvConfig& cfg,
    const std::vector<double>& l1_ratios = {0.1, 0.3, 0.5, 0.7, 0.9, 1.0});

PremiumTable run_pca_benchmark(const MomentSet& m, double var_target = 0.90);

}  // namespace fsl
