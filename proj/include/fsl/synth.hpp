#pragma once

#include <string>
#include <vector>

#include "fsl/pipeline.hpp"
#include "fsl/portfolio.hpp"

namespace fsl::synth {

// Fully known sparse factor model:
//   control shocks  h_t ~ N(0, I_p)
//   alpha shocks    g_jt = confounding_j . h_t + c_j eps_jt,
//                   c_j = sqrt(max(0, 1 - |confounding_j|^2))
//   loadings        B ~ N(0, 1) per asset and factor
//   returns         r_it = gamma0 + beta_i' Sigma_F lambda + beta_i' F_t
//                          + noise_scale * eps_it
// so the population cross-sectional regression of mean returns on
// Cov(r, F) has coefficients exactly (control_lambda, alpha_lambda).
struct SyntheticDGP {
  int n_assets = 200;
  int T = 600;  // months
  int p_controls = 50;
  int d_alphas = 1;
  VectorXd control_lambda;              // length p
  VectorXd alpha_lambda;                // length d
  MatrixXd confounding;                 // d x p loadings of alphas on controls
  std::vector<int> zero_loading_controls;  // assets carry no direct loading
  double noise_scale = 1.0;
  double gamma0 = 0.0;
  uint64_t seed = 1;

  void validate() const;
  std::string to_json() const;
  static SyntheticDGP from_json(const std::string& text);
};

struct Truth {
  VectorXd control_lambda;
  VectorXd alpha_lambda;
  MatrixXd loadings_h;  // n x p
  MatrixXd loadings_g;  // n x d
  VectorXd expected_return;  // population mean per asset
  std::vector<int> support;  // nonzero control_lambda indices
};

struct SyntheticData {
  TestAssetPanel assets;
  std::vector<FactorSeries> controls;
  std::vector<FactorSeries> alphas;
  Truth truth;
};

SyntheticData generate(const SyntheticDGP& dgp);

// Exhaustive KKT search over all sign-support patterns (3^p), solving the
// stationarity system per pattern and keeping the feasible minimizer.
// Same objective and internal standardization convention as reg::lasso_fit,
// computed by an independent dense-solve route. p <= 12.
struct OracleFit {
  double intercept = 0.0;
  VectorXd coef;
  double objective = 0.0;
};

OracleFit oracle_lasso(const MatrixXd& X, const VectorXd& y, double tau);

struct RecoveryRun {
  uint64_t seed = 0;
  bool recovered = false;   // I1 contains the true support
  int false_discoveries = 0;
};

struct RecoveryResult {
  double rate = 0.0;
  std::vector<RecoveryRun> runs;
};

// Monte-Carlo frequency of stage-1 support recovery; run i uses seed
// dgp.seed + i. Runs execute in parallel, results are ordered by run.
RecoveryResult support_recovery_rate(const SyntheticDGP& dgp, int runs,
                                     const CvConfig& cv);

}  // namespace fsl::synth
