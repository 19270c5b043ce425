#pragma once

#include <string>
#include <vector>

#include "fsl/common.hpp"

namespace fsl::reg {

// sign(z) * max(|z| - g, 0). Coordinate-descent kernel.
inline double soft_threshold(double z, double g) {
  if (z > g) return z - g;
  if (z < -g) return -(-z - g);
  return 0.0;
}

struct FitOptions {
  // Tighter than the 1e-6 certificate the fits must carry: warm- and
  // cold-started solves have to agree to 1e-8, which needs headroom.
  double tol = 1e-10;       // max abs coefficient change per sweep
  int max_sweeps = 10000;
  double kkt_tol = 1e-9;    // stationarity certificate, standardized scale
};

// Solution of
//   min over (gamma, lambda) of
//     (1/n) ||y - 1*gamma - X*lambda||^2
//     + (tau/n) (l1_ratio*||b||_1 + (1-l1_ratio)/2*||b||^2)
// where b are the coefficients of the internally standardized columns and
// lambda = b / column_scale. gamma is unpenalized.
struct LassoFit {
  double intercept = 0.0;
  VectorXd coef;                // original (unstandardized) scale
  double tau = 0.0;
  double l1_ratio = 1.0;
  std::vector<int> active_set;  // sorted indices with nonzero coefficient
  int iterations = 0;
  bool converged = false;
  double kkt_violation = 0.0;   // max stationarity residual, standardized
  double objective = 0.0;

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    return intercept + x.dot(coef.transpose());
  }
  VectorXd predict(const MatrixXd& X) const {
    return (X * coef).array() + intercept;
  }
};

LassoFit lasso_fit(const MatrixXd& X, const VectorXd& y, double tau,
                   const FitOptions& opts = {});

LassoFit elastic_net_fit(const MatrixXd& X, const VectorXd& y, double tau,
                         double l1_ratio, const FitOptions& opts = {},
                         const VectorXd* warm_coef = nullptr);

// Smallest tau with an empty active set: 2 * max_j |z_j' (y - ybar)| over
// standardized columns, divided by l1_ratio.
double tau_max(const MatrixXd& X, const VectorXd& y, double l1_ratio = 1.0);

struct Path {
  std::vector<double> taus;     // strictly decreasing, taus.back()/front() = eps
  std::vector<LassoFit> fits;   // one per tau, warm-started
  bool degenerate = false;      // y had zero variance; all fits are empty
};

Path lasso_path(const MatrixXd& X, const VectorXd& y, int n_taus = 200,
                double eps = 0.05, double l1_ratio = 1.0,
                const FitOptions& opts = {});

// Diagnostic JSON line for one fit: tau, active set, objective, iterations,
// max KKT violation.
std::string fit_diagnostics_json(const LassoFit& fit);

}  // namespace fsl::reg
