#include "fsl/reg/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fsl::reg {

namespace {

struct Standardized {
  MatrixXd Z;          // centered, unit-scale columns (zero-variance cols untouched)
  VectorXd yc;         // centered response
  VectorXd mean;       // column means
  VectorXd scale;      // column sample std (n-1); 0 marks a constant column
  double ymean = 0.0;
};

Standardized standardize(const MatrixXd& X, const VectorXd& y) {
  const auto n = X.rows();
  if (n < 2) throw Error("lasso: need at least 2 observations");
  if (y.size() != n) throw Error("lasso: X and y are not conformable");
  Standardized s;
  s.mean = X.colwise().mean();
  s.Z = X.rowwise() - s.mean.transpose();
  s.scale.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    double v = s.Z.col(j).squaredNorm() / double(n - 1);
    s.scale[j] = std::sqrt(v);
    if (s.scale[j] > 0) s.Z.col(j) /= s.scale[j];
  }
  s.ymean = y.mean();
  s.yc = y.array() - s.ymean;
  return s;
}

// Stationarity residual in the standardized problem, scaled by 1/n so the
// certificate does not grow with the sample size.
double kkt_residual(const Standardized& s, const VectorXd& b, double tau,
                    double rho, const VectorXd& resid) {
  const double n = double(s.Z.rows());
  double worst = 0.0;
  for (Eigen::Index j = 0; j < s.Z.cols(); ++j) {
    if (s.scale[j] == 0) continue;
    double g = s.Z.col(j).dot(resid);
    double v;
    if (b[j] != 0.0) {
      double sgn = b[j] > 0 ? 1.0 : -1.0;
      v = std::abs(g - 0.5 * tau * rho * sgn - 0.5 * tau * (1.0 - rho) * b[j]);
    } else {
      v = std::max(0.0, std::abs(g) - 0.5 * tau * rho);
    }
    worst = std::max(worst, v / n);
  }
  return worst;
}

LassoFit solve(const MatrixXd& X, const VectorXd& y, double tau, double rho,
               const FitOptions& opts, const VectorXd* warm) {
  if (tau < 0) throw Error("lasso: tau must be >= 0");
  if (rho < 0 || rho > 1) throw Error("elastic net: l1_ratio must be in [0, 1]");
  Standardized s = standardize(X, y);
  const Eigen::Index p = X.cols();
  const double n = double(X.rows());

  VectorXd b = VectorXd::Zero(p);
  if (warm && warm->size() == p)
    for (Eigen::Index j = 0; j < p; ++j) b[j] = (*warm)[j] * s.scale[j];
  VectorXd resid = s.yc - s.Z * b;
  VectorXd col_sq(p);
  for (Eigen::Index j = 0; j < p; ++j) col_sq[j] = s.Z.col(j).squaredNorm();

  const double l1 = 0.5 * tau * rho;
  const double l2 = 0.5 * tau * (1.0 - rho);

  LassoFit fit;
  fit.tau = tau;
  fit.l1_ratio = rho;
  int sweep = 0;
  for (; sweep < opts.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (s.scale[j] == 0) continue;  // constant column carries no signal
      double old = b[j];
      double rho_j = s.Z.col(j).dot(resid) + col_sq[j] * old;
      double bj = soft_threshold(rho_j, l1) / (col_sq[j] + l2);
      if (bj != old) {
        resid += s.Z.col(j) * (old - bj);
        b[j] = bj;
        max_change = std::max(max_change, std::abs(bj - old));
      }
    }
    if (max_change < opts.tol) {
      // Converged by coefficient movement; accept only once the KKT
      // certificate also holds, otherwise keep sweeping.
      if (kkt_residual(s, b, tau, rho, resid) <= 0.5 * opts.kkt_tol) {
        fit.converged = true;
        ++sweep;
        break;
      }
    }
  }
  fit.iterations = sweep;
  fit.kkt_violation = kkt_residual(s, b, tau, rho, resid);
  if (!fit.converged && fit.kkt_violation <= opts.kkt_tol) fit.converged = true;

  fit.coef = VectorXd::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (s.scale[j] > 0 && b[j] != 0.0) {
      fit.coef[j] = b[j] / s.scale[j];
      fit.active_set.push_back(int(j));
    }
  }
  fit.intercept = s.ymean - s.mean.dot(fit.coef);
  fit.objective = resid.squaredNorm() / n +
                  (tau / n) * (rho * b.lpNorm<1>() +
                               0.5 * (1.0 - rho) * b.squaredNorm());
  return fit;
}

}  // namespace

LassoFit lasso_fit(const MatrixXd& X, const VectorXd& y, double tau,
                   const FitOptions& opts) {
  return solve(X, y, tau, 1.0, opts, nullptr);
}

LassoFit elastic_net_fit(const MatrixXd& X, const VectorXd& y, double tau,
                         double l1_ratio, const FitOptions& opts,
                         const VectorXd* warm_coef) {
  return solve(X, y, tau, l1_ratio, opts, warm_coef);
}

double tau_max(const MatrixXd& X, const VectorXd& y, double l1_ratio) {
  Standardized s = standardize(X, y);
  double m = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (s.scale[j] == 0) continue;
    m = std::max(m, std::abs(s.Z.col(j).dot(s.yc)));
  }
  double rho = std::max(l1_ratio, 1e-3);  // ridge limit: borrow the near-lasso grid
  return 2.0 * m / rho;
}

Path lasso_path(const MatrixXd& X, const VectorXd& y, int n_taus, double eps,
                double l1_ratio, const FitOptions& opts) {
  if (n_taus < 2) throw Error("lasso_path: need at least 2 grid points");
  if (eps <= 0 || eps >= 1) throw Error("lasso_path: eps must be in (0, 1)");
  Path path;
  double tmax = tau_max(X, y, l1_ratio);
  if (!(tmax > 0)) {
    // Degenerate response: nothing to fit anywhere on the grid.
    path.degenerate = true;
    path.taus.assign(n_taus, 0.0);
    for (int i = 0; i < n_taus; ++i)
      path.fits.push_back(solve(X, y, 0.0, l1_ratio, opts, nullptr));
    for (auto& f : path.fits) {
      f.coef.setZero();
      f.active_set.clear();
      f.intercept = y.mean();
    }
    return path;
  }
  path.taus.resize(n_taus);
  for (int i = 0; i < n_taus; ++i)
    path.taus[i] = tmax * std::pow(eps, double(i) / double(n_taus - 1));

  VectorXd warm;  // coefficients carried along the path
  for (int i = 0; i < n_taus; ++i) {
    LassoFit f = solve(X, y, path.taus[i], l1_ratio, opts,
                       warm.size() ? &warm : nullptr);
    warm = f.coef;
    path.fits.push_back(std::move(f));
  }
  return path;
}

std::string fit_diagnostics_json(const LassoFit& fit) {
  std::ostringstream os;
  os.precision(17);
  os << "{\"tau\":" << fit.tau << ",\"l1_ratio\":" << fit.l1_ratio
     << ",\"active_set\":[";
  for (size_t i = 0; i < fit.active_set.size(); ++i)
    os << (i ? "," : "") << fit.active_set[i];
  os << "],\"objective\":" << fit.objective
     << ",\"iterations\":" << fit.iterations
     << ",\"kkt_max_violation\":" << fit.kkt_violation
     << ",\"converged\":" << (fit.converged ? "true" : "false") << "}";
  return os.str();
}

}  // namespace fsl::reg
