#include "fsl/reg/pca.hpp"

#include <cmath>

namespace fsl::reg {

PcaResult pca_reduce(const MatrixXd& X, double var_target) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (n < 2 || p < 1) throw Error("pca_reduce: need n >= 2 and p >= 1");
  if (var_target <= 0 || var_target > 1)
    throw Error("pca_reduce: var_target must be in (0, 1]");

  MatrixXd Xc = X.rowwise() - X.colwise().mean();
  MatrixXd cov = Xc.transpose() * Xc / double(n - 1);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw Error("pca_reduce: eigensolver failed");

  PcaResult r;
  r.eigenvalues.resize(p);
  MatrixXd vectors(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {  // Eigen sorts ascending, reverse
    r.eigenvalues[j] = std::max(0.0, eig.eigenvalues()[p - 1 - j]);
    vectors.col(j) = eig.eigenvectors().col(p - 1 - j);
    Eigen::Index imax = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&imax);
    if (vectors(imax, j) < 0) vectors.col(j) = -vectors.col(j);
  }

  double total = r.eigenvalues.sum();
  r.explained_share.resize(p);
  double cum = 0.0;
  r.retained = int(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    cum += r.eigenvalues[j];
    r.explained_share[j] = total > 0 ? cum / total : 1.0;
    if (r.explained_share[j] >= var_target - 1e-15 && r.retained == int(p))
      r.retained = int(j) + 1;
  }
  r.loadings = vectors.leftCols(r.retained);
  r.scores = Xc * r.loadings;
  return r;
}

}  // namespace fsl::reg
