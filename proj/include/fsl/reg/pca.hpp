#pragma once

#include "fsl/common.hpp"

namespace fsl::reg {

// Principal components of the column-centered data via eigendecomposition of
// the sample covariance. Components are ordered by descending eigenvalue;
// each loading vector is signed so its largest-magnitude entry is positive.
struct PcaResult {
  MatrixXd scores;            // n x retained
  MatrixXd loadings;          // p x retained, orthonormal
  VectorXd eigenvalues;       // all p, descending
  VectorXd explained_share;   // cumulative, all p
  int retained = 0;
};

PcaResult pca_reduce(const MatrixXd& X, double var_target = 0.90);

}  // namespace fsl::reg
