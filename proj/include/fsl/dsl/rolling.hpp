#pragma once

#include "fsl/common.hpp"

// Rolling time-series kernels over a single asset column (NaN = missing).
// A window is evaluable only when every observation in it is present.
//
// fsl::dsl::reference holds the naive O(T*w) recomputation versions; they
// are the semantic definition and the test oracle. fsl::dsl::kernels holds
// the incremental production versions used by the evaluator.
namespace fsl::dsl {

namespace reference {

VectorXd ts_sum(const VectorXd& x, int w);
VectorXd ts_mean(const VectorXd& x, int w);
VectorXd ts_std(const VectorXd& x, int w);   // sample std, denominator w-1
VectorXd ts_min(const VectorXd& x, int w);
VectorXd ts_max(const VectorXd& x, int w);
VectorXd ts_rank(const VectorXd& x, int w);  // average rank of x_t in window, / w
VectorXd decay_linear(const VectorXd& x, int w);  // weights w..1, normalized
VectorXd cov(const VectorXd& x, const VectorXd& y, int w);   // denominator w-1
VectorXd corr(const VectorXd& x, const VectorXd& y, int w);  // NaN if zero variance

}  // namespace reference

namespace kernels {

VectorXd ts_sum(const VectorXd& x, int w);
VectorXd ts_mean(const VectorXd& x, int w);
VectorXd ts_std(const VectorXd& x, int w);
VectorXd ts_min(const VectorXd& x, int w);
VectorXd ts_max(const VectorXd& x, int w);
VectorXd ts_rank(const VectorXd& x, int w);
VectorXd decay_linear(const VectorXd& x, int w);
VectorXd cov(const VectorXd& x, const VectorXd& y, int w);
VectorXd corr(const VectorXd& x, const VectorXd& y, int w);

}  // namespace kernels

// Inherently sequential operators, shared by both lanes.
VectorXd delay(const VectorXd& x, int d);
VectorXd delta(const VectorXd& x, int d);
// Recursive smoothed mean y_t = (m*x_t + (w-m)*y_{t-1}) / w; the recursion
// restarts at x_t after any missing observation.
VectorXd sma(const VectorXd& x, int w, int m);

}  // namespace fsl::dsl
