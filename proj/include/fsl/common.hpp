#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fsl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline double missing() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double x) { return std::isnan(x); }

// Thrown for contract violations (bad inputs, schema errors, rank
// deficiency). Message carries enough context to identify the offender.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fsl
