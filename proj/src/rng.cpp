#include "fsl/rng.hpp"

#include <cmath>

namespace fsl {

double Rng::next_gaussian() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_;
  }
  // Box-Muller; u1 bounded away from zero so log is finite.
  double u1 = 0.0;
  do {
    u1 = next_uniform();
  } while (u1 <= 0.0);
  double u2 = next_uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  cached_ = r * std::sin(theta);
  have_cached_ = true;
  return r * std::cos(theta);
}

}  // namespace fsl
