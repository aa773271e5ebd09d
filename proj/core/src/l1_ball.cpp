#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "lowercs/error.hpp"
#include "lowercs/solvers.hpp"

namespace lowercs {

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& x, double radius) {
  if (!(radius >= 0.0)) throw DomainError("l1-ball radius must be >= 0");
  if (radius == 0.0) return Eigen::VectorXd::Zero(x.size());
  if (x.lpNorm<1>() <= radius) return x;

  // Find the shift theta with sum max(|x_i| - theta, 0) = radius.
  std::vector<double> mags(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(x[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cumulative += mags[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (k + 1 == mags.size() || mags[k + 1] <= candidate) {
      theta = candidate;
      break;
    }
  }
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double shrunk = std::max(std::abs(x[i]) - theta, 0.0);
    out[i] = std::copysign(shrunk, x[i]);
  }
  return out;
}

}  // namespace lowercs
