#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lowercs/error.hpp"
#include "lowercs/random.hpp"
#include "lowercs/solvers.hpp"

using namespace lowercs;
using doctest::Approx;

namespace {

/// Projection by bisection on the soft-threshold level.
Eigen::VectorXd project_by_bisection(const Eigen::VectorXd& x, double radius) {
  if (x.lpNorm<1>() <= radius) return x;
  double lo = 0.0;
  double hi = x.cwiseAbs().maxCoeff();
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double mass = (x.cwiseAbs().array() - mid).max(0.0).sum();
    (mass > radius ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[i] = std::copysign(std::max(std::abs(x[i]) - theta, 0.0), x[i]);
  }
  return out;
}

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n, double scale) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

}  // namespace

TEST_CASE("points inside the ball are unchanged") {
  const Eigen::Vector3d x(0.2, -0.3, 0.1);
  CHECK(project_l1_ball(x, 1.0) == x);
  CHECK(project_l1_ball(x, 0.6) == x);
}

TEST_CASE("small hand examples") {
  CHECK(project_l1_ball(Eigen::Vector2d(2.0, 0.0), 1.0).isApprox(Eigen::Vector2d(1.0, 0.0)));
  CHECK(project_l1_ball(Eigen::Vector2d(1.0, 1.0), 1.0).isApprox(Eigen::Vector2d(0.5, 0.5)));
  CHECK(project_l1_ball(Eigen::Vector3d(3.0, -1.0, 0.5), 2.0).isApprox(Eigen::Vector3d(2.0, 0.0, 0.0)));
  CHECK(project_l1_ball(Eigen::Vector2d(3.0, -2.0), 0.0).isZero());
  CHECK_THROWS_AS(project_l1_ball(Eigen::Vector2d(1.0, 1.0), -0.1), DomainError);
}

TEST_CASE("projection matches bisection and satisfies the obtuse-angle condition") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd x = random_vector(rng, 1 + static_cast<Eigen::Index>(rng.below(30)), 2.0);
    const double radius = rng.uniform(0.01, 2.0 * x.lpNorm<1>());
    const Eigen::VectorXd p = project_l1_ball(x, radius);
    CHECK((p - project_by_bisection(x, radius)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(p.lpNorm<1>() <= radius * (1.0 + 1e-12));
    for (int k = 0; k < 5; ++k) {
      Eigen::VectorXd y = random_vector(rng, x.size(), 1.0);
      y *= rng.uniform01() * radius / y.lpNorm<1>();
      CHECK((x - p).dot(y - p) <= 1e-10 * (1.0 + x.norm()));
    }
  }
}
