#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

#include "lowercs/error.hpp"
#include "lowercs/solvers.hpp"

namespace lowercs {

namespace {

template <typename Threshold>
RecoveryReport run_iht(const SensingSystem& system, std::size_t s, const IhtConfig& config,
                       Threshold threshold, const char* method) {
  const auto start = std::chrono::steady_clock::now();
  if (s == 0) throw DomainError("sparsity s must be at least 1");
  if (!(config.step > 0.0)) throw DomainError("IHT step must be positive");
  if (config.max_iterations == 0) throw DomainError("max_iterations must be positive");

  const Eigen::MatrixXd& a = system.matrix();
  const Eigen::VectorXd& obs = system.observations();
  const IndexSet& set = system.index_set();

  CoefficientVector c(set);
  IndexSet support(set.dimension());
  std::vector<double> trace;
  double min_residual = obs.norm();
  bool converged = false;
  std::size_t n = 0;

  while (n < config.max_iterations) {
    ++n;
    const Eigen::VectorXd gradient_step =
        c.values() + config.step * (a.transpose() * (obs - a * c.values()));
    Thresholded next = threshold(CoefficientVector(set, gradient_step), s);
    const double change = (next.coefficients.values() - c.values()).norm();
    c = std::move(next.coefficients);
    support = std::move(next.support);
    const double residual = (obs - a * c.values()).norm();
    trace.push_back(residual);
    if (config.observer) config.observer(IhtIterate{n, c, support, residual});
    if (residual > config.divergence_factor * min_residual) break;
    min_residual = std::min(min_residual, residual);
    if (change <= config.tolerance * std::max(1.0, c.values().norm())) {
      converged = true;
      break;
    }
  }

  const double residual = trace.empty() ? obs.norm() : trace.back();
  const double objective = c.values().lpNorm<1>();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return RecoveryReport{std::move(c), residual, objective, n,      converged,
                        std::move(support), std::move(trace), seconds, method};
}

}  // namespace

RecoveryReport lower_iht(const SensingSystem& system, std::size_t s, const IhtConfig& config) {
  if (!is_lower(system.index_set())) {
    throw PreconditionError("lower IHT needs a lower index set");
  }
  return run_iht(
      system, s, config,
      [&](const CoefficientVector& z, std::size_t k) { return lower_hard_threshold(z, k, config.mode); },
      "lower_iht");
}

RecoveryReport standard_iht(const SensingSystem& system, std::size_t s, const IhtConfig& config) {
  return run_iht(
      system, s, config,
      [](const CoefficientVector& z, std::size_t k) { return standard_hard_threshold(z, k); },
      "standard_iht");
}

}  // namespace lowercs
