#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lowercs/multiindex.hpp"
#include "lowercs/orthopoly.hpp"
#include "lowercs/sensing.hpp"

namespace lowercs {

/// Euclidean projection onto { x : ||x||_1 <= radius } by sorting.
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& x, double radius);

/// Weight families used by the experiments: omega^p for p = 0..3.
enum class WeightMode { Unit, SupNorm, SupNormSquared, SupNormCubed };

std::string_view to_string(WeightMode mode) noexcept;
WeightMode parse_weight_mode(std::string_view text);
WeightVector make_weights(BasisKind kind, const IndexSet& set, WeightMode mode);

enum class BPDNAlgorithm {
  Auto,      ///< homotopy, then Pareto root finding, then ADMM, until one converges
  Homotopy,  ///< exact lasso path followed down to the residual budget
  Pareto,
  Admm,
};

std::string_view to_string(BPDNAlgorithm algorithm) noexcept;
BPDNAlgorithm parse_bpdn_algorithm(std::string_view text);

struct BPDNConfig {
  double tolerance = 1e-8;
  std::size_t max_iterations = 10000;
  BPDNAlgorithm algorithm = BPDNAlgorithm::Auto;
};

struct RecoveryReport {
  CoefficientVector coefficients;
  double residual_norm = 0.0;
  /// Weighted l1 norm for BPDN, plain l1 norm for thresholding methods.
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// BPDN: nonzero entries. IHT: the lower support chosen by the last step.
  IndexSet support;
  /// Residual ||g~ - A c||_2 after each iteration.
  std::vector<double> residual_trace;
  double seconds = 0.0;
  std::string method;
};

/// min sum_nu omega_nu |z_nu| subject to ||g~ - A z||_2 <= eta / sqrt(m).
/// Solved as unit-weight BPDN on A diag(1/omega) and mapped back.
/// Throws ConvergenceError when no method reaches the residual budget.
RecoveryReport weighted_bpdn(const SensingSystem& system, const WeightVector& weights,
                             const BPDNConfig& config = {});

/// Unit-weight BPDN: min ||x||_1 subject to ||b - B x||_2 <= sigma.
struct BPDNSolution {
  Eigen::VectorXd x;
  std::size_t iterations = 0;
  bool converged = false;
  std::string method;
};
BPDNSolution solve_bpdn(const Eigen::MatrixXd& B, const Eigen::VectorXd& b, double sigma,
                        const BPDNConfig& config = {});

enum class ThresholdMode {
  Auto,  ///< exact for s <= 8 on d <= 4, greedy otherwise
  Exact,
  Greedy,
};

std::string_view to_string(ThresholdMode mode) noexcept;
ThresholdMode parse_threshold_mode(std::string_view text);

struct Thresholded {
  CoefficientVector coefficients;
  /// The lower set kept; entries of z on it may be zero.
  IndexSet support;
};

/// Closest vector to z supported on a lower set of at most s members.
/// The index set of z must be lower. Exact mode throws SizeError when the
/// enumeration budget is exceeded.
Thresholded lower_hard_threshold(const CoefficientVector& z, std::size_t s,
                                 ThresholdMode mode = ThresholdMode::Auto,
                                 std::uint64_t budget = kDefaultEnumerationBudget);

/// Keeps the s largest magnitudes, ties in canonical order.
Thresholded standard_hard_threshold(const CoefficientVector& z, std::size_t s);

struct IhtIterate {
  std::size_t iteration;
  const CoefficientVector& coefficients;
  const IndexSet& support;
  double residual_norm;
};

struct IhtConfig {
  ThresholdMode mode = ThresholdMode::Auto;
  std::size_t max_iterations = 1000;
  /// Stop once ||c^{n+1} - c^n||_2 <= tolerance.
  double tolerance = 1e-12;
  /// Gradient step; 1 is the undamped iteration.
  double step = 1.0;
  /// Stop and report non-convergence once the residual exceeds this factor
  /// times its running minimum.
  double divergence_factor = 10.0;
  std::function<void(const IhtIterate&)> observer;
};

/// c^{n+1} = H(c^n + step * A^T (g~ - A c^n)) from c^0 = 0 with the hard
/// lower thresholding operator.
RecoveryReport lower_iht(const SensingSystem& system, std::size_t s, const IhtConfig& config = {});

/// The same iteration with standard_hard_threshold.
RecoveryReport standard_iht(const SensingSystem& system, std::size_t s,
                            const IhtConfig& config = {});

}  // namespace lowercs
