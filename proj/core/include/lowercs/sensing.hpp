#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lowercs/multiindex.hpp"
#include "lowercs/orthopoly.hpp"
#include "lowercs/quadrature.hpp"
#include "lowercs/types.hpp"

namespace lowercs {

/// m points drawn i.i.d. from the orthogonalization measure of `kind`.
class SampleSet {
 public:
  /// Throws DomainError if any coordinate is outside [-1,1].
  SampleSet(BasisKind kind, PointMatrix points, std::uint64_t seed);

  BasisKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(points_.cols()); }
  std::uint64_t seed() const noexcept { return seed_; }
  const PointMatrix& points() const noexcept { return points_; }
  std::span<const double> point(std::size_t i) const {
    return row_span(points_, static_cast<Eigen::Index>(i));
  }
  /// FNV-1a over the raw bytes of the point buffer.
  std::uint64_t fingerprint() const noexcept;

 private:
  BasisKind kind_;
  PointMatrix points_;
  std::uint64_t seed_;
};

/// Uniform on [-1,1] per coordinate (Legendre) or cos(pi U) (Chebyshev).
/// Bit-reproducible for a given seed.
SampleSet draw_samples(BasisKind kind, std::size_t d, std::size_t m, std::uint64_t seed);

/// Scalars keyed by an index set.
class CoefficientVector {
 public:
  explicit CoefficientVector(IndexSet index_set);  ///< all zero
  /// Throws ShapeError on length mismatch and DataError on non-finite values.
  CoefficientVector(IndexSet index_set, Eigen::VectorXd values);

  const IndexSet& index_set() const noexcept { return index_set_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  std::size_t size() const noexcept { return index_set_.size(); }
  /// Value at nu, zero when nu is not in the index set.
  double at(const MultiIndex& nu) const;
  /// Members with nonzero values.
  IndexSet support() const;

 private:
  IndexSet index_set_;
  Eigen::VectorXd values_;
};

/// The normalized system A = (Psi_nu_j(y_i)) / sqrt(m), g~ = (g(y_i)) / sqrt(m).
class SensingSystem {
 public:
  SensingSystem(BasisKind kind, IndexSet index_set, Eigen::MatrixXd matrix,
                Eigen::VectorXd observations, double eta);

  BasisKind kind() const noexcept { return kind_; }
  const IndexSet& index_set() const noexcept { return index_set_; }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const Eigen::VectorXd& observations() const noexcept { return observations_; }
  double eta() const noexcept { return eta_; }
  std::size_t rows() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(matrix_.cols()); }
  /// eta / sqrt(m), the residual budget of the weighted BPDN problem.
  double residual_budget() const noexcept;

  SensingSystem with_eta(double eta) const;
  SensingSystem with_observations(Eigen::VectorXd observations) const;

 private:
  BasisKind kind_;
  IndexSet index_set_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd observations_;
  double eta_;
};

/// Unnormalized Vandermonde-type matrix (Psi_nu_j(y_i)).
Eigen::MatrixXd basis_matrix(BasisKind kind, const IndexSet& index_set, const PointMatrix& points,
                             std::size_t threads = 1);

/// sum_nu c_nu Psi_nu(y).
double evaluate_expansion(BasisKind kind, const CoefficientVector& coefficients,
                          std::span<const double> y);

/// Throws DataError naming the first sample where g is not finite.
SensingSystem build_system(BasisKind kind, const IndexSet& index_set, const SampleSet& samples,
                           const Function& g, double eta, std::size_t threads = 1);

/// Projection coefficients of g on an index set, with tail estimates.
struct ReferenceCoefficients {
  CoefficientVector coefficients;
  /// Coefficients on the outer margin of the index set.
  CoefficientVector margin_coefficients;
  double norm_l2 = 0.0;
  /// ||g - g_J||_2, integrated from the pointwise residual by the same rule.
  /// Equal to sqrt(||g||^2 - sum_J c_nu^2) in exact arithmetic.
  double tail_l2 = 0.0;
  /// sum over the margin of omega_nu |c_nu|: surrogate of ||g_{J^c}||_{omega,1}
  double tail_weighted_l1 = 0.0;
  /// max over the margin of |c_nu| / omega_nu
  double tail_max_ratio = 0.0;
  /// ||g||^2 - sum_J c_nu^2 before clamping
  double raw_tail_squared = 0.0;
  /// Standard error of norm_l2^2 (randomized QMC only).
  double standard_error = 0.0;
  std::string rule_description;
  std::size_t rule_size = 0;
};

/// c_nu ~ integral of g Psi_nu d(rho) by quadrature matched to the measure.
/// Throws AccuracyError when the estimated tail energy is negative beyond
/// roundoff (quadrature too coarse).
ReferenceCoefficients reference_coefficients(BasisKind kind, const Function& g,
                                             const IndexSet& index_set,
                                             const QuadratureSpec& spec = {},
                                             std::size_t threads = 1);

/// Choice of the tail budget eta.
enum class EtaMode {
  Surrogate,  ///< sqrt(m) * weighted-l1 tail surrogate
  ExactTail,  ///< sqrt(m) * (1 + eps) * E_g, E_g = max(sqrt2 ||tail||_2, sqrt2 ||tail||_w1 / sqrt K(s))
  TailL2,     ///< sqrt(m) * ||tail||_2
  Manual,
};

std::string_view to_string(EtaMode mode) noexcept;
EtaMode parse_eta_mode(std::string_view text);

struct EtaChoice {
  EtaMode mode = EtaMode::TailL2;
  double epsilon = 0.1;
  double manual_value = 0.0;
  /// K(s), needed by ExactTail.
  double K_s = 1.0;
};

double choose_eta(const EtaChoice& choice, const ReferenceCoefficients& reference, std::size_t m);

}  // namespace lowercs
