#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lowercs/orthopoly.hpp"
#include "lowercs/types.hpp"

namespace lowercs {

/// Nodes (one per row) and weights of a rule for the orthogonalization
/// measure of a basis. Weights sum to one.
struct QuadratureRule {
  PointMatrix nodes;
  Eigen::VectorXd weights;
  std::string description;

  std::size_t size() const noexcept { return static_cast<std::size_t>(weights.size()); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(nodes.cols()); }
};

struct GaussRule1d {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss rule exact for polynomials of degree 2n - 1 under the
/// uniform (Legendre) or arcsine (Chebyshev) probability measure. Nodes are
/// symmetric and the middle node of an odd rule is exactly zero.
GaussRule1d gauss_rule(BasisKind kind, std::size_t n);

QuadratureRule tensor_rule(BasisKind kind, std::size_t d, std::size_t points_per_dim);

/// Smolyak combination of Gauss rules with 2^i - 1 points on level i >= 1:
///   sum over i with L-d+1 <= sum(i_k - 1) <= L of
///   (-1)^(L - sum(i_k-1)) binom(d-1, L - sum(i_k-1)) Q_i1 x ... x Q_id.
/// Coincident nodes are merged.
QuadratureRule smolyak_rule(BasisKind kind, std::size_t d, unsigned level);

/// Number of tensor-grid points summed by smolyak_rule before merging.
std::uint64_t smolyak_raw_point_count(std::size_t d, unsigned level);

/// Halton points mapped to the measure, shifted modulo 1 by `shift`
/// (Cranley-Patterson randomization); equal weights.
QuadratureRule shifted_halton_rule(BasisKind kind, std::size_t d, std::size_t n,
                                   const std::vector<double>& shift);

enum class QuadratureKind { Auto, Tensor, Smolyak, QuasiMonteCarlo };

/// Auto picks a tensor rule for d <= 4 while it stays below
/// max_tensor_points, Smolyak up to d = 16, randomized QMC beyond.
struct QuadratureSpec {
  QuadratureKind kind = QuadratureKind::Auto;
  /// Tensor: points per coordinate; 0 means max degree + 8.
  std::size_t points_per_dim = 0;
  /// Smolyak: level L; negative means derived from the max degree.
  int level = -1;
  std::size_t qmc_points = 1 << 15;
  unsigned qmc_replicates = 8;
  std::uint64_t seed = 0;
  std::size_t max_tensor_points = 2'000'000;
};

/// Smallest level whose finest 1-d rule has at least max_degree + 8 points,
/// plus two levels for mixed terms.
unsigned default_smolyak_level(Degree max_degree);

}  // namespace lowercs
