#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "lowercs/multiindex.hpp"

namespace lowercs {

/// Orthonormal tensor polynomial systems on [-1,1]^d.
///  - Legendre: orthonormal for the uniform probability measure prod dy_k / 2.
///  - Chebyshev: orthonormal for the arcsine measure prod dy_k / (pi sqrt(1 - y_k^2)).
enum class BasisKind { Legendre, Chebyshev };

std::string_view to_string(BasisKind kind) noexcept;
/// Accepts "legendre" / "chebyshev" (case-insensitive).
BasisKind parse_basis_kind(std::string_view text);

/// Degrees above this are rejected by the evaluators.
inline constexpr Degree kMaxEvalDegree = 512;

/// Degree-n orthonormal univariate polynomial at y in [-1,1].
double eval_1d(BasisKind kind, Degree n, double y);

/// out[n] = eval_1d(kind, n, y) for n = 0..out.size()-1, bitwise identical to
/// eval_1d.
void eval_1d_table(BasisKind kind, double y, std::span<double> out);

/// prod_k eval_1d(kind, nu_k, y_k).
double eval_tensor(BasisKind kind, const MultiIndex& nu, std::span<const double> y);

/// Sup norm ||Psi_nu||_inf. Legendre: prod sqrt(2 nu_k + 1). Chebyshev:
/// 2^(||nu||_0 / 2).
double weight(BasisKind kind, const MultiIndex& nu);

/// ||Psi_nu||_inf^2 as an exact integer (prod (2 nu_k + 1) or 2^||nu||_0).
std::uint64_t squared_weight(BasisKind kind, const MultiIndex& nu);

/// Positive weights keyed by an index set.
class WeightVector {
 public:
  /// Throws DomainError unless every value is >= 1 and finite.
  WeightVector(IndexSet index_set, Eigen::VectorXd values);

  const IndexSet& index_set() const noexcept { return index_set_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  std::size_t size() const noexcept { return index_set_.size(); }

 private:
  IndexSet index_set_;
  Eigen::VectorXd values_;
};

/// omega_nu = ||Psi_nu||_inf on every member.
WeightVector sup_norm_weights(BasisKind kind, const IndexSet& set);

/// K(Lambda) = sum omega_nu^2, exact.
std::uint64_t K_of_set_exact(BasisKind kind, const IndexSet& set);
double K_of_set(BasisKind kind, const IndexSet& set);

/// K(s): max of K(Lambda) over lower Lambda with #Lambda = s, found by
/// exhaustive enumeration. A lower set of cardinality s touches at most s - 1
/// coordinates and K is invariant under coordinate permutations, so the search
/// runs in dimension min(d, max(s - 1, 1)).
struct KOfS {
  std::uint64_t value = 0;
  IndexSet maximizer;         ///< first maximizer in canonical enumeration order
  std::uint64_t sets_examined = 0;
};
KOfS K_of_s_search(BasisKind kind, std::uint64_t s, std::size_t d,
                   std::uint64_t budget = kDefaultEnumerationBudget);
std::uint64_t K_of_s_exact(BasisKind kind, std::uint64_t s, std::size_t d,
                           std::uint64_t budget = kDefaultEnumerationBudget);
double K_of_s(BasisKind kind, std::uint64_t s, std::size_t d,
              std::uint64_t budget = kDefaultEnumerationBudget);

/// Theta = max omega_nu over the set.
double theta(BasisKind kind, const IndexSet& set);
std::uint64_t theta_squared_exact(BasisKind kind, const IndexSet& set);

/// Exact three-way comparison of `value` against n^(log 3 / log 2) = 3^(log2 n).
std::strong_ordering compare_with_log3_power(std::uint64_t value, std::uint64_t n);

}  // namespace lowercs
