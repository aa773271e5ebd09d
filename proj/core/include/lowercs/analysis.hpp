#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lowercs/multiindex.hpp"
#include "lowercs/orthopoly.hpp"
#include "lowercs/sensing.hpp"

namespace lowercs {

/// Inputs of the sample-count bounds. `driver` is Theta^2 s for the
/// standard bound and K(s) for the lower bound.
struct ComplexityQuery {
  double driver = 1.0;
  double delta = 0.05;
  double gamma = 0.01;
  double N = 1.0;
};

struct SampleBound {
  double value;
  /// (2^5 / delta^4) log(40 X log X) log(4N), with X = driver / delta^2
  double first_branch;
  /// (1 / delta) log(log(X) / (gamma delta))
  double second_branch;
};

/// m >= 2^6 e X log(X) max{first, second}, X = driver / delta^2.
/// Throws DomainError unless 0 < delta < 1/13, 0 < gamma < 1, driver > 0 and N >= 1.
SampleBound sample_bound(const ComplexityQuery& q);
/// Driver Theta^2 s.
double sample_bound_standard(const ComplexityQuery& q);
/// Driver K(s).
double sample_bound_lower(const ComplexityQuery& q);

enum class RipMode {
  Standard,      ///< every support of at most s columns
  Lower,         ///< lower supports of at most s members
  KConstrained,  ///< supports with sum of omega^2 at most K(s)
};

std::string_view to_string(RipMode mode) noexcept;
RipMode parse_rip_mode(std::string_view text);

struct RipEstimate {
  double delta_hat = 0.0;
  RipMode mode = RipMode::Standard;
  std::uint64_t supports_examined = 0;
  /// Column positions of a support attaining delta_hat.
  std::vector<std::size_t> worst_support;
};

/// Per-support record for CSV export.
struct RipSupportRecord {
  std::vector<std::size_t> positions;
  double lambda_min;
  double lambda_max;
};

/// Max over the family of max(lambda_max - 1, 1 - lambda_min) of the Gram
/// matrix of the column submatrix. KConstrained uses `K_s` when positive and
/// computes K(s) exactly otherwise. Throws SizeError beyond `budget` supports.
RipEstimate empirical_rip(const SensingSystem& system, std::size_t s, RipMode mode,
                          std::uint64_t budget = kDefaultEnumerationBudget, double K_s = 0.0,
                          std::vector<RipSupportRecord>* records = nullptr);

enum class ApproximationNorm { L2, WeightedL1 };

struct BestLowerTerm {
  IndexSet support;
  double error;
  /// True when the exact search exceeded its budget and a greedy choice was used.
  bool greedy_fallback;
};

/// Best approximation of c by a vector supported on a lower set of at most
/// s members, measured in the given norm over the index set of c (which must
/// be lower).
BestLowerTerm best_lower_s_term(const CoefficientVector& c, std::size_t s, ApproximationNorm norm,
                                const WeightVector& weights,
                                std::uint64_t budget = kDefaultEnumerationBudget);

/// lambda = tail_ratio_max / r - 1 clamped at 0, where r is the largest
/// attainable min_{nu in J~} |c_nu| / omega_nu over J~ inside the index set of
/// c with K(J~) >= 2 K(s). Throws DomainError when the whole set falls short.
double lambda_parameter(const CoefficientVector& c_inside, double tail_ratio_max, BasisKind kind,
                        std::size_t s);
double lambda_parameter(const CoefficientVector& c_inside, double tail_ratio_max, BasisKind kind,
                        double K_s);

struct TailCheck {
  double lhs;  ///< ||c_{J^c}||_2
  double rhs;  ///< ||c_{J^c}||_{omega,1} / sqrt K(s) + sqrt K(s) max |c_nu| / omega_nu
  double slack;
  bool holds;
};

/// Both sides of ||c_{J^c}||_2 <= ||c_{J^c}||_{w,1}/sqrt K(s) + sqrt K(s) max |c|/w
/// for the entries of c on `complement`.
TailCheck tail_inequality_check(const CoefficientVector& c, const IndexSet& complement,
                                BasisKind kind, std::size_t s);
TailCheck tail_inequality_check(const CoefficientVector& c, const IndexSet& complement,
                                BasisKind kind, double K_s);

}  // namespace lowercs
