#include "lowercs/orthopoly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "lowercs/error.hpp"

namespace lowercs {

std::string_view to_string(BasisKind kind) noexcept {
  return kind == BasisKind::Legendre ? "legendre" : "chebyshev";
}

BasisKind parse_basis_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "legendre") return BasisKind::Legendre;
  if (lower == "chebyshev") return BasisKind::Chebyshev;
  throw UsageError("unknown basis kind '" + std::string(text) + "'");
}

namespace {

void check_point(double y) {
  if (!(std::abs(y) <= 1.0)) {
    throw DomainError("evaluation point " + std::to_string(y) + " lies outside [-1,1]");
  }
}

void check_degree(std::uint64_t n) {
  if (n > kMaxEvalDegree) {
    throw DomainError("polynomial degree " + std::to_string(n) + " exceeds the supported maximum " +
                      std::to_string(kMaxEvalDegree));
  }
}

double chebyshev_value(Degree n, double y) {
  if (n == 0) return 1.0;
  return std::numbers::sqrt2 * std::cos(static_cast<double>(n) * std::acos(y));
}

}  // namespace

double eval_1d(BasisKind kind, Degree n, double y) {
  check_point(y);
  check_degree(n);
  if (kind == BasisKind::Chebyshev) return chebyshev_value(n, y);
  // classical P_n by three-term recurrence, then orthonormal rescaling
  double prev = 1.0;
  double cur = y;
  if (n == 0) return 1.0;
  for (Degree k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0) * y * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return std::sqrt(2.0 * n + 1.0) * cur;
}

void eval_1d_table(BasisKind kind, double y, std::span<double> out) {
  if (out.empty()) return;
  check_point(y);
  check_degree(out.size() - 1);
  if (kind == BasisKind::Chebyshev) {
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = chebyshev_value(static_cast<Degree>(n), y);
    return;
  }
  out[0] = 1.0;
  if (out.size() == 1) return;
  double prev = 1.0;
  double cur = y;
  out[1] = std::sqrt(3.0) * cur;
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    const double kd = static_cast<double>(k);
    const double next = ((2.0 * kd + 1.0) * y * cur - kd * prev) / (kd + 1.0);
    prev = cur;
    cur = next;
    out[k + 1] = std::sqrt(2.0 * (kd + 1.0) + 1.0) * cur;
  }
}

double eval_tensor(BasisKind kind, const MultiIndex& nu, std::span<const double> y) {
  if (y.size() != nu.dim()) {
    throw ShapeError("point has dimension " + std::to_string(y.size()) + " but index " +
                     nu.to_string() + " has dimension " + std::to_string(nu.dim()));
  }
  double value = 1.0;
  for (std::size_t k = 0; k < nu.dim(); ++k) value *= eval_1d(kind, nu[k], y[k]);
  return value;
}

double weight(BasisKind kind, const MultiIndex& nu) {
  if (kind == BasisKind::Chebyshev) {
    return std::pow(2.0, 0.5 * static_cast<double>(nu.support_size()));
  }
  double w = 1.0;
  for (Degree v : nu.degrees()) w *= std::sqrt(2.0 * v + 1.0);
  return w;
}

std::uint64_t squared_weight(BasisKind kind, const MultiIndex& nu) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (kind == BasisKind::Chebyshev) {
    const std::size_t k = nu.support_size();
    if (k >= 64) throw SizeError("squared Chebyshev weight overflows 64 bits");
    return std::uint64_t{1} << k;
  }
  std::uint64_t w = 1;
  for (Degree v : nu.degrees()) {
    const std::uint64_t f = 2 * std::uint64_t{v} + 1;
    if (w > kMax / f) throw SizeError("squared Legendre weight overflows 64 bits");
    w *= f;
  }
  return w;
}

// -------------------------------------------------------------- WeightVector

WeightVector::WeightVector(IndexSet index_set, Eigen::VectorXd values)
    : index_set_(std::move(index_set)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != index_set_.size()) {
    throw ShapeError("weight vector length does not match its index set");
  }
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 1.0) {
      throw DomainError("weights must be finite and >= 1");
    }
  }
}

WeightVector sup_norm_weights(BasisKind kind, const IndexSet& set) {
  Eigen::VectorXd values(static_cast<Eigen::Index>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    values[static_cast<Eigen::Index>(i)] = weight(kind, set[i]);
  }
  return WeightVector(set, std::move(values));
}

// --------------------------------------------------------------- K and Theta

std::uint64_t K_of_set_exact(BasisKind kind, const IndexSet& set) {
  if (set.empty()) throw DomainError("K is undefined on the empty set");
  std::uint64_t total = 0;
  for (const auto& nu : set) {
    const std::uint64_t w = squared_weight(kind, nu);
    if (total > std::numeric_limits<std::uint64_t>::max() - w) {
      throw SizeError("K(Lambda) overflows 64 bits");
    }
    total += w;
  }
  return total;
}

double K_of_set(BasisKind kind, const IndexSet& set) {
  return static_cast<double>(K_of_set_exact(kind, set));
}

KOfS K_of_s_search(BasisKind kind, std::uint64_t s, std::size_t d, std::uint64_t budget) {
  if (s == 0) throw DomainError("K(s) requires s >= 1");
  if (d == 0) throw DomainError("dimension must be at least 1");
  const std::size_t reduced = std::min<std::size_t>(d, std::max<std::uint64_t>(s - 1, 1));
  const IndexSet universe = hyperbolic_cross(s, reduced);
  std::vector<std::uint64_t> sq(universe.size());
  for (std::size_t j = 0; j < universe.size(); ++j) sq[j] = squared_weight(kind, universe[j]);

  KOfS result{0, IndexSet(d), 0};
  std::vector<std::size_t> best;
  result.sets_examined = for_each_lower_subset(
      universe, static_cast<std::size_t>(s),
      [&](std::span<const std::size_t> positions) {
        std::uint64_t k = 0;
        for (std::size_t p : positions) k += sq[p];
        if (k > result.value) {
          result.value = k;
          best.assign(positions.begin(), positions.end());
        }
      },
      budget);

  std::vector<MultiIndex> members;
  for (std::size_t p : best) {
    std::vector<Degree> degrees(d, 0);
    const auto src = universe[p].degrees();
    std::copy(src.begin(), src.end(), degrees.begin());
    members.emplace_back(std::move(degrees));
  }
  result.maximizer = IndexSet(d, std::move(members));
  return result;
}

std::uint64_t K_of_s_exact(BasisKind kind, std::uint64_t s, std::size_t d, std::uint64_t budget) {
  return K_of_s_search(kind, s, d, budget).value;
}

double K_of_s(BasisKind kind, std::uint64_t s, std::size_t d, std::uint64_t budget) {
  return static_cast<double>(K_of_s_exact(kind, s, d, budget));
}

std::uint64_t theta_squared_exact(BasisKind kind, const IndexSet& set) {
  if (set.empty()) throw DomainError("Theta is undefined on the empty set");
  std::uint64_t best = 0;
  for (const auto& nu : set) best = std::max(best, squared_weight(kind, nu));
  return best;
}

double theta(BasisKind kind, const IndexSet& set) {
  if (set.empty()) throw DomainError("Theta is undefined on the empty set");
  double best = 0.0;
  for (const auto& nu : set) best = std::max(best, weight(kind, nu));
  return best;
}

std::strong_ordering compare_with_log3_power(std::uint64_t value, std::uint64_t n) {
  if (n == 0) throw DomainError("n must be positive");
  if ((n & (n - 1)) == 0) {
    // n = 2^j, n^(log2 3) = 3^j exactly
    unsigned j = 0;
    while ((std::uint64_t{1} << j) != n) ++j;
    std::uint64_t p = 1;
    for (unsigned i = 0; i < j; ++i) {
      if (p > std::numeric_limits<std::uint64_t>::max() / 3) return std::strong_ordering::less;
      p *= 3;
    }
    return value <=> p;
  }
  // irrational exponent of a non-power of two: no ties possible
  const long double lhs = std::log2(static_cast<long double>(value));
  const long double rhs =
      std::log2(static_cast<long double>(n)) * std::log2(static_cast<long double>(3));
  return lhs < rhs ? std::strong_ordering::less : std::strong_ordering::greater;
}

}  // namespace lowercs
