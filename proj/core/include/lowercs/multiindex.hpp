#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lowercs {

using Degree = std::uint32_t;

/// Default cap on the number of sets produced by lower-set enumeration.
inline constexpr std::uint64_t kDefaultEnumerationBudget = 1'000'000;

/// Largest index set the constructors will materialize.
inline constexpr std::size_t kMaxIndexSetSize = std::size_t{1} << 26;

/// A multi-index nu in N_0^d: one polynomial degree per coordinate.
class MultiIndex {
 public:
  /// The zero index of dimension `dim` (dim >= 1).
  explicit MultiIndex(std::size_t dim);
  explicit MultiIndex(std::vector<Degree> degrees);
  MultiIndex(std::initializer_list<Degree> degrees);

  static MultiIndex zero(std::size_t dim) { return MultiIndex(dim); }
  static MultiIndex unit(std::size_t dim, std::size_t k);

  std::size_t dim() const noexcept { return degrees_.size(); }
  Degree operator[](std::size_t k) const noexcept { return degrees_[k]; }
  std::span<const Degree> degrees() const noexcept { return degrees_; }

  /// Number of nonzero entries, ||nu||_0.
  std::size_t support_size() const noexcept;
  std::uint64_t total_degree() const noexcept;
  Degree max_degree() const noexcept;
  bool is_zero() const noexcept;

  /// prod_k (nu_k + 1); saturates at UINT64_MAX.
  std::uint64_t block_cardinality() const noexcept;

  MultiIndex plus_unit(std::size_t k) const;
  /// nu - e_k, or nullopt when nu_k == 0.
  std::optional<MultiIndex> minus_unit(std::size_t k) const;

  /// Componentwise mu <= nu.
  bool componentwise_leq(const MultiIndex& other) const;

  /// "(1,0,2)"
  std::string to_string() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<Degree> degrees_;
};

/// Canonical order: graded (total degree first), ties broken lexicographically
/// with the first coordinate most significant and larger entries first, so
/// that e_1 precedes e_2. Every predecessor nu - e_k precedes nu.
std::strong_ordering canonical_compare(const MultiIndex& a, const MultiIndex& b);

struct CanonicalLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    return canonical_compare(a, b) < 0;
  }
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& nu) const noexcept;
};

/// A duplicate-free collection of multi-indices of a common dimension, kept in
/// canonical order. Immutable after construction.
class IndexSet {
 public:
  explicit IndexSet(std::size_t dimension);
  /// Sorts into canonical order and drops duplicates.
  IndexSet(std::size_t dimension, std::vector<MultiIndex> members);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }

  const MultiIndex& operator[](std::size_t i) const { return members_[i]; }
  std::span<const MultiIndex> members() const noexcept { return members_; }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  std::optional<std::size_t> position(const MultiIndex& nu) const;
  bool contains(const MultiIndex& nu) const { return position(nu).has_value(); }

  Degree max_degree() const noexcept;

  /// Subset given by positions into this set.
  IndexSet subset(std::span<const std::size_t> positions) const;

  friend bool operator==(const IndexSet& a, const IndexSet& b) {
    return a.dimension_ == b.dimension_ && a.members_ == b.members_;
  }

 private:
  void build_lookup();

  std::size_t dimension_;
  std::vector<MultiIndex> members_;
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> lookup_;
};

bool is_lower(const IndexSet& set);

/// { nu : prod_k (nu_k + 1) <= s }.
IndexSet hyperbolic_cross(std::uint64_t s, std::size_t d);

/// Exact #(H_s) without materializing the set.
std::uint64_t hyperbolic_cross_cardinality(std::uint64_t s, std::size_t d);

/// eps^-1 s^(1+1/eps) (1-eps)^(-d/eps); with eps = 1/2 this is 2 s^3 4^d.
double hyperbolic_cross_cardinality_bound(std::uint64_t s, std::size_t d, double eps);

/// { mu : mu <= nu componentwise }.
IndexSet rectangular_block(const MultiIndex& nu);

/// All nu outside a lower set whose addition keeps it lower.
IndexSet admissible_extensions(const IndexSet& set);

/// All nu outside `set` with some nu - e_k inside (the full outer margin).
IndexSet margin(const IndexSet& set);

/// Visitor receives the positions (ascending, into the universe) of one lower
/// subset.
using LowerSubsetVisitor = std::function<void(std::span<const std::size_t>)>;

/// Visits every lower subset of `universe` with exactly `cardinality`
/// members, each exactly once. Sets are grown one admissible index at a time,
/// and each new index must come after the previously added one in canonical
/// order. Throws SizeError once more than `budget` sets have been produced.
/// Returns the number of sets visited.
std::uint64_t for_each_lower_subset(const IndexSet& universe, std::size_t cardinality,
                                    const LowerSubsetVisitor& visit,
                                    std::uint64_t budget = kDefaultEnumerationBudget);

std::vector<IndexSet> enumerate_lower_sets(const IndexSet& universe, std::size_t cardinality,
                                           std::uint64_t budget = kDefaultEnumerationBudget);

}  // namespace lowercs
