#include "lowercs/multiindex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <utility>

#include "lowercs/error.hpp"

namespace lowercs {

namespace {

void require_dimension(std::size_t dim) {
  if (dim == 0) {
    throw DomainError("multi-index dimension must be at least 1");
  }
}

}  // namespace

// ---------------------------------------------------------------- MultiIndex

MultiIndex::MultiIndex(std::size_t dim) : degrees_(dim, 0) { require_dimension(dim); }

MultiIndex::MultiIndex(std::vector<Degree> degrees) : degrees_(std::move(degrees)) {
  require_dimension(degrees_.size());
}

MultiIndex::MultiIndex(std::initializer_list<Degree> degrees) : degrees_(degrees) {
  require_dimension(degrees_.size());
}

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t k) {
  MultiIndex nu(dim);
  if (k >= dim) throw ShapeError("unit index coordinate out of range");
  nu.degrees_[k] = 1;
  return nu;
}

std::size_t MultiIndex::support_size() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(degrees_.begin(), degrees_.end(), [](Degree v) { return v != 0; }));
}

std::uint64_t MultiIndex::total_degree() const noexcept {
  return std::accumulate(degrees_.begin(), degrees_.end(), std::uint64_t{0});
}

Degree MultiIndex::max_degree() const noexcept {
  return *std::max_element(degrees_.begin(), degrees_.end());
}

bool MultiIndex::is_zero() const noexcept {
  return std::all_of(degrees_.begin(), degrees_.end(), [](Degree v) { return v == 0; });
}

std::uint64_t MultiIndex::block_cardinality() const noexcept {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t product = 1;
  for (Degree v : degrees_) {
    const std::uint64_t factor = std::uint64_t{v} + 1;
    if (product > kMax / factor) return kMax;
    product *= factor;
  }
  return product;
}

MultiIndex MultiIndex::plus_unit(std::size_t k) const {
  if (k >= dim()) throw ShapeError("coordinate out of range");
  MultiIndex out = *this;
  ++out.degrees_[k];
  return out;
}

std::optional<MultiIndex> MultiIndex::minus_unit(std::size_t k) const {
  if (k >= dim()) throw ShapeError("coordinate out of range");
  if (degrees_[k] == 0) return std::nullopt;
  MultiIndex out = *this;
  --out.degrees_[k];
  return out;
}

bool MultiIndex::componentwise_leq(const MultiIndex& other) const {
  if (dim() != other.dim()) throw ShapeError("multi-index dimensions differ");
  for (std::size_t k = 0; k < dim(); ++k) {
    if (degrees_[k] > other.degrees_[k]) return false;
  }
  return true;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < dim(); ++k) {
    if (k) os << ',';
    os << degrees_[k];
  }
  os << ')';
  return os.str();
}

std::strong_ordering canonical_compare(const MultiIndex& a, const MultiIndex& b) {
  if (a.dim() != b.dim()) return a.dim() <=> b.dim();
  if (auto c = a.total_degree() <=> b.total_degree(); c != 0) return c;
  for (std::size_t k = 0; k < a.dim(); ++k) {
    if (a[k] != b[k]) return b[k] <=> a[k];
  }
  return std::strong_ordering::equal;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& nu) const noexcept {
  // FNV-1a over the degrees
  std::uint64_t h = 1469598103934665603ull;
  for (Degree v : nu.degrees()) {
    h ^= v;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

// ------------------------------------------------------------------ IndexSet

IndexSet::IndexSet(std::size_t dimension) : dimension_(dimension) {
  require_dimension(dimension);
}

IndexSet::IndexSet(std::size_t dimension, std::vector<MultiIndex> members)
    : dimension_(dimension), members_(std::move(members)) {
  require_dimension(dimension);
  for (const auto& nu : members_) {
    if (nu.dim() != dimension_) {
      throw ShapeError("index " + nu.to_string() + " does not have dimension " +
                       std::to_string(dimension_));
    }
  }
  std::sort(members_.begin(), members_.end(), CanonicalLess{});
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  build_lookup();
}

void IndexSet::build_lookup() {
  lookup_.reserve(members_.size());
  for (std::size_t i = 0; i < members_.size(); ++i) lookup_.emplace(members_[i], i);
}

std::optional<std::size_t> IndexSet::position(const MultiIndex& nu) const {
  auto it = lookup_.find(nu);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

Degree IndexSet::max_degree() const noexcept {
  Degree best = 0;
  for (const auto& nu : members_) best = std::max(best, nu.max_degree());
  return best;
}

IndexSet IndexSet::subset(std::span<const std::size_t> positions) const {
  std::vector<MultiIndex> picked;
  picked.reserve(positions.size());
  for (std::size_t p : positions) {
    if (p >= members_.size()) throw ShapeError("subset position out of range");
    picked.push_back(members_[p]);
  }
  return IndexSet(dimension_, std::move(picked));
}

// ------------------------------------------------------------ set predicates

bool is_lower(const IndexSet& set) {
  for (const auto& nu : set) {
    for (std::size_t k = 0; k < nu.dim(); ++k) {
      if (auto pred = nu.minus_unit(k); pred && !set.contains(*pred)) return false;
    }
  }
  return true;
}

namespace {

void collect_hyperbolic(std::uint64_t budget, std::size_t k, std::vector<Degree>& current,
                        std::vector<MultiIndex>& out) {
  if (k == current.size()) {
    out.emplace_back(current);
    return;
  }
  // nu_k + 1 <= budget, remaining coordinates share budget / (nu_k + 1)
  for (std::uint64_t factor = 1; factor <= budget; ++factor) {
    current[k] = static_cast<Degree>(factor - 1);
    collect_hyperbolic(budget / factor, k + 1, current, out);
  }
  current[k] = 0;
}

std::uint64_t count_hyperbolic(std::uint64_t s, std::size_t d,
                               std::map<std::pair<std::uint64_t, std::size_t>, std::uint64_t>& memo) {
  if (d == 0) return 1;
  if (s == 1) return 1;
  auto key = std::make_pair(s, d);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::uint64_t total = 0;
  for (std::uint64_t factor = 1; factor <= s;) {
    const std::uint64_t q = s / factor;
    // all factors sharing the same quotient contribute equally
    const std::uint64_t last = s / q;
    const std::uint64_t part = count_hyperbolic(q, d - 1, memo);
    const std::uint64_t n = last - factor + 1;
    if (part != 0 && n > std::numeric_limits<std::uint64_t>::max() / part) {
      throw SizeError("hyperbolic cross cardinality overflows 64 bits");
    }
    total += n * part;
    if (total < n * part) throw SizeError("hyperbolic cross cardinality overflows 64 bits");
    factor = last + 1;
  }
  memo.emplace(key, total);
  return total;
}

}  // namespace

std::uint64_t hyperbolic_cross_cardinality(std::uint64_t s, std::size_t d) {
  if (s == 0) throw DomainError("hyperbolic cross requires s >= 1");
  require_dimension(d);
  std::map<std::pair<std::uint64_t, std::size_t>, std::uint64_t> memo;
  return count_hyperbolic(s, d, memo);
}

IndexSet hyperbolic_cross(std::uint64_t s, std::size_t d) {
  const std::uint64_t n = hyperbolic_cross_cardinality(s, d);
  if (n > kMaxIndexSetSize) {
    throw SizeError("hyperbolic cross H_" + std::to_string(s) + " in d=" + std::to_string(d) +
                    " has " + std::to_string(n) + " members, above the size limit");
  }
  std::vector<MultiIndex> members;
  members.reserve(static_cast<std::size_t>(n));
  std::vector<Degree> current(d, 0);
  collect_hyperbolic(s, 0, current, members);
  return IndexSet(d, std::move(members));
}

double hyperbolic_cross_cardinality_bound(std::uint64_t s, std::size_t d, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
  const double sd = static_cast<double>(s);
  return std::pow(sd, 1.0 + 1.0 / eps) * std::pow(1.0 - eps, -static_cast<double>(d) / eps) / eps;
}

IndexSet rectangular_block(const MultiIndex& nu) {
  const std::uint64_t n = nu.block_cardinality();
  if (n > kMaxIndexSetSize) {
    throw SizeError("rectangular block of " + nu.to_string() + " is too large");
  }
  std::vector<MultiIndex> members;
  members.reserve(static_cast<std::size_t>(n));
  std::vector<Degree> current(nu.dim(), 0);
  while (true) {
    members.emplace_back(current);
    std::size_t k = 0;
    while (k < nu.dim() && current[k] == nu[k]) current[k++] = 0;
    if (k == nu.dim()) break;
    ++current[k];
  }
  return IndexSet(nu.dim(), std::move(members));
}

IndexSet admissible_extensions(const IndexSet& set) {
  if (!is_lower(set)) throw PreconditionError("admissible_extensions requires a lower set");
  const std::size_t d = set.dimension();
  if (set.empty()) return IndexSet(d, {MultiIndex::zero(d)});
  std::vector<MultiIndex> out;
  for (const auto& mu : set) {
    for (std::size_t k = 0; k < d; ++k) {
      MultiIndex nu = mu.plus_unit(k);
      if (set.contains(nu)) continue;
      bool admissible = true;
      for (std::size_t j = 0; j < d && admissible; ++j) {
        if (auto pred = nu.minus_unit(j); pred && !set.contains(*pred)) admissible = false;
      }
      if (admissible) out.push_back(std::move(nu));
    }
  }
  return IndexSet(d, std::move(out));
}

IndexSet margin(const IndexSet& set) {
  const std::size_t d = set.dimension();
  if (set.empty()) return IndexSet(d, {MultiIndex::zero(d)});
  std::vector<MultiIndex> out;
  for (const auto& mu : set) {
    for (std::size_t k = 0; k < d; ++k) {
      MultiIndex nu = mu.plus_unit(k);
      if (!set.contains(nu)) out.push_back(std::move(nu));
    }
  }
  return IndexSet(d, std::move(out));
}

// ---------------------------------------------------------- lower-set search

namespace {

class LowerSubsetSearch {
 public:
  LowerSubsetSearch(const IndexSet& universe, std::size_t cardinality,
                    const LowerSubsetVisitor& visit, std::uint64_t budget)
      : cardinality_(cardinality),
        visit_(visit),
        budget_(budget),
        successors_(universe.size()),
        missing_(universe.size(), 0),
        in_set_(universe.size(), false) {
    const std::size_t d = universe.dimension();
    for (std::size_t j = 0; j < universe.size(); ++j) {
      const MultiIndex& nu = universe[j];
      for (std::size_t k = 0; k < d; ++k) {
        if (auto pred = nu.minus_unit(k)) {
          // universe is lower, so the predecessor is present
          successors_[*universe.position(*pred)].push_back(j);
          ++missing_[j];
        }
      }
    }
    chosen_.reserve(cardinality);
  }

  std::uint64_t run() {
    extend(0);
    return emitted_;
  }

 private:
  void extend(std::size_t start) {
    if (chosen_.size() == cardinality_) {
      if (++emitted_ > budget_) {
        throw SizeError("lower-set enumeration exceeded its budget of " +
                        std::to_string(budget_) + " sets");
      }
      visit_(chosen_);
      return;
    }
    const std::size_t needed = cardinality_ - chosen_.size();
    for (std::size_t j = start; j + needed <= missing_.size(); ++j) {
      if (in_set_[j] || missing_[j] != 0) continue;
      in_set_[j] = true;
      chosen_.push_back(j);
      for (std::size_t t : successors_[j]) --missing_[t];
      extend(j + 1);
      for (std::size_t t : successors_[j]) ++missing_[t];
      chosen_.pop_back();
      in_set_[j] = false;
    }
  }

  std::size_t cardinality_;
  const LowerSubsetVisitor& visit_;
  std::uint64_t budget_;
  std::vector<std::vector<std::size_t>> successors_;
  std::vector<std::size_t> missing_;
  std::vector<bool> in_set_;
  std::vector<std::size_t> chosen_;
  std::uint64_t emitted_ = 0;
};

}  // namespace

std::uint64_t for_each_lower_subset(const IndexSet& universe, std::size_t cardinality,
                                    const LowerSubsetVisitor& visit, std::uint64_t budget) {
  if (cardinality == 0) throw PreconditionError("cardinality must be positive");
  if (cardinality > universe.size()) {
    throw PreconditionError("cardinality exceeds the size of the universe");
  }
  if (!is_lower(universe)) throw PreconditionError("enumeration universe must be lower");
  LowerSubsetSearch search(universe, cardinality, visit, budget);
  return search.run();
}

std::vector<IndexSet> enumerate_lower_sets(const IndexSet& universe, std::size_t cardinality,
                                           std::uint64_t budget) {
  std::vector<IndexSet> out;
  for_each_lower_subset(
      universe, cardinality,
      [&](std::span<const std::size_t> positions) { out.push_back(universe.subset(positions)); },
      budget);
  return out;
}

}  // namespace lowercs
