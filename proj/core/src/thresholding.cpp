#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "lowercs/error.hpp"
#include "lowercs/solvers.hpp"

namespace lowercs {

std::string_view to_string(ThresholdMode mode) noexcept {
  switch (mode) {
    case ThresholdMode::Auto: return "auto";
    case ThresholdMode::Exact: return "exact";
    case ThresholdMode::Greedy: return "greedy";
  }
  return "unknown";
}

ThresholdMode parse_threshold_mode(std::string_view text) {
  if (text == "auto") return ThresholdMode::Auto;
  if (text == "exact") return ThresholdMode::Exact;
  if (text == "greedy") return ThresholdMode::Greedy;
  throw UsageError("unknown thresholding mode '" + std::string(text) + "'");
}

namespace {

Thresholded restrict_to(const CoefficientVector& z, std::vector<std::size_t> keep) {
  std::sort(keep.begin(), keep.end());
  const IndexSet& set = z.index_set();
  Eigen::VectorXd values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(set.size()));
  for (std::size_t p : keep) values[static_cast<Eigen::Index>(p)] = z[p];
  return Thresholded{CoefficientVector(set, std::move(values)), set.subset(keep)};
}

/// Positions of members with prod(nu_k + 1) <= s: every lower set of at most
/// s members lies among them.
std::vector<std::size_t> reachable_positions(const IndexSet& set, std::size_t s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i].block_cardinality() <= s) out.push_back(i);
  }
  return out;
}

Thresholded exact_lower(const CoefficientVector& z, std::size_t s, std::uint64_t budget) {
  const IndexSet& set = z.index_set();
  const std::vector<std::size_t> reach = reachable_positions(set, s);
  const IndexSet universe = set.subset(reach);
  const std::size_t card = std::min(s, universe.size());
  double best_energy = -1.0;
  std::vector<std::size_t> best;
  for_each_lower_subset(
      universe, card,
      [&](std::span<const std::size_t> positions) {
        double energy = 0.0;
        for (std::size_t p : positions) energy += z[reach[p]] * z[reach[p]];
        if (energy > best_energy) {
          best_energy = energy;
          best.clear();
          for (std::size_t p : positions) best.push_back(reach[p]);
        }
      },
      budget);
  return restrict_to(z, std::move(best));
}

Thresholded greedy_lower(const CoefficientVector& z, std::size_t s) {
  const IndexSet& set = z.index_set();
  const std::vector<std::size_t> reach = reachable_positions(set, s);
  std::vector<char> chosen(set.size(), 0);
  std::vector<std::size_t> keep;
  const auto admissible = [&](std::size_t pos) {
    const MultiIndex& nu = set[pos];
    for (std::size_t k = 0; k < nu.dim(); ++k) {
      if (nu[k] == 0) continue;
      const auto pred = set.position(*nu.minus_unit(k));
      if (!pred || !chosen[*pred]) return false;
    }
    return true;
  };
  while (keep.size() < s) {
    std::size_t pick = set.size();
    double pick_mag = -1.0;
    for (std::size_t pos : reach) {
      if (chosen[pos] || !admissible(pos)) continue;
      const double mag = std::abs(z[pos]);
      if (mag > pick_mag) {
        pick_mag = mag;
        pick = pos;
      }
    }
    if (pick == set.size()) break;
    chosen[pick] = 1;
    keep.push_back(pick);
  }
  return restrict_to(z, std::move(keep));
}

}  // namespace

Thresholded lower_hard_threshold(const CoefficientVector& z, std::size_t s, ThresholdMode mode,
                                 std::uint64_t budget) {
  if (s == 0) throw DomainError("sparsity s must be at least 1");
  const IndexSet& set = z.index_set();
  if (!is_lower(set)) throw PreconditionError("hard lower thresholding needs a lower index set");
  if (set.empty()) return Thresholded{z, set};
  if (mode == ThresholdMode::Auto) {
    mode = (s <= 8 && set.dimension() <= 4) ? ThresholdMode::Exact : ThresholdMode::Greedy;
  }
  return mode == ThresholdMode::Exact ? exact_lower(z, s, budget) : greedy_lower(z, s);
}

Thresholded standard_hard_threshold(const CoefficientVector& z, std::size_t s) {
  std::vector<std::size_t> order(z.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(z[a]) > std::abs(z[b]); });
  order.resize(std::min(s, order.size()));
  return restrict_to(z, std::move(order));
}

}  // namespace lowercs
