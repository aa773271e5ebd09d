#include "lowercs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "lowercs/error.hpp"
#include "lowercs/solvers.hpp"

namespace lowercs {

// ------------------------------------------------------------- sample bounds

SampleBound sample_bound(const ComplexityQuery& q) {
  if (!(q.delta > 0.0 && q.delta < 1.0 / 13.0)) throw DomainError("delta must lie in (0, 1/13)");
  if (!(q.gamma > 0.0 && q.gamma < 1.0)) throw DomainError("gamma must lie in (0, 1)");
  if (!(q.driver > 0.0) || !std::isfinite(q.driver)) throw DomainError("driver must be positive");
  if (!(q.N >= 1.0)) throw DomainError("N must be at least 1");
  const double x = q.driver / (q.delta * q.delta);
  const double log_x = std::log(x);
  const double first = std::pow(2.0, 5) / std::pow(q.delta, 4) * std::log(40.0 * x * log_x) *
                       std::log(4.0 * q.N);
  const double second = std::log(log_x / (q.gamma * q.delta)) / q.delta;
  const double value = std::pow(2.0, 6) * std::numbers::e * x * log_x * std::max(first, second);
  return SampleBound{value, first, second};
}

double sample_bound_standard(const ComplexityQuery& q) { return sample_bound(q).value; }

double sample_bound_lower(const ComplexityQuery& q) { return sample_bound(q).value; }

// ------------------------------------------------------------- empirical RIP

std::string_view to_string(RipMode mode) noexcept {
  switch (mode) {
    case RipMode::Standard: return "standard";
    case RipMode::Lower: return "lower";
    case RipMode::KConstrained: return "k_constrained";
  }
  return "unknown";
}

RipMode parse_rip_mode(std::string_view text) {
  if (text == "standard") return RipMode::Standard;
  if (text == "lower" || text == "lower_cardinality") return RipMode::Lower;
  if (text == "k_constrained" || text == "K_constrained") return RipMode::KConstrained;
  throw UsageError("unknown RIP mode '" + std::string(text) + "'");
}

namespace {

class RipSweep {
 public:
  RipSweep(const Eigen::MatrixXd& a, RipMode mode, std::uint64_t budget,
           std::vector<RipSupportRecord>* records)
      : a_(a), budget_(budget), records_(records) {
    estimate_.mode = mode;
  }

  void visit(std::span<const std::size_t> positions) {
    if (++estimate_.supports_examined > budget_) {
      throw SizeError("RIP sweep exceeded its budget of " + std::to_string(budget_) + " supports");
    }
    const auto k = static_cast<Eigen::Index>(positions.size());
    Eigen::MatrixXd sub(a_.rows(), k);
    for (Eigen::Index j = 0; j < k; ++j) sub.col(j) = a_.col(static_cast<Eigen::Index>(positions[j]));
    const Eigen::MatrixXd gram = sub.transpose() * sub;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const double delta = std::max(hi - 1.0, 1.0 - lo);
    if (records_) records_->push_back({{positions.begin(), positions.end()}, lo, hi});
    if (delta > estimate_.delta_hat || estimate_.worst_support.empty()) {
      estimate_.delta_hat = std::max(delta, 0.0);
      estimate_.worst_support.assign(positions.begin(), positions.end());
    }
  }

  RipEstimate result() const { return estimate_; }

 private:
  const Eigen::MatrixXd& a_;
  std::uint64_t budget_;
  std::vector<RipSupportRecord>* records_;
  RipEstimate estimate_;
};

void for_each_combination(std::size_t n, std::size_t k, RipSweep& sweep) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    sweep.visit(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

void k_budget_search(const std::vector<std::uint64_t>& sq, std::uint64_t remaining,
                     std::size_t next, std::vector<std::size_t>& current, RipSweep& sweep) {
  for (std::size_t i = next; i < sq.size(); ++i) {
    if (sq[i] > remaining) continue;
    current.push_back(i);
    sweep.visit(current);
    k_budget_search(sq, remaining - sq[i], i + 1, current, sweep);
    current.pop_back();
  }
}

}  // namespace

RipEstimate empirical_rip(const SensingSystem& system, std::size_t s, RipMode mode,
                          std::uint64_t budget, double K_s,
                          std::vector<RipSupportRecord>* records) {
  if (s == 0) throw DomainError("sparsity s must be at least 1");
  const IndexSet& set = system.index_set();
  RipSweep sweep(system.matrix(), mode, budget, records);
  switch (mode) {
    case RipMode::Standard:
      for (std::size_t k = 1; k <= std::min(s, set.size()); ++k) {
        for_each_combination(set.size(), k, sweep);
      }
      break;
    case RipMode::Lower:
      if (!is_lower(set)) throw PreconditionError("lower RIP needs a lower index set");
      for (std::size_t k = 1; k <= std::min(s, set.size()); ++k) {
        for_each_lower_subset(set, k, [&](std::span<const std::size_t> p) { sweep.visit(p); },
                              std::numeric_limits<std::uint64_t>::max());
      }
      break;
    case RipMode::KConstrained: {
      const double k_value = K_s > 0.0 ? K_s : K_of_s(system.kind(), s, set.dimension());
      std::vector<std::uint64_t> sq(set.size());
      for (std::size_t i = 0; i < set.size(); ++i) sq[i] = squared_weight(system.kind(), set[i]);
      std::vector<std::size_t> current;
      k_budget_search(sq, static_cast<std::uint64_t>(std::floor(k_value)), 0, current, sweep);
      break;
    }
  }
  return sweep.result();
}

// ------------------------------------------------------- best lower s-term

BestLowerTerm best_lower_s_term(const CoefficientVector& c, std::size_t s, ApproximationNorm norm,
                                const WeightVector& weights, std::uint64_t budget) {
  if (s == 0) throw DomainError("sparsity s must be at least 1");
  const IndexSet& set = c.index_set();
  if (!(weights.index_set() == set)) throw ShapeError("weights are keyed to a different set");
  if (!is_lower(set)) throw PreconditionError("best lower s-term needs a lower universe");
  if (set.empty()) return BestLowerTerm{set, 0.0, false};

  std::vector<double> mass(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    mass[i] = norm == ApproximationNorm::L2 ? c[i] * c[i] : weights[i] * std::abs(c[i]);
  }

  std::vector<std::size_t> reach;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i].block_cardinality() <= s) reach.push_back(i);
  }
  const IndexSet universe = set.subset(reach);

  std::vector<std::size_t> keep;
  bool fallback = false;
  try {
    double best = -1.0;
    for_each_lower_subset(
        universe, std::min(s, universe.size()),
        [&](std::span<const std::size_t> positions) {
          double kept = 0.0;
          for (std::size_t p : positions) kept += mass[reach[p]];
          if (kept > best) {
            best = kept;
            keep.clear();
            for (std::size_t p : positions) keep.push_back(reach[p]);
          }
        },
        budget);
  } catch (const SizeError&) {
    fallback = true;
    // greedy on the norm mass, which is what a magnitude-based greedy sees
    Eigen::VectorXd proxy(static_cast<Eigen::Index>(set.size()));
    for (std::size_t i = 0; i < set.size(); ++i) proxy[static_cast<Eigen::Index>(i)] = mass[i];
    const Thresholded t =
        lower_hard_threshold(CoefficientVector(set, proxy), s, ThresholdMode::Greedy);
    keep.clear();
    for (const auto& nu : t.support) keep.push_back(*set.position(nu));
  }

  std::vector<char> inside(set.size(), 0);
  for (std::size_t p : keep) inside[p] = 1;
  double error = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (!inside[i]) error += mass[i];
  }
  if (norm == ApproximationNorm::L2) error = std::sqrt(error);
  std::sort(keep.begin(), keep.end());
  return BestLowerTerm{set.subset(keep), error, fallback};
}

// --------------------------------------------------------------------- lambda

double lambda_parameter(const CoefficientVector& c_inside, double tail_ratio_max, BasisKind kind,
                        std::size_t s) {
  if (s == 0) throw DomainError("sparsity s must be at least 1");
  return lambda_parameter(c_inside, tail_ratio_max, kind,
                          K_of_s(kind, s, c_inside.index_set().dimension()));
}

double lambda_parameter(const CoefficientVector& c_inside, double tail_ratio_max, BasisKind kind,
                        double K_s) {
  if (!(tail_ratio_max >= 0.0)) throw DomainError("tail ratio must be >= 0");
  if (!(K_s >= 1.0)) throw DomainError("K(s) must be >= 1");
  const IndexSet& set = c_inside.index_set();
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> ratio(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) ratio[i] = std::abs(c_inside[i]) / weight(kind, set[i]);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ratio[a] > ratio[b]; });

  // Taking members in decreasing ratio, the first prefix reaching the K
  // budget has the largest possible minimum ratio.
  const double target = 2.0 * K_s;
  double accumulated = 0.0;
  double r = -1.0;
  for (std::size_t i : order) {
    accumulated += static_cast<double>(squared_weight(kind, set[i]));
    if (accumulated >= target) {
      r = ratio[i];
      break;
    }
  }
  if (r < 0.0) {
    throw DomainError("the index set cannot reach K(J~) >= 2K(s)");
  }
  if (tail_ratio_max == 0.0) return 0.0;
  if (r == 0.0) return std::numeric_limits<double>::infinity();
  return std::max(0.0, tail_ratio_max / r - 1.0);
}

// ------------------------------------------------------------ tail inequality

TailCheck tail_inequality_check(const CoefficientVector& c, const IndexSet& complement,
                                BasisKind kind, std::size_t s) {
  if (s == 0) throw DomainError("sparsity s must be at least 1");
  return tail_inequality_check(c, complement, kind,
                               K_of_s(kind, s, complement.dimension()));
}

TailCheck tail_inequality_check(const CoefficientVector& c, const IndexSet& complement,
                                BasisKind kind, double K_s) {
  if (!(K_s >= 1.0)) throw DomainError("K(s) must be >= 1");
  double l2 = 0.0;
  double wl1 = 0.0;
  double max_ratio = 0.0;
  for (const auto& nu : complement) {
    const double v = std::abs(c.at(nu));
    const double w = weight(kind, nu);
    l2 += v * v;
    wl1 += w * v;
    max_ratio = std::max(max_ratio, v / w);
  }
  const double root_k = std::sqrt(K_s);
  const double lhs = std::sqrt(l2);
  const double rhs = wl1 / root_k + root_k * max_ratio;
  return TailCheck{lhs, rhs, rhs - lhs, lhs <= rhs};
}

}  // namespace lowercs
