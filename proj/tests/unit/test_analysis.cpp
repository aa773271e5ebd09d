#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "lowercs/analysis.hpp"
#include "lowercs/error.hpp"
#include "lowercs/multiindex.hpp"
#include "lowercs/random.hpp"
#include "lowercs/sensing.hpp"
#include "oracles.hpp"

using namespace lowercs;
using doctest::Approx;

namespace {

constexpr BasisKind kKinds[] = {BasisKind::Legendre, BasisKind::Chebyshev};

ComplexityQuery query(double driver, double N = 1000.0, double delta = 0.05, double gamma = 0.01) {
  return ComplexityQuery{driver, delta, gamma, N};
}

SensingSystem random_system(BasisKind kind, const IndexSet& set, std::size_t m, std::uint64_t seed) {
  const SampleSet samples = draw_samples(kind, set.dimension(), m, seed);
  return build_system(kind, set, samples, [](std::span<const double>) { return 0.0; }, 0.0);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

CoefficientVector from_ratios(BasisKind kind, const IndexSet& set, const std::vector<double>& ratio) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = ratio[i] * weight(kind, set[i]);
  }
  return CoefficientVector(set, v);
}

}  // namespace

TEST_CASE("sample bounds match direct arithmetic") {
  const double lower = sample_bound_lower(query(50.0));
  const double standard = sample_bound_standard(query(100.0));
  CHECK(lower == Approx(2.3244668972970776e16).epsilon(1e-14));
  CHECK(standard == Approx(5.2125497728308424e16).epsilon(1e-14));
  for (double driver : {1.5, 50.0, 100.0, 1e4}) {
    for (double N : {1.0, 1000.0, 1e8}) {
      for (double gamma : {1e-9, 0.01, 0.5}) {
        const long double ref = oracle::sample_bound_arithmetic(driver, 0.05L, gamma, N);
        CHECK(sample_bound_standard(query(driver, N, 0.05, gamma)) ==
              Approx(static_cast<double>(ref)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("sample bounds are monotone in the driver and share one formula") {
  double previous = 0.0;
  for (double driver = 2.0; driver < 2000.0; driver *= 1.7) {
    const double v = sample_bound_standard(query(driver));
    CHECK(v > previous);
    CHECK(sample_bound_lower(query(driver)) == v);
    previous = v;
  }
}

TEST_CASE("the first branch dominates for large N and moderate gamma") {
  for (double N : {1e3, 1e6, 1e9}) {
    for (double gamma : {0.5, 0.1, 0.01}) {
      const SampleBound b = sample_bound(query(100.0, N, 0.05, gamma));
      CHECK(b.first_branch > b.second_branch);
    }
  }
  // the second branch only wins for absurdly small gamma
  const SampleBound tiny = sample_bound(query(100.0, 1.0, 0.05, 1e-300));
  CHECK(tiny.second_branch > 0.0);
}

TEST_CASE("sample bound domain") {
  CHECK_THROWS_AS(sample_bound(query(10.0, 10.0, 1.0 / 13.0)), DomainError);
  CHECK_THROWS_AS(sample_bound(query(10.0, 10.0, 0.0)), DomainError);
  CHECK_THROWS_AS(sample_bound(query(10.0, 10.0, 0.05, 1.0)), DomainError);
  CHECK_THROWS_AS(sample_bound(query(0.0)), DomainError);
  CHECK_THROWS_AS(sample_bound(query(10.0, 0.5)), DomainError);
}

TEST_CASE("lower bound beats the standard bound from exact K and theta") {
  for (BasisKind kind : kKinds) {
    for (std::size_t d = 4; d <= 6; ++d) {
      for (std::uint64_t s = 4; s <= 8; ++s) {
        const IndexSet set = hyperbolic_cross(s, d);
        const double N = static_cast<double>(set.size());
        const double k = K_of_s(kind, s, d);
        const double t2 = static_cast<double>(theta_squared_exact(kind, set)) * static_cast<double>(s);
        CHECK(k < t2);
        CHECK(sample_bound_lower(query(k, N)) < sample_bound_standard(query(t2, N)));
      }
    }
  }
}

TEST_CASE("orthonormal columns have zero RIP constant in every mode") {
  const IndexSet set = hyperbolic_cross(4, 2);
  const SensingSystem sys(BasisKind::Legendre, set, Eigen::MatrixXd::Identity(8, 8),
                          Eigen::VectorXd::Zero(8), 0.0);
  for (RipMode mode : {RipMode::Standard, RipMode::Lower, RipMode::KConstrained}) {
    const RipEstimate e = empirical_rip(sys, 3, mode);
    CHECK(e.delta_hat == Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(e.supports_examined > 0);
  }
}

TEST_CASE("RIP support counts") {
  const IndexSet set = hyperbolic_cross(4, 2);
  const SensingSystem sys = random_system(BasisKind::Legendre, set, 20, 1);
  CHECK(empirical_rip(sys, 3, RipMode::Standard).supports_examined == 8 + 28 + 56);
  std::uint64_t lower = 0;
  for (std::size_t k = 1; k <= 3; ++k) lower += oracle::lower_subsets_by_filter(set, k).size();
  CHECK(empirical_rip(sys, 3, RipMode::Lower).supports_examined == lower);
  std::vector<RipSupportRecord> records;
  const RipEstimate e = empirical_rip(sys, 2, RipMode::Standard, kDefaultEnumerationBudget, 0.0, &records);
  CHECK(records.size() == e.supports_examined);
  CHECK_THROWS_AS(empirical_rip(sys, 3, RipMode::Standard, 10), SizeError);
}

TEST_CASE("RIP constants match singular values of the worst support") {
  const IndexSet set = hyperbolic_cross(4, 2);
  const SensingSystem sys = random_system(BasisKind::Chebyshev, set, 30, 4);
  const RipEstimate e = empirical_rip(sys, 3, RipMode::Standard);
  Eigen::MatrixXd sub(30, static_cast<Eigen::Index>(e.worst_support.size()));
  for (std::size_t j = 0; j < e.worst_support.size(); ++j) {
    sub.col(static_cast<Eigen::Index>(j)) = sys.matrix().col(static_cast<Eigen::Index>(e.worst_support[j]));
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
  const double hi = svd.singularValues().maxCoeff();
  const double lo = svd.singularValues().minCoeff();
  CHECK(e.delta_hat == Approx(std::max(hi * hi - 1.0, 1.0 - lo * lo)).epsilon(1e-10));
}

TEST_CASE("RIP family ordering") {
  for (BasisKind kind : kKinds) {
    const IndexSet set = hyperbolic_cross(6, 2);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const SensingSystem sys = random_system(kind, set, 25, seed);
      const double lower = empirical_rip(sys, 3, RipMode::Lower).delta_hat;
      CHECK(lower <= empirical_rip(sys, 3, RipMode::Standard).delta_hat);
      CHECK(lower <= empirical_rip(sys, 3, RipMode::KConstrained).delta_hat);
    }
  }
}

TEST_CASE("RIP constants shrink with more samples") {
  const IndexSet set = hyperbolic_cross(4, 2);
  std::vector<double> medians;
  for (std::size_t m : {8u, 16u, 32u, 64u}) {
    std::vector<double> deltas;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      deltas.push_back(empirical_rip(random_system(BasisKind::Legendre, set, m, seed), 3, RipMode::Lower).delta_hat);
    }
    medians.push_back(median(deltas));
    MESSAGE("m=" << m << " median lower RIP " << medians.back());
  }
  for (std::size_t i = 1; i < medians.size(); ++i) CHECK(medians[i] < medians[i - 1]);
}

TEST_CASE("best lower s-term examples") {
  const IndexSet set = hyperbolic_cross(4, 2);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
  v[*set.position(MultiIndex{0, 0})] = 0.1;
  v[*set.position(MultiIndex{1, 0})] = 1.0;
  v[*set.position(MultiIndex{0, 1})] = 0.9;
  const CoefficientVector c(set, v);
  const WeightVector unit(set, Eigen::VectorXd::Ones(8));
  const BestLowerTerm best = best_lower_s_term(c, 2, ApproximationNorm::L2, unit);
  CHECK(best.support.size() == 2);
  CHECK(best.support.contains(MultiIndex{1, 0}));
  CHECK(best.error == Approx(0.9));
  CHECK_FALSE(best.greedy_fallback);

  const BestLowerTerm all = best_lower_s_term(c, 3, ApproximationNorm::L2, unit);
  CHECK(all.error == 0.0);
  CHECK(all.support.size() == 3);
}

TEST_CASE("weighted best term can pick a different support") {
  // (2,0) carries more l2 mass than (1,1), but (1,1) has the larger weight
  const IndexSet set = hyperbolic_cross(4, 2);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
  v[*set.position(MultiIndex{0, 0})] = 1.0;
  v[*set.position(MultiIndex{1, 0})] = 0.5;
  v[*set.position(MultiIndex{0, 1})] = 0.5;
  v[*set.position(MultiIndex{1, 1})] = 0.5;
  v[*set.position(MultiIndex{2, 0})] = 0.6;
  const CoefficientVector c(set, v);
  const WeightVector w = sup_norm_weights(BasisKind::Legendre, set);
  const WeightVector unit(set, Eigen::VectorXd::Ones(8));
  const BestLowerTerm l2 = best_lower_s_term(c, 4, ApproximationNorm::L2, unit);
  const BestLowerTerm wl1 = best_lower_s_term(c, 4, ApproximationNorm::WeightedL1, w);
  CHECK(l2.support.contains(MultiIndex{2, 0}));
  CHECK_FALSE(l2.support.contains(MultiIndex{1, 1}));
  CHECK(wl1.support.contains(MultiIndex{1, 1}));
  CHECK_FALSE(wl1.support.contains(MultiIndex{2, 0}));
  CHECK(l2.error == Approx(0.5));
  CHECK(wl1.error == Approx(0.6 * std::sqrt(5.0)));
}

TEST_CASE("best lower s-term error is nonincreasing in s") {
  Rng rng(12);
  const IndexSet set = hyperbolic_cross(8, 2);
  const WeightVector w = sup_norm_weights(BasisKind::Chebyshev, set);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(set.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
    const CoefficientVector c(set, v);
    for (ApproximationNorm norm : {ApproximationNorm::L2, ApproximationNorm::WeightedL1}) {
      double previous = std::numeric_limits<double>::infinity();
      for (std::size_t s = 1; s <= 7; ++s) {
        const double e = best_lower_s_term(c, s, norm, w).error;
        CHECK(e <= previous + 1e-14);
        previous = e;
      }
    }
  }
}

TEST_CASE("best lower s-term falls back to greedy beyond its budget") {
  const IndexSet set = hyperbolic_cross(16, 3);
  const CoefficientVector c(set, Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(set.size()), 2.0, 1.0));
  const BestLowerTerm b = best_lower_s_term(c, 7, ApproximationNorm::L2,
                                            sup_norm_weights(BasisKind::Legendre, set), 20);
  CHECK(b.greedy_fallback);
  CHECK(b.support.size() == 7);
  CHECK(is_lower(b.support));
}

TEST_CASE("lambda examples") {
  const IndexSet set = hyperbolic_cross(6, 2);
  const BasisKind kind = BasisKind::Legendre;
  const std::vector<double> equal(set.size(), 0.4);
  CHECK(lambda_parameter(from_ratios(kind, set, equal), 0.0, kind, std::size_t{2}) == 0.0);
  CHECK(lambda_parameter(from_ratios(kind, set, equal), 0.4, kind, std::size_t{2}) == 0.0);

  std::vector<double> ratio(set.size(), 0.5);
  ratio[*set.position(MultiIndex{0, 0})] = 1.0;
  ratio[*set.position(MultiIndex{1, 0})] = 1.0;
  const CoefficientVector c = from_ratios(kind, set, ratio);
  CHECK(K_of_s(kind, 2, 2) == 4.0);
  CHECK(lambda_parameter(c, 0.6, kind, std::size_t{2}) == Approx(0.2));

  std::vector<std::uint64_t> sq;
  for (const auto& nu : set) sq.push_back(squared_weight(kind, nu));
  const double r = oracle::best_min_ratio_exhaustive(ratio, sq, 8.0);
  CHECK(r == Approx(0.5));
}

TEST_CASE("lambda greedy prefix agrees with exhaustive search") {
  Rng rng(3);
  for (BasisKind kind : kKinds) {
    const IndexSet set = hyperbolic_cross(6, 2);
    std::vector<std::uint64_t> sq;
    for (const auto& nu : set) sq.push_back(squared_weight(kind, nu));
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<double> ratio(set.size());
      for (double& x : ratio) x = rng.uniform(0.01, 1.0);
      const double k = K_of_s(kind, 2, 2);
      const double r = oracle::best_min_ratio_exhaustive(ratio, sq, 2.0 * k);
      const double tail = 1.3 * r;
      CHECK(lambda_parameter(from_ratios(kind, set, ratio), tail, kind, k) == Approx(0.3).epsilon(1e-9));
    }
  }
}

TEST_CASE("lambda domain") {
  const IndexSet tiny = hyperbolic_cross(1, 2);
  const CoefficientVector c(tiny, Eigen::VectorXd::Ones(1));
  CHECK_THROWS_AS(lambda_parameter(c, 0.5, BasisKind::Legendre, std::size_t{3}), DomainError);
  CHECK_THROWS_AS(lambda_parameter(c, -0.5, BasisKind::Legendre, 1.0), DomainError);
}

TEST_CASE("tail inequality with a single entry") {
  const IndexSet universe = hyperbolic_cross(8, 3);
  const IndexSet inner = hyperbolic_cross(4, 3);
  std::vector<MultiIndex> outer;
  for (const auto& nu : universe) {
    if (!inner.contains(nu)) outer.push_back(nu);
  }
  const IndexSet complement(3, outer);
  for (BasisKind kind : kKinds) {
    const double k = K_of_s(kind, 4, 3);
    for (const auto& nu : complement) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(universe.size()));
      v[static_cast<Eigen::Index>(*universe.position(nu))] = -0.7;
      const TailCheck t = tail_inequality_check(CoefficientVector(universe, v), complement, kind, std::size_t{4});
      const double w = weight(kind, nu);
      CHECK(t.holds);
      CHECK(t.slack == Approx(std::sqrt(k) * 0.7 / w - 0.7 + 0.7 * w / std::sqrt(k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("tail inequality holds on random and equal-magnitude complements") {
  const IndexSet universe = hyperbolic_cross(8, 3);
  const IndexSet inner = hyperbolic_cross(4, 3);
  std::vector<MultiIndex> outer;
  for (const auto& nu : universe) {
    if (!inner.contains(nu)) outer.push_back(nu);
  }
  const IndexSet complement(3, outer);
  Rng rng(99);
  for (BasisKind kind : kKinds) {
    int holds = 0;
    for (int trial = 0; trial < 500; ++trial) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(universe.size()));
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal() * (rng.uniform01() < 0.5 ? 1.0 : 1e-3);
      holds += tail_inequality_check(CoefficientVector(universe, v), complement, kind, std::size_t{4}).holds;
    }
    CHECK(holds == 500);
    const CoefficientVector flat(universe, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(universe.size())));
    const TailCheck t = tail_inequality_check(flat, complement, kind, std::size_t{4});
    MESSAGE(to_string(kind) << " equal-magnitude slack " << t.slack);
    CHECK(t.holds);
  }
}

TEST_CASE("RIP mode names") {
  CHECK(parse_rip_mode("lower") == RipMode::Lower);
  CHECK(parse_rip_mode("k_constrained") == RipMode::KConstrained);
  CHECK(to_string(RipMode::Standard) == "standard");
  CHECK_THROWS_AS(parse_rip_mode("exact"), UsageError);
}
