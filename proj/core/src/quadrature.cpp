#include "lowercs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <utility>

#include "lowercs/error.hpp"

namespace lowercs {

namespace {

GaussRule1d gauss_legendre(std::size_t n) {
  GaussRule1d rule{std::vector<double>(n), std::vector<double>(n)};
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double derivative = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        const double kd = static_cast<double>(k);
        p0 = ((2.0 * kd - 1.0) * z * p1 - (kd - 1.0) * p2) / kd;
      }
      derivative = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / derivative;
      z -= step;
      if (std::abs(step) <= 1e-16) break;
    }
    if (2 * i + 1 == n) z = 0.0;
    // normalized to the probability measure dy/2
    const double w = 1.0 / ((1.0 - z * z) * derivative * derivative);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

GaussRule1d gauss_chebyshev(std::size_t n) {
  GaussRule1d rule{std::vector<double>(n), std::vector<double>(n, 1.0 / static_cast<double>(n))};
  // ascending order, mirrored so that the rule is exactly symmetric
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double z = std::cos(std::numbers::pi * static_cast<double>(2 * j + 1) /
                              (2.0 * static_cast<double>(n)));
    rule.nodes[j] = -z;
    rule.nodes[n - 1 - j] = z;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

std::size_t level_points(unsigned level) { return (std::size_t{1} << level) - 1; }

// All level vectors (entries >= 1) with sum(i_k - 1) in [lo, hi].
void for_each_level_vector(std::size_t d, unsigned lo, unsigned hi,
                           const std::function<void(const std::vector<unsigned>&, unsigned)>& fn) {
  std::vector<unsigned> levels(d, 1);
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t k, unsigned used) {
    if (k == d) {
      if (used >= lo) fn(levels, used);
      return;
    }
    for (unsigned extra = 0; used + extra <= hi; ++extra) {
      levels[k] = 1 + extra;
      rec(k + 1, used + extra);
    }
    levels[k] = 1;
  };
  rec(0, 0);
}

QuadratureRule merge_points(std::vector<std::vector<double>> points, std::vector<double> weights,
                            std::string description) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  std::vector<std::size_t> kept;
  std::vector<double> merged;
  for (std::size_t idx : order) {
    if (!kept.empty() && points[kept.back()] == points[idx]) {
      merged.back() += weights[idx];
    } else {
      kept.push_back(idx);
      merged.push_back(weights[idx]);
    }
  }
  const std::size_t d = points.empty() ? 0 : points.front().size();
  QuadratureRule rule;
  rule.nodes.resize(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(d));
  rule.weights.resize(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t r = 0; r < kept.size(); ++r) {
    for (std::size_t k = 0; k < d; ++k) {
      rule.nodes(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = points[kept[r]][k];
    }
    rule.weights[static_cast<Eigen::Index>(r)] = merged[r];
  }
  rule.description = std::move(description);
  return rule;
}

}  // namespace

GaussRule1d gauss_rule(BasisKind kind, std::size_t n) {
  if (n == 0) throw DomainError("a Gauss rule needs at least one node");
  return kind == BasisKind::Legendre ? gauss_legendre(n) : gauss_chebyshev(n);
}

QuadratureRule tensor_rule(BasisKind kind, std::size_t d, std::size_t points_per_dim) {
  if (d == 0) throw DomainError("dimension must be at least 1");
  const GaussRule1d base = gauss_rule(kind, points_per_dim);
  const double total = std::pow(static_cast<double>(points_per_dim), static_cast<double>(d));
  if (total > 5e7) throw SizeError("tensor quadrature grid is too large");
  const auto count = static_cast<Eigen::Index>(std::llround(total));
  QuadratureRule rule;
  rule.nodes.resize(count, static_cast<Eigen::Index>(d));
  rule.weights.resize(count);
  std::vector<std::size_t> digit(d, 0);
  for (Eigen::Index r = 0; r < count; ++r) {
    double w = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      rule.nodes(r, static_cast<Eigen::Index>(k)) = base.nodes[digit[k]];
      w *= base.weights[digit[k]];
    }
    rule.weights[r] = w;
    for (std::size_t k = 0; k < d; ++k) {
      if (++digit[k] < points_per_dim) break;
      digit[k] = 0;
    }
  }
  rule.description = "tensor Gauss " + std::to_string(points_per_dim) + "^" + std::to_string(d);
  return rule;
}

std::uint64_t smolyak_raw_point_count(std::size_t d, unsigned level) {
  const unsigned lo = level + 1 > d ? static_cast<unsigned>(level + 1 - d) : 0;
  std::uint64_t total = 0;
  for_each_level_vector(d, lo, level, [&](const std::vector<unsigned>& levels, unsigned) {
    std::uint64_t p = 1;
    for (unsigned l : levels) p *= level_points(l);
    total += p;
  });
  return total;
}

QuadratureRule smolyak_rule(BasisKind kind, std::size_t d, unsigned level) {
  if (d == 0) throw DomainError("dimension must be at least 1");
  if (level > 12) throw SizeError("Smolyak level above 12 is not supported");
  if (smolyak_raw_point_count(d, level) > 20'000'000) {
    throw SizeError("Smolyak grid of level " + std::to_string(level) + " in d=" +
                    std::to_string(d) + " is too large");
  }
  std::vector<GaussRule1d> base;
  for (unsigned l = 1; l <= level + 1; ++l) base.push_back(gauss_rule(kind, level_points(l)));

  std::vector<std::vector<double>> points;
  std::vector<double> weights;
  const unsigned lo = level + 1 > d ? static_cast<unsigned>(level + 1 - d) : 0;
  for_each_level_vector(d, lo, level, [&](const std::vector<unsigned>& levels, unsigned used) {
    const unsigned gap = level - used;
    const double coef = (gap % 2 == 0 ? 1.0 : -1.0) * binomial(d - 1, gap);
    std::vector<std::size_t> digit(d, 0);
    while (true) {
      std::vector<double> y(d);
      double w = coef;
      for (std::size_t k = 0; k < d; ++k) {
        const GaussRule1d& g = base[levels[k] - 1];
        y[k] = g.nodes[digit[k]];
        w *= g.weights[digit[k]];
      }
      points.push_back(std::move(y));
      weights.push_back(w);
      std::size_t k = 0;
      for (; k < d; ++k) {
        if (++digit[k] < base[levels[k] - 1].nodes.size()) break;
        digit[k] = 0;
      }
      if (k == d) break;
    }
  });
  return merge_points(std::move(points), std::move(weights),
                      "Smolyak Gauss level " + std::to_string(level) + " d=" + std::to_string(d));
}

unsigned default_smolyak_level(Degree max_degree) {
  unsigned i = 1;
  while (level_points(i) < static_cast<std::size_t>(max_degree) + 8) ++i;
  return (i - 1) + 2;
}

namespace {

std::vector<unsigned> first_primes(std::size_t count) {
  std::vector<unsigned> primes;
  for (unsigned c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (unsigned p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

QuadratureRule shifted_halton_rule(BasisKind kind, std::size_t d, std::size_t n,
                                   const std::vector<double>& shift) {
  if (shift.size() != d) throw ShapeError("Halton shift must have one entry per coordinate");
  const auto primes = first_primes(d);
  QuadratureRule rule;
  rule.nodes.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  rule.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      double u = radical_inverse(i + 1, primes[k]) + shift[k];
      u -= std::floor(u);
      const double y = kind == BasisKind::Legendre ? 2.0 * u - 1.0 : std::cos(std::numbers::pi * u);
      rule.nodes(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = std::clamp(y, -1.0, 1.0);
    }
  }
  rule.description = "shifted Halton n=" + std::to_string(n);
  return rule;
}

}  // namespace lowercs
