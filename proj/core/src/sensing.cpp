#include "lowercs/sensing.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <string>
#include <utility>

#include "lowercs/error.hpp"
#include "lowercs/parallel.hpp"
#include "lowercs/random.hpp"

namespace lowercs {

// ----------------------------------------------------------------- SampleSet

SampleSet::SampleSet(BasisKind kind, PointMatrix points, std::uint64_t seed)
    : kind_(kind), points_(std::move(points)), seed_(seed) {
  if (points_.rows() == 0) throw DomainError("a sample set needs at least one point");
  if (points_.cols() == 0) throw DomainError("dimension must be at least 1");
  for (Eigen::Index i = 0; i < points_.size(); ++i) {
    if (!(std::abs(points_.data()[i]) <= 1.0)) {
      throw DomainError("sample coordinate outside [-1,1]");
    }
  }
}

std::uint64_t SampleSet::fingerprint() const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  const auto* bytes = reinterpret_cast<const unsigned char*>(points_.data());
  const std::size_t n = static_cast<std::size_t>(points_.size()) * sizeof(double);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

SampleSet draw_samples(BasisKind kind, std::size_t d, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw DomainError("number of samples must be positive");
  if (d == 0) throw DomainError("dimension must be at least 1");
  Rng rng(derive_seed(seed, 0));
  PointMatrix points(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    const double u = rng.uniform01();
    points.data()[i] = kind == BasisKind::Legendre ? 2.0 * u - 1.0 : std::cos(std::numbers::pi * u);
  }
  return SampleSet(kind, std::move(points), seed);
}

// --------------------------------------------------------- CoefficientVector

CoefficientVector::CoefficientVector(IndexSet index_set)
    : index_set_(std::move(index_set)),
      values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index_set_.size()))) {}

CoefficientVector::CoefficientVector(IndexSet index_set, Eigen::VectorXd values)
    : index_set_(std::move(index_set)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != index_set_.size()) {
    throw ShapeError("coefficient vector length does not match its index set");
  }
  if (!values_.allFinite()) throw DataError("coefficient vector has non-finite entries");
}

double CoefficientVector::at(const MultiIndex& nu) const {
  auto pos = index_set_.position(nu);
  return pos ? values_[static_cast<Eigen::Index>(*pos)] : 0.0;
}

IndexSet CoefficientVector::support() const {
  std::vector<std::size_t> nz;
  for (std::size_t i = 0; i < size(); ++i) {
    if ((*this)[i] != 0.0) nz.push_back(i);
  }
  return index_set_.subset(nz);
}

// ------------------------------------------------------------- SensingSystem

SensingSystem::SensingSystem(BasisKind kind, IndexSet index_set, Eigen::MatrixXd matrix,
                             Eigen::VectorXd observations, double eta)
    : kind_(kind),
      index_set_(std::move(index_set)),
      matrix_(std::move(matrix)),
      observations_(std::move(observations)),
      eta_(eta) {
  if (static_cast<std::size_t>(matrix_.cols()) != index_set_.size()) {
    throw ShapeError("matrix column count does not match the index set");
  }
  if (matrix_.rows() != observations_.size()) {
    throw ShapeError("observation length does not match the matrix row count");
  }
  if (!(eta_ >= 0.0) || !std::isfinite(eta_)) throw DomainError("eta must be finite and >= 0");
}

double SensingSystem::residual_budget() const noexcept {
  return eta_ / std::sqrt(static_cast<double>(matrix_.rows()));
}

SensingSystem SensingSystem::with_eta(double eta) const {
  return SensingSystem(kind_, index_set_, matrix_, observations_, eta);
}

SensingSystem SensingSystem::with_observations(Eigen::VectorXd observations) const {
  return SensingSystem(kind_, index_set_, matrix_, std::move(observations), eta_);
}

// ---------------------------------------------------------- basis evaluation

namespace {

/// Each member stored as its nonzero (coordinate, degree) pairs.
struct SparseBasis {
  std::vector<std::vector<std::pair<std::size_t, Degree>>> terms;
  std::vector<Degree> max_degree;

  explicit SparseBasis(const IndexSet& set) : terms(set.size()), max_degree(set.dimension(), 0) {
    for (std::size_t j = 0; j < set.size(); ++j) {
      for (std::size_t k = 0; k < set.dimension(); ++k) {
        const Degree v = set[j][k];
        if (v == 0) continue;
        terms[j].emplace_back(k, v);
        max_degree[k] = std::max(max_degree[k], v);
      }
    }
  }
};

/// 1-d tables for one point, laid out coordinate after coordinate.
class PointTables {
 public:
  explicit PointTables(const SparseBasis& basis) : offsets_(basis.max_degree.size() + 1, 0) {
    for (std::size_t k = 0; k < basis.max_degree.size(); ++k) {
      offsets_[k + 1] = offsets_[k] + basis.max_degree[k] + 1;
    }
    values_.resize(offsets_.back());
  }

  void fill(BasisKind kind, std::span<const double> y) {
    for (std::size_t k = 0; k + 1 < offsets_.size(); ++k) {
      eval_1d_table(kind, y[k], std::span<double>(values_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]));
    }
  }

  double product(const std::vector<std::pair<std::size_t, Degree>>& term) const {
    double v = 1.0;
    for (const auto& [k, deg] : term) v *= values_[offsets_[k] + deg];
    return v;
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<double> values_;
};

void check_dimension(const IndexSet& set, std::size_t d) {
  if (set.dimension() != d) {
    throw ShapeError("index set dimension " + std::to_string(set.dimension()) +
                     " does not match point dimension " + std::to_string(d));
  }
}

}  // namespace

Eigen::MatrixXd basis_matrix(BasisKind kind, const IndexSet& index_set, const PointMatrix& points,
                             std::size_t threads) {
  check_dimension(index_set, static_cast<std::size_t>(points.cols()));
  const SparseBasis basis(index_set);
  Eigen::MatrixXd psi(points.rows(), static_cast<Eigen::Index>(index_set.size()));
  parallel_for(static_cast<std::size_t>(points.rows()), threads, [&](std::size_t i) {
    PointTables tables(basis);
    tables.fill(kind, row_span(points, static_cast<Eigen::Index>(i)));
    for (std::size_t j = 0; j < index_set.size(); ++j) {
      psi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = tables.product(basis.terms[j]);
    }
  });
  return psi;
}

double evaluate_expansion(BasisKind kind, const CoefficientVector& coefficients,
                          std::span<const double> y) {
  const IndexSet& set = coefficients.index_set();
  check_dimension(set, y.size());
  const SparseBasis basis(set);
  PointTables tables(basis);
  tables.fill(kind, y);
  double total = 0.0;
  for (std::size_t j = 0; j < set.size(); ++j) total += coefficients[j] * tables.product(basis.terms[j]);
  return total;
}

SensingSystem build_system(BasisKind kind, const IndexSet& index_set, const SampleSet& samples,
                           const Function& g, double eta, std::size_t threads) {
  if (index_set.empty()) throw DomainError("the index set must be nonempty");
  if (samples.kind() != kind) throw PreconditionError("samples were drawn for a different basis");
  check_dimension(index_set, samples.dimension());
  const double scale = 1.0 / std::sqrt(static_cast<double>(samples.size()));
  Eigen::MatrixXd a = basis_matrix(kind, index_set, samples.points(), threads) * scale;
  Eigen::VectorXd obs(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v = g(samples.point(i));
    if (!std::isfinite(v)) {
      throw DataError("non-finite function value at sample " + std::to_string(i));
    }
    obs[static_cast<Eigen::Index>(i)] = v * scale;
  }
  return SensingSystem(kind, index_set, std::move(a), std::move(obs), eta);
}

// ---------------------------------------------------- reference coefficients

namespace {

constexpr std::size_t kAccumulationBlocks = 64;

struct ProjectionSums {
  std::vector<long double> coefficients;
  long double norm_squared = 0.0L;
};

/// Deterministic blocked accumulation of sum_q w_q g(y_q) Psi_nu(y_q) and
/// sum_q w_q g(y_q)^2, independent of the thread count.
ProjectionSums project(BasisKind kind, const Function& g, const IndexSet& set,
                       const QuadratureRule& rule, std::size_t threads) {
  const SparseBasis basis(set);
  const std::size_t n = rule.size();
  const std::size_t blocks = std::min(kAccumulationBlocks, std::max<std::size_t>(n, 1));
  std::vector<ProjectionSums> partial(blocks);
  parallel_for(blocks, threads, [&](std::size_t b) {
    ProjectionSums& acc = partial[b];
    acc.coefficients.assign(set.size(), 0.0L);
    PointTables tables(basis);
    const std::size_t begin = n * b / blocks;
    const std::size_t end = n * (b + 1) / blocks;
    for (std::size_t q = begin; q < end; ++q) {
      const auto y = row_span(rule.nodes, static_cast<Eigen::Index>(q));
      const double gv = g(y);
      if (!std::isfinite(gv)) {
        throw DataError("non-finite function value at quadrature node " + std::to_string(q));
      }
      const long double wg = static_cast<long double>(rule.weights[static_cast<Eigen::Index>(q)]) * gv;
      acc.norm_squared += wg * gv;
      tables.fill(kind, y);
      for (std::size_t j = 0; j < set.size(); ++j) {
        acc.coefficients[j] += wg * tables.product(basis.terms[j]);
      }
    }
  });
  ProjectionSums total;
  total.coefficients.assign(set.size(), 0.0L);
  for (const auto& p : partial) {
    total.norm_squared += p.norm_squared;
    for (std::size_t j = 0; j < set.size(); ++j) total.coefficients[j] += p.coefficients[j];
  }
  return total;
}

/// sum_q w_q (g(y_q) - sum_J c_nu Psi_nu(y_q))^2, blocked like project().
long double residual_energy(BasisKind kind, const Function& g, const CoefficientVector& c,
                            const QuadratureRule& rule, std::size_t threads) {
  const IndexSet& set = c.index_set();
  const SparseBasis basis(set);
  const std::size_t n = rule.size();
  const std::size_t blocks = std::min(kAccumulationBlocks, std::max<std::size_t>(n, 1));
  std::vector<long double> partial(blocks, 0.0L);
  parallel_for(blocks, threads, [&](std::size_t b) {
    PointTables tables(basis);
    const std::size_t begin = n * b / blocks;
    const std::size_t end = n * (b + 1) / blocks;
    for (std::size_t q = begin; q < end; ++q) {
      const auto y = row_span(rule.nodes, static_cast<Eigen::Index>(q));
      tables.fill(kind, y);
      long double r = g(y);
      for (std::size_t j = 0; j < set.size(); ++j) r -= c[j] * tables.product(basis.terms[j]);
      partial[b] += static_cast<long double>(rule.weights[static_cast<Eigen::Index>(q)]) * r * r;
    }
  });
  long double total = 0.0L;
  for (long double v : partial) total += v;
  return total;
}

}  // namespace

ReferenceCoefficients reference_coefficients(BasisKind kind, const Function& g,
                                             const IndexSet& index_set, const QuadratureSpec& spec,
                                             std::size_t threads) {
  if (index_set.empty()) throw DomainError("the index set must be nonempty");
  const std::size_t d = index_set.dimension();
  const IndexSet outer = margin(index_set);
  std::vector<MultiIndex> all(index_set.begin(), index_set.end());
  all.insert(all.end(), outer.begin(), outer.end());
  const IndexSet extended(d, std::move(all));
  const Degree max_degree = extended.max_degree();

  QuadratureKind kind_of_rule = spec.kind;
  const std::size_t tensor_points =
      spec.points_per_dim ? spec.points_per_dim : static_cast<std::size_t>(max_degree) + 8;
  if (kind_of_rule == QuadratureKind::Auto) {
    const double grid = std::pow(static_cast<double>(tensor_points), static_cast<double>(d));
    if (d <= 4 && grid <= static_cast<double>(spec.max_tensor_points)) {
      kind_of_rule = QuadratureKind::Tensor;
    } else if (d <= 16) {
      kind_of_rule = QuadratureKind::Smolyak;
    } else {
      kind_of_rule = QuadratureKind::QuasiMonteCarlo;
    }
  }

  std::vector<long double> coef(extended.size(), 0.0L);
  long double norm_sq = 0.0L;
  double standard_error = 0.0;
  std::string description;
  std::size_t rule_size = 0;
  std::vector<QuadratureRule> rules;

  if (kind_of_rule == QuadratureKind::QuasiMonteCarlo) {
    const unsigned reps = std::max(2u, spec.qmc_replicates);
    std::vector<long double> norms;
    Rng rng(derive_seed(spec.seed, 0x51a7));
    for (unsigned r = 0; r < reps; ++r) {
      std::vector<double> shift(d);
      for (double& v : shift) v = rng.uniform01();
      const QuadratureRule& rule =
          rules.emplace_back(shifted_halton_rule(kind, d, spec.qmc_points, shift));
      const ProjectionSums sums = project(kind, g, extended, rule, threads);
      for (std::size_t j = 0; j < coef.size(); ++j) coef[j] += sums.coefficients[j] / reps;
      norm_sq += sums.norm_squared / reps;
      norms.push_back(sums.norm_squared);
      description = rule.description + " x " + std::to_string(reps) + " shifts";
      rule_size += rule.size();
    }
    long double var = 0.0L;
    for (long double v : norms) var += (v - norm_sq) * (v - norm_sq);
    var /= static_cast<long double>(reps - 1);
    standard_error = static_cast<double>(std::sqrt(var / reps));
  } else {
    QuadratureRule rule;
    if (kind_of_rule == QuadratureKind::Tensor) {
      rule = tensor_rule(kind, d, tensor_points);
    } else {
      const unsigned level =
          spec.level >= 0 ? static_cast<unsigned>(spec.level) : default_smolyak_level(max_degree);
      rule = smolyak_rule(kind, d, level);
    }
    const ProjectionSums sums = project(kind, g, extended, rule, threads);
    coef = sums.coefficients;
    norm_sq = sums.norm_squared;
    description = rule.description;
    rule_size = rule.size();
    rules.push_back(std::move(rule));
  }

  Eigen::VectorXd inside(static_cast<Eigen::Index>(index_set.size()));
  Eigen::VectorXd outside(static_cast<Eigen::Index>(outer.size()));
  long double captured = 0.0L;
  for (std::size_t j = 0; j < index_set.size(); ++j) {
    const long double c = coef[*extended.position(index_set[j])];
    inside[static_cast<Eigen::Index>(j)] = static_cast<double>(c);
    captured += c * c;
  }
  double weighted_tail = 0.0;
  double max_ratio = 0.0;
  for (std::size_t j = 0; j < outer.size(); ++j) {
    const double c = static_cast<double>(coef[*extended.position(outer[j])]);
    outside[static_cast<Eigen::Index>(j)] = c;
    const double w = weight(kind, outer[j]);
    weighted_tail += w * std::abs(c);
    max_ratio = std::max(max_ratio, std::abs(c) / w);
  }

  const long double raw_tail = norm_sq - captured;
  const double tolerance =
      1e-12 * std::max(1.0, static_cast<double>(norm_sq)) + 3.0 * standard_error;
  if (static_cast<double>(raw_tail) < -tolerance) {
    throw AccuracyError("quadrature '" + description + "' is too coarse: tail energy estimate " +
                        std::to_string(static_cast<double>(raw_tail)) + " is negative");
  }

  CoefficientVector projection(index_set, std::move(inside));
  // The tail is integrated directly from the pointwise residual: subtracting
  // sum_J c^2 from ||g||^2 loses all significant digits once the tail energy
  // nears the roundoff of ||g||^2.
  long double residual = 0.0L;
  for (const auto& rule : rules) residual += residual_energy(kind, g, projection, rule, threads);
  residual /= static_cast<long double>(rules.size());
  const double norm_l2 = std::sqrt(static_cast<double>(std::max(norm_sq, 0.0L)));
  const double raw = static_cast<double>(raw_tail);
  return ReferenceCoefficients{
      std::move(projection),
      CoefficientVector(outer, std::move(outside)),
      norm_l2,
      std::sqrt(std::max(0.0, static_cast<double>(residual))),
      weighted_tail,
      max_ratio,
      raw,
      standard_error,
      description,
      rule_size,
  };
}

// ----------------------------------------------------------------------- eta

std::string_view to_string(EtaMode mode) noexcept {
  switch (mode) {
    case EtaMode::Surrogate: return "surrogate";
    case EtaMode::ExactTail: return "exact_tail";
    case EtaMode::TailL2: return "tail_l2";
    case EtaMode::Manual: return "manual";
  }
  return "unknown";
}

EtaMode parse_eta_mode(std::string_view text) {
  if (text == "surrogate") return EtaMode::Surrogate;
  if (text == "exact_tail") return EtaMode::ExactTail;
  if (text == "tail_l2") return EtaMode::TailL2;
  if (text == "manual") return EtaMode::Manual;
  throw UsageError("unknown eta mode '" + std::string(text) + "'");
}

double choose_eta(const EtaChoice& choice, const ReferenceCoefficients& reference, std::size_t m) {
  const double root_m = std::sqrt(static_cast<double>(m));
  switch (choice.mode) {
    case EtaMode::Surrogate:
      return root_m * reference.tail_weighted_l1;
    case EtaMode::ExactTail: {
      if (!(choice.K_s >= 1.0)) throw DomainError("K(s) must be >= 1");
      if (!(choice.epsilon > 0.0)) throw DomainError("epsilon must be positive");
      const double e_g = std::max(std::sqrt(2.0) * reference.tail_l2,
                                  std::sqrt(2.0) * reference.tail_weighted_l1 / std::sqrt(choice.K_s));
      return root_m * (1.0 + choice.epsilon) * e_g;
    }
    case EtaMode::TailL2:
      return root_m * reference.tail_l2;
    case EtaMode::Manual:
      if (!(choice.manual_value >= 0.0)) throw DomainError("eta must be >= 0");
      return choice.manual_value;
  }
  return 0.0;
}

}  // namespace lowercs
