#include "lowercs/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lowercs/error.hpp"
#include "lowercs/io.hpp"
#include "lowercs/parallel.hpp"
#include "lowercs/random.hpp"

namespace lowercs {

// ------------------------------------------------------------ test functions

std::string_view to_string(FunctionId id) noexcept {
  switch (id) {
    case FunctionId::TrigRational: return "f1_trig_rational";
    case FunctionId::ExpCos: return "f2_exp_cos";
    case FunctionId::RationalRoot: return "f3_rational_root";
    case FunctionId::ExpLinear: return "f4_exp_linear";
    case FunctionId::BasisFunction: return "custom";
  }
  return "unknown";
}

FunctionId parse_function_id(std::string_view text) {
  if (text == "f1_trig_rational" || text == "f1") return FunctionId::TrigRational;
  if (text == "f2_exp_cos" || text == "f2") return FunctionId::ExpCos;
  if (text == "f3_rational_root" || text == "f3") return FunctionId::RationalRoot;
  if (text == "f4_exp_linear" || text == "f4") return FunctionId::ExpLinear;
  if (text == "custom") return FunctionId::BasisFunction;
  throw UsageError("unknown test function '" + std::string(text) + "'");
}

Function test_function(FunctionId id, std::size_t d, BasisKind kind,
                       const std::optional<MultiIndex>& mu) {
  if (d == 0) throw UsageError("dimension must be at least 1");
  const std::size_t half = (d + 1) / 2;
  const double dd = static_cast<double>(d);
  switch (id) {
    case FunctionId::TrigRational:
      if (d < 2) throw UsageError("f1_trig_rational needs d >= 2");
      return [half, d](std::span<const double> y) {
        double num = 1.0;
        double den = 1.0;
        for (std::size_t k = 1; k <= half; ++k) num *= std::cos(16.0 * y[k - 1] / std::ldexp(1.0, static_cast<int>(k)));
        for (std::size_t k = half + 1; k <= d; ++k) den *= 1.0 - y[k - 1] / std::ldexp(1.0, 2 * static_cast<int>(k));
        return num / den;
      };
    case FunctionId::ExpCos:
      return [dd](std::span<const double> y) {
        double sum = 0.0;
        for (double v : y) sum += std::cos(v);
        return std::exp(-sum / (8.0 * dd));
      };
    case FunctionId::RationalRoot:
      if (d < 2) throw UsageError("f3_rational_root needs d >= 2");
      return [half, d, dd](std::span<const double> y) {
        double num = 1.0;
        double den = 1.0;
        for (std::size_t k = 1; k <= half; ++k) {
          num *= 1.0 + std::ldexp(1.0, 2 * static_cast<int>(k)) * y[k - 1] * y[k - 1];
        }
        for (std::size_t k = half + 1; k <= d; ++k) den *= 100.0 + 5.0 * y[k - 1];
        return std::pow(num / den, 1.0 / dd);
      };
    case FunctionId::ExpLinear:
      return [dd](std::span<const double> y) {
        double sum = 0.0;
        for (double v : y) sum += v;
        return std::exp(-sum / (2.0 * dd));
      };
    case FunctionId::BasisFunction: {
      if (!mu) throw UsageError("the custom function needs a basis index");
      if (mu->dim() != d) throw UsageError("basis index dimension does not match d");
      const MultiIndex nu = *mu;
      return [kind, nu](std::span<const double> y) { return eval_tensor(kind, nu, y); };
    }
  }
  throw UsageError("unknown test function");
}

CoefficientVector synthetic_lower_truth(const IndexSet& universe, std::size_t sparsity,
                                        std::uint64_t seed) {
  if (sparsity == 0) throw DomainError("sparsity must be at least 1");
  if (sparsity > universe.size()) throw DomainError("sparsity exceeds the universe size");
  if (!is_lower(universe)) throw PreconditionError("the universe must be lower");
  Rng rng(seed);
  std::vector<MultiIndex> chosen;
  while (chosen.size() < sparsity) {
    const IndexSet current(universe.dimension(), chosen);
    std::vector<MultiIndex> options;
    for (const auto& nu : admissible_extensions(current)) {
      if (universe.contains(nu)) options.push_back(nu);
    }
    chosen.push_back(options[rng.below(options.size())]);
  }
  Eigen::VectorXd values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(universe.size()));
  for (const auto& nu : IndexSet(universe.dimension(), chosen)) {
    double v = 0.0;
    while (v == 0.0) v = rng.normal();
    values[static_cast<Eigen::Index>(*universe.position(nu))] = v;
  }
  values /= values.norm();
  return CoefficientVector(universe, std::move(values));
}

std::uint64_t largest_s_within(std::uint64_t n_max, std::size_t d) {
  if (n_max == 0) throw DomainError("N bound must be positive");
  std::uint64_t s = 1;
  while (hyperbolic_cross_cardinality(s + 1, d) <= n_max) ++s;
  return s;
}

// -------------------------------------------------------------------- config

namespace {

using nlohmann::json;

template <typename T>
T get_as(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw UsageError("config key '" + key + "' has the wrong type");
  }
}

}  // namespace

ExperimentConfig parse_experiment_config_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("config must be a JSON object");

  ExperimentConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "function") {
      cfg.function = parse_function_id(get_as<std::string>(value, key));
    } else if (key == "basis_index") {
      cfg.basis_index = MultiIndex(get_as<std::vector<Degree>>(value, key));
    } else if (key == "d") {
      cfg.d = get_as<std::size_t>(value, key);
    } else if (key == "kind") {
      cfg.kind = parse_basis_kind(get_as<std::string>(value, key));
    } else if (key == "s") {
      cfg.s = get_as<std::uint64_t>(value, key);
    } else if (key == "N_max") {
      cfg.n_max = get_as<std::uint64_t>(value, key);
    } else if (key == "m") {
      cfg.m_values = get_as<std::vector<std::size_t>>(value, key);
    } else if (key == "m_over_N") {
      cfg.m_over_N = get_as<std::vector<double>>(value, key);
    } else if (key == "weight_modes") {
      cfg.weight_modes.clear();
      for (const auto& w : get_as<std::vector<std::string>>(value, key)) {
        cfg.weight_modes.push_back(parse_weight_mode(w));
      }
    } else if (key == "trials") {
      cfg.trials = get_as<std::size_t>(value, key);
    } else if (key == "seed") {
      cfg.seed = get_as<std::uint64_t>(value, key);
    } else if (key == "eta_mode") {
      cfg.eta.mode = parse_eta_mode(get_as<std::string>(value, key));
    } else if (key == "eta_epsilon") {
      cfg.eta.epsilon = get_as<double>(value, key);
    } else if (key == "eta") {
      cfg.eta.manual_value = get_as<double>(value, key);
    } else if (key == "n_test") {
      cfg.n_test = get_as<std::size_t>(value, key);
    } else if (key == "threads") {
      cfg.threads = get_as<std::size_t>(value, key);
    } else if (key == "tolerance") {
      cfg.bpdn.tolerance = get_as<double>(value, key);
    } else if (key == "max_iterations") {
      cfg.bpdn.max_iterations = get_as<std::size_t>(value, key);
    } else if (key == "quadrature_level") {
      cfg.quadrature.level = get_as<int>(value, key);
    } else if (key == "fail_fraction") {
      cfg.fail_fraction = get_as<double>(value, key);
    } else {
      throw UsageError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_experiment_config_text(text);
}

// ------------------------------------------------------- Monte Carlo error

namespace {
constexpr std::size_t kMaxCachedEntries = 20'000'000;
}

MonteCarloError::MonteCarloError(BasisKind kind, const IndexSet& set, const Function& g,
                                 std::size_t n_test, std::uint64_t seed, std::size_t threads)
    : kind_(kind), set_(set) {
  if (n_test < 2) throw DomainError("at least two test points are needed");
  points_ = draw_samples(kind, set.dimension(), n_test, seed).points();
  values_.resize(static_cast<Eigen::Index>(n_test));
  for (std::size_t i = 0; i < n_test; ++i) {
    const double v = g(row_span(points_, static_cast<Eigen::Index>(i)));
    if (!std::isfinite(v)) throw DataError("non-finite function value at test point " + std::to_string(i));
    values_[static_cast<Eigen::Index>(i)] = v;
  }
  if (n_test * set.size() <= kMaxCachedEntries) basis_ = basis_matrix(kind, set, points_, threads);
}

MonteCarloError::Estimate MonteCarloError::operator()(const CoefficientVector& c) const {
  if (!(c.index_set() == set_)) throw ShapeError("coefficients are keyed to a different set");
  Eigen::VectorXd approx;
  if (basis_.size() > 0) {
    approx = basis_ * c.values();
  } else {
    approx.resize(points_.rows());
    constexpr Eigen::Index kBlock = 1024;
    for (Eigen::Index start = 0; start < points_.rows(); start += kBlock) {
      const Eigen::Index len = std::min(kBlock, points_.rows() - start);
      const PointMatrix block = points_.middleRows(start, len);
      approx.segment(start, len) = basis_matrix(kind_, set_, block) * c.values();
    }
  }
  const Eigen::ArrayXd sq = (values_ - approx).array().square();
  const double n = static_cast<double>(sq.size());
  const double mean = sq.mean();
  const double var = (sq - mean).square().sum() / (n - 1.0);
  const double rms = std::sqrt(mean);
  const double se_mean = std::sqrt(var / n);
  return Estimate{rms, rms > 0.0 ? se_mean / (2.0 * rms) : std::sqrt(se_mean)};
}

// ---------------------------------------------------------- run_convergence

namespace {

void validate(const ExperimentConfig& cfg, std::size_t n, const std::vector<std::size_t>& ms) {
  if (cfg.trials == 0) throw UsageError("trials must be at least 1");
  if (cfg.weight_modes.empty()) throw UsageError("at least one weight mode is required");
  if (ms.empty()) throw UsageError("the m grid is empty");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (ms[i] == 0) throw UsageError("m values must be positive");
    if (ms[i] > n) {
      throw UsageError("m = " + std::to_string(ms[i]) + " exceeds N = " + std::to_string(n));
    }
    if (i > 0 && ms[i] <= ms[i - 1]) throw UsageError("the m grid must be strictly increasing");
  }
  if (!(cfg.fail_fraction >= 0.0 && cfg.fail_fraction <= 1.0)) {
    throw UsageError("fail_fraction must lie in [0, 1]");
  }
}

constexpr std::uint64_t kTestStream = 0x7e57;
constexpr std::uint64_t kQuadratureStream = 0x9ad;

}  // namespace

ConvergenceResult run_convergence(const ExperimentConfig& cfg) {
  const Function g = test_function(cfg.function, cfg.d, cfg.kind, cfg.basis_index);
  const std::uint64_t s = cfg.s > 0 ? cfg.s : largest_s_within(cfg.n_max, cfg.d);
  const IndexSet set = hyperbolic_cross(s, cfg.d);
  const std::size_t n = set.size();

  std::vector<std::size_t> ms = cfg.m_values;
  if (ms.empty()) {
    for (double r : cfg.m_over_N) {
      if (!(r > 0.0 && r <= 1.0)) throw UsageError("m/N ratios must lie in (0, 1]");
      ms.push_back(static_cast<std::size_t>(std::floor(r * static_cast<double>(n))));
    }
  }
  validate(cfg, n, ms);
  const std::size_t threads = std::max<std::size_t>(cfg.threads, 1);

  QuadratureSpec quad = cfg.quadrature;
  quad.seed = derive_seed(cfg.seed, kQuadratureStream);
  const ReferenceCoefficients ref = reference_coefficients(cfg.kind, g, set, quad, threads);

  EtaChoice eta_choice = cfg.eta;
  if (eta_choice.mode == EtaMode::ExactTail) eta_choice.K_s = K_of_s(cfg.kind, s, cfg.d);

  std::vector<WeightVector> weights;
  for (WeightMode w : cfg.weight_modes) weights.push_back(make_weights(cfg.kind, set, w));

  const MonteCarloError error_of(cfg.kind, set, g, cfg.n_test, derive_seed(cfg.seed, kTestStream),
                                 threads);

  ConvergenceResult result{{}, {}, s, n, ref.norm_l2, ref.tail_l2, ref.rule_description, false};
  const std::size_t n_modes = cfg.weight_modes.size();

  for (std::size_t mi = 0; mi < ms.size(); ++mi) {
    const std::size_t m = ms[mi];
    const double eta = choose_eta(eta_choice, ref, m);
    std::vector<TrialRecord> cell(cfg.trials * n_modes);
    parallel_for(cfg.trials, threads, [&](std::size_t t) {
      const std::uint64_t trial_seed = derive_seed(derive_seed(cfg.seed, m), t);
      const SampleSet samples = draw_samples(cfg.kind, cfg.d, m, trial_seed);
      const SensingSystem system = build_system(cfg.kind, set, samples, g, eta);
      for (std::size_t w = 0; w < n_modes; ++w) {
        TrialRecord& rec = cell[t * n_modes + w];
        rec = TrialRecord{m, t, cfg.weight_modes[w], samples.fingerprint(),
                          std::numeric_limits<double>::quiet_NaN(), true};
        try {
          const RecoveryReport report = weighted_bpdn(system, weights[w], cfg.bpdn);
          rec.l2_error = error_of(report.coefficients).rms;
          rec.failed = !report.converged;
        } catch (const ConvergenceError&) {
          rec.failed = true;
        }
      }
    });

    for (std::size_t w = 0; w < n_modes; ++w) {
      std::vector<double> errors;
      std::size_t fails = 0;
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        const TrialRecord& rec = cell[t * n_modes + w];
        if (rec.failed) ++fails;
        if (std::isfinite(rec.l2_error)) errors.push_back(rec.l2_error);
      }
      double mean = std::numeric_limits<double>::quiet_NaN();
      double sd = 0.0;
      if (!errors.empty()) {
        long double sum = 0.0L;
        for (double e : errors) sum += e;
        mean = static_cast<double>(sum / errors.size());
        if (errors.size() > 1) {
          long double ss = 0.0L;
          for (double e : errors) ss += (e - mean) * (e - mean);
          sd = static_cast<double>(std::sqrt(ss / (errors.size() - 1)));
        }
      }
      const bool flagged =
          static_cast<double>(fails) > cfg.fail_fraction * static_cast<double>(cfg.trials);
      result.any_flagged = result.any_flagged || flagged;
      result.rows.push_back(ConvergenceRow{m, n, static_cast<double>(m) / static_cast<double>(n),
                                           cfg.weight_modes[w], cfg.trials, mean, sd, fails,
                                           flagged});
    }
    result.records.insert(result.records.end(), cell.begin(), cell.end());
  }
  return result;
}

void write_convergence_csv(std::ostream& out, const ConvergenceResult& result) {
  out << kConvergenceCsvHeader << '\n';
  for (const auto& row : result.rows) {
    out << row.m << ',' << row.N << ',' << format_double(row.m_over_N) << ','
        << to_string(row.weight_mode) << ',' << row.trials << ',' << format_double(row.mean_l2)
        << ',' << format_double(row.std_l2) << ',' << row.fail_count << '\n';
  }
}

}  // namespace lowercs
