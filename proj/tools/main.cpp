#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lowercs/analysis.hpp"
#include "lowercs/error.hpp"
#include "lowercs/experiment.hpp"
#include "lowercs/io.hpp"
#include "lowercs/multiindex.hpp"
#include "lowercs/orthopoly.hpp"
#include "lowercs/parallel.hpp"
#include "lowercs/random.hpp"
#include "lowercs/sensing.hpp"
#include "lowercs/solvers.hpp"

namespace {

using namespace lowercs;

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitFlagged = 4;

// substreams of --seed
constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kTruthStream = 2;
constexpr std::uint64_t kQuadratureStream = 3;

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "text";

  bool csv() const { return format == "csv"; }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--out", c.out, "Write to this file instead of standard output");
  sub->add_option("--format", c.format, "text or csv")
      ->check(CLI::IsMember({"text", "csv"}))
      ->capture_default_str();
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw UsageError("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

MultiIndex parse_index(const std::string& text) {
  std::vector<Degree> degrees;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(tok, &used);
      if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
      degrees.push_back(static_cast<Degree>(v));
    } catch (const std::logic_error&) {
      throw UsageError("bad multi-index '" + text + "': expected comma-separated degrees");
    }
  }
  if (degrees.empty()) throw UsageError("empty multi-index");
  return MultiIndex(std::move(degrees));
}

std::string spaced(const MultiIndex& nu) {
  std::string out;
  for (std::size_t k = 0; k < nu.dim(); ++k) out += (k ? " " : "") + std::to_string(nu[k]);
  return out;
}

// ------------------------------------------------------------------ enumerate

struct EnumerateArgs {
  Common common;
  std::uint64_t s = 1;
  std::size_t d = 1;
  std::size_t card = 0;
  std::uint64_t budget = kDefaultEnumerationBudget;
};

int run_enumerate(const EnumerateArgs& a) {
  const IndexSet set = hyperbolic_cross(a.s, a.d);
  Output out(a.common.out);
  std::ostream& os = out.stream();
  if (a.card == 0) {
    if (a.common.csv()) {
      for (std::size_t k = 0; k < a.d; ++k) os << (k ? "," : "") << "nu" << k + 1;
      os << '\n';
    }
    for (const auto& nu : set) {
      for (std::size_t k = 0; k < nu.dim(); ++k) os << (k ? (a.common.csv() ? "," : " ") : "") << nu[k];
      os << '\n';
    }
    return 0;
  }
  if (a.common.csv()) {
    os << "set";
    for (std::size_t k = 0; k < a.d; ++k) os << ",nu" << k + 1;
    os << '\n';
  }
  std::uint64_t id = 0;
  for_each_lower_subset(
      set, a.card,
      [&](std::span<const std::size_t> positions) {
        if (a.common.csv()) {
          for (std::size_t p : positions) {
            os << id;
            for (std::size_t k = 0; k < a.d; ++k) os << ',' << set[p][k];
            os << '\n';
          }
        } else {
          for (std::size_t i = 0; i < positions.size(); ++i) {
            os << (i ? " " : "") << set[positions[i]].to_string();
          }
          os << '\n';
        }
        ++id;
      },
      a.budget);
  return 0;
}

// -------------------------------------------------------------------- weights

struct WeightsArgs {
  Common common;
  std::string kind = "legendre";
  std::vector<std::string> indices;
  std::uint64_t s = 0;
  std::size_t d = 0;
};

int run_weights(const WeightsArgs& a) {
  const BasisKind kind = parse_basis_kind(a.kind);
  std::vector<MultiIndex> members;
  for (const auto& text : a.indices) members.push_back(parse_index(text));
  if (a.s > 0) {
    if (a.d == 0) throw UsageError("--s needs --d");
    for (const auto& nu : hyperbolic_cross(a.s, a.d)) members.push_back(nu);
  }
  if (members.empty()) throw UsageError("give --index or --s with --d");
  Output out(a.common.out);
  std::ostream& os = out.stream();
  if (a.common.csv()) os << "index,weight,squared_weight\n";
  for (const auto& nu : members) {
    if (a.common.csv()) {
      os << spaced(nu) << ',' << format_double(weight(kind, nu)) << ','
         << squared_weight(kind, nu) << '\n';
    } else if (members.size() == 1) {
      os << format_double(weight(kind, nu)) << '\n';
    } else {
      os << nu.to_string() << ' ' << format_double(weight(kind, nu)) << '\n';
    }
  }
  return 0;
}

// ------------------------------------------------------------------- k-of-s

struct KOfSArgs {
  Common common;
  std::string kind = "legendre";
  std::uint64_t s = 1;
  std::size_t d = 1;
  std::uint64_t budget = kDefaultEnumerationBudget;
};

int run_k_of_s(const KOfSArgs& a) {
  const BasisKind kind = parse_basis_kind(a.kind);
  const KOfS k = K_of_s_search(kind, a.s, a.d, a.budget);
  const std::uint64_t theta_sq = theta_squared_exact(kind, hyperbolic_cross(a.s, a.d));
  Output out(a.common.out);
  std::ostream& os = out.stream();
  if (a.common.csv()) {
    os << "kind,s,d,K,theta_squared,sets_examined\n"
       << to_string(kind) << ',' << a.s << ',' << a.d << ',' << k.value << ',' << theta_sq << ','
       << k.sets_examined << '\n';
  } else {
    os << k.value << '\n';
  }
  return 0;
}

// ------------------------------------------------------------------- bounds

struct BoundsArgs {
  Common common;
  std::string mode = "lower";
  std::optional<double> driver;
  std::string kind = "legendre";
  std::uint64_t s = 0;
  std::size_t d = 0;
  double delta = 0.05;
  double gamma = 0.01;
  std::optional<double> n;
};

int run_bounds(const BoundsArgs& a) {
  if (a.mode != "lower" && a.mode != "standard") throw UsageError("--mode is lower or standard");
  ComplexityQuery q;
  q.delta = a.delta;
  q.gamma = a.gamma;
  if (a.driver) {
    q.driver = *a.driver;
  } else {
    if (a.s == 0 || a.d == 0) throw UsageError("give --K, or --s and --d to compute it");
    const BasisKind kind = parse_basis_kind(a.kind);
    q.driver = a.mode == "lower"
                   ? static_cast<double>(K_of_s_exact(kind, a.s, a.d))
                   : static_cast<double>(theta_squared_exact(kind, hyperbolic_cross(a.s, a.d))) *
                         static_cast<double>(a.s);
  }
  if (a.n) {
    q.N = *a.n;
  } else if (a.s > 0 && a.d > 0) {
    q.N = static_cast<double>(hyperbolic_cross_cardinality(a.s, a.d));
  } else {
    throw UsageError("--N is required");
  }
  const SampleBound b = sample_bound(q);
  Output out(a.common.out);
  std::ostream& os = out.stream();
  if (a.common.csv()) {
    os << "mode,driver,delta,gamma,N,bound,first_branch,second_branch\n"
       << a.mode << ',' << format_double(q.driver) << ',' << format_double(q.delta) << ','
       << format_double(q.gamma) << ',' << format_double(q.N) << ',' << format_double(b.value)
       << ',' << format_double(b.first_branch) << ',' << format_double(b.second_branch) << '\n';
  } else {
    os << format_double(b.value) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------- rip

struct RipArgs {
  Common common;
  std::string kind = "legendre";
  std::size_t d = 2;
  std::uint64_t universe = 4;
  std::size_t m = 16;
  std::size_t s = 3;
  std::string mode = "lower";
  std::size_t trials = 1;
  bool supports = false;
  std::uint64_t budget = kDefaultEnumerationBudget;
};

int run_rip(const RipArgs& a) {
  const BasisKind kind = parse_basis_kind(a.kind);
  const RipMode mode = parse_rip_mode(a.mode);
  const IndexSet set = hyperbolic_cross(a.universe, a.d);
  if (a.trials == 0) throw UsageError("--trials must be at least 1");
  Output out(a.common.out);
  std::ostream& os = out.stream();
  if (a.common.csv()) {
    os << (a.supports ? "seed,support,lambda_min,lambda_max\n"
                      : "seed,m,N,s,mode,delta_hat,supports_examined\n");
  }
  for (std::size_t t = 0; t < a.trials; ++t) {
    const std::uint64_t seed = derive_seed(a.common.seed, t);
    const SampleSet samples = draw_samples(kind, a.d, a.m, seed);
    const Eigen::MatrixXd matrix =
        basis_matrix(kind, set, samples.points()) / std::sqrt(static_cast<double>(a.m));
    const SensingSystem system(kind, set, matrix, Eigen::VectorXd::Zero(matrix.rows()), 0.0);
    std::vector<RipSupportRecord> records;
    const RipEstimate est =
        empirical_rip(system, a.s, mode, a.budget, 0.0, a.supports ? &records : nullptr);
    if (!a.common.csv()) {
      os << format_double(est.delta_hat) << '\n';
    } else if (a.supports) {
      for (const auto& r : records) {
        os << seed << ',';
        for (std::size_t i = 0; i < r.positions.size(); ++i) {
          os << (i ? " " : "") << set[r.positions[i]].to_string();
        }
        os << ',' << format_double(r.lambda_min) << ',' << format_double(r.lambda_max) << '\n';
      }
    } else {
      os << seed << ',' << a.m << ',' << set.size() << ',' << a.s << ',' << to_string(mode) << ','
         << format_double(est.delta_hat) << ',' << est.supports_examined << '\n';
    }
  }
  return 0;
}

// ------------------------------------------------- problems for recover / iht

struct ProblemArgs {
  std::string system;
  std::string kind = "legendre";
  std::size_t d = 3;
  std::uint64_t universe = 8;
  std::size_t m = 80;
  std::string function;
  std::size_t truth_sparsity = 0;
  std::string eta_mode;
  double eta = 0.0;
  double eta_epsilon = 0.1;
  std::string write_system;
};

void add_problem(CLI::App* sub, ProblemArgs& p) {
  sub->add_option("--system", p.system, "Read the system from <prefix>.csv/.meta/.indexset");
  sub->add_option("--kind", p.kind, "legendre or chebyshev")->capture_default_str();
  sub->add_option("--d", p.d, "Dimension")->capture_default_str();
  sub->add_option("--universe", p.universe, "Use the hyperbolic cross H_s with this s")
      ->capture_default_str();
  sub->add_option("--m", p.m, "Number of samples")->capture_default_str();
  sub->add_option("--function", p.function, "f1_trig_rational ... f4_exp_linear");
  sub->add_option("--truth-sparsity", p.truth_sparsity,
                  "Random lower-sparse unit-norm truth with this many terms");
  sub->add_option("--eta-mode", p.eta_mode, "surrogate, exact_tail, tail_l2 or manual");
  sub->add_option("--eta", p.eta, "Tail budget for --eta-mode manual");
  sub->add_option("--eta-epsilon", p.eta_epsilon, "Inflation for exact_tail")->capture_default_str();
  sub->add_option("--write-system", p.write_system, "Also export the system at this prefix");
}

struct Problem {
  SensingSystem system;
  std::optional<CoefficientVector> truth;
  std::uint64_t universe_s;
};

Problem make_problem(const ProblemArgs& p, std::uint64_t seed) {
  if (!p.system.empty()) {
    LoadedSystem loaded = read_system(p.system);
    return Problem{std::move(loaded.system), std::nullopt, 0};
  }
  const BasisKind kind = parse_basis_kind(p.kind);
  const IndexSet set = hyperbolic_cross(p.universe, p.d);
  const SampleSet samples = draw_samples(kind, p.d, p.m, derive_seed(seed, kSampleStream));
  const std::size_t threads = thread_count_from_env();
  if (p.truth_sparsity > 0) {
    if (!p.function.empty()) throw UsageError("give either --function or --truth-sparsity");
    CoefficientVector truth =
        synthetic_lower_truth(set, p.truth_sparsity, derive_seed(seed, kTruthStream));
    const Eigen::MatrixXd matrix =
        basis_matrix(kind, set, samples.points(), threads) / std::sqrt(static_cast<double>(p.m));
    const EtaMode mode = p.eta_mode.empty() ? EtaMode::Manual : parse_eta_mode(p.eta_mode);
    if (mode != EtaMode::Manual) throw UsageError("a synthetic truth has no tail; use --eta");
    if (!(p.eta >= 0.0)) throw UsageError("--eta must be >= 0");
    Eigen::VectorXd g = matrix * truth.values();
    SensingSystem system(kind, set, matrix, std::move(g), p.eta);
    return Problem{std::move(system), std::move(truth), p.universe};
  }
  if (p.function.empty()) throw UsageError("give --system, --function or --truth-sparsity");
  const Function g = test_function(parse_function_id(p.function), p.d, kind);
  EtaChoice choice;
  choice.mode = p.eta_mode.empty() ? EtaMode::TailL2 : parse_eta_mode(p.eta_mode);
  choice.manual_value = p.eta;
  choice.epsilon = p.eta_epsilon;
  std::optional<CoefficientVector> reference;
  double eta = p.eta;
  if (choice.mode != EtaMode::Manual) {
    QuadratureSpec quad;
    quad.seed = derive_seed(seed, kQuadratureStream);
    const ReferenceCoefficients ref = reference_coefficients(kind, g, set, quad, threads);
    if (choice.mode == EtaMode::ExactTail) choice.K_s = K_of_s(kind, p.universe, p.d);
    eta = choose_eta(choice, ref, p.m);
    reference = ref.coefficients;
  }
  return Problem{build_system(kind, set, samples, g, eta, threads), std::move(reference),
                 p.universe};
}

void report(std::ostream& os, const Common& common, const RecoveryReport& r, const Problem& p,
            const std::string& weight_mode, std::size_t s) {
  RecoveryRowContext ctx;
  ctx.seed = common.seed;
  ctx.s = s;
  ctx.weight_mode = weight_mode;
  if (p.truth) {
    const double norm = p.truth->values().norm();
    const double diff = (r.coefficients.values() - p.truth->values()).norm();
    ctx.error = norm > 0.0 ? diff / norm : diff;
  }
  if (common.csv()) {
    os << kRecoveryCsvHeader << '\n' << recovery_csv_row(r, p.system, ctx) << '\n';
    return;
  }
  os << "method " << r.method << '\n'
     << "m " << p.system.rows() << '\n'
     << "N " << p.system.cols() << '\n'
     << "residual " << format_double(r.residual_norm) << '\n'
     << "objective " << format_double(r.objective) << '\n';
  if (ctx.error) os << "relative_error " << format_double(*ctx.error) << '\n';
  os << "iterations " << r.iterations << '\n'
     << "converged " << (r.converged ? "yes" : "no") << '\n'
     << "support_size " << r.support.size() << '\n';
}

void write_coefficients(const std::string& path, const CoefficientVector& c) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out << "index,value\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    out << spaced(c.index_set()[i]) << ',' << format_double(c[i]) << '\n';
  }
}

// ------------------------------------------------------------------ recover

struct RecoverArgs {
  Common common;
  ProblemArgs problem;
  std::string weights = "sup_norm";
  std::string algorithm = "auto";
  double tolerance = 1e-8;
  std::size_t max_iterations = 10000;
  std::string coefficients;
};

int run_recover(const RecoverArgs& a) {
  const Problem p = make_problem(a.problem, a.common.seed);
  if (!a.problem.write_system.empty()) write_system(a.problem.write_system, p.system, a.common.seed);
  const WeightMode mode = parse_weight_mode(a.weights);
  BPDNConfig cfg;
  cfg.tolerance = a.tolerance;
  cfg.max_iterations = a.max_iterations;
  cfg.algorithm = parse_bpdn_algorithm(a.algorithm);
  const RecoveryReport r =
      weighted_bpdn(p.system, make_weights(p.system.kind(), p.system.index_set(), mode), cfg);
  write_coefficients(a.coefficients, r.coefficients);
  Output out(a.common.out);
  report(out.stream(), a.common, r, p, std::string(to_string(mode)), p.universe_s);
  return 0;
}

// ---------------------------------------------------------------------- iht

struct IhtArgs {
  Common common;
  ProblemArgs problem;
  std::size_t sparsity = 0;
  std::string threshold = "auto";
  bool standard = false;
  std::size_t max_iterations = 1000;
  double tolerance = 1e-12;
  double step = 1.0;
  bool trace = false;
  std::string coefficients;
};

int run_iht(const IhtArgs& a) {
  const Problem p = make_problem(a.problem, a.common.seed);
  if (!a.problem.write_system.empty()) write_system(a.problem.write_system, p.system, a.common.seed);
  IhtConfig cfg;
  cfg.mode = parse_threshold_mode(a.threshold);
  cfg.max_iterations = a.max_iterations;
  cfg.tolerance = a.tolerance;
  cfg.step = a.step;
  const RecoveryReport r =
      a.standard ? standard_iht(p.system, a.sparsity, cfg) : lower_iht(p.system, a.sparsity, cfg);
  write_coefficients(a.coefficients, r.coefficients);
  Output out(a.common.out);
  std::ostream& os = out.stream();
  if (a.trace) {
    os << "iteration,residual\n";
    for (std::size_t i = 0; i < r.residual_trace.size(); ++i) {
      os << i + 1 << ',' << format_double(r.residual_trace[i]) << '\n';
    }
    return 0;
  }
  report(os, a.common, r, p, "none", a.sparsity);
  return 0;
}

// --------------------------------------------------------------- experiment

struct ExperimentArgs {
  Common common;
  std::string config;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> threads;
  std::string records;
};

int run_experiment(const ExperimentArgs& a, bool seed_given) {
  ExperimentConfig cfg;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw UsageError("cannot read config '" + a.config + "'");
    cfg = parse_experiment_config(in);
  } else {
    cfg.m_over_N = {0.2, 0.35, 0.5};
  }
  if (seed_given) cfg.seed = a.common.seed;
  if (a.trials) cfg.trials = *a.trials;
  cfg.threads = a.threads ? *a.threads : std::max(cfg.threads, thread_count_from_env());
  const ConvergenceResult result = run_convergence(cfg);
  {
    Output out(a.common.out);
    write_convergence_csv(out.stream(), result);
  }
  if (!a.records.empty()) {
    std::ofstream rec(a.records);
    if (!rec) throw UsageError("cannot open '" + a.records + "' for writing");
    rec << "m,trial,weight_mode,sample_fingerprint,l2_error,failed\n";
    for (const auto& r : result.records) {
      rec << r.m << ',' << r.trial << ',' << to_string(r.weight_mode) << ','
          << r.sample_fingerprint << ',' << format_double(r.l2_error) << ','
          << (r.failed ? 1 : 0) << '\n';
    }
  }
  if (result.any_flagged) {
    std::cerr << "lowercs: at least one cell exceeded the failed-trial threshold\n";
    return kExitFlagged;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse polynomial approximation on lower sets"};
  app.require_subcommand(1);

  EnumerateArgs enumerate;
  auto* en = app.add_subcommand("enumerate", "List the hyperbolic cross H_s, or its lower subsets");
  add_common(en, enumerate.common);
  en->add_option("--s", enumerate.s, "Hyperbolic cross parameter")->required();
  en->add_option("--d", enumerate.d, "Dimension")->required();
  en->add_option("--lower-card", enumerate.card, "List lower subsets of this cardinality instead");
  en->add_option("--budget", enumerate.budget, "Enumeration budget")->capture_default_str();

  WeightsArgs weights;
  auto* we = app.add_subcommand("weights", "Sup-norm weights of basis functions");
  add_common(we, weights.common);
  we->add_option("--kind", weights.kind, "legendre or chebyshev")->capture_default_str();
  we->add_option("--index", weights.indices, "Multi-index such as 1,0,2 (repeatable)");
  we->add_option("--s", weights.s, "Every index of H_s");
  we->add_option("--d", weights.d, "Dimension for --s");

  KOfSArgs kofs;
  auto* ks = app.add_subcommand("k-of-s", "Exact K(s) by enumeration");
  add_common(ks, kofs.common);
  ks->add_option("--kind", kofs.kind, "legendre or chebyshev")->capture_default_str();
  ks->add_option("--s", kofs.s, "Cardinality")->required();
  ks->add_option("--d", kofs.d, "Dimension")->required();
  ks->add_option("--budget", kofs.budget, "Enumeration budget")->capture_default_str();

  BoundsArgs bounds;
  auto* bo = app.add_subcommand("bounds", "Sample-count bounds");
  add_common(bo, bounds.common);
  bo->add_option("--mode", bounds.mode, "lower or standard")->capture_default_str();
  bo->add_option("--K,--driver", bounds.driver, "K(s) for lower, Theta^2 s for standard");
  bo->add_option("--kind", bounds.kind, "Basis used to compute the driver")->capture_default_str();
  bo->add_option("--s", bounds.s, "Compute the driver exactly for this s");
  bo->add_option("--d", bounds.d, "Dimension for --s");
  bo->add_option("--delta", bounds.delta, "RIP level, in (0, 1/13)")->capture_default_str();
  bo->add_option("--gamma", bounds.gamma, "Failure probability")->capture_default_str();
  bo->add_option("--N", bounds.n, "Size of the index set");

  RipArgs rip;
  auto* ri = app.add_subcommand("rip", "Empirical RIP constants of random sampling matrices");
  add_common(ri, rip.common);
  ri->add_option("--kind", rip.kind, "legendre or chebyshev")->capture_default_str();
  ri->add_option("--d", rip.d, "Dimension")->capture_default_str();
  ri->add_option("--universe", rip.universe, "Columns are H_s for this s")->capture_default_str();
  ri->add_option("--m", rip.m, "Number of samples")->capture_default_str();
  ri->add_option("--s", rip.s, "Sparsity")->capture_default_str();
  ri->add_option("--mode", rip.mode, "standard, lower or k_constrained")->capture_default_str();
  ri->add_option("--trials", rip.trials, "Independent sample draws")->capture_default_str();
  ri->add_flag("--supports", rip.supports, "CSV of every examined support");
  ri->add_option("--budget", rip.budget, "Support budget")->capture_default_str();

  RecoverArgs recover;
  auto* re = app.add_subcommand("recover", "Weighted l1 recovery");
  add_common(re, recover.common);
  add_problem(re, recover.problem);
  re->add_option("--weights", recover.weights, "unit, sup_norm, sup_norm^2 or sup_norm^3")
      ->capture_default_str();
  re->add_option("--algorithm", recover.algorithm, "auto, homotopy, pareto or admm")
      ->capture_default_str();
  re->add_option("--tolerance", recover.tolerance, "Solver tolerance")->capture_default_str();
  re->add_option("--max-iter", recover.max_iterations, "Iteration cap")->capture_default_str();
  re->add_option("--coefficients", recover.coefficients, "Write the coefficients to this CSV");

  IhtArgs iht;
  auto* ih = app.add_subcommand("iht", "Iterative hard thresholding on lower sets");
  add_common(ih, iht.common);
  add_problem(ih, iht.problem);
  ih->add_option("--sparsity", iht.sparsity, "Lower sparsity s")->required();
  ih->add_option("--threshold", iht.threshold, "auto, exact or greedy")->capture_default_str();
  ih->add_flag("--standard", iht.standard, "Keep the s largest entries instead");
  ih->add_option("--max-iter", iht.max_iterations, "Iteration cap")->capture_default_str();
  ih->add_option("--tol", iht.tolerance, "Stop when an update is this small")->capture_default_str();
  ih->add_option("--step", iht.step, "Gradient step")->capture_default_str();
  ih->add_flag("--trace", iht.trace, "Print the residual after every iteration");
  ih->add_option("--coefficients", iht.coefficients, "Write the coefficients to this CSV");

  ExperimentArgs experiment;
  auto* ex = app.add_subcommand("experiment", "Convergence study over m and weight modes");
  add_common(ex, experiment.common);
  ex->add_option("--config", experiment.config, "JSON config file")->check(CLI::ExistingFile);
  ex->add_option("--trials", experiment.trials, "Override the trial count");
  ex->add_option("--threads", experiment.threads, "Worker threads (default LOWERCS_THREADS)");
  ex->add_option("--records", experiment.records, "Per-trial CSV with sample fingerprints");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "lowercs: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*en) return run_enumerate(enumerate);
    if (*we) return run_weights(weights);
    if (*ks) return run_k_of_s(kofs);
    if (*bo) return run_bounds(bounds);
    if (*ri) return run_rip(rip);
    if (*re) return run_recover(recover);
    if (*ih) return run_iht(iht);
    if (*ex) return run_experiment(experiment, ex->count("--seed") > 0);
  } catch (const UsageError& e) {
    std::cerr << "lowercs: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "lowercs: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
