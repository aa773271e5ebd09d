#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lowercs/multiindex.hpp"
#include "lowercs/orthopoly.hpp"
#include "lowercs/quadrature.hpp"
#include "lowercs/sensing.hpp"
#include "lowercs/solvers.hpp"

namespace lowercs {

enum class FunctionId {
  TrigRational,   ///< prod cos(16 y_k / 2^k) / prod (1 - y_k / 4^k)
  ExpCos,         ///< exp(-sum cos(y_k) / (8d))
  RationalRoot,   ///< [prod (1 + 4^k y_k^2) / prod (100 + 5 y_k)]^(1/d)
  ExpLinear,      ///< exp(-sum y_k / (2d))
  BasisFunction,  ///< a single Psi_mu
};

std::string_view to_string(FunctionId id) noexcept;
/// Accepts f1_trig_rational, f2_exp_cos, f3_rational_root, f4_exp_linear,
/// custom, and the short forms f1..f4.
FunctionId parse_function_id(std::string_view text);

/// The products split the coordinates after ceil(d/2); those need d >= 2.
/// BasisFunction needs `mu`. Throws UsageError otherwise.
Function test_function(FunctionId id, std::size_t d, BasisKind kind = BasisKind::Legendre,
                       const std::optional<MultiIndex>& mu = std::nullopt);

/// A unit-norm vector on `universe` supported on a random lower set of
/// `sparsity` members, grown one admissible index at a time, with Gaussian
/// entries. The universe must be lower.
CoefficientVector synthetic_lower_truth(const IndexSet& universe, std::size_t sparsity,
                                        std::uint64_t seed);

/// Largest s with #(H_s) <= n_max in dimension d (at least 1).
std::uint64_t largest_s_within(std::uint64_t n_max, std::size_t d);

struct ExperimentConfig {
  FunctionId function = FunctionId::ExpLinear;
  std::optional<MultiIndex> basis_index;
  std::size_t d = 4;
  BasisKind kind = BasisKind::Legendre;
  /// H_s with this s, or, when zero, the largest s with #(H_s) <= n_max.
  std::uint64_t s = 0;
  std::uint64_t n_max = 300;
  /// Explicit sample counts; used when nonempty.
  std::vector<std::size_t> m_values;
  /// Otherwise m = floor(ratio * N) for each ratio.
  std::vector<double> m_over_N;
  std::vector<WeightMode> weight_modes{WeightMode::Unit, WeightMode::SupNorm,
                                       WeightMode::SupNormSquared, WeightMode::SupNormCubed};
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  EtaChoice eta;
  std::size_t n_test = 20000;
  std::size_t threads = 1;
  BPDNConfig bpdn;
  QuadratureSpec quadrature;
  /// A cell is flagged when more than this fraction of its trials fail.
  double fail_fraction = 0.2;
};

/// Reads a flat JSON object. Unknown keys are rejected. Throws UsageError.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig parse_experiment_config_text(std::string_view text);

struct ConvergenceRow {
  std::size_t m;
  std::size_t N;
  double m_over_N;
  WeightMode weight_mode;
  std::size_t trials;
  double mean_l2;
  double std_l2;
  std::size_t fail_count;
  bool flagged;
};

/// One solve inside a (m, trial) cell.
struct TrialRecord {
  std::size_t m;
  std::size_t trial;
  WeightMode weight_mode;
  std::uint64_t sample_fingerprint;
  double l2_error;
  bool failed;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  std::vector<TrialRecord> records;
  std::uint64_t s;
  std::size_t N;
  double norm_l2;
  double tail_l2;
  std::string quadrature;
  bool any_flagged;
};

/// For each m and trial, one sample set shared by every weight mode; each
/// mode solves weighted BPDN; the error ||g - g#|| is a Monte Carlo mean over
/// n_test fresh points evaluated against g itself.
ConvergenceResult run_convergence(const ExperimentConfig& config);

inline constexpr const char* kConvergenceCsvHeader =
    "m,N,m_over_N,weight_mode,trials,mean_l2,std_l2,fail_count";

void write_convergence_csv(std::ostream& out, const ConvergenceResult& result);

/// Root-mean-square of g - sum c_nu Psi_nu over fixed random test points.
class MonteCarloError {
 public:
  MonteCarloError(BasisKind kind, const IndexSet& set, const Function& g, std::size_t n_test,
                  std::uint64_t seed, std::size_t threads = 1);

  struct Estimate {
    double rms;
    /// Standard error of the mean squared error, propagated to the rms.
    double standard_error;
  };
  Estimate operator()(const CoefficientVector& c) const;

 private:
  BasisKind kind_;
  IndexSet set_;
  PointMatrix points_;
  Eigen::VectorXd values_;
  Eigen::MatrixXd basis_;  ///< cached when small enough
};

}  // namespace lowercs
