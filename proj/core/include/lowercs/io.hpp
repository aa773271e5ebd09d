#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "lowercs/multiindex.hpp"
#include "lowercs/sensing.hpp"
#include "lowercs/solvers.hpp"

namespace lowercs {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);
/// Strict parse of a full token; throws DataError.
double parse_double(std::string_view text);

/// "d=<int>" followed by one index per line, entries separated by spaces.
void write_index_set(std::ostream& out, const IndexSet& set);
IndexSet read_index_set(std::istream& in);

/// Header y1..yd, one point per row.
void write_samples_csv(std::ostream& out, const SampleSet& samples);
SampleSet read_samples_csv(std::istream& in, BasisKind kind, std::uint64_t seed);

/// Writes <prefix>.csv (columns a1..aN then g), <prefix>.meta (key=value lines:
/// kind, seed, m, N, eta) and <prefix>.indexset.
void write_system(const std::filesystem::path& prefix, const SensingSystem& system,
                  std::uint64_t seed);
struct LoadedSystem {
  SensingSystem system;
  std::uint64_t seed;
};
LoadedSystem read_system(const std::filesystem::path& prefix);

/// key=value lines; blank lines and '#' comments skipped.
std::map<std::string, std::string> read_key_values(std::istream& in);

inline constexpr const char* kRecoveryCsvHeader =
    "seed,m,N,s,weight_mode,residual,objective,error,iterations,converged,wall_time";

struct RecoveryRowContext {
  std::uint64_t seed = 0;
  std::size_t s = 0;
  std::string weight_mode;
  /// Relative l2 error against a known truth, when there is one.
  std::optional<double> error;
};

std::string recovery_csv_row(const RecoveryReport& report, const SensingSystem& system,
                             const RecoveryRowContext& context);

}  // namespace lowercs
