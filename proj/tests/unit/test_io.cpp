#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "lowercs/error.hpp"
#include "lowercs/io.hpp"
#include "lowercs/multiindex.hpp"
#include "lowercs/random.hpp"
#include "lowercs/sensing.hpp"

using namespace lowercs;

TEST_CASE("doubles round-trip through text") {
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(rng.normal(), static_cast<int>(rng.below(200)) - 100);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(parse_double(" 2.5\r") == 2.5);
  CHECK_THROWS_AS(parse_double("1.5x"), DataError);
  CHECK_THROWS_AS(parse_double(""), DataError);
}

TEST_CASE("index sets round-trip bit-exactly") {
  const IndexSet set = hyperbolic_cross(12, 3);
  std::stringstream buffer;
  write_index_set(buffer, set);
  const std::string text = buffer.str();
  CHECK(text.rfind("d=3\n0 0 0\n", 0) == 0);
  CHECK(read_index_set(buffer) == set);
  std::istringstream reread(text);
  std::stringstream again;
  write_index_set(again, read_index_set(reread));
  CHECK(again.str() == text);
}

TEST_CASE("malformed index-set streams") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_index_set(empty), DataError);
  std::istringstream header("dim=2\n0 0\n");
  CHECK_THROWS_AS(read_index_set(header), DataError);
  std::istringstream width("d=2\n0 0\n1\n");
  CHECK_THROWS_AS(read_index_set(width), DataError);
  std::istringstream dup("d=2\n0 0\n0 0\n");
  CHECK_THROWS_AS(read_index_set(dup), DataError);
  std::istringstream neg("d=2\n0 -1\n");
  CHECK_THROWS_AS(read_index_set(neg), DataError);
}

TEST_CASE("sample sets round-trip bit-exactly") {
  const SampleSet samples = draw_samples(BasisKind::Chebyshev, 3, 40, 6);
  std::stringstream buffer;
  write_samples_csv(buffer, samples);
  const SampleSet back = read_samples_csv(buffer, BasisKind::Chebyshev, 6);
  CHECK(back.points() == samples.points());
  CHECK(back.fingerprint() == samples.fingerprint());
  std::istringstream bad("y1,y2\n0.1,0.2\n0.3\n");
  CHECK_THROWS_AS(read_samples_csv(bad, BasisKind::Legendre, 0), DataError);
}

TEST_CASE("systems round-trip through the file triple") {
  const IndexSet set = hyperbolic_cross(6, 2);
  const SampleSet samples = draw_samples(BasisKind::Legendre, 2, 15, 3);
  const SensingSystem sys = build_system(
      BasisKind::Legendre, set, samples, [](std::span<const double> y) { return std::sin(y[0] - y[1]); },
      0.125);
  const auto dir = std::filesystem::temp_directory_path() / "lowercs_io_test";
  std::filesystem::create_directories(dir);
  write_system(dir / "sys", sys, 321);
  const LoadedSystem loaded = read_system(dir / "sys");
  CHECK(loaded.seed == 321);
  CHECK(loaded.system.matrix() == sys.matrix());
  CHECK(loaded.system.observations() == sys.observations());
  CHECK(loaded.system.eta() == sys.eta());
  CHECK(loaded.system.index_set() == sys.index_set());
  CHECK(loaded.system.kind() == BasisKind::Legendre);
  CHECK_THROWS_AS(read_system(dir / "missing"), DataError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("key-value files") {
  std::istringstream in("# comment\n\na=1\nb = two\n");
  const auto kv = read_key_values(in);
  CHECK(kv.at("a") == "1");
  CHECK(kv.at("b ") == " two");
  std::istringstream bad("novalue\n");
  CHECK_THROWS_AS(read_key_values(bad), DataError);
}

TEST_CASE("recovery CSV rows") {
  const IndexSet set = hyperbolic_cross(2, 2);
  const SensingSystem sys(BasisKind::Legendre, set, Eigen::MatrixXd::Identity(3, 3),
                          Eigen::VectorXd::Ones(3), 0.0);
  const RecoveryReport report{CoefficientVector(set, Eigen::VectorXd::Ones(3)), 0.25, 3.0, 7, true,
                              set, {0.25}, 0.5, "bpdn/homotopy"};
  const std::string row = recovery_csv_row(report, sys, {11, 2, "sup_norm", 1e-9});
  CHECK(row == "11,3,3,2,sup_norm,0.25,3,1e-09,7,1,0.5");
  const std::string no_truth = recovery_csv_row(report, sys, {11, 2, "unit", std::nullopt});
  CHECK(no_truth == "11,3,3,2,unit,0.25,3,,7,1,0.5");
  int commas = 0;
  for (char ch : std::string(kRecoveryCsvHeader)) commas += ch == ',';
  CHECK(commas == 10);
}
