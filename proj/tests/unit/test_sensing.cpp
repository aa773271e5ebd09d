#include <doctest.h>

#include <cmath>
#include <limits>

#include "lowercs/error.hpp"
#include "lowercs/multiindex.hpp"
#include "lowercs/random.hpp"
#include "lowercs/sensing.hpp"
#include "oracles.hpp"

using namespace lowercs;
using doctest::Approx;

namespace {

double one(std::span<const double>) { return 1.0; }

}  // namespace

TEST_CASE("sample draws") {
  const SampleSet single = draw_samples(BasisKind::Legendre, 3, 1, 9);
  CHECK(single.size() == 1);
  CHECK(single.dimension() == 3);
  for (double v : single.point(0)) CHECK(std::abs(v) <= 1.0);
  CHECK_THROWS_AS(draw_samples(BasisKind::Legendre, 3, 0, 9), DomainError);
  CHECK_THROWS_AS(draw_samples(BasisKind::Legendre, 0, 4, 9), DomainError);
}

TEST_CASE("uniform and arcsine moments") {
  const SampleSet u = draw_samples(BasisKind::Legendre, 1, 100000, 1);
  const SampleSet a = draw_samples(BasisKind::Chebyshev, 1, 100000, 1);
  CHECK(std::abs(u.points().mean()) < 0.01);
  CHECK(std::abs(a.points().mean()) < 0.01);
  CHECK(a.points().array().square().mean() == Approx(0.5).epsilon(0.02));
  CHECK(u.points().array().square().mean() == Approx(1.0 / 3.0).epsilon(0.02));
}

TEST_CASE("sample draws are bit-reproducible") {
  const SampleSet a = draw_samples(BasisKind::Chebyshev, 4, 50, 77);
  const SampleSet b = draw_samples(BasisKind::Chebyshev, 4, 50, 77);
  const SampleSet c = draw_samples(BasisKind::Chebyshev, 4, 50, 78);
  CHECK(a.points() == b.points());
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.fingerprint() != c.fingerprint());
}

TEST_CASE("sample sets reject points outside the cube") {
  PointMatrix p(1, 2);
  p << 0.5, 1.2;
  CHECK_THROWS_AS(SampleSet(BasisKind::Legendre, p, 0), DomainError);
  p << 0.5, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(SampleSet(BasisKind::Legendre, p, 0), DomainError);
}

TEST_CASE("coefficient vectors") {
  const IndexSet set = hyperbolic_cross(4, 2);
  CoefficientVector zero(set);
  CHECK(zero.values().isZero());
  CHECK(zero.support().empty());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
  v[2] = 3.0;
  const CoefficientVector c(set, v);
  CHECK(c.at(set[2]) == 3.0);
  CHECK(c.at(MultiIndex{5, 5}) == 0.0);
  CHECK(c.support().size() == 1);
  CHECK_THROWS_AS(CoefficientVector(set, Eigen::VectorXd::Zero(3)), ShapeError);
  v[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(CoefficientVector(set, v), DataError);
}

TEST_CASE("system assembly examples") {
  PointMatrix origin = PointMatrix::Zero(1, 3);
  const SampleSet s1(BasisKind::Legendre, origin, 0);
  const SensingSystem sys1 = build_system(BasisKind::Legendre, hyperbolic_cross(1, 3), s1, one, 0.0);
  CHECK(sys1.matrix()(0, 0) == 1.0);

  const SampleSet s4 = draw_samples(BasisKind::Legendre, 2, 4, 3);
  const SensingSystem sys4 = build_system(BasisKind::Legendre, hyperbolic_cross(1, 2), s4, one, 0.0);
  CHECK(sys4.rows() == 4);
  CHECK(sys4.cols() == 1);
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(sys4.matrix()(i, 0) == 0.5);
    CHECK(sys4.observations()[i] == 0.5);
  }
  CHECK(sys4.matrix().col(0).squaredNorm() == 1.0);
}

TEST_CASE("matrix entries match explicit basis values") {
  const IndexSet set = hyperbolic_cross(6, 3);
  for (BasisKind kind : {BasisKind::Legendre, BasisKind::Chebyshev}) {
    const SampleSet samples = draw_samples(kind, 3, 30, 5);
    const auto g = [](std::span<const double> y) { return y[0] * y[1] - y[2]; };
    const SensingSystem sys = build_system(kind, set, samples, g, 0.25);
    const double root_m = std::sqrt(30.0);
    CHECK(sys.residual_budget() == Approx(0.25 / root_m));
    for (std::size_t i = 0; i < 30; ++i) {
      const auto y = samples.point(i);
      const std::vector<double> yv(y.begin(), y.end());
      CHECK(sys.observations()[static_cast<Eigen::Index>(i)] == Approx(g(y) / root_m));
      for (std::size_t j = 0; j < set.size(); ++j) {
        const oracle::Index nu(set[j].degrees().begin(), set[j].degrees().end());
        CHECK(sys.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
              Approx(oracle::tensor_explicit(kind, nu, yv) / root_m).epsilon(1e-9));
      }
    }
    CHECK(sys.matrix().col(0).squaredNorm() == Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("threaded assembly is bitwise identical") {
  const IndexSet set = hyperbolic_cross(10, 3);
  const SampleSet samples = draw_samples(BasisKind::Legendre, 3, 64, 8);
  const auto g = [](std::span<const double> y) { return std::exp(y[0] + y[2]); };
  const SensingSystem a = build_system(BasisKind::Legendre, set, samples, g, 0.0, 1);
  const SensingSystem b = build_system(BasisKind::Legendre, set, samples, g, 0.0, 3);
  CHECK(a.matrix() == b.matrix());
  CHECK(a.observations() == b.observations());
}

TEST_CASE("columns are near-orthonormal for many samples") {
  const IndexSet set = hyperbolic_cross(4, 2);
  const SampleSet samples = draw_samples(BasisKind::Legendre, 2, 200, 13);
  const SensingSystem sys = build_system(BasisKind::Legendre, set, samples, one, 0.0);
  for (Eigen::Index j = 0; j < sys.matrix().cols(); ++j) {
    CHECK(std::abs(sys.matrix().col(j).squaredNorm() - 1.0) <= 0.2);
  }
}

TEST_CASE("isometry in expectation") {
  const IndexSet set = hyperbolic_cross(4, 2);
  Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(8, 1.0, 2.0);
  z /= z.norm();
  double mean = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const SampleSet samples = draw_samples(BasisKind::Legendre, 2, 40, seed);
    const SensingSystem sys = build_system(BasisKind::Legendre, set, samples, one, 0.0);
    mean += (sys.matrix() * z).squaredNorm() / 200.0;
  }
  CHECK(mean == Approx(1.0).epsilon(0.05));
}

TEST_CASE("non-finite function values name the sample") {
  const SampleSet samples = draw_samples(BasisKind::Legendre, 2, 5, 2);
  int calls = 0;
  const auto g = [&calls](std::span<const double>) {
    return ++calls == 3 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
  };
  try {
    build_system(BasisKind::Legendre, hyperbolic_cross(2, 2), samples, g, 0.0);
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("sample 2") != std::string::npos);
  }
}

TEST_CASE("system shape checks") {
  const IndexSet set = hyperbolic_cross(2, 2);
  CHECK_THROWS_AS(SensingSystem(BasisKind::Legendre, set, Eigen::MatrixXd::Zero(4, 2),
                                Eigen::VectorXd::Zero(4), 0.0),
                  ShapeError);
  CHECK_THROWS_AS(SensingSystem(BasisKind::Legendre, set, Eigen::MatrixXd::Zero(4, 3),
                                Eigen::VectorXd::Zero(5), 0.0),
                  ShapeError);
  CHECK_THROWS_AS(SensingSystem(BasisKind::Legendre, set, Eigen::MatrixXd::Zero(4, 3),
                                Eigen::VectorXd::Zero(4), -1.0),
                  DomainError);
  const SampleSet samples = draw_samples(BasisKind::Legendre, 3, 5, 2);
  CHECK_THROWS_AS(build_system(BasisKind::Legendre, set, samples, one, 0.0), ShapeError);
}

TEST_CASE("expansion evaluation") {
  const IndexSet set = hyperbolic_cross(4, 2);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
  v[*set.position(MultiIndex{1, 1})] = 2.0;
  v[0] = -1.0;
  const CoefficientVector c(set, v);
  const std::vector<double> y{0.5, -0.25};
  CHECK(evaluate_expansion(BasisKind::Legendre, c, y) == Approx(-1.0 + 2.0 * 3.0 * 0.5 * -0.25));
}

TEST_CASE("reference coefficients of a basis function") {
  for (BasisKind kind : {BasisKind::Legendre, BasisKind::Chebyshev}) {
    const IndexSet set = hyperbolic_cross(6, 2);
    const MultiIndex mu{2, 1};
    const auto g = [&](std::span<const double> y) { return eval_tensor(kind, mu, y); };
    const ReferenceCoefficients ref = reference_coefficients(kind, g, set);
    for (std::size_t j = 0; j < set.size(); ++j) {
      CHECK(ref.coefficients[j] == Approx(set[j] == mu ? 1.0 : 0.0).scale(1.0).epsilon(1e-8));
    }
    CHECK(ref.tail_l2 < 1e-7);
    CHECK(ref.norm_l2 == Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("reference coefficients of a linear function") {
  const IndexSet set = hyperbolic_cross(4, 2);
  const auto g = [](std::span<const double> y) { return y[0]; };
  const ReferenceCoefficients ref = reference_coefficients(BasisKind::Legendre, g, set);
  for (std::size_t j = 0; j < set.size(); ++j) {
    const double expect = set[j] == MultiIndex{1, 0} ? 1.0 / std::sqrt(3.0) : 0.0;
    CHECK(ref.coefficients[j] == Approx(expect).scale(1.0).epsilon(1e-10));
  }
}

TEST_CASE("reference coefficients are linear in g") {
  const IndexSet set = hyperbolic_cross(8, 3);
  const auto f = [](std::span<const double> y) { return std::exp(0.3 * y[0] - 0.2 * y[2]); };
  const auto h = [](std::span<const double> y) { return 1.0 / (2.0 + y[1]); };
  const auto fh = [&](std::span<const double> y) { return 2.0 * f(y) - 3.0 * h(y); };
  const auto a = reference_coefficients(BasisKind::Chebyshev, f, set);
  const auto b = reference_coefficients(BasisKind::Chebyshev, h, set);
  const auto c = reference_coefficients(BasisKind::Chebyshev, fh, set);
  const Eigen::VectorXd combo = 2.0 * a.coefficients.values() - 3.0 * b.coefficients.values();
  CHECK((combo - c.coefficients.values()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tail estimates agree between the direct and subtracted forms") {
  const IndexSet set = hyperbolic_cross(4, 2);
  const auto g = [](std::span<const double> y) { return std::exp(y[0]) * std::cos(y[1]); };
  const ReferenceCoefficients ref = reference_coefficients(BasisKind::Legendre, g, set);
  CHECK(ref.tail_l2 > 1e-3);
  CHECK(ref.tail_l2 * ref.tail_l2 == Approx(ref.raw_tail_squared).epsilon(1e-8));
  CHECK(ref.tail_max_ratio > 0.0);
  CHECK(ref.tail_weighted_l1 >= ref.tail_max_ratio);
  CHECK(ref.margin_coefficients.index_set() == margin(set));
}

TEST_CASE("a coarse rule is reported as an accuracy problem") {
  const IndexSet set = hyperbolic_cross(8, 2);
  const auto g = [](std::span<const double> y) { return std::exp(3.0 * y[0] * y[1]); };
  QuadratureSpec spec;
  spec.kind = QuadratureKind::Tensor;
  spec.points_per_dim = 3;
  CHECK_THROWS_AS(reference_coefficients(BasisKind::Legendre, g, set, spec), AccuracyError);
}

TEST_CASE("eta choices") {
  ReferenceCoefficients ref{CoefficientVector(hyperbolic_cross(1, 1)),
                            CoefficientVector(hyperbolic_cross(1, 1)), 1.0, 0.01, 0.05, 0.0,
                            1e-4, 0.0, "", 0};
  EtaChoice c;
  CHECK(c.mode == EtaMode::TailL2);
  CHECK(choose_eta(c, ref, 100) == Approx(0.1));
  c.mode = EtaMode::Surrogate;
  CHECK(choose_eta(c, ref, 100) == Approx(0.5));
  c.mode = EtaMode::ExactTail;
  c.K_s = 4.0;
  c.epsilon = 0.1;
  CHECK(choose_eta(c, ref, 100) == Approx(10.0 * 1.1 * std::sqrt(2.0) * 0.025));
  c.K_s = 0.5;
  CHECK_THROWS_AS(choose_eta(c, ref, 100), DomainError);
  c.mode = EtaMode::Manual;
  c.manual_value = 0.3;
  CHECK(choose_eta(c, ref, 100) == 0.3);
  CHECK(parse_eta_mode("exact_tail") == EtaMode::ExactTail);
  CHECK(to_string(EtaMode::Surrogate) == "surrogate");
  CHECK_THROWS_AS(parse_eta_mode("auto"), UsageError);
}
