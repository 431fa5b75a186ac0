#include <cmath>
#include <cstdlib>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "ultragap/dendrogram.hpp"
#include "ultragap/errors.hpp"
#include "ultragap/qp.hpp"
#include "ultragap/solver.hpp"

using namespace ultragap;
using testsupport::must_validate;

namespace {

FiniteMetric<double> six_point(double top = 2.0) {
  return must_validate<double>({{0, top, top, top, top, top},
                                {top, 0, 1, top, top, top},
                                {top, 1, 0, top, top, top},
                                {top, top, top, 0, 1, 1},
                                {top, top, top, 1, 0, 1},
                                {top, top, top, 1, 1, 0}});
}

double six_point_formula(double a2, double p) {
  const double x = std::pow(a2, p);
  return (9 * x * x - 7 * x + 1) / (21 * x * x - 12 * x);
}

FiniteMetric<double> path3() { return must_validate<double>({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}); }

}  // namespace

TEST_CASE("theta and the limit constant") {
  CHECK(theta(2) == 1);
  CHECK(theta(3) == Rational(3, 4));
  CHECK(theta(4) == Rational(1, 2));
  CHECK(theta(5) == Rational(5, 12));
  CHECK(theta(6) == Rational(1, 3));
  for (std::size_t n = 2; n < 40; ++n) CHECK(theta(n) == testsupport::theta_direct(n));
  CHECK_THROWS_AS(theta(1), DomainError);

  const std::vector<std::size_t> sizes{2, 3};
  CHECK(gamma_infinity(std::span<const std::size_t>(sizes)) == Rational(3, 7));
  const DendroTree<double> t(build_dendrogram(six_point()));
  CHECK(gamma_infinity(t) == Rational(3, 7));
  CHECK_THROWS_AS(gamma_infinity(std::span<const std::size_t>()), DomainError);
}

TEST_CASE("six point closed form") {
  for (double a2 : {2.0, 3.0, 1.5}) {
    const auto m = six_point(a2);
    for (double p : {0.0, 0.25, 1.0, 2.0, 4.0}) {
      const GapResult r = gap(m, p);
      CHECK(r.value == doctest::Approx(six_point_formula(a2, p)).epsilon(1e-9));
      CHECK(r.partitions_explored == 31);
      CHECK(gamma_def(m, p, r.witness) == doctest::Approx(r.value).epsilon(1e-9));
    }
  }
  CHECK(gap(six_point(), 1.0).value == doctest::Approx(23.0 / 60).epsilon(1e-12));
  CHECK(gap(six_point(), 2.0).value == doctest::Approx(13.0 / 32).epsilon(1e-12));
}

TEST_CASE("discrete metrics") {
  for (std::size_t n = 2; n <= 9; ++n) {
    const auto m = discrete_metric(n);
    const double expected = to_double(theta(n));
    for (double p : {0.0, 1.0, 2.5}) {
      const GapResult r = gap(m, p);
      CHECK(std::abs(r.value - expected) < 1e-12);
      CHECK(std::abs(gamma_def(m, p, r.witness) - expected) < 1e-12);
    }
  }
}

TEST_CASE("scaling law") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rows = testsupport::random_ultrametric_rows(rng, 3 + trial % 5);
    const auto m = to_float(must_validate<Rational>(rows));
    for (double c : {2.0, 10.0}) {
      const auto scaled = scale(m, c);
      for (double p : {0.5, 1.0, 3.0}) {
        const double base = gap(m, p).value;
        CHECK(gap(scaled, p).value == doctest::Approx(std::pow(c, p) * base).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("results do not depend on the worker count") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 6; ++trial) {
    const auto m = to_float(must_validate<Rational>(testsupport::random_ultrametric_rows(rng, 6 + trial % 4)));
    SolverOptions one;
    one.threads = 1;
    SolverOptions many;
    many.threads = 3;
    const GapResult a = gap(m, 1.7, one);
    const GapResult b = gap(m, 1.7, many);
    CHECK(a.value == b.value);
    CHECK(a.witness.omega() == b.witness.omega());
  }
}

TEST_CASE("ties go to the lexicographically smallest subset") {
  // On the discrete metric on 4 points every 2+2 split is optimal; the first
  // subset in lexicographic order containing point 0 is {0, 1}.
  const GapResult r = gap(discrete_metric(4), 1.0);
  const std::vector<double> expected{0.5, 0.5, -0.5, -0.5};
  for (std::size_t i = 0; i < 4; ++i) CHECK(r.witness[i] == doctest::Approx(expected[i]).epsilon(1e-15));
}

TEST_CASE("guards") {
  CHECK_THROWS_AS(gap(discrete_metric(17), 1.0), CapacityError);
  CHECK_THROWS_AS(gap(six_point(), 31.0), DomainError);
  CHECK_THROWS_AS(gap(six_point(), -0.5), DomainError);
  CHECK_THROWS_AS(gap(six_point(), std::nan("")), DomainError);
  CHECK_THROWS_AS(gap(six_point(2e4), 1.0), DomainError);
  SolverOptions wide;
  wide.max_distance_ratio = 1e5;
  CHECK_NOTHROW(gap(six_point(2e4), 1.0, wide));
}

TEST_CASE("negative type failure on the three point path") {
  const auto m = path3();
  CHECK(gap(m, 1.0).value > 0.0);
  CHECK(gap(m, 2.0).value == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  try {
    gap(m, 3.0);
    FAIL("expected a negative type failure");
  } catch (const NegativeTypeFailure& e) {
    CHECK(e.p() == 3.0);
    const auto w = Simplex<double>::from_weights(e.omega());
    CHECK(gamma_def(m, 3.0, w) < 0.0);
    CHECK(e.gamma() == doctest::Approx(gamma_def(m, 3.0, w)));
  }
}

TEST_CASE("orthant solver") {
  const auto m = six_point();
  const auto& d = m.data();
  const qp::OrthantSolution s = qp::solve_orthant(d, 6, 0b010011);
  CHECK(s.iterations >= 1);
  double pos = 0.0, neg = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    const bool in_s = (0b010011 >> i) & 1;
    if (in_s) CHECK(s.omega[i] >= 0.0);
    if (!in_s) CHECK(s.omega[i] <= 0.0);
    (s.omega[i] > 0 ? pos : neg) += std::abs(s.omega[i]);
  }
  CHECK(pos == doctest::Approx(1.0));
  CHECK(neg == doctest::Approx(1.0));
  CHECK_THROWS_AS(qp::solve_orthant(d, 6, 0), DomainError);
  CHECK_THROWS_AS(qp::solve_orthant(d, 6, 0b111111), DomainError);
  qp::OrthantOptions tight;
  tight.cap_factor = 0;
  CHECK_THROWS_AS(qp::solve_orthant(d, 6, 0b000001, tight), SolverError);

  CHECK_FALSE(qp::negative_type_direction(d, 6).has_value());
  const auto p3 = power(path3(), 3.0);
  const auto dir = qp::negative_type_direction(p3.data(), 3);
  REQUIRE(dir.has_value());
  double sum = 0.0;
  for (double v : *dir) sum += v;
  CHECK(std::abs(sum) < 1e-12);
}

TEST_CASE("solver stays below the oracle and the flat witness") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t n = 3 + trial % 4;
    const auto exact = must_validate<Rational>(testsupport::random_ultrametric_rows(rng, n));
    const auto m = to_float(exact);
    const double p = 0.5 + trial % 3;
    const GapResult r = gap(m, p);
    const OracleResult o = gap_oracle(m, p, 20000, 1000 + trial);
    CHECK(o.value >= r.value - 1e-9);
    CHECK(o.value == doctest::Approx(r.value).epsilon(1e-6));
    CHECK(gamma_def(m, p, o.best) == doctest::Approx(o.value).epsilon(1e-9));

    const DendroTree<Rational> t(build_dendrogram(exact));
    const auto flat = flat_witness(t);
    std::vector<double> fw;
    for (const auto& v : flat.omega()) fw.push_back(v.get_d());
    const auto w = Simplex<double>::from_weights(fw);
    CHECK(r.value <= gamma_def(m, p, w) + 1e-9);
    CHECK(r.normalized() <= to_double(gamma_infinity(t)) + 1e-10);
  }
  CHECK_THROWS_AS(gap_oracle(six_point(), 1.0, 0, 1), DomainError);
}

TEST_CASE("oracle is reproducible") {
  const auto m = six_point();
  const OracleResult a = gap_oracle(m, 1.0, 5000, 7);
  const OracleResult b = gap_oracle(m, 1.0, 5000, 7);
  CHECK(a.value == b.value);
  CHECK(a.best.omega() == b.best.omega());
  CHECK(a.trials == 5000);
  CHECK(a.polished >= 1);
}

TEST_CASE("gap curves") {
  const auto m = six_point();
  const std::vector<double> grid{0.0, 1.0, 2.0, 5.0, 10.0};
  const GapCurve c = gap_curve(m, grid);
  CHECK(c.points.size() == 5);
  CHECK(c.monotone);
  CHECK(c.bounded);
  REQUIRE(c.gamma_infinity.has_value());
  CHECK(*c.gamma_infinity == Rational(3, 7));
  CHECK(*c.final_residual > 0.0);
  CHECK(*c.final_residual < 1e-3);
  const std::vector<double> bad{1.0, 1.0};
  CHECK_THROWS_AS(gap_curve(m, bad), DomainError);
  CHECK_THROWS_AS(gap_curve(m, std::span<const double>()), DomainError);
}

TEST_CASE("constancy classification") {
  const auto discrete = classify(discrete_metric(5));
  CHECK(discrete.verdict == Constancy::ScaledDiscrete);
  CHECK(discrete.gamma_zero == Rational(5, 12));
  CHECK(discrete.gamma_infinity == Rational(5, 12));
  CHECK(discrete.levels == 1);

  const auto pairs = classify(must_validate<Rational>({{0, 1, 2, 2}, {1, 0, 2, 2}, {2, 2, 0, 1}, {2, 2, 1, 0}}));
  CHECK(pairs.verdict == Constancy::ConstantEvenCoteries);
  CHECK(pairs.gamma_zero == pairs.gamma_infinity);

  const auto six = classify(six_point());
  CHECK(six.verdict == Constancy::NonConstant);
  CHECK(six.gamma_zero == Rational(1, 3));
  CHECK(six.gamma_infinity == Rational(3, 7));

  // Even coteries that leave a point uncovered.
  const auto loose = classify(must_validate<double>({{0, 1, 2}, {1, 0, 2}, {2, 2, 0}}));
  CHECK(loose.verdict == Constancy::NonConstant);
  CHECK(loose.profile.uncovered == std::vector<std::size_t>{2});
  CHECK(std::string(to_string(Constancy::ConstantEvenCoteries)) == "ConstantEvenCoteries");

  CHECK_THROWS_AS(classify(path3()), DomainError);
}

TEST_CASE("enhanced inequality verification") {
  const auto m = discrete_metric(5);
  const EnhancedVerdict eq = verify_enhanced(m, 5.0 / 12.0, 0.0, 500, 3);
  CHECK(eq.holds);
  CHECK(eq.samples_consistent);
  CHECK(eq.max_sampled_lhs <= 1e-9);
  CHECK(eq.threshold == doctest::Approx(5.0 / 12.0));

  const EnhancedVerdict over = verify_enhanced(m, 0.5, 1.0, 100, 3);
  CHECK_FALSE(over.holds);
  REQUIRE(over.violating_zeta.has_value());
  const auto& z = *over.violating_zeta;
  double abs_sum = 0.0, form = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    abs_sum += std::abs(z[i]);
    for (std::size_t j = 0; j < 5; ++j) form += m(i, j) * z[i] * z[j];
  }
  CHECK(0.5 / 2 * abs_sum * abs_sum + form > 0.0);

  const auto scaled = scale(six_point(), 3.0);
  const EnhancedVerdict s = verify_enhanced(scaled, 23.0 / 60.0, 1.0, 200, 5);
  CHECK(s.holds);
  CHECK(s.alpha == 3.0);
  CHECK(s.gap.has_value());

  const EnhancedVerdict fail = verify_enhanced(path3(), 0.1, 3.0, 50, 5);
  CHECK_FALSE(fail.holds);
  CHECK_FALSE(fail.gap.has_value());
  CHECK(fail.violating_zeta.has_value());

  CHECK_THROWS_AS(verify_enhanced(m, 0.0, 1.0, 0, 0), DomainError);
}

TEST_CASE("worker count") {
  CHECK(resolve_threads(5) == 5);
  ::setenv("ULTRAGAP_THREADS", "1", 1);
  CHECK(resolve_threads(0) == 1);
  ::unsetenv("ULTRAGAP_THREADS");
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("extended precision on stiff matrices") {
  // Spread 2^24 and below stays in double precision.
  const auto mild = power(six_point(), 24.0);
  CHECK(qp::working_precision(mild.data(), 6) == 53);
  const auto stiff = power(six_point(1000.0), 5.0);
  CHECK(qp::working_precision(stiff.data(), 6) == 64 + 2 * 50);

  // Both paths agree where double precision is adequate.
  const auto m = power(six_point(3.0), 2.0);
  for (std::uint64_t s = 1; s < 31; ++s) {
    qp::OrthantOptions wide;
    wide.precision_bits = 256;
    const auto a = qp::solve_orthant(m.data(), 6, 1 | (s << 1));
    const auto b = qp::solve_orthant(m.data(), 6, 1 | (s << 1), wide);
    CHECK(b.precision_bits == 256);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
  }

  // Closed forms deep in the stiff regime.
  for (double p : {3.0, 5.0, 10.0}) {
    const double x = std::pow(1000.0, p);
    const double expected = (9 - 7 / x + 1 / (x * x)) / (21 - 12 / x);
    CHECK(gap(six_point(1000.0), p).value == doctest::Approx(expected).epsilon(1e-12));
  }
  const auto pairs = must_validate<double>({{0, 1, 500, 500}, {1, 0, 500, 500}, {500, 500, 0, 1}, {500, 500, 1, 0}});
  for (double p : {4.0, 12.0, 30.0}) CHECK(std::abs(gap(pairs, p).value - 0.5) < 1e-12);
}
