#include <cmath>
#include <complex>
#include <random>

#include "atlas/dynamics.hpp"
#include "doctest.h"

using namespace atlas;

namespace {
const double kPi = std::acos(-1.0);
// log|cosh x| for x >= 0 without overflow, binary64 oracle
double log_cosh(double x) {
  return x - std::log(2.0) + std::log1p(std::exp(-2.0 * x));
}
}  // namespace

TEST_CASE("evaluate on the anchor points") {
  CHECK(std::abs(evaluate(FunctionSpec::h(), Complex(0, 0)) - 1.0) == 0.0);
  CHECK(std::abs(evaluate(FunctionSpec::h(), Complex(0, kPi / 2))) <= 1e-12);
  CHECK(evaluate(FunctionSpec::g(), Complex(3, 0)).real() ==
        doctest::Approx(std::cosh(3.0) / 2.0).epsilon(1e-14));
  CHECK(evaluate(FunctionSpec::g(), Complex(3, 0)).real() ==
        doctest::Approx(5.0339).epsilon(1e-4));
  CHECK_THROWS(evaluate(FunctionSpec::h(), Complex(701.0, 0)));
}

TEST_CASE("Joukowski identity") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int t = 0; t < 10000; ++t) {
    Complex z(u(rng), u(rng));
    Complex c = evaluate(FunctionSpec::h(), z);
    Complex j = (std::exp(z) + std::exp(-z)) / 2.0;
    CHECK(std::abs(c - j) <= 1e-12 * (1.0 + std::abs(c)));
  }
}

TEST_CASE("critical values and derivative zeros") {
  for (int k = -5; k <= 5; ++k) {
    Complex z(0.0, k * kPi);
    double want = (k % 2 == 0) ? 1.0 : -1.0;
    CHECK(std::abs(evaluate(FunctionSpec::h(), z) - want) <= 1e-12);
    CHECK(std::abs(derivative(FunctionSpec::h(), z)) <= 1e-10);
  }
  // q = 2: derivative 2 cosh(z) sinh(z) also vanishes at k*pi*i
  CHECK(std::abs(derivative(FunctionSpec::cosh2(), Complex(0, kPi))) <= 1e-10);
}

TEST_CASE("step in the exact regime") {
  auto p1 = step(FunctionSpec::h(), make_orbit_point(Complex(1.0, 0.5)));
  const auto* e1 = std::get_if<ExactPoint>(&p1);
  REQUIRE(e1);
  CHECK(std::abs(e1->z - std::cosh(Complex(1.0, 0.5))) <= 1e-14);

  // i*pi/2 -> 0 -> 1, real-axis symmetry whitelist
  OrbitPoint p = make_orbit_point(Complex(0.0, kPi / 2));
  p = step(FunctionSpec::h(), p);
  CHECK(*magnitude(p).to_double() <= 1e-15);
  p = step(FunctionSpec::h(), p);
  CHECK(*magnitude(p).to_double() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("real-axis regime matches binary64 log-magnitude") {
  OrbitPoint p = make_orbit_point(Complex(3.0, 0.0));
  double x = 3.0;
  for (int s = 0; s < 3; ++s) {
    p = step(FunctionSpec::h(), p);
    double want_log = log_cosh(x);
    x = std::cosh(x);  // stays finite for three steps from 3
    REQUIRE(std::holds_alternative<RealAxisPoint>(p));
    auto m = magnitude(p);
    double got_log = m.height() >= 1 ? *log_t(m).to_double()
                                     : std::log(*m.to_double());
    CHECK(got_log == doctest::Approx(want_log).epsilon(1e-9));
  }
  // value check from the contract: cosh(30) = e^30/2 up to 1e-26 relative
  auto q = step(FunctionSpec::h(),
                make_orbit_point(Complex(30.0, 0.0)));
  CHECK(*magnitude(q).to_double() ==
        doctest::Approx(std::exp(30.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("n-fold step equals n-fold evaluate below the switch radius") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    Complex z(u(rng), u(rng));
    if (z.imag() == 0.0) continue;  // whitelist changes representation
    OrbitPoint p = make_orbit_point(z);
    Complex w = z;
    for (int s = 0; s < 4; ++s) {
      if (std::abs(w) > 500.0) break;
      w = evaluate(FunctionSpec::h(), w);
      p = step(FunctionSpec::h(), p);
      if (const auto* e = std::get_if<ExactPoint>(&p)) {
        CHECK(std::abs(e->z - w) <= 1e-9 * (1.0 + std::abs(w)));
      }
    }
  }
}

TEST_CASE("degradation is flagged, never silent") {
  // Push an off-axis orbit far beyond the exact regime; magnitudes keep
  // flowing but the rigorous flag must drop once the argument is lost.
  OrbitPoint p = make_orbit_point(Complex(40.0, 0.3));
  bool saw_nonrigorous = false;
  for (int s = 0; s < 12; ++s) {
    p = step(FunctionSpec::h(), p);
    if (!magnitude_rigorous(p)) saw_nonrigorous = true;
  }
  CHECK(saw_nonrigorous);
  CHECK(std::holds_alternative<PoisonedPoint>(p));
  // real-axis orbits never degrade
  OrbitPoint r = make_orbit_point(Complex(40.0, 0.0));
  for (int s = 0; s < 12; ++s) {
    r = step(FunctionSpec::h(), r);
    CHECK(magnitude_rigorous(r));
  }
}

TEST_CASE("maximum-modulus schedule") {
  auto s = max_modulus_schedule(FunctionSpec::h(), 1.0, 2);
  REQUIRE(s.values.size() == 3);
  CHECK(*s.values[0].to_double() == doctest::Approx(1.0));
  CHECK(*s.values[1].to_double() == doctest::Approx(std::cosh(1.0)));
  CHECK(*s.values[2].to_double() ==
        doctest::Approx(std::cosh(std::cosh(1.0))).epsilon(1e-12));

  auto s2 = max_modulus_schedule(FunctionSpec::h(), 2.0, 1);
  CHECK(*s2.values[1].to_double() == doctest::Approx(std::cosh(2.0)));

  CHECK_THROWS_AS(max_modulus_schedule(FunctionSpec::g(), 0.5, 4),
                  ScheduleError);
  // above the repelling fixed point the g schedule is fine
  auto s3 = max_modulus_schedule(FunctionSpec::g(), 3.0, 5);
  for (size_t k = 1; k < s3.values.size(); ++k) {
    CHECK(compare(s3.values[k - 1], s3.values[k]) == Ordering::less);
  }
  CHECK_THROWS_AS(max_modulus_schedule(FunctionSpec::h(), -1.0, 2),
                  std::invalid_argument);
}

TEST_CASE("schedule touches very deep towers without overflow") {
  auto s = max_modulus_schedule(FunctionSpec::h(), 1.0, 40);
  CHECK(s.values.size() == 41);
  CHECK(s.values.back().height() > 30);
}

TEST_CASE("circle sampling never beats the real-axis maximum") {
  CHECK(circle_max_check(FunctionSpec::h(), 2.0, 4096) ==
        doctest::Approx(std::cosh(2.0)).epsilon(1e-5));
  CHECK(circle_max_check(FunctionSpec::h(), 0.0, 16) == doctest::Approx(1.0));
  CHECK(circle_max_check(FunctionSpec::g(), 3.0, 4096) ==
        doctest::Approx(std::cosh(3.0) / 2.0).epsilon(1e-5));
  for (double r : {0.7, 1.3, 2.9, 5.0}) {
    CHECK(circle_max_check(FunctionSpec::h(), r, 2048) <=
          std::cosh(r) * (1.0 + 1e-12));
  }
}

TEST_CASE("schedule domination of one step") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto s = max_modulus_schedule(FunctionSpec::h(), 2.0, 1);
  for (int t = 0; t < 500; ++t) {
    Complex z(2.0 * u(rng), 2.0 * u(rng));
    if (std::abs(z) > 2.0) continue;
    auto m = magnitude(step(FunctionSpec::h(), make_orbit_point(z)));
    CHECK(compare(m, s.values[1]) != Ordering::greater);
  }
}
