// Closed-form checks for the dimensional constants.  Everything here has a
// pencil-and-paper value, so tolerances are a handful of ulps.
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tracelab/constants.hpp"

using namespace tracelab::geom;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("gamma function on the arguments we actually use") {
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));
  CHECK(gamma_fn(1.5) == doctest::Approx(0.5 * std::sqrt(kPi)).epsilon(1e-14));
  CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-13));
  // recurrence Gamma(x+1) = x Gamma(x) across the half-integers up to 10
  for (double x = 0.5; x < 10.0; x += 0.5)
    CHECK(gamma_fn(x + 1.0) == doctest::Approx(x * gamma_fn(x)).epsilon(1e-13));
}

TEST_CASE("sphere measures in low dimensions") {
  CHECK(sphere_measure(2) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(sphere_measure(3) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
  CHECK(sphere_measure(4) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-14));

  // omega_{n-1} = (2 pi / (n-2)) * omega_{n-3}, valid from n = 4 on
  for (int n = 4; n <= 12; ++n)
    CHECK(sphere_measure(n) ==
          doctest::Approx(2.0 * kPi / (n - 2) * sphere_measure(n - 2)).epsilon(1e-13));
}

TEST_CASE("boundary and interior thresholds") {
  CHECK(trace_constant(2) == doctest::Approx(kPi).epsilon(1e-14));
  // n = 3: 2 * (4 pi / 2)^{1/2} = 2 sqrt(2 pi)
  CHECK(trace_constant(3) == doctest::Approx(2.0 * std::sqrt(2.0 * kPi)).epsilon(1e-14));
  CHECK(moser_constant(2) == doctest::Approx(4.0 * kPi).epsilon(1e-14));

  SUBCASE("planar boundary threshold is a quarter of the interior one") {
    CHECK(trace_constant(2) == doctest::Approx(moser_constant(2) / 4.0).epsilon(1e-14));
  }

  SUBCASE("boundary threshold sits strictly below the interior one") {
    for (int n = 2; n <= 10; ++n) {
      INFO("n = ", n);
      CHECK(trace_constant(n) < moser_constant(n));
      // and strictly below n * (omega/2)^{1/(n-1)}, the naive guess
      double naive = n * std::pow(sphere_measure(n) / 2.0, 1.0 / (n - 1));
      CHECK(trace_constant(n) < naive);
    }
  }
}

TEST_CASE("Sobolev conjugate exponent") {
  CHECK(sobolev_conjugate(2.0, 3) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(sobolev_conjugate(1.5, 3) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(sobolev_conjugate(1.5, 2) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(std::isinf(sobolev_conjugate(2.0, 2)));
  CHECK(std::isinf(sobolev_conjugate(3.0, 3)));
}

TEST_CASE("constants bundle wires the pieces together") {
  auto c = make_constants(2, 2.0);
  CHECK(c.n == 2);
  CHECK(c.omega == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(c.beta_n == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(c.alpha_n == doctest::Approx(4.0 * kPi).epsilon(1e-14));
  CHECK(std::isinf(c.p_star));

  auto c3 = make_constants(3, 1.5);
  CHECK(c3.p_star == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("constants reject out-of-range requests") {
  CHECK_THROWS_AS(sphere_measure(1), std::invalid_argument);
  CHECK_THROWS_AS(trace_constant(1), std::invalid_argument);
  CHECK_THROWS_AS(make_constants(1, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(make_constants(2, 1.0), std::invalid_argument);   // p must exceed 1
  CHECK_THROWS_AS(make_constants(2, 2.5), std::invalid_argument);   // p above n
  CHECK_THROWS_AS(sobolev_conjugate(0.5, 2), std::invalid_argument);
}
