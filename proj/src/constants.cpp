#include "tracelab/constants.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace tracelab::geom {

double gamma_fn(double x) {
  // Lanczos, g = 7.  Coefficients from the classic 9-term tabulation.
  static const double c[9] = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,    12.507343278686905,
      -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // reflection; keeps half-integer arguments below 0.5 usable too
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
  }
  x -= 1.0;
  double a = c[0];
  double t = x + 7.5;
  for (int i = 1; i < 9; ++i) a += c[i] / (x + i);
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double sphere_measure(int n) {
  if (n < 2) throw std::invalid_argument("sphere_measure: dimension must be >= 2");
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / gamma_fn(n / 2.0);
}

double trace_constant(int n) {
  if (n < 2) throw std::invalid_argument("trace_constant: dimension must be >= 2");
  return (n - 1) * std::pow(sphere_measure(n) / 2.0, 1.0 / (n - 1));
}

double moser_constant(int n) {
  if (n < 2) throw std::invalid_argument("moser_constant: dimension must be >= 2");
  return n * std::pow(sphere_measure(n), 1.0 / (n - 1));
}

double sobolev_conjugate(double p, int n) {
  if (p <= 1.0) throw std::invalid_argument("sobolev_conjugate: need p > 1");
  if (p > n) throw std::invalid_argument("sobolev_conjugate: need p <= n");
  if (p == n) return std::numeric_limits<double>::infinity();
  return n * p / (n - p);
}

DimensionConstants make_constants(int n, double p) {
  if (p <= 1.0 || p > n)
    throw std::invalid_argument("make_constants: exponent must satisfy 1 < p <= n");
  return DimensionConstants{n, sphere_measure(n), moser_constant(n),
                            trace_constant(n), p, sobolev_conjugate(p, n)};
}

}  // namespace tracelab::geom
