// Dimensional constants: sphere measures, the two exponential-inequality
// thresholds, and the Sobolev conjugate exponent.
#pragma once

#include <stdexcept>

namespace tracelab::geom {

// Gamma function via a Lanczos approximation (g=7, 9 coefficients).
// Good to ~14 digits on the half-integer arguments we feed it.
double gamma_fn(double x);

// Surface measure of the unit (n-1)-sphere: 2 pi^{n/2} / Gamma(n/2).
// n=2 -> 2*pi, n=3 -> 4*pi, n=4 -> 2*pi^2.
double sphere_measure(int n);

// Sharp boundary-trace threshold: (n-1) * (omega_{n-1}/2)^{1/(n-1)}.
// n=2 -> pi.
double trace_constant(int n);

// Sharp interior threshold: n * omega_{n-1}^{1/(n-1)}.  n=2 -> 4*pi.
double moser_constant(int n);

// 1/p_star = 1/p - 1/n.  Returns +inf when p == n.
double sobolev_conjugate(double p, int n);

// Bundle of the constants every experiment needs for a given (n, p).
//
// The exponent p nominally lives in (1, n); we accept the closed right end
// (p == n, giving p_star = +inf) because the planar torsion runs use p = 2
// on two-dimensional domains.
struct DimensionConstants {
  int n;
  double omega;    // sphere_measure(n)
  double alpha_n;  // interior threshold
  double beta_n;   // trace threshold
  double p;
  double p_star;
};

DimensionConstants make_constants(int n, double p);

}  // namespace tracelab::geom
