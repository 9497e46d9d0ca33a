// The truncated-logarithm concentration family
//     u_r(x) = min(1, log(1/|x-y|) / log(1/r)),   0 < r < 1,
// its gradient-norm law, and the sharpness experiments it drives: on meshes
// for the planar case and on a radial half-space model for n >= 3.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "tracelab/energy.hpp"
#include "tracelab/mesh.hpp"
#include "tracelab/report.hpp"

namespace tracelab::moser {

struct MoserParams {
  std::array<double, 2> center{0.0, 0.0};  // profile center y
  double r = 0.1;                          // plateau radius, in (0, 1)
  int n = 2;                               // gradient-norm exponent
  // Width of an optional kink-smoothing band.  The P1 nodal interpolant is
  // identical for any width below the local mesh size, so the value is
  // validated (must sit in [0, r)) but the plain profile is always used.
  double mollification = 0.0;
};

void validate(const MoserParams& params);

// Nodal interpolation of the profile; values in [0, 1], radially
// nonincreasing, 1 on |x-y| <= r and 0 outside the unit ball around y.
// The mesh must resolve the plateau: the nearest-neighbor vertex spacing at
// y has to be at most r/4, otherwise the request is rejected with the
// spacing that would be required.
energy::MeshFunction moser_function(const MoserParams& params, const geom::TriMesh& mesh);

// Leading-order gradient-norm law on a half ball:
//     ||grad u_r||_{L^n}^n = (omega_{n-1}/2) * log(1/r)^{1-n}.
double moser_norm_predicted(double r, int n);

// ||grad u_r||_{L^n}^n of the discrete profile (the n-th power, to match
// the closed form above).
double moser_norm_measured(const MoserParams& params, const geom::FirstOrderGeometry& g);

// One profile per radius, each projected to mean zero and rescaled to unit
// discrete gradient L^n norm.
std::vector<energy::MeshFunction> normalized_test_sequence(const std::vector<double>& r_values,
                                                           const geom::FirstOrderGeometry& g,
                                                           const MoserParams& base);

// Boundary-functional scan of the normalized family over the tagged trace
// boundary, with the closed-form lower-bound column
//     lower_bound(r) = r^{n-1} * (1/r)^{alpha * (omega_{n-1}/2)^{-1/(n-1)}}
// appended, plus regression diagnostics in the summary:
//   regressed_exponent   OLS slope of log(value) against log(1/r)
//   predicted_exponent   alpha*(omega/2)^{-1/(n-1)} - (n-1)
//   min_dominance_ratio  min over rows of value / lower_bound
//   baseline             the u == 0 value of the scanned functional
report::ScanReport sharpness_experiment(double alpha, const std::vector<double>& r_values,
                                        const geom::FirstOrderGeometry& g,
                                        const MoserParams& base);

// The same experiment on the half ball of R^n in radial form, which reaches
// radii far beyond what a mesh can resolve.  The profile's gradient norm and
// area mean are exact closed forms; the flat-boundary trace integral
//     omega_{n-2} * int_0^1 exp(alpha |u(s)|^{n/(n-1)}) s^{n-2} ds
// uses the exact plateau part plus a trapezoid rule on a geometric grid with
// `per_decade` nodes per decade.  Columns and summary as above.
report::ScanReport radial_sharpness_experiment(int n, double alpha,
                                               const std::vector<double>& r_values,
                                               int per_decade = 64);

}  // namespace tracelab::moser
