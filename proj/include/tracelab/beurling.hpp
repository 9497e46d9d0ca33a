// The unit-disk case: the extremal logarithm family
//     B_a(e^{i theta}) = log(1/(1 - a e^{i theta})) / sqrt(log(1/(1-a^2))),
// its Dirichlet norm, level-set measures, the Poisson kernel/extension, and
// the exponential boundary integral weighted by harmonic measure.
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "tracelab/report.hpp"

namespace tracelab::disk {

// Boundary samples value[j] at theta_j = 2*pi*j/m.  The count m must be a
// power of two and at least 16, so refinement studies can halve cleanly.
struct BoundaryFunction1D {
  std::vector<std::complex<double>> value;
  std::size_t m() const { return value.size(); }
};

void validate(const BoundaryFunction1D& f);

// Interior evaluation point; kept strictly inside (|z| <= 1 - 1e-9) because
// the Poisson kernel degenerates on the circle.
struct DiskPoint {
  double re = 0.0;
  double im = 0.0;
};

void validate(const DiskPoint& z);

// Principal-branch samples of the family above; 0 < a < 1 keeps the
// logarithm argument in the right half plane, away from the branch cut.
BoundaryFunction1D beurling_boundary(double a, std::size_t m);

// Squared Dirichlet integral of B_a over the disk via the power series
//     pi * sum_{k>=1} a^{2k}/k / log(1/(1-a^2))  ==  pi  identically.
// `terms` = 0 picks the count automatically; an explicit count too small
// for ~1e-14 relative accuracy is rejected, naming the needed count.
double beurling_dirichlet_norm_sq(double a, int terms = 0);

// Smallest series length meeting that accuracy for this a.
int beurling_terms_needed(double a);

// Arc-length measure (2*pi/m) * #{ j : |f_j| >= s } of the level set.
double level_set_measure(const BoundaryFunction1D& f, double s);

// (1 - |z|^2) / |e^{i theta} - z|^2, the harmonic-measure density with
// dtheta/(2 pi) normalization (so its boundary mean is 1).
double poisson_kernel(const DiskPoint& z, double theta);

// Harmonic extension of f at z: trapezoid value of (1/m) sum f_j P_z(theta_j).
std::complex<double> poisson_extend(const BoundaryFunction1D& f, const DiskPoint& z);

// The probability-normalized exponential boundary integral
//     (1/m) sum_j exp(alpha |f_j - f(z)|^2) P_z(theta_j),
// with f(z) the Poisson extension above.  Overflow falls back to log-space
// summation, mirroring the mesh-side boundary functional.
report::Mag cm_integral_detailed(const BoundaryFunction1D& f, double alpha, const DiskPoint& z);
double cm_integral(const BoundaryFunction1D& f, double alpha, const DiskPoint& z);

}  // namespace tracelab::disk
