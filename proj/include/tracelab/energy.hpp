// The convex energy  E(u) = sum_cells area*|grad u|^p  -  p * (boundary term),
// its nodal gradient, the mean-zero projection, and gradient norms — all over
// piecewise-linear functions, where |grad u| is constant per cell and the
// energy is quadrature-free.
#pragma once

#include <vector>

#include "tracelab/mesh.hpp"

namespace tracelab::energy {

// Nodal coefficient vector of a piecewise-linear function.
using MeshFunction = std::vector<double>;

struct EnergyConfig {
  double p = 2.0;
  // Regularization for the singular p < 2 gradient on cells where the
  // discrete gradient (nearly) vanishes.  Applied inside energy_gradient
  // only; energy values themselves are never regularized.
  double delta = 1e-12;
};

// Exponent must exceed 1; the degenerate/singular endpoint p = 1 and p <= 0
// make the minimization problem meaningless here.  (The planar experiments
// use p up to and including 2.)
void validate(const EnergyConfig& cfg);

double energy(const geom::FirstOrderGeometry& g, const MeshFunction& u, const EnergyConfig& cfg);

MeshFunction energy_gradient(const geom::FirstOrderGeometry& g, const MeshFunction& u,
                             const EnergyConfig& cfg);

// u minus its area mean, i.e. the representative with integral zero.
// Linear and idempotent.
MeshFunction mean_zero_project(const geom::FirstOrderGeometry& g, const MeshFunction& u);

double area_mean(const geom::FirstOrderGeometry& g, const MeshFunction& u);

// ( sum_cells area * |grad u|^q )^{1/q}
double dirichlet_norm(const geom::FirstOrderGeometry& g, const MeshFunction& u, double q);

}  // namespace tracelab::energy
