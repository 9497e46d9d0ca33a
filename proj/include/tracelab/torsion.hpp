// Minimization of the boundary-driven p-energy over mean-zero functions.
//
// The minimizer w satisfies, in the weak sense, a p-Laplace equation with
// constant interior source |bdry|/|area| and unit outward flux; both are
// certified a posteriori from the discrete first-order conditions.
#pragma once

#include <vector>

#include "tracelab/energy.hpp"
#include "tracelab/radial.hpp"

namespace tracelab::torsion {

struct SolveOptions {
  // Stopping tolerance on the projected-gradient norm; 0 means the default
  // 1e-8 * (discrete boundary measure).
  double tol = 0.0;
  // The solver internally drives the residual to stop_safety * tol so the
  // reported certificate has headroom; success is still judged against tol.
  double stop_safety = 0.2;
  int max_reweight = 200;    // reweighted-linearization outer iterations
  int max_descent = 100000;  // projected-gradient iterations
  // Optional start iterate (will be projected to mean zero); empty = zero.
  energy::MeshFunction start;
  bool use_reweight = true;  // turn off to run plain projected descent
};

struct SolveReport {
  energy::MeshFunction w;
  int iterations = 0;           // accepted steps, both phases
  double grad_norm = 0.0;       // final projected-gradient norm
  double tol = 0.0;             // the tolerance the run was judged against
  double energy_value = 0.0;
  double interior_residual = 0.0;   // max nodal defect of the weak identity
  double flux_deviation = 0.0;      // max |pointwise flux - 1|, an O(h) diagnostic
  bool converged = false;
  std::vector<double> energy_trace;  // energies of accepted iterates (non-increasing)
};

// Convex minimization: reweighted linear solves (which for p = 2 reduce to a
// single stiffness solve) warm-start a projected-gradient descent with
// Armijo backtracking, lumped-mass preconditioning and Barzilai-Borwein
// steps.  Plain descent alone stalls badly for p < 2 on fine meshes — see
// the solver notes in README.
SolveReport solve_trace_function(const geom::FirstOrderGeometry& g,
                                 const energy::EnergyConfig& cfg, const SolveOptions& opts = {});

// Max over nodal basis functions phi (normalized sup-norm 1) of the defect
//   | int |grad w|^{p-2} grad w . grad phi  -  int_bdry phi
//     + (|bdry|/|area|) int phi |.
// Zero exactly at the discrete minimizer; certifies interior and boundary
// weak identities at once.
double variational_residual(const geom::FirstOrderGeometry& g, const energy::MeshFunction& w,
                            const energy::EnergyConfig& cfg);

// Total outward flux through the boundary computed from the variational
// (conservative) nodal fluxes; equals the discrete boundary measure up to
// solver tolerance.  This is the quantity the flux-compatibility check uses.
double certified_boundary_flux(const geom::FirstOrderGeometry& g, const energy::MeshFunction& w,
                               const energy::EnergyConfig& cfg);

// Max over boundary edges of |(|grad w|^{p-2} grad w).n - 1| evaluated from
// raw cell gradients.  O(h) accurate only; reported as a diagnostic.
double pointwise_flux_deviation(const geom::FirstOrderGeometry& g, const energy::MeshFunction& w,
                                const energy::EnergyConfig& cfg);

// Closed-form radial solution on the n-ball of radius R:
//   w'(r) = (r/R)^{1/(p-1)},
// integrated to zero mean.  The outward flux |w'|^{p-2} w' at r = R is 1
// for every (n, p, R).
geom::RadialProfile radial_trace_function(int n, double p, double R,
                                          const geom::RadialGrid& grid);

}  // namespace tracelab::torsion
