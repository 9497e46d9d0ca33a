#include "tracelab/torsion.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tracelab::torsion {

using energy::EnergyConfig;
using energy::MeshFunction;
using geom::FirstOrderGeometry;

namespace {

// l2 norm of the gradient projected onto the tangent space of the mean-zero
// constraint {m.u = 0}: g - (m.g / m.m) m.  This is the quantity that
// vanishes at the constrained minimizer (where grad E is parallel to the
// mass vector).
double projected_norm(const FirstOrderGeometry& g, const MeshFunction& grad,
                      MeshFunction* projected = nullptr) {
  double mg = 0, mm = 0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    mg += g.node_area[i] * grad[i];
    mm += g.node_area[i] * g.node_area[i];
  }
  double lambda = mg / mm;
  double norm2 = 0;
  if (projected) projected->resize(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    double v = grad[i] - lambda * g.node_area[i];
    if (projected) (*projected)[i] = v;
    norm2 += v * v;
  }
  return std::sqrt(norm2);
}

// One reweighted linear step: minimize the touching quadratic
//   sum (p/2) c_k area |grad u|^2 - p * (boundary term)
// over mean-zero u, where c_k freezes the current |grad u|^{p-2} (smoothed
// by delta).  For p <= 2 this majorizes the smoothed energy, so the exact
// solve cannot increase it.  The singular linear system (constants in the
// kernel) is pinned at node 0 and re-centered afterwards.
class ReweightedSolver {
 public:
  explicit ReweightedSolver(const FirstOrderGeometry& g) : g_(g) {
    const auto n = static_cast<Eigen::Index>(g.n_vertices());
    // fixed sparsity: assemble once with unit weights to lock the pattern
    matrix_.resize(n, n);
    auto trips = make_triplets(nullptr);
    matrix_.setFromTriplets(trips.begin(), trips.end());
    solver_.analyzePattern(matrix_);
  }

  // weights: per-cell multiplier c_k (nullptr = all ones)
  MeshFunction solve(const std::vector<double>* weights, const MeshFunction& rhs) {
    auto trips = make_triplets(weights);
    matrix_.setFromTriplets(trips.begin(), trips.end());
    solver_.factorize(matrix_);
    if (solver_.info() != Eigen::Success)
      throw std::runtime_error("reweighted step: sparse factorization failed");
    Eigen::VectorXd b(matrix_.rows());
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = rhs[i];
    b[0] = 0.0;  // pinned node
    Eigen::VectorXd x = solver_.solve(b);
    MeshFunction out(rhs.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[static_cast<Eigen::Index>(i)];
    return out;
  }

 private:
  std::vector<Eigen::Triplet<double>> make_triplets(const std::vector<double>* weights) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(9 * g_.n_cells() + 1);
    trips.emplace_back(0, 0, 1.0);  // pin node 0 (kernel of the Neumann operator)
    for (std::size_t c = 0; c < g_.n_cells(); ++c) {
      double w = g_.area[c] * (weights ? (*weights)[c] : 1.0);
      const auto& cell = g_.mesh->cells[c];
      const auto& gr = g_.grad[c];
      for (int i = 0; i < 3; ++i) {
        if (cell[i] == 0) continue;
        for (int j = 0; j < 3; ++j) {
          if (cell[j] == 0) continue;
          double e = w * (gr[2 * i] * gr[2 * j] + gr[2 * i + 1] * gr[2 * j + 1]);
          trips.emplace_back(cell[i], cell[j], e);
        }
      }
    }
    return trips;
  }

  const FirstOrderGeometry& g_;
  Eigen::SparseMatrix<double> matrix_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

}  // namespace

SolveReport solve_trace_function(const FirstOrderGeometry& g, const EnergyConfig& cfg,
                                 const SolveOptions& opts) {
  energy::validate(cfg);
  const double tol = opts.tol > 0 ? opts.tol : 1e-8 * g.total_boundary;
  const double target = std::min(1.0, std::max(1e-3, opts.stop_safety)) * tol;

  SolveReport rep;
  rep.tol = tol;
  MeshFunction u(g.n_vertices(), 0.0);
  if (!opts.start.empty()) u = energy::mean_zero_project(g, opts.start);

  double E = energy::energy(g, u, cfg);
  rep.energy_trace.push_back(E);
  MeshFunction grad = energy::energy_gradient(g, u, cfg);
  MeshFunction gt;
  double res = projected_norm(g, grad, &gt);

  auto check_finite = [&](double value, const char* where) {
    if (!std::isfinite(value))
      throw std::runtime_error(std::string("solve_trace_function: non-finite energy in ") +
                               where + " at iteration " + std::to_string(rep.iterations));
  };
  check_finite(E, "start");

  // ---- phase 1: reweighted linearization (majorize-minimize for p <= 2) ----
  if (opts.use_reweight && cfg.p <= 2.0 && res > target) {
    ReweightedSolver lin(g);
    const double ratio = g.total_boundary / g.total_area;
    MeshFunction rhs(g.n_vertices());
    for (std::size_t i = 0; i < rhs.size(); ++i)
      rhs[i] = g.node_boundary[i] - ratio * g.node_area[i];

    constexpr double kDeltaFloor = 1e-12;
    double delta = 1e-3;  // annealed smoothing of the |grad|^{p-2} weights
    std::vector<double> weights(g.n_cells(), 1.0);
    double res_prev = res;
    for (int outer = 0; outer < opts.max_reweight && res > target; ++outer) {
      bool at_floor = delta <= kDeltaFloor;
      if (cfg.p != 2.0) {
        double d2 = delta * delta;
        for (std::size_t c = 0; c < g.n_cells(); ++c) {
          auto [gx, gy] = g.cell_gradient(u, c);
          weights[c] = std::pow(gx * gx + gy * gy + d2, 0.5 * cfg.p - 1.0);
        }
      }
      MeshFunction v = lin.solve(cfg.p == 2.0 ? nullptr : &weights, rhs);
      v = energy::mean_zero_project(g, v);

      // guard the true (unsmoothed) energy, with slack for round-off noise:
      // accept a damped step if the full one overshoots
      const double guard = E + 1e-13 * (1.0 + std::abs(E));
      double t = 1.0;
      MeshFunction cand(u.size());
      double E_new = 0;
      bool accepted = false;
      for (int back = 0; back < 60; ++back) {
        for (std::size_t i = 0; i < u.size(); ++i) cand[i] = u[i] + t * (v[i] - u[i]);
        E_new = energy::energy(g, cand, cfg);
        check_finite(E_new, "reweighted step");
        if (E_new <= guard) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;  // direction exhausted; hand over to descent

      u.swap(cand);
      E = E_new;
      rep.energy_trace.push_back(E);
      ++rep.iterations;
      grad = energy::energy_gradient(g, u, cfg);
      res = projected_norm(g, grad, &gt);
      if (cfg.p == 2.0) break;  // quadratic case: one exact solve is the answer
      // once the smoothing has bottomed out, these solves converge only
      // linearly; when they stop making headway the descent polish is cheaper
      if (at_floor && res > 0.7 * res_prev) break;
      res_prev = res;
      delta = std::max(0.2 * delta, kDeltaFloor);
    }
  }

  // ---- phase 2: projected gradient descent, Armijo backtracking ----
  // Lumped-mass preconditioning; Barzilai-Borwein initial steps.
  double bb_step = 1e-2;
  MeshFunction u_prev, gt_prev;
  while (res > target && rep.iterations < opts.max_descent) {
    // descent direction: mass-preconditioned projected gradient, re-centered
    MeshFunction d(u.size());
    double md = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      d[i] = -gt[i] / g.node_area[i];
      md += g.node_area[i] * d[i];
    }
    double shift = md / g.total_area;
    double gd = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      d[i] -= shift;
      gd += gt[i] * d[i];
    }
    if (!(gd < 0)) {  // preconditioner misbehaved; fall back to steepest descent
      for (std::size_t i = 0; i < u.size(); ++i) d[i] = -gt[i];
      gd = -res * res;
    }

    double t = bb_step;
    MeshFunction cand(u.size());
    double E_new = 0;
    bool accepted = false;
    for (int back = 0; back < 80; ++back) {
      for (std::size_t i = 0; i < u.size(); ++i) cand[i] = u[i] + t * d[i];
      E_new = energy::energy(g, cand, cfg);
      check_finite(E_new, "descent step");
      if (E_new <= E + 1e-4 * t * gd) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // line search exhausted at machine scale

    u_prev = u;
    gt_prev = gt;
    u.swap(cand);
    E = E_new;
    rep.energy_trace.push_back(E);
    ++rep.iterations;
    grad = energy::energy_gradient(g, u, cfg);
    res = projected_norm(g, grad, &gt);

    // BB1 step from the last accepted move
    double sy = 0, ss = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      double s = u[i] - u_prev[i];
      double y = gt[i] - gt_prev[i];
      sy += s * y;
      ss += s * s;
    }
    bb_step = (sy > 1e-300) ? ss / sy : 2.0 * t;
  }

  rep.w = std::move(u);
  rep.grad_norm = res;
  rep.energy_value = E;
  rep.converged = res <= tol;
  rep.interior_residual = variational_residual(g, rep.w, cfg);
  rep.flux_deviation = pointwise_flux_deviation(g, rep.w, cfg);
  return rep;
}

double variational_residual(const FirstOrderGeometry& g, const MeshFunction& w,
                            const EnergyConfig& cfg) {
  // grad E / p recovers  int |grad w|^{p-2} grad w . grad phi_i - int_bdry phi_i;
  // adding back (|bdry|/|area|) int phi_i gives the weak-identity defect per
  // basis function (whose sup norm is 1, so no further normalization).
  MeshFunction grad = energy::energy_gradient(g, w, cfg);
  const double ratio = g.total_boundary / g.total_area;
  double worst = 0;
  for (std::size_t i = 0; i < grad.size(); ++i)
    worst = std::max(worst, std::abs(grad[i] / cfg.p + ratio * g.node_area[i]));
  return worst;
}

double certified_boundary_flux(const FirstOrderGeometry& g, const MeshFunction& w,
                               const EnergyConfig& cfg) {
  // Variational nodal flux: F_i = grad E_i / p + b_i + (|bdry|/|area|) m_i
  // (the divergence theorem applied to the discrete weak identity).  Summing
  // over boundary nodes integrates the flux without differentiating w, which
  // is what makes the certificate tolerance-accurate instead of O(h).
  MeshFunction grad = energy::energy_gradient(g, w, cfg);
  const double ratio = g.total_boundary / g.total_area;
  double total = 0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (g.node_boundary[i] == 0.0) continue;
    total += grad[i] / cfg.p + g.node_boundary[i] + ratio * g.node_area[i];
  }
  return total;
}

double pointwise_flux_deviation(const FirstOrderGeometry& g, const MeshFunction& w,
                                const EnergyConfig& cfg) {
  // cell owning each boundary edge
  const auto& mesh = *g.mesh;
  double worst = 0;
  for (const auto& e : mesh.boundary_edges) {
    // find the unique cell containing edge (a,b)
    // (linear scan is fine at the sizes we run; builders order edges by cell)
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
      const auto& cell = mesh.cells[c];
      bool has_a = cell[0] == e.a || cell[1] == e.a || cell[2] == e.a;
      bool has_b = cell[0] == e.b || cell[1] == e.b || cell[2] == e.b;
      if (!has_a || !has_b) continue;
      auto [gx, gy] = g.cell_gradient(w, c);
      double gn = std::hypot(gx, gy);
      double coef = (cfg.p == 2.0) ? 1.0 : std::pow(std::max(gn, 1e-300), cfg.p - 2.0);
      double flux = coef * (gx * e.nx + gy * e.ny);
      worst = std::max(worst, std::abs(flux - 1.0));
      break;
    }
  }
  return worst;
}

geom::RadialProfile radial_trace_function(int n, double p, double R,
                                          const geom::RadialGrid& grid) {
  if (n < 2) throw std::invalid_argument("radial_trace_function: dimension must be >= 2");
  if (!(p > 1.0)) throw std::invalid_argument("radial_trace_function: need p > 1");
  if (!(R > 0.0)) throw std::invalid_argument("radial_trace_function: need R > 0");
  geom::validate(grid);

  const double kappa = 1.0 / (p - 1.0);
  // w(r) = R/(kappa+1) [ (r/R)^{kappa+1} - n/(n+kappa+1) ]; the bracketed
  // constant makes the profile integrate to zero against r^{n-1} dr.
  const double mean_term = static_cast<double>(n) / (n + kappa + 1.0);
  geom::RadialProfile prof;
  prof.grid = grid;
  prof.value.resize(grid.nodes.size());
  prof.derivative.resize(grid.nodes.size());
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    double s = grid.nodes[i] / R;
    prof.derivative[i] = std::pow(s, kappa);
    prof.value[i] = R / (kappa + 1.0) * (std::pow(s, kappa + 1.0) - mean_term);
  }
  return prof;
}

}  // namespace tracelab::torsion
