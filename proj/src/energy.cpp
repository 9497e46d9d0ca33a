#include "tracelab/energy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tracelab::energy {

namespace {

void check_function(const geom::FirstOrderGeometry& g, const MeshFunction& u) {
  if (u.size() != g.n_vertices())
    throw std::invalid_argument("mesh function has " + std::to_string(u.size()) +
                                " values for " + std::to_string(g.n_vertices()) + " vertices");
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!std::isfinite(u[i]))
      throw std::invalid_argument("mesh function is not finite at node " + std::to_string(i));
}

}  // namespace

void validate(const EnergyConfig& cfg) {
  if (!(cfg.p > 1.0)) throw std::invalid_argument("energy exponent must satisfy p > 1");
  if (!(cfg.delta >= 0.0) || cfg.delta > 1e-6 * 2.0)
    throw std::invalid_argument("gradient regularization delta outside [0, 1e-6 * diameter]");
}

double energy(const geom::FirstOrderGeometry& g, const MeshFunction& u, const EnergyConfig& cfg) {
  validate(cfg);
  check_function(g, u);
  double interior = 0;
  for (std::size_t c = 0; c < g.n_cells(); ++c) {
    auto [gx, gy] = g.cell_gradient(u, c);
    double gn2 = gx * gx + gy * gy;
    interior += g.area[c] * std::pow(gn2, 0.5 * cfg.p);
  }
  double boundary = 0;
  for (std::size_t i = 0; i < u.size(); ++i) boundary += g.node_boundary[i] * u[i];
  return interior - cfg.p * boundary;
}

MeshFunction energy_gradient(const geom::FirstOrderGeometry& g, const MeshFunction& u,
                             const EnergyConfig& cfg) {
  validate(cfg);
  check_function(g, u);
  const double p = cfg.p;
  const double d2 = cfg.delta * cfg.delta;
  MeshFunction out(u.size(), 0.0);
  for (std::size_t c = 0; c < g.n_cells(); ++c) {
    auto [gx, gy] = g.cell_gradient(u, c);
    double gn2 = gx * gx + gy * gy;
    double coef;
    if (p == 2.0) {
      coef = 1.0;
    } else if (p > 2.0) {
      coef = std::pow(gn2, 0.5 * p - 1.0);
    } else {
      // singular branch: smooth only the (near-)degenerate cells
      coef = std::pow(gn2 < d2 ? gn2 + d2 : gn2, 0.5 * p - 1.0);
    }
    double wx = p * g.area[c] * coef * gx;
    double wy = p * g.area[c] * coef * gy;
    const auto& cell = g.mesh->cells[c];
    const auto& gr = g.grad[c];
    for (int k = 0; k < 3; ++k) out[cell[k]] += wx * gr[2 * k] + wy * gr[2 * k + 1];
  }
  for (std::size_t i = 0; i < u.size(); ++i) out[i] -= p * g.node_boundary[i];
  return out;
}

double area_mean(const geom::FirstOrderGeometry& g, const MeshFunction& u) {
  check_function(g, u);
  double s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s += g.node_area[i] * u[i];
  return s / g.total_area;
}

MeshFunction mean_zero_project(const geom::FirstOrderGeometry& g, const MeshFunction& u) {
  double m = area_mean(g, u);
  MeshFunction out(u);
  for (auto& v : out) v -= m;
  return out;
}

double dirichlet_norm(const geom::FirstOrderGeometry& g, const MeshFunction& u, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("dirichlet_norm: need q >= 1");
  check_function(g, u);
  double s = 0;
  for (std::size_t c = 0; c < g.n_cells(); ++c) {
    auto [gx, gy] = g.cell_gradient(u, c);
    s += g.area[c] * std::pow(gx * gx + gy * gy, 0.5 * q);
  }
  return std::pow(s, 1.0 / q);
}

}  // namespace tracelab::energy
