#include "tracelab/mesh.hpp"
#include "tracelab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace tracelab::geom {

namespace {

// Midpoint refinement with circle projection.  `on_circle` marks vertices
// lying on the curved boundary; a midpoint of two such vertices is pushed
// back onto the unit circle, which is what restores O(h^2) geometry.
struct Refiner {
  std::vector<std::array<double, 2>> verts;
  std::vector<std::array<int, 3>> cells;
  std::vector<bool> on_circle;
  std::map<std::pair<int, int>, int> midpoint_of;

  int midpoint(int a, int b) {
    auto key = std::minmax(a, b);
    if (auto it = midpoint_of.find(key); it != midpoint_of.end()) return it->second;
    double x = 0.5 * (verts[a][0] + verts[b][0]);
    double y = 0.5 * (verts[a][1] + verts[b][1]);
    bool circ = on_circle[a] && on_circle[b];
    if (circ) {
      double len = std::hypot(x, y);
      x /= len;
      y /= len;
    }
    int idx = static_cast<int>(verts.size());
    verts.push_back({x, y});
    on_circle.push_back(circ);
    midpoint_of.emplace(key, idx);
    return idx;
  }

  void refine_once() {
    std::vector<std::array<int, 3>> next;
    next.reserve(cells.size() * 4);
    midpoint_of.clear();
    for (auto [a, b, c] : cells) {
      int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
      next.push_back({a, ab, ca});
      next.push_back({ab, b, bc});
      next.push_back({ca, bc, c});
      next.push_back({ab, bc, ca});
    }
    cells = std::move(next);
  }
};

double signed_area2(const std::array<double, 2>& a, const std::array<double, 2>& b,
                    const std::array<double, 2>& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// Extract boundary edges (used by exactly one cell), oriented as in their
// cell, normal pointing away from the domain.  Tags: an edge whose endpoints
// both lie on the x-axis is the flat "trace" segment, everything else "arc".
std::vector<BoundaryEdge> extract_boundary(const std::vector<std::array<double, 2>>& verts,
                                           const std::vector<std::array<int, 3>>& cells,
                                           bool tag_flat) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& cell : cells)
    for (int k = 0; k < 3; ++k) {
      auto e = std::minmax(cell[k], cell[(k + 1) % 3]);
      ++count[e];
    }
  std::vector<BoundaryEdge> edges;
  for (const auto& cell : cells)
    for (int k = 0; k < 3; ++k) {
      int a = cell[k], b = cell[(k + 1) % 3];
      if (count[std::minmax(a, b)] != 1) continue;
      BoundaryEdge e;
      e.a = a;
      e.b = b;
      double dx = verts[b][0] - verts[a][0];
      double dy = verts[b][1] - verts[a][1];
      double len = std::hypot(dx, dy);
      // CCW cells keep the domain on the left of a->b, so (dy,-dx) points out
      e.nx = dy / len;
      e.ny = -dx / len;
      bool flat = tag_flat && std::abs(verts[a][1]) < 1e-14 && std::abs(verts[b][1]) < 1e-14;
      e.tag = flat ? "trace" : "arc";
      edges.push_back(std::move(e));
    }
  return edges;
}

void check_orientation(const TriMesh& mesh) {
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& [a, b, d] = mesh.cells[c];
    if (signed_area2(mesh.vertices[a], mesh.vertices[b], mesh.vertices[d]) <= 0.0)
      throw std::runtime_error("mesh cell " + std::to_string(c) +
                               " is degenerate or negatively oriented");
  }
}

}  // namespace

TriMesh build_disk_mesh(int refinement) {
  if (refinement < 0) throw std::invalid_argument("build_disk_mesh: refinement must be >= 0");
  constexpr int kSegments = 12;
  Refiner r;
  r.verts.push_back({0.0, 0.0});
  r.on_circle.push_back(false);
  for (int i = 0; i < kSegments; ++i) {
    double th = 2.0 * std::numbers::pi * i / kSegments;
    r.verts.push_back({std::cos(th), std::sin(th)});
    r.on_circle.push_back(true);
  }
  for (int i = 0; i < kSegments; ++i) r.cells.push_back({0, 1 + i, 1 + (i + 1) % kSegments});
  for (int level = 0; level < refinement; ++level) r.refine_once();

  TriMesh mesh;
  mesh.vertices = std::move(r.verts);
  mesh.cells = std::move(r.cells);
  mesh.boundary_edges = extract_boundary(mesh.vertices, mesh.cells, /*tag_flat=*/false);
  mesh.refinement_level = refinement;
  check_orientation(mesh);
  return mesh;
}

TriMesh build_half_disk_mesh(int refinement) {
  if (refinement < 0) throw std::invalid_argument("build_half_disk_mesh: refinement must be >= 0");
  constexpr int kSegments = 6;  // fan over [0, pi]
  Refiner r;
  r.verts.push_back({0.0, 0.0});
  r.on_circle.push_back(false);
  for (int i = 0; i <= kSegments; ++i) {
    double th = std::numbers::pi * i / kSegments;
    // snap the endpoints exactly onto the axis so the flat tag is robust
    double y = (i == 0 || i == kSegments) ? 0.0 : std::sin(th);
    r.verts.push_back({std::cos(th), y});
    r.on_circle.push_back(true);
  }
  for (int i = 0; i < kSegments; ++i) r.cells.push_back({0, 1 + i, 2 + i});
  for (int level = 0; level < refinement; ++level) r.refine_once();

  TriMesh mesh;
  mesh.vertices = std::move(r.verts);
  mesh.cells = std::move(r.cells);
  mesh.boundary_edges = extract_boundary(mesh.vertices, mesh.cells, /*tag_flat=*/true);
  mesh.refinement_level = refinement;
  check_orientation(mesh);
  return mesh;
}

TriMesh build_graded_half_disk_mesh(double r_min, int refinement) {
  if (!(r_min > 0.0) || r_min >= 1.0)
    throw std::invalid_argument("build_graded_half_disk_mesh: need 0 < r_min < 1");
  if (refinement < 2)
    throw std::invalid_argument("build_graded_half_disk_mesh: refinement must be >= 2");
  const int M = 1 << refinement;  // angular segments over [0, pi]
  const double q = 1.0 + 4.0 / M;

  std::vector<double> radii;
  radii.push_back(r_min / 8.0);
  while (radii.back() < 1.0) radii.push_back(radii.back() * q);
  radii.back() = 1.0;

  TriMesh mesh;
  mesh.vertices.push_back({0.0, 0.0});
  std::vector<int> ring_start;
  for (double rho : radii) {
    ring_start.push_back(static_cast<int>(mesh.vertices.size()));
    for (int j = 0; j <= M; ++j) {
      double th = std::numbers::pi * j / M;
      double y = (j == 0 || j == M) ? 0.0 : rho * std::sin(th);
      mesh.vertices.push_back({rho * std::cos(th), y});
    }
  }
  // central fan
  for (int j = 0; j < M; ++j) mesh.cells.push_back({0, ring_start[0] + j, ring_start[0] + j + 1});
  // ring quads split into two triangles each
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
    int si = ring_start[k], so = ring_start[k + 1];
    for (int j = 0; j < M; ++j) {
      mesh.cells.push_back({si + j, so + j, so + j + 1});
      mesh.cells.push_back({si + j, so + j + 1, si + j + 1});
    }
  }
  mesh.boundary_edges = extract_boundary(mesh.vertices, mesh.cells, /*tag_flat=*/true);
  mesh.refinement_level = refinement;
  check_orientation(mesh);
  return mesh;
}

FirstOrderGeometry::FirstOrderGeometry(const TriMesh& m) : mesh(&m) {
  const auto& V = m.vertices;
  area.resize(m.cells.size());
  grad.resize(m.cells.size());
  node_area.assign(V.size(), 0.0);
  node_boundary.assign(V.size(), 0.0);

  for (std::size_t c = 0; c < m.cells.size(); ++c) {
    const auto& [a, b, d] = m.cells[c];
    double det = signed_area2(V[a], V[b], V[d]);
    area[c] = 0.5 * det;
    // grad phi_k = rot90(opposite edge) / det, rot90(v) = (-v_y, v_x);
    // the edge opposite vertex a runs b -> d, and cyclically.
    auto assign = [&](int slot, const std::array<double, 2>& p, const std::array<double, 2>& q) {
      grad[c][2 * slot] = -(q[1] - p[1]) / det;
      grad[c][2 * slot + 1] = (q[0] - p[0]) / det;
    };
    assign(0, V[b], V[d]);
    assign(1, V[d], V[a]);
    assign(2, V[a], V[b]);
    double third = area[c] / 3.0;
    node_area[a] += third;
    node_area[b] += third;
    node_area[d] += third;
    total_area += area[c];
  }
  for (const auto& e : m.boundary_edges) {
    double len = std::hypot(V[e.b][0] - V[e.a][0], V[e.b][1] - V[e.a][1]);
    node_boundary[e.a] += 0.5 * len;
    node_boundary[e.b] += 0.5 * len;
    total_boundary += len;
  }
}

std::array<double, 2> FirstOrderGeometry::cell_gradient(const std::vector<double>& u,
                                                        std::size_t c) const {
  const auto& cell = mesh->cells[c];
  const auto& g = grad[c];
  double gx = 0, gy = 0;
  for (int k = 0; k < 3; ++k) {
    gx += u[cell[k]] * g[2 * k];
    gy += u[cell[k]] * g[2 * k + 1];
  }
  return {gx, gy};
}

double boundary_measure(const TriMesh& mesh, std::string_view tag) {
  double total = 0;
  for (const auto& e : mesh.boundary_edges) {
    if (!tag.empty() && e.tag != tag) continue;
    total += std::hypot(mesh.vertices[e.b][0] - mesh.vertices[e.a][0],
                        mesh.vertices[e.b][1] - mesh.vertices[e.a][1]);
  }
  return total;
}

double boundary_quadrature(const TriMesh& mesh, const std::vector<double>& nodal,
                           std::string_view tag) {
  if (nodal.size() != mesh.vertices.size())
    throw std::invalid_argument("boundary_quadrature: nodal vector length mismatch");
  double total = 0;
  for (const auto& e : mesh.boundary_edges) {
    if (!tag.empty() && e.tag != tag) continue;
    for (int v : {e.a, e.b})
      if (!std::isfinite(nodal[v]))
        throw std::runtime_error("boundary_quadrature: non-finite value at node " +
                                 std::to_string(v));
    double len = std::hypot(mesh.vertices[e.b][0] - mesh.vertices[e.a][0],
                            mesh.vertices[e.b][1] - mesh.vertices[e.a][1]);
    total += 0.5 * len * (nodal[e.a] + nodal[e.b]);
  }
  return total;
}

void write_mesh(std::ostream& out, const TriMesh& mesh) {
  out << mesh.vertices.size() << ' ' << mesh.cells.size() << ' ' << mesh.boundary_edges.size()
      << '\n';
  out.precision(17);
  for (const auto& v : mesh.vertices) out << v[0] << ' ' << v[1] << '\n';
  for (const auto& c : mesh.cells) out << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  for (const auto& e : mesh.boundary_edges) out << e.a << ' ' << e.b << ' ' << e.tag << '\n';
}

TriMesh read_mesh(std::istream& in) {
  std::size_t nv = 0, nc = 0, ne = 0;
  if (!(in >> nv >> nc >> ne)) throw std::runtime_error("read_mesh: bad header");
  TriMesh mesh;
  mesh.vertices.resize(nv);
  for (auto& v : mesh.vertices)
    if (!(in >> v[0] >> v[1])) throw std::runtime_error("read_mesh: truncated vertex list");
  mesh.cells.resize(nc);
  for (auto& c : mesh.cells) {
    if (!(in >> c[0] >> c[1] >> c[2])) throw std::runtime_error("read_mesh: truncated cell list");
    for (int k : c)
      if (k < 0 || static_cast<std::size_t>(k) >= nv)
        throw std::runtime_error("read_mesh: cell index out of range");
  }
  mesh.boundary_edges.resize(ne);
  for (auto& e : mesh.boundary_edges) {
    if (!(in >> e.a >> e.b >> e.tag)) throw std::runtime_error("read_mesh: truncated edge list");
    double dx = mesh.vertices[e.b][0] - mesh.vertices[e.a][0];
    double dy = mesh.vertices[e.b][1] - mesh.vertices[e.a][1];
    double len = std::hypot(dx, dy);
    e.nx = dy / len;
    e.ny = -dx / len;
  }
  check_orientation(mesh);
  return mesh;
}

// ---------------------------------------------------------------------------
// 1-D radial grids
// ---------------------------------------------------------------------------

void validate(const RadialGrid& grid) {
  if (grid.n < 2) throw std::invalid_argument("RadialGrid: dimension must be >= 2");
  if (!(grid.R > 0.0)) throw std::invalid_argument("RadialGrid: radius must be positive");
  if (grid.nodes.size() < 2) throw std::invalid_argument("RadialGrid: need at least two nodes");
  if (grid.nodes.front() != 0.0) throw std::invalid_argument("RadialGrid: nodes must start at 0");
  if (grid.nodes.back() != grid.R)
    throw std::invalid_argument("RadialGrid: nodes must end at the radius");
  for (std::size_t i = 1; i < grid.nodes.size(); ++i)
    if (!(grid.nodes[i] > grid.nodes[i - 1]))
      throw std::invalid_argument("RadialGrid: nodes must be strictly increasing");
}

RadialGrid make_log_radial_grid(int n, double R, double r_inner, int per_decade) {
  if (!(r_inner > 0.0) || !(r_inner < R))
    throw std::invalid_argument("make_log_radial_grid: need 0 < r_inner < R");
  if (per_decade < 4)
    throw std::invalid_argument("make_log_radial_grid: need at least 4 nodes per decade");
  RadialGrid grid;
  grid.n = n;
  grid.R = R;
  grid.nodes.push_back(0.0);
  double decades = std::log10(R / r_inner);
  auto count = static_cast<std::size_t>(std::ceil(decades * per_decade));
  if (count < 2) count = 2;
  for (std::size_t k = 0; k <= count; ++k) {
    double t = static_cast<double>(k) / static_cast<double>(count);
    grid.nodes.push_back(r_inner * std::pow(R / r_inner, t));
  }
  grid.nodes.back() = R;  // exact endpoint (pow round-off)
  validate(grid);
  return grid;
}

}  // namespace tracelab::geom
