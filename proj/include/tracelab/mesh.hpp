// Triangle meshes for the planar domains (disk, half-disk) plus the
// first-order geometry cache every discrete operator is built from.
#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tracelab::geom {

struct BoundaryEdge {
  int a = -1, b = -1;      // vertex indices, oriented so the domain lies left
  double nx = 0, ny = 0;   // outward unit normal
  std::string tag;         // "arc" for curved parts, "trace" for the flat segment
};

struct TriMesh {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> cells;  // positively oriented
  std::vector<BoundaryEdge> boundary_edges;
  int refinement_level = 0;
};

// Unit disk: 12-triangle fan refined `refinement` times; refined boundary
// vertices are projected back onto the circle, so area/perimeter errors are
// O(h^2).  Boundary edges are tagged "arc".
TriMesh build_disk_mesh(int refinement);

// Upper half of the unit disk, {|x|<1, y>0}.  The flat segment [-1,1] on the
// x-axis is tagged "trace", the curved part "arc".
TriMesh build_half_disk_mesh(int refinement);

// Half-disk with a polar mesh graded geometrically toward the origin, the
// natural domain for the truncated-logarithm profiles: rings run from
// r_min/8 out to 1 with ratio 1 + 4/M (M = 2^refinement angular segments),
// so the log layer at radius r >= r_min is resolved with h_local <= r/8.
TriMesh build_graded_half_disk_mesh(double r_min, int refinement);

// Per-cell and per-node quantities of the piecewise-linear discretization.
// All immutable once built.
struct FirstOrderGeometry {
  const TriMesh* mesh = nullptr;
  std::vector<double> area;                     // per cell
  std::vector<std::array<double, 6>> grad;      // per cell: grad of the 3 nodal
                                                // basis functions, (gx0,gy0,gx1,...)
  std::vector<double> node_area;                // lumped area masses, sum = |Omega|_h
  std::vector<double> node_boundary;            // boundary masses over all tags
  double total_area = 0;
  double total_boundary = 0;

  explicit FirstOrderGeometry(const TriMesh& m);

  std::size_t n_vertices() const { return mesh->vertices.size(); }
  std::size_t n_cells() const { return mesh->cells.size(); }

  // gradient of the P1 interpolant of nodal values u on one cell
  std::array<double, 2> cell_gradient(const std::vector<double>& u, std::size_t c) const;
};

// Length of the boundary edges carrying `tag` (empty tag = all of them).
double boundary_measure(const TriMesh& mesh, std::string_view tag = {});

// Edgewise trapezoid rule over boundary edges with `tag` (empty = all).
// Exact for edgewise-linear integrands.  Throws if a referenced nodal value
// is not finite, naming the node.
double boundary_quadrature(const TriMesh& mesh, const std::vector<double>& nodal,
                           std::string_view tag = {});

// Plain-text mesh exchange.  Header `n_vertices n_cells n_boundary_edges`,
// then `x y` per vertex, three indices per cell, `a b tag` per boundary edge.
void write_mesh(std::ostream& out, const TriMesh& mesh);
TriMesh read_mesh(std::istream& in);

}  // namespace tracelab::geom
