// 1-D radial discretization of the n-ball, for the closed-form checks and
// the arbitrary-dimension half-space experiments.
#pragma once

#include <vector>

namespace tracelab::geom {

struct RadialGrid {
  int n = 2;                  // ambient dimension
  double R = 1.0;             // ball radius
  std::vector<double> nodes;  // strictly increasing, nodes.front()=0, nodes.back()=R
};

// Validates the invariants above; throws std::invalid_argument otherwise.
void validate(const RadialGrid& grid);

// Uniform grid plus a geometric refinement of [r_inner, R] with roughly
// `per_decade` nodes per decade — the resolution the logarithmic profiles need.
RadialGrid make_log_radial_grid(int n, double R, double r_inner, int per_decade);

struct RadialProfile {
  RadialGrid grid;
  std::vector<double> value;
  std::vector<double> derivative;
};

}  // namespace tracelab::geom
