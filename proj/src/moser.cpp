#include "tracelab/moser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tracelab/constants.hpp"
#include "tracelab/radial.hpp"
#include "tracelab/trace.hpp"

namespace tracelab::moser {

using energy::MeshFunction;
using geom::FirstOrderGeometry;
using report::Mag;

void validate(const MoserParams& params) {
  if (!(params.r > 0.0) || !(params.r < 1.0))
    throw std::invalid_argument("MoserParams: plateau radius must lie in (0, 1)");
  if (params.n < 2) throw std::invalid_argument("MoserParams: dimension must be >= 2");
  if (!(params.mollification >= 0.0) || params.mollification >= params.r)
    throw std::invalid_argument("MoserParams: mollification width must lie in [0, r)");
  if (!std::isfinite(params.center[0]) || !std::isfinite(params.center[1]))
    throw std::invalid_argument("MoserParams: center must be finite");
}

MeshFunction moser_function(const MoserParams& params, const geom::TriMesh& mesh) {
  validate(params);

  // resolution gate: nearest-neighbor vertex spacing at the center
  double spacing = std::numeric_limits<double>::infinity();
  for (const auto& v : mesh.vertices) {
    double d = std::hypot(v[0] - params.center[0], v[1] - params.center[1]);
    if (d > 1e-12) spacing = std::min(spacing, d);
  }
  const double required = params.r / 4.0;
  if (!(spacing <= required))
    throw std::invalid_argument(
        "moser_function: mesh spacing " + std::to_string(spacing) + " at the center is too " +
        "coarse for plateau radius " + std::to_string(params.r) + "; refine locally to h <= " +
        std::to_string(required));

  const double L = std::log(1.0 / params.r);
  MeshFunction u(mesh.vertices.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double d = std::hypot(mesh.vertices[i][0] - params.center[0],
                          mesh.vertices[i][1] - params.center[1]);
    double v = d <= params.r ? 1.0 : std::log(1.0 / d) / L;
    u[i] = std::clamp(v, 0.0, 1.0);  // clamps the d >= 1 tail to exactly 0
  }
  return u;
}

double moser_norm_predicted(double r, int n) {
  if (!(r > 0.0) || !(r < 1.0))
    throw std::invalid_argument("moser_norm_predicted: radius must lie in (0, 1)");
  if (n < 2) throw std::invalid_argument("moser_norm_predicted: dimension must be >= 2");
  return 0.5 * geom::sphere_measure(n) * std::pow(std::log(1.0 / r), 1.0 - n);
}

double moser_norm_measured(const MoserParams& params, const FirstOrderGeometry& g) {
  MeshFunction u = moser_function(params, *g.mesh);
  double norm = energy::dirichlet_norm(g, u, static_cast<double>(params.n));
  return std::pow(norm, static_cast<double>(params.n));
}

std::vector<MeshFunction> normalized_test_sequence(const std::vector<double>& r_values,
                                                   const FirstOrderGeometry& g,
                                                   const MoserParams& base) {
  std::vector<MeshFunction> out;
  out.reserve(r_values.size());
  for (double r : r_values) {
    MoserParams params = base;
    params.r = r;
    MeshFunction u = moser_function(params, *g.mesh);
    u = energy::mean_zero_project(g, u);
    double norm = energy::dirichlet_norm(g, u, static_cast<double>(base.n));
    if (!(norm > 0.0))
      throw std::runtime_error("normalized_test_sequence: profile has zero gradient norm");
    for (auto& v : u) v /= norm;
    out.push_back(std::move(u));
  }
  return out;
}

namespace {

Mag lower_bound_mag(double r, int n, double alpha, double omega) {
  // r^{n-1} (1/r)^{alpha (omega/2)^{-1/(n-1)}}, assembled in log10
  double rate = alpha * std::pow(0.5 * omega, -1.0 / (n - 1));
  return Mag::from_log10((n - 1) * std::log10(r) + rate * std::log10(1.0 / r));
}

// OLS slope of log(value) against log(1/r), plus dominance diagnostics;
// appends the lower-bound column to the report.
void attach_sharpness_columns(report::ScanReport& rep, int n, double alpha, double omega,
                              double baseline) {
  rep.extra_names.push_back("lower_bound");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double min_ratio10 = std::numeric_limits<double>::infinity();
  const auto n_rows = static_cast<double>(rep.rows.size());
  for (auto& row : rep.rows) {
    Mag lb = lower_bound_mag(row.param, n, alpha, omega);
    min_ratio10 = std::min(min_ratio10, row.value.exponent10 - lb.exponent10);
    row.extras.push_back(lb);
    double x = std::log(1.0 / row.param);
    double y = row.value.exponent10 * std::numbers::ln10;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = n_rows * sxx - sx * sx;
  rep.summary["regressed_exponent"] =
      denom != 0.0 ? (n_rows * sxy - sx * sy) / denom : std::numeric_limits<double>::quiet_NaN();
  rep.summary["predicted_exponent"] =
      alpha * std::pow(0.5 * omega, -1.0 / (n - 1)) - (n - 1);
  rep.summary["min_dominance_ratio"] = std::pow(10.0, min_ratio10);
  rep.summary["baseline"] = baseline;
}

}  // namespace

report::ScanReport sharpness_experiment(double alpha, const std::vector<double>& r_values,
                                        const FirstOrderGeometry& g, const MoserParams& base) {
  if (base.n != 2)
    throw std::invalid_argument(
        "sharpness_experiment: mesh scans are planar; use radial_sharpness_experiment for n >= 3");
  if (r_values.empty()) throw std::invalid_argument("sharpness_experiment: empty radius list");

  // scan over the tagged flat boundary when the mesh has one
  trace::ScanOptions opts;
  for (const auto& e : g.mesh->boundary_edges)
    if (e.tag == "trace") {
      opts.tag = "trace";
      break;
    }

  // raw profiles; the scan itself normalizes and logs the raw norms
  std::vector<MeshFunction> family;
  family.reserve(r_values.size());
  for (double r : r_values) {
    MoserParams params = base;
    params.r = r;
    family.push_back(moser_function(params, *g.mesh));
  }

  report::ScanReport rep = trace::boundedness_scan(g, r_values, family, alpha, base.n, opts);
  attach_sharpness_columns(rep, base.n, alpha, geom::sphere_measure(base.n),
                           geom::boundary_measure(*g.mesh, opts.tag));
  return rep;
}

report::ScanReport radial_sharpness_experiment(int n, double alpha,
                                               const std::vector<double>& r_values,
                                               int per_decade) {
  if (n < 3)
    throw std::invalid_argument(
        "radial_sharpness_experiment: use the mesh experiment for the planar case");
  if (!(alpha >= 0.0)) throw std::invalid_argument("radial_sharpness_experiment: alpha >= 0");
  if (r_values.empty())
    throw std::invalid_argument("radial_sharpness_experiment: empty radius list");

  const double omega = geom::sphere_measure(n);          // full sphere factor of the ball
  const double omega_tr = geom::sphere_measure(n - 1);   // angular factor of the flat boundary
  const double q = static_cast<double>(n) / (n - 1);
  const double baseline = omega_tr / (n - 1);            // trace measure of the unit (n-1)-ball

  report::ScanReport rep;
  std::vector<Mag> values;
  for (double r : r_values) {
    if (!(r > 0.0) || !(r < 1.0))
      throw std::invalid_argument("radial_sharpness_experiment: radii must lie in (0, 1)");
    const double L = std::log(1.0 / r);

    // closed forms on the half ball: gradient norm and area mean of the profile
    const double norm_n = 0.5 * omega * std::pow(L, 1.0 - n);  // ||grad u_r||_n^n
    const double norm = std::pow(norm_n, 1.0 / n);
    const double mean = (1.0 - std::pow(r, n)) / (n * L);

    // normalized profile along the flat boundary ray:  (u_r(s) - mean) / norm
    auto u_hat = [&](double s) {
      double u = s <= r ? 1.0 : std::max(0.0, std::log(1.0 / s) / L);
      return (u - mean) / norm;
    };

    // plateau contributes exactly; the tail s in [r, 1] by trapezoid on a
    // geometric grid (integrand smooth in log s)
    const double plateau_hat = u_hat(0.0);
    const double expo_plateau = alpha * std::pow(std::abs(plateau_hat), q);
    std::vector<double> ln_terms;
    // assembled in logs: r^{n-1} underflows linearly long before the scan ends
    ln_terms.push_back(std::log(omega_tr / (n - 1.0)) + (n - 1.0) * std::log(r) + expo_plateau);

    geom::RadialGrid grid = geom::make_log_radial_grid(n, 1.0, r, per_decade);
    double expo_max = expo_plateau;
    auto ln_f = [&](double s) {  // log of the integrand omega_tr e^{...} s^{n-2}
      double expo = alpha * std::pow(std::abs(u_hat(s)), q);
      expo_max = std::max(expo_max, expo);
      return std::log(omega_tr) + expo + (n - 2.0) * std::log(s);
    };
    // grid.nodes[0] == 0 belongs to the plateau; trapezoid over the rest
    for (std::size_t k = 2; k < grid.nodes.size(); ++k) {
      double s0 = grid.nodes[k - 1], s1 = grid.nodes[k];
      double t0 = ln_f(s0), t1 = ln_f(s1);
      double peak = std::max(t0, t1);
      ln_terms.push_back(std::log(0.5 * (s1 - s0)) + peak +
                         std::log(std::exp(t0 - peak) + std::exp(t1 - peak)));
    }
    double peak = -std::numeric_limits<double>::infinity();
    for (double t : ln_terms) peak = std::max(peak, t);
    double acc = 0.0;
    for (double t : ln_terms) acc += std::exp(t - peak);

    report::ScanRow row;
    row.param = r;
    row.value = Mag::from_log10((peak + std::log(acc)) / std::numbers::ln10);
    row.grad_norm = norm;
    row.mean = mean;
    row.exponent_max = expo_max;
    values.push_back(row.value);
    rep.rows.push_back(std::move(row));
  }

  rep.verdict = trace::scan_verdict(values, baseline);
  attach_sharpness_columns(rep, n, alpha, omega, baseline);
  return rep;
}

}  // namespace tracelab::moser
