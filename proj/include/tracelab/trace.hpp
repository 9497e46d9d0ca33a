// The exponential boundary functional  int_bdry exp(alpha |u|^{n/(n-1)}) ds,
// its interior reconstruction through the trace function w, and
// boundedness/blow-up scans over families of mesh functions.
#pragma once

#include <string>
#include <vector>

#include "tracelab/energy.hpp"
#include "tracelab/mesh.hpp"
#include "tracelab/report.hpp"

namespace tracelab::trace {

struct TraceEvalResult {
  double alpha = 0.0;
  report::Mag boundary;       // the boundary integral
  double interior = 0.0;      // interior reconstruction (conversion check only)
  double defect = 0.0;        // relative gap between the two sides
  double exponent_max = 0.0;  // largest nodal exponent alpha*|u|^{n/(n-1)}
  int peak_node = -1;         // boundary node attaining exponent_max
};

// Edgewise trapezoid rule for  exp(alpha |u|^{n/(n-1)})  over the boundary
// edges carrying `tag` (all of them when tag is empty).  Once any nodal
// exponent exceeds 700 the summation moves to log space: the linear value
// saturates to +inf but the log10 magnitude in the result stays finite, so
// blow-up scans remain comparable far past double range.
// Requires alpha >= 0, n >= 2, and finite boundary values (a non-finite
// node is reported by index).
TraceEvalResult trace_integral_detailed(const geom::FirstOrderGeometry& g,
                                        const energy::MeshFunction& u, double alpha, int n,
                                        const std::string& tag = {});

// Just the value (+inf once overflowed).
double trace_integral(const geom::FirstOrderGeometry& g, const energy::MeshFunction& u,
                      double alpha, int n, const std::string& tag = {});

// Checks the divergence identity behind the boundary-to-interior conversion:
// with w the trace function (unit outward flux, constant interior source
// |bdry|/|area|), the boundary integral of exp(alpha |u|^{n/(n-1)}) equals
// the interior integral of
//     exp(alpha|u|^q) * [ alpha*q*|u|^{q-1}*sgn(u) grad u . (|grad w|^{p-2} grad w) ]
//   + exp(alpha|u|^q) * (|bdry|/|area|),            q = n/(n-1).
// Both sides are returned along with the relative defect, which is O(h) for
// smooth u; the interior side uses the edge-midpoint quadrature rule.
TraceEvalResult conversion_identity_check(const geom::FirstOrderGeometry& g,
                                          const energy::MeshFunction& u,
                                          const energy::MeshFunction& w, double alpha, int n,
                                          const energy::EnergyConfig& cfg);

struct ScanOptions {
  std::string tag;        // boundary tag filter for the integrals
  // When set inside (1, n): adds the diagnostic column `holder_diag`, the
  // conjugate-exponent split  ( int exp(p* alpha |u|^q) |u|^{p*/(n-1)} )^{1/p*}
  // with 1/p* = 1/holder_p - 1/n, evaluated over the same boundary part.
  double holder_p = 0.0;
};

// Evaluates the boundary functional along a family of mesh functions, one
// row per (param, member) pair.  Members are first projected to mean zero
// and rescaled to unit gradient L^n norm (members whose gradient norm is
// indistinguishable from round-off are left alone); the grad_norm and mean
// columns record the *raw* member so the normalization applied is visible
// in the table.  The verdict follows
// scan_verdict below against the u == 0 baseline |bdry_tag|.
report::ScanReport boundedness_scan(const geom::FirstOrderGeometry& g,
                                    const std::vector<double>& params,
                                    const std::vector<energy::MeshFunction>& family, double alpha,
                                    int n, const ScanOptions& opts = {});

// Verdict for a scanned sequence of magnitudes against a baseline value:
//   "blow-up"      strictly increasing and reaching 1000x the baseline,
//   "bounded"      max over the last quarter <= 1.05x the mid-run max,
//   "inconclusive" anything else (including a single-point scan).
// Comparisons run on log10 magnitudes, so overflowed values participate.
std::string scan_verdict(const std::vector<report::Mag>& values, double baseline);

}  // namespace tracelab::trace
