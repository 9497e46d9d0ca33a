// Experiment orchestration shared by the command-line tool and the test
// harness: builds the requested domain, runs one named experiment, writes a
// JSON envelope, CSV tables and a gnuplot script into an output directory,
// and returns the envelope for programmatic use.
#pragma once

#include <json.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tracelab::runner {

// A configuration error detected before or while interpreting the request
// (unknown domain, missing alpha, values out of range).  The message names
// the offending field; the CLI turns it into a usage error (exit 1).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string subcommand;
  // disk | half-disk | graded (half-disk graded toward the origin) |
  // a path to a mesh file in the plain-text exchange format
  std::string domain = "disk";
  double p = 2.0;
  int n = 2;
  double alpha = -1.0;       // absolute exponent coefficient; < 0 = unset
  double alpha_mult = -1.0;  // multiple of the trace threshold; < 0 = unset
  int refine = 4;
  std::vector<double> r_values;  // profile radii (moser-norm, sharpness, trace-scan)
  std::vector<double> a_values;  // family parameters (beurling, cm-scan)
  std::vector<double> s_values;  // level-set thresholds (beurling)
  std::size_t m = 1u << 16;      // boundary sample count
  int terms = 0;                 // Dirichlet series length; 0 = automatic
  double tol = 0.0;              // solver tolerance; 0 = default
  double holder_p = 0.0;         // conjugate-split diagnostic exponent; 0 = off
  int z_rings = 0;               // interior evaluation rings (0 = center only)
  bool check_norm = false;       // beurling: verify the Dirichlet norm
  bool export_boundary = false;  // beurling: write theta,value_re,value_im tables
  std::string out_dir = "tracelab-out";
  unsigned seed = 12345;         // drives the randomized spot checks; echoed back
};

// Executes cfg.subcommand (one of solve-torsion, verify-el, moser-norm,
// sharpness, trace-scan, beurling, cm-scan, conversion-check) and writes
// envelope.json, the experiment's CSV tables, and plot.gp under
// cfg.out_dir.  Identical configurations produce byte-identical CSVs.
//
// Throws UsageError (or std::invalid_argument from the numeric layers) on
// bad requests.  A numeric failure mid-run is captured instead: the
// envelope gains verdict "fail" plus diagnostics and is still written.
nlohmann::json run(const RunConfig& cfg);

// 0 when every verdict is one of pass/bounded/blow-up/inconclusive,
// 2 when any verdict is "fail" (numeric failure).
int exit_code_of(const nlohmann::json& envelope);

}  // namespace tracelab::runner
