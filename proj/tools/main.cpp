// tracelab — numerical experiments around an exponential boundary-trace
// functional: a p-Laplacian torsion solver, concentration-profile scans,
// Beurling-family diagnostics on the unit disk, and structured reports.
#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>

#include "tracelab/runner.hpp"

namespace {

using tracelab::runner::RunConfig;

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--out-dir", cfg.out_dir, "output directory for envelope/CSV/plot files")
      ->envname("TRACELAB_OUT_DIR")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "seed for the randomized spot checks")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for an exponential boundary-trace functional"};
  app.require_subcommand(1);

  RunConfig cfg;

  auto* solve = app.add_subcommand("solve-torsion",
                                   "minimize the boundary-driven p-energy and compare the "
                                   "gradient profile with the radial closed form");
  solve->add_option("--domain", cfg.domain, "disk | half-disk | graded | mesh file")
      ->capture_default_str();
  solve->add_option("--p", cfg.p, "energy exponent (> 1)")->capture_default_str();
  solve->add_option("--refine", cfg.refine, "mesh refinement level")->capture_default_str();
  solve->add_option("--tol", cfg.tol, "stopping tolerance (0 = default)");
  add_common(solve, cfg);

  auto* verify = app.add_subcommand("verify-el",
                                    "certify the first-order conditions of the computed "
                                    "minimizer: nodal residual and boundary flux");
  verify->add_option("--domain", cfg.domain, "disk | half-disk | graded | mesh file")
      ->capture_default_str();
  verify->add_option("--p", cfg.p, "energy exponent (> 1)")->capture_default_str();
  verify->add_option("--refine", cfg.refine, "mesh refinement level")->capture_default_str();
  verify->add_option("--tol", cfg.tol, "stopping tolerance (0 = default)");
  add_common(verify, cfg);

  auto* mnorm = app.add_subcommand("moser-norm",
                                   "measure the concentration profile's gradient norm "
                                   "against its closed form");
  mnorm->add_option("--r", cfg.r_values, "plateau radii, comma separated")
      ->required()
      ->delimiter(',');
  mnorm->add_option("--refine", cfg.refine, "mesh refinement level")->capture_default_str();
  mnorm->add_option("--domain", cfg.domain, "graded (default) | half-disk");
  add_common(mnorm, cfg);

  auto* sharp = app.add_subcommand("sharpness",
                                   "scan the boundary functional along the normalized "
                                   "concentration family (mesh for n=2, radial model otherwise)");
  sharp->add_option("--n", cfg.n, "dimension (2 = mesh scan, >= 3 = radial model)")
      ->capture_default_str();
  sharp->add_option("--alpha", cfg.alpha, "exponent coefficient (absolute)");
  sharp->add_option("--alpha-mult", cfg.alpha_mult,
                    "exponent coefficient as a multiple of the trace threshold");
  sharp->add_option("--r", cfg.r_values, "plateau radii, comma separated")
      ->required()
      ->delimiter(',');
  sharp->add_option("--refine", cfg.refine, "mesh refinement level (n = 2 only)")
      ->capture_default_str();
  sharp->add_option("--domain", cfg.domain, "graded (default) | half-disk (n = 2 only)");
  add_common(sharp, cfg);

  auto* tscan = app.add_subcommand("trace-scan",
                                   "boundedness scan of the boundary functional over the "
                                   "concentration family, with optional conjugate-split column");
  tscan->add_option("--alpha", cfg.alpha, "exponent coefficient (absolute)");
  tscan->add_option("--alpha-mult", cfg.alpha_mult,
                    "exponent coefficient as a multiple of the trace threshold");
  tscan->add_option("--r", cfg.r_values, "plateau radii, comma separated")
      ->required()
      ->delimiter(',');
  tscan->add_option("--refine", cfg.refine, "mesh refinement level")->capture_default_str();
  tscan->add_option("--domain", cfg.domain, "graded (default) | half-disk");
  tscan->add_option("--holder-p", cfg.holder_p,
                    "exponent for the conjugate-split diagnostic column (in (1, n); 0 = off)");
  add_common(tscan, cfg);

  auto* beur = app.add_subcommand("beurling",
                                  "extremal-family diagnostics on the unit circle: Dirichlet "
                                  "norm, level sets, boundary samples");
  beur->add_option("--a", cfg.a_values, "family parameters in (0, 1), comma separated")
      ->required()
      ->delimiter(',');
  beur->add_option("--m", cfg.m, "boundary sample count (power of two >= 16)")
      ->capture_default_str();
  beur->add_option("--terms", cfg.terms, "Dirichlet series length (0 = automatic)");
  beur->add_flag("--check-norm", cfg.check_norm, "verify the squared Dirichlet norm");
  beur->add_option("--level-sets", cfg.s_values, "level thresholds, comma separated")
      ->delimiter(',');
  beur->add_flag("--export-boundary", cfg.export_boundary,
                 "write theta,value_re,value_im tables");
  add_common(beur, cfg);

  auto* cm = app.add_subcommand("cm-scan",
                                "exponential boundary integral of the extremal family "
                                "across parameters and interior points");
  cm->add_option("--a", cfg.a_values, "family parameters in (0, 1), comma separated")
      ->required()
      ->delimiter(',');
  cm->add_option("--alpha", cfg.alpha, "exponent coefficient")->required();
  cm->add_option("--m", cfg.m, "boundary sample count (power of two >= 16)")
      ->capture_default_str();
  cm->add_option("--z-grid", cfg.z_rings,
                 "interior evaluation rings of 8 points each (0 = center only)")
      ->capture_default_str();
  add_common(cm, cfg);

  auto* conv = app.add_subcommand("conversion-check",
                                  "verify the boundary-to-interior divergence identity "
                                  "under mesh refinement");
  conv->add_option("--alpha", cfg.alpha, "exponent coefficient (default 0.1)");
  conv->add_option("--p", cfg.p, "energy exponent of the trace function")
      ->capture_default_str();
  conv->add_option("--refine", cfg.refine, "finest refinement level (runs 2..refine)")
      ->capture_default_str();
  conv->add_option("--tol", cfg.tol, "solver tolerance (0 = default)");
  add_common(conv, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // let CLI11 print the message/help, then collapse its exit codes to 0/1
    return app.exit(e) == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.subcommand = sub->get_name();

  // profile scans default to the graded half-disk when no domain was named
  if (cfg.subcommand == "moser-norm" || cfg.subcommand == "sharpness" ||
      cfg.subcommand == "trace-scan") {
    const CLI::Option* domain_opt = sub->get_option_no_throw("--domain");
    if (domain_opt != nullptr && domain_opt->count() == 0) cfg.domain = "graded";
  }

  try {
    nlohmann::json envelope = tracelab::runner::run(cfg);
    int code = tracelab::runner::exit_code_of(envelope);
    std::cout << "wrote " << cfg.out_dir << "/envelope.json";
    if (envelope.contains("verdicts") && !envelope["verdicts"].empty()) {
      std::cout << "  verdicts:";
      for (const auto& [key, value] : envelope["verdicts"].items())
        std::cout << ' ' << key << '=' << value.get<std::string>();
    }
    std::cout << '\n';
    return code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 2;
  }
}
