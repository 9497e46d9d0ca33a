// Reporting primitives (overflow-safe magnitudes, deterministic CSV, plot
// scripts) and the envelope contract of the experiment runner.
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tracelab/report.hpp"
#include "tracelab/runner.hpp"

using namespace tracelab::report;

TEST_CASE("g17 formatting round-trips doubles exactly") {
  for (double v : {3.141592653589793, 0.1, 6.86e-6, 1e-300, 1.7976931348623157e308,
                   -2.2250738585072014e-308}) {
    std::string s = fmt_g17(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
    CHECK(fmt_g17(v) == s);  // same input, same bytes
  }
}

TEST_CASE("overflow-safe magnitudes") {
  SUBCASE("from_value keeps both scales consistent") {
    auto m = Mag::from_value(1e10);
    CHECK(m.value == 1e10);
    CHECK(m.exponent10 == doctest::Approx(10.0).epsilon(1e-14));
    CHECK_FALSE(m.overflowed());
  }

  SUBCASE("exact zero has log10 minus infinity") {
    auto z = Mag::from_value(0.0);
    CHECK(z.value == 0.0);
    CHECK(std::isinf(z.exponent10));
    CHECK(z.exponent10 < 0.0);
    CHECK_FALSE(z.overflowed());
  }

  SUBCASE("from_log10 reconstructs representable values") {
    auto m = Mag::from_log10(123.456);
    CHECK_FALSE(m.overflowed());
    CHECK(m.value == doctest::Approx(std::pow(10.0, 123.456)).epsilon(1e-12));
    CHECK(Mag::from_value(m.value).exponent10 == doctest::Approx(123.456).epsilon(1e-12));
  }

  SUBCASE("past double range the linear value saturates") {
    auto m = Mag::from_log10(400.0);
    CHECK(m.overflowed());
    CHECK(std::isinf(m.value));
    CHECK(m.exponent10 == 400.0);
  }

  SUBCASE("format_big uses the linear form while it can") {
    CHECK(format_big(Mag::from_value(2.5)) == fmt_g17(2.5));
  }

  SUBCASE("format_big builds a decimal from the log10 magnitude") {
    std::string s = format_big(Mag::from_log10(5000.5));
    // 10^0.5 = 3.1622...
    CHECK(s.substr(0, 4) == "3.16");
    CHECK(s.find("e+5000") != std::string::npos);
  }
}

TEST_CASE("scan tables") {
  ScanReport rep;
  rep.extra_names = {"lower_bound"};
  ScanRow row;
  row.param = 0.01;
  row.value = Mag::from_value(42.0);
  row.grad_norm = 1.0;
  row.mean = 0.0;
  row.exponent_max = 3.0;
  row.extras = {Mag::from_value(7.0)};
  rep.rows.push_back(row);
  row.param = 0.001;
  rep.rows.push_back(row);

  SUBCASE("header names the extra columns after the fixed ones") {
    std::ostringstream out;
    write_scan_csv(out, rep);
    std::istringstream in(out.str());
    std::string header, line1, line2, rest;
    REQUIRE(std::getline(in, header));
    CHECK(header == "param,trace_integral,grad_norm,mean,exponent_max,lower_bound");
    REQUIRE(std::getline(in, line1));
    REQUIRE(std::getline(in, line2));
    CHECK_FALSE(std::getline(in, rest));  // exactly one line per row
    CHECK(line1.rfind("0.01,42,", 0) == 0);
  }

  SUBCASE("rows must match the declared extras") {
    rep.rows[1].extras.clear();
    std::ostringstream out;
    CHECK_THROWS_AS(write_scan_csv(out, rep), std::invalid_argument);
  }
}

TEST_CASE("plot scripts are self-contained gnuplot") {
  PlotSpec with_data;
  with_data.csv_file = "scan.csv";
  with_data.title = "scan";
  with_data.log_y = true;
  with_data.series = {{1, 2, "value"}};
  PlotSpec axes_only;
  axes_only.csv_file = "other.csv";
  axes_only.title = "empty";

  std::string script = plot_script({with_data, axes_only});
  CHECK(script.find("set datafile separator ','") != std::string::npos);
  CHECK(script.find("'scan.csv'") != std::string::npos);
  CHECK(script.find("using 1:2") != std::string::npos);
  CHECK(script.find("set logscale y") != std::string::npos);
  CHECK(script.find("plot NaN notitle") != std::string::npos);  // the empty plot stays valid
  CHECK(script.find("pause -1") != std::string::npos);          // plots shown one at a time
}

TEST_CASE("runner writes a complete envelope") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "tracelab-envelope-test";
  fs::remove_all(dir);

  tracelab::runner::RunConfig cfg;
  cfg.subcommand = "beurling";
  cfg.a_values = {0.5};
  cfg.check_norm = true;
  cfg.out_dir = dir.string();
  auto envelope = tracelab::runner::run(cfg);

  SUBCASE("envelope carries version, echoed config, results, verdicts, timings") {
    CHECK(envelope.at("version") == "0.1.0");
    CHECK(envelope.at("config").at("subcommand") == "beurling");
    CHECK(envelope.at("config").at("seed") == 12345u);
    CHECK(envelope.at("results").is_array());
    CHECK(envelope.at("results").size() >= 1);
    CHECK(envelope.at("verdicts").at("norms") == "pass");
    CHECK(envelope.at("timings").is_object());
    CHECK(tracelab::runner::exit_code_of(envelope) == 0);
  }

  SUBCASE("the artifacts land on disk") {
    CHECK(fs::exists(dir / "envelope.json"));
    CHECK(fs::exists(dir / "beurling_norms.csv"));
    CHECK(fs::exists(dir / "plot.gp"));
  }

  SUBCASE("identical configs produce byte-identical tables") {
    tracelab::runner::RunConfig cfg2 = cfg;
    cfg2.out_dir = (dir / "again").string();
    tracelab::runner::run(cfg2);
    std::ifstream f1(dir / "beurling_norms.csv"), f2(dir / "again" / "beurling_norms.csv");
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    CHECK_FALSE(s1.str().empty());
  }
}

TEST_CASE("runner maps verdicts to exit codes") {
  nlohmann::json ok = {{"verdicts", {{"solve", "pass"}, {"scan", "blow-up"}}}};
  CHECK(tracelab::runner::exit_code_of(ok) == 0);
  nlohmann::json failed = {{"verdicts", {{"solve", "fail"}}}};
  CHECK(tracelab::runner::exit_code_of(failed) == 2);
}

TEST_CASE("runner rejects malformed requests before running") {
  tracelab::runner::RunConfig cfg;
  cfg.subcommand = "does-not-exist";
  cfg.out_dir = (std::filesystem::temp_directory_path() / "tracelab-reject-test").string();
  CHECK_THROWS_AS(tracelab::runner::run(cfg), tracelab::runner::UsageError);

  cfg.subcommand = "sharpness";  // needs radii
  cfg.r_values.clear();
  CHECK_THROWS_AS(tracelab::runner::run(cfg), tracelab::runner::UsageError);
}
