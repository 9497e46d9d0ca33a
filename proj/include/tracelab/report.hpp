// Tabular scan reports, overflow-safe magnitudes, and the text artifacts
// (CSV tables, gnuplot scripts) the experiments emit.
#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace tracelab::report {

// A nonnegative quantity tracked in both linear and log10 scale so that
// values past the double-precision exponent range stay comparable: `value`
// saturates to +inf once the linear scale overflows, while `exponent10`
// remains the authoritative finite magnitude.
struct Mag {
  double value = 0.0;
  double exponent10 = 0.0;  // log10 of the quantity; -inf for an exact zero

  static Mag from_value(double v);
  static Mag from_log10(double e10);
  bool overflowed() const;
};

// %.17g — enough digits to round-trip a double, so repeated runs can be
// compared byte-for-byte.
std::string fmt_g17(double v);

// The linear value when it is representable, otherwise a decimal built from
// the log10 magnitude (e.g. "3.1622776601e+5000").
std::string format_big(const Mag& m);

struct ScanRow {
  double param = 0.0;         // the family parameter (r, a, ...)
  Mag value;                  // the scanned functional
  double grad_norm = 0.0;     // gradient L^n norm of the raw family member
  double mean = 0.0;          // area mean of the raw family member
  double exponent_max = 0.0;  // largest pointwise exponent met by the quadrature
  std::vector<Mag> extras;    // named by ScanReport::extra_names, same order
};

struct ScanReport {
  std::vector<std::string> extra_names;
  std::vector<ScanRow> rows;
  std::string verdict;                     // bounded | blow-up | inconclusive
  std::map<std::string, double> summary;   // named scalars (slopes, ratios, ...)
};

// Header `param,trace_integral,grad_norm,mean,exponent_max[,<extras>...]`,
// one row per scan point, every number via fmt_g17/format_big.
void write_scan_csv(std::ostream& out, const ScanReport& report);

// One curve in a plot: 1-based CSV column indices and a legend title.
struct PlotSeries {
  int x_column = 1;
  int y_column = 2;
  std::string title;
};

struct PlotSpec {
  std::string csv_file;  // path the script will reference (relative to itself)
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<PlotSeries> series;  // empty draws labeled axes only
};

// A gnuplot script drawing the given plots one after another.  Always valid
// gnuplot even when every series list is empty.
std::string plot_script(const std::vector<PlotSpec>& plots);

}  // namespace tracelab::report
