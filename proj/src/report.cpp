#include "tracelab/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tracelab::report {

Mag Mag::from_value(double v) {
  if (std::isnan(v) || v < 0.0)
    throw std::invalid_argument("Mag: quantity must be a nonnegative number");
  Mag m;
  m.value = v;
  m.exponent10 = std::log10(v);  // -inf at 0, +inf only if v already infinite
  return m;
}

Mag Mag::from_log10(double e10) {
  if (std::isnan(e10)) throw std::invalid_argument("Mag: log10 magnitude must not be NaN");
  Mag m;
  m.exponent10 = e10;
  // 10^e10 in double range iff e10 < log10(DBL_MAX) ~ 308.2547
  m.value = e10 < 308.25 ? std::pow(10.0, e10) : std::numeric_limits<double>::infinity();
  return m;
}

bool Mag::overflowed() const { return std::isinf(value) && std::isfinite(exponent10); }

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_big(const Mag& m) {
  if (std::isfinite(m.value) || !std::isfinite(m.exponent10)) return fmt_g17(m.value);
  double e = std::floor(m.exponent10);
  double mantissa = std::pow(10.0, m.exponent10 - e);
  if (mantissa >= 10.0) {  // rounding pushed it over a decade
    mantissa /= 10.0;
    e += 1.0;
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10ge+%.0f", mantissa, e);
  return buf;
}

void write_scan_csv(std::ostream& out, const ScanReport& report) {
  out << "param,trace_integral,grad_norm,mean,exponent_max";
  for (const auto& name : report.extra_names) out << ',' << name;
  out << '\n';
  for (const auto& row : report.rows) {
    if (row.extras.size() != report.extra_names.size())
      throw std::invalid_argument("write_scan_csv: row extras do not match extra_names");
    out << fmt_g17(row.param) << ',' << format_big(row.value) << ',' << fmt_g17(row.grad_norm)
        << ',' << fmt_g17(row.mean) << ',' << fmt_g17(row.exponent_max);
    for (const auto& x : row.extras) out << ',' << format_big(x);
    out << '\n';
  }
}

std::string plot_script(const std::vector<PlotSpec>& plots) {
  std::ostringstream out;
  out << "# gnuplot script (generated)\n";
  out << "set datafile separator ','\n";
  out << "set key left top\n";
  out << "set grid\n";
  bool first = true;
  for (const auto& plot : plots) {
    if (!first) out << "\npause -1 'press enter for the next plot'\n";
    first = false;
    out << "\nset title '" << plot.title << "'\n";
    out << "set xlabel '" << plot.x_label << "'\n";
    out << "set ylabel '" << plot.y_label << "'\n";
    out << (plot.log_x ? "set logscale x\n" : "unset logscale x\n");
    out << (plot.log_y ? "set logscale y\n" : "unset logscale y\n");
    if (plot.series.empty()) {
      // axes only: an empty range sketch keeps the script runnable
      out << "set xrange [0:1]\nset yrange [0:1]\nplot NaN notitle\n";
      continue;
    }
    out << "plot ";
    for (std::size_t k = 0; k < plot.series.size(); ++k) {
      const auto& s = plot.series[k];
      if (k) out << ", \\\n     ";
      out << "'" << plot.csv_file << "' using " << s.x_column << ":" << s.y_column
          << " with linespoints title '" << s.title << "'";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace tracelab::report
