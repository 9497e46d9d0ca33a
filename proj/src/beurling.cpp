#include "tracelab/beurling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tracelab::disk {

using report::Mag;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogSwitch = 700.0;

void check_a(double a, const char* who) {
  if (!(a > 0.0) || !(a < 1.0))
    throw std::invalid_argument(std::string(who) + ": parameter a must lie in (0, 1)");
}

}  // namespace

void validate(const BoundaryFunction1D& f) {
  std::size_t m = f.m();
  if (m < 16 || (m & (m - 1)) != 0)
    throw std::invalid_argument("BoundaryFunction1D: sample count must be a power of two >= 16");
  for (std::size_t j = 0; j < m; ++j)
    if (!std::isfinite(f.value[j].real()) || !std::isfinite(f.value[j].imag()))
      throw std::invalid_argument("BoundaryFunction1D: non-finite sample at index " +
                                  std::to_string(j));
}

void validate(const DiskPoint& z) {
  if (!(std::hypot(z.re, z.im) <= 1.0 - 1e-9))
    throw std::invalid_argument("DiskPoint: |z| must be at most 1 - 1e-9");
}

BoundaryFunction1D beurling_boundary(double a, std::size_t m) {
  check_a(a, "beurling_boundary");
  BoundaryFunction1D f;
  f.value.resize(m);
  const double scale = 1.0 / std::sqrt(std::log(1.0 / (1.0 - a * a)));
  for (std::size_t j = 0; j < m; ++j) {
    double theta = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(m);
    // |1 - a e^{i theta}|^2 = (1-a)^2 + 4a sin^2(theta/2), stable as a -> 1
    double sh = std::sin(0.5 * theta);
    double mod2 = (1.0 - a) * (1.0 - a) + 4.0 * a * sh * sh;
    double re = -0.5 * std::log(mod2);
    double im = std::atan2(a * std::sin(theta), 1.0 - a * std::cos(theta));
    f.value[j] = std::complex<double>(scale * re, scale * im);
  }
  validate(f);
  return f;
}

int beurling_terms_needed(double a) {
  check_a(a, "beurling_terms_needed");
  // Tail of sum a^{2k}/k past k = M is below a^{2(M+1)} / ((M+1)(1-a^2));
  // find the smallest M keeping it under 1e-14 of the full sum log(1/(1-a^2)).
  const double a2 = a * a;
  const double target = 1e-14 * std::log(1.0 / (1.0 - a2));
  double tail_num = a2;  // a^{2(M+1)} for the M under test
  for (int m = 1; m < 100000000; ++m) {
    tail_num *= a2;
    if (tail_num / ((m + 1) * (1.0 - a2)) <= target) return m;
  }
  throw std::runtime_error("beurling_terms_needed: a too close to 1 for double precision");
}

double beurling_dirichlet_norm_sq(double a, int terms) {
  check_a(a, "beurling_dirichlet_norm_sq");
  const int needed = beurling_terms_needed(a);
  if (terms == 0) terms = needed;
  if (terms < needed)
    throw std::invalid_argument("beurling_dirichlet_norm_sq: " + std::to_string(terms) +
                                " terms give less than 1e-14 relative accuracy at a = " +
                                std::to_string(a) + "; need at least " + std::to_string(needed));
  // smallest terms first so the partial sums do not swamp them
  const double a2 = a * a;
  double sum = 0.0;
  for (int k = terms; k >= 1; --k) sum += std::pow(a2, k) / k;
  return kPi * sum / std::log(1.0 / (1.0 - a2));
}

double level_set_measure(const BoundaryFunction1D& f, double s) {
  validate(f);
  if (!(s >= 0.0)) throw std::invalid_argument("level_set_measure: level must be >= 0");
  std::size_t count = 0;
  for (const auto& v : f.value)
    if (std::abs(v) >= s) ++count;
  return 2.0 * kPi * static_cast<double>(count) / static_cast<double>(f.m());
}

double poisson_kernel(const DiskPoint& z, double theta) {
  validate(z);
  double dx = std::cos(theta) - z.re;
  double dy = std::sin(theta) - z.im;
  return (1.0 - (z.re * z.re + z.im * z.im)) / (dx * dx + dy * dy);
}

std::complex<double> poisson_extend(const BoundaryFunction1D& f, const DiskPoint& z) {
  validate(f);
  validate(z);
  const std::size_t m = f.m();
  std::complex<double> acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double theta = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(m);
    acc += f.value[j] * poisson_kernel(z, theta);
  }
  return acc / static_cast<double>(m);
}

Mag cm_integral_detailed(const BoundaryFunction1D& f, double alpha, const DiskPoint& z) {
  validate(f);
  validate(z);
  if (!(alpha >= 0.0)) throw std::invalid_argument("cm_integral: alpha must be >= 0");
  const std::size_t m = f.m();
  const std::complex<double> fz = poisson_extend(f, z);

  double expo_max = 0.0;
  std::vector<double> ln_terms(m);
  double direct = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double theta = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(m);
    double expo = alpha * std::norm(f.value[j] - fz);
    expo_max = std::max(expo_max, expo);
    double kernel = poisson_kernel(z, theta);
    ln_terms[j] = expo + std::log(kernel) - std::log(static_cast<double>(m));
    direct += std::exp(std::min(expo, kLogSwitch)) * kernel / static_cast<double>(m);
  }
  if (expo_max <= kLogSwitch) return Mag::from_value(direct);

  double peak = -std::numeric_limits<double>::infinity();
  for (double t : ln_terms) peak = std::max(peak, t);
  double acc = 0.0;
  for (double t : ln_terms) acc += std::exp(t - peak);
  return Mag::from_log10((peak + std::log(acc)) / std::numbers::ln10);
}

double cm_integral(const BoundaryFunction1D& f, double alpha, const DiskPoint& z) {
  return cm_integral_detailed(f, alpha, z).value;
}

}  // namespace tracelab::disk
