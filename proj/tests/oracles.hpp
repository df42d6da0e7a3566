#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library code it is compared against.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>

#include <sys/wait.h>

namespace oracle {

inline double f(double p, double q, double r, double x, double y) { return (r + p * x + y) / (q * x + y); }

/// Positive root of (q+1)x^2 - (p+1)x - r by bisection.
inline double equilibrium_bisect(double p, double q, double r) {
  auto g = [&](double x) { return (q + 1) * x * x - (p + 1) * x - r; };
  double lo = 0, hi = 1;
  while (g(hi) < 0) hi *= 2;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Spectral radius of the Jacobian [[D1 f, D2 f], [1, 0]] at (ybar, ybar)
/// with central differences.
inline double jacobian_spectral_radius(double p, double q, double r, double ybar) {
  const double h = 1e-6 * std::max(1.0, ybar);
  const double d1 = (f(p, q, r, ybar + h, ybar) - f(p, q, r, ybar - h, ybar)) / (2 * h);
  const double d2 = (f(p, q, r, ybar, ybar + h) - f(p, q, r, ybar, ybar - h)) / (2 * h);
  // lambda^2 - d1 lambda - d2 = 0
  const std::complex<double> disc = std::sqrt(std::complex<double>(d1 * d1 + 4 * d2, 0));
  const auto l1 = (d1 + disc) / 2.0, l2 = (d1 - disc) / 2.0;
  return std::max(std::abs(l1), std::abs(l2));
}

/// Min and max of f on an n x n grid over [m, M]^2.
inline std::pair<double, double> grid_extrema(double p, double q, double r, double m, double M, int n = 200) {
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = m + (M - m) * i / (n - 1), y = m + (M - m) * j / (n - 1);
      const double v = f(p, q, r, x, y);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  return {lo, hi};
}

/// Central-difference partial derivative signs of f at (x, y).
inline std::pair<double, double> partials(double p, double q, double r, double x, double y) {
  const double h = 1e-7 * std::max(1.0, std::max(x, y));
  return {(f(p, q, r, x + h, y) - f(p, q, r, x - h, y)) / (2 * h),
          (f(p, q, r, x, y + h) - f(p, q, r, x, y - h)) / (2 * h)};
}

/// Small deterministic generator for test inputs (xorshift64*).
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : s_(seed ? seed : 1) {}
  std::uint64_t next() {
    s_ ^= s_ >> 12;
    s_ ^= s_ << 25;
    s_ ^= s_ >> 27;
    return s_ * 0x2545F4914F6CDD1DULL;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

 private:
  std::uint64_t s_;
};

/// Runs a shell command and captures stdout and the exit status.
inline std::pair<int, std::string> run(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, out};
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace oracle
