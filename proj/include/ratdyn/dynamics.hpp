#pragma once

// Map evaluation, orbits, boundedness envelopes and limit classification.

#include "ratdyn/params.hpp"

#include <cstddef>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ratdyn {

/// Raised when a state leaves the domain of the map. `index` is the orbit
/// index n of the value that could not be computed (-1 when not in a run).
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, long long index) : std::domain_error(what), index_(index) {}
  long long index() const { return index_; }

 private:
  long long index_;
};

/// f(x, y) = (r + p x + y) / (q x + y) with x = y_n, y = y_{n-1}.
double step(const NormParams& norm, double x, double y);

/// The six-parameter map with x = x_n, y = x_{n-1}.
double step33(const Params33& params, double x, double y);

struct OrbitOptions {
  /// Samples kept from the start of the orbit.
  std::size_t cap = 1'000'000;
  /// Samples kept from the end once the cap is exceeded.
  std::size_t tail = 128;
};

/// Values x_{-1}, x_0, x_1, ..., x_n. Beyond the cap only the head and a
/// tail of the most recent values are retained.
class Orbit {
 public:
  Orbit() = default;
  Orbit(NormParams norm, OrbitOptions opts);

  const NormParams& norm() const { return norm_; }
  std::pair<double, double> x_init() const { return {x_init_[0], x_init_[1]}; }
  /// Number of iterations performed (n).
  std::size_t n_steps() const { return length_ < 2 ? 0 : length_ - 2; }
  /// Number of values, n + 2.
  std::size_t length() const { return length_; }

  /// Retained prefix, starting at x_{-1}.
  const std::vector<double>& samples() const { return head_; }
  /// Whether every value is retained.
  bool complete() const { return length_ == head_.size(); }
  /// Value at position i (0 is x_{-1}); throws std::out_of_range for
  /// positions no longer retained.
  double at(std::size_t i) const;
  /// The last `count` values (fewer if not available).
  std::vector<double> last(std::size_t count) const;

  void push(double v);

 private:
  NormParams norm_;
  OrbitOptions opts_;
  double x_init_[2] = {0, 0};
  std::vector<double> head_;
  std::deque<double> tail_;
  std::size_t length_ = 0;
};

/// n iterations from (x_{-1}, x_0). Throws DomainError on a nonpositive
/// denominator or an initial value outside the state space.
Orbit simulate(const NormParams& norm, double x_minus1, double x_0, std::size_t n, OrbitOptions opts = {});

/// Orbit of the six-parameter equation, fully retained.
std::vector<double> simulate33(const Params33& params, double x_minus1, double x_0, std::size_t n);

struct Envelope {
  double lo = 0;
  double hi = 0;
  bool contains(double x, double slack = 0) const { return x >= lo - slack && x <= hi + slack; }
};

/// Every orbit of the 3-2 form has x_n >= lo for n >= 1 and x_n <= hi for
/// n >= 3; f maps [lo, hi]^2 into itself. The L-form with r < 0 needs
/// `origin`.
Envelope envelope(const NormParams& norm);

enum class LimitKind { Equilibrium, PeriodTwo, Undetermined };

struct LimitClass {
  LimitKind kind = LimitKind::Undetermined;
  double lo = 0, hi = 0;  // the two values for PeriodTwo
  /// Orbit position where the qualifying run of values begins.
  std::size_t witness_index = 0;
  double residual = 0;
};

struct ClassifyOptions {
  double tol = 1e-9;
  std::size_t window = 64;
};

/// Looks at the final `window` values; PeriodTwo also needs the pair to
/// be stationary over the retained 2 * window history. Requires window >= 4
/// and length > window + 2,
/// otherwise Undetermined.
LimitClass classify_limit(const Orbit& orbit, ClassifyOptions opts = {});

/// Iterates until the tail classifies (checked every window steps) or
/// max_steps is reached. Only a short tail is retained.
std::pair<Orbit, LimitClass> simulate_until_classified(const NormParams& norm, double x_minus1, double x_0,
                                                       std::size_t max_steps, ClassifyOptions opts = {});

enum class Trend { Increasing, Decreasing, Mixed };

struct TrendReport {
  Trend even = Trend::Mixed;
  Trend odd = Trend::Mixed;
};

/// Monotonicity of even- and odd-indexed terms after `burn_in` positions
/// (constant counts as Increasing). Requires at least 6 values after the
/// burn-in; the burn-in shrinks for shorter orbits.
TrendReport subsequence_trend(const Orbit& orbit, std::size_t burn_in = 1000);

const char* to_string(LimitKind kind);
const char* to_string(Trend trend);

void to_json(nlohmann::json& j, const Envelope& v);
void to_json(nlohmann::json& j, const LimitClass& v);

}  // namespace ratdyn
