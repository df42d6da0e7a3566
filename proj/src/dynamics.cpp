#include "ratdyn/dynamics.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

namespace ratdyn {

double step(const NormParams& n, double x, double y) {
  const double den = n.q * x + y;
  if (!(den > 0)) throw DomainError("step: nonpositive denominator", -1);
  return (n.r + n.p * x + y) / den;
}

double step33(const Params33& v, double x, double y) {
  const double den = v.A + v.B * x + v.C * y;
  if (!(den > 0)) throw DomainError("step33: nonpositive denominator", -1);
  return (v.alpha + v.beta * x + v.gamma * y) / den;
}

Orbit::Orbit(NormParams norm, OrbitOptions opts) : norm_(std::move(norm)), opts_(opts) {}

void Orbit::push(double v) {
  if (length_ < 2) x_init_[length_] = v;
  if (head_.size() < opts_.cap) {
    head_.push_back(v);
  } else {
    tail_.push_back(v);
    if (tail_.size() > opts_.tail) tail_.pop_front();
  }
  ++length_;
}

double Orbit::at(std::size_t i) const {
  if (i < head_.size()) return head_[i];
  if (i < length_ && i >= length_ - tail_.size()) return tail_[i - (length_ - tail_.size())];
  throw std::out_of_range("Orbit::at: value not retained");
}

std::vector<double> Orbit::last(std::size_t count) const {
  count = std::min(count, length_);
  std::vector<double> out;
  out.reserve(count);
  std::size_t i = length_ - count;
  // Skip positions dropped between head and tail.
  const std::size_t first_tail = length_ - tail_.size();
  if (i >= head_.size() && i < first_tail) i = first_tail;
  for (; i < length_; ++i) out.push_back(at(i));
  return out;
}

namespace {

bool in_state_space(const NormParams& n, double x) {
  if (!std::isfinite(x)) return false;
  return n.form == Form::ThreeTwo ? x > 0 : x >= n.L;
}

}  // namespace

Orbit simulate(const NormParams& norm, double x_minus1, double x_0, std::size_t n, OrbitOptions opts) {
  if (!in_state_space(norm, x_minus1)) throw DomainError("simulate: x_{-1} outside the state space", -1);
  if (!in_state_space(norm, x_0)) throw DomainError("simulate: x_0 outside the state space", 0);
  Orbit orbit(norm, opts);
  orbit.push(x_minus1);
  orbit.push(x_0);
  double prev = x_minus1, cur = x_0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double den = norm.q * cur + prev;
    if (!(den > 0)) throw DomainError("simulate: nonpositive denominator at x_" + std::to_string(k), static_cast<long long>(k));
    const double next = (norm.r + norm.p * cur + prev) / den;
    orbit.push(next);
    prev = cur;
    cur = next;
  }
  return orbit;
}

std::vector<double> simulate33(const Params33& params, double x_minus1, double x_0, std::size_t n) {
  std::vector<double> xs{x_minus1, x_0};
  xs.reserve(n + 2);
  for (std::size_t k = 1; k <= n; ++k) {
    try {
      xs.push_back(step33(params, xs[k], xs[k - 1]));
    } catch (const DomainError& e) {
      throw DomainError(e.what(), static_cast<long long>(k));
    }
  }
  return xs;
}

Envelope envelope(const NormParams& n) {
  // With r >= 0 the L-form is the 3-2 map restricted to [L, inf).
  if (n.form == Form::ThreeTwo || (!n.origin && n.r >= 0)) {
    const double lo = std::min(n.p / n.q, 1.0);
    const double hi = std::max({n.p / n.q, 1.0, (n.r + (n.p + 1) * lo) / ((n.q + 1) * lo)});
    return {lo, hi};
  }
  if (!n.origin) throw std::invalid_argument("envelope: the L-form with r < 0 needs its originating parameters");
  const Params33& v = *n.origin;
  const double lo = std::min({v.alpha, v.beta, v.gamma}) / std::max({v.A, v.B, v.C});
  const double hi = std::max({v.alpha, v.beta, v.gamma}) / std::min({v.A, v.B, v.C});
  const double bc = v.B + v.C;
  const AffineMap m{v.gamma / v.C + v.A / bc, -v.A / bc};
  return {m.invert(lo), m.invert(hi)};
}

LimitClass classify_limit(const Orbit& orbit, ClassifyOptions opts) {
  LimitClass out;
  const std::size_t w = opts.window;
  if (w < 4 || orbit.length() <= w + 2) return out;
  const std::vector<double> xs = orbit.last(std::max<std::size_t>(w + 2, 2 * w));
  const std::size_t base = orbit.length() - xs.size();
  const std::size_t n = xs.size();
  const double ybar = orbit.norm().equilibrium;

  auto trailing_run = [&](auto&& holds) {
    std::size_t i = n;
    while (i > 0 && holds(i - 1)) --i;
    return i;
  };

  // Equilibrium: every value in the window within tol of ybar.
  double eq_res = 0;
  for (std::size_t i = n - w; i < n; ++i) eq_res = std::max(eq_res, std::abs(xs[i] - ybar));
  if (eq_res < opts.tol) {
    out.kind = LimitKind::Equilibrium;
    out.residual = eq_res;
    out.witness_index = base + trailing_run([&](std::size_t i) { return std::abs(xs[i] - ybar) < opts.tol; });
    return out;
  }

  // Period two: even and odd positions each constant within tol across the
  // window, and consecutive values separated by more than 10 tol.
  double lo_e = xs[n - w], hi_e = xs[n - w], lo_o = xs[n - w + 1], hi_o = xs[n - w + 1];
  double gap = INFINITY;
  for (std::size_t i = n - w; i < n; ++i) {
    if ((i - (n - w)) % 2 == 0) {
      lo_e = std::min(lo_e, xs[i]);
      hi_e = std::max(hi_e, xs[i]);
    } else {
      lo_o = std::min(lo_o, xs[i]);
      hi_o = std::max(hi_o, xs[i]);
    }
    if (i + 1 < n) gap = std::min(gap, std::abs(xs[i + 1] - xs[i]));
  }
  const double p2_res = std::max(hi_e - lo_e, hi_o - lo_o);
  // A slowly contracting oscillation about ybar also passes the two tests
  // above; a settled cycle does not move across the longer history either.
  double drift = 0;
  for (std::size_t k : {n - 1, n - 2}) {
    std::size_t j = k;
    while (j >= 2) j -= 2;
    drift = std::max(drift, std::abs(xs[k] - xs[j]) - 8 * DBL_EPSILON * std::abs(xs[k]));
  }
  if (p2_res < opts.tol && gap > 10 * opts.tol && drift <= 1e-6 * gap) {
    out.kind = LimitKind::PeriodTwo;
    out.lo = std::min(xs[n - 1], xs[n - 2]);
    out.hi = std::max(xs[n - 1], xs[n - 2]);
    out.residual = p2_res;
    out.witness_index = base + trailing_run([&](std::size_t i) {
                          return i + 2 < n ? std::abs(xs[i + 2] - xs[i]) < opts.tol : true;
                        });
    return out;
  }
  out.residual = std::min(eq_res, p2_res);
  return out;
}

std::pair<Orbit, LimitClass> simulate_until_classified(const NormParams& norm, double x_minus1, double x_0,
                                                       std::size_t max_steps, ClassifyOptions opts) {
  Orbit orbit = simulate(norm, x_minus1, x_0, 0, {0, 2 * opts.window + 2});
  double prev = x_minus1, cur = x_0;
  LimitClass cls;
  for (std::size_t k = 1; k <= max_steps; ++k) {
    const double den = norm.q * cur + prev;
    if (!(den > 0)) throw DomainError("simulate: nonpositive denominator at x_" + std::to_string(k), static_cast<long long>(k));
    const double next = (norm.r + norm.p * cur + prev) / den;
    orbit.push(next);
    prev = cur;
    cur = next;
    if (k % opts.window == 0 || k == max_steps) {
      cls = classify_limit(orbit, opts);
      if (cls.kind != LimitKind::Undetermined) break;
    }
  }
  return {std::move(orbit), cls};
}

TrendReport subsequence_trend(const Orbit& orbit, std::size_t burn_in) {
  std::vector<double> xs;
  std::size_t first = 0;
  if (orbit.complete()) {
    const std::size_t len = orbit.length();
    first = len >= 6 ? std::min(burn_in, len - 6) : 0;
    xs.assign(orbit.samples().begin() + static_cast<std::ptrdiff_t>(first), orbit.samples().end());
  } else {
    xs = orbit.last(orbit.length());
    first = orbit.length() - xs.size();
  }
  auto trend = [&](std::size_t parity) {
    bool inc = true, dec = true;
    std::size_t i = (first % 2 == parity) ? 0 : 1;
    for (; i + 2 < xs.size(); i += 2) {
      if (xs[i + 2] < xs[i]) inc = false;
      if (xs[i + 2] > xs[i]) dec = false;
    }
    return inc ? Trend::Increasing : dec ? Trend::Decreasing : Trend::Mixed;
  };
  // Position 0 holds x_{-1}, so even n sits at odd positions.
  return {trend(1), trend(0)};
}

const char* to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::Equilibrium: return "Equilibrium";
    case LimitKind::PeriodTwo: return "PeriodTwo";
    default: return "Undetermined";
  }
}

const char* to_string(Trend trend) {
  switch (trend) {
    case Trend::Increasing: return "Increasing";
    case Trend::Decreasing: return "Decreasing";
    default: return "Mixed";
  }
}

void to_json(nlohmann::json& j, const Envelope& v) { j = {{"lo", v.lo}, {"hi", v.hi}}; }

void to_json(nlohmann::json& j, const LimitClass& v) {
  j = {{"kind", to_string(v.kind)}, {"witness_index", v.witness_index}, {"residual", v.residual}};
  if (v.kind == LimitKind::PeriodTwo) {
    j["lo"] = v.lo;
    j["hi"] = v.hi;
  }
}

}  // namespace ratdyn
