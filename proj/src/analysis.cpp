#include "ratdyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ratdyn {

namespace {

double f(double p, double q, double r, double x, double y) { return (r + p * x + y) / (q * x + y); }

int sign(double v) { return (v > 0) - (v < 0); }

bool strictly_inside(double k, double m, double M) { return k > m && k < M; }

}  // namespace

std::pair<int, int> partial_signs(double p, double q, double r, double x, double y) {
  if (p == q) throw std::domain_error("partial_signs: p == q");
  if (!(q * x + y > 0)) throw std::domain_error("partial_signs: nonpositive denominator");
  return {sign((p - q) * y - q * r), sign((q - p) * x - r)};
}

CriticalValues critical_values(double p, double q, double r) {
  if (p == q) throw std::domain_error("critical_values: p == q");
  return {q * r / (p - q), -r / (p - q)};
}

MonotonicityCase classify_monotonicity(double p, double q, double r, double m, double M) {
  MonotonicityCase out{Monotonicity::Mixed, m, M};
  int s1, s2;
  if (p == q) {
    s1 = sign(-q * r);
    s2 = sign(-r);
  } else {
    const auto k = critical_values(p, q, r);
    if (strictly_inside(k.K1, m, M) || strictly_inside(k.K2, m, M)) return out;
    const double mid = 0.5 * (m + M);
    // D1 depends only on y, D2 only on x; with K outside (m, M) the sign at
    // the midpoint holds on the whole open square.
    s1 = sign((p - q) * mid - q * r);
    s2 = sign((q - p) * mid - r);
  }
  if (s1 == 0 || s2 == 0) return out;
  if (s1 > 0 && s2 > 0) out.kind = Monotonicity::IncInc;
  if (s1 < 0 && s2 < 0) out.kind = Monotonicity::DecDec;
  if (s1 < 0 && s2 > 0) out.kind = Monotonicity::DecInc;
  if (s1 > 0 && s2 < 0) out.kind = Monotonicity::IncDec;
  return out;
}

Extrema phi_Phi(double p, double q, double r, double m, double M) {
  if (!(m <= M)) throw std::invalid_argument("phi_Phi: m > M");
  if (!(q * m + m > 0)) throw std::invalid_argument("phi_Phi: nonpositive denominator on the square");
  std::vector<double> xs{m, M}, ys{m, M};
  if (p != q) {
    const auto k = critical_values(p, q, r);
    if (k.K1 >= m && k.K1 <= M) ys.push_back(k.K1);
    if (k.K2 >= m && k.K2 <= M) xs.push_back(k.K2);
  }
  Extrema e;
  e.phi = INFINITY;
  e.Phi = -INFINITY;
  auto visit = [&](double x, double y) {
    const double v = f(p, q, r, x, y);
    if (v < e.phi) e.phi = v, e.argmin = {x, y};
    if (v > e.Phi) e.Phi = v, e.argmax = {x, y};
  };
  for (double x : {m, M})
    for (double y : ys) visit(x, y);
  for (double x : xs)
    for (double y : {m, M}) visit(x, y);
  return e;
}

IntervalNest refine_invariant_interval(const NormParams& norm, double tol, std::size_t max_iter) {
  IntervalNest nest;
  const Envelope env = envelope(norm);
  double m = env.lo, M = env.hi;
  nest.levels.emplace_back(m, M);
  for (std::size_t it = 0;; ++it) {
    if (M - m < tol) {
      nest.outcome = NestOutcome::CollapsedToEquilibrium;
      return nest;
    }
    if (norm.p != norm.q) {
      const auto c = classify_monotonicity(norm.p, norm.q, norm.r, m, M);
      if (c.kind != Monotonicity::Mixed) {
        nest.outcome = NestOutcome::MonotonicWindow;
        nest.window = c.kind;
        return nest;
      }
    }
    if (it == max_iter) break;
    const Extrema e = phi_Phi(norm.p, norm.q, norm.r, m, M);
    // phi >= m and Phi <= M hold exactly; max/min only absorb rounding.
    const double m1 = std::max(m, e.phi), M1 = std::min(M, e.Phi);
    const bool stalled = m1 <= m && M1 >= M;
    m = m1;
    M = M1;
    nest.levels.emplace_back(m, M);
    if (stalled) break;
  }
  nest.outcome = NestOutcome::Exhausted;
  return nest;
}

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)); }

std::optional<PeriodTwoSolution> roots(double S, double P) {
  const double disc = S * S - 4 * P;
  if (!(disc > 0) || !(P > 0) || !(S > 0)) return std::nullopt;
  const double sq = std::sqrt(disc);
  // Larger root first, the smaller from Vieta to avoid cancellation.
  const double M = 0.5 * (S + sq);
  const double m = P / M;
  if (!(m > 0) || !(m < M)) return std::nullopt;
  return PeriodTwoSolution{m, M};
}

}  // namespace

std::optional<PeriodTwoSolution> period_two_solutions(double p, double q, double r) {
  if (p <= 1 || q >= 1) return std::nullopt;
  const double S = (p - 1) / q;
  const auto sol = roots(S, (S + r) / (1 - q));
  if (!sol) return std::nullopt;
  if (!close(f(p, q, r, sol->M, sol->m), sol->M) || !close(f(p, q, r, sol->m, sol->M), sol->m)) return std::nullopt;
  return sol;
}

std::optional<PeriodTwoSolution> prime_period_two(double p, double q, double r) {
  if (p >= 1 || q <= 1) return std::nullopt;
  const auto sol = roots(1 - p, (r + p * (1 - p)) / (q - 1));
  if (!sol) return std::nullopt;
  if (!close(f(p, q, r, sol->M, sol->m), sol->m) || !close(f(p, q, r, sol->m, sol->M), sol->M)) return std::nullopt;
  return sol;
}

StabilityReport schur_cohn_las(double p, double q, double r) {
  const double y = equilibrium(p, q, r);
  StabilityReport s;
  s.t1 = (p - q * y) / (y * (q + 1));
  s.t2 = -(y - 1) / (y * (q + 1));
  s.las = std::abs(s.t1) < 1 - s.t2 && 1 - s.t2 < 2;
  s.in_hypothesis = y < p / q;
  return s;
}

double kocic_ladas_g(double p, double q, double r, double w, double v) {
  const double k = p / q;
  auto Y = [&](double z) { return (1 + k * z) / (1 + z); };
  const double y = f(p, q, r, Y(w), Y(v));
  return (y - 1) / (k - y);
}

KocicLadasReport kocic_ladas_check(double p, double q, double r) {
  if (!(r < 0 && p > q && p - q + r > 0)) throw std::domain_error("kocic_ladas_check: needs r < 0, p > q, p - q + r > 0");
  KocicLadasReport rep;
  rep.diagonal_increasing = rep.ratio_w_decreasing = rep.ratio_v_decreasing = rep.g_v_decreasing = true;
  auto g = [&](double w, double v) { return kocic_ladas_g(p, q, r, w, v); };
  const double h = 1e-6;
  // Log-spaced grid on [1e-3, 1e3].
  std::vector<double> pts;
  for (int k = -24; k <= 24; ++k) pts.push_back(std::pow(10.0, k / 8.0));
  for (double w : pts) {
    const double wp = w * (1 + h), wm = w * (1 - h);
    rep.diagonal_increasing = rep.diagonal_increasing && g(wp, wp) - g(wm, wm) > 0;
    for (double v : pts) {
      const double vp = v * (1 + h), vm = v * (1 - h);
      rep.ratio_w_decreasing = rep.ratio_w_decreasing && g(wp, v) / wp - g(wm, v) / wm < 0;
      rep.ratio_v_decreasing = rep.ratio_v_decreasing && g(w, vp) / vp - g(w, vm) / vm < 0;
      rep.g_v_decreasing = rep.g_v_decreasing && g(w, vp) - g(w, vm) < 0;
      ++rep.points;
    }
  }
  return rep;
}

BehaviorReport behavior_report(const NormParams& norm) {
  const double p = norm.p, q = norm.q, r = norm.r;
  BehaviorReport rep;
  if (p == q) {
    rep.branch = "p=q: f monotone in both arguments -> all converge";
    return rep;
  }
  rep.nest = refine_invariant_interval(norm);
  switch (rep.nest.outcome) {
    case NestOutcome::CollapsedToEquilibrium:
      rep.branch = "interval nest collapsed to the equilibrium -> all converge";
      return rep;
    case NestOutcome::Exhausted:
      rep.branch = "interval refinement exhausted -> conservative: equilibrium or period two";
      rep.prediction = Prediction::EquilibriumOrPeriodTwo;
      rep.period_two = prime_period_two(p, q, r);
      rep.caveat = true;
      return rep;
    case NestOutcome::MonotonicWindow:
      break;
  }
  const std::string head = std::string("monotone window ") + to_string(rep.nest.window) + ": ";
  switch (rep.nest.window) {
    case Monotonicity::IncInc:
    case Monotonicity::DecDec:
      rep.branch = head + "(m,M) system has only m=M -> all converge";
      return rep;
    case Monotonicity::DecInc:
      rep.branch = head + "even/odd subsequences monotone -> equilibrium or period two";
      rep.prediction = Prediction::EquilibriumOrPeriodTwo;
      rep.period_two = prime_period_two(p, q, r);
      return rep;
    default:
      break;
  }
  if (r >= 0) {
    if (q >= 1 || p <= 1)
      rep.branch = head + "r>=0, q>=1 or p<=1: (M,m) system unsolvable -> all converge";
    else if (r <= p * p * q - p)
      rep.branch = head + "r>=0, r<=p^2q-p: embedded third-order map -> all converge";
    else
      rep.branch = head + "r>=0, p>1, q<1, r>p^2q-p: invariant function -> all converge";
  } else {
    rep.branch = head + "r<0: transformed map is a global attractor -> all converge";
  }
  return rep;
}

const char* to_string(Monotonicity kind) {
  switch (kind) {
    case Monotonicity::IncInc: return "IncInc";
    case Monotonicity::DecDec: return "DecDec";
    case Monotonicity::DecInc: return "DecInc";
    case Monotonicity::IncDec: return "IncDec";
    default: return "Mixed";
  }
}

const char* to_string(NestOutcome outcome) {
  switch (outcome) {
    case NestOutcome::CollapsedToEquilibrium: return "CollapsedToEquilibrium";
    case NestOutcome::MonotonicWindow: return "MonotonicWindow";
    default: return "Exhausted";
  }
}

const char* to_string(Prediction prediction) {
  return prediction == Prediction::AllConvergeToEquilibrium ? "AllConvergeToEquilibrium" : "EquilibriumOrPeriodTwo";
}

void to_json(nlohmann::json& j, const PeriodTwoSolution& v) { j = {{"m", v.m}, {"M", v.M}}; }

void to_json(nlohmann::json& j, const StabilityReport& v) {
  j = {{"t1", v.t1}, {"t2", v.t2}, {"las", v.las}, {"in_hypothesis", v.in_hypothesis}};
}

void to_json(nlohmann::json& j, const IntervalNest& v) {
  j = {{"outcome", to_string(v.outcome)}, {"levels", v.levels.size()}};
  if (!v.levels.empty()) j["final"] = {v.levels.back().first, v.levels.back().second};
  if (v.outcome == NestOutcome::MonotonicWindow) j["window"] = to_string(v.window);
}

void to_json(nlohmann::json& j, const BehaviorReport& v) {
  j = {{"branch", v.branch}, {"prediction", to_string(v.prediction)}, {"caveat", v.caveat}, {"nest", v.nest}};
  j["period_two"] = v.period_two ? nlohmann::json(*v.period_two) : nlohmann::json(nullptr);
}

}  // namespace ratdyn
