#pragma once

// Partial-derivative signs, invariant-interval refinement, period-two
// solvers, local stability and the global behavior decision tree.

#include "ratdyn/dynamics.hpp"
#include "ratdyn/params.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ratdyn {

/// Signs (-1, 0, +1) of D1 f and D2 f at (x, y). Throws std::domain_error
/// when p == q or q x + y <= 0.
std::pair<int, int> partial_signs(double p, double q, double r, double x, double y);

struct CriticalValues {
  double K1 = 0;  // zero of D1 f in y
  double K2 = 0;  // zero of D2 f in x
};

/// Throws std::domain_error when p == q.
CriticalValues critical_values(double p, double q, double r);

enum class Monotonicity { IncInc, DecDec, DecInc, IncDec, Mixed };

struct MonotonicityCase {
  Monotonicity kind = Monotonicity::Mixed;
  double m = 0, M = 0;
};

/// Coordinate-wise monotonicity of f on [m, M]^2 (first word: in x).
MonotonicityCase classify_monotonicity(double p, double q, double r, double m, double M);

struct Extrema {
  double phi = 0, Phi = 0;
  std::pair<double, double> argmin, argmax;
};

/// Exact min and max of f over [m, M]^2 from the candidate points. Throws
/// std::invalid_argument for m > M or a nonpositive denominator.
Extrema phi_Phi(double p, double q, double r, double m, double M);

enum class NestOutcome { CollapsedToEquilibrium, MonotonicWindow, Exhausted };

struct IntervalNest {
  std::vector<std::pair<double, double>> levels;
  NestOutcome outcome = NestOutcome::Exhausted;
  /// Meaningful for MonotonicWindow.
  Monotonicity window = Monotonicity::Mixed;
};

/// Starts from envelope(norm).
IntervalNest refine_invariant_interval(const NormParams& norm, double tol = 1e-10, std::size_t max_iter = 10'000);

struct PeriodTwoSolution {
  double m = 0, M = 0;
};

/// Solutions m < M of f(M, m) = M, f(m, M) = m (the system excluded by the
/// inc/dec convergence theorem). Not a 2-cycle: see prime_period_two.
std::optional<PeriodTwoSolution> period_two_solutions(double p, double q, double r);

/// Prime period-two orbit ..., m, M, m, M, ...: f(M, m) = m, f(m, M) = M.
std::optional<PeriodTwoSolution> prime_period_two(double p, double q, double r);

struct StabilityReport {
  double t1 = 0, t2 = 0;
  bool las = false;
  /// ybar < p / q.
  bool in_hypothesis = false;
};

StabilityReport schur_cohn_las(double p, double q, double r);

struct KocicLadasReport {
  bool diagonal_increasing = false;   // d/dw g(w, w) > 0
  bool ratio_w_decreasing = false;    // d/dw (g(w, v) / w) < 0
  bool ratio_v_decreasing = false;    // d/dv (g(w, v) / v) < 0
  bool g_v_decreasing = false;        // d/dv g(w, v) < 0
  std::size_t points = 0;
  bool holds() const { return diagonal_increasing && ratio_w_decreasing && ratio_v_decreasing && g_v_decreasing; }
};

/// The map g(w, v) obtained from f by z = (y - 1) / (p/q - y).
double kocic_ladas_g(double p, double q, double r, double w, double v);

/// Grid check of the derivative signs of the transformed map. Throws
/// std::domain_error unless r < 0, p > q and p - q + r > 0.
KocicLadasReport kocic_ladas_check(double p, double q, double r);

enum class Prediction { AllConvergeToEquilibrium, EquilibriumOrPeriodTwo };

struct BehaviorReport {
  std::string branch;
  Prediction prediction = Prediction::AllConvergeToEquilibrium;
  std::optional<PeriodTwoSolution> period_two;
  /// Set when the refinement was exhausted and the prediction is the
  /// conservative one.
  bool caveat = false;
  IntervalNest nest;
};

BehaviorReport behavior_report(const NormParams& norm);

const char* to_string(Monotonicity kind);
const char* to_string(NestOutcome outcome);
const char* to_string(Prediction prediction);

void to_json(nlohmann::json& j, const PeriodTwoSolution& v);
void to_json(nlohmann::json& j, const StabilityReport& v);
void to_json(nlohmann::json& j, const IntervalNest& v);
void to_json(nlohmann::json& j, const BehaviorReport& v);

}  // namespace ratdyn
