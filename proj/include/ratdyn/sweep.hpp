#pragma once

// Parameter sweeps and the Monte-Carlo check of the convergence dichotomy.

#include "ratdyn/analysis.hpp"
#include "ratdyn/dynamics.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ratdyn {

struct Range {
  double min = 0, max = 0;
  std::size_t steps = 1;
};

struct SweepConfig {
  Range p{0.5, 2, 5}, q{0.5, 2, 5}, r{0, 4, 5};
  std::size_t orbits = 20;
  std::uint64_t seed = 1;
  std::size_t max_steps = 1'000'000;
  double tol = 1e-9;
  std::size_t window = 64;
  /// Initial values are drawn log-uniformly from [x_lo, x_hi].
  double x_lo = 1e-2, x_hi = 1e2;
  /// Random cells for validate-theorem (grid sweeps ignore it).
  std::size_t cells = 200;
};

/// Throws std::invalid_argument on steps == 0, an inverted range, a
/// nonpositive p or q bound, a negative r bound or bad orbit settings.
void check(const SweepConfig& cfg);

struct CellParams {
  double p = 0, q = 0, r = 0;
};

/// Grid nodes in p-major, then q, then r order. A range with one step
/// contributes its min.
std::vector<CellParams> grid_cells(const SweepConfig& cfg);

/// `cfg.cells` cells drawn uniformly from the ranges, keyed by seed.
std::vector<CellParams> random_cells(const SweepConfig& cfg);

struct OrbitRecord {
  std::size_t orbit = 0;
  double x_minus1 = 0, x_0 = 0;
  LimitClass limit;
  std::size_t steps = 0;
};

struct CellResult {
  CellParams params;
  BehaviorReport behavior;
  std::vector<OrbitRecord> orbits;
  std::size_t n_equilibrium = 0, n_period_two = 0, n_undetermined = 0;
  /// Distance of the orbit's limit from its class (max over orbits).
  double worst_residual = 0;
};

/// Runs `cfg.orbits` orbits per cell on up to `workers` threads. The
/// initial values depend only on (seed, cell index, orbit index).
std::vector<CellResult> run_cells(const std::vector<CellParams>& cells, const SweepConfig& cfg, unsigned workers);

struct Anomaly {
  std::size_t cell = 0, orbit = 0;
  CellParams params;
  std::string reason;
  LimitKind observed = LimitKind::Undetermined;
};

struct BranchTally {
  std::size_t instances = 0, equilibrium = 0, period_two = 0, undetermined = 0;
};

struct TheoremValidationReport {
  std::size_t n_instances = 0, n_equilibrium = 0, n_period_two = 0, n_undetermined = 0;
  double worst_residual = 0;
  std::map<std::string, BranchTally> branches;
  std::vector<Anomaly> anomalies;
  /// Determined limits that are neither Equilibrium nor PeriodTwo; kept as
  /// a counter even though classify_limit cannot produce one.
  std::size_t n_other = 0;
  /// Period-two limits observed outside p < 1 < q, the only region with
  /// a prime period-two solution.
  std::size_t n_period_two_outside = 0;
};

/// Cross-tabulates prediction vs observation. Anomalies are observed
/// PeriodTwo limits where the prediction is AllConvergeToEquilibrium.
TheoremValidationReport summarize(const std::vector<CellResult>& cells);

TheoremValidationReport validate_theorem(const SweepConfig& cfg, unsigned workers);

/// Header plus one row per cell, 17 significant digits.
std::string sweep_csv(const std::vector<CellResult>& cells);

void to_json(nlohmann::json& j, const SweepConfig& v);
void to_json(nlohmann::json& j, const TheoremValidationReport& v);

}  // namespace ratdyn
