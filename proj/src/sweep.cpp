#include "ratdyn/sweep.hpp"

#include "ratdyn/parallel.hpp"
#include "ratdyn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ratdyn {

namespace {

void check_range(const Range& r, const char* name) {
  if (r.steps == 0) throw std::invalid_argument(std::string(name) + ": steps must be >= 1");
  if (!(r.min <= r.max) || !std::isfinite(r.min) || !std::isfinite(r.max))
    throw std::invalid_argument(std::string(name) + ": need finite min <= max");
}

double node(const Range& r, std::size_t i) {
  if (r.steps == 1) return r.min;
  return r.min + (r.max - r.min) * static_cast<double>(i) / static_cast<double>(r.steps - 1);
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Stream tags for rng::key.
constexpr std::uint64_t kCellStream = 0xCE11, kOrbitStream = 0x0B17;

}  // namespace

void check(const SweepConfig& cfg) {
  check_range(cfg.p, "p");
  check_range(cfg.q, "q");
  check_range(cfg.r, "r");
  if (!(cfg.p.min > 0) || !(cfg.q.min > 0)) throw std::invalid_argument("p and q ranges must be positive");
  if (!(cfg.r.min >= 0)) throw std::invalid_argument("r range must be nonnegative");
  if (cfg.orbits == 0 || cfg.max_steps == 0) throw std::invalid_argument("orbits and max_steps must be >= 1");
  if (!(cfg.tol > 0) || cfg.window < 4) throw std::invalid_argument("need tol > 0 and window >= 4");
  if (!(cfg.x_lo > 0) || !(cfg.x_lo <= cfg.x_hi)) throw std::invalid_argument("need 0 < x_lo <= x_hi");
}

std::vector<CellParams> grid_cells(const SweepConfig& cfg) {
  check(cfg);
  std::vector<CellParams> out;
  for (std::size_t i = 0; i < cfg.p.steps; ++i)
    for (std::size_t j = 0; j < cfg.q.steps; ++j)
      for (std::size_t k = 0; k < cfg.r.steps; ++k) out.push_back({node(cfg.p, i), node(cfg.q, j), node(cfg.r, k)});
  return out;
}

std::vector<CellParams> random_cells(const SweepConfig& cfg) {
  check(cfg);
  std::vector<CellParams> out;
  for (std::size_t i = 0; i < cfg.cells; ++i) {
    auto u = [&](const Range& r, std::uint64_t slot) {
      return rng::uniform(rng::key(cfg.seed, kCellStream, i, slot), r.min, r.max);
    };
    out.push_back({u(cfg.p, 0), u(cfg.q, 1), u(cfg.r, 2)});
  }
  return out;
}

std::vector<CellResult> run_cells(const std::vector<CellParams>& cells, const SweepConfig& cfg, unsigned workers) {
  check(cfg);
  const ClassifyOptions copts{cfg.tol, cfg.window};
  const double llo = std::log(cfg.x_lo), lhi = std::log(cfg.x_hi);
  // One task per (cell, orbit) keeps the pool busy when a few cells are slow.
  const std::size_t n_tasks = cells.size() * cfg.orbits;
  auto records = parallel_map(n_tasks, workers, [&](std::size_t t) {
    const std::size_t c = t / cfg.orbits, o = t % cfg.orbits;
    const NormParams norm = make_norm(cells[c].p, cells[c].q, cells[c].r);
    OrbitRecord rec;
    rec.orbit = o;
    rec.x_minus1 = std::exp(rng::uniform(rng::key(cfg.seed, kOrbitStream + c, o, 0), llo, lhi));
    rec.x_0 = std::exp(rng::uniform(rng::key(cfg.seed, kOrbitStream + c, o, 1), llo, lhi));
    auto [orbit, limit] = simulate_until_classified(norm, rec.x_minus1, rec.x_0, cfg.max_steps, copts);
    rec.limit = limit;
    rec.steps = orbit.n_steps();
    return rec;
  });
  auto behaviors = parallel_map(cells.size(), workers, [&](std::size_t c) {
    return behavior_report(make_norm(cells[c].p, cells[c].q, cells[c].r));
  });
  std::vector<CellResult> out(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellResult& cell = out[c];
    cell.params = cells[c];
    cell.behavior = std::move(behaviors[c]);
    for (std::size_t o = 0; o < cfg.orbits; ++o) {
      OrbitRecord& rec = records[c * cfg.orbits + o];
      switch (rec.limit.kind) {
        case LimitKind::Equilibrium: ++cell.n_equilibrium; break;
        case LimitKind::PeriodTwo: ++cell.n_period_two; break;
        default: ++cell.n_undetermined; break;
      }
      if (rec.limit.kind != LimitKind::Undetermined)
        cell.worst_residual = std::max(cell.worst_residual, rec.limit.residual);
      cell.orbits.push_back(std::move(rec));
    }
  }
  return out;
}

TheoremValidationReport summarize(const std::vector<CellResult>& cells) {
  TheoremValidationReport rep;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const CellResult& cell = cells[c];
    BranchTally& tally = rep.branches[cell.behavior.branch];
    for (const auto& rec : cell.orbits) {
      ++rep.n_instances;
      ++tally.instances;
      switch (rec.limit.kind) {
        case LimitKind::Equilibrium:
          ++rep.n_equilibrium;
          ++tally.equilibrium;
          break;
        case LimitKind::PeriodTwo:
          ++rep.n_period_two;
          ++tally.period_two;
          if (!(cell.params.p < 1 && cell.params.q > 1)) ++rep.n_period_two_outside;
          if (cell.behavior.prediction == Prediction::AllConvergeToEquilibrium)
            rep.anomalies.push_back({c, rec.orbit, cell.params, "period-two limit where all orbits should converge",
                                     rec.limit.kind});
          break;
        case LimitKind::Undetermined:
          ++rep.n_undetermined;
          ++tally.undetermined;
          break;
        default:
          ++rep.n_other;
          rep.anomalies.push_back({c, rec.orbit, cell.params, "limit neither equilibrium nor period two", rec.limit.kind});
          break;
      }
    }
    rep.worst_residual = std::max(rep.worst_residual, cell.worst_residual);
  }
  return rep;
}

TheoremValidationReport validate_theorem(const SweepConfig& cfg, unsigned workers) {
  return summarize(run_cells(random_cells(cfg), cfg, workers));
}

std::string sweep_csv(const std::vector<CellResult>& cells) {
  std::string out = "p,q,r,branch,prediction,n_equilibrium,n_period_two,n_undetermined,period_two_m,period_two_M\n";
  for (const auto& c : cells) {
    std::string branch = c.behavior.branch;
    std::string quoted = "\"";
    for (char ch : branch) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    quoted += '"';
    out += g17(c.params.p) + ',' + g17(c.params.q) + ',' + g17(c.params.r) + ',' + quoted + ',' +
           to_string(c.behavior.prediction) + ',' + std::to_string(c.n_equilibrium) + ',' +
           std::to_string(c.n_period_two) + ',' + std::to_string(c.n_undetermined) + ',';
    // Values from the first observed period-two limit.
    auto it = std::find_if(c.orbits.begin(), c.orbits.end(),
                           [](const OrbitRecord& r) { return r.limit.kind == LimitKind::PeriodTwo; });
    if (it != c.orbits.end()) out += g17(it->limit.lo) + ',' + g17(it->limit.hi);
    else out += ',';
    out += '\n';
  }
  return out;
}

void to_json(nlohmann::json& j, const SweepConfig& v) {
  auto range = [](const Range& r) { return nlohmann::json{{"min", r.min}, {"max", r.max}, {"steps", r.steps}}; };
  j = {{"p", range(v.p)},         {"q", range(v.q)},           {"r", range(v.r)},
       {"orbits", v.orbits},      {"seed", v.seed},            {"max_steps", v.max_steps},
       {"tol", v.tol},            {"window", v.window},        {"x_lo", v.x_lo},
       {"x_hi", v.x_hi},          {"cells", v.cells}};
}

void to_json(nlohmann::json& j, const TheoremValidationReport& v) {
  j = {{"n_instances", v.n_instances},
       {"n_equilibrium", v.n_equilibrium},
       {"n_period_two", v.n_period_two},
       {"n_undetermined", v.n_undetermined},
       {"n_other", v.n_other},
       {"n_period_two_outside", v.n_period_two_outside},
       {"worst_residual", v.worst_residual}};
  auto& b = j["branches"] = nlohmann::json::object();
  for (const auto& [name, t] : v.branches)
    b[name] = {{"instances", t.instances},
               {"equilibrium", t.equilibrium},
               {"period_two", t.period_two},
               {"undetermined", t.undetermined}};
  auto& a = j["anomalies"] = nlohmann::json::array();
  for (const auto& x : v.anomalies)
    a.push_back({{"cell", x.cell},
                 {"orbit", x.orbit},
                 {"p", x.params.p},
                 {"q", x.params.q},
                 {"r", x.params.r},
                 {"reason", x.reason},
                 {"observed", to_string(x.observed)}});
}

}  // namespace ratdyn
