#include "doctest.h"

#include "ratdyn/sweep.hpp"

#include <algorithm>

using namespace ratdyn;

TEST_CASE("grid has one cell per node in p-major order") {
  SweepConfig cfg;
  cfg.p = {0.5, 2, 5};
  cfg.q = {0.5, 2, 5};
  cfg.r = {0, 4, 5};
  const auto cells = grid_cells(cfg);
  CHECK(cells.size() == 125);
  CHECK(cells.front().p == 0.5);
  CHECK(cells.back().r == 4);
  CHECK(cells[1].r == 1);
  CHECK(cells[5].q == doctest::Approx(0.875));
  cfg.r.steps = 1;
  CHECK(grid_cells(cfg).size() == 25);
}

TEST_CASE("config validation") {
  SweepConfig cfg;
  cfg.p.steps = 0;
  CHECK_THROWS_AS(check(cfg), std::invalid_argument);
  cfg = {};
  cfg.q = {2, 1, 3};
  CHECK_THROWS_AS(check(cfg), std::invalid_argument);
  cfg = {};
  cfg.p.min = 0;
  CHECK_THROWS_AS(check(cfg), std::invalid_argument);
  cfg = {};
  cfg.r.min = -1;
  CHECK_THROWS_AS(check(cfg), std::invalid_argument);
  cfg = {};
  cfg.orbits = 0;
  CHECK_THROWS_AS(check(cfg), std::invalid_argument);
}

TEST_CASE("results do not depend on the worker count") {
  SweepConfig cfg;
  cfg.cells = 30;
  cfg.orbits = 5;
  cfg.max_steps = 100'000;
  cfg.p = {0.05, 3, 1};
  cfg.q = {0.05, 8, 1};
  cfg.r = {0, 2, 1};
  nlohmann::json one = validate_theorem(cfg, 1), three = validate_theorem(cfg, 3);
  CHECK(one.dump() == three.dump());
  const auto cells = random_cells(cfg);
  CHECK(sweep_csv(run_cells(cells, cfg, 1)) == sweep_csv(run_cells(cells, cfg, 4)));
  cfg.seed = 2;
  CHECK(nlohmann::json(validate_theorem(cfg, 1)).dump() != one.dump());
}

TEST_CASE("period two is observed only where a prime 2-cycle exists") {
  SweepConfig cfg;
  cfg.p = {0.05, 1.5, 4};
  cfg.q = {0.5, 30, 4};
  cfg.r = {0, 0.5, 3};
  cfg.orbits = 6;
  const auto cells = run_cells(grid_cells(cfg), cfg, 2);
  std::size_t seen = 0;
  for (const auto& c : cells) {
    const auto cycle = prime_period_two(c.params.p, c.params.q, c.params.r);
    if (!(c.params.p < 1 && c.params.q > 1)) CHECK_FALSE(cycle);
    for (const auto& o : c.orbits) {
      if (o.limit.kind != LimitKind::PeriodTwo) continue;
      ++seen;
      REQUIRE(cycle);
      CHECK(o.limit.lo == doctest::Approx(cycle->m).epsilon(1e-7));
      CHECK(o.limit.hi == doctest::Approx(cycle->M).epsilon(1e-7));
      CHECK(c.behavior.prediction == Prediction::EquilibriumOrPeriodTwo);
    }
  }
  CHECK(seen > 0);
  const auto rep = summarize(cells);
  CHECK(rep.n_period_two == seen);
  CHECK(rep.n_period_two_outside == 0);
  CHECK(rep.anomalies.empty());
  CHECK(rep.n_equilibrium + rep.n_period_two + rep.n_undetermined == rep.n_instances);
}

TEST_CASE("csv layout") {
  SweepConfig cfg;
  cfg.p = {0.5, 2, 2};
  cfg.q = {0.5, 2, 2};
  cfg.r = {0, 4, 2};
  cfg.orbits = 2;
  const std::string csv = sweep_csv(run_cells(grid_cells(cfg), cfg, 1));
  CHECK(csv.rfind("p,q,r,branch,prediction,n_equilibrium,n_period_two,n_undetermined,period_two_m,period_two_M\n", 0) ==
        0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  CHECK(csv.find("0.5,0.5,0,") != std::string::npos);
}

TEST_CASE("tallies sum and branches are keyed by the decision tree") {
  SweepConfig cfg;
  cfg.cells = 40;
  cfg.orbits = 4;
  cfg.p = {0.05, 5, 1};
  cfg.q = {0.05, 5, 1};
  cfg.r = {0, 5, 1};
  const auto rep = validate_theorem(cfg, 2);
  CHECK(rep.n_instances == 160);
  std::size_t sum = 0;
  for (const auto& [name, t] : rep.branches) {
    CHECK(t.equilibrium + t.period_two + t.undetermined == t.instances);
    sum += t.instances;
  }
  CHECK(sum == rep.n_instances);
  nlohmann::json j = rep;
  CHECK(j.contains("worst_residual"));
  CHECK(j.at("anomalies").is_array());
}
