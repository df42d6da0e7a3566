// ratdyn command-line tool.

#include "ratdyn/analysis.hpp"
#include "ratdyn/certify.hpp"
#include "ratdyn/dynamics.hpp"
#include "ratdyn/parallel.hpp"
#include "ratdyn/params.hpp"
#include "ratdyn/poly.hpp"
#include "ratdyn/sweep.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using nlohmann::json;
using namespace ratdyn;

namespace {

enum Exit { kOk = 0, kUsage = 1, kDomain = 2, kRefuted = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + out);
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ------------------------------------------------------------ parameters

struct ParamFlags {
  std::optional<double> p, q, r, L;
  std::optional<double> alpha, beta, gamma, A, B, C;

  void add(CLI::App* app) {
    app->add_option("--p", p, "normalized p");
    app->add_option("--q", q, "normalized q");
    app->add_option("--r", r, "normalized r");
    app->add_option("--L", L, "lower bound of the 3-2-L state space, 0 < L < 1");
    app->add_option("--alpha", alpha);
    app->add_option("--beta", beta);
    app->add_option("--gamma", gamma);
    app->add_option("--A", A);
    app->add_option("--B", B);
    app->add_option("--C", C);
  }

  bool six() const { return alpha || beta || gamma || A || B || C; }

  Params33 params33() const {
    if (!(alpha && beta && gamma && A && B && C))
      throw UsageError("the six-parameter form needs all of --alpha --beta --gamma --A --B --C");
    return {*alpha, *beta, *gamma, *A, *B, *C};
  }
};

/// Normalized parameters plus the affine map x = map.apply(y) back to the
/// original variable (identity for --p --q --r).
struct Resolved {
  NormParams norm;
  AffineMap map;
  std::optional<Params33> six;
};

Resolved resolve(const ParamFlags& f) {
  if (f.six()) {
    if (f.p || f.q || f.r || f.L) throw UsageError("give either --p --q --r [--L] or the six-parameter form, not both");
    const Params33 v = f.params33();
    const auto rep = validate(v);
    if (!rep.valid()) {
      std::string msg = "invalid parameters";
      for (const auto& s : rep.problems) msg += "; " + s;
      throw std::domain_error(msg);
    }
    if (v.A == 0) return {to_pqr(v), AffineMap{v.gamma / v.C, 0}, v};
    auto [norm, map] = to_pqr_l(v);
    return {norm, map, v};
  }
  if (!(f.p && f.q && f.r)) throw UsageError("need --p --q --r (or --alpha --beta --gamma --A --B --C)");
  if (f.L) return {make_norm_l(*f.p, *f.q, *f.r, *f.L), {}, std::nullopt};
  return {make_norm(*f.p, *f.q, *f.r), {}, std::nullopt};
}

// -------------------------------------------------------------- commands

struct Common {
  std::string out;
  bool no_timing = false;
  unsigned threads = 0;
};

unsigned workers(const Common& c) {
  if (c.threads) poly::set_threads(c.threads);
  return poly::threads();
}

struct SimulateArgs {
  ParamFlags params;
  double x0 = 1, x1 = 1;
  std::size_t steps = 100;
  std::string format = "csv";
  double tol = 1e-9;
  std::size_t window = 64;
};

int cmd_simulate(const SimulateArgs& a, const Common& c) {
  if (a.steps < 1) throw UsageError("--steps must be >= 1");
  // Index i holds the i-th value; x0 and x1 are indices 0 and 1.
  const std::size_t n = a.steps - 1;
  std::vector<double> values;
  std::optional<LimitClass> limit;
  if (a.params.six()) {
    const Params33 v = a.params.params33();
    if (!validate(v).valid()) throw std::domain_error("invalid six-parameter input");
    values = simulate33(v, a.x0, a.x1, n);
    if (a.format == "json") {
      try {
        const Resolved res = resolve(a.params);
        const Orbit o = simulate(res.norm, res.map.invert(a.x0), res.map.invert(a.x1), n);
        LimitClass lc = classify_limit(o, {a.tol, a.window});
        lc.lo = res.map.apply(lc.lo);
        lc.hi = res.map.apply(lc.hi);
        limit = lc;
      } catch (const std::domain_error&) {
        // No normal form: orbit only.
      }
    }
  } else {
    const Resolved res = resolve(a.params);
    const Orbit o = simulate(res.norm, a.x0, a.x1, n);
    values = o.samples();
    limit = classify_limit(o, {a.tol, a.window});
  }
  if (a.format == "csv") {
    std::string s = "index,value\n";
    for (std::size_t i = 0; i < values.size(); ++i) s += std::to_string(i) + ',' + g17(values[i]) + '\n';
    emit(s, c.out);
  } else {
    json j;
    j["values"] = values;
    j["limit"] = limit ? json(*limit) : json(nullptr);
    emit(dump(j), c.out);
  }
  return kOk;
}

int cmd_analyze(const ParamFlags& pf, const Common& c) {
  const Resolved res = resolve(pf);
  const NormParams& n = res.norm;
  json j;
  j["params"] = n;
  if (res.six) j["map"] = res.map;
  j["equilibrium"] = n.equilibrium;
  j["envelope"] = envelope(n);
  j["stability"] = schur_cohn_las(n.p, n.q, n.r);
  j["behavior"] = behavior_report(n);
  if (n.r < 0 && n.p > n.q && n.p - n.q + n.r > 0) {
    const auto kl = kocic_ladas_check(n.p, n.q, n.r);
    j["transformed_map"] = {{"diagonal_increasing", kl.diagonal_increasing},
                            {"ratio_w_decreasing", kl.ratio_w_decreasing},
                            {"ratio_v_decreasing", kl.ratio_v_decreasing},
                            {"g_v_decreasing", kl.g_v_decreasing},
                            {"points", kl.points},
                            {"holds", kl.holds()}};
  }
  emit(dump(j), c.out);
  return kOk;
}

int cmd_period2(const ParamFlags& pf, bool prime, const Common& c) {
  const Resolved res = resolve(pf);
  const auto& n = res.norm;
  const auto sol = prime ? prime_period_two(n.p, n.q, n.r) : period_two_solutions(n.p, n.q, n.r);
  emit(sol ? g17(sol->m) + ',' + g17(sol->M) + '\n' : std::string("none\n"), c.out);
  return kOk;
}

int cmd_interval(const ParamFlags& pf, double tol, std::size_t max_iter, const Common& c) {
  const Resolved res = resolve(pf);
  const IntervalNest nest = refine_invariant_interval(res.norm, tol, max_iter);
  std::string s = "level,m,M\n";
  for (std::size_t i = 0; i < nest.levels.size(); ++i)
    s += std::to_string(i) + ',' + g17(nest.levels[i].first) + ',' + g17(nest.levels[i].second) + '\n';
  emit(s, c.out);
  return kOk;
}

struct CertifyArgs {
  std::string claim;
  std::string subcase = "all";
  std::size_t samples = 1000;
  std::size_t cross_checks = 8;
  std::uint64_t seed = 0x5eed;
  bool no_plan = false;
};

int cmd_certify(const CertifyArgs& a, const Common& c) {
  using namespace ratdyn::certify;
  const unsigned w = workers(c);
  const Options opts{a.samples, a.cross_checks, a.seed};
  std::vector<Subcase> subcases;
  if (a.subcase == "all") {
    subcases.assign(std::begin(kSubcases), std::end(kSubcases));
  } else if (auto s = parse_subcase(a.subcase)) {
    subcases.push_back(*s);
  } else {
    throw UsageError("unknown subcase " + a.subcase);
  }

  // Each job yields one certificate; jobs run on the pool in fixed order.
  std::vector<std::function<Certificate()>> jobs;
  auto want = [&](const char* name) { return a.claim == name || a.claim == "all"; };
  if (want("delta1")) jobs.emplace_back([] { return verify_delta1_factorization(); });
  if (want("claim3"))
    for (Subcase s : subcases) jobs.emplace_back([s, opts] { return certify_claim3(s, opts); });
  if (want("claim4"))
    for (Subcase s : subcases) jobs.emplace_back([s, opts] { return certify_claim4(s, opts); });
  if (want("embed-h")) jobs.emplace_back([opts] { return certify_embed_h(opts); });
  if (want("a-coeffs")) jobs.emplace_back([opts] { return certify_a_coeffs(opts); });
  if (want("identities")) jobs.emplace_back([] { return certify_parameter_identities(); });
  if (want("cubic")) jobs.emplace_back([] { return certify_cubic_roots(); });
  if (jobs.empty()) throw UsageError("unknown claim " + a.claim);

  const auto t0 = std::chrono::steady_clock::now();
  // Subcases are independent; inner expansion threads are disabled so the
  // pool owns the cores.
  const unsigned outer = std::min<unsigned>(w, static_cast<unsigned>(jobs.size()));
  if (outer > 1) poly::set_threads(1);
  const auto certs = parallel_map(jobs.size(), outer, [&](std::size_t i) { return jobs[i](); });
  if (outer > 1) poly::set_threads(c.threads);

  json j;
  j["claim"] = a.claim;
  j["seed"] = a.seed;
  j["samples"] = a.samples;
  bool passed = true, refuted = false;
  std::size_t max_terms = 0;
  auto& arr = j["certificates"] = json::array();
  for (const auto& cert : certs) {
    arr.push_back(to_json(cert, !a.no_plan));
    passed = passed && cert.passed();
    refuted = refuted || cert.verdict == Verdict::Refuted;
    max_terms = std::max(max_terms, cert.stats.n_terms);
  }
  if (want("cubic")) j["informational"] = json::array({to_json(certify_cubic_roots_as_printed(), false)});
  // Summary fields for single-certificate reports.
  if (certs.size() == 1) {
    j["verdict"] = to_string(certs[0].verdict);
    j["n_terms"] = certs[0].stats.n_terms;
    j["n_negative"] = certs[0].stats.n_negative;
    j["min_coeff"] = certs[0].stats.min_coeff.get_str();
  } else {
    j["verdict"] = refuted ? "Refuted" : "Mixed";
    if (!refuted) {
      bool same = true;
      for (const auto& cert : certs) same = same && cert.verdict == certs[0].verdict;
      if (same) j["verdict"] = to_string(certs[0].verdict);
    }
    j["max_terms"] = max_terms;
  }
  j["passed"] = passed;
  if (!c.no_timing) j["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(dump(j), c.out);
  return passed ? kOk : kRefuted;
}

void add_sweep_flags(CLI::App* app, SweepConfig& cfg) {
  auto range = [&](const char* name, Range& r) {
    const std::string n = name;
    app->add_option("--" + n + "-min", r.min);
    app->add_option("--" + n + "-max", r.max);
    app->add_option("--" + n + "-steps", r.steps);
  };
  range("p", cfg.p);
  range("q", cfg.q);
  range("r", cfg.r);
  app->add_option("--orbits", cfg.orbits, "initial conditions per cell");
  app->add_option("--seed", cfg.seed);
  app->add_option("--max-steps", cfg.max_steps, "step cap per orbit");
  app->add_option("--tol", cfg.tol);
  app->add_option("--window", cfg.window);
  app->add_option("--x-lo", cfg.x_lo, "initial values are log-uniform in [x-lo, x-hi]");
  app->add_option("--x-hi", cfg.x_hi);
}

int cmd_sweep(const SweepConfig& cfg, const Common& c) {
  const auto cells = grid_cells(cfg);
  emit(sweep_csv(run_cells(cells, cfg, workers(c))), c.out);
  return kOk;
}

int cmd_validate(const SweepConfig& cfg, const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = validate_theorem(cfg, workers(c));
  json j;
  j["config"] = cfg;
  j["report"] = rep;
  if (!c.no_timing) j["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(dump(j), c.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global dynamics of x[n+1] = (alpha + beta x[n] + gamma x[n-1]) / (A + B x[n] + C x[n-1])"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--out,-o", common.out, "output file (default stdout)");
  app.add_flag("--no-timing", common.no_timing, "omit wall_time from JSON reports");
  app.add_option("--threads", common.threads, "worker threads (default RATDYN_THREADS or all cores)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "iterate the map; CSV index,value or JSON");
  sim.params.add(simulate);
  simulate->add_option("--x0", sim.x0, "first initial value (index 0)");
  simulate->add_option("--x1", sim.x1, "second initial value (index 1)");
  simulate->add_option("--steps", sim.steps, "last index written");
  simulate->add_option("--format", sim.format)->check(CLI::IsMember({"csv", "json"}));
  simulate->add_option("--tol", sim.tol);
  simulate->add_option("--window", sim.window);

  ParamFlags analyze_p;
  auto* analyze = app.add_subcommand("analyze", "behavior report as JSON");
  analyze_p.add(analyze);

  ParamFlags p2_p;
  bool prime = false;
  auto* period2 = app.add_subcommand("period2", "solutions of f(M,m)=M, f(m,M)=m, or none");
  p2_p.add(period2);
  period2->add_flag("--prime", prime, "solve for the 2-cycle f(M,m)=m, f(m,M)=M instead");

  ParamFlags iv_p;
  double iv_tol = 1e-10;
  std::size_t iv_max = 10'000;
  auto* interval = app.add_subcommand("interval", "invariant interval nest as CSV level,m,M");
  iv_p.add(interval);
  interval->add_option("--tol", iv_tol);
  interval->add_option("--max-iter", iv_max);

  CertifyArgs cert;
  auto* certify = app.add_subcommand("certify", "exact polynomial certificates");
  certify->add_option("--claim", cert.claim)
      ->required()
      ->check(CLI::IsMember({"delta1", "claim3", "claim4", "embed-h", "a-coeffs", "identities", "cubic", "all"}));
  certify->add_option("--subcase", cert.subcase, "Q1_w_ge_v, Q1_v_ge_w, Q3_w_ge_v, Q3_v_ge_w or all");
  certify->add_option("--samples", cert.samples, "exact soundness samples per certificate");
  certify->add_option("--cross-checks", cert.cross_checks);
  certify->add_option("--seed", cert.seed);
  certify->add_flag("--no-plan", cert.no_plan, "omit substitution plans from the report");

  SweepConfig sweep_cfg;
  auto* sweep = app.add_subcommand("sweep", "grid sweep; one CSV row per (p,q,r) cell");
  add_sweep_flags(sweep, sweep_cfg);

  SweepConfig val_cfg;
  val_cfg.p = {0.05, 5, 1};
  val_cfg.q = {0.05, 5, 1};
  val_cfg.r = {0, 5, 1};
  auto* validate_cmd = app.add_subcommand("validate-theorem", "Monte-Carlo check of the convergence dichotomy");
  add_sweep_flags(validate_cmd, val_cfg);
  validate_cmd->add_option("--cells", val_cfg.cells, "random parameter cells");

  for (auto* sub : {simulate, analyze, period2, interval, certify, sweep, validate_cmd}) {
    sub->add_option("--out,-o", common.out, "output file (default stdout)");
    sub->add_flag("--no-timing", common.no_timing, "omit wall_time from JSON reports");
    sub->add_option("--threads", common.threads, "worker threads");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim, common);
    if (*analyze) return cmd_analyze(analyze_p, common);
    if (*period2) return cmd_period2(p2_p, prime, common);
    if (*interval) return cmd_interval(iv_p, iv_tol, iv_max, common);
    if (*certify) return cmd_certify(cert, common);
    if (*sweep) return cmd_sweep(sweep_cfg, common);
    if (*validate_cmd) return cmd_validate(val_cfg, common);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  }
  return kUsage;
}
