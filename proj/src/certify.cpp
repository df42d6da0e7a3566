#include "ratdyn/certify.hpp"

#include "ratdyn/rng.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ratdyn::certify {

using poly::Integer;
using poly::Monomial;
using poly::Substitution;
using poly::Term;

namespace {

struct Vars {
  VarTablePtr table;
  Poly operator()(std::string_view name) const { return Poly::variable(table, name); }
  Poly c(const Rational& v) const { return Poly(table, v); }
};

Poly derivative(const Poly& p, std::size_t slot) {
  std::vector<Term> out;
  for (const auto& t : p.terms()) {
    const unsigned e = t.mono.exponent(slot);
    if (e == 0) continue;
    Monomial m = t.mono;
    m.set_exponent(slot, e - 1);
    out.push_back({m, t.coef * e});
  }
  return Poly::from_terms(p.vars(), std::move(out));
}

std::vector<Rational> zero_point(const VarTablePtr& vars) { return std::vector<Rational>(vars->size(), Rational(0)); }

CoefficientReport report_of(const Poly& p) { return p.coefficient_report(); }

// Nonnegative coefficients and still nonzero with every nonstrict slack at 0:
// then the polynomial is positive wherever the strict slacks are.
DenominatorCertificate positivity_by_coefficients(std::string label, const Poly& p, const SubstitutionPlan& plan) {
  DenominatorCertificate d;
  d.label = std::move(label);
  d.method = "coefficients";
  d.report = report_of(p);
  Poly corner = p;
  for (const auto& name : plan.nonstrict)
    if (auto slot = p.vars()->find(name)) corner = corner.specialize(*slot, 0);
  d.positive = d.report.n_negative == 0 && !corner.is_zero();
  return d;
}

std::vector<Substitution> to_substitutions(const SubstitutionPlan& plan) {
  std::vector<Substitution> subs;
  for (const auto& s : plan.steps) subs.push_back({s.var, s.value, s.den_factors});
  return subs;
}

Verdict coefficient_verdict(const Poly& p, Certificate& c) {
  c.stats = report_of(p);
  if (p.is_zero()) {
    c.witness = "numerator is identically zero";
    return Verdict::Refuted;
  }
  if (c.stats.n_negative > 0) {
    c.witness = c.stats.negative_witness;
    return Verdict::Refuted;
  }
  return Verdict::AllCoefficientsNonnegative;
}

const char* kStrictCaveat =
    "strict positivity away from the equilibrium pattern is checked by sampling, not proved";

// Slack values for one sample, indexed like the plan's table.
std::vector<Rational> sample_slacks(const SubstitutionPlan& plan, const VarTablePtr& vars, const Sampler& rng,
                                    std::uint64_t index) {
  auto pt = zero_point(vars);
  unsigned slot = 0;
  for (const auto& n : plan.strict)
    if (auto s = vars->find(n)) pt[*s] = rng.positive(index, slot++);
  for (const auto& n : plan.nonstrict)
    if (auto s = vars->find(n)) pt[*s] = rng.nonnegative(index, slot++);
  return pt;
}

Rational eval_step(const SubstitutionPlan& plan, std::string_view var, std::span<const Rational> slack) {
  for (const auto& s : plan.steps)
    if (s.var == var) return s.value.eval(slack);
  throw std::logic_error("plan has no step for " + std::string(var));
}

}  // namespace

bool Certificate::passed() const {
  if (verdict == Verdict::Refuted) return false;
  for (const auto& d : denominators)
    if (!d.positive) return false;
  if (soundness && !soundness->ok()) return false;
  if (fixed_point_annihilates && !*fixed_point_annihilates) return false;
  for (const auto& [name, ok] : checks)
    if (!ok) return false;
  return true;
}

const char* to_string(Subcase s) {
  switch (s) {
    case Subcase::Q1_w_ge_v: return "Q1_w_ge_v";
    case Subcase::Q1_v_ge_w: return "Q1_v_ge_w";
    case Subcase::Q3_w_ge_v: return "Q3_w_ge_v";
    default: return "Q3_v_ge_w";
  }
}

std::optional<Subcase> parse_subcase(std::string_view s) {
  for (Subcase c : kSubcases)
    if (s == to_string(c)) return c;
  return std::nullopt;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::AllCoefficientsNonnegative: return "AllCoefficientsNonnegative";
    case Verdict::IdentityHolds: return "IdentityHolds";
    default: return "Refuted";
  }
}

// ------------------------------------------------------------------ sampler

std::uint64_t Sampler::draw(std::uint64_t index, unsigned slot, unsigned k) const {
  return rng::key(seed_, stream_, index, (static_cast<std::uint64_t>(slot) << 8) | k);
}

Rational Sampler::positive(std::uint64_t index, unsigned slot) const {
  const std::uint64_t den = 1 + draw(index, slot, 0) % 12;
  const std::uint64_t num = 1 + draw(index, slot, 1) % (8 * den);
  Rational v(Integer(static_cast<unsigned long>(num)), Integer(static_cast<unsigned long>(den)));
  v.canonicalize();
  return v;
}

Rational Sampler::nonnegative(std::uint64_t index, unsigned slot) const {
  if (draw(index, slot, 2) % 5 == 0) return 0;
  return positive(index, slot);
}

// ------------------------------------------------------------ expressions

VarTablePtr map_vars(std::vector<std::string> extra) {
  std::vector<std::string> names{"x", "y", "u", "g", "b"};
  names.insert(names.end(), extra.begin(), extra.end());
  return poly::make_vars(std::move(names));
}

std::pair<RatFn, RatFn> build_T(const VarTablePtr& vars) {
  const Vars V{vars};
  const Poly x = V("x"), y = V("y"), u = V("u"), g = V("g"), b = V("b"), one = V.c(1);
  const Poly a = (b + one) * u * u - (g + one) * u;
  return {RatFn(y), RatFn(a + y + g * x, b * y + x)};
}

RatFn build_V(const VarTablePtr& vars) {
  const Vars V{vars};
  const Poly x = V("x"), y = V("y"), u = V("u"), one = V.c(1);
  return RatFn((one + x) * (one + y) * (u * u - u + x + y), x * y);
}

RatFn DeltaParts::value() const {
  Poly den(numerator.vars(), Rational(1));
  for (const auto& [name, f] : den_factors) den *= f;
  return RatFn(numerator, den);
}

DeltaParts delta_parts(unsigned k, const VarTablePtr& vars) {
  if (k < 1 || k > 3) throw std::invalid_argument("delta: k must be 1, 2 or 3");
  const Vars V{vars};
  const Poly x = V("x"), y = V("y"), u = V("u"), g = V("g"), b = V("b"), one = V.c(1);
  const Poly a = (b + one) * u * u - (g + one) * u;
  const Poly c = u * u - u;
  // T^n(x, y) = (P_n/Q_n, P_{n+1}/Q_{n+1}) with P_0 = x, P_1 = y.
  std::vector<Poly> P{x, y}, Q{one, one};
  for (unsigned n = 1; n <= k; ++n) {
    P.push_back(a * Q[n] * Q[n - 1] + P[n] * Q[n - 1] + g * P[n - 1] * Q[n]);
    Q.push_back(b * P[n] * Q[n - 1] + P[n - 1] * Q[n]);
  }
  // V(P/Q, R/S) = (Q+P)(S+R)(c Q S + P S + R Q) / (P Q R S).
  auto vnum = [&](const Poly& p, const Poly& q, const Poly& r, const Poly& s) {
    return (q + p) * (s + r) * (c * q * s + p * s + r * q);
  };
  const Poly A0 = vnum(x, one, y, one), B0 = x * y;
  const Poly Ak = vnum(P[k], Q[k], P[k + 1], Q[k + 1]);
  const Poly Bk = P[k] * Q[k] * P[k + 1] * Q[k + 1];
  DeltaParts parts{A0 * Bk - Ak * B0, {}};
  auto add = [&](std::string name, const Poly& f) {
    if (!f.is_constant()) parts.den_factors.emplace_back(std::move(name), f);
  };
  add("x", x);
  add("y", y);
  const std::string ks = std::to_string(k), k1 = std::to_string(k + 1);
  add("P_" + ks, P[k]);
  add("Q_" + ks, Q[k]);
  add("P_" + k1, P[k + 1]);
  add("Q_" + k1, Q[k + 1]);
  return parts;
}

RatFn delta(unsigned k, const VarTablePtr& vars) { return delta_parts(k, vars).value(); }

Rational delta_eval(unsigned k, const Rational& x, const Rational& y, const Rational& u, const Rational& g,
                    const Rational& b) {
  const Rational a = (b + 1) * u * u - (g + 1) * u;
  auto V = [&](const Rational& s, const Rational& t) {
    if (sgn(s) == 0 || sgn(t) == 0) throw std::domain_error("delta_eval: V at a zero coordinate");
    return Rational((1 + s) * (1 + t) * (u * u - u + s + t) / (s * t));
  };
  Rational prev = x, cur = y;
  for (unsigned n = 0; n < k; ++n) {
    const Rational den = b * cur + prev;
    if (sgn(den) == 0) throw std::domain_error("delta_eval: zero denominator");
    Rational next = (a + cur + g * prev) / den;
    prev = cur;
    cur = next;
  }
  return V(x, y) - V(prev, cur);
}

Delta1Factors delta1_factors(const VarTablePtr& vars) {
  const Vars V{vars};
  // Written with x as the newest state, then exchanged.
  const Poly X = V("y"), Y = V("x"), u = V("u"), g = V("g"), b = V("b"), one = V.c(1);
  return {(X - u) * (b * Y - one) + (Y - u) * (b * u + Y + u - g),
          b * (X - u) * (X - u) + b * (X - u) * u + b * (X - u) * u * u + (u - Y) * (b * u * u + Y * g),
          (b + one) * u * u - (one + g) * u + X + g * Y};
}

Certificate identity_certificate(std::string claim, const RatFn& lhs, const RatFn& rhs) {
  Certificate c;
  c.claim = std::move(claim);
  const Poly residual = lhs.num() * rhs.den() - rhs.num() * lhs.den();
  c.stats = report_of(residual);
  if (residual.is_zero()) {
    c.verdict = Verdict::IdentityHolds;
  } else {
    c.verdict = Verdict::Refuted;
    const auto t = residual.terms().front();
    c.witness = Poly::from_terms(residual.vars(), {t}).to_string();
  }
  return c;
}

Certificate verify_delta1_factorization(const Rational& f1_shift) {
  const auto vars = map_vars();
  const Vars V{vars};
  const Poly x = V("x"), y = V("y"), b = V("b"), one = V.c(1);
  auto f = delta1_factors(vars);
  f.F1 += V.c(f1_shift);
  const RatFn lhs = delta(1, vars);
  const RatFn rhs(-((one + y) * f.F1 * f.F2), x * y * (b * y + x) * f.F3);
  Certificate c = identity_certificate("delta1", lhs, rhs);
  // Exact cross-check at sample points against the iterated map.
  const Sampler rng(0xD1, 1);
  bool agree = true;
  for (std::uint64_t i = 0; i < 100; ++i) {
    std::vector<Rational> pt(vars->size());
    for (unsigned s = 0; s < 5; ++s) pt[s] = rng.positive(i, s);
    try {
      agree = agree && rhs.eval(pt) == delta_eval(1, pt[0], pt[1], pt[2], pt[3], pt[4]);
    } catch (const std::domain_error&) {
    }
  }
  c.checks.emplace_back("factored form matches iterated map at 100 rational points", agree);
  return c;
}

// ------------------------------------------------------------------ claims

SubstitutionPlan claim3_plan(Subcase sc, const VarTablePtr& vars) {
  const Vars V{vars};
  const Poly one = V.c(1), s = V("s"), t = V("t"), B = V("B"), v = V("v"), w = V("w"), k = V("k");
  const Poly ds = one + s, dB = one + B;
  const Poly U = one + s + s * B + t * ds;  // u = U / ds
  const Poly G = one + s * dB * dB;         // g = G / (dB ds)
  SubstitutionPlan plan;
  plan.claim = "claim3";
  plan.region = to_string(sc);
  plan.strict = {"s", "t", "B"};
  plan.steps.push_back({"b", RatFn(one, dB), {{dB, 1}}, "b = 1/(1+B), B > 0 encodes b < 1"});
  plan.steps.push_back({"g", RatFn(G, dB * ds), {{dB, 1}, {ds, 1}}, "g = (b + s/b)/(1+s), s > 0 encodes g > b"});
  plan.steps.push_back({"u", RatFn(U, ds), {{ds, 1}}, "u = (g+1)/(b+1) + t, t > 0"});
  const bool q1 = sc == Subcase::Q1_w_ge_v || sc == Subcase::Q1_v_ge_w;
  const bool w_ge_v = sc == Subcase::Q1_w_ge_v || sc == Subcase::Q3_w_ge_v;
  const Poly vv = w_ge_v ? v : w + k, ww = w_ge_v ? v + k : w;
  plan.nonstrict = w_ge_v ? std::vector<std::string>{"v", "k"} : std::vector<std::string>{"w", "k"};
  const std::string split = w_ge_v ? "w = v + k" : "v = w + k";
  if (q1) {
    plan.steps.push_back({"x", RatFn(U + vv * ds, ds), {{ds, 1}}, "x = u + v, " + split});
    plan.steps.push_back({"y", RatFn(U + ww * ds, ds), {{ds, 1}}, "y = u + w, " + split});
  } else {
    const Poly dv = vv + one, dw = ww + one;
    plan.steps.push_back({"x", RatFn(U, ds * dv), {{ds, 1}, {dv, 1}}, "x = u/(v+1), " + split});
    plan.steps.push_back({"y", RatFn(U, ds * dw), {{ds, 1}, {dw, 1}}, "y = u/(w+1), " + split});
  }
  return plan;
}

SubstitutionPlan claim4_plan(Subcase sc, const VarTablePtr& vars) {
  const Vars V{vars};
  const Poly one = V.c(1), s = V("s"), t = V("t"), l = V("l"), v = V("v"), w = V("w"), k = V("k");
  const Poly U = one + t, db = one + t + s, dg = one + t + s + l;
  SubstitutionPlan plan;
  plan.claim = "claim4";
  plan.region = to_string(sc);
  plan.strict = {"t", "s", "l"};
  plan.steps.push_back({"u", RatFn(U), {}, "u = 1 + t, t > 0"});
  plan.steps.push_back({"b", RatFn(one, db), {{db, 1}}, "b = 1/(1+t+s), s > 0 encodes u < 1/b"});
  plan.steps.push_back({"g", RatFn(one, dg), {{dg, 1}}, "g = 1/(1+t+s+l), l > 0 encodes g < b"});
  const bool q1 = sc == Subcase::Q1_w_ge_v || sc == Subcase::Q1_v_ge_w;
  const bool w_ge_v = sc == Subcase::Q1_w_ge_v || sc == Subcase::Q3_w_ge_v;
  const Poly vv = w_ge_v ? v : w + k, ww = w_ge_v ? v + k : w;
  plan.nonstrict = w_ge_v ? std::vector<std::string>{"v", "k"} : std::vector<std::string>{"w", "k"};
  const std::string split = w_ge_v ? "w = v + k" : "v = w + k";
  if (q1) {
    plan.steps.push_back({"x", RatFn(U + vv), {}, "x = u + v, " + split});
    plan.steps.push_back({"y", RatFn(U + ww), {}, "y = u + w, " + split});
  } else {
    const Poly dv = vv + one, dw = ww + one;
    plan.steps.push_back({"x", RatFn(U, dv), {{dv, 1}}, "x = u/(v+1), " + split});
    plan.steps.push_back({"y", RatFn(U, dw), {{dw, 1}}, "y = u/(w+1), " + split});
  }
  return plan;
}

namespace {

const VarTablePtr& claim3_vars() {
  static const VarTablePtr v = map_vars({"s", "t", "B", "v", "w", "k"});
  return v;
}

const VarTablePtr& claim4_vars() {
  static const VarTablePtr v = map_vars({"t", "s", "l", "v", "w", "k"});
  return v;
}

// Delta_k numerators are shared by the four subcases of a claim.
const DeltaParts& cached_parts(unsigned k, const VarTablePtr& vars) {
  static std::mutex mu;
  static std::map<std::pair<unsigned, const poly::VarTable*>, std::shared_ptr<const DeltaParts>> cache;
  std::shared_ptr<const DeltaParts> hit;
  {
    std::lock_guard lock(mu);
    auto it = cache.find({k, vars.get()});
    if (it != cache.end()) hit = it->second;
  }
  if (!hit) {
    auto fresh = std::make_shared<const DeltaParts>(delta_parts(k, vars));
    std::lock_guard lock(mu);
    hit = cache.emplace(std::make_pair(k, vars.get()), fresh).first->second;
  }
  return *hit;
}

Certificate run_claim(unsigned k, Subcase sc, SubstitutionPlan plan, const VarTablePtr& vars, const Options& opts) {
  const DeltaParts& parts = cached_parts(k, vars);
  Certificate c;
  c.claim = plan.claim;
  c.subcase = to_string(sc);
  const auto subs = to_substitutions(plan);
  const auto res = poly::substitute_all(parts.numerator, subs);
  const Poly& num = res.value.num();
  c.verdict = coefficient_verdict(num, c);

  // Denominators: the cleared substitution factors and each factor of
  // Delta_k's own denominator after the plan.
  for (const auto& [f, m] : res.den_factors) c.denominators.push_back(positivity_by_coefficients("(" + f.to_string() + ")^" + std::to_string(m), f, plan));
  c.denominators.push_back(positivity_by_coefficients("expanded cleared denominator", res.value.den(), plan));
  for (const auto& [name, f] : parts.den_factors) {
    const auto r = poly::substitute_all(f, subs);
    c.denominators.push_back(positivity_by_coefficients(name, r.value.num(), plan));
  }

  Poly at_fixed = num;
  for (const char* n : {"v", "w", "k"}) at_fixed = at_fixed.specialize(vars->index(n), 0);
  c.fixed_point_annihilates = at_fixed.is_zero();

  SoundnessReport snd;
  const Sampler rng(opts.seed, (static_cast<std::uint64_t>(k) << 8) | static_cast<unsigned>(sc));
  for (std::uint64_t i = 0; i < opts.samples; ++i) {
    const auto slack = sample_slacks(plan, vars, rng, i);
    const Rational x = eval_step(plan, "x", slack), y = eval_step(plan, "y", slack), u = eval_step(plan, "u", slack),
                   g = eval_step(plan, "g", slack), b = eval_step(plan, "b", slack);
    const Rational d = delta_eval(k, x, y, u, g, b);
    ++snd.samples;
    if (sgn(d) < 0) ++snd.negative;
    if (sgn(d) == 0) {
      ++snd.zero;
      if (!(x == u && y == u)) ++snd.zero_off_equilibrium;
    }
    if (i < opts.cross_checks) {
      auto mapped = zero_point(vars);
      mapped[vars->index("x")] = x;
      mapped[vars->index("y")] = y;
      mapped[vars->index("u")] = u;
      mapped[vars->index("g")] = g;
      mapped[vars->index("b")] = b;
      const Rational n_direct = parts.numerator.eval(mapped);
      Rational den = 1;
      for (const auto& [name, f] : parts.den_factors) den *= f.eval(mapped);
      const bool same = n_direct == d * den && num.eval(slack) == n_direct * res.value.den().eval(slack);
      ++snd.cross_checked;
      if (!same) ++snd.cross_mismatch;
    }
  }
  c.soundness = snd;
  c.caveats.emplace_back(kStrictCaveat);
  c.plan = std::move(plan);
  return c;
}

}  // namespace

Certificate certify_claim3(Subcase sc, const Options& opts) {
  const auto& vars = claim3_vars();
  return run_claim(2, sc, claim3_plan(sc, vars), vars, opts);
}

Certificate certify_claim4(Subcase sc, const Options& opts) {
  const auto& vars = claim4_vars();
  return run_claim(3, sc, claim4_plan(sc, vars), vars, opts);
}

// ---------------------------------------------------------------- embed-h

namespace {

Poly h_poly(const Vars& V) {
  const Poly p = V("p"), q = V("q"), r = V("r"), y = V("y"), z = V("z");
  const Poly two = V.c(2);
  return -(q * q * r * r) + two * p * q * r * y - two * q * q * r * y + p * p * q * y * y - p * q * q * y * y +
         q * q * r * y * y + p * r * z - q * r * z + p * q * r * z - q * q * r * z + two * p * q * y * z -
         two * q * q * y * z + two * q * r * y * z + p * z * z - q * z * z + r * z * z;
}

}  // namespace

Certificate certify_embed_h(const Options& opts) {
  const auto vars = poly::make_vars({"p", "q", "r", "y", "z", "d", "v", "w"});
  const Vars V{vars};
  const Poly p = V("p"), q = V("q"), r = V("r"), y = V("y"), z = V("z"), d = V("d"), v = V("v"), w = V("w");
  const Poly one = V.c(1), two = V.c(2);
  const Poly h = h_poly(V);

  SubstitutionPlan plan;
  plan.claim = "embed-h";
  plan.region = "p > q, y, z >= qr/(p-q)";
  plan.strict = {"q", "d"};
  plan.nonstrict = {"r", "v", "w"};
  plan.steps.push_back({"p", RatFn(q + d), {}, "p = q + d, d > 0"});
  plan.steps.push_back({"y", RatFn(q * r + v * d, d), {{d, 1}}, "y = qr/d + v"});
  plan.steps.push_back({"z", RatFn(q * r + w * d, d), {{d, 1}}, "z = qr/d + w"});
  const auto subs = to_substitutions(plan);
  const auto res = poly::substitute_all(h, subs);

  Certificate c;
  c.claim = "embed-h";
  c.verdict = coefficient_verdict(res.value.num(), c);
  for (const auto& [f, m] : res.den_factors) c.denominators.push_back(positivity_by_coefficients("(" + f.to_string() + ")^" + std::to_string(m), f, plan));

  // Corner value, both partial derivatives.
  const Poly pd = q + d;
  const RatFn corner_expected(q * (one + q) * (one + q) * r * r * (pd * pd - pd * q + q * r), d * d);
  const Substitution at_corner[] = {{"v", RatFn(V.c(0))}, {"w", RatFn(V.c(0))}};
  const RatFn corner = poly::substitute(res.value, at_corner);
  c.checks.emplace_back("corner value q(1+q)^2 r^2 ((q+d)^2-(q+d)q+qr)/d^2", corner.equivalent(corner_expected));
  const Poly d1 = two * (p - q) * q * r + two * q * (p * p - p * q + q * r) * y + two * q * (p - q + r) * z;
  const Poly d2 = (p - q) * (one + q) * r + two * q * (p - q + r) * y + two * (p - q + r) * z;
  c.checks.emplace_back("D1 h matches the displayed expansion", derivative(h, vars->index("y")) == d1);
  c.checks.emplace_back("D2 h matches the displayed expansion", derivative(h, vars->index("z")) == d2);

  SoundnessReport snd;
  const Sampler rng(opts.seed, 0xE1);
  for (std::uint64_t i = 0; i < opts.samples; ++i) {
    const auto slack = sample_slacks(plan, vars, rng, i);
    auto pt = slack;
    for (const auto& s : plan.steps) pt[vars->index(s.var)] = s.value.eval(slack);
    const Rational hv = h.eval(pt);
    ++snd.samples;
    if (sgn(hv) < 0) ++snd.negative;
    if (sgn(hv) == 0) {
      ++snd.zero;
      const bool corner_pattern = sgn(slack[vars->index("r")]) == 0 && sgn(slack[vars->index("v")]) == 0 &&
                                  sgn(slack[vars->index("w")]) == 0;
      if (!corner_pattern) ++snd.zero_off_equilibrium;
    }
    if (i < opts.cross_checks) {
      ++snd.cross_checked;
      if (res.value.num().eval(slack) != hv * res.value.den().eval(slack)) ++snd.cross_mismatch;
    }
  }
  c.soundness = snd;
  c.caveats.emplace_back("h vanishes on the face r = v = w = 0; positivity elsewhere is checked by sampling");
  c.plan = std::move(plan);
  return c;
}

// --------------------------------------------------------------- a-coeffs

Certificate certify_a_coeffs(const Options& opts) {
  const auto vars = poly::make_vars({"p", "q", "r", "e"});
  const Vars V{vars};
  const Poly p = V("p"), q = V("q"), r = V("r"), e = V("e"), one = V.c(1);
  const Poly two = V.c(2), three = V.c(3), four = V.c(4);
  const Poly a0 = r * (p + two * p * q + p * p * q + q * r + two * q * q * r);
  const Poly a1 = p + p * p + two * p * q + three * p * p * q + p * p * p * q + r - p * r + four * q * r +
                  four * q * q * r + two * p * q * q * r;
  const Poly a2 = (one + q) * (one + two * q + p * q + q * r);

  SubstitutionPlan plan;
  plan.claim = "a-coeffs";
  plan.region = "p > 0, r >= 0, r <= p^2 q - p";
  plan.strict = {"p"};
  plan.nonstrict = {"r", "e"};
  plan.steps.push_back({"q", RatFn(r + p + e * p * p, p * p), {{p, 2}}, "q = (r+p)/p^2 + e, e >= 0 encodes r <= p^2 q - p"});
  const auto res = poly::substitute_all(a1, to_substitutions(plan));

  Certificate c;
  c.claim = "a-coeffs";
  c.verdict = coefficient_verdict(res.value.num(), c);
  for (const auto& [f, m] : res.den_factors) c.denominators.push_back(positivity_by_coefficients("(" + f.to_string() + ")^" + std::to_string(m), f, plan));
  const auto r0 = report_of(a0), r2 = report_of(a2);
  c.checks.emplace_back("a0 has nonnegative coefficients in p, q, r", r0.n_negative == 0 && !a0.is_zero());
  c.checks.emplace_back("a2 has nonnegative coefficients in p, q, r", r2.n_negative == 0 && !a2.is_zero());

  SoundnessReport snd;
  const Sampler rng(opts.seed, 0xA1);
  for (std::uint64_t i = 0; i < opts.samples; ++i) {
    const auto slack = sample_slacks(plan, vars, rng, i);
    auto pt = slack;
    pt[vars->index("q")] = plan.steps[0].value.eval(slack);
    const Rational v = a1.eval(pt);
    ++snd.samples;
    if (sgn(v) < 0) ++snd.negative;
    if (sgn(v) == 0) ++snd.zero, ++snd.zero_off_equilibrium;
    if (i < opts.cross_checks) {
      ++snd.cross_checked;
      if (res.value.num().eval(slack) != v * res.value.den().eval(slack)) ++snd.cross_mismatch;
    }
  }
  c.soundness = snd;
  c.plan = std::move(plan);
  return c;
}

// ------------------------------------------------------------- identities

Certificate certify_parameter_identities() {
  const auto vars = poly::make_vars({"A", "B", "C", "alpha", "beta", "gamma"});
  const Vars V{vars};
  const Poly A = V("A"), B = V("B"), C = V("C"), al = V("alpha"), be = V("beta"), ga = V("gamma");
  const Poly one = V.c(1), two = V.c(2);
  const Poly bc = B + C, den = A * C + bc * ga;
  const RatFn p(A * B + bc * be, den);
  const RatFn q(B, C);
  const RatFn r(C * bc * (B * al + C * al - A * be - A * ga), den * den);
  const Poly R = A * A * C * C + B * C * C * al + C * C * C * al - A * C * C * be + two * A * B * C * ga +
                 A * C * C * ga + B * B * ga * ga + two * B * C * ga * ga + C * C * ga * ga;
  const Poly E = -(C * C * al) + A * C * ga - C * be * ga + B * ga * ga;

  Certificate c = identity_certificate("identities", q + r + RatFn(one), RatFn(bc * R, C * den * den));
  c.checks.emplace_back("q + r + 1 identity", c.verdict == Verdict::IdentityHolds);
  const auto i57 = identity_certificate("", p - q + r, RatFn(-(bc * bc * E), C * den * den));
  c.checks.emplace_back("p - q + r identity", i57.verdict == Verdict::IdentityHolds);
  // gamma/(A C) R - E as a sum of positive terms over A C.
  const RatFn lhs55 = RatFn(ga * R, A * C) - RatFn(E);
  const Poly rhs_num = A * C * C * C * al + B * C * C * al * ga + C * C * C * al * ga + A * B * C * ga * ga +
                       A * C * C * ga * ga + two * B * C * ga * ga * ga + B * B * ga * ga * ga + C * C * ga * ga * ga;
  const RatFn rhs55(rhs_num, A * C);
  const auto i55 = identity_certificate("", lhs55, rhs55);
  c.checks.emplace_back("gamma/(AC) R - E identity", i55.verdict == Verdict::IdentityHolds);
  c.checks.emplace_back("gamma/(AC) R - E is a sum of positive terms", report_of(rhs_num).n_negative == 0);
  const std::vector<Rational> ones(vars->size(), Rational(1));
  c.checks.emplace_back("q + r + 1 = 2 at all-ones parameters", (q + r + RatFn(one)).eval(ones) == 2);
  if (c.verdict == Verdict::IdentityHolds && (i57.verdict != Verdict::IdentityHolds || i55.verdict != Verdict::IdentityHolds)) {
    c.verdict = Verdict::Refuted;
    c.witness = i57.witness ? i57.witness : i55.witness;
  }
  return c;
}

// ------------------------------------------------------------------ cubic

namespace {

Certificate cubic_certificate(bool as_printed) {
  const auto vars = poly::make_vars({"p", "q", "r", "m"});
  const Vars V{vars};
  const Poly p = V("p"), q = V("q"), r = V("r"), m = V("m"), one = V.c(1);
  const Poly cubic = q * (q + one) * m * m * m + (one - p * q) * m * m + (-one - p - q * r) * m - r;
  const Poly q1 = one + q;
  // q(q+1)(m + 1/q) = (q+1)(q m + 1); the quadratic is cleared by (1+q)^2.
  const Poly quad = as_printed ? q1 * q1 * m * m - (one - p) * q1 * m - (p + r * q1)
                               : q1 * m * m - (p + one) * m - r;
  const Poly quad_den = as_printed ? q1 * q1 : q1;
  const RatFn rhs(q1 * (q * m + one) * quad, quad_den);
  Certificate c = identity_certificate(as_printed ? "cubic-as-printed" : "cubic", RatFn(cubic), rhs);
  const Substitution root[] = {{"m", RatFn(-one, q)}};
  c.checks.emplace_back("m = -1/q annihilates the cubic", poly::substitute(RatFn(cubic), root).is_zero());
  return c;
}

}  // namespace

Certificate certify_cubic_roots() { return cubic_certificate(false); }
Certificate certify_cubic_roots_as_printed() { return cubic_certificate(true); }

// ------------------------------------------------------------------- json

nlohmann::json to_json(const Certificate& c, bool include_plan) {
  nlohmann::json j;
  j["claim"] = c.claim;
  if (!c.subcase.empty()) j["subcase"] = c.subcase;
  j["verdict"] = to_string(c.verdict);
  j["passed"] = c.passed();
  j["witness"] = c.witness ? nlohmann::json(*c.witness) : nlohmann::json(nullptr);
  j["n_terms"] = c.stats.n_terms;
  j["n_negative"] = c.stats.n_negative;
  j["min_coeff"] = c.stats.min_coeff.get_str();
  j["max_coeff"] = c.stats.max_coeff.get_str();
  j["max_total_degree"] = c.stats.max_total_degree;
  auto& dens = j["denominators"] = nlohmann::json::array();
  for (const auto& d : c.denominators)
    dens.push_back({{"label", d.label}, {"method", d.method}, {"positive", d.positive}, {"n_terms", d.report.n_terms},
                    {"n_negative", d.report.n_negative}});
  if (c.soundness) {
    const auto& s = *c.soundness;
    j["soundness"] = {{"samples", s.samples},           {"negative", s.negative},
                      {"zero", s.zero},                 {"zero_off_equilibrium", s.zero_off_equilibrium},
                      {"cross_checked", s.cross_checked}, {"cross_mismatch", s.cross_mismatch},
                      {"ok", s.ok()}};
  }
  if (c.fixed_point_annihilates) j["fixed_point_annihilates"] = *c.fixed_point_annihilates;
  auto& checks = j["checks"] = nlohmann::json::array();
  for (const auto& [name, ok] : c.checks) checks.push_back({{"name", name}, {"passed", ok}});
  j["caveats"] = c.caveats;
  if (include_plan && c.plan) {
    auto& steps = j["plan"]["steps"] = nlohmann::json::array();
    j["plan"]["region"] = c.plan->region;
    j["plan"]["strict"] = c.plan->strict;
    j["plan"]["nonstrict"] = c.plan->nonstrict;
    for (const auto& s : c.plan->steps)
      steps.push_back({{"var", s.var},
                       {"num", s.value.num().to_string()},
                       {"den", s.value.den().to_string()},
                       {"rationale", s.rationale}});
  }
  return j;
}

}  // namespace ratdyn::certify
