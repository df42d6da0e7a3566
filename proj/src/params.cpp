#include "ratdyn/params.hpp"

#include <cmath>
#include <stdexcept>

namespace ratdyn {

ValidationReport validate(const Params33& v) {
  ValidationReport rep;
  const double all[] = {v.alpha, v.beta, v.gamma, v.A, v.B, v.C};
  for (double x : all) rep.finite = rep.finite && std::isfinite(x);
  if (!rep.finite) rep.problems.emplace_back("parameters must be finite");
  for (double x : all) rep.nonnegative = rep.nonnegative && x >= 0;
  if (!rep.nonnegative) rep.problems.emplace_back("parameters must be nonnegative");
  rep.denominator_ok = v.B + v.C > 0;
  if (!rep.denominator_ok) rep.problems.emplace_back("B + C must be positive");
  rep.numerator_ok = v.alpha + v.beta + v.gamma > 0;
  if (!rep.numerator_ok) rep.problems.emplace_back("alpha + beta + gamma must be positive");
  rep.strictly_positive = rep.finite && v.strictly_positive();
  return rep;
}

double equilibrium(double p, double q, double r) {
  if (!(q > -1)) throw std::domain_error("equilibrium: q must exceed -1");
  const double disc = (p + 1) * (p + 1) + 4 * r * (q + 1);
  if (!(disc >= 0)) throw std::domain_error("equilibrium: negative discriminant");
  const double y = (p + 1 + std::sqrt(disc)) / (2 * (q + 1));
  if (!(y > 0)) throw std::domain_error("equilibrium: not positive");
  return y;
}

NormParams make_norm(double p, double q, double r) {
  if (!(p > 0 && q > 0 && r >= 0) || !std::isfinite(p + q + r))
    throw std::domain_error("form 3-2 needs p > 0, q > 0, r >= 0");
  NormParams n;
  n.p = p;
  n.q = q;
  n.r = r;
  n.equilibrium = equilibrium(p, q, r);
  return n;
}

NormParams make_norm_l(double p, double q, double r, double L) {
  if (!(p > 0 && q > 0) || !std::isfinite(p + q + r + L)) throw std::domain_error("form 3-2-L needs p > 0, q > 0");
  if (!(L > 0 && L < 1)) throw std::domain_error("form 3-2-L needs 0 < L < 1");
  NormParams n;
  n.p = p;
  n.q = q;
  n.r = r;
  n.L = L;
  n.form = Form::ThreeTwoL;
  n.equilibrium = equilibrium(p, q, r);
  return n;
}

std::pair<NormParams, AffineMap> to_pqr_l(const Params33& v) {
  if (!validate(v).strictly_positive) throw std::domain_error("to_pqr_l: parameters must be strictly positive");
  const double bc = v.B + v.C;
  const double den = v.A * v.C + bc * v.gamma;
  NormParams n;
  n.p = (v.A * v.B + bc * v.beta) / den;
  n.q = v.B / v.C;
  n.r = v.C * bc * (v.B * v.alpha + v.C * v.alpha - v.A * v.beta - v.A * v.gamma) / (den * den);
  n.L = v.A * v.C / den;
  n.form = Form::ThreeTwoL;
  n.equilibrium = equilibrium(n.p, n.q, n.r);
  n.origin = v;
  AffineMap m{v.gamma / v.C + v.A / bc, -v.A / bc};
  return {n, m};
}

NormParams to_pqr(const Params33& v) {
  if (v.A != 0) throw std::domain_error("to_pqr: requires A = 0");
  if (!(v.alpha > 0 && v.beta > 0 && v.gamma > 0 && v.B > 0 && v.C > 0))
    throw std::domain_error("to_pqr: alpha, beta, gamma, B, C must be positive");
  return make_norm(v.beta / v.gamma, v.B / v.C, v.alpha * v.C / (v.gamma * v.gamma));
}

ZForm to_zform(const NormParams& n) {
  if (!(n.p > 0)) throw std::domain_error("to_zform: p must be positive");
  return {n.r / (n.p * n.p), 1 / n.p, n.q, n.equilibrium / n.p};
}

NormParams from_zform(const ZForm& z) {
  if (!(z.g > 0)) throw std::domain_error("from_zform: g must be positive");
  const double p = 1 / z.g;
  return make_norm(p, z.b, z.a * p * p);
}

const char* to_string(Form form) { return form == Form::ThreeTwo ? "3-2" : "3-2-L"; }

void to_json(nlohmann::json& j, const Params33& v) {
  j = {{"alpha", v.alpha}, {"beta", v.beta}, {"gamma", v.gamma}, {"A", v.A}, {"B", v.B}, {"C", v.C}};
}

void from_json(const nlohmann::json& j, Params33& v) {
  j.at("alpha").get_to(v.alpha);
  j.at("beta").get_to(v.beta);
  j.at("gamma").get_to(v.gamma);
  j.at("A").get_to(v.A);
  j.at("B").get_to(v.B);
  j.at("C").get_to(v.C);
}

void to_json(nlohmann::json& j, const NormParams& v) {
  j = {{"p", v.p}, {"q", v.q}, {"r", v.r}, {"L", v.L}, {"form", to_string(v.form)}, {"equilibrium", v.equilibrium}};
  if (v.origin) j["origin"] = *v.origin;
}

void from_json(const nlohmann::json& j, NormParams& v) {
  const std::string form = j.value("form", "3-2");
  if (form == "3-2") {
    v = make_norm(j.at("p").get<double>(), j.at("q").get<double>(), j.at("r").get<double>());
  } else if (form == "3-2-L") {
    v = make_norm_l(j.at("p").get<double>(), j.at("q").get<double>(), j.at("r").get<double>(), j.at("L").get<double>());
    if (j.contains("origin")) v.origin = j.at("origin").get<Params33>();
  } else {
    throw std::invalid_argument("unknown form: " + form);
  }
}

void to_json(nlohmann::json& j, const AffineMap& v) { j = {{"scale", v.scale}, {"offset", v.offset}}; }

void from_json(const nlohmann::json& j, AffineMap& v) {
  j.at("scale").get_to(v.scale);
  j.at("offset").get_to(v.offset);
}

void to_json(nlohmann::json& j, const ValidationReport& v) {
  j = {{"valid", v.valid()},
       {"finite", v.finite},
       {"nonnegative", v.nonnegative},
       {"B_plus_C_positive", v.denominator_ok},
       {"alpha_beta_gamma_positive", v.numerator_ok},
       {"strictly_positive", v.strictly_positive},
       {"problems", v.problems}};
}

}  // namespace ratdyn
