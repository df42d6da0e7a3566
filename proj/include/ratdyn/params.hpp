#pragma once

// Parameter domains and changes of variables between the six-parameter
// equation and its normalized three/four-parameter forms.

#include "json.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ratdyn {

/// x_{n+1} = (alpha + beta x_n + gamma x_{n-1}) / (A + B x_n + C x_{n-1}).
struct Params33 {
  double alpha = 0, beta = 0, gamma = 0;
  double A = 0, B = 0, C = 0;

  bool strictly_positive() const { return alpha > 0 && beta > 0 && gamma > 0 && A > 0 && B > 0 && C > 0; }
};

struct ValidationReport {
  bool finite = true;
  bool nonnegative = true;
  bool denominator_ok = true;  // B + C > 0
  bool numerator_ok = true;    // alpha + beta + gamma > 0
  bool strictly_positive = false;
  std::vector<std::string> problems;

  bool valid() const { return finite && nonnegative && denominator_ok && numerator_ok; }
};

enum class Form { ThreeTwo, ThreeTwoL };

/// y_{n+1} = (r + p y_n + y_{n-1}) / (q y_n + y_{n-1}) on [L, inf).
struct NormParams {
  double p = 0, q = 0, r = 0;
  double L = 0;
  Form form = Form::ThreeTwo;
  double equilibrium = 0;
  /// Set by to_pqr_l; needed for the envelope of the L-form.
  std::optional<Params33> origin;
};

/// x = scale * y + offset.
struct AffineMap {
  double scale = 1;
  double offset = 0;

  double apply(double y) const { return scale * y + offset; }
  double invert(double x) const { return (x - offset) / scale; }
};

struct ZForm {
  double a = 0, g = 0, b = 0;
  /// Equilibrium of the z-equation, equal to ybar / p.
  double u = 0;
};

ValidationReport validate(const Params33& params);

/// Throws std::domain_error unless params are strictly positive.
std::pair<NormParams, AffineMap> to_pqr_l(const Params33& params);

/// A = 0 reduction via x_n = (gamma / C) y_n. Throws std::domain_error
/// when A != 0 or any other parameter is not positive.
NormParams to_pqr(const Params33& params);

/// Throws std::domain_error when p <= 0.
ZForm to_zform(const NormParams& norm);
/// Inverse of to_zform.
NormParams from_zform(const ZForm& z);

/// Positive root of (q+1) x^2 - (p+1) x - r. Throws std::domain_error for
/// q <= -1 or a negative discriminant.
double equilibrium(double p, double q, double r);

/// Validated constructors; throw std::domain_error on inadmissible input.
NormParams make_norm(double p, double q, double r);
NormParams make_norm_l(double p, double q, double r, double L);

const char* to_string(Form form);

void to_json(nlohmann::json& j, const Params33& v);
void from_json(const nlohmann::json& j, Params33& v);
void to_json(nlohmann::json& j, const NormParams& v);
void from_json(const nlohmann::json& j, NormParams& v);
void to_json(nlohmann::json& j, const AffineMap& v);
void from_json(const nlohmann::json& j, AffineMap& v);
void to_json(nlohmann::json& j, const ValidationReport& v);

}  // namespace ratdyn
