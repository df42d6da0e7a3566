#pragma once

// Exact certificates: the invariant-function decrease claims, the embedded
// map bound, the a-coefficients, parameter identities and the cubic roots.

#include "ratdyn/poly.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ratdyn::certify {

using poly::CoefficientReport;
using poly::Factorization;
using poly::Poly;
using poly::RatFn;
using poly::Rational;
using poly::VarTablePtr;

enum class Verdict { AllCoefficientsNonnegative, IdentityHolds, Refuted };

struct PlanStep {
  std::string var;
  RatFn value;
  Factorization den_factors;
  std::string rationale;
};

/// Replacements written in fresh slack variables; the admissible region
/// maps onto the closed orthant of the nonnegative ones with the strict
/// ones positive.
struct SubstitutionPlan {
  std::string claim;
  std::string region;
  std::vector<PlanStep> steps;
  std::vector<std::string> strict;     // slack > 0
  std::vector<std::string> nonstrict;  // slack >= 0
};

struct DenominatorCertificate {
  std::string label;
  std::string method;  // "coefficients" or "corner"
  bool positive = false;
  CoefficientReport report;
};

struct SoundnessReport {
  std::size_t samples = 0;
  std::size_t negative = 0;
  std::size_t zero = 0;
  /// Zeros at points that are not the equilibrium slack pattern.
  std::size_t zero_off_equilibrium = 0;
  /// Samples where the expanded numerator was compared against the
  /// directly evaluated expression, and how many disagreed.
  std::size_t cross_checked = 0;
  std::size_t cross_mismatch = 0;
  bool ok() const { return negative == 0 && zero_off_equilibrium == 0 && cross_mismatch == 0; }
};

struct Certificate {
  std::string claim;
  std::string subcase;
  std::optional<SubstitutionPlan> plan;
  Verdict verdict = Verdict::Refuted;
  std::optional<std::string> witness;
  CoefficientReport stats;
  std::vector<DenominatorCertificate> denominators;
  std::optional<SoundnessReport> soundness;
  std::optional<bool> fixed_point_annihilates;
  /// Secondary exact checks (name, passed).
  std::vector<std::pair<std::string, bool>> checks;
  std::vector<std::string> caveats;

  /// Verdict is not Refuted and every attached check passed.
  bool passed() const;
};

enum class Subcase { Q1_w_ge_v, Q1_v_ge_w, Q3_w_ge_v, Q3_v_ge_w };

inline constexpr Subcase kSubcases[] = {Subcase::Q1_w_ge_v, Subcase::Q1_v_ge_w, Subcase::Q3_w_ge_v,
                                        Subcase::Q3_v_ge_w};

const char* to_string(Subcase s);
std::optional<Subcase> parse_subcase(std::string_view s);
const char* to_string(Verdict v);

/// Table with x, y, u, g, b first; extra names follow.
VarTablePtr map_vars(std::vector<std::string> extra = {});

/// T(x, y) = (y, ((b+1)u^2 - (g+1)u + y + g x) / (b y + x)).
std::pair<RatFn, RatFn> build_T(const VarTablePtr& vars);

/// V(x, y) = (1+x)(1+y)(u^2 - u + x + y) / (x y).
RatFn build_V(const VarTablePtr& vars);

/// Delta_k = V - V o T^k with its denominator kept as named factors
/// x, y, P_k, Q_k, P_{k+1}, Q_{k+1} where T^k = (P_k/Q_k, P_{k+1}/Q_{k+1}).
struct DeltaParts {
  Poly numerator;
  std::vector<std::pair<std::string, Poly>> den_factors;
  RatFn value() const;
};

DeltaParts delta_parts(unsigned k, const VarTablePtr& vars);

/// Delta_k as a single RatFn, k in {1, 2, 3}.
RatFn delta(unsigned k, const VarTablePtr& vars);

/// Direct rational evaluation of Delta_k by iterating the map.
/// Point order: x, y, u, g, b.
Rational delta_eval(unsigned k, const Rational& x, const Rational& y, const Rational& u, const Rational& g,
                    const Rational& b);

struct Delta1Factors {
  Poly F1, F2, F3;
};

/// F1, F2, F3 with x and y exchanged to match the state order of build_T.
Delta1Factors delta1_factors(const VarTablePtr& vars);

/// num(lhs) den(rhs) - num(rhs) den(lhs) == 0.
Certificate identity_certificate(std::string claim, const RatFn& lhs, const RatFn& rhs);

struct Options {
  std::size_t samples = 1000;
  std::size_t cross_checks = 8;
  std::uint64_t seed = 0x5eed;
};

/// f1_shift is added to F1 (mutation control; 0 for the real check).
Certificate verify_delta1_factorization(const Rational& f1_shift = 0);

SubstitutionPlan claim3_plan(Subcase s, const VarTablePtr& vars);
SubstitutionPlan claim4_plan(Subcase s, const VarTablePtr& vars);

/// Delta_2 > 0 on Q1 u Q3 when g > b.
Certificate certify_claim3(Subcase s, const Options& opts = {});
/// Delta_3 > 0 on Q1 u Q3 when g < b and u > 1.
Certificate certify_claim4(Subcase s, const Options& opts = {});

Certificate certify_embed_h(const Options& opts = {});
Certificate certify_a_coeffs(const Options& opts = {});
Certificate certify_parameter_identities();
Certificate certify_cubic_roots();
/// The factorization with the printed root pair; expected Refuted.
Certificate certify_cubic_roots_as_printed();

/// Rational sampler keyed by (seed, stream, index).
class Sampler {
 public:
  Sampler(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}
  /// Value in (0, 8] with denominators up to 12.
  Rational positive(std::uint64_t index, unsigned slot) const;
  /// As positive() but exactly zero with probability about 1/5.
  Rational nonnegative(std::uint64_t index, unsigned slot) const;

 private:
  std::uint64_t draw(std::uint64_t index, unsigned slot, unsigned k) const;
  std::uint64_t seed_, stream_;
};

nlohmann::json to_json(const Certificate& c, bool include_plan = true);

}  // namespace ratdyn::certify
