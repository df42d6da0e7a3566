#pragma once

// Exact sparse multivariate polynomials and rational functions over Q.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ratdyn::poly {

using Integer = mpz_class;
using Rational = mpq_class;

/// Ordered variable names. The index of a name is its exponent slot.
class VarTable {
 public:
  static constexpr std::size_t kMaxVars = 16;

  VarTable() = default;
  explicit VarTable(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }

  /// Throws std::out_of_range for unknown names.
  std::size_t index(std::string_view name) const;
  std::optional<std::size_t> find(std::string_view name) const;

  bool operator==(const VarTable& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
};

using VarTablePtr = std::shared_ptr<const VarTable>;

VarTablePtr make_vars(std::vector<std::string> names);

/// Exponent vector packed 8 bits per slot; slot 0 is the most significant
/// byte so integer comparison of (hi, lo) is lexicographic order.
class Monomial {
 public:
  static constexpr unsigned kMaxExponent = 255;

  constexpr Monomial() = default;

  unsigned exponent(std::size_t slot) const {
    const std::uint64_t word = slot < 8 ? hi_ : lo_;
    const unsigned shift = 8U * (7U - static_cast<unsigned>(slot % 8));
    return static_cast<unsigned>((word >> shift) & 0xFFU);
  }
  void set_exponent(std::size_t slot, unsigned e);

  unsigned total_degree() const;
  bool is_one() const { return hi_ == 0 && lo_ == 0; }

  /// Product; callers guarantee no slot overflows (see Poly::mul).
  friend Monomial operator*(Monomial a, Monomial b) {
    Monomial m;
    m.hi_ = a.hi_ + b.hi_;
    m.lo_ = a.lo_ + b.lo_;
    return m;
  }

  friend bool operator==(Monomial a, Monomial b) { return a.hi_ == b.hi_ && a.lo_ == b.lo_; }

  /// Graded lexicographic order.
  friend bool grlex_less(Monomial a, Monomial b) {
    const unsigned da = a.total_degree();
    const unsigned db = b.total_degree();
    if (da != db) return da < db;
    if (a.hi_ != b.hi_) return a.hi_ < b.hi_;
    return a.lo_ < b.lo_;
  }

  std::uint64_t hash() const {
    std::uint64_t h = hi_ * 0x9E3779B97F4A7C15ULL;
    h ^= lo_ + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    return h ^ (h >> 31);
  }

 private:
  std::uint64_t hi_ = 0;
  std::uint64_t lo_ = 0;
};

struct Term {
  Monomial mono;
  Rational coef;
};

struct CoefficientReport {
  std::size_t n_terms = 0;
  std::size_t n_negative = 0;
  Rational min_coeff = 0;
  Rational max_coeff = 0;
  unsigned max_total_degree = 0;
  /// Rendering of the most negative term, when one exists.
  std::optional<std::string> negative_witness;
};

/// Polynomial with rational coefficients. Terms are kept in descending
/// graded-lex order with no zero coefficients, so equality is structural.
class Poly {
 public:
  explicit Poly(VarTablePtr vars);
  Poly(VarTablePtr vars, const Rational& constant);

  static Poly variable(VarTablePtr vars, std::string_view name);
  static Poly from_terms(VarTablePtr vars, std::vector<Term> terms);

  const VarTablePtr& vars() const { return vars_; }
  std::span<const Term> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  unsigned total_degree() const;
  unsigned degree_in(std::size_t slot) const;
  bool mentions(std::size_t slot) const { return degree_in(slot) > 0; }
  Rational coefficient(Monomial m) const;

  Poly operator-() const;
  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly& operator+=(const Poly& b) { return *this = *this + b; }
  Poly& operator-=(const Poly& b) { return *this = *this - b; }
  Poly& operator*=(const Poly& b) { return *this = *this * b; }
  Poly scaled(const Rational& c) const;
  Poly pow(unsigned k) const;

  friend bool operator==(const Poly& a, const Poly& b);

  Rational eval(std::span<const Rational> point) const;

  /// Positive rational c such that this/c has coprime integer coefficients.
  Rational content() const;

  /// Exact quotient when `divisor` divides this polynomial, else nullopt.
  std::optional<Poly> divide_exact(const Poly& divisor) const;

  /// Replace a variable by a polynomial.
  Poly substitute(std::size_t slot, const Poly& value) const;

  /// Set a variable to a rational constant.
  Poly specialize(std::size_t slot, const Rational& value) const;

  /// Same polynomial viewed over another table containing every variable
  /// this one mentions.
  Poly rebased(VarTablePtr target) const;

  CoefficientReport coefficient_report() const;

  /// `coef*x^a*y^b + ...` in descending graded-lex order.
  std::string to_string() const;
  static Poly parse(VarTablePtr vars, std::string_view text);

 private:
  friend class RatFn;
  static Poly merge(const Poly& a, const Poly& b, bool subtract);
  void canonicalize();

  VarTablePtr vars_;
  std::vector<Term> terms_;
};

/// Quotient of polynomials. Only content and sign are normalized; no gcd.
class RatFn {
 public:
  RatFn(Poly num);
  RatFn(Poly num, Poly den);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  const VarTablePtr& vars() const { return num_.vars(); }
  bool is_zero() const { return num_.is_zero(); }

  friend RatFn operator+(const RatFn& a, const RatFn& b);
  friend RatFn operator-(const RatFn& a, const RatFn& b);
  friend RatFn operator*(const RatFn& a, const RatFn& b);
  friend RatFn operator/(const RatFn& a, const RatFn& b);
  RatFn operator-() const { return RatFn(-num_, den_); }

  /// Throws std::domain_error when the denominator vanishes at `point`.
  Rational eval(std::span<const Rational> point) const;

  /// num*other.den == other.num*den.
  bool equivalent(const RatFn& other) const;

 private:
  void normalize();

  Poly num_;
  Poly den_;
};

using Factorization = std::vector<std::pair<Poly, unsigned>>;

/// `var := value`. When `den_factors` is given its product must equal the
/// denominator of `value`; each distinct factor is then cleared separately.
struct Substitution {
  std::string var;
  RatFn value;
  Factorization den_factors = {};
};

/// Simultaneous substitution. Each distinct denominator factor F is cleared
/// by F^(joint degree of the target in the variables whose denominators
/// contain F). The cleared denominator is returned unexpanded in
/// `den_factors` and expanded in `value`.
struct SubstitutionResult {
  RatFn value;
  Factorization den_factors;
};

SubstitutionResult substitute_all(const Poly& target, std::span<const Substitution> subs);
RatFn substitute(const Poly& target, std::string_view var, const RatFn& value);
RatFn substitute(const RatFn& target, std::span<const Substitution> subs);

/// Componentwise composition: each map component with (x, y) replaced by
/// the point's components.
std::pair<RatFn, RatFn> compose_map(const std::pair<RatFn, RatFn>& map,
                                    const std::pair<RatFn, RatFn>& point,
                                    std::string_view x, std::string_view y);

/// Worker count for internal parallelism. RATDYN_THREADS overrides the
/// hardware default; set_threads overrides both. Results never depend on it.
unsigned threads();
void set_threads(unsigned n);

}  // namespace ratdyn::poly
