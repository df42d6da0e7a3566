#include "ratdyn/poly.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ratdyn::poly {

// ---------------------------------------------------------------- VarTable

VarTable::VarTable(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() > kMaxVars) throw std::invalid_argument("VarTable: more than 16 variables");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw std::invalid_argument("VarTable: empty variable name");
    for (std::size_t j = 0; j < i; ++j)
      if (names_[i] == names_[j]) throw std::invalid_argument("VarTable: duplicate name " + names_[i]);
  }
}

std::optional<std::size_t> VarTable::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

std::size_t VarTable::index(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw std::out_of_range("VarTable: unknown variable " + std::string(name));
}

VarTablePtr make_vars(std::vector<std::string> names) {
  return std::make_shared<const VarTable>(std::move(names));
}

// ---------------------------------------------------------------- Monomial

void Monomial::set_exponent(std::size_t slot, unsigned e) {
  if (slot >= VarTable::kMaxVars) throw std::out_of_range("Monomial: slot out of range");
  if (e > kMaxExponent) throw std::overflow_error("Monomial: exponent exceeds 255");
  std::uint64_t& word = slot < 8 ? hi_ : lo_;
  const unsigned shift = 8U * (7U - static_cast<unsigned>(slot % 8));
  word = (word & ~(std::uint64_t{0xFF} << shift)) | (std::uint64_t{e} << shift);
}

unsigned Monomial::total_degree() const {
  // Byte-wise horizontal sum; each partial fits since 16*255 < 2^16.
  auto bytesum = [](std::uint64_t w) {
    w = (w & 0x00FF00FF00FF00FFULL) + ((w >> 8) & 0x00FF00FF00FF00FFULL);
    w = (w & 0x0000FFFF0000FFFFULL) + ((w >> 16) & 0x0000FFFF0000FFFFULL);
    w = (w & 0x00000000FFFFFFFFULL) + (w >> 32);
    return static_cast<unsigned>(w);
  };
  return bytesum(hi_) + bytesum(lo_);
}

namespace {

bool descending(const Term& a, const Term& b) { return grlex_less(b.mono, a.mono); }

bool divides(Monomial d, Monomial m) {
  for (std::size_t s = 0; s < VarTable::kMaxVars; ++s)
    if (d.exponent(s) > m.exponent(s)) return false;
  return true;
}

Monomial quotient(Monomial m, Monomial d) {
  Monomial q;
  for (std::size_t s = 0; s < VarTable::kMaxVars; ++s) q.set_exponent(s, m.exponent(s) - d.exponent(s));
  return q;
}

Monomial without_slot(Monomial m, std::size_t slot) {
  m.set_exponent(slot, 0);
  return m;
}

void require_same_vars(const VarTablePtr& a, const VarTablePtr& b) {
  if (a == b) return;
  if (!a || !b || !(*a == *b)) throw std::invalid_argument("Poly: mismatched variable tables");
}

std::atomic<unsigned> g_thread_override{0};

// Open-addressing accumulator for products.
class Accumulator {
 public:
  explicit Accumulator(std::size_t expected) {
    std::size_t cap = 16;
    while (cap < 2 * expected) cap <<= 1;
    keys_.resize(cap);
    vals_.resize(cap);
    used_.assign(cap, 0);
  }

  mpz_ptr at(Monomial m) {
    if (2 * (count_ + 1) > keys_.size()) grow();
    const std::size_t mask = keys_.size() - 1;
    std::size_t i = m.hash() & mask;
    while (used_[i]) {
      if (keys_[i] == m) return vals_[i].get_mpz_t();
      i = (i + 1) & mask;
    }
    used_[i] = 1;
    keys_[i] = m;
    ++count_;
    return vals_[i].get_mpz_t();
  }

  template <class F>
  void drain(F&& f) {
    for (std::size_t i = 0; i < keys_.size(); ++i)
      if (used_[i] && sgn(vals_[i]) != 0) f(keys_[i], std::move(vals_[i]));
  }

 private:
  void grow() {
    std::vector<Monomial> keys(keys_.size() * 2);
    std::vector<Integer> vals(keys_.size() * 2);
    std::vector<std::uint8_t> used(keys_.size() * 2, 0);
    const std::size_t mask = keys.size() - 1;
    for (std::size_t j = 0; j < keys_.size(); ++j) {
      if (!used_[j]) continue;
      std::size_t i = keys_[j].hash() & mask;
      while (used[i]) i = (i + 1) & mask;
      used[i] = 1;
      keys[i] = keys_[j];
      mpz_swap(vals[i].get_mpz_t(), vals_[j].get_mpz_t());
    }
    keys_.swap(keys);
    vals_.swap(vals);
    used_.swap(used);
  }

  std::vector<Monomial> keys_;
  std::vector<Integer> vals_;
  std::vector<std::uint8_t> used_;
  std::size_t count_ = 0;
};

struct IntTerm {
  Monomial mono;
  Integer coef;
};

// Integer image of p scaled by the lcm of its denominators.
std::vector<IntTerm> integer_image(const Poly& p, Integer& scale) {
  scale = 1;
  for (const auto& t : p.terms()) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), t.coef.get_den_mpz_t());
  std::vector<IntTerm> out;
  out.reserve(p.size());
  for (const auto& t : p.terms()) {
    Integer c = scale / t.coef.get_den();
    c *= t.coef.get_num();
    out.push_back({t.mono, std::move(c)});
  }
  return out;
}

void multiply_range(const std::vector<IntTerm>& a, std::size_t lo, std::size_t hi,
                    const std::vector<IntTerm>& b, std::vector<IntTerm>& out) {
  Accumulator acc(std::min<std::size_t>((hi - lo) * b.size() / 2, std::size_t{1} << 18) + 16);
  for (std::size_t i = lo; i < hi; ++i) {
    const Monomial ma = a[i].mono;
    mpz_srcptr ca = a[i].coef.get_mpz_t();
    for (const auto& tb : b) mpz_addmul(acc.at(ma * tb.mono), ca, tb.coef.get_mpz_t());
  }
  acc.drain([&](Monomial m, Integer&& c) { out.push_back({m, std::move(c)}); });
}

}  // namespace

unsigned threads() {
  if (unsigned o = g_thread_override.load()) return o;
  if (const char* env = std::getenv("RATDYN_THREADS")) {
    unsigned n = 0;
    auto [ptr, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), n);
    if (ec == std::errc() && n > 0) return n;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

void set_threads(unsigned n) { g_thread_override.store(n); }

// ---------------------------------------------------------------- Poly

Poly::Poly(VarTablePtr vars) : vars_(std::move(vars)) {
  if (!vars_) throw std::invalid_argument("Poly: null variable table");
}

Poly::Poly(VarTablePtr vars, const Rational& constant) : Poly(std::move(vars)) {
  if (sgn(constant) != 0) terms_.push_back({Monomial{}, constant});
  if (!terms_.empty()) terms_.back().coef.canonicalize();
}

Poly Poly::variable(VarTablePtr vars, std::string_view name) {
  Poly p(vars);
  Monomial m;
  m.set_exponent(vars->index(name), 1);
  p.terms_.push_back({m, Rational(1)});
  return p;
}

Poly Poly::from_terms(VarTablePtr vars, std::vector<Term> terms) {
  Poly p(std::move(vars));
  p.terms_ = std::move(terms);
  p.canonicalize();
  return p;
}

void Poly::canonicalize() {
  for (auto& t : terms_) t.coef.canonicalize();
  std::sort(terms_.begin(), terms_.end(), descending);
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().mono == t.mono) {
      merged.back().coef += t.coef;
    } else {
      if (!merged.empty() && sgn(merged.back().coef) == 0) merged.pop_back();
      merged.push_back(std::move(t));
    }
  }
  if (!merged.empty() && sgn(merged.back().coef) == 0) merged.pop_back();
  terms_ = std::move(merged);
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }

unsigned Poly::total_degree() const { return terms_.empty() ? 0 : terms_.front().mono.total_degree(); }

unsigned Poly::degree_in(std::size_t slot) const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max(d, t.mono.exponent(slot));
  return d;
}

Rational Poly::coefficient(Monomial m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), Term{m, 0}, descending);
  if (it != terms_.end() && it->mono == m) return it->coef;
  return 0;
}

Poly Poly::operator-() const {
  Poly p = *this;
  for (auto& t : p.terms_) t.coef = -t.coef;
  return p;
}

Poly Poly::merge(const Poly& a, const Poly& b, bool subtract) {
  require_same_vars(a.vars(), b.vars());
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  auto ia = a.terms().begin();
  auto ib = b.terms().begin();
  const auto ea = a.terms().end();
  const auto eb = b.terms().end();
  auto take_b = [&](const Term& t) { out.push_back({t.mono, subtract ? Rational(-t.coef) : t.coef}); };
  while (ia != ea && ib != eb) {
    if (ia->mono == ib->mono) {
      Rational c = subtract ? Rational(ia->coef - ib->coef) : Rational(ia->coef + ib->coef);
      if (sgn(c) != 0) out.push_back({ia->mono, std::move(c)});
      ++ia;
      ++ib;
    } else if (grlex_less(ib->mono, ia->mono)) {
      out.push_back(*ia++);
    } else {
      take_b(*ib++);
    }
  }
  for (; ia != ea; ++ia) out.push_back(*ia);
  for (; ib != eb; ++ib) take_b(*ib);
  // Merged from two descending, zero-free lists: already canonical.
  Poly p(a.vars());
  p.terms_ = std::move(out);
  return p;
}

Poly operator+(const Poly& a, const Poly& b) { return Poly::merge(a, b, false); }
Poly operator-(const Poly& a, const Poly& b) { return Poly::merge(a, b, true); }

Poly operator*(const Poly& a, const Poly& b) {
  require_same_vars(a.vars(), b.vars());
  if (a.is_zero() || b.is_zero()) return Poly(a.vars());
  for (std::size_t s = 0; s < VarTable::kMaxVars; ++s)
    if (a.degree_in(s) + b.degree_in(s) > Monomial::kMaxExponent)
      throw std::overflow_error("Poly: product exponent exceeds 255");

  // Outer loop over the larger operand so the work splits evenly.
  const Poly& outer = a.size() >= b.size() ? a : b;
  const Poly& inner = a.size() >= b.size() ? b : a;
  Integer scale_outer, scale_inner;
  const auto ia = integer_image(outer, scale_outer);
  const auto ib = integer_image(inner, scale_inner);

  const std::size_t work = ia.size() * ib.size();
  const unsigned n_threads = work < (1U << 16) ? 1U : std::min<unsigned>(threads(), static_cast<unsigned>(ia.size()));
  std::vector<std::vector<IntTerm>> parts(n_threads);
  if (n_threads == 1) {
    multiply_range(ia, 0, ia.size(), ib, parts[0]);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (ia.size() + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
      const std::size_t lo = std::min(ia.size(), t * chunk);
      const std::size_t hi = std::min(ia.size(), lo + chunk);
      pool.emplace_back([&, lo, hi, t] { multiply_range(ia, lo, hi, ib, parts[t]); });
    }
    for (auto& th : pool) th.join();
  }

  const Integer denom = scale_outer * scale_inner;
  const bool integral = denom == 1;
  std::vector<Term> terms;
  std::size_t total = 0;
  for (const auto& part : parts) total += part.size();
  terms.reserve(total);
  for (auto& part : parts)
    for (auto& t : part) {
      Term term{t.mono, Rational()};
      mpz_swap(mpq_numref(term.coef.get_mpq_t()), t.coef.get_mpz_t());
      if (!integral) mpz_set(mpq_denref(term.coef.get_mpq_t()), denom.get_mpz_t());
      terms.push_back(std::move(term));
    }
  return Poly::from_terms(a.vars(), std::move(terms));
}

Poly Poly::scaled(const Rational& c) const {
  if (sgn(c) == 0) return Poly(vars_);
  Poly p = *this;
  for (auto& t : p.terms_) t.coef *= c;
  return p;
}

Poly Poly::pow(unsigned k) const {
  Poly result(vars_, Rational(1));
  for (unsigned i = 0; i < k; ++i) result = result * *this;
  return result;
}

bool operator==(const Poly& a, const Poly& b) {
  require_same_vars(a.vars(), b.vars());
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a.terms_[i].mono == b.terms_[i].mono) || a.terms_[i].coef != b.terms_[i].coef) return false;
  return true;
}

Rational Poly::eval(std::span<const Rational> point) const {
  if (point.size() < vars_->size()) throw std::invalid_argument("Poly::eval: point has too few coordinates");
  // Integer evaluation over the common denominator
  // lcm(coef dens) * prod_s den(point_s)^deg_s.
  std::vector<std::vector<Integer>> powers(vars_->size());
  Integer scale = 1;
  for (std::size_t s = 0; s < vars_->size(); ++s) {
    const unsigned d = degree_in(s);
    const Integer n = point[s].get_num(), dd = point[s].get_den();
    std::vector<Integer> np(d + 1), dp(d + 1);
    np[0] = dp[0] = 1;
    for (unsigned e = 1; e <= d; ++e) {
      np[e] = np[e - 1] * n;
      dp[e] = dp[e - 1] * dd;
    }
    powers[s].resize(d + 1);
    for (unsigned e = 0; e <= d; ++e) powers[s][e] = np[e] * dp[d - e];
    scale *= dp[d];
  }
  Integer lcm = 1;
  for (const auto& t : terms_) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), t.coef.get_den_mpz_t());
  Integer sum = 0, term, c;
  for (const auto& t : terms_) {
    c = lcm / t.coef.get_den();
    term = t.coef.get_num() * c;
    for (std::size_t s = 0; s < vars_->size(); ++s)
      if (powers[s].size() > 1) term *= powers[s][t.mono.exponent(s)];
    sum += term;
  }
  Rational out(sum, scale * lcm);
  out.canonicalize();
  return out;
}

Rational Poly::content() const {
  if (terms_.empty()) return 1;
  Integer g = 0, l = 1;
  for (const auto& t : terms_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coef.get_num_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coef.get_den_mpz_t());
  }
  Rational c(g, l);
  c.canonicalize();
  return c;
}

std::optional<Poly> Poly::divide_exact(const Poly& divisor) const {
  require_same_vars(vars_, divisor.vars_);
  if (divisor.is_zero()) throw std::domain_error("Poly::divide_exact: division by zero");
  auto cmp = [](Monomial a, Monomial b) { return grlex_less(b, a); };
  std::map<Monomial, Rational, decltype(cmp)> rem(cmp);
  for (const auto& t : terms_) rem.emplace(t.mono, t.coef);
  const Term& lead = divisor.terms_.front();
  std::vector<Term> q;
  while (!rem.empty()) {
    auto it = rem.begin();
    if (!divides(lead.mono, it->first)) return std::nullopt;
    const Monomial qm = quotient(it->first, lead.mono);
    const Rational qc = it->second / lead.coef;
    for (const auto& d : divisor.terms_) {
      auto [pos, inserted] = rem.try_emplace(qm * d.mono, 0);
      pos->second -= qc * d.coef;
      if (sgn(pos->second) == 0) rem.erase(pos);
    }
    q.push_back({qm, qc});
  }
  return from_terms(vars_, std::move(q));
}

Poly Poly::substitute(std::size_t slot, const Poly& value) const {
  require_same_vars(vars_, value.vars_);
  const unsigned d = degree_in(slot);
  if (d == 0) return *this;
  std::vector<std::vector<Term>> by_power(d + 1);
  for (const auto& t : terms_) by_power[t.mono.exponent(slot)].push_back({without_slot(t.mono, slot), t.coef});
  auto part = [&](unsigned k) { return from_terms(vars_, std::move(by_power[k])); };
  // Horner in `value`.
  Poly acc = part(d);
  for (unsigned k = d; k-- > 0;) acc = acc * value + part(k);
  return acc;
}

Poly Poly::specialize(std::size_t slot, const Rational& value) const {
  const unsigned d = degree_in(slot);
  std::vector<Rational> powers(d + 1);
  powers[0] = 1;
  for (unsigned e = 1; e <= d; ++e) powers[e] = powers[e - 1] * value;
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back({without_slot(t.mono, slot), t.coef * powers[t.mono.exponent(slot)]});
  return from_terms(vars_, std::move(out));
}

Poly Poly::rebased(VarTablePtr target) const {
  std::vector<std::size_t> map(vars_->size());
  for (std::size_t s = 0; s < vars_->size(); ++s) {
    if (!mentions(s)) continue;
    map[s] = target->index(vars_->name(s));
  }
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    Monomial m;
    for (std::size_t s = 0; s < vars_->size(); ++s)
      if (unsigned e = t.mono.exponent(s)) m.set_exponent(map[s], e);
    out.push_back({m, t.coef});
  }
  return from_terms(std::move(target), std::move(out));
}

namespace {

std::string render_term(const VarTable& vars, const Term& t, bool first) {
  std::string s;
  Rational c = t.coef;
  if (sgn(c) < 0) {
    s += first ? "-" : " - ";
    c = -c;
  } else if (!first) {
    s += " + ";
  }
  const bool unit = c == 1 && !t.mono.is_one();
  if (!unit) s += c.get_str();
  bool need_star = !unit;
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const unsigned e = t.mono.exponent(v);
    if (e == 0) continue;
    if (need_star) s += '*';
    s += vars.name(v);
    if (e > 1) s += '^' + std::to_string(e);
    need_star = true;
  }
  return s;
}

}  // namespace

CoefficientReport Poly::coefficient_report() const {
  CoefficientReport r;
  r.n_terms = terms_.size();
  const Term* worst = nullptr;
  for (const auto& t : terms_) {
    if (sgn(t.coef) < 0) {
      ++r.n_negative;
      if (!worst || t.coef < worst->coef) worst = &t;
    }
    if (&t == &terms_.front() || t.coef < r.min_coeff) r.min_coeff = t.coef;
    if (&t == &terms_.front() || t.coef > r.max_coeff) r.max_coeff = t.coef;
    r.max_total_degree = std::max(r.max_total_degree, t.mono.total_degree());
  }
  if (worst) r.negative_witness = render_term(*vars_, *worst, true);
  return r;
}

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (std::size_t i = 0; i < terms_.size(); ++i) s += render_term(*vars_, terms_[i], i == 0);
  return s;
}

Poly Poly::parse(VarTablePtr vars, std::string_view text) {
  std::vector<Term> terms;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto fail = [&](const char* what) {
    throw std::invalid_argument(std::string("Poly::parse: ") + what + " at offset " + std::to_string(i));
  };
  auto read_uint = [&] {
    const std::size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (start == i) fail("expected digits");
    return std::string(text.substr(start, i - start));
  };
  skip();
  if (i < text.size() && text.substr(i) == "0") return Poly(vars);
  bool first = true;
  while (true) {
    skip();
    if (i >= text.size()) break;
    int sign = 1;
    if (text[i] == '+' || text[i] == '-') {
      sign = text[i] == '-' ? -1 : 1;
      ++i;
      skip();
    } else if (!first) {
      fail("expected '+' or '-'");
    }
    first = false;
    Term t{Monomial{}, Rational(sign)};
    bool expect_factor = true;
    while (expect_factor) {
      skip();
      if (i >= text.size()) fail("unexpected end");
      if (std::isdigit(static_cast<unsigned char>(text[i]))) {
        std::string num = read_uint();
        if (i < text.size() && text[i] == '/') {
          ++i;
          num += "/" + read_uint();
        }
        Rational c(num);
        c.canonicalize();
        t.coef *= c;
      } else if (std::isalpha(static_cast<unsigned char>(text[i])) || text[i] == '_') {
        const std::size_t start = i;
        while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
        const std::size_t slot = vars->index(text.substr(start, i - start));
        unsigned e = 1;
        if (i < text.size() && text[i] == '^') {
          ++i;
          e = static_cast<unsigned>(std::stoul(read_uint()));
        }
        t.mono.set_exponent(slot, t.mono.exponent(slot) + e);
      } else {
        fail("unexpected character");
      }
      skip();
      expect_factor = i < text.size() && text[i] == '*';
      if (expect_factor) ++i;
    }
    terms.push_back(std::move(t));
  }
  return from_terms(std::move(vars), std::move(terms));
}

// ---------------------------------------------------------------- RatFn

RatFn::RatFn(Poly num) : num_(std::move(num)), den_(num_.vars(), Rational(1)) { normalize(); }

RatFn::RatFn(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
  require_same_vars(num_.vars(), den_.vars());
  if (den_.is_zero()) throw std::domain_error("RatFn: identically zero denominator");
  normalize();
}

void RatFn::normalize() {
  if (num_.is_zero()) {
    den_ = Poly(num_.vars(), Rational(1));
    return;
  }
  Rational c = den_.content();
  if (sgn(den_.terms().front().coef) < 0) c = -c;
  if (c != 1) {
    const Rational inv = 1 / c;
    den_ = den_.scaled(inv);
    num_ = num_.scaled(inv);
  }
}

RatFn operator+(const RatFn& a, const RatFn& b) {
  if (a.den_ == b.den_) return RatFn(a.num_ + b.num_, a.den_);
  return RatFn(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RatFn operator-(const RatFn& a, const RatFn& b) { return a + (-b); }

RatFn operator*(const RatFn& a, const RatFn& b) { return RatFn(a.num_ * b.num_, a.den_ * b.den_); }

RatFn operator/(const RatFn& a, const RatFn& b) {
  if (b.num_.is_zero()) throw std::domain_error("RatFn: division by zero");
  return RatFn(a.num_ * b.den_, a.den_ * b.num_);
}

Rational RatFn::eval(std::span<const Rational> point) const {
  const Rational d = den_.eval(point);
  if (sgn(d) == 0) throw std::domain_error("RatFn::eval: denominator vanishes");
  return num_.eval(point) / d;
}

bool RatFn::equivalent(const RatFn& other) const { return num_ * other.den_ == other.num_ * den_; }

// ---------------------------------------------------------------- substitution

namespace {

struct Plan {
  struct Group {
    Poly factor;
    std::size_t scratch;
  };
  std::vector<std::size_t> var_slot;
  std::vector<std::size_t> rename_slot;
  // Per substitution: (group index, multiplicity) of its denominator factors.
  std::vector<std::vector<std::pair<std::size_t, unsigned>>> factors_of;
  std::vector<Group> groups;
};

bool is_one(const Poly& p) { return p.is_constant() && p.coefficient(Monomial{}) == 1; }

Plan make_plan(const VarTablePtr& vars, std::span<const Substitution> subs) {
  Plan plan;
  std::size_t next = vars->size();
  auto scratch = [&] {
    if (next >= VarTable::kMaxVars) throw std::length_error("substitute: not enough spare variable slots");
    return next++;
  };
  for (const auto& s : subs) {
    require_same_vars(vars, s.value.vars());
    const std::size_t slot = vars->index(s.var);
    if (std::find(plan.var_slot.begin(), plan.var_slot.end(), slot) != plan.var_slot.end())
      throw std::invalid_argument("substitute: variable substituted twice: " + s.var);
    plan.var_slot.push_back(slot);
  }
  // Substituted variables move to scratch slots only when some replacement
  // mentions one of them; otherwise sequential replacement is already exact.
  bool self_referential = false;
  for (const auto& s : subs)
    for (std::size_t slot : plan.var_slot)
      self_referential = self_referential || s.value.num().mentions(slot) || s.value.den().mentions(slot);
  for (std::size_t i = 0; i < subs.size(); ++i)
    plan.rename_slot.push_back(self_referential ? scratch() : plan.var_slot[i]);

  for (const auto& s : subs) {
    Factorization given = s.den_factors;
    if (given.empty()) {
      given.emplace_back(s.value.den(), 1);
    } else {
      Poly product(vars, Rational(1));
      for (const auto& [f, m] : given) product = product * f.pow(m);
      if (!s.value.equivalent(RatFn(s.value.num(), product)))
        throw std::invalid_argument("substitute: denominator factors do not match for " + s.var);
    }
    std::vector<std::pair<std::size_t, unsigned>> mine;
    for (const auto& [f, m] : given) {
      if (is_one(f) || m == 0) continue;
      std::size_t g = 0;
      while (g < plan.groups.size() && !(plan.groups[g].factor == f)) ++g;
      if (g == plan.groups.size()) plan.groups.push_back({f, scratch()});
      mine.emplace_back(g, m);
    }
    plan.factors_of.push_back(std::move(mine));
  }
  return plan;
}

// The numerator handed to `value` in the plan: when a factorization was
// supplied, the RatFn may have rescaled num and den by a constant.
Poly plan_numerator(const Substitution& s, const VarTablePtr& vars) {
  if (s.den_factors.empty()) return s.value.num();
  Poly product(vars, Rational(1));
  for (const auto& [f, m] : s.den_factors) product = product * f.pow(m);
  // value = num/den = num*(product/den)/product; product/den is a constant.
  const Rational ratio = product.terms().front().coef / s.value.den().terms().front().coef;
  return s.value.num().scaled(ratio);
}

std::vector<unsigned> factor_degrees(const Monomial& m, const Plan& plan) {
  std::vector<unsigned> d(plan.groups.size(), 0);
  for (std::size_t i = 0; i < plan.var_slot.size(); ++i) {
    const unsigned e = m.exponent(plan.var_slot[i]);
    for (const auto& [g, mult] : plan.factors_of[i]) d[g] += e * mult;
  }
  return d;
}

// Homogenized target: substituted variables moved to their rename slots and
// one scratch slot per denominator factor; returns the factor powers cleared.
std::vector<unsigned> prepare(const Poly& target, const Plan& plan, Poly& out) {
  std::vector<unsigned> deg(plan.groups.size(), 0);
  for (const auto& t : target.terms()) {
    const auto d = factor_degrees(t.mono, plan);
    for (std::size_t g = 0; g < d.size(); ++g) deg[g] = std::max(deg[g], d[g]);
  }
  std::vector<Term> terms;
  terms.reserve(target.size());
  for (const auto& t : target.terms()) {
    Monomial m = t.mono;
    const auto d = factor_degrees(t.mono, plan);
    for (std::size_t i = 0; i < plan.var_slot.size(); ++i) {
      if (plan.rename_slot[i] == plan.var_slot[i]) continue;
      const unsigned e = m.exponent(plan.var_slot[i]);
      m.set_exponent(plan.var_slot[i], 0);
      m.set_exponent(plan.rename_slot[i], e);
    }
    for (std::size_t g = 0; g < plan.groups.size(); ++g) m.set_exponent(plan.groups[g].scratch, deg[g] - d[g]);
    terms.push_back({m, t.coef});
  }
  out = Poly::from_terms(target.vars(), std::move(terms));
  return deg;
}

Poly expand_prepared(Poly p, const Plan& plan, std::span<const Substitution> subs) {
  // Each step is a Horner expansion in one slot; narrow images go first so
  // the wide ones multiply the fewest intermediate terms.
  struct Step {
    std::size_t slot;
    Poly image;
  };
  std::vector<Step> steps;
  for (std::size_t i = 0; i < subs.size(); ++i)
    steps.push_back({plan.rename_slot[i], plan_numerator(subs[i], p.vars())});
  for (const auto& g : plan.groups) steps.push_back({g.scratch, g.factor});
  std::stable_sort(steps.begin(), steps.end(), [](const Step& a, const Step& b) { return a.image.size() < b.image.size(); });
  for (const auto& st : steps) p = p.substitute(st.slot, st.image);
  return p;
}

}  // namespace

SubstitutionResult substitute_all(const Poly& target, std::span<const Substitution> subs) {
  const Plan plan = make_plan(target.vars(), subs);
  Poly prepared(target.vars());
  const auto deg = prepare(target, plan, prepared);
  Poly num = expand_prepared(std::move(prepared), plan, subs);
  Poly den(target.vars(), Rational(1));
  Factorization factors;
  for (std::size_t g = 0; g < plan.groups.size(); ++g) {
    if (deg[g] == 0) continue;
    den = den * plan.groups[g].factor.pow(deg[g]);
    factors.emplace_back(plan.groups[g].factor, deg[g]);
  }
  return {RatFn(std::move(num), std::move(den)), std::move(factors)};
}

RatFn substitute(const Poly& target, std::string_view var, const RatFn& value) {
  const Substitution s{std::string(var), value};
  return substitute_all(target, std::span(&s, 1)).value;
}

RatFn substitute(const RatFn& target, std::span<const Substitution> subs) {
  const Plan plan = make_plan(target.vars(), subs);
  Poly pn(target.vars()), pd(target.vars());
  const auto dn = prepare(target.num(), plan, pn);
  const auto dd = prepare(target.den(), plan, pd);
  Poly num = expand_prepared(std::move(pn), plan, subs);
  Poly den = expand_prepared(std::move(pd), plan, subs);
  for (std::size_t g = 0; g < plan.groups.size(); ++g) {
    if (dd[g] > dn[g]) num = num * plan.groups[g].factor.pow(dd[g] - dn[g]);
    if (dn[g] > dd[g]) den = den * plan.groups[g].factor.pow(dn[g] - dd[g]);
  }
  if (den.is_zero()) throw std::domain_error("substitute: composition produced a zero denominator");
  return RatFn(std::move(num), std::move(den));
}

std::pair<RatFn, RatFn> compose_map(const std::pair<RatFn, RatFn>& map, const std::pair<RatFn, RatFn>& point,
                                    std::string_view x, std::string_view y) {
  const Substitution subs[] = {{std::string(x), point.first}, {std::string(y), point.second}};
  return {substitute(map.first, subs), substitute(map.second, subs)};
}

}  // namespace ratdyn::poly
