#include "quasifix/poly.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <sstream>

namespace quasifix {

namespace {

std::atomic<std::size_t> g_term_budget{kDefaultTermBudget};

void check_budget(std::size_t terms) {
  if (terms > g_term_budget.load()) {
    throw BudgetExceeded("symbolic term budget exceeded (" + std::to_string(terms) + " > " +
                         std::to_string(g_term_budget.load()) + " terms)");
  }
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
  if (a != 0 && b > UINT64_MAX / a) throw BudgetExceeded(std::string(what) + " overflows 64 bits");
  return a * b;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (b > UINT64_MAX - a) throw BudgetExceeded("exponent overflows 64 bits");
  return a + b;
}

}  // namespace

std::size_t symbolic_term_budget() { return g_term_budget.load(); }

void set_symbolic_term_budget(std::size_t budget) {
  if (budget == 0) throw DomainError("term budget must be positive");
  g_term_budget.store(budget);
}

// ------------------------------------------------------------------ MPoly

MPoly::MPoly(unsigned nvars, std::uint32_t p) : nvars_(nvars), p_(p) {
  if (!is_prime(p)) throw DomainError("polynomial characteristic must be prime");
}

MPoly MPoly::constant(unsigned nvars, std::uint32_t p, std::int64_t c) {
  MPoly f(nvars, p);
  const std::int64_t r = ((c % static_cast<std::int64_t>(p)) + p) % p;
  f.add_term(Exponents(nvars, 0), static_cast<std::uint64_t>(r));
  return f;
}

MPoly MPoly::variable(unsigned nvars, std::uint32_t p, unsigned index) {
  if (index >= nvars) throw DomainError("variable index out of range");
  MPoly f(nvars, p);
  Exponents e(nvars, 0);
  e[index] = 1;
  f.add_term(e, 1);
  return f;
}

MPoly MPoly::monomial(std::uint32_t p, Exponents exps, Residue c) {
  MPoly f(static_cast<unsigned>(exps.size()), p);
  f.add_term(exps, c);
  return f;
}

std::uint64_t MPoly::total_degree() const {
  std::uint64_t d = 0;
  for (const auto& [e, c] : terms_) {
    std::uint64_t s = 0;
    for (auto x : e) s += x;
    d = std::max(d, s);
  }
  return d;
}

Residue MPoly::coefficient(const Exponents& exps) const {
  auto it = terms_.find(exps);
  return it == terms_.end() ? 0 : it->second;
}

void MPoly::add_term(const Exponents& exps, std::uint64_t c) {
  if (exps.size() != nvars_) throw DomainError("exponent vector length does not match nvars");
  c %= p_;
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(exps, static_cast<Residue>(c));
  if (!inserted) {
    const std::uint64_t s = (std::uint64_t{it->second} + c) % p_;
    if (s == 0) {
      terms_.erase(it);
    } else {
      it->second = static_cast<Residue>(s);
    }
  }
}

void MPoly::require_compatible(const MPoly& other) const {
  if (nvars_ != other.nvars_) throw DomainError("polynomial arity mismatch");
  if (p_ != other.p_) throw DomainError("polynomial characteristic mismatch");
}

MPoly& MPoly::operator+=(const MPoly& other) {
  require_compatible(other);
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

MPoly& MPoly::operator-=(const MPoly& other) {
  require_compatible(other);
  for (const auto& [e, c] : other.terms_) add_term(e, p_ - c);
  return *this;
}

MPoly operator*(const MPoly& a, const MPoly& b) {
  a.require_compatible(b);
  MPoly r(a.nvars_, a.p_);
  Exponents e(a.nvars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (unsigned i = 0; i < a.nvars_; ++i) e[i] = checked_add(ea[i], eb[i]);
      r.add_term(e, std::uint64_t{ca} * cb);
    }
    check_budget(r.terms_.size());
  }
  return r;
}

MPoly MPoly::operator-() const { return MPoly(nvars_, p_) - *this; }

MPoly MPoly::scaled(Residue c) const {
  MPoly r(nvars_, p_);
  for (const auto& [e, d] : terms_) r.add_term(e, std::uint64_t{c % p_} * d);
  return r;
}

MPoly MPoly::pow(std::uint64_t e) const {
  MPoly result = constant(nvars_, p_, 1);
  MPoly base = *this;
  while (e) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

FqElement poly_eval(const MPoly& f, std::span<const FqElement> point) {
  if (point.size() != f.nvars()) {
    throw DomainError("point has " + std::to_string(point.size()) + " coordinates, polynomial has " +
                      std::to_string(f.nvars()) + " variables");
  }
  if (point.empty()) {
    throw DomainError("cannot infer the evaluation field of a zero-dimensional point");
  }
  const FqField& field = point[0].field();
  if (field.characteristic() != f.characteristic()) throw DomainError("characteristic mismatch");
  FqElement acc = field.zero();
  for (const auto& [e, c] : f.terms()) {
    FqElement t = field.from_int(c);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] != 0) t *= point[i].pow(e[i]);
    }
    acc += t;
  }
  return acc;
}

// ---------------------------------------------------------------- PolyMap

PolyMap::PolyMap(std::vector<MPoly> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw DomainError("polynomial map needs at least one coordinate");
  nvars_ = coords_[0].nvars();
  p_ = coords_[0].characteristic();
  if (coords_.size() != nvars_) {
    throw DomainError("self-map of A^" + std::to_string(nvars_) + " needs " + std::to_string(nvars_) +
                      " coordinates, got " + std::to_string(coords_.size()));
  }
  for (const auto& f : coords_) {
    if (f.nvars() != nvars_ || f.characteristic() != p_) {
      throw DomainError("map coordinates disagree on arity or characteristic");
    }
  }
}

PolyMap PolyMap::identity(unsigned nvars, std::uint32_t p) {
  std::vector<MPoly> coords;
  for (unsigned i = 0; i < nvars; ++i) coords.push_back(MPoly::variable(nvars, p, i));
  return PolyMap(std::move(coords));
}

std::uint64_t PolyMap::max_degree() const {
  std::uint64_t d = 0;
  for (const auto& f : coords_) d = std::max(d, f.total_degree());
  return d;
}

std::vector<FqElement> PolyMap::operator()(std::span<const FqElement> point) const {
  std::vector<FqElement> out;
  out.reserve(nvars_);
  for (const auto& f : coords_) out.push_back(poly_eval(f, point));
  return out;
}

MPoly compose(const MPoly& outer, const PolyMap& inner) {
  if (outer.nvars() != inner.coords().size()) throw DomainError("composition arity mismatch");
  if (outer.characteristic() != inner.characteristic()) throw DomainError("characteristic mismatch");
  const unsigned n = inner.nvars();
  const std::uint32_t p = inner.characteristic();
  std::vector<std::map<std::uint64_t, MPoly>> powers(outer.nvars());
  auto power_of = [&](unsigned i, std::uint64_t e) -> const MPoly& {
    auto it = powers[i].find(e);
    if (it == powers[i].end()) it = powers[i].emplace(e, inner[i].pow(e)).first;
    return it->second;
  };
  MPoly result(n, p);
  for (const auto& [e, c] : outer.terms()) {
    MPoly t = MPoly::constant(n, p, c);
    for (unsigned i = 0; i < e.size(); ++i) {
      if (e[i] != 0) t = t * power_of(i, e[i]);
    }
    result += t;
  }
  return result;
}

PolyMap map_compose(const PolyMap& g, const PolyMap& h) {
  if (g.nvars() != h.nvars()) throw DomainError("map composition arity mismatch");
  std::vector<MPoly> coords;
  coords.reserve(g.nvars());
  for (const auto& f : g.coords()) coords.push_back(compose(f, h));
  return PolyMap(std::move(coords));
}

PolyMap map_power(const PolyMap& phi, unsigned k) {
  PolyMap result = PolyMap::identity(phi.nvars(), phi.characteristic());
  for (unsigned i = 0; i < k; ++i) result = map_compose(phi, result);
  return result;
}

MPoly frobenius_twist(const MPoly& f, unsigned e) {
  std::uint64_t scale = 1;
  for (unsigned i = 0; i < e; ++i) scale = checked_mul(scale, f.characteristic(), "frobenius twist");
  MPoly r(f.nvars(), f.characteristic());
  Exponents x(f.nvars());
  for (const auto& [exps, c] : f.terms()) {
    for (std::size_t i = 0; i < exps.size(); ++i) x[i] = checked_mul(exps[i], scale, "frobenius twist");
    r.add_term(x, c);  // c^(p^e) = c in F_p
  }
  return r;
}

// --------------------------------------------------------------- IqSystem

IqSystem::IqSystem(PolyMap map, std::uint64_t q_power) : map_(std::move(map)), q_(q_power) {
  const std::uint64_t p = map_.characteristic();
  std::uint64_t x = q_;
  while (x > 1 && x % p == 0) x /= p;
  if (q_ < p || x != 1) {
    throw DomainError("Q = " + std::to_string(q_) + " is not a positive power of p = " + std::to_string(p));
  }
  if (q_ <= map_.max_degree()) {
    throw DomainError("Q = " + std::to_string(q_) + " must exceed every coordinate degree (max " +
                      std::to_string(map_.max_degree()) + ")");
  }
}

MPoly IqSystem::normal_form(const MPoly& g) const {
  const unsigned n = map_.nvars();
  if (g.nvars() != n || g.characteristic() != map_.characteristic()) {
    throw DomainError("polynomial does not live in the ring of the system");
  }
  const std::uint32_t p = map_.characteristic();
  MPoly::TermMap pending = g.terms();
  MPoly result(n, p);
  auto accumulate = [&](const Exponents& e, std::uint64_t c) {
    c %= p;
    if (c == 0) return;
    auto [it, inserted] = pending.try_emplace(e, static_cast<Residue>(c));
    if (!inserted) {
      const std::uint64_t s = (std::uint64_t{it->second} + c) % p;
      if (s == 0) {
        pending.erase(it);
      } else {
        it->second = static_cast<Residue>(s);
      }
    }
  };
  // Always rewrite the lexicographically greatest pending monomial at its
  // least variable with exponent >= Q.
  while (!pending.empty()) {
    auto top = std::prev(pending.end());
    Exponents e = top->first;
    const Residue c = top->second;
    pending.erase(top);
    auto it = std::find_if(e.begin(), e.end(), [&](std::uint64_t x) { return x >= q_; });
    if (it == e.end()) {
      result.add_term(e, c);
      continue;
    }
    const auto i = static_cast<std::size_t>(it - e.begin());
    e[i] -= q_;
    Exponents shifted(n);
    for (const auto& [fe, fc] : map_[i].terms()) {
      for (unsigned v = 0; v < n; ++v) shifted[v] = e[v] + fe[v];
      accumulate(shifted, std::uint64_t{fc} * c);
    }
    check_budget(pending.size() + result.terms().size());
  }
  return result;
}

std::uint64_t IqSystem::quotient_dimension() const {
  const unsigned n = map_.nvars();
  const std::uint32_t p = map_.characteristic();
  for (unsigned i = 0; i < n; ++i) {
    Exponents lead(n, 0);
    lead[i] = q_;
    MPoly generator = map_[i] - MPoly::monomial(p, lead);
    if (!normal_form(generator).is_zero()) {
      throw DomainError("generator " + std::to_string(i + 1) + " does not reduce to zero");
    }
  }
  std::uint64_t dim = 1;
  for (unsigned i = 0; i < n; ++i) dim = checked_mul(dim, q_, "quotient dimension");
  check_budget(dim);
  // Standard monomials must be exactly the fixed points of the normal form.
  Exponents e(n, 0);
  for (std::uint64_t k = 0; k < dim; ++k) {
    MPoly m = MPoly::monomial(p, e);
    if (!(normal_form(m) == m)) throw DomainError("standard monomial is not in normal form");
    for (unsigned v = 0; v < n; ++v) {
      if (++e[v] < q_) break;
      e[v] = 0;
    }
  }
  return dim;
}

bool IqSystem::iterate_congruence_check(unsigned j) const {
  if (j < 1) throw DomainError("iterate index j must be at least 1");
  const unsigned n = map_.nvars();
  std::uint64_t qj = 1;
  for (unsigned i = 0; i < j; ++i) qj = checked_mul(qj, q_, "Q^j");
  check_budget(qj);
  const PolyMap iterate = map_power(map_, j);
  for (unsigned i = 0; i < n; ++i) {
    Exponents e(n, 0);
    e[i] = qj;
    if (!(normal_form(iterate[i]) == normal_form(MPoly::monomial(map_.characteristic(), e)))) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- parsing

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, unsigned nvars, std::uint32_t p) : s_(text), n_(nvars), p_(p) {}

  MPoly parse() {
    MPoly result(n_, p_);
    skip_ws();
    if (at_end()) fail("empty polynomial");
    bool negate = false;
    if (peek() == '-' || peek() == '+') {
      negate = peek() == '-';
      ++pos_;
    }
    for (;;) {
      skip_ws();
      auto [exps, c] = term();
      result.add_term(exps, negate ? (p_ - c) % p_ : c);
      skip_ws();
      if (at_end()) break;
      if (peek() != '+' && peek() != '-') fail("expected '+' or '-'");
      negate = peek() == '-';
      ++pos_;
    }
    return result;
  }

 private:
  std::pair<Exponents, std::uint64_t> term() {
    Exponents e(n_, 0);
    std::uint64_t c = 1;
    for (;;) {
      skip_ws();
      if (at_end()) fail("expected a factor");
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        const std::uint64_t v = number();
        if (v >= p_) fail("coefficient " + std::to_string(v) + " is not a residue mod " + std::to_string(p_));
        c = c * v % p_;
      } else if (peek() == 'x') {
        ++pos_;
        if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) fail("expected variable index");
        const std::uint64_t idx = number();
        if (idx < 1 || idx > n_) fail("variable x" + std::to_string(idx) + " out of range");
        std::uint64_t exp = 1;
        skip_ws();
        if (!at_end() && peek() == '^') {
          ++pos_;
          skip_ws();
          if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) fail("expected exponent");
          exp = number();
        }
        e[idx - 1] = checked_add(e[idx - 1], exp);
      } else {
        fail(std::string("unexpected character '") + peek() + "'");
      }
      skip_ws();
      if (!at_end() && peek() == '*') {
        ++pos_;
        continue;
      }
      return {e, c};
    }
  }

  std::uint64_t number() {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("invalid number");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("polynomial parse error at offset " + std::to_string(pos_) + ": " + msg + " in \"" +
                     std::string(s_) + "\"");
  }

  std::string_view s_;
  unsigned n_;
  std::uint32_t p_;
  std::size_t pos_ = 0;
};

}  // namespace

MPoly parse_poly(std::string_view text, unsigned nvars, std::uint32_t p) {
  return PolyParser(text, nvars, p).parse();
}

std::string format_poly(const MPoly& f) {
  if (f.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = f.terms().rbegin(); it != f.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    if (!first) os << " + ";
    first = false;
    bool wrote = false;
    const bool is_const = std::all_of(e.begin(), e.end(), [](std::uint64_t x) { return x == 0; });
    if (c != 1 || is_const) {
      os << c;
      wrote = true;
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (wrote) os << "*";
      os << "x" << (i + 1);
      if (e[i] != 1) os << "^" << e[i];
      wrote = true;
    }
  }
  return os.str();
}

}  // namespace quasifix
