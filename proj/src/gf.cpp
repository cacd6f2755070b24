#include "quasifix/gf.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <tuple>

namespace quasifix {

struct FqField::Impl {
  std::uint32_t p;
  unsigned m;
  std::uint64_t order;
  std::vector<Residue> modulus;  // monic, size m + 1
};

namespace {

std::atomic<std::uint64_t> g_field_cap{kDefaultFieldOrderCap};

// Dense polynomials over F_p, low degree first, no trailing zeros.
using Poly = std::vector<std::uint64_t>;

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  base %= p;
  while (e) {
    if (e & 1) r = r * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return r;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) { return pow_mod(a, p - 2, p); }

Poly poly_rem(Poly a, const Poly& f, std::uint64_t p) {
  trim(a);
  const std::size_t df = f.size() - 1;
  const std::uint64_t lead_inv = inv_mod(f.back(), p);
  while (a.size() >= f.size()) {
    const std::uint64_t c = a.back() * lead_inv % p;
    const std::size_t shift = a.size() - 1 - df;
    for (std::size_t j = 0; j <= df; ++j) {
      a[shift + j] = (a[shift + j] + (p - c) * f[j]) % p;
    }
    trim(a);
  }
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  }
  return poly_rem(std::move(r), f, p);
}

Poly poly_powmod(Poly base, std::uint64_t e, const Poly& f, std::uint64_t p) {
  Poly r{1};
  r = poly_rem(r, f, p);
  base = poly_rem(base, f, p);
  while (e) {
    if (e & 1) r = poly_mulmod(r, base, f, p);
    base = poly_mulmod(base, base, f, p);
    e >>= 1;
  }
  return r;
}

Poly poly_gcd(Poly a, Poly b, std::uint64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_rem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// x^(p^k) mod f.
Poly x_pow_p_pow(unsigned k, const Poly& f, std::uint64_t p) {
  Poly r = poly_rem(Poly{0, 1}, f, p);
  for (unsigned i = 0; i < k; ++i) r = poly_powmod(r, p, f, p);
  return r;
}

std::vector<unsigned> prime_divisors(unsigned m) {
  std::vector<unsigned> out;
  for (unsigned d = 2; d * d <= m; ++d) {
    if (m % d == 0) {
      out.push_back(d);
      while (m % d == 0) m /= d;
    }
  }
  if (m > 1) out.push_back(m);
  return out;
}

// Rabin's irreducibility test for monic f of degree m.
bool is_irreducible(const Poly& f, std::uint64_t p) {
  const unsigned m = static_cast<unsigned>(f.size() - 1);
  if (m == 1) return true;
  if (f[0] == 0) return false;
  Poly x = poly_rem(Poly{0, 1}, f, p);
  Poly xq = x_pow_p_pow(m, f, p);
  trim(xq);
  if (xq != x) return false;
  for (unsigned r : prime_divisors(m)) {
    Poly h = x_pow_p_pow(m / r, f, p);
    h.resize(std::max<std::size_t>(h.size(), 2), 0);
    h[1] = (h[1] + p - 1) % p;
    Poly g = poly_gcd(h, f, p);
    if (g.size() != 1) return false;
  }
  return true;
}

std::vector<Residue> least_irreducible(std::uint64_t p, unsigned m) {
  std::uint64_t count = 1;
  for (unsigned i = 0; i < m; ++i) count *= p;
  Poly f(m + 1, 0);
  f[m] = 1;
  for (std::uint64_t code = 0; code < count; ++code) {
    std::uint64_t c = code;
    for (unsigned i = 0; i < m; ++i) {
      f[i] = c % p;
      c /= p;
    }
    if (is_irreducible(f, p)) return {f.begin(), f.end()};
  }
  throw DomainError("no irreducible polynomial found");  // unreachable for prime p
}

std::mutex g_field_mutex;
std::map<std::pair<std::uint64_t, unsigned>, std::shared_ptr<const FqField::Impl>> g_fields;

}  // namespace

std::uint64_t field_order_cap() { return g_field_cap.load(); }

void set_field_order_cap(std::uint64_t cap) {
  if (cap < 2) throw DomainError("field order cap must be at least 2");
  g_field_cap.store(cap);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

std::uint64_t next_prime(std::uint64_t n) {
  if (n <= 2) return 2;
  while (!is_prime(n)) ++n;
  return n;
}

// ---------------------------------------------------------------- FqField

FqField FqField::create(std::uint64_t p, unsigned m, std::uint64_t cap) {
  if (m < 1) throw DomainError("extension degree must be at least 1");
  if (p >= (std::uint64_t{1} << 32) || !is_prime(p)) {
    throw DomainError("characteristic " + std::to_string(p) + " is not a supported prime");
  }
  std::uint64_t order = 1;
  for (unsigned i = 0; i < m; ++i) {
    if (order > cap / p) {
      throw CapExceeded("field order " + std::to_string(p) + "^" + std::to_string(m) +
                        " exceeds cap " + std::to_string(cap));
    }
    order *= p;
  }
  if (order > cap) throw CapExceeded("field order exceeds cap " + std::to_string(cap));

  std::lock_guard<std::mutex> lock(g_field_mutex);
  auto key = std::make_pair(p, m);
  if (auto it = g_fields.find(key); it != g_fields.end()) return FqField(it->second);
  auto impl = std::make_shared<Impl>(
      Impl{static_cast<std::uint32_t>(p), m, order, least_irreducible(p, m)});
  g_fields.emplace(key, impl);
  return FqField(impl);
}

std::uint32_t FqField::characteristic() const { return impl_->p; }
unsigned FqField::degree() const { return impl_->m; }
std::uint64_t FqField::order() const { return impl_->order; }
std::span<const Residue> FqField::modulus() const { return impl_->modulus; }

FqElement FqField::zero() const { return FqElement(*this, Coeffs(impl_->m, 0)); }

FqElement FqField::one() const {
  Coeffs c(impl_->m, 0);
  c[0] = 1;
  return FqElement(*this, std::move(c));
}

FqElement FqField::from_int(std::int64_t v) const {
  const std::int64_t p = impl_->p;
  Coeffs c(impl_->m, 0);
  c[0] = static_cast<Residue>(((v % p) + p) % p);
  return FqElement(*this, std::move(c));
}

FqElement FqField::from_coeffs(std::span<const Residue> coeffs) const {
  if (coeffs.size() != impl_->m) {
    throw DomainError("expected " + std::to_string(impl_->m) + " coefficients, got " +
                      std::to_string(coeffs.size()));
  }
  for (Residue r : coeffs) {
    if (r >= impl_->p) throw DomainError("coefficient " + std::to_string(r) + " out of range");
  }
  return FqElement(*this, Coeffs(coeffs.begin(), coeffs.end()));
}

FqElement FqField::element_at(std::uint64_t index) const {
  if (index >= impl_->order) throw DomainError("element index out of range");
  Coeffs c(impl_->m, 0);
  for (unsigned i = 0; i < impl_->m; ++i) {
    c[i] = static_cast<Residue>(index % impl_->p);
    index /= impl_->p;
  }
  return FqElement(*this, std::move(c));
}

FqElement FqField::generator() const {
  if (impl_->m == 1) return zero();
  Coeffs c(impl_->m, 0);
  c[1] = 1;
  return FqElement(*this, std::move(c));
}

std::string FqField::to_string() const {
  std::ostringstream os;
  os << "F_" << impl_->p;
  if (impl_->m > 1) os << "^" << impl_->m;
  return os.str();
}

bool operator==(const FqField& a, const FqField& b) {
  if (a.impl_ == b.impl_) return true;
  return a.impl_->p == b.impl_->p && a.impl_->modulus == b.impl_->modulus;
}

// -------------------------------------------------------------- FqElement

FqElement::FqElement(FqField field, Coeffs coeffs) : field_(std::move(field)), coeffs_(std::move(coeffs)) {}

bool FqElement::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](Residue r) { return r == 0; });
}

bool FqElement::is_one() const {
  if (coeffs_[0] != 1) return false;
  return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](Residue r) { return r == 0; });
}

std::uint64_t FqElement::index() const {
  std::uint64_t idx = 0;
  for (std::size_t i = coeffs_.size(); i-- > 0;) idx = idx * field_.characteristic() + coeffs_[i];
  return idx;
}

void FqElement::require_same_field(const FqElement& other) const {
  if (!(field_ == other.field_)) {
    throw DomainError("field mismatch: " + field_.to_string() + " vs " + other.field_.to_string());
  }
}

FqElement& FqElement::operator+=(const FqElement& other) {
  require_same_field(other);
  const Residue p = field_.characteristic();
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    std::uint64_t s = std::uint64_t{coeffs_[i]} + other.coeffs_[i];
    coeffs_[i] = static_cast<Residue>(s >= p ? s - p : s);
  }
  return *this;
}

FqElement& FqElement::operator-=(const FqElement& other) {
  require_same_field(other);
  const Residue p = field_.characteristic();
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    std::uint64_t s = std::uint64_t{coeffs_[i]} + p - other.coeffs_[i];
    coeffs_[i] = static_cast<Residue>(s >= p ? s - p : s);
  }
  return *this;
}

FqElement& FqElement::operator*=(const FqElement& other) {
  require_same_field(other);
  const std::uint64_t p = field_.characteristic();
  const std::size_t m = coeffs_.size();
  if (m == 1) {
    coeffs_[0] = static_cast<Residue>(std::uint64_t{coeffs_[0]} * other.coeffs_[0] % p);
    return *this;
  }
  boost::container::small_vector<std::uint64_t, 16> prod(2 * m - 1, 0);
  for (std::size_t i = 0; i < m; ++i) {
    if (coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < m; ++j) {
      prod[i + j] = (prod[i + j] + std::uint64_t{coeffs_[i]} * other.coeffs_[j]) % p;
    }
  }
  const auto mod = field_.modulus();
  for (std::size_t k = 2 * m - 2; k >= m; --k) {
    const std::uint64_t c = prod[k];
    if (c == 0) continue;
    for (std::size_t j = 0; j < m; ++j) {
      prod[k - m + j] = (prod[k - m + j] + (p - c) * mod[j]) % p;
    }
  }
  for (std::size_t i = 0; i < m; ++i) coeffs_[i] = static_cast<Residue>(prod[i]);
  return *this;
}

FqElement FqElement::operator-() const {
  const Residue p = field_.characteristic();
  FqElement r = *this;
  for (auto& c : r.coeffs_) c = c == 0 ? 0 : p - c;
  return r;
}

FqElement FqElement::pow(std::uint64_t exponent) const {
  FqElement result = field_.one();
  FqElement base = *this;
  while (exponent) {
    if (exponent & 1) result *= base;
    exponent >>= 1;
    if (exponent) base *= base;
  }
  return result;
}

FqElement FqElement::inv() const {
  if (is_zero()) throw DomainError("inversion of zero");
  return pow(field_.order() - 2);
}

bool operator==(const FqElement& a, const FqElement& b) {
  return a.field_ == b.field_ && a.coeffs_ == b.coeffs_;
}

std::string FqElement::to_string() const {
  if (coeffs_.size() == 1) return std::to_string(coeffs_[0]);
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < coeffs_.size(); ++i) os << (i ? "," : "") << coeffs_[i];
  os << "]";
  return os.str();
}

// ----------------------------------------------------------- free helpers

FqElement frobenius(const FqElement& a, std::uint64_t base_power) {
  const unsigned m = a.field().degree();
  const unsigned steps = static_cast<unsigned>(base_power % m);
  FqElement r = a;
  for (unsigned i = 0; i < steps; ++i) r = r.pow(a.field().characteristic());
  return r;
}

unsigned element_degree(const FqElement& a) {
  const unsigned m = a.field().degree();
  FqElement r = a;
  for (unsigned d = 1; d <= m; ++d) {
    r = r.pow(a.field().characteristic());
    if (r == a) return d;
  }
  return m;
}

std::vector<FqElement> enumerate_elements(const FqField& field) {
  std::vector<FqElement> out;
  out.reserve(field.order());
  for_each_element(field, [&](const FqElement& e) {
    out.push_back(e);
    return true;
  });
  return out;
}

void for_each_element(const FqField& field, const std::function<bool(const FqElement&)>& visit) {
  const unsigned m = field.degree();
  const Residue p = field.characteristic();
  Coeffs c(m, 0);
  for (std::uint64_t i = 0; i < field.order(); ++i) {
    if (!visit(FqElement(field, c))) return;
    for (unsigned j = 0; j < m; ++j) {
      if (++c[j] < p) break;
      c[j] = 0;
    }
  }
}

// --------------------------------------------------------------- Embedding

namespace {

FqElement eval_modulus(std::span<const Residue> modulus, const FqElement& x) {
  FqElement acc = x.field().zero();
  for (std::size_t i = modulus.size(); i-- > 0;) {
    acc = acc * x + x.field().from_int(modulus[i]);
  }
  return acc;
}

}  // namespace

Embedding::Embedding(const FqField& source, const FqField& target) : source_(source), target_(target) {
  if (source.characteristic() != target.characteristic()) {
    throw DomainError("embedding between fields of different characteristic");
  }
  if (target.degree() % source.degree() != 0) {
    throw DomainError("cannot embed " + source.to_string() + " into " + target.to_string());
  }
  const unsigned m = source.degree();
  if (m == 1) {
    basis_images_.push_back(target.one());
    return;
  }
  std::optional<FqElement> root;
  for_each_element(target, [&](const FqElement& x) {
    if (eval_modulus(source.modulus(), x).is_zero()) {
      root = x;
      return false;
    }
    return true;
  });
  if (!root) throw DomainError("source modulus has no root in target field");
  FqElement power = target.one();
  for (unsigned i = 0; i < m; ++i) {
    basis_images_.push_back(power);
    power *= *root;
  }
}

FqElement Embedding::operator()(const FqElement& a) const {
  if (!(a.field() == source_)) throw DomainError("element is not in the embedding's source field");
  FqElement r = target_.zero();
  const auto c = a.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] != 0) r += target_.from_int(c[i]) * basis_images_[i];
  }
  return r;
}

FqElement embed(const FqElement& a, const FqField& target) {
  static std::mutex mutex;
  static std::map<std::tuple<std::uint32_t, unsigned, unsigned>, std::shared_ptr<const Embedding>> cache;
  const FqField& source = a.field();
  auto key = std::make_tuple(source.characteristic(), source.degree(), target.degree());
  std::shared_ptr<const Embedding> emb;
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) emb = it->second;
  }
  // Fields from FqField::create are unique per (p, m); anything else bypasses the cache.
  if (!emb || !(emb->source() == source) || !(emb->target() == target)) {
    emb = std::make_shared<const Embedding>(source, target);
    std::lock_guard<std::mutex> lock(mutex);
    cache[key] = emb;
  }
  return (*emb)(a);
}

}  // namespace quasifix
