#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "quasifix/errors.hpp"

/**
 * Exact arithmetic in F_{p^m} = F_p[t]/(modulus(t)).
 *
 * Elements are dense coefficient vectors in the polynomial basis
 * 1, t, ..., t^{m-1}.  Fields are immutable handles to shared descriptors;
 * creating the same (p, m) twice returns the same descriptor, so equality of
 * fields is a pointer comparison in the common case.
 */
namespace quasifix {

using Residue = std::uint32_t;
using Coeffs = boost::container::small_vector<Residue, 8>;

/// Default upper bound on p^m for created fields.
inline constexpr std::uint64_t kDefaultFieldOrderCap = std::uint64_t{1} << 20;

/// Process-wide field order cap (defaults to kDefaultFieldOrderCap).
std::uint64_t field_order_cap();
void set_field_order_cap(std::uint64_t cap);

bool is_prime(std::uint64_t n);

/// Smallest prime >= n.
std::uint64_t next_prime(std::uint64_t n);

class FqElement;

class FqField {
 public:
  /// Builds F_{p^m} with the least monic irreducible modulus, where monic
  /// polynomials of degree m are ordered by the integer sum c_i p^i of their
  /// lower coefficients.
  static FqField create(std::uint64_t p, unsigned m, std::uint64_t cap = field_order_cap());

  std::uint32_t characteristic() const;
  unsigned degree() const;
  std::uint64_t order() const;
  /// Coefficients c_0..c_m of the modulus, c_m = 1.
  std::span<const Residue> modulus() const;

  FqElement zero() const;
  FqElement one() const;
  /// Image of an integer under Z -> F_p -> F_q.
  FqElement from_int(std::int64_t v) const;
  FqElement from_coeffs(std::span<const Residue> coeffs) const;
  /// Element whose coefficient vector is the base-p expansion of index.
  FqElement element_at(std::uint64_t index) const;
  /// The class of t (equals from_int(0) when m == 1).
  FqElement generator() const;

  std::string to_string() const;

  friend bool operator==(const FqField& a, const FqField& b);

  struct Impl;

 private:
  explicit FqField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;

  friend class FqElement;
};

inline FqField field_create(std::uint64_t p, unsigned m) { return FqField::create(p, m); }

class FqElement {
 public:
  FqElement(FqField field, Coeffs coeffs);

  const FqField& field() const { return field_; }
  std::span<const Residue> coeffs() const { return {coeffs_.data(), coeffs_.size()}; }

  bool is_zero() const;
  bool is_one() const;
  /// Position in enumeration order: sum of c_i p^i.
  std::uint64_t index() const;

  FqElement& operator+=(const FqElement& other);
  FqElement& operator-=(const FqElement& other);
  FqElement& operator*=(const FqElement& other);
  friend FqElement operator+(FqElement a, const FqElement& b) { return a += b; }
  friend FqElement operator-(FqElement a, const FqElement& b) { return a -= b; }
  friend FqElement operator*(FqElement a, const FqElement& b) { return a *= b; }
  FqElement operator-() const;

  FqElement pow(std::uint64_t exponent) const;
  /// Multiplicative inverse; throws DomainError on zero.
  FqElement inv() const;

  friend bool operator==(const FqElement& a, const FqElement& b);
  /// Lexicographic on index within a field; only meaningful for equal fields.
  friend bool operator<(const FqElement& a, const FqElement& b) { return a.index() < b.index(); }

  std::string to_string() const;

 private:
  void require_same_field(const FqElement& other) const;

  FqField field_;
  Coeffs coeffs_;
};

/// a^(p^base_power).
FqElement frobenius(const FqElement& a, std::uint64_t base_power);

/// Smallest d >= 1 with a in F_{p^d}, i.e. frobenius(a, d) == a.
unsigned element_degree(const FqElement& a);

/// All p^m elements in index order.
std::vector<FqElement> enumerate_elements(const FqField& field);

/// Calls visit on every element in index order; stops early when visit returns false.
void for_each_element(const FqField& field, const std::function<bool(const FqElement&)>& visit);

/// Field embedding F_{p^a} -> F_{p^b} (a | b) sending t to the least root of
/// the source modulus in the target.
class Embedding {
 public:
  Embedding(const FqField& source, const FqField& target);

  const FqField& source() const { return source_; }
  const FqField& target() const { return target_; }
  FqElement operator()(const FqElement& a) const;

 private:
  FqField source_;
  FqField target_;
  std::vector<FqElement> basis_images_;  // images of 1, t, ..., t^{m-1}
};

/// Convenience wrapper; embeddings are cached per (source, target).
FqElement embed(const FqElement& a, const FqField& target);

}  // namespace quasifix
