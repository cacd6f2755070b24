#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quasifix/gf.hpp"

namespace quasifix {

/// Exponent vector of a monomial; length equals the number of variables.
using Exponents = std::vector<std::uint64_t>;

/// Default cap on the number of terms any intermediate polynomial may hold.
inline constexpr std::size_t kDefaultTermBudget = 1'000'000;

std::size_t symbolic_term_budget();
void set_symbolic_term_budget(std::size_t budget);

/// Sparse multivariate polynomial with coefficients in the prime field F_p.
/// Terms are kept in a map ordered lexicographically on exponent vectors;
/// zero coefficients are never stored.
class MPoly {
 public:
  using TermMap = std::map<Exponents, Residue>;

  MPoly(unsigned nvars, std::uint32_t p);

  static MPoly constant(unsigned nvars, std::uint32_t p, std::int64_t c);
  /// The coordinate function x_{index+1}.
  static MPoly variable(unsigned nvars, std::uint32_t p, unsigned index);
  static MPoly monomial(std::uint32_t p, Exponents exps, Residue c = 1);

  unsigned nvars() const { return nvars_; }
  std::uint32_t characteristic() const { return p_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::uint64_t total_degree() const;
  Residue coefficient(const Exponents& exps) const;

  /// Adds c * x^exps to the polynomial (c reduced mod p).
  void add_term(const Exponents& exps, std::uint64_t c);

  MPoly& operator+=(const MPoly& other);
  MPoly& operator-=(const MPoly& other);
  friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
  friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
  friend MPoly operator*(const MPoly& a, const MPoly& b);
  MPoly operator-() const;
  MPoly scaled(Residue c) const;
  MPoly pow(std::uint64_t e) const;

  friend bool operator==(const MPoly& a, const MPoly& b) {
    return a.nvars_ == b.nvars_ && a.p_ == b.p_ && a.terms_ == b.terms_;
  }

 private:
  void require_compatible(const MPoly& other) const;

  unsigned nvars_;
  std::uint32_t p_;
  TermMap terms_;
};

/// Evaluates f at a point whose coordinates lie in a common field of
/// characteristic p; coefficients are lifted through F_p -> F_{p^m}.
FqElement poly_eval(const MPoly& f, std::span<const FqElement> point);

/// A polynomial self-map of affine n-space, x -> (f_1(x), ..., f_n(x)).
class PolyMap {
 public:
  explicit PolyMap(std::vector<MPoly> coords);

  static PolyMap identity(unsigned nvars, std::uint32_t p);

  unsigned nvars() const { return nvars_; }
  std::uint32_t characteristic() const { return p_; }
  const std::vector<MPoly>& coords() const { return coords_; }
  const MPoly& operator[](std::size_t i) const { return coords_[i]; }
  std::uint64_t max_degree() const;

  std::vector<FqElement> operator()(std::span<const FqElement> point) const;

  friend bool operator==(const PolyMap& a, const PolyMap& b) { return a.coords_ == b.coords_; }

 private:
  unsigned nvars_;
  std::uint32_t p_;
  std::vector<MPoly> coords_;
};

/// outer(inner_1, ..., inner_n).
MPoly compose(const MPoly& outer, const PolyMap& inner);

/// g o h: the map x -> g(h(x)).
PolyMap map_compose(const PolyMap& g, const PolyMap& h);

/// Phi^k; map_power(phi, 0) is the identity.
PolyMap map_power(const PolyMap& phi, unsigned k);

/// f^(p^e), computed termwise as sum c x^(alpha p^e).
MPoly frobenius_twist(const MPoly& f, unsigned e);

/**
 * The ideal I_Q = (f_1 - x_1^Q, ..., f_n - x_n^Q).
 *
 * Requires Q to be a power of p strictly larger than every deg f_i.  The
 * leading monomials x_i^Q are then pairwise coprime, so rewriting
 * x_i^Q -> f_i is confluent and the standard monomials are exactly those
 * with every exponent below Q.
 */
class IqSystem {
 public:
  IqSystem(PolyMap map, std::uint64_t q_power);

  const PolyMap& map() const { return map_; }
  std::uint64_t q() const { return q_; }

  /// Unique normal form of g modulo I_Q (all exponents < Q).
  MPoly normal_form(const MPoly& g) const;

  /// dim_{F_p} F_p[x]/I_Q; verifies the standard-monomial basis and returns Q^n.
  std::uint64_t quotient_dimension() const;

  /// True iff nf(f_i^{(j)}) == nf(x_i^{Q^j}) for every coordinate i.
  bool iterate_congruence_check(unsigned j) const;

 private:
  PolyMap map_;
  std::uint64_t q_;
};

inline MPoly iq_normal_form(const IqSystem& sys, const MPoly& g) { return sys.normal_form(g); }
inline std::uint64_t iq_quotient_dimension(const IqSystem& sys) { return sys.quotient_dimension(); }
inline bool iterate_congruence_check(const IqSystem& sys, unsigned j) {
  return sys.iterate_congruence_check(j);
}

/// Parses `c*x1^e1*...*xn^en` terms joined by `+` or `-`.  Coefficients are
/// decimal residues in [0, p); variables are x1..xn.
MPoly parse_poly(std::string_view text, unsigned nvars, std::uint32_t p);

/// Canonical text form (terms in descending lexicographic order); parse_poly
/// of the result reproduces f.
std::string format_poly(const MPoly& f);

}  // namespace quasifix
