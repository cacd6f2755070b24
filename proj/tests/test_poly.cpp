#include "doctest.h"

#include <random>

#include "catalog.hpp"
#include "oracles.hpp"
#include "quasifix/dynamics.hpp"
#include "quasifix/poly.hpp"

using namespace quasifix;

namespace {

MPoly P(const std::string& s, unsigned n, std::uint32_t p) { return parse_poly(s, n, p); }

// Independent reducer for I_Q: rewrites the *smallest* reducible monomial
// first over a flat term list.  Confluence means it must agree with the
// library's greatest-first strategy.
MPoly smallest_first_reduce(const PolyMap& map, std::uint64_t Q, MPoly g) {
  for (;;) {
    const Exponents* target = nullptr;
    for (const auto& [e, c] : g.terms()) {
      for (auto x : e) {
        if (x >= Q) {
          target = &e;
          break;
        }
      }
      if (target) break;
    }
    if (!target) return g;
    Exponents e = *target;
    const Residue c = g.coefficient(e);
    std::size_t i = 0;
    while (e[i] < Q) ++i;
    MPoly lead = MPoly::monomial(g.characteristic(), e, c);
    e[i] -= Q;
    MPoly replacement = MPoly::monomial(g.characteristic(), e, c) * map[i];
    g = g - lead + replacement;
  }
}

}  // namespace

TEST_CASE("poly_eval examples") {
  const FqField f2 = FqField::create(2, 1);
  CHECK(poly_eval(P("x1 + x2", 2, 2), std::vector{f2.one(), f2.one()}).is_zero());

  const FqField f4 = FqField::create(2, 2);
  CHECK(poly_eval(P("x1^2", 1, 2), std::vector{f4.generator()}) == f4.generator() + f4.one());

  const FqField f9 = FqField::create(3, 2);
  for (const auto& a : enumerate_elements(f9)) CHECK(poly_eval(P("2", 1, 3), std::vector{a}) == f9.from_int(2));

  CHECK_THROWS_AS(poly_eval(P("x1", 1, 2), std::vector{f2.one(), f2.one()}), DomainError);
  CHECK_THROWS_AS(poly_eval(P("x1", 1, 3), std::vector{f2.one()}), DomainError);
}

TEST_CASE("compose examples") {
  const PolyMap phi = catalog::parse_map({"x1 + x2", "x1*x2"}, 2);
  CHECK(compose(P("x1", 2, 2), phi) == phi[0]);

  const PolyMap sq = catalog::parse_map({"x1^2"}, 2);
  CHECK(map_compose(sq, sq)[0] == P("x1^4", 1, 2));

  const PolyMap id = PolyMap::identity(2, 2);
  CHECK(map_compose(phi, id) == phi);
  CHECK(map_compose(id, phi) == phi);
  CHECK(map_power(phi, 0) == id);

  CHECK_THROWS_AS(compose(P("x1", 1, 2), phi), DomainError);
}

TEST_CASE("frobenius_twist") {
  CHECK(frobenius_twist(P("x1 + 1", 1, 2), 1) == P("x1^2 + 1", 1, 2));
  CHECK(frobenius_twist(P("x1 + x2", 2, 3), 1) == P("x1^3 + x2^3", 2, 3));

  std::mt19937_64 rng(3);
  for (std::uint32_t p : {2u, 3u, 5u}) {
    for (int i = 0; i < 20; ++i) {
      const MPoly f = catalog::random_poly(2, p, 3, 3, rng);
      for (unsigned e : {1u, 2u}) {
        std::uint64_t pe = 1;
        for (unsigned k = 0; k < e; ++k) pe *= p;
        MPoly naive = MPoly::constant(2, p, 1);
        for (std::uint64_t k = 0; k < pe; ++k) naive = naive * f;
        CHECK(frobenius_twist(f, e) == naive);
      }
    }
  }
}

TEST_CASE("frobenius_twist commutes with evaluation over F4 and F9") {
  std::mt19937_64 rng(11);
  for (auto [p, m] : std::vector<std::pair<std::uint32_t, unsigned>>{{2, 2}, {3, 2}}) {
    const FqField f = FqField::create(p, m);
    const auto all = enumerate_elements(f);
    for (int t = 0; t < 10; ++t) {
      const MPoly g = catalog::random_poly(2, p, 3, 3, rng);
      for (unsigned e : {1u, 2u, 3u}) {
        const MPoly tw = frobenius_twist(g, e);
        for (const auto& a : all)
          for (const auto& b : all) CHECK(poly_eval(tw, std::vector{a, b}) == frobenius(poly_eval(g, std::vector{a, b}), e));
      }
    }
  }
}

TEST_CASE("iq_normal_form examples") {
  const IqSystem sys(catalog::parse_map({"x1^2"}, 2), 4);
  const MPoly g = P("x1^3 + x1 + 1", 1, 2);
  CHECK(sys.normal_form(g) == g);
  CHECK(sys.normal_form(P("x1^4", 1, 2)) == P("x1^2", 1, 2));

  // x^16 mod (x^4 - x^2) by long division.
  std::vector<std::uint64_t> x16(17, 0);
  x16[16] = 1;
  const auto rem = oracle::univariate_rem(x16, {0, 0, 1, 0, 1}, 2);  // x^4 + x^2 = x^4 - x^2 over F2
  MPoly expected(1, 2);
  for (std::size_t i = 0; i < rem.size(); ++i) expected.add_term({i}, rem[i]);
  CHECK(sys.normal_form(P("x1^16", 1, 2)) == expected);
  CHECK(expected == P("x1^2", 1, 2));
}

TEST_CASE("IqSystem preconditions") {
  CHECK_THROWS_AS(IqSystem(catalog::parse_map({"x1^4"}, 2), 4), DomainError);
  CHECK_THROWS_AS(IqSystem(catalog::parse_map({"x1"}, 2), 6), DomainError);
  CHECK_THROWS_AS(IqSystem(catalog::parse_map({"x1"}, 3), 1), DomainError);
}

TEST_CASE("iq_quotient_dimension") {
  CHECK(IqSystem(catalog::parse_map({"x1^2"}, 2), 4).quotient_dimension() == 4);
  CHECK(IqSystem(catalog::parse_map({"x1*x2 + 1", "x1^2"}, 3), 3).quotient_dimension() == 9);
  CHECK(IqSystem(catalog::parse_map({"x1 + 1"}, 2), 2).quotient_dimension() == 2);
}

TEST_CASE("iterate_congruence_check") {
  const IqSystem a(catalog::parse_map({"x1^2"}, 2), 4);
  CHECK(a.iterate_congruence_check(1));
  CHECK(a.iterate_congruence_check(2));

  const PolyMap phi = catalog::parse_map({"x1 + x2", "x1*x2"}, 2);
  const IqSystem b(phi, 4);
  CHECK(b.iterate_congruence_check(1));
  CHECK(b.iterate_congruence_check(2));

  // Explicit instance: f_1^{(2)} - x1^16 reduces to 0 by the independent reducer.
  const MPoly diff = map_power(phi, 2)[0] - P("x1^16", 2, 2);
  CHECK(smallest_first_reduce(phi, 4, diff).is_zero());
  CHECK_THROWS_AS(b.iterate_congruence_check(0), DomainError);
}

TEST_CASE("normal form agrees with an independent reduction order") {
  std::mt19937_64 rng(5);
  for (std::uint32_t p : {2u, 3u}) {
    for (int t = 0; t < 15; ++t) {
      std::vector<MPoly> coords{catalog::random_poly(2, p, 2, 3, rng), catalog::random_poly(2, p, 2, 3, rng)};
      const PolyMap map(coords);
      const std::uint64_t Q = p == 2 ? 4 : 3;
      const IqSystem sys(map, Q);
      const MPoly g = catalog::random_poly(2, p, 12, 6, rng);
      const MPoly nf = sys.normal_form(g);
      CHECK(nf == smallest_first_reduce(map, Q, g));
      CHECK(sys.normal_form(nf) == nf);  // idempotent
      for (const auto& [e, c] : nf.terms()) {
        for (auto x : e) CHECK(x < Q);
      }
    }
  }
}

TEST_CASE("g - nf(g) vanishes at quasi-fixed points with the same Q") {
  std::mt19937_64 rng(9);
  const PolyMap map = catalog::parse_map({"x1^2 + x1 + 1"}, 2);
  const IqSystem sys(map, 4);  // Q = 2^2
  std::size_t points = 0;
  for (unsigned s = 1; s <= 4; ++s) {
    const FqField f = FqField::create(2, s);
    for (const auto& a : enumerate_elements(f)) {
      if (!is_quasi_fixed(map, std::vector{a}, 2)) continue;
      ++points;
      for (int t = 0; t < 5; ++t) {
        const MPoly g = catalog::random_poly(1, 2, 20, 5, rng);
        CHECK(poly_eval(g - sys.normal_form(g), std::vector{a}).is_zero());
      }
    }
  }
  CHECK(points > 0);
}

TEST_CASE("ring axioms and evaluation homomorphism") {
  std::mt19937_64 rng(1);
  const FqField f = FqField::create(5, 2);
  for (int t = 0; t < 30; ++t) {
    const MPoly a = catalog::random_poly(2, 5, 3, 3, rng);
    const MPoly b = catalog::random_poly(2, 5, 3, 3, rng);
    const MPoly c = catalog::random_poly(2, 5, 3, 3, rng);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a - a == MPoly(2, 5));
    const std::vector<FqElement> pt{f.element_at(rng() % 25), f.element_at(rng() % 25)};
    CHECK(poly_eval(a * b + c, pt) == poly_eval(a, pt) * poly_eval(b, pt) + poly_eval(c, pt));
  }
}

TEST_CASE("evaluation commutes with composition") {
  std::mt19937_64 rng(2);
  for (auto [p, m] : std::vector<std::pair<std::uint32_t, unsigned>>{{2, 2}, {3, 1}, {5, 1}}) {
    const FqField f = FqField::create(p, m);
    for (int t = 0; t < 10; ++t) {
      const PolyMap phi({catalog::random_poly(2, p, 3, 3, rng), catalog::random_poly(2, p, 3, 3, rng)});
      const MPoly g = catalog::random_poly(2, p, 3, 3, rng);
      const MPoly gc = compose(g, phi);
      for (int k = 0; k < 10; ++k) {
        const std::vector<FqElement> pt{f.element_at(rng() % f.order()), f.element_at(rng() % f.order())};
        CHECK(poly_eval(gc, pt) == poly_eval(g, phi(pt)));
      }
    }
  }
}

TEST_CASE("parse and format") {
  const MPoly f = P("3*x1^2*x2 + x2 - 1", 2, 5);
  CHECK(f.coefficient({2, 1}) == 3);
  CHECK(f.coefficient({0, 1}) == 1);
  CHECK(f.coefficient({0, 0}) == 4);
  CHECK(format_poly(f) == "3*x1^2*x2 + x2 + 4");
  CHECK(format_poly(MPoly(2, 5)) == "0");
  CHECK(P("0", 1, 2).is_zero());
  CHECK(P("x1*x1", 1, 3) == P("x1^2", 1, 3));
  CHECK(P("2*2", 1, 5) == P("4", 1, 5));

  for (const char* bad : {"", "x", "x0", "x3", "5*x1", "x1^", "x1 +", "x1 ** 2", "y1", "1.5", "x1^-1", "+"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(P(bad, 2, 5), ParseError);
  }

  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const std::uint32_t p = std::vector<std::uint32_t>{2, 3, 5, 7}[t % 4];
    const MPoly g = catalog::random_poly(3, p, 5, 5, rng);
    CHECK(P(format_poly(g), 3, p) == g);
  }
}

TEST_CASE("symbolic budget") {
  const std::size_t old = symbolic_term_budget();
  set_symbolic_term_budget(50);
  const MPoly f = P("x1 + x2 + 1", 2, 7);
  CHECK_THROWS_AS(f.pow(20), BudgetExceeded);
  set_symbolic_term_budget(old);
  CHECK_NOTHROW(f.pow(20));
}
