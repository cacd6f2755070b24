#include "doctest.h"

#include <random>
#include <set>
#include <vector>

#include "quasifix/gf.hpp"

using namespace quasifix;

namespace {

std::vector<Residue> mod_of(const FqField& f) { return {f.modulus().begin(), f.modulus().end()}; }

FqElement el(const FqField& f, std::vector<Residue> c) { return f.from_coeffs(c); }

// Root search over F_p for a monic polynomial given low-first.
bool has_root(const std::vector<std::uint64_t>& f, std::uint64_t p) {
  for (std::uint64_t x = 0; x < p; ++x) {
    std::uint64_t acc = 0;
    for (std::size_t i = f.size(); i-- > 0;) acc = (acc * x + f[i]) % p;
    if (acc == 0) return true;
  }
  return false;
}

const std::vector<std::pair<std::uint64_t, unsigned>> kSmallFields = {
    {2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}, {11, 1}, {13, 1}, {2, 4},
    {17, 1}, {19, 1}, {23, 1}, {5, 2}};

}  // namespace

TEST_CASE("field_create picks the least irreducible modulus") {
  CHECK(mod_of(FqField::create(2, 1)) == std::vector<Residue>{0, 1});
  CHECK(mod_of(FqField::create(2, 2)) == std::vector<Residue>{1, 1, 1});
  CHECK(mod_of(FqField::create(5, 2)) == std::vector<Residue>{2, 0, 1});

  // Oracle: in degrees 2 and 3 irreducible means rootless; the chosen modulus is
  // the first rootless monic polynomial in code order.
  for (auto [p, m] : std::vector<std::pair<std::uint64_t, unsigned>>{{2, 2}, {3, 2}, {5, 2}, {7, 2}, {2, 3}, {3, 3}, {5, 3}}) {
    std::uint64_t count = 1;
    for (unsigned i = 0; i < m; ++i) count *= p;
    std::vector<std::uint64_t> expected;
    for (std::uint64_t code = 0; code < count && expected.empty(); ++code) {
      std::vector<std::uint64_t> f(m + 1, 0);
      f[m] = 1;
      std::uint64_t c = code;
      for (unsigned i = 0; i < m; ++i, c /= p) f[i] = c % p;
      if (!has_root(f, p)) expected = f;
    }
    const auto got = mod_of(FqField::create(p, m));
    CHECK(std::vector<std::uint64_t>(got.begin(), got.end()) == expected);
  }
}

TEST_CASE("field_create rejects bad parameters") {
  CHECK_THROWS_AS(FqField::create(4, 1), DomainError);
  CHECK_THROWS_AS(FqField::create(1, 1), DomainError);
  CHECK_THROWS_AS(FqField::create(2, 0), DomainError);
  CHECK_THROWS_AS(FqField::create(2, 21), CapExceeded);
  CHECK_THROWS_AS(FqField::create(3, 5, 100), CapExceeded);
  CHECK_NOTHROW(FqField::create(3, 4, 81));
}

TEST_CASE("degree 4 modulus is irreducible by exhaustive factor search") {
  // x^4 + ... over F_2 with no factor of degree 1 or 2.
  const auto f = mod_of(FqField::create(2, 4));
  REQUIRE(f.size() == 5);
  CHECK(!has_root({f.begin(), f.end()}, 2));
  // The only irreducible quadratic over F_2 is x^2+x+1; its square is x^4+x^2+1.
  CHECK(f != std::vector<Residue>{1, 0, 1, 0, 1});
}

TEST_CASE("basic arithmetic examples") {
  const FqField f5 = FqField::create(5, 1);
  CHECK(f5.from_int(2).inv() == f5.from_int(3));
  CHECK_THROWS_AS(f5.zero().inv(), DomainError);

  const FqField f4 = FqField::create(2, 2);
  const FqElement t = f4.generator();
  CHECK(t * t == el(f4, {1, 1}));

  for (auto [p, m] : kSmallFields) {
    const FqField f = FqField::create(p, m);
    for (const auto& a : enumerate_elements(f)) {
      if (!a.is_zero()) CHECK(a.pow(f.order() - 1).is_one());
    }
  }

  const FqField f3 = FqField::create(3, 1);
  CHECK_THROWS_AS(f3.one() + f5.one(), DomainError);
}

TEST_CASE("frobenius examples") {
  const FqField f7 = FqField::create(7, 1);
  for (const auto& a : enumerate_elements(f7)) CHECK(frobenius(a, 1) == a);

  const FqField f4 = FqField::create(2, 2);
  CHECK(frobenius(f4.generator(), 1) == el(f4, {1, 1}));

  const FqField f27 = FqField::create(3, 3);
  for (const auto& a : enumerate_elements(f27)) {
    for (unsigned i = 0; i < 4; ++i)
      for (unsigned j = 0; j < 4; ++j) CHECK(frobenius(frobenius(a, i), j) == frobenius(a, i + j));
  }
}

TEST_CASE("enumerate_elements order and count") {
  const auto f2 = enumerate_elements(FqField::create(2, 1));
  REQUIRE(f2.size() == 2);
  CHECK(f2[0].is_zero());
  CHECK(f2[1].is_one());

  const FqField f4 = FqField::create(2, 2);
  const auto e4 = enumerate_elements(f4);
  REQUIRE(e4.size() == 4);
  CHECK(e4.front().is_zero());
  CHECK(e4.back() == f4.generator() + f4.one());

  for (auto [p, m] : kSmallFields) {
    const FqField f = FqField::create(p, m);
    const auto all = enumerate_elements(f);
    CHECK(all.size() == f.order());
    std::set<std::uint64_t> seen;
    for (std::size_t i = 0; i < all.size(); ++i) {
      CHECK(all[i].index() == i);
      seen.insert(all[i].index());
    }
    CHECK(seen.size() == f.order());
  }
}

TEST_CASE("field axioms hold exhaustively for q <= 25") {
  for (auto [p, m] : kSmallFields) {
    const FqField f = FqField::create(p, m);
    const auto all = enumerate_elements(f);
    CAPTURE(f.to_string());
    for (const auto& a : all) {
      CHECK(a + f.zero() == a);
      CHECK(a * f.one() == a);
      CHECK(a + (-a) == f.zero());
      if (!a.is_zero()) CHECK((a * a.inv()).is_one());
      for (const auto& b : all) {
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK(a - b + b == a);
        for (const auto& c : all) {
          if (f.order() > 16) continue;  // cubic loops only on the smallest fields
          CHECK((a + b) + c == a + (b + c));
          CHECK((a * b) * c == a * (b * c));
          CHECK(a * (b + c) == a * b + a * c);
        }
      }
    }
  }
}

TEST_CASE("frobenius is an automorphism fixing exactly the prime field") {
  for (auto [p, m] : kSmallFields) {
    const FqField f = FqField::create(p, m);
    const auto all = enumerate_elements(f);
    std::set<std::uint64_t> images;
    std::size_t fixed = 0;
    for (const auto& a : all) {
      const FqElement fa = frobenius(a, 1);
      images.insert(fa.index());
      if (fa == a) {
        ++fixed;
        CHECK(a.index() < p);  // prime-field elements are exactly indices < p
      }
      for (const auto& b : all) {
        CHECK(frobenius(a + b, 1) == fa + frobenius(b, 1));
        CHECK(frobenius(a * b, 1) == fa * frobenius(b, 1));
      }
    }
    CHECK(images.size() == all.size());
    CHECK(fixed == p);
  }
}

TEST_CASE("frobenius to the field degree is the identity for q <= 64") {
  for (auto [p, m] : std::vector<std::pair<std::uint64_t, unsigned>>{
           {2, 5}, {2, 6}, {3, 3}, {7, 2}, {31, 1}, {61, 1}, {5, 2}, {2, 4}}) {
    const FqField f = FqField::create(p, m);
    for (const auto& a : enumerate_elements(f)) CHECK(frobenius(a, m) == a);
  }
}

TEST_CASE("embeddings are injective homomorphisms commuting with frobenius") {
  for (auto [p, a, b] : std::vector<std::tuple<std::uint64_t, unsigned, unsigned>>{{2, 2, 4}, {3, 2, 4}, {2, 1, 3}}) {
    const FqField src = FqField::create(p, a);
    const FqField dst = FqField::create(p, b);
    const Embedding emb(src, dst);
    CHECK(emb(src.zero()) == dst.zero());
    CHECK(emb(src.one()) == dst.one());
    std::set<std::uint64_t> images;
    const auto all = enumerate_elements(src);
    for (const auto& x : all) {
      images.insert(emb(x).index());
      CHECK(emb(frobenius(x, 1)) == frobenius(emb(x), 1));
      CHECK(embed(x, dst) == emb(x));
      for (const auto& y : all) {
        CHECK(emb(x + y) == emb(x) + emb(y));
        CHECK(emb(x * y) == emb(x) * emb(y));
      }
    }
    CHECK(images.size() == all.size());
  }
}

TEST_CASE("embedding rejects incompatible fields") {
  CHECK_THROWS_AS(Embedding(FqField::create(2, 2), FqField::create(2, 3)), DomainError);
  CHECK_THROWS_AS(Embedding(FqField::create(2, 1), FqField::create(3, 1)), DomainError);
}

TEST_CASE("element_degree") {
  const FqField f16 = FqField::create(2, 4);
  std::size_t deg1 = 0, deg2 = 0, deg4 = 0;
  for (const auto& a : enumerate_elements(f16)) {
    switch (element_degree(a)) {
      case 1: ++deg1; break;
      case 2: ++deg2; break;
      case 4: ++deg4; break;
      default: FAIL("unexpected degree");
    }
  }
  CHECK(deg1 == 2);
  CHECK(deg2 == 2);
  CHECK(deg4 == 12);
}

TEST_CASE("random arithmetic in a larger field") {
  const FqField f = FqField::create(3, 7);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const FqElement a = f.element_at(rng() % f.order());
    const FqElement b = f.element_at(rng() % f.order());
    CHECK((a * b).pow(5) == a.pow(5) * b.pow(5));
    if (!b.is_zero()) CHECK(a * b * b.inv() == a);
  }
}
