#include "doctest.h"

#include <algorithm>

#include "catalog.hpp"
#include "quasifix/certify.hpp"

using namespace quasifix;

namespace {

FreeEndo E(unsigned k, std::vector<std::string> images) {
  std::vector<Word> w;
  for (const auto& s : images) w.push_back(word_parse(s, k));
  return FreeEndo(std::move(w));
}

Certificate certify(const FreeEndo& phi, const std::string& w, CertifyConfig cfg = {}) {
  const SearchOutcome out = search_certificate(phi, word_parse(w, phi.rank()), cfg);
  REQUIRE(out.certificate);
  return *out.certificate;
}

bool names(const Verdict& v, const std::string& cond) {
  const auto f = v.failed_conditions();
  return std::find(f.begin(), f.end(), cond) != f.end();
}

// Least p whose reduction of the integer matrix is non-scalar.
std::uint64_t bigint_prime(const IntMatrix2& m) {
  for (std::uint64_t p = 2;; p = next_prime(p + 1)) {
    const BigInt P = p;
    auto zero = [&](const BigInt& x) { return x % P == 0; };
    if (!(zero(m.b) && zero(m.c) && zero(m.a - m.d))) return p;
  }
}

}  // namespace

TEST_CASE("pick_prime examples") {
  CHECK(pick_prime(E(1, {"aa"}), word_parse("a", 1)) == 3);
  CHECK(pick_prime(E(1, {"aa"}), word_parse("a", 1), 4) == 5);
  CHECK(pick_prime(E(2, {"b", "a"}), word_parse("a", 2)) == 3);  // [[1,2],[0,1]] after 8 swaps
  CHECK_THROWS_AS(pick_prime(E(1, {"aa"}), Word(1)), DomainError);
}

TEST_CASE("pick_prime agrees with integer arithmetic") {
  for (const auto& phi : catalog::certificate_endos()) {
    if (phi.rank() == 3) continue;  // integer words get too long; covered by the dynamics equivalence below
    for (const auto& w : catalog::reduced_words(phi.rank(), 2)) {
      const NonscalarCheck c = nonscalar_sanity_check(phi, w, 4 * phi.rank(), 5'000'000);
      CAPTURE(w.to_string());
      CHECK(pick_prime(phi, w) == bigint_prime(c.matrix));
    }
  }
}

TEST_CASE("sanov_seed") {
  const FqField f5 = FqField::create(5, 1);
  const ProjPoint s = sanov_seed(2, f5);
  CHECK(s[0].to_string() == Mat2(f5.one(), f5.from_int(2), f5.zero(), f5.one()).to_string());
  CHECK(s[1] == Mat2(f5.one(), f5.zero(), f5.from_int(2), f5.one()));
}

TEST_CASE("BS(1,2) certificate verifies") {
  const Certificate cert = certify(E(1, {"aa"}), "a");
  CHECK(cert.rank == 1);
  CHECK(cert.p == 3);
  CHECK(cert.trace.size() == cert.period);
  CHECK(cert.trace.front() == cert.h);
  const Verdict v = verify_certificate(cert);
  CHECK_MESSAGE(v.passed(), v.to_text());

  const WreathData wd = build_wreath(cert);
  CHECK(wd.relations_ok());
  CHECK(wd.word_image_nontrivial);
  // Relation c y c^-1 = y^2, coordinatewise: h^(i+1) = (h^(i))^2 projectively.
  const FqField f = FqField::create(cert.p, cert.s);
  for (std::uint64_t i = 0; i < wd.period; ++i) {
    const Mat2& y = wd.y[0][i];
    CHECK(normalize_matrix(y * y) == wd.y[0][(i + 1) % wd.period]);
  }
  REQUIRE(wd.word_image);
  CHECK(wd.word_image->shift == 0);
  CHECK(wd.word_image->base[0] == wd.y[0][0]);
  CHECK(!wd.y[0][0].is_scalar());
  (void)f;
}

TEST_CASE("(ab, ba) certificates for all short words") {
  const FreeEndo phi = E(2, {"ab", "ba"});
  for (const auto& w : catalog::reduced_words(2, 2)) {
    const Certificate cert = certify(phi, w.to_string());
    const Verdict v = verify_certificate(cert);
    CAPTURE(w.to_string());
    CHECK_MESSAGE(v.passed(), v.to_text());
  }
}

TEST_CASE("period 1 certificates: the identity endomorphism") {
  const Certificate cert = certify(FreeEndo::identity(2), "ab");
  CHECK(cert.period == 1);
  const WreathData wd = build_wreath(cert);
  CHECK(wd.period == 1);
  CHECK(wd.relations_ok());
  CHECK(verify_certificate(cert).passed());
}

TEST_CASE("search preconditions") {
  CHECK_THROWS_AS(search_certificate(E(2, {"ab", "ba"}), Word(2)), DomainError);
  CHECK_THROWS_AS(search_certificate(E(2, {"a", "a"}), word_parse("a", 2)), DomainError);
  CHECK_THROWS_AS(search_certificate(E(2, {"ab", "ba"}), word_parse("a", 1)), DomainError);
  CertifyConfig cfg;
  cfg.allow_non_injective = true;
  // a -> a, b -> a: b A is killed by phi but the tuple dynamics still may separate it.
  CHECK_NOTHROW(search_certificate(E(2, {"a", "a"}), word_parse("a", 2), cfg));
}

TEST_CASE("wreath group laws") {
  const FqField f = FqField::create(5, 1);
  const WreathOps ops{f, 3};
  std::mt19937_64 rng(1);
  auto rand_el = [&] {
    WreathElement x{{}, rng() % 3};
    for (int i = 0; i < 3; ++i) {
      for (;;) {
        Mat2 m(f.element_at(rng() % 5), f.element_at(rng() % 5), f.element_at(rng() % 5), f.element_at(rng() % 5));
        if (m.is_invertible()) {
          x.base.push_back(normalize_matrix(m));
          break;
        }
      }
    }
    return x;
  };
  for (int t = 0; t < 50; ++t) {
    const WreathElement a = rand_el(), b = rand_el(), c = rand_el();
    CHECK(ops.multiply(a, ops.invert(a)) == ops.identity());
    CHECK(ops.multiply(ops.invert(a), a) == ops.identity());
    CHECK(ops.multiply(ops.multiply(a, b), c) == ops.multiply(a, ops.multiply(b, c)));
  }
  // c has order n.
  const WreathElement c = ops.cycle_generator();
  CHECK(ops.multiply(ops.multiply(c, c), c) == ops.identity());
}

TEST_CASE("tampered certificates fail the right condition") {
  const Certificate good = certify(E(2, {"ab", "ba"}), "a");
  REQUIRE(verify_certificate(good).passed());
  REQUIRE(good.period >= 2);

  {
    Certificate c = good;
    c.period += 1;
    CHECK(names(verify_certificate(c), "ii"));
  }
  {
    Certificate c = good;
    std::swap(c.trace[0], c.trace[1]);
    CHECK(names(verify_certificate(c), "ii"));
  }
  {
    Certificate c = good;
    c.word = "";
    CHECK(names(verify_certificate(c), "iii"));
  }
  {
    Certificate c = good;
    c.word = "aA";
    CHECK(names(verify_certificate(c), "iii"));
  }
  {
    // Replace every matrix by the identity: a fixed point with w(h) scalar.
    Certificate c = good;
    RawMatrix id;
    const std::size_t s = c.s;
    id[0] = std::vector<std::uint64_t>(s, 0);
    id[0][0] = 1;
    id[1] = std::vector<std::uint64_t>(s, 0);
    id[2] = id[1];
    id[3] = id[0];
    c.h = RawTuple(c.rank, id);
    c.period = 1;
    c.trace = {c.h};
    const Verdict v = verify_certificate(c);
    CHECK(names(v, "iii"));
    CHECK(!names(v, "ii"));
  }
  {
    Certificate c = good;
    for (auto& x : c.h[0][1]) x = 0;
    for (auto& x : c.h[0][3]) x = 0;  // [[1,0],[*,0]] is singular
    const Verdict v = verify_certificate(c);
    CHECK(names(v, "membership"));
  }
  {
    Certificate c = good;
    c.p = next_prime(c.p + 1);
    // Prime fields share the modulus x, so the damage shows up in the orbit instead.
    const Verdict v = verify_certificate(c);
    CHECK(!v.passed());
    CHECK((names(v, "field") || names(v, "ii")));
  }
  {
    Certificate c = good;
    c.p = 4;
    CHECK(names(verify_certificate(c), "field"));
  }
}

TEST_CASE("JSON round trip and canonical bytes") {
  const Certificate cert = certify(E(2, {"ab", "ba"}), "ab");
  const std::string text = certificate_to_json(cert);
  CHECK(text.back() == '\n');
  const Certificate back = certificate_from_json(text);
  CHECK(back == cert);
  CHECK(certificate_to_json(back) == text);
  CHECK(text.find("\"format_version\": 1") != std::string::npos);
  // Keys are sorted.
  CHECK(text.find("\"endomorphism\"") < text.find("\"field\""));
  CHECK(text.find("\"field\"") < text.find("\"h\""));
}

TEST_CASE("search is deterministic") {
  const FreeEndo phi = E(2, {"aab", "b"});
  CertifyConfig cfg;
  cfg.seed = 17;
  const std::string a = certificate_to_json(certify(phi, "b", cfg));
  const std::string b = certificate_to_json(certify(phi, "b", cfg));
  CHECK(a == b);
}

TEST_CASE("malformed certificate JSON") {
  CHECK_THROWS_AS(certificate_from_json("not json"), ParseError);
  CHECK_THROWS_AS(certificate_from_json("{}"), ParseError);
  CHECK_THROWS_AS(certificate_from_json("[1,2]"), ParseError);
  const Certificate cert = certify(E(1, {"aa"}), "a");
  std::string text = certificate_to_json(cert);
  const auto pos = text.find("\"period\"");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 8, "\"perion\"");
  CHECK_THROWS_AS(certificate_from_json(text), ParseError);
}

TEST_CASE("Frobenius shortcut: quasi-fixed tuples are periodic") {
  // Any h with phi_lift(h) = Fr^m(h) projectively has Phi^s-orbit closing; check against Brent.
  const FreeEndo phi = E(1, {"aaa"});
  const FqField f = FqField::create(2, 2);
  for (const auto& a : enumerate_elements(f)) {
    for (const auto& b : enumerate_elements(f)) {
      for (const auto& c : enumerate_elements(f)) {
        for (const auto& d : enumerate_elements(f)) {
          const Mat2 m(a, b, c, d);
          if (!m.is_invertible() || !is_normalized(m)) continue;
          const ProjPoint h(MatTuple({m}));
          for (unsigned e = 1; e <= 2; ++e) {
            if (!(pgl_dynamics_step(phi, h) == proj_normalize(frobenius_tuple(h.tuple(), e)))) continue;
            const OrbitSearch r = find_periodic_orbit(phi, h);
            REQUIRE(r.orbit);
            CHECK(2 % r.orbit->period == 0);
            ProjPoint x = h;
            for (int i = 0; i < 2; ++i) x = pgl_dynamics_step(phi, x);
            CHECK(x == h);
          }
        }
      }
    }
  }
}

TEST_CASE("catalog round trips") {
  for (const auto& phi : catalog::certificate_endos()) {
    const unsigned max_len = phi.rank() == 3 ? 1 : 3;
    for (const auto& w : catalog::reduced_words(phi.rank(), max_len)) {
      if (w.length() == 3 && w.letters()[0] != 1) continue;  // a representative subset at length 3
      const Certificate cert = certify(phi, w.to_string());
      const Certificate back = certificate_from_json(certificate_to_json(cert));
      const Verdict v = verify_certificate(back);
      CAPTURE(w.to_string());
      CHECK_MESSAGE(v.passed(), v.to_text());
    }
  }
}

TEST_CASE("verdict rendering") {
  const Verdict v = verify_certificate(certify(E(1, {"aa"}), "a"));
  CHECK(v.to_text().find("verdict: VERIFIED") != std::string::npos);
  CHECK(v.to_json().find("\"passed\": true") != std::string::npos);
  for (const char* cond : {"field", "encoding", "membership", "i", "ii", "iii", "wreath"}) {
    CHECK(std::any_of(v.checks.begin(), v.checks.end(), [&](const VerdictCheck& c) { return c.condition == cond; }));
  }
}
