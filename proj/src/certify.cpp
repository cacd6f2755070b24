#include "quasifix/certify.hpp"

#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace quasifix {

using nlohmann::json;

// ----------------------------------------------------------- serialization

namespace {

json matrix_json(const RawMatrix& m) {
  json out = json::array();
  for (const auto& entry : m) out.push_back(entry);
  return out;
}

json tuple_json(const RawTuple& t) {
  json out = json::array();
  for (const auto& m : t) out.push_back(matrix_json(m));
  return out;
}

[[noreturn]] void malformed(const std::string& what) { throw ParseError("malformed certificate: " + what); }

const json& field_of(const json& obj, const char* key) {
  if (!obj.is_object()) malformed("expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) malformed(std::string("missing field '") + key + "'");
  return *it;
}

std::uint64_t as_uint(const json& v, const std::string& what) {
  if (!v.is_number_unsigned()) malformed(what + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& what) {
  if (!v.is_string()) malformed(what + " must be a string");
  return v.get<std::string>();
}

RawMatrix parse_matrix(const json& v) {
  if (!v.is_array() || v.size() != 4) malformed("a matrix must list exactly 4 entries");
  RawMatrix m;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!v[i].is_array()) malformed("a matrix entry must be a coefficient array");
    for (const auto& c : v[i]) m[i].push_back(as_uint(c, "coefficient"));
  }
  return m;
}

RawTuple parse_tuple(const json& v) {
  if (!v.is_array()) malformed("a tuple must be an array of matrices");
  RawTuple t;
  for (const auto& m : v) t.push_back(parse_matrix(m));
  return t;
}

}  // namespace

std::string certificate_to_json(const Certificate& cert) {
  json j;
  j["format_version"] = kCertificateFormatVersion;
  j["endomorphism"] = {{"rank", cert.rank}, {"images", cert.images}};
  j["word"] = cert.word;
  j["field"] = {{"p", cert.p}, {"s", cert.s}, {"modulus", cert.modulus}};
  j["h"] = tuple_json(cert.h);
  j["period"] = cert.period;
  json trace = json::array();
  for (const auto& t : cert.trace) trace.push_back(tuple_json(t));
  j["trace"] = std::move(trace);
  j["metadata"] = {{"seed", cert.seed}, {"seed_index", cert.seed_index}, {"version", cert.version}};
  return j.dump(2) + "\n";
}

Certificate certificate_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("certificate is not valid JSON: ") + e.what());
  }
  if (as_uint(field_of(j, "format_version"), "format_version") != kCertificateFormatVersion) {
    malformed("unsupported format_version");
  }
  Certificate cert;
  const json& endo = field_of(j, "endomorphism");
  const auto rank = as_uint(field_of(endo, "rank"), "rank");
  if (rank > 1'000'000) malformed("rank out of range");
  cert.rank = static_cast<unsigned>(rank);
  const json& images = field_of(endo, "images");
  if (!images.is_array()) malformed("images must be an array");
  for (const auto& w : images) cert.images.push_back(as_string(w, "image word"));
  cert.word = as_string(field_of(j, "word"), "word");
  const json& field = field_of(j, "field");
  cert.p = as_uint(field_of(field, "p"), "p");
  const auto s = as_uint(field_of(field, "s"), "s");
  if (s > 64) malformed("field degree out of range");
  cert.s = static_cast<unsigned>(s);
  const json& modulus = field_of(field, "modulus");
  if (!modulus.is_array()) malformed("modulus must be an array");
  for (const auto& c : modulus) cert.modulus.push_back(as_uint(c, "modulus coefficient"));
  cert.h = parse_tuple(field_of(j, "h"));
  cert.period = as_uint(field_of(j, "period"), "period");
  const json& trace = field_of(j, "trace");
  if (!trace.is_array()) malformed("trace must be an array");
  for (const auto& t : trace) cert.trace.push_back(parse_tuple(t));
  const json& meta = field_of(j, "metadata");
  cert.seed = as_uint(field_of(meta, "seed"), "seed");
  cert.seed_index = as_uint(field_of(meta, "seed_index"), "seed_index");
  cert.version = as_string(field_of(meta, "version"), "version");
  return cert;
}

RawTuple to_raw(const MatTuple& t) {
  RawTuple out;
  for (const auto& m : t.mats()) {
    RawMatrix r;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto c = m.entries()[i].coeffs();
      r[i].assign(c.begin(), c.end());
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ------------------------------------------------------------------ search

namespace {

MatTuple sanov_tuple_mod(unsigned rank, const FqField& field) {
  const BigInt p = field.characteristic();
  auto reduce = [&](const BigInt& x) {
    BigInt r = x % p;
    if (r < 0) r += p;
    return field.from_int(r.convert_to<std::int64_t>());
  };
  std::vector<Mat2> mats;
  for (unsigned i = 1; i <= rank; ++i) {
    const IntMatrix2 g = sanov_generator(rank, i);
    mats.emplace_back(reduce(g.a), reduce(g.b), reduce(g.c), reduce(g.d));
  }
  return MatTuple(std::move(mats));
}

ProjPoint random_point(unsigned rank, const FqField& field, std::mt19937_64& rng) {
  auto element = [&] {
    Coeffs c(field.degree());
    for (auto& x : c) x = static_cast<Residue>(rng() % field.characteristic());
    return FqElement(field, std::move(c));
  };
  std::vector<Mat2> mats;
  while (mats.size() < rank) {
    Mat2 m(element(), element(), element(), element());
    if (m.is_invertible()) mats.push_back(std::move(m));
  }
  return proj_normalize(MatTuple(std::move(mats)));
}

}  // namespace

std::uint64_t pick_prime(const FreeEndo& phi, const Word& w, std::uint64_t floor, std::uint64_t prime_limit) {
  if (w.rank() != phi.rank()) throw DomainError("word and endomorphism ranks differ");
  if (w.is_identity()) throw DomainError("the identity word cannot be separated from 1");
  const unsigned iterations = 4 * phi.rank();
  for (std::uint64_t p = next_prime(floor); p <= prime_limit; p = next_prime(p + 1)) {
    const FqField field = FqField::create(p, 1, UINT64_MAX);
    MatTuple t = sanov_tuple_mod(phi.rank(), field);
    for (unsigned i = 0; i < iterations; ++i) t = phi_lift(phi, t);
    if (!pi_w(w, t).is_scalar()) return p;
  }
  throw BudgetExceeded("no prime below " + std::to_string(prime_limit) +
                       " keeps the Sanov image of phi^4k(w) non-scalar");
}

ProjPoint sanov_seed(unsigned rank, const FqField& field) { return proj_normalize(sanov_tuple_mod(rank, field)); }

SearchOutcome search_certificate(const FreeEndo& phi, const Word& w, const CertifyConfig& config) {
  if (w.rank() != phi.rank()) throw DomainError("word and endomorphism ranks differ");
  if (w.is_identity()) throw DomainError("the identity word cannot be separated from 1");
  if (!config.allow_non_injective && !endo_is_injective(phi)) {
    throw DomainError("endomorphism is not injective (its images generate a subgroup of rank " +
                      std::to_string(subgroup_rank(stallings_fold(phi.images()))) + ")");
  }
  if (config.s_max < 1 || config.seeds_per_field < 1 || config.max_primes < 1) {
    throw DomainError("search bounds must be positive");
  }
  const unsigned k = phi.rank();
  SearchOutcome outcome;
  std::uint64_t p = pick_prime(phi, w, config.prime_floor);
  for (unsigned prime_round = 0; prime_round < config.max_primes; ++prime_round) {
    for (unsigned s = 1; s <= config.s_max; ++s) {
      std::optional<FqField> field;
      try {
        field = FqField::create(p, s);
      } catch (const CapExceeded&) {
        break;
      }
      for (std::uint64_t idx = 0; idx < config.seeds_per_field; ++idx) {
        outcome.frontier = "p=" + std::to_string(p) + " s=" + std::to_string(s) + " seed_index=" + std::to_string(idx);
        std::optional<ProjPoint> h0;
        if (idx == 0) {
          h0 = sanov_seed(k, *field);
        } else {
          std::seed_seq seq{config.seed, std::uint64_t{p}, std::uint64_t{s}, idx};
          std::mt19937_64 rng(seq);
          h0 = random_point(k, *field, rng);
        }
        ++outcome.orbits_tried;
        OrbitSearch orbit = find_periodic_orbit(phi, *h0, config.orbit_budget);
        if (!orbit.orbit) continue;
        std::vector<ProjPoint> cycle{orbit.orbit->point};
        for (std::uint64_t i = 1; i < orbit.orbit->period; ++i) cycle.push_back(pgl_dynamics_step(phi, cycle.back()));
        for (std::size_t start = 0; start < cycle.size(); ++start) {
          if (pi_w(w, cycle[start].tuple()).is_scalar()) continue;
          Certificate cert;
          cert.rank = k;
          for (const auto& img : phi.images()) cert.images.push_back(img.to_string());
          cert.word = w.to_string();
          cert.p = p;
          cert.s = s;
          cert.modulus.assign(field->modulus().begin(), field->modulus().end());
          cert.h = to_raw(cycle[start].tuple());
          cert.period = orbit.orbit->period;
          for (std::size_t i = 0; i < cycle.size(); ++i) {
            cert.trace.push_back(to_raw(cycle[(start + i) % cycle.size()].tuple()));
          }
          cert.seed = config.seed;
          cert.seed_index = idx;
          outcome.certificate = std::move(cert);
          return outcome;
        }
      }
    }
    p = pick_prime(phi, w, p + 1);
  }
  return outcome;
}

// ------------------------------------------------------------------ wreath

WreathElement WreathOps::identity() const {
  return {std::vector<Mat2>(n, Mat2::identity(field)), 0};
}

WreathElement WreathOps::multiply(const WreathElement& x, const WreathElement& y) const {
  const Pgl2Ops h{field};
  WreathElement r{{}, (x.shift + y.shift) % n};
  r.base.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) r.base.push_back(h.multiply(x.base[i], y.base[(i + x.shift) % n]));
  return r;
}

WreathElement WreathOps::invert(const WreathElement& x) const {
  const Pgl2Ops h{field};
  WreathElement r{{}, (n - x.shift) % n};
  r.base.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) r.base.push_back(h.invert(x.base[(i + n - x.shift) % n]));
  return r;
}

WreathElement WreathOps::cycle_generator() const {
  WreathElement c = identity();
  c.shift = 1 % n;
  return c;
}

bool WreathData::relations_ok() const {
  for (bool b : relation_holds) {
    if (!b) return false;
  }
  return !relation_holds.empty();
}

namespace {

struct Decoded {
  FqField field;
  FreeEndo endo;
  Word word;
};

// Field and words of a certificate; throws on anything uninterpretable.
Decoded decode_header(const Certificate& cert) {
  if (cert.rank < 1) throw DomainError("rank must be at least 1");
  if (cert.images.size() != cert.rank) throw DomainError("image count differs from rank");
  std::vector<Word> images;
  for (const auto& s : cert.images) images.push_back(word_parse(s, cert.rank));
  Word word = word_parse(cert.word, cert.rank);
  if (cert.s < 1) throw DomainError("field degree must be at least 1");
  FqField field = FqField::create(cert.p, cert.s);
  return {field, FreeEndo(std::move(images)), std::move(word)};
}

MatTuple decode_tuple(const RawTuple& raw, const FqField& field, unsigned rank) {
  if (raw.size() != rank) {
    throw DomainError("tuple has " + std::to_string(raw.size()) + " matrices, expected " + std::to_string(rank));
  }
  std::vector<Mat2> mats;
  for (const auto& m : raw) {
    std::vector<FqElement> entries;
    for (const auto& c : m) {
      if (c.size() != field.degree()) throw DomainError("coefficient vector has wrong length");
      Coeffs coeffs;
      for (auto x : c) {
        if (x >= field.characteristic()) throw DomainError("coefficient " + std::to_string(x) + " is not reduced");
        coeffs.push_back(static_cast<Residue>(x));
      }
      entries.emplace_back(field, std::move(coeffs));
    }
    mats.emplace_back(entries[0], entries[1], entries[2], entries[3]);
  }
  return MatTuple(std::move(mats));
}

}  // namespace

WreathData build_wreath(const Certificate& cert) {
  const Decoded d = decode_header(cert);
  if (cert.trace.empty()) throw DomainError("certificate has an empty orbit trace");
  std::vector<MatTuple> trace;
  for (const auto& t : cert.trace) trace.push_back(decode_tuple(t, d.field, cert.rank));

  WreathData data;
  data.period = trace.size();
  const WreathOps ops{d.field, data.period};
  data.y.assign(cert.rank, {});
  std::vector<WreathElement> gens;
  for (unsigned j = 0; j < cert.rank; ++j) {
    for (const auto& t : trace) data.y[j].push_back(normalize_matrix(t[j]));
    gens.push_back({data.y[j], 0});
  }
  const WreathElement c = ops.cycle_generator();
  const WreathElement c_inv = ops.invert(c);
  for (unsigned j = 0; j < cert.rank; ++j) {
    const WreathElement lhs = ops.multiply(ops.multiply(c, gens[j]), c_inv);
    const WreathElement rhs = word_evaluate<WreathElement>(d.endo.images()[j], gens, ops);
    data.relation_holds.push_back(lhs == rhs);
  }
  data.word_image = word_evaluate<WreathElement>(d.word, gens, ops);
  data.word_image_nontrivial =
      data.word_image->shift == 0 && !(data.word_image->base[0] == Mat2::identity(d.field));
  return data;
}

// ------------------------------------------------------------ verification

bool Verdict::passed() const {
  for (const auto& c : checks) {
    if (c.required && !c.passed) return false;
  }
  return true;
}

std::vector<std::string> Verdict::failed_conditions() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (c.required && !c.passed) out.push_back(c.condition);
  }
  return out;
}

std::string Verdict::to_json() const {
  json j;
  j["passed"] = passed();
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back({{"condition", c.condition},
                   {"description", c.description},
                   {"passed", c.passed},
                   {"required", c.required},
                   {"detail", c.detail}});
  }
  j["checks"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::string Verdict::to_text() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS" : (c.required ? "FAIL" : "WARN")) << "  [" << c.condition << "] " << c.description;
    if (!c.detail.empty()) os << ": " << c.detail;
    os << "\n";
  }
  os << "verdict: " << (passed() ? "VERIFIED" : "REJECTED") << "\n";
  return os.str();
}

Verdict verify_certificate(const Certificate& cert) {
  Verdict v;
  auto add = [&](std::string cond, std::string desc, bool ok, std::string detail, bool required = true) {
    v.checks.push_back({std::move(cond), std::move(desc), ok, required, std::move(detail)});
  };
  const char* kField = "field F_{p^s} reconstructs with the recorded modulus";
  const char* kEncoding = "words and matrices decode over F_{p^s}";
  const char* kMember = "h and its orbit lie in PGL_2(F_{p^s})^k in canonical form";
  const char* kCondI = "(i) h satisfies the relations of the base group (free: vacuous)";
  const char* kCondII = "(ii) h is fixed by phi_H^n and the trace is its orbit";
  const char* kCondIII = "(iii) w(h) != 1 in PGL_2(F_{p^s})";
  const char* kWreath = "t -> c, x_j -> y_j respects t x_j t^-1 = w_j in H wr C_n and w maps nontrivially";
  const char* kInjective = "endomorphism is injective (mapping torus hypothesis)";

  auto fail_rest = [&](const std::string& why) {
    add("membership", kMember, false, "not evaluated: " + why);
    add("i", kCondI, true, "no relators in a free group");
    add("ii", kCondII, false, "not evaluated: " + why);
    add("iii", kCondIII, false, "not evaluated: " + why);
    add("wreath", kWreath, false, "not evaluated: " + why);
  };

  // Field.
  std::optional<FqField> field;
  try {
    if (cert.s < 1) throw DomainError("field degree must be at least 1");
    if (!is_prime(cert.p)) throw DomainError(std::to_string(cert.p) + " is not prime");
    field = FqField::create(cert.p, cert.s);
    const auto mod = field->modulus();
    if (!std::equal(mod.begin(), mod.end(), cert.modulus.begin(), cert.modulus.end())) {
      throw DomainError("recorded modulus differs from the canonical modulus of F_" + std::to_string(cert.p) +
                        "^" + std::to_string(cert.s));
    }
    add("field", kField, true, field->to_string());
  } catch (const Error& e) {
    add("field", kField, false, e.what());
    add("encoding", kEncoding, false, "not evaluated: field invalid");
    fail_rest("field invalid");
    return v;
  }

  // Words and tuples.
  std::optional<Decoded> header;
  std::optional<MatTuple> h;
  std::vector<MatTuple> trace;
  try {
    header = decode_header(cert);
    h = decode_tuple(cert.h, *field, cert.rank);
    for (const auto& t : cert.trace) trace.push_back(decode_tuple(t, *field, cert.rank));
    add("encoding", kEncoding, true, "");
  } catch (const Error& e) {
    add("encoding", kEncoding, false, e.what());
    fail_rest("undecodable data");
    return v;
  }

  add("injective", kInjective, endo_is_injective(header->endo),
      "folded image rank " + std::to_string(subgroup_rank(stallings_fold(header->endo.images()))), false);

  // Membership in PGL_2^k.
  std::string member_problem;
  auto check_member = [&](const MatTuple& t, const std::string& where) {
    for (std::size_t j = 0; j < t.size() && member_problem.empty(); ++j) {
      if (!t[j].is_invertible()) {
        member_problem = where + " component " + std::to_string(j + 1) + " is singular";
      } else if (!is_normalized(t[j])) {
        member_problem = where + " component " + std::to_string(j + 1) + " is not scalar-normalized";
      }
    }
  };
  check_member(*h, "h");
  for (std::size_t i = 0; i < trace.size(); ++i) check_member(trace[i], "trace[" + std::to_string(i) + "]");
  const bool member_ok = member_problem.empty();
  add("membership", kMember, member_ok, member_problem);

  add("i", kCondI, true, "no relators in a free group");

  // (ii): rerun the orbit from h.
  if (!member_ok) {
    add("ii", kCondII, false, "not evaluated: " + member_problem);
  } else {
    std::string problem;
    try {
      if (cert.period < 1) {
        problem = "period must be at least 1";
      } else if (trace.size() != cert.period) {
        problem = "trace lists " + std::to_string(trace.size()) + " tuples but period is " +
                  std::to_string(cert.period);
      } else if (!(trace[0] == *h)) {
        problem = "trace does not start at h";
      } else {
        ProjPoint current(*h);
        for (std::size_t i = 1; i <= trace.size() && problem.empty(); ++i) {
          current = pgl_dynamics_step(header->endo, current);
          const MatTuple& expected = trace[i % trace.size()];
          if (!(current.tuple() == expected)) {
            problem = i == trace.size() ? "phi_H^n(h) != h"
                                        : "phi_H(trace[" + std::to_string(i - 1) + "]) != trace[" +
                                              std::to_string(i) + "]";
          }
        }
        if (problem.empty()) {
          std::set<RawTuple> distinct(cert.trace.begin(), cert.trace.end());
          if (distinct.size() != trace.size()) problem = "orbit repeats before the stated period";
        }
      }
    } catch (const Error& e) {
      problem = e.what();
    }
    add("ii", kCondII, problem.empty(), problem.empty() ? "period " + std::to_string(cert.period) : problem);
  }

  // (iii): exact scalar test in GL_2.
  {
    std::string detail;
    bool ok = false;
    if (header->word.is_identity()) {
      detail = "w reduces to the identity";
    } else {
      const Mat2 value = pi_w(header->word, *h);
      ok = !value.is_scalar();
      detail = "pi_w(h) = " + value.to_string() + (ok ? "" : " is scalar");
    }
    add("iii", kCondIII, ok, detail);
  }

  // Wreath product quotient.
  if (!member_ok || trace.empty()) {
    add("wreath", kWreath, false, member_ok ? "not evaluated: empty trace" : "not evaluated: " + member_problem);
  } else {
    try {
      const WreathData data = build_wreath(cert);
      std::string detail;
      for (std::size_t j = 0; j < data.relation_holds.size(); ++j) {
        if (!data.relation_holds[j]) detail += "relation for x" + std::to_string(j + 1) + " fails; ";
      }
      if (!data.word_image_nontrivial) detail += "image of w has trivial first coordinate";
      add("wreath", kWreath, data.relations_ok() && data.word_image_nontrivial,
          detail.empty() ? "n = " + std::to_string(data.period) : detail);
    } catch (const Error& e) {
      add("wreath", kWreath, false, e.what());
    }
  }
  return v;
}

}  // namespace quasifix
