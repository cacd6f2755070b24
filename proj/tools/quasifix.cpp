// quasifix: command-line front end for quasi-fixed point experiments, I_Q
// computations, Stallings folding and mapping-torus certificates.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "quasifix/certify.hpp"
#include "quasifix/dynamics.hpp"
#include "quasifix/freegroup.hpp"
#include "quasifix/poly.hpp"

using namespace quasifix;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2 };

struct Options {
  std::uint64_t p = 2;
  unsigned n = 0;
  std::vector<std::string> map;
  std::vector<std::string> v;
  std::string w;
  unsigned smax = 3;
  std::uint64_t q = 0;
  unsigned j = 2;
  std::string endo;
  std::string word;
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
  std::string format = "json";
  std::string out;
  unsigned k = 0;
  std::vector<std::string> words;
  std::string certificate;
};

std::vector<std::string> split_specs(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& r : raw) {
    std::stringstream ss(r);
    std::string part;
    while (std::getline(ss, part, ';')) {
      if (part.find_first_not_of(" \t") != std::string::npos) out.push_back(part);
    }
  }
  return out;
}

std::uint32_t prime_of(const Options& o) {
  if (!is_prime(o.p) || o.p > UINT32_MAX) throw ParseError("--p must be a prime, got " + std::to_string(o.p));
  return static_cast<std::uint32_t>(o.p);
}

PolyMap read_map(const Options& o) {
  const auto coords = split_specs(o.map);
  if (coords.empty()) throw ParseError("--map is required");
  const unsigned n = o.n == 0 ? static_cast<unsigned>(coords.size()) : o.n;
  if (coords.size() != n) {
    throw ParseError("--n is " + std::to_string(n) + " but " + std::to_string(coords.size()) +
                     " coordinate polynomials were given");
  }
  const std::uint32_t p = prime_of(o);
  std::vector<MPoly> polys;
  for (const auto& c : coords) polys.push_back(parse_poly(c, n, p));
  return PolyMap(std::move(polys));
}

json element_json(const FqElement& x) {
  const auto c = x.coeffs();
  return json(std::vector<std::uint64_t>(c.begin(), c.end()));
}

json witness_json(const QuasiFixedWitness& w) {
  json pt = json::array();
  for (const auto& x : w.point) pt.push_back(element_json(x));
  return {{"p", w.characteristic()}, {"s", w.field_degree}, {"m", w.m}, {"point", pt}};
}

std::string witness_text(const QuasiFixedWitness& w) {
  std::string s = "s=" + std::to_string(w.field_degree) + " m=" + std::to_string(w.m) + " point=(";
  for (std::size_t i = 0; i < w.point.size(); ++i) s += (i ? ", " : "") + w.point[i].to_string();
  return s + ")";
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw ParseError("cannot write " + o.out);
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_quasifixed(const Options& o) {
  const PolyMap map = read_map(o);
  const auto ws = enumerate_quasi_fixed(map, o.smax);
  if (o.format == "json") {
    json arr = json::array();
    for (const auto& w : ws) arr.push_back(witness_json(w));
    emit(o, dump({{"p", o.p}, {"n", map.nvars()}, {"s_max", o.smax}, {"count", ws.size()}, {"witnesses", arr}}));
  } else {
    std::string t = "p=" + std::to_string(o.p) + " n=" + std::to_string(map.nvars()) +
                    " s_max=" + std::to_string(o.smax) + " count=" + std::to_string(ws.size()) + "\n";
    for (const auto& w : ws) t += witness_text(w) + "\n";
    emit(o, t);
  }
  return kOk;
}

int cmd_density(const Options& o) {
  const PolyMap map = read_map(o);
  const std::uint32_t p = prime_of(o);
  VarietySpec v;
  for (const auto& e : split_specs(o.v)) v.equations.push_back(parse_poly(e, map.nvars(), p));
  if (o.w.empty()) throw ParseError("--w is required");
  const MPoly avoid = parse_poly(o.w, map.nvars(), p);
  const auto found = find_quasi_fixed_avoiding(map, v, avoid, o.smax);
  if (o.format == "json") {
    json j{{"found", found.has_value()}};
    if (found) {
      j["witness"] = witness_json(*found);
    } else {
      j["frontier"] = {{"p", o.p}, {"s_max", o.smax}, {"reason", "no witness off W up to s_max"}};
    }
    emit(o, dump(j));
  } else {
    emit(o, found ? "found " + witness_text(*found) + "\n"
                  : "not found: p=" + std::to_string(o.p) + " s_max=" + std::to_string(o.smax) +
                        " (no witness off W up to s_max)\n");
  }
  return found ? kOk : kFailed;
}

int cmd_iq(const Options& o) {
  const PolyMap map = read_map(o);
  if (o.q == 0) throw ParseError("--q is required");
  if (o.budget) set_symbolic_term_budget(o.budget);
  const IqSystem sys(map, o.q);
  const std::uint64_t dim = sys.quotient_dimension();
  json checks = json::array();
  bool all = true;
  std::string text;
  for (unsigned j = 1; j <= o.j; ++j) {
    const bool ok = sys.iterate_congruence_check(j);
    all = all && ok;
    checks.push_back({{"j", j}, {"holds", ok}});
    text += "congruence j=" + std::to_string(j) + " " + (ok ? "true" : "false") + "\n";
  }
  if (o.format == "json") {
    emit(o, dump({{"p", o.p}, {"n", map.nvars()}, {"Q", o.q}, {"dimension", dim}, {"congruence", checks}}));
  } else {
    emit(o, "p=" + std::to_string(o.p) + " n=" + std::to_string(map.nvars()) + " Q=" + std::to_string(o.q) +
                " dimension=" + std::to_string(dim) + "\n" + text);
  }
  return all ? kOk : kFailed;
}

int cmd_fold(const Options& o) {
  if (o.k == 0) throw ParseError("--k is required");
  std::vector<Word> words;
  for (const auto& s : o.words) words.push_back(word_parse(s, o.k));
  const StallingsGraph g = stallings_fold(words);
  const std::size_t rank = subgroup_rank(g);
  // Words generating a free factor of full rank define an injective endomorphism.
  const bool injective = words.size() == o.k && rank == o.k;
  if (o.format == "json") {
    json ws = json::array();
    for (const auto& w : words) ws.push_back(w.to_string());
    emit(o, dump({{"k", o.k},
                  {"words", ws},
                  {"vertices", g.vertex_count},
                  {"edges", g.edges.size()},
                  {"rank", rank},
                  {"injective", injective}}));
  } else {
    emit(o, "vertices=" + std::to_string(g.vertex_count) + " edges=" + std::to_string(g.edges.size()) +
                " rank=" + std::to_string(rank) + " injective=" + (injective ? "true" : "false") + "\n");
  }
  return kOk;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// --endo is a JSON file {"rank": k, "images": [...]}, or an inline
// comma-separated image list such as "ab,ba".
FreeEndo read_endo(const std::string& spec) {
  std::vector<std::string> images;
  std::optional<unsigned> rank;
  if (std::filesystem::is_regular_file(spec)) {
    json j;
    try {
      j = json::parse(slurp(spec));
    } catch (const json::exception& e) {
      throw ParseError("endomorphism file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object() || !j.contains("images") || !j["images"].is_array()) {
      throw ParseError("endomorphism file needs an \"images\" array");
    }
    for (const auto& w : j["images"]) {
      if (!w.is_string()) throw ParseError("endomorphism images must be strings");
      images.push_back(w.get<std::string>());
    }
    if (j.contains("rank")) {
      if (!j["rank"].is_number_unsigned()) throw ParseError("rank must be a positive integer");
      rank = j["rank"].get<unsigned>();
    }
  } else {
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) images.push_back(part);
  }
  if (images.empty()) throw ParseError("endomorphism has no images");
  const unsigned k = rank.value_or(static_cast<unsigned>(images.size()));
  if (k != images.size()) throw ParseError("rank differs from the number of images");
  std::vector<Word> words;
  for (const auto& s : images) words.push_back(word_parse(s, k));
  return FreeEndo(std::move(words));
}

int cmd_certify(const Options& o, const CLI::App& sub) {
  if (o.endo.empty()) throw ParseError("--endo is required");
  if (o.word.empty()) throw ParseError("--word is required");
  const FreeEndo phi = read_endo(o.endo);
  const Word w = word_parse(o.word, phi.rank());
  CertifyConfig cfg;
  cfg.seed = o.seed;
  if (sub.count("--smax")) cfg.s_max = o.smax;
  if (sub.count("--p")) cfg.prime_floor = o.p;
  if (o.budget) cfg.orbit_budget = o.budget;
  const SearchOutcome r = search_certificate(phi, w, cfg);
  if (!r.certificate) {
    if (o.format == "json") {
      std::cout << dump({{"found", false}, {"frontier", r.frontier}, {"orbits_tried", r.orbits_tried}});
    } else {
      std::cout << "not found after " << r.orbits_tried << " orbits; frontier " << r.frontier << "\n";
    }
    return kFailed;
  }
  emit(o, certificate_to_json(*r.certificate));
  const Verdict v = verify_certificate(*r.certificate);
  // The certificate owns stdout when no --out is given.
  std::ostream& report = o.out.empty() ? std::cerr : std::cout;
  report << (o.format == "json" ? v.to_json() : v.to_text());
  return v.passed() ? kOk : kFailed;
}

int cmd_verify(const Options& o) {
  if (o.certificate.empty()) throw ParseError("a certificate file is required");
  const Certificate cert = certificate_from_json(slurp(o.certificate));
  const Verdict v = verify_certificate(cert);
  emit(o, o.format == "json" ? v.to_json() : v.to_text());
  return v.passed() ? kOk : kFailed;
}

void apply_cap_env() {
  const char* cap = std::getenv("QUASIFIX_CAP");
  if (!cap || !*cap) return;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(cap, &end, 10);
  if (errno != 0 || *end != '\0' || v == 0 || cap[0] == '-') {
    throw ParseError(std::string("QUASIFIX_CAP must be a positive integer, got '") + cap + "'");
  }
  set_field_order_cap(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-fixed points, I_Q quotients and finite-quotient certificates for mapping tori"};
  app.require_subcommand(1);
  Options o;

  auto add_format = [&](CLI::App* s) {
    s->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "text"}));
    s->add_option("--out", o.out, "Write the result to this file instead of stdout");
  };
  auto add_map = [&](CLI::App* s) {
    s->add_option("--p", o.p, "Characteristic")->required();
    s->add_option("--n", o.n, "Number of variables (default: number of coordinates)");
    s->add_option("--map", o.map, "Coordinate polynomials in x1..xn; repeat or separate with ';'")->required();
  };

  auto* qf = app.add_subcommand("quasifixed", "List quasi-fixed points up to field degree s_max");
  add_map(qf);
  qf->add_option("--smax", o.smax, "Largest field degree")->check(CLI::PositiveNumber);
  add_format(qf);

  auto* dens = app.add_subcommand("density", "Find a quasi-fixed point on V outside W");
  add_map(dens);
  dens->add_option("--v", o.v, "Defining polynomials of V (default: all of A^n)");
  dens->add_option("--w", o.w, "Polynomial vanishing on W")->required();
  dens->add_option("--smax", o.smax, "Largest field degree")->check(CLI::PositiveNumber);
  add_format(dens);

  auto* iq = app.add_subcommand("iq", "Quotient dimension of I_Q and the iterate congruences");
  add_map(iq);
  iq->add_option("--q", o.q, "Q, a power of p exceeding every coordinate degree")->required();
  iq->add_option("--j", o.j, "Check congruences for j = 1..J")->check(CLI::PositiveNumber);
  iq->add_option("--budget", o.budget, "Symbolic term budget")->check(CLI::PositiveNumber);
  add_format(iq);

  auto* fold = app.add_subcommand("fold", "Stallings-fold a list of words");
  fold->add_option("--k,--n", o.k, "Rank of the free group")->required()->check(CLI::PositiveNumber);
  fold->add_option("words", o.words, "Words in a, b, ... (capitals are inverses)")->required();
  add_format(fold);

  auto* cert = app.add_subcommand("certify", "Search for a finite-quotient certificate separating w from 1");
  cert->add_option("--endo", o.endo, "Endomorphism: JSON file or inline images like ab,ba")->required();
  cert->add_option("--word", o.word, "The word w")->required();
  cert->add_option("--seed", o.seed, "Search seed");
  cert->add_option("--smax", o.smax, "Largest field degree tried per prime")->check(CLI::PositiveNumber);
  cert->add_option("--p", o.p, "Smallest prime considered");
  cert->add_option("--budget", o.budget, "Orbit step budget per seed")->check(CLI::PositiveNumber);
  add_format(cert);

  auto* ver = app.add_subcommand("verify", "Independently verify a certificate file");
  ver->add_option("certificate", o.certificate, "Certificate JSON file")->required();
  add_format(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    apply_cap_env();
    if (*qf) return cmd_quasifixed(o);
    if (*dens) return cmd_density(o);
    if (*iq) return cmd_iq(o);
    if (*fold) return cmd_fold(o);
    if (*cert) return cmd_certify(o, *cert);
    if (*ver) return cmd_verify(o);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return kFailed;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
