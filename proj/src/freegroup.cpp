#include "quasifix/freegroup.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>

namespace quasifix {

std::vector<int> free_reduce(std::span<const int> letters) {
  std::vector<int> out;
  out.reserve(letters.size());
  for (int x : letters) {
    if (!out.empty() && out.back() == -x) {
      out.pop_back();
    } else {
      out.push_back(x);
    }
  }
  return out;
}

Word::Word(std::vector<int> letters, unsigned rank) : rank_(rank) {
  for (int x : letters) {
    if (x == 0 || static_cast<unsigned>(x > 0 ? x : -x) > rank) {
      throw DomainError("generator index " + std::to_string(x) + " outside rank " + std::to_string(rank));
    }
  }
  letters_ = free_reduce(letters);
}

Word Word::generator(unsigned rank, unsigned index) {
  return Word({static_cast<int>(index)}, rank);
}

Word Word::inverse() const {
  Word r(rank_);
  r.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) r.letters_.push_back(-*it);
  return r;
}

Word operator*(const Word& a, const Word& b) {
  if (a.rank_ != b.rank_) throw DomainError("rank mismatch in word product");
  std::vector<int> joined = a.letters_;
  joined.insert(joined.end(), b.letters_.begin(), b.letters_.end());
  Word r(a.rank_);
  r.letters_ = free_reduce(joined);
  return r;
}

std::string Word::to_string() const {
  if (letters_.empty()) return "";
  std::string s;
  for (int x : letters_) {
    const unsigned i = static_cast<unsigned>(x > 0 ? x : -x);
    if (rank_ <= 26) {
      s.push_back(static_cast<char>((x > 0 ? 'a' : 'A') + static_cast<char>(i - 1)));
    } else {
      s += (x > 0 ? "x" : "X") + std::to_string(i);
    }
  }
  return s;
}

Word word_parse(std::string_view text, unsigned rank) {
  std::vector<int> letters;
  if (text == "1") return Word(rank);
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    if ((ch == 'x' || ch == 'X') && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
      std::size_t j = i + 1;
      unsigned idx = 0;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
        idx = idx * 10 + static_cast<unsigned>(text[j] - '0');
        if (idx > 1'000'000) throw ParseError("generator index too large in \"" + std::string(text) + "\"");
        ++j;
      }
      if (idx < 1 || idx > rank) {
        throw ParseError("generator x" + std::to_string(idx) + " exceeds rank " + std::to_string(rank));
      }
      letters.push_back(ch == 'x' ? static_cast<int>(idx) : -static_cast<int>(idx));
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      const bool lower = std::islower(static_cast<unsigned char>(ch)) != 0;
      const unsigned idx = static_cast<unsigned>(std::tolower(static_cast<unsigned char>(ch)) - 'a') + 1;
      if (idx > rank) {
        throw ParseError(std::string("generator '") + ch + "' exceeds rank " + std::to_string(rank));
      }
      letters.push_back(lower ? static_cast<int>(idx) : -static_cast<int>(idx));
      ++i;
      continue;
    }
    throw ParseError(std::string("unknown generator '") + ch + "' in \"" + std::string(text) + "\"");
  }
  return Word(std::move(letters), rank);
}

// ---------------------------------------------------------------- FreeEndo

FreeEndo::FreeEndo(std::vector<Word> images) : images_(std::move(images)) {
  if (images_.empty()) throw DomainError("endomorphism of the trivial group");
  for (const auto& w : images_) {
    if (w.rank() != images_.size()) throw DomainError("image word rank differs from endomorphism rank");
  }
}

FreeEndo FreeEndo::identity(unsigned rank) {
  std::vector<Word> images;
  for (unsigned i = 1; i <= rank; ++i) images.push_back(Word::generator(rank, i));
  return FreeEndo(std::move(images));
}

Word FreeEndo::apply(const Word& w, std::size_t max_letters) const {
  if (w.rank() != rank()) throw DomainError("rank mismatch applying endomorphism");
  std::vector<int> out;
  for (int x : w.letters()) {
    const Word& img = images_[static_cast<std::size_t>(x > 0 ? x : -x) - 1];
    if (x > 0) {
      for (int y : img.letters()) {
        if (!out.empty() && out.back() == -y) out.pop_back(); else out.push_back(y);
      }
    } else {
      for (auto it = img.letters().rbegin(); it != img.letters().rend(); ++it) {
        const int y = -*it;
        if (!out.empty() && out.back() == -y) out.pop_back(); else out.push_back(y);
      }
    }
    if (out.size() > max_letters) {
      throw BudgetExceeded("word image longer than " + std::to_string(max_letters) + " letters");
    }
  }
  return Word(std::move(out), rank());
}

FreeEndo endo_compose(const FreeEndo& phi, const FreeEndo& psi) {
  if (phi.rank() != psi.rank()) throw DomainError("rank mismatch composing endomorphisms");
  std::vector<Word> images;
  for (const auto& w : psi.images()) images.push_back(phi.apply(w));
  return FreeEndo(std::move(images));
}

FreeEndo endo_power(const FreeEndo& phi, unsigned n) {
  FreeEndo result = FreeEndo::identity(phi.rank());
  for (unsigned i = 0; i < n; ++i) result = endo_compose(phi, result);
  return result;
}

// ---------------------------------------------------------------- folding

StallingsGraph bouquet(std::span<const Word> words) {
  StallingsGraph g;
  for (const auto& w : words) {
    if (w.is_identity()) continue;
    std::size_t current = 0;
    for (std::size_t i = 0; i < w.length(); ++i) {
      const std::size_t next = i + 1 == w.length() ? 0 : g.vertex_count++;
      const int x = w.letters()[i];
      if (x > 0) {
        g.edges.push_back({current, next, static_cast<unsigned>(x)});
      } else {
        g.edges.push_back({next, current, static_cast<unsigned>(-x)});
      }
      current = next;
    }
  }
  return g;
}

namespace {

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    // Keep the smaller representative so the basepoint stays vertex 0.
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
  std::vector<std::size_t> parent;
};

}  // namespace

StallingsGraph fold(StallingsGraph graph) {
  UnionFind uf(graph.vertex_count);
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::pair<std::size_t, unsigned>, std::size_t> out, in;
    for (const auto& e : graph.edges) {
      const std::size_t s = uf.find(e.from), t = uf.find(e.to);
      auto [oit, onew] = out.try_emplace({s, e.label}, t);
      if (!onew && uf.unite(oit->second, t)) {
        changed = true;
        break;
      }
      auto [iit, inew] = in.try_emplace({t, e.label}, s);
      if (!inew && uf.unite(iit->second, s)) {
        changed = true;
        break;
      }
    }
  }

  std::set<LabeledEdge> edges;
  for (const auto& e : graph.edges) edges.insert({uf.find(e.from), uf.find(e.to), e.label});

  // Prune hanging trees: repeatedly drop non-basepoint vertices of degree 1.
  std::set<std::size_t> alive;
  for (std::size_t v = 0; v < graph.vertex_count; ++v) alive.insert(uf.find(v));
  for (bool pruned = true; pruned;) {
    pruned = false;
    std::map<std::size_t, std::size_t> degree;
    for (const auto& e : edges) {
      ++degree[e.from];
      ++degree[e.to];
    }
    for (auto it = edges.begin(); it != edges.end();) {
      const bool leaf_from = it->from != 0 && degree[it->from] == 1;
      const bool leaf_to = it->to != 0 && degree[it->to] == 1;
      if (leaf_from || leaf_to) {
        alive.erase(leaf_from ? it->from : it->to);
        it = edges.erase(it);
        pruned = true;
      } else {
        ++it;
      }
    }
    for (auto it = alive.begin(); it != alive.end();) {
      if (*it != 0 && degree[*it] == 0) {
        it = alive.erase(it);
      } else {
        ++it;
      }
    }
  }

  std::map<std::size_t, std::size_t> renumber;
  for (std::size_t v : alive) renumber.emplace(v, renumber.size());
  StallingsGraph result;
  result.vertex_count = renumber.size();
  for (const auto& e : edges) result.edges.push_back({renumber.at(e.from), renumber.at(e.to), e.label});
  std::sort(result.edges.begin(), result.edges.end());
  result.folded = true;
  return result;
}

std::size_t subgroup_rank(const StallingsGraph& graph) {
  return graph.edges.size() + 1 - graph.vertex_count;
}

bool endo_is_injective(const FreeEndo& phi) {
  return subgroup_rank(stallings_fold(phi.images())) == phi.rank();
}

// ------------------------------------------------------------------ Sanov

std::string IntMatrix2::to_string() const {
  return "[[" + a.str() + "," + b.str() + "],[" + c.str() + "," + d.str() + "]]";
}

IntMatrix2 sanov_generator(unsigned rank, unsigned index) {
  if (index < 1 || index > rank) throw DomainError("Sanov generator index out of range");
  const IntMatrix2 s1{1, 2, 0, 1};
  const IntMatrix2 s2{1, 0, 2, 1};
  if (rank <= 2) return index == 1 ? s1 : s2;
  IntMatrix2 conj = IntMatrix2::identity();
  for (unsigned i = 0; i < index; ++i) conj = conj * s1;
  return conj * s2 * conj.sl2_inverse();
}

IntMatrix2 sanov_embed(const Word& w) {
  std::vector<IntMatrix2> gens, invs;
  for (unsigned i = 1; i <= w.rank(); ++i) {
    gens.push_back(sanov_generator(w.rank(), i));
    invs.push_back(gens.back().sl2_inverse());
  }
  IntMatrix2 acc = IntMatrix2::identity();
  for (int x : w.letters()) {
    acc = acc * (x > 0 ? gens[static_cast<std::size_t>(x) - 1] : invs[static_cast<std::size_t>(-x) - 1]);
  }
  return acc;
}

NonscalarCheck nonscalar_sanity_check(const FreeEndo& phi, const Word& w, unsigned n, std::size_t max_letters) {
  Word image = w;
  for (unsigned i = 0; i < n; ++i) image = phi.apply(image, max_letters);
  IntMatrix2 m = sanov_embed(image);
  const bool nonscalar = !m.is_scalar();
  return {nonscalar, std::move(image), std::move(m)};
}

}  // namespace quasifix
