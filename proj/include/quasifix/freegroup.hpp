#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "quasifix/errors.hpp"

namespace quasifix {

/// Longest word any substitution may produce before BudgetExceeded.
inline constexpr std::size_t kDefaultWordBudget = std::size_t{1} << 22;

/// Freely reduced word in x_1^{+-1}, ..., x_k^{+-1}.  Letter +i is x_i and
/// -i is its inverse; the empty word is the identity.
class Word {
 public:
  explicit Word(unsigned rank) : rank_(rank) {}
  /// Reduces the letters; throws DomainError on indices outside [1, rank].
  Word(std::vector<int> letters, unsigned rank);

  static Word generator(unsigned rank, unsigned index);

  unsigned rank() const { return rank_; }
  const std::vector<int>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool is_identity() const { return letters_.empty(); }

  Word inverse() const;
  friend Word operator*(const Word& a, const Word& b);

  friend bool operator==(const Word& a, const Word& b) = default;
  friend auto operator<=>(const Word& a, const Word& b) = default;

  std::string to_string() const;

 private:
  unsigned rank_;
  std::vector<int> letters_;
};

/// Cancels adjacent inverse pairs (stack-based, single pass).
std::vector<int> free_reduce(std::span<const int> letters);

/// Parses `abA`-style words (a..z generators, A..Z inverses) or indexed
/// `x1X2` form; the empty string and "1" give the identity.
Word word_parse(std::string_view text, unsigned rank);

inline Word word_multiply(const Word& a, const Word& b) { return a * b; }
inline Word word_invert(const Word& w) { return w.inverse(); }

/// Endomorphism x_i -> images[i-1] of F_k.
class FreeEndo {
 public:
  explicit FreeEndo(std::vector<Word> images);

  static FreeEndo identity(unsigned rank);

  unsigned rank() const { return static_cast<unsigned>(images_.size()); }
  const std::vector<Word>& images() const { return images_; }

  Word apply(const Word& w, std::size_t max_letters = kDefaultWordBudget) const;

  friend bool operator==(const FreeEndo& a, const FreeEndo& b) = default;

 private:
  std::vector<Word> images_;
};

inline Word endo_apply(const FreeEndo& phi, const Word& w) { return phi.apply(w); }

/// phi o psi, i.e. x -> phi(psi(x)).
FreeEndo endo_compose(const FreeEndo& phi, const FreeEndo& psi);

/// phi^n; endo_power(phi, 0) is the identity endomorphism.
FreeEndo endo_power(const FreeEndo& phi, unsigned n);

/// Evaluates w with elements[i] substituted for x_{i+1}.  Ops must provide
/// identity(), multiply(a, b) and invert(a).
template <class T, class Ops>
T word_evaluate(const Word& w, std::span<const T> elements, const Ops& ops) {
  if (elements.size() != w.rank()) {
    throw DomainError("word of rank " + std::to_string(w.rank()) + " evaluated on " +
                      std::to_string(elements.size()) + " elements");
  }
  T acc = ops.identity();
  for (int letter : w.letters()) {
    const T& g = elements[static_cast<std::size_t>(letter > 0 ? letter : -letter) - 1];
    acc = letter > 0 ? ops.multiply(acc, g) : ops.multiply(acc, ops.invert(g));
  }
  return acc;
}

// --------------------------------------------------------- Stallings graphs

struct LabeledEdge {
  std::size_t from;
  std::size_t to;
  unsigned label;

  friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
  friend auto operator<=>(const LabeledEdge&, const LabeledEdge&) = default;
};

/// Basepointed labeled graph; after folding it is a deterministic automaton
/// in both directions.  The basepoint is always vertex 0.
struct StallingsGraph {
  std::size_t vertex_count = 1;
  std::vector<LabeledEdge> edges;
  bool folded = false;

  friend bool operator==(const StallingsGraph&, const StallingsGraph&) = default;
};

/// Wedge of loops spelling the given words (not folded).
StallingsGraph bouquet(std::span<const Word> words);

/// Folds, then prunes hanging trees away from the basepoint.
StallingsGraph fold(StallingsGraph graph);

inline StallingsGraph stallings_fold(std::span<const Word> words) { return fold(bouquet(words)); }

/// E - V + 1 of a connected graph.
std::size_t subgroup_rank(const StallingsGraph& graph);

/// True iff the images freely generate a subgroup of rank k.
bool endo_is_injective(const FreeEndo& phi);

// --------------------------------------------------------- Sanov matrices

using BigInt = boost::multiprecision::cpp_int;

struct IntMatrix2 {
  BigInt a, b, c, d;  // [[a, b], [c, d]]

  static IntMatrix2 identity() { return {1, 0, 0, 1}; }

  BigInt det() const { return a * d - b * c; }
  bool is_scalar() const { return b == 0 && c == 0 && a == d; }
  /// Inverse of a determinant-one matrix.
  IntMatrix2 sl2_inverse() const { return {d, -b, -c, a}; }

  friend IntMatrix2 operator*(const IntMatrix2& x, const IntMatrix2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend bool operator==(const IntMatrix2&, const IntMatrix2&) = default;

  std::string to_string() const;
};

/// Image of x_i under the faithful representation F_k -> SL_2(Z):
/// x_1 -> [[1,2],[0,1]], x_2 -> [[1,0],[2,1]] for k <= 2, and
/// x_i -> s1^i s2 s1^{-i} for k > 2.
IntMatrix2 sanov_generator(unsigned rank, unsigned index);

IntMatrix2 sanov_embed(const Word& w);

struct NonscalarCheck {
  bool nonscalar;
  Word image;  // phi^n(w)
  IntMatrix2 matrix;  // sanov_embed(image)
};

/// Computes gamma(phi^n(w)) over Z; throws BudgetExceeded if phi^n(w) is
/// longer than max_letters.
NonscalarCheck nonscalar_sanity_check(const FreeEndo& phi, const Word& w, unsigned n,
                                      std::size_t max_letters = kDefaultWordBudget);

}  // namespace quasifix
