#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quasifix/freegroup.hpp"
#include "quasifix/matrep.hpp"

/**
 * Finite-quotient certificates for mapping tori of free-group endomorphisms.
 *
 * A certificate for (phi, w) is a prime power p^s, a tuple h in PGL_2(F_{p^s})^k
 * lying on a cycle of the map h -> (pi_{w_1}(h), ..., pi_{w_k}(h)), the whole
 * cycle, and the promise that w(h) is not the identity of PGL_2.  From that
 * data the wreath product PGL_2(F_{p^s}) wr C_n receives a homomorphism from
 * <x_1..x_k, t | t x_j t^-1 = w_j> that does not kill w.
 */
namespace quasifix {

inline constexpr int kCertificateFormatVersion = 1;
inline constexpr const char* kLibraryVersion = "quasifix 1.0.0";

/// Matrix entries as coefficient vectors, exactly as stored on disk.  Kept
/// unvalidated so the verifier can report on tampered data.
using RawMatrix = std::array<std::vector<std::uint64_t>, 4>;
using RawTuple = std::vector<RawMatrix>;

struct Certificate {
  unsigned rank = 0;
  std::vector<std::string> images;
  std::string word;
  std::uint64_t p = 0;
  unsigned s = 0;
  std::vector<std::uint64_t> modulus;
  RawTuple h;
  std::uint64_t period = 0;
  std::vector<RawTuple> trace;
  std::uint64_t seed = 0;
  std::uint64_t seed_index = 0;
  std::string version = kLibraryVersion;

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

/// Canonical JSON: sorted keys, two-space indent, trailing newline.
std::string certificate_to_json(const Certificate& cert);

/// Throws ParseError on malformed JSON or missing/ill-typed fields.
Certificate certificate_from_json(std::string_view text);

RawTuple to_raw(const MatTuple& t);

struct CertifyConfig {
  std::uint64_t prime_floor = 2;
  unsigned s_max = 6;
  unsigned seeds_per_field = 64;
  unsigned max_primes = 8;
  std::uint64_t orbit_budget = kDefaultOrbitBudget;
  std::uint64_t seed = 0;
  bool allow_non_injective = false;
};

/// Least prime p >= floor for which gamma(phi^{4k}(w)) is not scalar mod p,
/// gamma being the Sanov representation.  The matrix is reduced mod each
/// candidate prime by running the tuple dynamics over F_p, which equals the
/// reduction of the integer matrix.
std::uint64_t pick_prime(const FreeEndo& phi, const Word& w, std::uint64_t floor = 2,
                         std::uint64_t prime_limit = 1'000'000);

/// Sanov generators reduced mod p, as a projective point over field.
ProjPoint sanov_seed(unsigned rank, const FqField& field);

struct SearchOutcome {
  std::optional<Certificate> certificate;
  /// Last (p, s, seeds) tried, for not-found reports.
  std::string frontier;
  std::uint64_t orbits_tried = 0;
};

/// Searches PGL_2(F_{p^s})^k for a periodic tuple separating w from 1.
/// Seeds are tried in order (p, s, seed index); seed index 0 is the Sanov
/// tuple, the rest are pseudo-random tuples derived from config.seed.
SearchOutcome search_certificate(const FreeEndo& phi, const Word& w, const CertifyConfig& config = {});

/// H^n wr C_n element f c^shift with f in PGL_2^n.
struct WreathElement {
  std::vector<Mat2> base;
  std::uint64_t shift;

  friend bool operator==(const WreathElement&, const WreathElement&) = default;
};

/// c^a g c^-a acts on H^n by (c^a g c^-a)_i = g_{(i + a) mod n}.
struct WreathOps {
  FqField field;
  std::uint64_t n;

  WreathElement identity() const;
  WreathElement multiply(const WreathElement& x, const WreathElement& y) const;
  WreathElement invert(const WreathElement& x) const;
  WreathElement cycle_generator() const;
};

struct WreathData {
  std::uint64_t period = 0;
  /// y[j][i] = h_j^{(i)}.
  std::vector<std::vector<Mat2>> y;
  /// c y_j c^-1 == w_j(y_1, ..., y_k) in H wr C_n, per j.
  std::vector<bool> relation_holds;
  /// Image of w; lies in H^n (shift 0).
  std::optional<WreathElement> word_image;
  bool word_image_nontrivial = false;

  bool relations_ok() const;
};

/// Throws DomainError when the certificate cannot be interpreted at all.
WreathData build_wreath(const Certificate& cert);

struct VerdictCheck {
  std::string condition;  // "field", "membership", "i", "ii", "iii", "wreath", "injective"
  std::string description;
  bool passed;
  bool required;
  std::string detail;
};

struct Verdict {
  std::vector<VerdictCheck> checks;

  bool passed() const;
  /// Required checks that failed, by condition label.
  std::vector<std::string> failed_conditions() const;
  std::string to_json() const;
  std::string to_text() const;
};

/// Re-derives every claim of the certificate from the stored data alone.
Verdict verify_certificate(const Certificate& cert);

}  // namespace quasifix
