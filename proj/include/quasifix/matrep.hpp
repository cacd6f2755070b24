#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quasifix/freegroup.hpp"
#include "quasifix/gf.hpp"
#include "quasifix/poly.hpp"

namespace quasifix {

/// Thrown when a tuple that must live in GL_2^k has a singular component.
class SingularTuple : public DomainError {
 public:
  using DomainError::DomainError;
};

/// 2x2 matrix over F_{p^m}, row-major [[a, b], [c, d]].
class Mat2 {
 public:
  Mat2(FqElement a, FqElement b, FqElement c, FqElement d);

  static Mat2 identity(const FqField& field);
  static Mat2 scalar(const FqElement& x);

  const FqField& field() const { return e_[0].field(); }
  const FqElement& operator()(unsigned row, unsigned col) const { return e_[2 * row + col]; }
  const std::array<FqElement, 4>& entries() const { return e_; }

  FqElement det() const;
  /// Adjugate [[d, -b], [-c, a]].
  Mat2 adj() const;
  bool is_scalar() const;
  bool is_invertible() const { return !det().is_zero(); }
  Mat2 scaled(const FqElement& s) const;

  friend Mat2 operator*(const Mat2& x, const Mat2& y);
  friend bool operator==(const Mat2& x, const Mat2& y) = default;

  std::string to_string() const;

 private:
  std::array<FqElement, 4> e_;
};

inline Mat2 mat_mul(const Mat2& a, const Mat2& b) { return a * b; }
inline Mat2 mat_adj(const Mat2& a) { return a.adj(); }
inline FqElement mat_det(const Mat2& a) { return a.det(); }

/// k-tuple of 2x2 matrices over one field; a point of M_2^k = A^{4k}.
class MatTuple {
 public:
  explicit MatTuple(std::vector<Mat2> mats);

  std::size_t size() const { return mats_.size(); }
  const FqField& field() const { return mats_.front().field(); }
  const Mat2& operator[](std::size_t i) const { return mats_[i]; }
  const std::vector<Mat2>& mats() const { return mats_; }
  std::span<const Mat2> span() const { return mats_; }

  friend bool operator==(const MatTuple&, const MatTuple&) = default;

 private:
  std::vector<Mat2> mats_;
};

/// Coordinates (a11, a12, a21, a22) of each matrix in order.
std::vector<FqElement> flatten(const MatTuple& t);
MatTuple unflatten(std::span<const FqElement> coords);

/// Point of PGL_2^k: every component invertible and scaled so its first
/// nonzero entry in row-major order is 1.
class ProjPoint {
 public:
  /// Validates that t is already in canonical form.
  explicit ProjPoint(MatTuple t);

  const MatTuple& tuple() const { return t_; }
  std::size_t size() const { return t_.size(); }
  const Mat2& operator[](std::size_t i) const { return t_[i]; }

  friend bool operator==(const ProjPoint&, const ProjPoint&) = default;

 private:
  MatTuple t_;
};

/// Scalar-canonical representative of a single invertible matrix.
Mat2 normalize_matrix(const Mat2& m);

bool is_normalized(const Mat2& m);

/// Throws SingularTuple if any component is singular.
ProjPoint proj_normalize(const MatTuple& t);

/// The word w evaluated with adj(A_i) substituted for x_i^{-1}.
Mat2 pi_w(const Word& w, const MatTuple& t);

/// Phi(t)_i = pi_{w_i}(t) for the images w_i of phi.
MatTuple phi_lift(const FreeEndo& phi, const MatTuple& t);

/// Phi as a polynomial self-map of A^{4k} over F_p.  Variable 4i + 2r + c
/// (0-based) is entry (r, c) of matrix i.
PolyMap phi_lift_polynomials(const FreeEndo& phi, std::uint32_t p);

MatTuple frobenius_tuple(const MatTuple& t, std::uint64_t e);

/// h -> proj_normalize(phi_lift(h)).
ProjPoint pgl_dynamics_step(const FreeEndo& phi, const ProjPoint& h);

inline constexpr std::uint64_t kDefaultOrbitBudget = 10'000'000;

struct PeriodicOrbit {
  ProjPoint point;  // lies on the cycle
  std::uint64_t period;  // minimal
};

struct OrbitSearch {
  std::optional<PeriodicOrbit> orbit;
  std::uint64_t steps = 0;
  std::string reason;  // set when orbit is empty
};

/// Brent cycle detection on the step map starting from h0.
OrbitSearch find_periodic_orbit(const FreeEndo& phi, const ProjPoint& h0,
                                std::uint64_t budget = kDefaultOrbitBudget);

/// Group operations on PGL_2(F_q) with normalized matrices as elements.
struct Pgl2Ops {
  FqField field;

  Mat2 identity() const { return Mat2::identity(field); }
  Mat2 multiply(const Mat2& a, const Mat2& b) const { return normalize_matrix(a * b); }
  Mat2 invert(const Mat2& a) const { return normalize_matrix(a.adj()); }
};

/// Group operations on SL_2 / GL_2 with true inverses.
struct Gl2Ops {
  FqField field;

  Mat2 identity() const { return Mat2::identity(field); }
  Mat2 multiply(const Mat2& a, const Mat2& b) const { return a * b; }
  Mat2 invert(const Mat2& a) const { return a.adj().scaled(a.det().inv()); }
};

}  // namespace quasifix
