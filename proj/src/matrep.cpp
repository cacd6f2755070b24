#include "quasifix/matrep.hpp"

#include <sstream>

namespace quasifix {

Mat2::Mat2(FqElement a, FqElement b, FqElement c, FqElement d)
    : e_{std::move(a), std::move(b), std::move(c), std::move(d)} {
  for (int i = 1; i < 4; ++i) {
    if (!(e_[i].field() == e_[0].field())) throw DomainError("matrix entries from different fields");
  }
}

Mat2 Mat2::identity(const FqField& field) { return Mat2(field.one(), field.zero(), field.zero(), field.one()); }

Mat2 Mat2::scalar(const FqElement& x) {
  const FqElement z = x.field().zero();
  return Mat2(x, z, z, x);
}

FqElement Mat2::det() const { return e_[0] * e_[3] - e_[1] * e_[2]; }

Mat2 Mat2::adj() const { return Mat2(e_[3], -e_[1], -e_[2], e_[0]); }

bool Mat2::is_scalar() const { return e_[1].is_zero() && e_[2].is_zero() && e_[0] == e_[3]; }

Mat2 Mat2::scaled(const FqElement& s) const { return Mat2(e_[0] * s, e_[1] * s, e_[2] * s, e_[3] * s); }

Mat2 operator*(const Mat2& x, const Mat2& y) {
  const auto& a = x.e_;
  const auto& b = y.e_;
  return Mat2(a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
              a[2] * b[1] + a[3] * b[3]);
}

std::string Mat2::to_string() const {
  std::ostringstream os;
  os << "[[" << e_[0].to_string() << "," << e_[1].to_string() << "],[" << e_[2].to_string() << ","
     << e_[3].to_string() << "]]";
  return os.str();
}

MatTuple::MatTuple(std::vector<Mat2> mats) : mats_(std::move(mats)) {
  if (mats_.empty()) throw DomainError("empty matrix tuple");
  for (const auto& m : mats_) {
    if (!(m.field() == mats_[0].field())) throw DomainError("matrix tuple mixes fields");
  }
}

std::vector<FqElement> flatten(const MatTuple& t) {
  std::vector<FqElement> out;
  out.reserve(4 * t.size());
  for (const auto& m : t.mats()) out.insert(out.end(), m.entries().begin(), m.entries().end());
  return out;
}

MatTuple unflatten(std::span<const FqElement> coords) {
  if (coords.empty() || coords.size() % 4 != 0) throw DomainError("coordinate count is not a multiple of 4");
  std::vector<Mat2> mats;
  for (std::size_t i = 0; i < coords.size(); i += 4) {
    mats.emplace_back(coords[i], coords[i + 1], coords[i + 2], coords[i + 3]);
  }
  return MatTuple(std::move(mats));
}

bool is_normalized(const Mat2& m) {
  for (const auto& x : m.entries()) {
    if (!x.is_zero()) return x.is_one();
  }
  return false;
}

Mat2 normalize_matrix(const Mat2& m) {
  if (!m.is_invertible()) throw SingularTuple("singular matrix " + m.to_string() + " has no class in PGL_2");
  for (const auto& x : m.entries()) {
    if (!x.is_zero()) return x.is_one() ? m : m.scaled(x.inv());
  }
  return m;  // unreachable: invertible matrices are nonzero
}

ProjPoint::ProjPoint(MatTuple t) : t_(std::move(t)) {
  for (const auto& m : t_.mats()) {
    if (!m.is_invertible()) throw SingularTuple("projective point has a singular component");
    if (!is_normalized(m)) throw DomainError("projective point component is not in canonical form");
  }
}

ProjPoint proj_normalize(const MatTuple& t) {
  std::vector<Mat2> mats;
  mats.reserve(t.size());
  for (const auto& m : t.mats()) mats.push_back(normalize_matrix(m));
  return ProjPoint(MatTuple(std::move(mats)));
}

Mat2 pi_w(const Word& w, const MatTuple& t) {
  if (w.rank() != t.size()) {
    throw DomainError("word of rank " + std::to_string(w.rank()) + " applied to a " + std::to_string(t.size()) +
                      "-tuple");
  }
  Mat2 acc = Mat2::identity(t.field());
  for (int x : w.letters()) {
    const Mat2& m = t[static_cast<std::size_t>(x > 0 ? x : -x) - 1];
    acc = acc * (x > 0 ? m : m.adj());
  }
  return acc;
}

MatTuple phi_lift(const FreeEndo& phi, const MatTuple& t) {
  if (phi.rank() != t.size()) throw DomainError("endomorphism rank does not match tuple size");
  std::vector<Mat2> out;
  out.reserve(t.size());
  for (const auto& w : phi.images()) out.push_back(pi_w(w, t));
  return MatTuple(std::move(out));
}

namespace {

struct SymMat {
  std::array<MPoly, 4> e;

  SymMat operator*(const SymMat& y) const {
    return {{e[0] * y.e[0] + e[1] * y.e[2], e[0] * y.e[1] + e[1] * y.e[3], e[2] * y.e[0] + e[3] * y.e[2],
             e[2] * y.e[1] + e[3] * y.e[3]}};
  }
  SymMat adj() const { return {{e[3], -e[1], -e[2], e[0]}}; }
};

}  // namespace

PolyMap phi_lift_polynomials(const FreeEndo& phi, std::uint32_t p) {
  const unsigned k = phi.rank();
  const unsigned n = 4 * k;
  std::vector<SymMat> vars;
  for (unsigned i = 0; i < k; ++i) {
    vars.push_back({{MPoly::variable(n, p, 4 * i), MPoly::variable(n, p, 4 * i + 1),
                     MPoly::variable(n, p, 4 * i + 2), MPoly::variable(n, p, 4 * i + 3)}});
  }
  const SymMat id{{MPoly::constant(n, p, 1), MPoly(n, p), MPoly(n, p), MPoly::constant(n, p, 1)}};
  std::vector<MPoly> coords;
  for (const auto& w : phi.images()) {
    SymMat acc = id;
    for (int x : w.letters()) {
      const SymMat& m = vars[static_cast<std::size_t>(x > 0 ? x : -x) - 1];
      acc = acc * (x > 0 ? m : m.adj());
    }
    coords.insert(coords.end(), acc.e.begin(), acc.e.end());
  }
  return PolyMap(std::move(coords));
}

MatTuple frobenius_tuple(const MatTuple& t, std::uint64_t e) {
  std::vector<Mat2> out;
  out.reserve(t.size());
  for (const auto& m : t.mats()) {
    const auto& x = m.entries();
    out.emplace_back(frobenius(x[0], e), frobenius(x[1], e), frobenius(x[2], e), frobenius(x[3], e));
  }
  return MatTuple(std::move(out));
}

ProjPoint pgl_dynamics_step(const FreeEndo& phi, const ProjPoint& h) {
  return proj_normalize(phi_lift(phi, h.tuple()));
}

OrbitSearch find_periodic_orbit(const FreeEndo& phi, const ProjPoint& h0, std::uint64_t budget) {
  OrbitSearch result;
  try {
    std::uint64_t power = 1;
    std::uint64_t lambda = 1;
    ProjPoint tortoise = h0;
    ProjPoint hare = pgl_dynamics_step(phi, h0);
    result.steps = 1;
    while (!(tortoise == hare)) {
      if (power == lambda) {
        tortoise = hare;
        power *= 2;
        lambda = 0;
      }
      if (result.steps >= budget) {
        result.reason = "orbit budget of " + std::to_string(budget) + " steps exhausted";
        return result;
      }
      hare = pgl_dynamics_step(phi, hare);
      ++lambda;
      ++result.steps;
    }
    // tortoise == step^lambda(tortoise), so tortoise already lies on the cycle.
    result.orbit = PeriodicOrbit{std::move(tortoise), lambda};
  } catch (const SingularTuple& e) {
    result.reason = std::string("orbit left PGL_2: ") + e.what();
  }
  return result;
}

}  // namespace quasifix
