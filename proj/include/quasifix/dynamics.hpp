#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quasifix/gf.hpp"
#include "quasifix/poly.hpp"

namespace quasifix {

/// A point a over F_{p^s} with f_i(a) = a_i^(p^m) for every i.
struct QuasiFixedWitness {
  std::vector<FqElement> point;
  unsigned m;  // Frobenius power, Q = p^m, 1 <= m <= field_degree
  unsigned field_degree;  // s, minimal field of definition of the point

  std::uint32_t characteristic() const { return point.front().field().characteristic(); }
  friend bool operator==(const QuasiFixedWitness&, const QuasiFixedWitness&) = default;
};

/// Re-checks the defining identity of a witness.
bool is_quasi_fixed(const PolyMap& map, std::span<const FqElement> point, unsigned m);

/// Smallest d such that every coordinate lies in F_{p^d}.
unsigned point_degree(std::span<const FqElement> point);

/// Visits every witness with field_degree <= s_max in (s, m, point) order;
/// stops early when visit returns false.  Throws CapExceeded when
/// p^(s_max n) exceeds the field order cap.
void for_each_quasi_fixed(const PolyMap& map, unsigned s_max,
                          const std::function<bool(const QuasiFixedWitness&)>& visit);

std::vector<QuasiFixedWitness> enumerate_quasi_fixed(const PolyMap& map, unsigned s_max);

/// Affine variety given by defining polynomials; empty means all of A^n.
struct VarietySpec {
  std::vector<MPoly> equations;
};

bool variety_membership(const VarietySpec& v, std::span<const FqElement> point);

struct ContainmentReport {
  std::size_t witnesses_checked = 0;
  std::vector<QuasiFixedWitness> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks that every quasi-fixed point up to s_max lies on v.
ContainmentReport containment_check(const PolyMap& map, const VarietySpec& v, unsigned s_max);

/// First witness (enumeration order) on v where avoid does not vanish.
std::optional<QuasiFixedWitness> find_quasi_fixed_avoiding(const PolyMap& map, const VarietySpec& v,
                                                           const MPoly& avoid, unsigned s_max);

/// Phi^iterations(A^n(field)) as a sorted, duplicate-free point list.
std::vector<std::vector<FqElement>> image_point_sample(const PolyMap& map, unsigned iterations,
                                                       const FqField& field);

}  // namespace quasifix
