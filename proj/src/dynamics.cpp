#include "quasifix/dynamics.hpp"

#include <map>
#include <numeric>

namespace quasifix {

namespace {

std::uint64_t checked_point_count(std::uint64_t q, unsigned n) {
  std::uint64_t total = 1;
  for (unsigned i = 0; i < n; ++i) {
    if (total > field_order_cap() / q) {
      throw CapExceeded("enumeration of " + std::to_string(q) + "^" + std::to_string(n) +
                        " points exceeds cap " + std::to_string(field_order_cap()));
    }
    total *= q;
  }
  return total;
}

// Calls visit(point) for every point of field^n in lexicographic order
// (first coordinate most significant).
template <class Visit>
void for_each_point(const std::vector<FqElement>& elements, unsigned n, Visit&& visit) {
  std::vector<std::size_t> idx(n, 0);
  std::vector<FqElement> point(n, elements[0]);
  for (;;) {
    for (unsigned i = 0; i < n; ++i) point[i] = elements[idx[i]];
    if (!visit(point, idx)) return;
    unsigned i = n;
    for (;;) {
      if (i == 0) return;
      --i;
      if (++idx[i] < elements.size()) break;
      idx[i] = 0;
    }
  }
}

}  // namespace

bool is_quasi_fixed(const PolyMap& map, std::span<const FqElement> point, unsigned m) {
  for (unsigned i = 0; i < map.nvars(); ++i) {
    if (!(poly_eval(map[i], point) == frobenius(point[i], m))) return false;
  }
  return true;
}

unsigned point_degree(std::span<const FqElement> point) {
  unsigned d = 1;
  for (const auto& x : point) d = std::lcm(d, element_degree(x));
  return d;
}

void for_each_quasi_fixed(const PolyMap& map, unsigned s_max,
                          const std::function<bool(const QuasiFixedWitness&)>& visit) {
  const unsigned n = map.nvars();
  const std::uint32_t p = map.characteristic();
  std::uint64_t ps = 1;
  for (unsigned s = 0; s < s_max; ++s) {
    if (ps > field_order_cap() / p) throw CapExceeded("p^s_max exceeds the field order cap");
    ps *= p;
  }
  checked_point_count(ps, n);

  for (unsigned s = 1; s <= s_max; ++s) {
    const FqField field = FqField::create(p, s);
    const std::vector<FqElement> elements = enumerate_elements(field);
    std::vector<unsigned> degree(elements.size());
    // frob[m][j] = index of elements[j]^(p^m), m = 1..s
    std::vector<std::vector<std::uint64_t>> frob(s + 1, std::vector<std::uint64_t>(elements.size()));
    for (std::size_t j = 0; j < elements.size(); ++j) {
      FqElement x = elements[j];
      degree[j] = 0;
      for (unsigned m = 1; m <= s; ++m) {
        x = x.pow(p);
        frob[m][j] = x.index();
        if (degree[j] == 0 && x == elements[j]) degree[j] = m;
      }
    }

    std::vector<std::vector<QuasiFixedWitness>> by_m(s + 1);
    for_each_point(elements, n, [&](const std::vector<FqElement>& point, const std::vector<std::size_t>& idx) {
      unsigned d = 1;
      for (auto j : idx) d = std::lcm(d, degree[j]);
      if (d != s) return true;
      std::vector<std::uint64_t> image(n);
      for (unsigned i = 0; i < n; ++i) image[i] = poly_eval(map[i], point).index();
      for (unsigned m = 1; m <= s; ++m) {
        bool ok = true;
        for (unsigned i = 0; i < n && ok; ++i) ok = image[i] == frob[m][idx[i]];
        if (ok) by_m[m].push_back({point, m, s});
      }
      return true;
    });
    for (unsigned m = 1; m <= s; ++m) {
      for (const auto& w : by_m[m]) {
        if (!visit(w)) return;
      }
    }
  }
}

std::vector<QuasiFixedWitness> enumerate_quasi_fixed(const PolyMap& map, unsigned s_max) {
  std::vector<QuasiFixedWitness> out;
  for_each_quasi_fixed(map, s_max, [&](const QuasiFixedWitness& w) {
    out.push_back(w);
    return true;
  });
  return out;
}

bool variety_membership(const VarietySpec& v, std::span<const FqElement> point) {
  for (const auto& f : v.equations) {
    if (!poly_eval(f, point).is_zero()) return false;
  }
  return true;
}

ContainmentReport containment_check(const PolyMap& map, const VarietySpec& v, unsigned s_max) {
  for (const auto& f : v.equations) {
    if (f.nvars() != map.nvars() || f.characteristic() != map.characteristic()) {
      throw DomainError("variety equations do not match the map's ambient space");
    }
  }
  ContainmentReport report;
  for_each_quasi_fixed(map, s_max, [&](const QuasiFixedWitness& w) {
    ++report.witnesses_checked;
    if (!variety_membership(v, w.point)) report.violations.push_back(w);
    return true;
  });
  return report;
}

std::optional<QuasiFixedWitness> find_quasi_fixed_avoiding(const PolyMap& map, const VarietySpec& v,
                                                           const MPoly& avoid, unsigned s_max) {
  if (avoid.nvars() != map.nvars() || avoid.characteristic() != map.characteristic()) {
    throw DomainError("avoided locus does not match the map's ambient space");
  }
  std::optional<QuasiFixedWitness> found;
  for_each_quasi_fixed(map, s_max, [&](const QuasiFixedWitness& w) {
    if (variety_membership(v, w.point) && !poly_eval(avoid, w.point).is_zero()) {
      found = w;
      return false;
    }
    return true;
  });
  return found;
}

std::vector<std::vector<FqElement>> image_point_sample(const PolyMap& map, unsigned iterations,
                                                       const FqField& field) {
  if (field.characteristic() != map.characteristic()) throw DomainError("characteristic mismatch");
  const unsigned n = map.nvars();
  checked_point_count(field.order(), n);
  const std::vector<FqElement> elements = enumerate_elements(field);
  std::map<std::vector<std::uint64_t>, std::vector<FqElement>> images;
  for_each_point(elements, n, [&](const std::vector<FqElement>& point, const std::vector<std::size_t>&) {
    std::vector<FqElement> x = point;
    for (unsigned it = 0; it < iterations; ++it) x = map(x);
    std::vector<std::uint64_t> key;
    for (const auto& c : x) key.push_back(c.index());
    images.try_emplace(std::move(key), std::move(x));
    return true;
  });
  std::vector<std::vector<FqElement>> out;
  for (auto& [k, pt] : images) out.push_back(std::move(pt));
  return out;
}

}  // namespace quasifix
