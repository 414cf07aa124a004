#pragma once

// Shared fixtures for the test binaries.

#include "hflab/qls.hpp"

#include <random>
#include <vector>

namespace hflab::testing {

inline QLSDatum sweedler_datum() { return {1, 2, {{1}}, false}; }
inline QLSDatum cyclic3_datum() { return {1, 3, {{1}}, false}; }
inline QLSDatum klein_datum() { return {2, 2, {{1, 1}, {1, 1}}, false}; }
inline QLSDatum group_only(int n) { return {1, n, {{1}}, true}; }

inline Character chr1(Scalar t, Scalar s) {
  return {{std::move(t)}, {std::move(s)}};
}
inline Character chr2(Scalar t1, Scalar s1, Scalar t2, Scalar s2) {
  return {{std::move(t1), std::move(t2)}, {std::move(s1), std::move(s2)}};
}

inline Character random_character(std::mt19937 &rng, const QLSModel &m) {
  std::uniform_int_distribution<int> num(-4, 4), den(1, 3), root(0, 11);
  Character k;
  for (std::size_t i = 0; i < m.theta(); ++i) {
    int p = 0;
    while (p == 0)
      p = num(rng);
    Scalar t(mpq_class(p, den(rng)));
    if (m.datum().conductor > 2)
      t = t * Scalar::root_of_unity(m.datum().conductor, root(rng));
    k.t.push_back(t);
    k.s.push_back(m.datum().group_only ? Scalar(0)
                                       : Scalar(mpq_class(num(rng), den(rng))));
  }
  return k;
}

} // namespace hflab::testing
