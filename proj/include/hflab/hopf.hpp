#pragma once

// Finite-dimensional algebras, coalgebras and Hopf algebras given by sparse
// structure constants on a distinguished basis, with verifiers for the axioms
// and for the structural properties used on finite-dimensional objects.

#include "hflab/errors.hpp"
#include "hflab/linalg.hpp"
#include "hflab/report.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hflab {

/// Associative unital algebra: b_i b_j = mult[i * dim + j].
struct Algebra {
  std::size_t dim = 0;
  std::vector<SparseVec> mult;
  SparseVec unit;

  const SparseVec &mul(std::size_t i, std::size_t j) const {
    return mult[i * dim + j];
  }

  SparseVec product(const SparseVec &a, const SparseVec &b) const {
    SparseVec out;
    for (const auto &[i, x] : a)
      for (const auto &[j, y] : b)
        axpy(out, x * y, mul(i, j));
    return out;
  }

  /// Matrix of left multiplication by b_i.
  SparseMatrix left_mult(std::size_t i) const {
    SparseMatrix m(dim, dim);
    for (std::size_t j = 0; j < dim; ++j)
      m.col(j) = mul(i, j);
    return m;
  }
  SparseMatrix right_mult(std::size_t i) const {
    SparseMatrix m(dim, dim);
    for (std::size_t j = 0; j < dim; ++j)
      m.col(j) = mul(j, i);
    return m;
  }
};

/// Coalgebra: Delta(b_i) = comult[i] indexed by j * dim + k.
struct Coalgebra {
  std::size_t dim = 0;
  std::vector<SparseVec> comult;
  Vec counit;

  SparseVec delta(const SparseVec &v) const {
    SparseVec out;
    for (const auto &[i, x] : v)
      axpy(out, x, comult[i]);
    return out;
  }

  Scalar eps(const SparseVec &v) const {
    Scalar s;
    for (const auto &[i, x] : v)
      s += x * counit[i];
    return s;
  }

  /// (Delta (x) id) Delta(b_i), indexed by (a * dim + b) * dim + c.
  SparseVec delta2(std::size_t i) const {
    SparseVec out;
    for (const auto &[jk, c] : comult[i]) {
      const std::size_t j = jk / dim, k = jk % dim;
      for (const auto &[ab, x] : comult[j])
        axpy(out, ab * dim + k, c * x);
    }
    return out;
  }
};

struct HopfData {
  std::vector<std::string> labels;
  Algebra alg;
  Coalgebra coalg;
  std::optional<SparseMatrix> antipode;

  std::size_t dim() const noexcept { return alg.dim; }
};

/// Product in A (x) B with componentwise multiplication; indices i * dim B + j.
inline SparseVec tensor_product(const Algebra &a, const Algebra &b,
                                const SparseVec &u, const SparseVec &v) {
  SparseVec out;
  for (const auto &[p, x] : u) {
    const std::size_t i = p / b.dim, j = p % b.dim;
    for (const auto &[q, y] : v) {
      const std::size_t k = q / b.dim, l = q % b.dim;
      const Scalar xy = x * y;
      for (const auto &[r, z] : a.mul(i, k))
        for (const auto &[s, w] : b.mul(j, l))
          axpy(out, r * b.dim + s, xy * z * w);
    }
  }
  return out;
}

namespace detail {

inline std::string show(const SparseVec &v) {
  if (v.empty())
    return "0";
  std::string s;
  for (const auto &[i, x] : v) {
    if (!s.empty())
      s += " + ";
    s += "(" + x.str() + ")*e" + std::to_string(i);
  }
  return s;
}

} // namespace detail

inline CheckReport verify_algebra(const Algebra &a) {
  CheckReport r("algebra");
  const std::size_t d = a.dim;
  if (a.mult.size() != d * d) {
    r.add("associativity", false, "structure table has wrong size");
    r.add("unitality", false, "structure table has wrong size");
    return r;
  }
  std::string witness;
  for (std::size_t i = 0; i < d && witness.empty(); ++i)
    for (std::size_t j = 0; j < d && witness.empty(); ++j)
      for (std::size_t k = 0; k < d && witness.empty(); ++k)
        if (a.product(a.mul(i, j), unit_vec(k)) !=
            a.product(unit_vec(i), a.mul(j, k)))
          witness = "(b" + std::to_string(i) + " b" + std::to_string(j) +
                    ") b" + std::to_string(k);
  r.add("associativity", witness.empty(), witness);
  witness.clear();
  for (std::size_t i = 0; i < d && witness.empty(); ++i)
    if (a.product(a.unit, unit_vec(i)) != unit_vec(i) ||
        a.product(unit_vec(i), a.unit) != unit_vec(i))
      witness = "b" + std::to_string(i);
  r.add("unitality", witness.empty(), witness);
  return r;
}

inline CheckReport verify_coalgebra(const Coalgebra &c) {
  CheckReport r("coalgebra");
  const std::size_t d = c.dim;
  std::string witness;
  for (std::size_t i = 0; i < d && witness.empty(); ++i) {
    SparseVec right;
    for (const auto &[jk, x] : c.comult[i]) {
      const std::size_t j = jk / d, k = jk % d;
      for (const auto &[ab, y] : c.comult[k])
        axpy(right, j * d * d + ab, x * y);
    }
    if (c.delta2(i) != right)
      witness = "b" + std::to_string(i);
  }
  r.add("coassociativity", witness.empty(), witness);
  witness.clear();
  for (std::size_t i = 0; i < d && witness.empty(); ++i) {
    SparseVec left, right;
    for (const auto &[jk, x] : c.comult[i]) {
      const std::size_t j = jk / d, k = jk % d;
      axpy(left, k, x * c.counit[j]);
      axpy(right, j, x * c.counit[k]);
    }
    if (left != unit_vec(i) || right != unit_vec(i))
      witness = "b" + std::to_string(i);
  }
  r.add("counitality", witness.empty(), witness);
  return r;
}

/// Nine axiom checks: algebra, coalgebra, bialgebra compatibility, antipode.
inline CheckReport verify_hopf(const HopfData &h) {
  CheckReport r("hopf");
  const std::size_t d = h.dim();
  if (h.coalg.dim != d || h.coalg.counit.size() != d ||
      h.coalg.comult.size() != d)
    fail(ErrorKind::ShapeError, "algebra and coalgebra dimensions differ");
  r.merge(verify_algebra(h.alg));
  r.merge(verify_coalgebra(h.coalg));

  std::string witness;
  {
    SparseVec one_one;
    for (const auto &[i, x] : h.alg.unit)
      for (const auto &[j, y] : h.alg.unit)
        axpy(one_one, i * d + j, x * y);
    if (h.coalg.delta(h.alg.unit) != one_one)
      witness = "Delta(1) != 1 (x) 1";
  }
  for (std::size_t i = 0; i < d && witness.empty(); ++i)
    for (std::size_t j = 0; j < d && witness.empty(); ++j)
      if (h.coalg.delta(h.alg.mul(i, j)) !=
          tensor_product(h.alg, h.alg, h.coalg.comult[i], h.coalg.comult[j]))
        witness = "Delta(b" + std::to_string(i) + " b" + std::to_string(j) + ")";
  r.add("comultiplication_multiplicative", witness.empty(), witness);

  witness.clear();
  if (!h.coalg.eps(h.alg.unit).is_one())
    witness = "eps(1) != 1";
  for (std::size_t i = 0; i < d && witness.empty(); ++i)
    for (std::size_t j = 0; j < d && witness.empty(); ++j)
      if (h.coalg.eps(h.alg.mul(i, j)) != h.coalg.counit[i] * h.coalg.counit[j])
        witness = "eps(b" + std::to_string(i) + " b" + std::to_string(j) + ")";
  r.add("counit_multiplicative", witness.empty(), witness);

  if (!h.antipode) {
    r.add("antipode_axiom", false, "no antipode");
    r.add("antipode_antihomomorphism", false, "no antipode");
    r.add("antipode_bijective", false, "no antipode");
    return r;
  }
  const SparseMatrix &s = *h.antipode;
  witness.clear();
  for (std::size_t i = 0; i < d && witness.empty(); ++i) {
    SparseVec left, right;
    for (const auto &[jk, c] : h.coalg.comult[i]) {
      const std::size_t j = jk / d, k = jk % d;
      axpy(left, c, h.alg.product(s.col(j), unit_vec(k)));
      axpy(right, c, h.alg.product(unit_vec(j), s.col(k)));
    }
    const SparseVec expect = scaled(h.alg.unit, h.coalg.counit[i]);
    if (left != expect || right != expect)
      witness = "b" + std::to_string(i) + ": m(S(x)id)Delta = " +
                detail::show(left);
  }
  r.add("antipode_axiom", witness.empty(), witness);

  witness.clear();
  if (s.apply(h.alg.unit) != h.alg.unit)
    witness = "S(1) != 1";
  for (std::size_t i = 0; i < d && witness.empty(); ++i)
    for (std::size_t j = 0; j < d && witness.empty(); ++j)
      if (s.apply(h.alg.mul(i, j)) != h.alg.product(s.col(j), s.col(i)))
        witness = "S(b" + std::to_string(i) + " b" + std::to_string(j) + ")";
  r.add("antipode_antihomomorphism", witness.empty(), witness);

  const std::size_t rk = rank(s.dense());
  r.add("antipode_bijective", rk == d,
        "rank " + std::to_string(rk) + " of " + std::to_string(d));
  return r;
}

/// Group algebra of Z/M_1 x ... x Z/M_r; basis in lexicographic order of
/// exponent tuples (first factor most significant).
inline HopfData group_algebra(const std::vector<int> &orders) {
  if (orders.empty())
    fail(ErrorKind::InvalidDatum, "group_algebra needs at least one factor");
  for (int m : orders)
    if (m < 1)
      fail(ErrorKind::InvalidDatum, "group orders must be >= 1");
  std::size_t d = 1;
  for (int m : orders)
    d *= static_cast<std::size_t>(m);
  const std::size_t r = orders.size();
  auto decode = [&](std::size_t idx) {
    std::vector<int> e(r);
    for (std::size_t f = r; f-- > 0;) {
      e[f] = static_cast<int>(idx % orders[f]);
      idx /= orders[f];
    }
    return e;
  };
  auto encode = [&](const std::vector<int> &e) {
    std::size_t idx = 0;
    for (std::size_t f = 0; f < r; ++f)
      idx = idx * orders[f] + static_cast<std::size_t>(
                                  detail::mod_floor(e[f], orders[f]));
    return idx;
  };
  HopfData h;
  h.alg.dim = h.coalg.dim = d;
  h.alg.mult.resize(d * d);
  h.coalg.comult.resize(d);
  h.coalg.counit.assign(d, Scalar(1));
  SparseMatrix s(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto ei = decode(i);
    std::string label;
    for (std::size_t f = 0; f < r; ++f) {
      if (ei[f] == 0)
        continue;
      if (!label.empty())
        label += " ";
      label += "g" + std::to_string(f + 1);
      if (ei[f] > 1)
        label += "^" + std::to_string(ei[f]);
    }
    h.labels.push_back(label.empty() ? "1" : label);
    for (std::size_t j = 0; j < d; ++j) {
      auto ej = decode(j);
      for (std::size_t f = 0; f < r; ++f)
        ej[f] += ei[f];
      h.alg.mult[i * d + j] = unit_vec(encode(ej));
    }
    h.coalg.comult[i] = unit_vec(i * d + i);
    auto inv = ei;
    for (auto &x : inv)
      x = -x;
    s.col(i) = unit_vec(encode(inv));
  }
  h.alg.unit = unit_vec(0);
  h.antipode = std::move(s);
  return h;
}

/// The one-dimensional Hopf algebra k.
inline HopfData trivial_hopf() { return group_algebra({1}); }

/// Dual algebra C*: multiplication is the transpose of Delta, unit is eps.
inline Algebra dual_algebra(const Coalgebra &c) {
  Algebra a;
  a.dim = c.dim;
  a.mult.assign(c.dim * c.dim, SparseVec{});
  for (std::size_t k = 0; k < c.dim; ++k)
    for (const auto &[ij, x] : c.comult[k])
      axpy(a.mult[ij], k, x);
  a.unit = to_sparse(c.counit);
  return a;
}

/// Dual coalgebra A*: Delta is the transpose of multiplication, eps is
/// evaluation at 1.
inline Coalgebra dual_coalgebra(const Algebra &a) {
  Coalgebra c;
  c.dim = a.dim;
  c.comult.assign(a.dim, SparseVec{});
  for (std::size_t ij = 0; ij < a.dim * a.dim; ++ij)
    for (const auto &[k, x] : a.mult[ij])
      axpy(c.comult[k], ij, x);
  c.counit = to_dense(a.unit, a.dim);
  return c;
}

inline HopfData dual_hopf(const HopfData &h) {
  if (!h.antipode)
    fail(ErrorKind::IncompleteDatum, "dual_hopf needs an antipode");
  HopfData d;
  d.alg = dual_algebra(h.coalg);
  d.coalg = dual_coalgebra(h.alg);
  d.antipode = h.antipode->transpose();
  for (const auto &l : h.labels)
    d.labels.push_back("d(" + l + ")");
  return d;
}

/// Jacobson radical via the trace form of the regular representation:
/// rad A = {x : tr(L_{xy}) = 0 for all y} (characteristic zero).
/// The result is checked to be a nilpotent two-sided ideal.
inline Subspace trace_form_radical(const Algebra &a, bool check_axioms = true) {
  if (check_axioms && !verify_algebra(a).passed())
    fail(ErrorKind::NotAnAlgebra, "trace_form_radical: input is not an "
                                  "associative unital algebra");
  const std::size_t d = a.dim;
  Vec tau(d);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < d; ++i) {
      auto it = a.mul(k, i).find(i);
      if (it != a.mul(k, i).end())
        tau[k] += it->second;
    }
  Matrix gram(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (const auto &[k, x] : a.mul(i, j))
        gram(i, j) += x * tau[k];
  Subspace rad = kernel(gram.transpose());

  const auto rb = rad.sparse_basis();
  for (const auto &r : rb)
    for (std::size_t i = 0; i < d; ++i)
      if (!rad.contains(a.product(unit_vec(i), r)) ||
          !rad.contains(a.product(r, unit_vec(i))))
        fail(ErrorKind::InternalInconsistency,
             "trace-form radical is not a two-sided ideal");
  auto power = rb;
  for (std::size_t step = 0; !power.empty(); ++step) {
    if (step > d)
      fail(ErrorKind::InternalInconsistency, "trace-form radical not nilpotent");
    std::vector<SparseVec> next;
    for (const auto &p : power)
      for (const auto &r : rb) {
        auto pr = a.product(p, r);
        if (!pr.empty())
          next.push_back(std::move(pr));
      }
    power = next.empty() ? next : Subspace::span(next, d).sparse_basis();
  }
  return rad;
}

enum class Side { Left, Right };

/// {L : x L = eps(x) L for all x} (left) or {L : L x = eps(x) L} (right).
inline Subspace integral_space(const HopfData &h, Side side = Side::Left) {
  const std::size_t d = h.dim();
  Matrix m(d * d, d);
  for (std::size_t i = 0; i < d; ++i) {
    const SparseMatrix op =
        side == Side::Left ? h.alg.left_mult(i) : h.alg.right_mult(i);
    for (std::size_t c = 0; c < d; ++c) {
      for (const auto &[r, x] : op.col(c))
        m(i * d + r, c) += x;
      m(i * d + c, c) -= h.coalg.counit[i];
    }
  }
  Subspace k = kernel(m);
  if (k.dim() != 1)
    fail(ErrorKind::TheoremViolation,
         "space of integrals has dimension " + std::to_string(k.dim()) +
             " (expected 1)");
  return k;
}

struct SemisimplicityEvidence {
  bool semisimple = false;
  std::size_t radical_dim = 0;
  Scalar integral_counit; ///< eps(Lambda) for the normalized left integral
};

/// Trace-form radical test cross-checked against Maschke's criterion
/// eps(Lambda) != 0; the two must agree.
inline SemisimplicityEvidence semisimplicity(const HopfData &h) {
  SemisimplicityEvidence ev;
  ev.radical_dim = trace_form_radical(h.alg).dim();
  const Subspace integrals = integral_space(h, Side::Left);
  ev.integral_counit = h.coalg.eps(integrals.sparse_basis().front());
  const bool by_radical = ev.radical_dim == 0;
  const bool by_integral = !ev.integral_counit.is_zero();
  if (by_radical != by_integral)
    fail(ErrorKind::InternalInconsistency,
         "radical test and integral test disagree on semisimplicity");
  ev.semisimple = by_radical;
  return ev;
}

inline bool is_semisimple(const HopfData &h) {
  return semisimplicity(h).semisimple;
}

namespace detail {

// Rows of a matrix whose kernel is `s` (a basis of its annihilator).
inline Matrix quotient_map(const Subspace &s) {
  return annihilator(s).basis();
}

} // namespace detail

/// corad_0 = (rad C*)^perp, corad_n = Delta^{-1}(C (x) corad_{n-1} +
/// corad_0 (x) C). Ends at the first term equal to the whole space.
inline std::vector<Subspace> coradical_filtration(const Coalgebra &c) {
  if (!verify_coalgebra(c).passed())
    fail(ErrorKind::NotAnAlgebra, "coradical_filtration: not a coalgebra");
  const std::size_t d = c.dim;
  const Subspace rad = trace_form_radical(dual_algebra(c), false);
  std::vector<Subspace> terms{annihilator(rad)};
  const Matrix p0 = detail::quotient_map(terms.front());
  while (!terms.back().is_full()) {
    if (terms.size() > d + 1)
      fail(ErrorKind::TheoremViolation, "coradical filtration did not stabilize");
    const Matrix pn = detail::quotient_map(terms.back());
    const std::size_t r1 = pn.rows();
    Matrix m(p0.rows() * r1, d);
    for (std::size_t b = 0; b < d; ++b)
      for (const auto &[jk, x] : c.comult[b]) {
        const std::size_t j = jk / d, k = jk % d;
        for (std::size_t a0 = 0; a0 < p0.rows(); ++a0) {
          if (p0(a0, j).is_zero())
            continue;
          const Scalar xa = x * p0(a0, j);
          for (std::size_t a1 = 0; a1 < r1; ++a1)
            if (!pn(a1, k).is_zero())
              m(a0 * r1 + a1, b) += xa * pn(a1, k);
        }
      }
    Subspace next = kernel(m);
    if (!next.contains(terms.back()) || next.dim() <= terms.back().dim())
      fail(ErrorKind::TheoremViolation,
           "coradical filtration failed to increase strictly");
    terms.push_back(std::move(next));
  }
  return terms;
}

/// A bilinear form sigma on H given by its values on basis pairs, together
/// with its convolution inverse.
struct CocycleData {
  Matrix values;
  Matrix inverse_values;

  Scalar eval(const Matrix &m, const SparseVec &u, const SparseVec &v) const {
    Scalar s;
    for (const auto &[i, x] : u)
      for (const auto &[j, y] : v)
        if (!m(i, j).is_zero())
          s += x * y * m(i, j);
    return s;
  }
  Scalar operator()(const SparseVec &u, const SparseVec &v) const {
    return eval(values, u, v);
  }
  Scalar inv(const SparseVec &u, const SparseVec &v) const {
    return eval(inverse_values, u, v);
  }

  /// The trivial cocycle eps (x) eps.
  static CocycleData trivial(const HopfData &h) {
    const std::size_t d = h.dim();
    CocycleData c{Matrix(d, d), Matrix(d, d)};
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        c.values(i, j) = c.inverse_values(i, j) =
            h.coalg.counit[i] * h.coalg.counit[j];
    return c;
  }

  /// sigma^{-1} as a cocycle of the twisted algebra; its inverse is sigma.
  CocycleData inverse() const { return {inverse_values, values}; }
};

/// Cocycle identity, normalization and convolution invertibility.
inline CheckReport verify_cocycle(const HopfData &h, const CocycleData &s) {
  CheckReport r("cocycle");
  const std::size_t d = h.dim();
  if (s.values.rows() != d || s.values.cols() != d ||
      s.inverse_values.rows() != d || s.inverse_values.cols() != d)
    fail(ErrorKind::ShapeError, "cocycle table has wrong shape");
  const auto &delta = h.coalg.comult;
  const auto &unit = h.alg.unit;

  std::string witness;
  for (std::size_t i = 0; i < d && witness.empty(); ++i) {
    const Scalar e = h.coalg.counit[i];
    if (s(unit_vec(i), unit) != e || s(unit, unit_vec(i)) != e ||
        s.inv(unit_vec(i), unit) != e || s.inv(unit, unit_vec(i)) != e)
      witness = "b" + std::to_string(i);
  }
  r.add("normalization", witness.empty(), witness);

  witness.clear();
  for (std::size_t i = 0; i < d && witness.empty(); ++i)
    for (std::size_t j = 0; j < d && witness.empty(); ++j) {
      Scalar left, right;
      for (const auto &[ab, x] : delta[i])
        for (const auto &[ce, y] : delta[j]) {
          const std::size_t a = ab / d, b = ab % d, c = ce / d, e = ce % d;
          left += x * y * s.values(a, c) * s.inverse_values(b, e);
          right += x * y * s.inverse_values(a, c) * s.values(b, e);
        }
      const Scalar expect = h.coalg.counit[i] * h.coalg.counit[j];
      if (left != expect || right != expect)
        witness = "(b" + std::to_string(i) + ", b" + std::to_string(j) + ")";
    }
  r.add("convolution_inverse", witness.empty(), witness);

  // sigma(x1, y1) sigma(x2 y2, z) = sigma(y1, z1) sigma(x, y2 z2)
  // prod_sigma(u, z) = sigma(b_u b_v, b_z) cached per (u, v)
  std::vector<Vec> left_cache(d * d);
  auto sigma_of_product = [&](std::size_t u, std::size_t v) -> const Vec & {
    Vec &row = left_cache[u * d + v];
    if (row.empty()) {
      row.assign(d, Scalar());
      for (std::size_t z = 0; z < d; ++z)
        row[z] = s(h.alg.mul(u, v), unit_vec(z));
    }
    return row;
  };
  std::vector<Vec> right_cache(d * d);
  auto sigma_into_product = [&](std::size_t v, std::size_t w) -> const Vec & {
    Vec &row = right_cache[v * d + w];
    if (row.empty()) {
      row.assign(d, Scalar());
      for (std::size_t x = 0; x < d; ++x)
        row[x] = s(unit_vec(x), h.alg.mul(v, w));
    }
    return row;
  };
  witness.clear();
  for (std::size_t x = 0; x < d && witness.empty(); ++x)
    for (std::size_t y = 0; y < d && witness.empty(); ++y)
      for (std::size_t z = 0; z < d && witness.empty(); ++z) {
        Scalar lhs, rhs;
        for (const auto &[x12, cx] : delta[x])
          for (const auto &[y12, cy] : delta[y]) {
            const Scalar &first = s.values(x12 / d, y12 / d);
            if (first.is_zero())
              continue;
            lhs += cx * cy * first * sigma_of_product(x12 % d, y12 % d)[z];
          }
        for (const auto &[y12, cy] : delta[y])
          for (const auto &[z12, cz] : delta[z]) {
            const Scalar &first = s.values(y12 / d, z12 / d);
            if (first.is_zero())
              continue;
            rhs += cy * cz * first * sigma_into_product(y12 % d, z12 % d)[x];
          }
        if (lhs != rhs)
          witness = "(b" + std::to_string(x) + ", b" + std::to_string(y) +
                    ", b" + std::to_string(z) + ")";
      }
  r.add("cocycle_identity", witness.empty(), witness);
  return r;
}

/// x ._sigma y = sigma(x1, y1) x2 y2 sigma^{-1}(x3, y3).
inline Algebra twisted_algebra(const HopfData &h, const CocycleData &s) {
  const std::size_t d = h.dim();
  std::vector<SparseVec> d2(d);
  for (std::size_t i = 0; i < d; ++i)
    d2[i] = h.coalg.delta2(i);
  Algebra a;
  a.dim = d;
  a.unit = h.alg.unit;
  a.mult.assign(d * d, SparseVec{});
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      SparseVec &out = a.mult[i * d + j];
      for (const auto &[abc, x] : d2[i]) {
        const std::size_t p = abc / (d * d), q = (abc / d) % d, r = abc % d;
        for (const auto &[abc2, y] : d2[j]) {
          const std::size_t p2 = abc2 / (d * d), q2 = (abc2 / d) % d,
                            r2 = abc2 % d;
          const Scalar &left = s.values(p, p2);
          if (left.is_zero())
            continue;
          const Scalar &right = s.inverse_values(r, r2);
          if (right.is_zero())
            continue;
          axpy(out, x * y * left * right, h.alg.mul(q, q2));
        }
      }
    }
  return a;
}

/// Solves m(S (x) id) Delta = u eps for S as a linear system in the d^2
/// entries of S. Returns nullopt if there is no unique solution.
inline std::optional<SparseMatrix> solve_antipode(const Algebra &a,
                                                  const Coalgebra &c) {
  const std::size_t d = a.dim;
  const std::size_t unknowns = d * d; // S(b_j) coefficient l -> j * d + l
  Matrix sys(d * d, unknowns + 1);
  for (std::size_t i = 0; i < d; ++i) {
    for (const auto &[jk, x] : c.comult[i]) {
      const std::size_t j = jk / d, k = jk % d;
      for (std::size_t l = 0; l < d; ++l)
        for (const auto &[r, y] : a.mul(l, k))
          sys(i * d + r, j * d + l) += x * y;
    }
    for (const auto &[r, u] : a.unit)
      sys(i * d + r, unknowns) += c.counit[i] * u;
  }
  auto e = reduce_rows(std::move(sys));
  if (e.rank() != unknowns || (!e.pivots.empty() && e.pivots.back() == unknowns))
    return std::nullopt;
  SparseMatrix s(d, d);
  for (std::size_t row = 0; row < e.rank(); ++row) {
    const std::size_t var = e.pivots[row];
    const Scalar &v = e.reduced(row, unknowns);
    if (!v.is_zero())
      s.col(var / d).emplace(var % d, v);
  }
  return s;
}

/// H_sigma: same coalgebra, twisted multiplication, antipode re-solved from
/// the antipode axiom.
inline HopfData cocycle_twist(const HopfData &h, const CocycleData &s) {
  const auto check = verify_cocycle(h, s);
  if (!check.passed()) {
    std::string why;
    for (const auto &e : check.entries())
      if (!e.passed)
        why += e.name + " at " + e.detail + "; ";
    fail(ErrorKind::InvalidCocycle, why);
  }
  HopfData t;
  t.labels = h.labels;
  t.coalg = h.coalg;
  t.alg = twisted_algebra(h, s);
  t.antipode = solve_antipode(t.alg, t.coalg);
  if (!t.antipode)
    fail(ErrorKind::TheoremViolation, "twisted antipode system has no unique "
                                      "solution");
  if (!verify_hopf(t).passed())
    fail(ErrorKind::TheoremViolation, "twisted object fails the Hopf axioms");
  return t;
}

/// ad_l(x)(y) = x1 y S(x2).
inline SparseVec adjoint_left(const HopfData &h, const SparseVec &x,
                              const SparseVec &y) {
  if (!h.antipode)
    fail(ErrorKind::IncompleteDatum, "adjoint action needs an antipode");
  const std::size_t d = h.dim();
  SparseVec out;
  for (const auto &[jk, c] : h.coalg.delta(x))
    axpy(out, c,
         h.alg.product(h.alg.product(unit_vec(jk / d), y),
                       h.antipode->col(jk % d)));
  return out;
}

/// Checks that `sub` is a Hopf subalgebra; throws InvalidSubobject if not.
inline void require_hopf_subalgebra(const HopfData &h, const Subspace &sub) {
  const std::size_t d = h.dim();
  if (sub.ambient() != d)
    fail(ErrorKind::ShapeError, "subspace lives in the wrong ambient space");
  if (!h.antipode)
    fail(ErrorKind::IncompleteDatum, "Hopf subalgebra check needs an antipode");
  if (!sub.contains(h.alg.unit))
    fail(ErrorKind::InvalidSubobject, "unit not in subspace");
  const auto basis = sub.sparse_basis();
  for (const auto &u : basis)
    for (const auto &v : basis)
      if (!sub.contains(h.alg.product(u, v)))
        fail(ErrorKind::InvalidSubobject, "not closed under multiplication");
  const Matrix quot = detail::quotient_map(sub);
  for (const auto &u : basis) {
    if (!sub.contains(h.antipode->apply(u)))
      fail(ErrorKind::InvalidSubobject, "not closed under the antipode");
    const SparseVec du = h.coalg.delta(u);
    // Delta(u) in sub (x) sub iff (pi (x) id) and (id (x) pi) kill it
    for (std::size_t r = 0; r < quot.rows(); ++r) {
      SparseVec left, right;
      for (const auto &[jk, c] : du) {
        const std::size_t j = jk / d, k = jk % d;
        if (!quot(r, j).is_zero())
          axpy(left, k, c * quot(r, j));
        if (!quot(r, k).is_zero())
          axpy(right, j, c * quot(r, k));
      }
      if (!left.empty() || !right.empty())
        fail(ErrorKind::InvalidSubobject, "not a subcoalgebra");
    }
  }
}

/// Normality: ad_l(b_i)(s) in sub for every basis b_i and s in sub.
inline bool is_normal_subalgebra(const HopfData &h, const Subspace &sub) {
  require_hopf_subalgebra(h, sub);
  const auto basis = sub.sparse_basis();
  for (std::size_t i = 0; i < h.dim(); ++i)
    for (const auto &s : basis)
      if (!sub.contains(adjoint_left(h, unit_vec(i), s)))
        return false;
  return true;
}

/// Throws InvalidMorphism unless q : h -> k intertwines all structure maps.
inline void require_hopf_map(const HopfData &h, const HopfData &k,
                             const SparseMatrix &q) {
  if (q.cols() != h.dim() || q.rows() != k.dim())
    fail(ErrorKind::ShapeError, "morphism has the wrong shape");
  const std::size_t d = h.dim();
  if (q.apply(h.alg.unit) != k.alg.unit)
    fail(ErrorKind::InvalidMorphism, "does not preserve the unit");
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j)
      if (q.apply(h.alg.mul(i, j)) != k.alg.product(q.col(i), q.col(j)))
        fail(ErrorKind::InvalidMorphism, "not multiplicative");
    if (apply_tensor(q, q, h.coalg.comult[i]) != k.coalg.delta(q.col(i)))
      fail(ErrorKind::InvalidMorphism, "not comultiplicative");
    if (k.coalg.eps(q.col(i)) != h.coalg.counit[i])
      fail(ErrorKind::InvalidMorphism, "does not preserve the counit");
  }
}

/// (q (x) id) Delta = (q (x) id) Delta^op on every basis element of a
/// coalgebra; the map is not required to be a Hopf map.
inline bool is_cocentral_on(const Coalgebra &c, const SparseMatrix &q) {
  const auto id = SparseMatrix::identity(c.dim);
  for (std::size_t i = 0; i < c.dim; ++i)
    if (apply_tensor(q, id, c.comult[i]) !=
        apply_tensor(q, id, flip(c.comult[i], c.dim, c.dim)))
      return false;
  return true;
}

inline bool is_cocentral_map(const HopfData &h, const HopfData &k,
                             const SparseMatrix &q) {
  require_hopf_map(h, k, q);
  return is_cocentral_on(h.coalg, q);
}

/// An algebra with a right coaction rho : R -> R (x) B.
struct ComoduleAlgebra {
  Algebra alg;
  SparseMatrix coaction;
};

/// Cleaving data for an extension A -> C with right B-coaction on C:
/// xi : C -> A an A-module map, chi : B -> C a B-comodule map, with
/// xi chi = eps_B 1_A and (iota xi) * (chi pi) = id_C, where the convolution
/// is taken through the coaction (c -> iota(xi(c_0)) chi(c_1)).
inline CheckReport verify_cleaving_pair(const SparseMatrix &xi,
                                        const SparseMatrix &chi,
                                        const Algebra &a,
                                        const SparseMatrix &iota,
                                        const ComoduleAlgebra &c,
                                        const HopfData &b) {
  const std::size_t dc = c.alg.dim, db = b.dim(), da = a.dim;
  if (xi.rows() != da || xi.cols() != dc || chi.rows() != dc ||
      chi.cols() != db || iota.rows() != dc || iota.cols() != da ||
      c.coaction.rows() != dc * db || c.coaction.cols() != dc)
    fail(ErrorKind::ShapeError, "cleaving pair shapes do not match");
  CheckReport r("cleaving");
  const auto id_b = SparseMatrix::identity(db);

  std::string witness;
  for (std::size_t j = 0; j < db && witness.empty(); ++j)
    if (c.coaction.apply(chi.col(j)) != apply_tensor(chi, id_b, b.coalg.comult[j]))
      witness = "b" + std::to_string(j);
  r.add("chi_comodule_map", witness.empty(), witness);

  witness.clear();
  for (std::size_t i = 0; i < da && witness.empty(); ++i)
    for (std::size_t j = 0; j < dc && witness.empty(); ++j)
      if (xi.apply(c.alg.product(iota.col(i), unit_vec(j))) !=
          a.product(unit_vec(i), xi.col(j)))
        witness = "a" + std::to_string(i) + " c" + std::to_string(j);
  r.add("xi_module_map", witness.empty(), witness);

  witness.clear();
  for (std::size_t j = 0; j < db && witness.empty(); ++j)
    if (xi.apply(chi.col(j)) != scaled(a.unit, b.coalg.counit[j]))
      witness = "b" + std::to_string(j);
  r.add("xi_chi_counit", witness.empty(), witness);

  witness.clear();
  for (std::size_t j = 0; j < dc && witness.empty(); ++j) {
    SparseVec acc;
    for (const auto &[pq, x] : c.coaction.col(j))
      axpy(acc, x,
           c.alg.product(iota.apply(xi.col(pq / db)), chi.col(pq % db)));
    if (acc != unit_vec(j))
      witness = "c" + std::to_string(j) + " -> " + detail::show(acc);
  }
  r.add("convolution_identity", witness.empty(), witness);
  return r;
}

} // namespace hflab
