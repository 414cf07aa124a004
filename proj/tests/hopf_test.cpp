#include "hflab/hopf.hpp"

#include <gtest/gtest.h>

using namespace hflab;

namespace {

// Sweedler's four-dimensional algebra written out by hand on the basis
// 1, g, x, xg: g^2 = 1, x^2 = 0, gx = -xg, Delta(x) = x (x) 1 + g (x) x.
HopfData sweedler_by_hand() {
  HopfData h;
  h.labels = {"1", "g", "x", "x g"};
  const std::size_t d = 4;
  h.alg.dim = h.coalg.dim = d;
  h.alg.mult.assign(d * d, {});
  // basis index = 2a + b for x^a g^b
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int e = 0; e < 2; ++e) {
          if (a + c > 1)
            continue;
          const int sign = (b * c) % 2 ? -1 : 1;
          h.alg.mult[(2 * a + b) * d + (2 * c + e)] =
              SparseVec{{static_cast<std::size_t>(2 * (a + c) + (b + e) % 2),
                         Scalar(sign)}};
        }
  h.alg.unit = unit_vec(0);
  auto t = [](std::size_t i, std::size_t j) { return i * 4 + j; };
  h.coalg.comult = {
      {{t(0, 0), Scalar(1)}},
      {{t(1, 1), Scalar(1)}},
      {{t(2, 0), Scalar(1)}, {t(1, 2), Scalar(1)}},
      {{t(3, 1), Scalar(1)}, {t(0, 3), Scalar(1)}},
  };
  h.coalg.counit = {Scalar(1), Scalar(1), Scalar(0), Scalar(0)};
  SparseMatrix s(d, d);
  s.col(0) = unit_vec(0);
  s.col(1) = unit_vec(1);
  s.col(2) = unit_vec(3);
  s.col(3) = {{2, Scalar(-1)}};
  h.antipode = s;
  return h;
}

// X wedge Y = Delta^{-1}(X (x) C + C (x) Y), built from explicit spanning
// sets of the two tensor subspaces rather than quotient maps.
Subspace wedge(const Coalgebra &c, const Subspace &x, const Subspace &y) {
  const std::size_t d = c.dim;
  std::vector<SparseVec> gens;
  for (const auto &u : x.sparse_basis())
    for (std::size_t k = 0; k < d; ++k) {
      SparseVec t;
      for (const auto &[i, a] : u)
        axpy(t, i * d + k, a);
      gens.push_back(t);
    }
  for (const auto &v : y.sparse_basis())
    for (std::size_t k = 0; k < d; ++k) {
      SparseVec t;
      for (const auto &[i, a] : v)
        axpy(t, k * d + i, a);
      gens.push_back(t);
    }
  Matrix delta(d * d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (const auto &[jk, a] : c.comult[i])
      delta(jk, i) = a;
  return preimage(delta, Subspace::span(gens, d * d));
}

std::vector<std::size_t> dims(const std::vector<Subspace> &f) {
  std::vector<std::size_t> out;
  for (const auto &s : f)
    out.push_back(s.dim());
  return out;
}

TEST(Hopf, GroupAlgebraPassesAxioms) {
  for (const auto &orders : std::vector<std::vector<int>>{{2}, {2, 2}, {6}, {3, 4}}) {
    const HopfData h = group_algebra(orders);
    const auto r = verify_hopf(h);
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.entries().size(), 9u);
  }
  EXPECT_EQ(group_algebra({2, 2}).dim(), 4u);
  EXPECT_EQ(group_algebra({2, 3}).labels[5], "g1 g2^2");
}

TEST(Hopf, GroupAlgebraZeroOrderRejected) {
  try {
    (void)group_algebra({2, 0});
    ADD_FAILURE();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidDatum);
  }
}

TEST(Hopf, CyclicSixAntipodeIsAnInvolution) {
  const HopfData h = group_algebra({6});
  const SparseMatrix s2 = *h.antipode * *h.antipode;
  EXPECT_EQ(s2, SparseMatrix::identity(6));
  std::size_t fixed = 0;
  for (std::size_t i = 0; i < 6; ++i)
    fixed += h.antipode->col(i) == unit_vec(i);
  EXPECT_EQ(fixed, 2u); // 1 and g^3
}

TEST(Hopf, SweedlerPassesAndMutationFails) {
  HopfData h = sweedler_by_hand();
  EXPECT_TRUE(verify_hopf(h).passed());
  h.antipode = SparseMatrix::identity(4);
  const auto r = verify_hopf(h);
  EXPECT_FALSE(r.passed("antipode_axiom"));
  EXPECT_TRUE(r.passed("associativity"));
}

TEST(Hopf, BrokenAssociativityIsReported) {
  HopfData h = sweedler_by_hand();
  h.alg.mult[2 * 4 + 2] = unit_vec(0); // x^2 = 1 breaks Delta-compatibility
  const auto r = verify_hopf(h);
  EXPECT_FALSE(r.passed("comultiplication_multiplicative"));
  EXPECT_FALSE(r.passed());
}

TEST(Hopf, MissingAntipodeReportsFailure) {
  HopfData h = sweedler_by_hand();
  h.antipode.reset();
  EXPECT_FALSE(verify_hopf(h).passed("antipode_axiom"));
  try {
    (void)dual_hopf(h);
    ADD_FAILURE();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::IncompleteDatum);
  }
}

TEST(Hopf, DualOfGroupAlgebraHasOrthogonalIdempotents) {
  const HopfData d = dual_hopf(group_algebra({2}));
  EXPECT_TRUE(verify_hopf(d).passed());
  EXPECT_EQ(d.alg.mul(0, 0), unit_vec(0));
  EXPECT_EQ(d.alg.mul(1, 1), unit_vec(1));
  EXPECT_TRUE(d.alg.mul(0, 1).empty());
  EXPECT_EQ(d.alg.unit, (SparseVec{{0, Scalar(1)}, {1, Scalar(1)}}));
}

TEST(Hopf, DualOfCyclicThreeIsCommutativeAndCocommutative) {
  const HopfData d = dual_hopf(group_algebra({3}));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_EQ(d.alg.mul(i, j), d.alg.mul(j, i));
    EXPECT_EQ(d.coalg.comult[i], flip(d.coalg.comult[i], 3, 3));
  }
}

TEST(Hopf, DoubleDualIsIdentity) {
  for (const HopfData &h : {sweedler_by_hand(), group_algebra({2, 3})}) {
    const HopfData dd = dual_hopf(dual_hopf(h));
    EXPECT_EQ(dd.alg.mult, h.alg.mult);
    EXPECT_EQ(dd.alg.unit, h.alg.unit);
    EXPECT_EQ(dd.coalg.comult, h.coalg.comult);
    EXPECT_EQ(dd.coalg.counit, h.coalg.counit);
    EXPECT_EQ(*dd.antipode, *h.antipode);
    EXPECT_TRUE(verify_hopf(dual_hopf(h)).passed());
  }
}

TEST(Hopf, Integrals) {
  const HopfData k2 = group_algebra({2});
  const Subspace i = integral_space(k2);
  EXPECT_EQ(i.sparse_basis().front(),
            (SparseVec{{0, Scalar(1)}, {1, Scalar(1)}}));
  EXPECT_EQ(k2.coalg.eps(i.sparse_basis().front()), Scalar(2));

  const HopfData sw = sweedler_by_hand();
  const Subspace li = integral_space(sw, Side::Left);
  EXPECT_EQ(li.dim(), 1u);
  EXPECT_TRUE(sw.coalg.eps(li.sparse_basis().front()).is_zero());
  // (1 + g) x = x - xg
  EXPECT_TRUE(li.contains(SparseVec{{2, Scalar(1)}, {3, Scalar(-1)}}));
  EXPECT_EQ(integral_space(sw, Side::Right).dim(), 1u);

  const HopfData d3 = dual_hopf(group_algebra({3}));
  const Subspace di = integral_space(d3);
  // evaluation at the identity: the delta function of basis element 0
  EXPECT_TRUE(di.contains(unit_vec(0)));
  EXPECT_FALSE(d3.coalg.eps(di.sparse_basis().front()).is_zero());
}

TEST(Hopf, IntegralDimensionMustBeOne) {
  HopfData h = group_algebra({2});
  h.coalg.counit = {Scalar(0), Scalar(0)};
  try {
    (void)integral_space(h);
    ADD_FAILURE();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::TheoremViolation);
  }
}

TEST(Hopf, Semisimplicity) {
  EXPECT_TRUE(is_semisimple(group_algebra({6})));
  EXPECT_TRUE(is_semisimple(dual_hopf(group_algebra({2, 2}))));
  const auto ev = semisimplicity(sweedler_by_hand());
  EXPECT_FALSE(ev.semisimple);
  EXPECT_EQ(ev.radical_dim, 2u);
  EXPECT_TRUE(ev.integral_counit.is_zero());
  for (const HopfData &h :
       {sweedler_by_hand(), group_algebra({4}), group_algebra({2, 3})})
    EXPECT_EQ(is_semisimple(h), is_semisimple(dual_hopf(h)));
}

TEST(Hopf, SweedlerRadicalIsSpannedByX) {
  const Subspace rad = trace_form_radical(sweedler_by_hand().alg);
  EXPECT_EQ(rad, Subspace::span(std::vector<SparseVec>{unit_vec(2), unit_vec(3)}, 4));
}

TEST(Hopf, RadicalRejectsNonUnitalInput) {
  Algebra a = group_algebra({2}).alg;
  a.mult[0 * 2 + 1] = unit_vec(0); // 1 g = 1
  try {
    (void)trace_form_radical(a);
    ADD_FAILURE();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotAnAlgebra);
  }
}

TEST(Hopf, CoradicalFiltrationMatchesWedgeOracle) {
  const HopfData sw = sweedler_by_hand();
  const auto f = coradical_filtration(sw.coalg);
  EXPECT_EQ(dims(f), (std::vector<std::size_t>{2, 4}));
  // oracle: corad_0 of a pointed coalgebra is spanned by the grouplikes 1, g
  const Subspace c0 = Subspace::span(std::vector<SparseVec>{unit_vec(0), unit_vec(1)}, 4);
  EXPECT_EQ(f[0], c0);
  EXPECT_EQ(f[1], wedge(sw.coalg, c0, c0));

  EXPECT_EQ(dims(coradical_filtration(group_algebra({2}).coalg)),
            (std::vector<std::size_t>{2}));
  // the dual of a group algebra is a matrix-free commutative coalgebra
  EXPECT_EQ(dims(coradical_filtration(dual_hopf(sw).coalg)),
            (std::vector<std::size_t>{2, 4}));
}

TEST(Hopf, CoradicalFiltrationIsACoalgebraFiltration) {
  const HopfData sw = sweedler_by_hand();
  const auto f = coradical_filtration(sw.coalg);
  const std::size_t d = 4;
  for (std::size_t n = 0; n < f.size(); ++n) {
    std::vector<SparseVec> gens;
    for (std::size_t i = 0; i <= n; ++i)
      for (const auto &u : f[i].sparse_basis())
        for (const auto &v : f[n - i].sparse_basis()) {
          SparseVec t;
          for (const auto &[a, x] : u)
            for (const auto &[b, y] : v)
              axpy(t, a * d + b, x * y);
          gens.push_back(t);
        }
    const Subspace target = Subspace::span(gens, d * d);
    for (const auto &u : f[n].sparse_basis())
      EXPECT_TRUE(target.contains(sw.coalg.delta(u)));
  }
}

CocycleData bicharacter_on_group(const HopfData &kl, int n, int e12) {
  // sigma(g1^a g2^b, g1^c g2^d) = zeta^(e12 * a * d), Z/n x Z/n
  const std::size_t d = kl.dim();
  CocycleData s{Matrix(d, d), Matrix(d, d)};
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const long long a = i / n, dd = j % n;
      s.values(i, j) = Scalar::root_of_unity(n, e12 * a * dd);
      s.inverse_values(i, j) = Scalar::root_of_unity(n, -e12 * a * dd);
    }
  return s;
}

TEST(Hopf, CocycleTwists) {
  const HopfData sw = sweedler_by_hand();
  const auto trivial = CocycleData::trivial(sw);
  EXPECT_TRUE(verify_cocycle(sw, trivial).passed());
  EXPECT_EQ(cocycle_twist(sw, trivial).alg.mult, sw.alg.mult);

  const HopfData kl = group_algebra({3, 3});
  const auto beta = bicharacter_on_group(kl, 3, 1);
  EXPECT_TRUE(verify_cocycle(kl, beta).passed());
  const HopfData t = cocycle_twist(kl, beta);
  EXPECT_EQ(t.alg.mult, kl.alg.mult);
  EXPECT_EQ(*t.antipode, *kl.antipode);
}

TEST(Hopf, BrokenCocycleIsRejected) {
  const HopfData kl = group_algebra({3, 3});
  auto beta = bicharacter_on_group(kl, 3, 1);
  beta.values(4, 5) = Scalar(2);
  const auto r = verify_cocycle(kl, beta);
  EXPECT_FALSE(r.passed());
  try {
    (void)cocycle_twist(kl, beta);
    ADD_FAILURE();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidCocycle);
  }
}

TEST(Hopf, TwistThenInverseTwistRestoresMultiplication) {
  // a cocycle on H4 supported on grouplikes: sigma(g, g) = -1
  const HopfData sw = sweedler_by_hand();
  CocycleData s = CocycleData::trivial(sw);
  s.values(1, 1) = s.inverse_values(1, 1) = Scalar(-1);
  ASSERT_TRUE(verify_cocycle(sw, s).passed());
  const HopfData t = cocycle_twist(sw, s);
  EXPECT_TRUE(verify_hopf(t).passed());
  const HopfData back = cocycle_twist(t, s.inverse());
  EXPECT_EQ(back.alg.mult, sw.alg.mult);
  EXPECT_EQ(*back.antipode, *sw.antipode);
}

TEST(Hopf, SolvedAntipodeMatchesKnownOne) {
  const HopfData sw = sweedler_by_hand();
  EXPECT_EQ(solve_antipode(sw.alg, sw.coalg), sw.antipode);
}

TEST(Hopf, NormalSubalgebras) {
  const HopfData sw = sweedler_by_hand();
  const Subspace one = Subspace::span(std::vector<SparseVec>{unit_vec(0)}, 4);
  EXPECT_TRUE(is_normal_subalgebra(sw, one));
  EXPECT_TRUE(is_normal_subalgebra(sw, Subspace::full(4)));
  const Subspace kl = Subspace::span(std::vector<SparseVec>{unit_vec(0), unit_vec(1)}, 4);
  EXPECT_FALSE(is_normal_subalgebra(sw, kl));
  // ad(x)(g) = 2 xg
  EXPECT_EQ(adjoint_left(sw, unit_vec(2), unit_vec(1)),
            (SparseVec{{3, Scalar(2)}}));
  const Subspace not_sub = Subspace::span(std::vector<SparseVec>{unit_vec(0), unit_vec(2)}, 4);
  try {
    (void)is_normal_subalgebra(sw, not_sub);
    ADD_FAILURE();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidSubobject);
  }
}

TEST(Hopf, CocentralMaps) {
  const HopfData sw = sweedler_by_hand();
  const HopfData k = trivial_hopf();
  SparseMatrix eps(1, 4);
  for (std::size_t i = 0; i < 4; ++i)
    if (!sw.coalg.counit[i].is_zero())
      eps.col(i) = {{0, sw.coalg.counit[i]}};
  EXPECT_TRUE(is_cocentral_map(sw, k, eps));

  const HopfData kl = group_algebra({2});
  SparseMatrix pi(2, 4);
  pi.col(0) = unit_vec(0);
  pi.col(1) = unit_vec(1);
  EXPECT_FALSE(is_cocentral_map(sw, kl, pi));

  SparseMatrix bad(2, 4);
  bad.col(0) = unit_vec(0);
  bad.col(1) = unit_vec(0);
  bad.col(2) = unit_vec(1);
  try {
    (void)is_cocentral_map(sw, kl, bad);
    ADD_FAILURE();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidMorphism);
  }
}

TEST(Hopf, IdentityExtensionIsCleft) {
  const HopfData sw = sweedler_by_hand();
  const HopfData k = trivial_hopf();
  ComoduleAlgebra c{sw.alg, SparseMatrix::identity(4)}; // coaction into C (x) k
  SparseMatrix chi(4, 1);
  chi.col(0) = sw.alg.unit;
  const auto r = verify_cleaving_pair(SparseMatrix::identity(4), chi, sw.alg,
                                      SparseMatrix::identity(4), c, k);
  EXPECT_TRUE(r.passed());

  SparseMatrix wrong(4, 1);
  wrong.col(0) = unit_vec(2);
  EXPECT_FALSE(verify_cleaving_pair(SparseMatrix::identity(4), wrong, sw.alg,
                                    SparseMatrix::identity(4), c, k)
                   .passed());
  EXPECT_THROW((void)verify_cleaving_pair(SparseMatrix::identity(3), chi, sw.alg,
                                          SparseMatrix::identity(4), c, k),
               Error);
}

} // namespace
