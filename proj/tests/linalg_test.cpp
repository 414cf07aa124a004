#include "hflab/linalg.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace hflab;

namespace {

Matrix random_matrix(std::mt19937 &rng, std::size_t r, std::size_t c, int n,
                     int sparsity = 2) {
  std::uniform_int_distribution<int> val(-3, 3), pick(0, sparsity),
      expo(0, std::max(0, n - 1));
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      if (pick(rng) == 0)
        m(i, j) = Scalar(val(rng)) * Scalar::root_of_unity(n, expo(rng));
  return m;
}

// Rank over Q by plain fraction elimination, written independently of
// reduce_rows.
std::size_t oracle_rank(std::vector<std::vector<mpq_class>> a) {
  std::size_t rank = 0;
  const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  for (std::size_t c = 0; c < cols; ++c) {
    std::size_t p = rank;
    while (p < rows && a[p][c] == 0)
      ++p;
    if (p == rows)
      continue;
    std::swap(a[p], a[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      mpq_class f = a[r][c] / a[rank][c];
      for (std::size_t k = c; k < cols; ++k)
        a[r][k] -= f * a[rank][k];
    }
    ++rank;
  }
  return rank;
}

TEST(Linalg, RankMatchesOracleOverQ) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 1 + rng() % 7, c = 1 + rng() % 7;
    Matrix m = random_matrix(rng, r, c, 1, 1);
    std::vector<std::vector<mpq_class>> q(r, std::vector<mpq_class>(c));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        q[i][j] = m(i, j).rational_value();
    EXPECT_EQ(rank(m), oracle_rank(q));
  }
}

TEST(Linalg, KernelIsAnnihilatedAndRankNullity) {
  std::mt19937 rng(6);
  for (int n : {1, 3, 4}) {
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
      Matrix m = random_matrix(rng, r, c, n);
      Subspace k = kernel(m);
      EXPECT_EQ(k.dim() + rank(m), c);
      for (std::size_t i = 0; i < k.dim(); ++i) {
        Vec v = m.apply(k.basis_vector(i));
        for (const auto &x : v)
          EXPECT_TRUE(x.is_zero());
      }
    }
  }
}

TEST(Linalg, EchelonFormIgnoresRowOrder) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    Matrix m = random_matrix(rng, 5, 6, 4);
    std::vector<std::size_t> perm(5);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix p(5, 6);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 6; ++j)
        p(i, j) = m(perm[i], j);
    EXPECT_EQ(Subspace::span(m), Subspace::span(p));
  }
}

TEST(Linalg, SumIntersectionDimensionFormula) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    Subspace a = Subspace::span(random_matrix(rng, 3, 6, 3));
    Subspace b = Subspace::span(random_matrix(rng, 4, 6, 3));
    Subspace s = sum(a, b), i = intersect(a, b);
    EXPECT_EQ(s.dim() + i.dim(), a.dim() + b.dim());
    EXPECT_TRUE(s.contains(a));
    EXPECT_TRUE(a.contains(i));
    EXPECT_TRUE(b.contains(i));
  }
}

TEST(Linalg, AnnihilatorIsInvolutive) {
  std::mt19937 rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    Subspace a = Subspace::span(random_matrix(rng, 3, 5, 4));
    EXPECT_EQ(annihilator(annihilator(a)), a);
    EXPECT_EQ(annihilator(a).dim() + a.dim(), 5u);
  }
  EXPECT_TRUE(annihilator(Subspace::zero(3)).is_full());
}

TEST(Linalg, PreimageRoundTrip) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix m = random_matrix(rng, 5, 4, 3);
    Subspace w = Subspace::span(random_matrix(rng, 2, 5, 3));
    Subspace pre = preimage(m, w);
    EXPECT_TRUE(pre.contains(kernel(m)));
    for (std::size_t i = 0; i < pre.dim(); ++i)
      EXPECT_TRUE(w.contains(m.apply(pre.basis_vector(i))));
    // anything mapping into w is caught: test the images of random vectors
    Subspace img_in_w = intersect(image(m), w);
    Subspace img_pre = Subspace::span(
        (m * pre.basis().transpose()).transpose());
    EXPECT_EQ(img_pre, img_in_w);
  }
  EXPECT_THROW((void)preimage(Matrix(3, 2), Subspace::zero(4)), Error);
}

TEST(Linalg, SubspaceMembership) {
  Subspace s = Subspace::span(std::vector<Vec>{{1, 1, 0}, {0, 1, 1}}, 3);
  EXPECT_TRUE(s.contains(Vec{1, 0, -1}));
  EXPECT_FALSE(s.contains(Vec{1, 0, 0}));
  EXPECT_EQ(s.pivots(), (std::vector<std::size_t>{0, 1}));
  EXPECT_THROW((void)s.contains(Vec{1, 0}), Error);
}

TEST(Linalg, SparseMatrixAlgebra) {
  std::mt19937 rng(13);
  Matrix a = random_matrix(rng, 4, 3, 4), b = random_matrix(rng, 3, 5, 4);
  auto sa = SparseMatrix::from_dense(a), sb = SparseMatrix::from_dense(b);
  EXPECT_EQ((sa * sb).dense(), a * b);
  EXPECT_EQ(sa.transpose().dense(), a.transpose());
  EXPECT_EQ(SparseMatrix::identity(3) * sb, sb);
}

TEST(Linalg, TensorAndFlip) {
  // f = [[1,2],[0,1]], g = diag(3, 5) on a 2 x 2 tensor
  SparseMatrix f(2, 2), g(2, 2);
  f.col(0) = {{0, Scalar(1)}};
  f.col(1) = {{0, Scalar(2)}, {1, Scalar(1)}};
  g.col(0) = {{0, Scalar(3)}};
  g.col(1) = {{1, Scalar(5)}};
  // e1 (x) e0 -> (2 e0 + e1) (x) 3 e0
  SparseVec v = apply_tensor(f, g, unit_vec(2));
  EXPECT_EQ(v, (SparseVec{{0, Scalar(6)}, {2, Scalar(3)}}));
  SparseVec w{{1, Scalar(7)}}; // e0 (x) e1 in 2 x 3
  EXPECT_EQ(flip(w, 2, 3), (SparseVec{{2, Scalar(7)}}));
}

} // namespace
