#include "hflab/scalar.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using hflab::CycloScalar;
using hflab::Error;
using hflab::ErrorKind;

namespace {

using Complex = std::complex<long double>;

// Evaluates a stored value at zeta_N = exp(2 pi i / N) in floating point.
Complex evaluate(const CycloScalar &a) {
  const long double angle =
      2 * std::numbers::pi_v<long double> / a.conductor();
  Complex z(std::cos(angle), std::sin(angle));
  Complex acc = 0, p = 1;
  for (const auto &c : a.coeffs()) {
    acc += p * static_cast<long double>(c.get_d());
    p *= z;
  }
  return acc;
}

CycloScalar random_scalar(std::mt19937 &rng, int n) {
  std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
  hflab::detail::QPoly p(CycloScalar::degree_of(n));
  for (auto &c : p) {
    c = mpq_class(num(rng), den(rng));
    c.canonicalize();
  }
  return CycloScalar::from_poly(n, p);
}

bool close(Complex a, Complex b) { return std::abs(a - b) < 1e-9L; }

class FieldAxioms : public ::testing::TestWithParam<int> {};

TEST_P(FieldAxioms, RandomTriples) {
  const int n = GetParam();
  std::mt19937 rng(1234 + n);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = random_scalar(rng, n), b = random_scalar(rng, n),
               c = random_scalar(rng, n);
    ASSERT_EQ((a + b) + c, a + (b + c));
    ASSERT_EQ((a * b) * c, a * (b * c));
    ASSERT_EQ(a * b, b * a);
    ASSERT_EQ(a * (b + c), a * b + a * c);
    ASSERT_EQ(a - a, CycloScalar::zero(n));
    if (!a.is_zero()) {
      ASSERT_TRUE((a * a.inverse()).is_one()) << a;
    }
  }
}

// The complex embedding is a ring homomorphism; it is computed without any
// reduction modulo the cyclotomic polynomial.
TEST_P(FieldAxioms, ComplexEmbeddingOracle) {
  const int n = GetParam();
  std::mt19937 rng(99 + n);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_scalar(rng, n), b = random_scalar(rng, n);
    ASSERT_TRUE(close(evaluate(a * b), evaluate(a) * evaluate(b)));
    ASSERT_TRUE(close(evaluate(a + b), evaluate(a) + evaluate(b)));
    if (!b.is_zero()) {
      ASSERT_TRUE(close(evaluate(a / b), evaluate(a) / evaluate(b)));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Conductors, FieldAxioms,
                         ::testing::Values(1, 2, 3, 4, 6, 8, 12));

TEST(Scalar, RootsOfUnity) {
  EXPECT_EQ(CycloScalar::root_of_unity(4, 2), CycloScalar(-1));
  EXPECT_EQ(CycloScalar::root_of_unity(3, 1) + CycloScalar::root_of_unity(3, 2),
            CycloScalar(-1));
  EXPECT_EQ(CycloScalar::root_of_unity(6, 6), CycloScalar(1));
  EXPECT_EQ(CycloScalar::root_of_unity(5, -1), CycloScalar::root_of_unity(5, 4));
  EXPECT_EQ(CycloScalar::root_of_unity(2, 1), CycloScalar(-1));
}

TEST(Scalar, CanonicalVectorLength) {
  EXPECT_EQ(CycloScalar::zero(12).degree(), 4u);
  EXPECT_EQ(CycloScalar::root_of_unity(7, 3).degree(), 6u);
  EXPECT_EQ(CycloScalar::zero(1).degree(), 1u);
}

TEST(Scalar, Norms) {
  const auto i = CycloScalar::root_of_unity(4, 1);
  EXPECT_EQ((CycloScalar(1) + i).norm(), 2);
  EXPECT_EQ(CycloScalar::rational(3, 4).norm(), 9);
  // 1 - zeta_p has norm p
  EXPECT_EQ((CycloScalar(1) - CycloScalar::root_of_unity(5, 1)).norm(), 5);
  EXPECT_EQ(CycloScalar::root_of_unity(12, 5).norm(), 1);
}

TEST(Scalar, MultiplicativeOrder) {
  EXPECT_EQ(hflab::multiplicative_order(CycloScalar::root_of_unity(6, 1)), 6);
  EXPECT_EQ(hflab::multiplicative_order(CycloScalar::root_of_unity(6, 2)), 3);
  EXPECT_EQ(hflab::multiplicative_order(CycloScalar(-1)), 2);
  EXPECT_EQ(hflab::multiplicative_order(-CycloScalar::root_of_unity(3, 1)), 6);
  EXPECT_EQ(hflab::multiplicative_order(CycloScalar(2)), std::nullopt);
  EXPECT_THROW((void)hflab::multiplicative_order(CycloScalar()), Error);
}

TEST(Scalar, TextRoundTrip) {
  std::mt19937 rng(7);
  for (int n : {1, 3, 4, 8, 12}) {
    for (int k = 0; k < 50; ++k) {
      const auto a = random_scalar(rng, n);
      EXPECT_EQ(CycloScalar::parse(a.str(), n), a) << a;
    }
  }
  EXPECT_EQ(CycloScalar::parse("1/2 + 1/2*z", 4).str(), "1/2 + 1/2*z");
  EXPECT_EQ(CycloScalar::parse("z^4", 4), CycloScalar(1));
  EXPECT_EQ(CycloScalar::root_of_unity(8, 3).str(), "z^3");
  EXPECT_EQ((-CycloScalar::root_of_unity(8, 3)).str(), "-z^3");
}

TEST(Scalar, ParseErrors) {
  for (const char *bad : {"", "1/0", "z^", "2**z", "1 2", "x", "3/"}) {
    try {
      (void)CycloScalar::parse(bad, 4);
      ADD_FAILURE() << "accepted \"" << bad << "\"";
    } catch (const Error &e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidScalar) << bad;
    }
  }
}

TEST(Scalar, ConductorRules) {
  const auto a = CycloScalar::root_of_unity(3, 1);
  const auto b = CycloScalar::root_of_unity(4, 1);
  try {
    (void)(a + b);
    ADD_FAILURE();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConductorMismatch);
  }
  // rationals mix with anything
  EXPECT_EQ((a + CycloScalar(1)).conductor(), 3);
  EXPECT_EQ((CycloScalar(mpq_class(1, 2)) * b).conductor(), 4);
  // Q(zeta_2) = Q as well
  EXPECT_EQ((CycloScalar::rational(3, 2) * b).conductor(), 4);
  EXPECT_EQ(CycloScalar::rational(3, 2), CycloScalar(3));
  EXPECT_NE(a, b);
}

TEST(Scalar, EmbedRestrict) {
  std::mt19937 rng(11);
  for (int k = 0; k < 30; ++k) {
    const auto a = random_scalar(rng, 3);
    const auto up = a.embed(12);
    EXPECT_EQ(up.conductor(), 12);
    EXPECT_TRUE(close(evaluate(up), evaluate(a)));
    EXPECT_EQ(up.restrict_to(3), a);
  }
  EXPECT_EQ(CycloScalar::root_of_unity(4, 1).embed(8),
            CycloScalar::root_of_unity(8, 2));
  EXPECT_THROW((void)CycloScalar::root_of_unity(12, 1).restrict_to(3), Error);
  EXPECT_THROW((void)CycloScalar::root_of_unity(3, 1).embed(4), Error);
}

TEST(Scalar, DivisionByZero) {
  try {
    (void)CycloScalar::zero(5).inverse();
    ADD_FAILURE();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidScalar);
  }
}

TEST(Scalar, PowNegative) {
  const auto z = CycloScalar::root_of_unity(7, 1);
  EXPECT_EQ(z.pow(-1), CycloScalar::root_of_unity(7, 6));
  EXPECT_EQ(CycloScalar(2).pow(-3), CycloScalar(mpq_class(1, 8)));
}

} // namespace
