#pragma once

// Exact arithmetic in the cyclotomic field Q(zeta_N).
//
// A value is a polynomial in z = zeta_N with rational coefficients, kept
// reduced modulo the N-th cyclotomic polynomial. The stored coefficient vector
// always has length deg Phi_N, so equal field elements have equal vectors.

#include "hflab/errors.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hflab {

namespace detail {

inline constexpr int kMaxConductor = 360;

using IntPoly = std::vector<long>;

// Phi_n for 1 <= n <= kMaxConductor, coefficients from low to high degree.
inline const std::vector<IntPoly> &cyclotomic_table() {
  static const std::vector<IntPoly> table = [] {
    std::vector<IntPoly> t(kMaxConductor + 1);
    for (int n = 1; n <= kMaxConductor; ++n) {
      IntPoly num(n + 1, 0);
      num[0] = -1;
      num[n] = 1;
      for (int d = 1; d < n; ++d) {
        if (n % d != 0)
          continue;
        const IntPoly &den = t[d];
        // exact division by a monic polynomial
        const std::size_t dd = den.size() - 1;
        IntPoly quot(num.size() - dd, 0);
        for (std::size_t k = num.size(); k-- > dd;) {
          long c = num[k];
          quot[k - dd] = c;
          if (c == 0)
            continue;
          for (std::size_t j = 0; j <= dd; ++j)
            num[k - dd + j] -= c * den[j];
        }
        num = std::move(quot);
      }
      t[n] = std::move(num);
    }
    return t;
  }();
  return table;
}

inline const IntPoly &cyclotomic_poly(int n) {
  if (n < 1 || n > kMaxConductor)
    fail(ErrorKind::ConductorMismatch,
         "conductor " + std::to_string(n) + " outside supported range [1, " +
             std::to_string(kMaxConductor) + "]");
  return cyclotomic_table()[n];
}

using QPoly = std::vector<mpq_class>;

inline void trim(QPoly &p) {
  while (!p.empty() && sgn(p.back()) == 0)
    p.pop_back();
}

// Returns (quotient, remainder) of a / b over Q; b must be nonzero and trimmed.
inline std::pair<QPoly, QPoly> divmod(QPoly a, const QPoly &b) {
  trim(a);
  if (a.size() < b.size())
    return {QPoly{}, a};
  QPoly q(a.size() - b.size() + 1);
  const mpq_class lead = b.back();
  for (std::size_t k = a.size(); k-- >= b.size();) {
    if (sgn(a[k]) == 0)
      continue;
    mpq_class c = a[k] / lead;
    q[k - (b.size() - 1)] = c;
    for (std::size_t j = 0; j < b.size(); ++j)
      a[k - (b.size() - 1) + j] -= c * b[j];
  }
  trim(a);
  trim(q);
  return {q, a};
}

inline QPoly poly_mul(const QPoly &a, const QPoly &b) {
  if (a.empty() || b.empty())
    return {};
  QPoly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (sgn(a[i]) == 0)
      continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      r[i + j] += a[i] * b[j];
  }
  trim(r);
  return r;
}

inline QPoly poly_sub(const QPoly &a, const QPoly &b) {
  QPoly r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i)
    r[i] -= b[i];
  trim(r);
  return r;
}

// Determinant of a square rational matrix by fraction-exact elimination.
inline mpq_class rational_det(std::vector<std::vector<mpq_class>> m) {
  const std::size_t n = m.size();
  mpq_class det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && sgn(m[p][c]) == 0)
      ++p;
    if (p == n)
      return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (sgn(m[r][c]) == 0)
        continue;
      mpq_class f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k)
        m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

inline long long mod_floor(long long a, long long n) {
  long long r = a % n;
  return r < 0 ? r + n : r;
}

} // namespace detail

class CycloScalar {
public:
  /// Zero in Q.
  CycloScalar() : conductor_(1), c_(1) {}

  CycloScalar(long long v) : conductor_(1), c_(1) { c_[0] = static_cast<long>(v); }  // NOLINT
  CycloScalar(int v) : CycloScalar(static_cast<long long>(v)) {} // NOLINT
  CycloScalar(const mpq_class &q) : conductor_(1), c_(1) {       // NOLINT
    c_[0] = q;
    c_[0].canonicalize();
  }

  static CycloScalar rational(const mpq_class &q, int conductor) {
    CycloScalar r = zero(conductor);
    r.c_[0] = q;
    r.c_[0].canonicalize();
    return r;
  }

  static CycloScalar zero(int conductor) {
    CycloScalar r;
    r.conductor_ = conductor;
    r.c_.assign(degree_of(conductor), mpq_class(0));
    return r;
  }

  static CycloScalar one(int conductor) { return rational(1, conductor); }

  /// zeta_N^k for any integer k.
  static CycloScalar root_of_unity(int conductor, long long k) {
    detail::QPoly p(conductor);
    p[detail::mod_floor(k, conductor)] = 1;
    return from_poly(conductor, std::move(p));
  }

  /// Reduces an arbitrary polynomial in zeta_N to canonical form.
  static CycloScalar from_poly(int conductor, detail::QPoly p) {
    const auto &phi = detail::cyclotomic_poly(conductor);
    const std::size_t d = phi.size() - 1;
    // fold with zeta^N = 1 first so huge exponents stay cheap
    if (p.size() > static_cast<std::size_t>(conductor)) {
      detail::QPoly folded(conductor);
      for (std::size_t k = 0; k < p.size(); ++k)
        folded[k % conductor] += p[k];
      p = std::move(folded);
    }
    reduce_in_place(p, phi);
    CycloScalar r;
    r.conductor_ = conductor;
    p.resize(d);
    for (auto &c : p)
      c.canonicalize();
    r.c_ = std::move(p);
    return r;
  }

  int conductor() const noexcept { return conductor_; }
  /// deg Phi_N, the length of the canonical coefficient vector.
  std::size_t degree() const noexcept { return c_.size(); }
  const std::vector<mpq_class> &coeffs() const noexcept { return c_; }

  bool is_zero() const noexcept {
    return std::all_of(c_.begin(), c_.end(),
                       [](const mpq_class &q) { return sgn(q) == 0; });
  }
  bool is_rational() const noexcept {
    return std::all_of(c_.begin() + 1, c_.end(),
                       [](const mpq_class &q) { return sgn(q) == 0; });
  }
  bool is_one() const noexcept { return is_rational() && c_[0] == 1; }
  mpq_class rational_value() const {
    if (!is_rational())
      fail(ErrorKind::InvalidScalar, "value " + str() + " is not rational");
    return c_[0];
  }

  /// Image under Q(zeta_N) -> Q(zeta_M), zeta_N -> zeta_M^(M/N).
  CycloScalar embed(int target) const {
    if (target <= 0 || target % conductor_ != 0)
      fail(ErrorKind::ConductorMismatch,
           "cannot embed conductor " + std::to_string(conductor_) + " into " +
               std::to_string(target));
    if (target == conductor_)
      return *this;
    const int step = target / conductor_;
    detail::QPoly p(static_cast<std::size_t>(step) * c_.size());
    for (std::size_t k = 0; k < c_.size(); ++k)
      p[k * step] = c_[k];
    return from_poly(target, std::move(p));
  }

  /// Inverse of embed: expresses this value over the smaller conductor
  /// `target` (which must divide the current one). Fails with
  /// ConductorMismatch if the value does not lie in that subfield.
  CycloScalar restrict_to(int target) const {
    if (target <= 0 || conductor_ % target != 0)
      fail(ErrorKind::ConductorMismatch,
           "conductor " + std::to_string(target) + " does not divide " +
               std::to_string(conductor_));
    if (target == conductor_)
      return *this;
    const std::size_t dt = degree_of(target);
    const std::size_t d = c_.size();
    // columns: images of zeta_target^j; augmented with this value
    std::vector<std::vector<mpq_class>> m(d,
                                          std::vector<mpq_class>(dt + 1));
    for (std::size_t j = 0; j < dt; ++j) {
      auto img = root_of_unity(target, static_cast<long long>(j)).embed(conductor_);
      for (std::size_t r = 0; r < d; ++r)
        m[r][j] = img.c_[r];
    }
    for (std::size_t r = 0; r < d; ++r)
      m[r][dt] = c_[r];
    // row reduce
    std::size_t row = 0;
    std::vector<std::size_t> piv;
    for (std::size_t col = 0; col < dt && row < d; ++col) {
      std::size_t p = row;
      while (p < d && sgn(m[p][col]) == 0)
        ++p;
      if (p == d)
        continue;
      std::swap(m[p], m[row]);
      mpq_class inv = 1 / m[row][col];
      for (auto &v : m[row])
        v *= inv;
      for (std::size_t r = 0; r < d; ++r) {
        if (r == row || sgn(m[r][col]) == 0)
          continue;
        mpq_class f = m[r][col];
        for (std::size_t k = 0; k <= dt; ++k)
          m[r][k] -= f * m[row][k];
      }
      piv.push_back(col);
      ++row;
    }
    for (std::size_t r = row; r < d; ++r)
      if (sgn(m[r][dt]) != 0)
        fail(ErrorKind::ConductorMismatch,
             str() + " does not lie in Q(zeta_" + std::to_string(target) + ")");
    detail::QPoly out(dt);
    for (std::size_t r = 0; r < row; ++r)
      out[piv[r]] = m[r][dt];
    return from_poly(target, std::move(out));
  }

  CycloScalar operator-() const {
    CycloScalar r = *this;
    for (auto &c : r.c_)
      c = -c;
    return r;
  }

  CycloScalar &operator+=(const CycloScalar &o) {
    if (o.conductor_ != conductor_)
      return *this = *this + o;
    for (std::size_t k = 0; k < c_.size(); ++k)
      c_[k] += o.c_[k];
    return *this;
  }
  CycloScalar &operator-=(const CycloScalar &o) {
    if (o.conductor_ != conductor_)
      return *this = *this - o;
    for (std::size_t k = 0; k < c_.size(); ++k)
      c_[k] -= o.c_[k];
    return *this;
  }
  CycloScalar &operator*=(const CycloScalar &o) { return *this = *this * o; }
  CycloScalar &operator/=(const CycloScalar &o) { return *this = *this / o; }

  friend CycloScalar operator+(const CycloScalar &a, const CycloScalar &b) {
    auto [x, y] = common(a, b);
    for (std::size_t k = 0; k < x.c_.size(); ++k)
      x.c_[k] += y.c_[k];
    return x;
  }
  friend CycloScalar operator-(const CycloScalar &a, const CycloScalar &b) {
    auto [x, y] = common(a, b);
    for (std::size_t k = 0; k < x.c_.size(); ++k)
      x.c_[k] -= y.c_[k];
    return x;
  }
  friend CycloScalar operator*(const CycloScalar &a, const CycloScalar &b) {
    if (a.c_.size() == 1 && b.c_.size() == 1) {
      CycloScalar r;
      r.conductor_ = std::max(a.conductor_, b.conductor_);
      r.c_[0] = a.c_[0] * b.c_[0];
      return r;
    }
    if (a.is_rational() || b.is_rational()) {
      auto [x, y] = common(a, b);
      const bool xr = x.is_rational();
      const mpq_class f = xr ? x.c_[0] : y.c_[0];
      CycloScalar r = xr ? std::move(y) : std::move(x);
      for (auto &c : r.c_)
        c *= f;
      return r;
    }
    auto [x, y] = common(a, b);
    detail::QPoly p(2 * x.c_.size() - 1);
    for (std::size_t i = 0; i < x.c_.size(); ++i) {
      if (sgn(x.c_[i]) == 0)
        continue;
      for (std::size_t j = 0; j < y.c_.size(); ++j)
        if (sgn(y.c_[j]) != 0)
          p[i + j] += x.c_[i] * y.c_[j];
    }
    reduce_in_place(p, detail::cyclotomic_poly(x.conductor_));
    p.resize(x.c_.size());
    x.c_ = std::move(p);
    return x;
  }
  friend CycloScalar operator/(const CycloScalar &a, const CycloScalar &b) {
    return a * b.inverse();
  }

  CycloScalar inverse() const {
    if (is_zero())
      fail(ErrorKind::InvalidScalar, "division by zero");
    if (is_rational()) {
      CycloScalar r = *this;
      r.c_[0] = 1 / c_[0];
      return r;
    }
    // extended Euclid: find u with a*u = 1 mod Phi_N
    detail::QPoly phi;
    for (long v : detail::cyclotomic_poly(conductor_))
      phi.emplace_back(v);
    detail::QPoly r0 = phi, r1 = c_;
    detail::trim(r1);
    detail::QPoly s0{}, s1{mpq_class(1)};
    while (!r1.empty()) {
      auto [q, r] = detail::divmod(r0, r1);
      detail::QPoly s = detail::poly_sub(s0, detail::poly_mul(q, s1));
      r0 = std::move(r1);
      r1 = std::move(r);
      s0 = std::move(s1);
      s1 = std::move(s);
    }
    // r0 is a nonzero constant since Phi_N is irreducible
    if (r0.size() != 1)
      fail(ErrorKind::InternalInconsistency, "non-unit gcd with Phi_N");
    for (auto &c : s0)
      c /= r0[0];
    return from_poly(conductor_, std::move(s0));
  }

  CycloScalar pow(long long e) const {
    if (e < 0)
      return inverse().pow(-e);
    CycloScalar base = *this;
    CycloScalar acc = one(conductor_);
    while (e > 0) {
      if (e & 1)
        acc *= base;
      e >>= 1;
      if (e)
        base *= base;
    }
    return acc;
  }

  /// Field norm N_{Q(zeta_N)/Q}, the determinant of multiplication by this
  /// value on the power basis.
  mpq_class norm() const {
    const std::size_t d = c_.size();
    if (d == 1)
      return c_[0];
    std::vector<std::vector<mpq_class>> m(d, std::vector<mpq_class>(d));
    for (std::size_t j = 0; j < d; ++j) {
      CycloScalar col = *this * root_of_unity(conductor_, static_cast<long long>(j));
      for (std::size_t r = 0; r < d; ++r)
        m[r][j] = col.c_[r];
    }
    return detail::rational_det(std::move(m));
  }

  friend bool operator==(const CycloScalar &a, const CycloScalar &b) {
    if (a.conductor_ == b.conductor_)
      return a.c_ == b.c_;
    if (a.c_.size() == 1 || b.c_.size() == 1)
      return a.is_rational() && b.is_rational() && a.c_[0] == b.c_[0];
    return false;
  }
  friend bool operator!=(const CycloScalar &a, const CycloScalar &b) {
    return !(a == b);
  }

  /// Canonical text form, e.g. "1/2 + 1/2*z" or "-z^3". Conductor-free:
  /// rationals print the same in every Q(zeta_N).
  std::string str() const {
    std::string out;
    for (std::size_t k = 0; k < c_.size(); ++k) {
      const mpq_class &c = c_[k];
      if (sgn(c) == 0)
        continue;
      const bool neg = sgn(c) < 0;
      mpq_class mag = abs(c);
      std::string term;
      if (k == 0) {
        term = mag.get_str();
      } else {
        if (mag != 1)
          term = mag.get_str() + "*";
        term += "z";
        if (k > 1)
          term += "^" + std::to_string(k);
      }
      if (out.empty())
        out = neg ? "-" + term : term;
      else
        out += (neg ? " - " : " + ") + term;
    }
    return out.empty() ? "0" : out;
  }

  /// Parses "c0 + c1*z + c2*z^3 - z^5" with rational coefficients "p/q".
  static CycloScalar parse(std::string_view text, int conductor) {
    std::string s;
    bool gap = false;
    for (char ch : text) {
      if (std::isspace(static_cast<unsigned char>(ch))) {
        gap = !s.empty();
        continue;
      }
      if (gap && std::isalnum(static_cast<unsigned char>(ch)) &&
          std::isalnum(static_cast<unsigned char>(s.back())))
        fail(ErrorKind::InvalidScalar,
             "cannot parse scalar \"" + std::string(text) +
                 "\": juxtaposed terms");
      gap = false;
      s.push_back(ch);
    }
    if (s.empty())
      fail(ErrorKind::InvalidScalar, "empty scalar string");
    detail::QPoly poly;
    std::size_t i = 0;
    auto bad = [&](const std::string &why) {
      fail(ErrorKind::InvalidScalar,
           "cannot parse scalar \"" + std::string(text) + "\": " + why);
    };
    auto read_uint = [&](std::string &digits) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
        digits.push_back(s[i++]);
    };
    bool first = true;
    while (i < s.size()) {
      int sign = 1;
      if (s[i] == '+' || s[i] == '-') {
        sign = s[i] == '-' ? -1 : 1;
        ++i;
      } else if (!first) {
        bad("expected '+' or '-'");
      }
      first = false;
      mpq_class coef = 1;
      bool have_coef = false;
      if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        std::string num, den;
        read_uint(num);
        if (i < s.size() && s[i] == '/') {
          ++i;
          read_uint(den);
          if (den.empty())
            bad("missing denominator");
        }
        mpz_class n(num), q(den.empty() ? "1" : den);
        if (q == 0)
          bad("zero denominator");
        coef = mpq_class(n, q);
        coef.canonicalize();
        have_coef = true;
        if (i < s.size() && s[i] == '*') {
          ++i;
          if (i >= s.size() || s[i] != 'z')
            bad("expected 'z' after '*'");
        }
      }
      std::size_t power = 0;
      if (i < s.size() && s[i] == 'z') {
        ++i;
        power = 1;
        if (i < s.size() && s[i] == '^') {
          ++i;
          std::string e;
          read_uint(e);
          if (e.empty())
            bad("missing exponent");
          power = std::stoul(e);
        }
      } else if (!have_coef) {
        bad("expected coefficient or 'z'");
      }
      if (poly.size() <= power)
        poly.resize(power + 1);
      poly[power] += sign * coef;
    }
    return from_poly(conductor, std::move(poly));
  }

  friend std::ostream &operator<<(std::ostream &os, const CycloScalar &a) {
    return os << a.str();
  }

  static std::size_t degree_of(int conductor) {
    return detail::cyclotomic_poly(conductor).size() - 1;
  }

private:
  static void reduce_in_place(detail::QPoly &p, const detail::IntPoly &phi) {
    const std::size_t d = phi.size() - 1;
    for (std::size_t k = p.size(); k-- > d;) {
      if (sgn(p[k]) == 0)
        continue;
      mpq_class c = p[k];
      for (std::size_t j = 0; j <= d; ++j)
        if (phi[j] != 0)
          p[k - d + j] -= c * phi[j];
    }
  }

  [[noreturn]] static void mismatch(const CycloScalar &a,
                                    const CycloScalar &b) {
    fail(ErrorKind::ConductorMismatch,
         "conductors " + std::to_string(a.conductor_) + " and " +
             std::to_string(b.conductor_) + " differ");
  }

  // Values of Q = Q(zeta_1) = Q(zeta_2) are promoted into the other operand's
  // field; any other disagreement is an error.
  static std::pair<CycloScalar, CycloScalar> common(const CycloScalar &a,
                                                    const CycloScalar &b) {
    if (a.conductor_ == b.conductor_)
      return {a, b};
    if (a.c_.size() == 1 && a.conductor_ < b.conductor_)
      return {rational(a.c_[0], b.conductor_), b};
    if (b.c_.size() == 1)
      return {a, rational(b.c_[0], a.conductor_)};
    if (a.c_.size() == 1)
      return {rational(a.c_[0], b.conductor_), b};
    mismatch(a, b);
  }

  int conductor_;
  std::vector<mpq_class> c_;
};

/// Least n with a^n = 1, or nullopt if a is not a root of unity. Every root
/// of unity in Q(zeta_N) has order dividing lcm(2, N).
inline std::optional<long long> multiplicative_order(const CycloScalar &a) {
  if (a.is_zero())
    fail(ErrorKind::InvalidScalar, "order of zero");
  const long long n = a.conductor();
  const long long bound = std::lcm(2LL, n);
  for (long long k = 1; k <= bound; ++k) {
    if (bound % k != 0)
      continue;
    if (a.pow(k).is_one())
      return k;
  }
  return std::nullopt;
}

} // namespace hflab

template <> struct std::hash<hflab::CycloScalar> {
  std::size_t operator()(const hflab::CycloScalar &a) const {
    return std::hash<std::string>{}(a.str());
  }
};
