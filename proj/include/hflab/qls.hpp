#pragma once

// Quantum linear spaces H = B # k Lambda with central Hopf subalgebra A
// generated by x_i^{N_i} and g_i^{+-N_i}. Characters of A form B^theta
// (B the Borel subgroup of SL2); each character kappa gives a fiber H_kappa
// of dimension prod N_i^2, and the fibers are tied together by the system
// maps Delta_{kappa,gamma} and S_kappa.

#include "hflab/errors.hpp"
#include "hflab/hopf.hpp"
#include "hflab/linalg.hpp"
#include "hflab/report.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hflab {

struct QLSDatum {
  int theta = 0;
  int conductor = 1;
  std::vector<std::vector<long long>> exponents;
  bool group_only = false;

  Scalar q(int i, int j) const {
    return Scalar::root_of_unity(conductor, exponents.at(i).at(j));
  }

  /// N_i: order of q_ii.
  int order(int i) const {
    return static_cast<int>(*multiplicative_order(q(i, i)));
  }

  /// M_i: lcm over j of the order of q_ij.
  int centrality_order(int i) const {
    long long m = 1;
    for (int j = 0; j < theta; ++j)
      m = std::lcm(m, *multiplicative_order(q(i, j)));
    return static_cast<int>(m);
  }

  friend bool operator==(const QLSDatum &, const QLSDatum &) = default;
};

/// Datum checks. The exponent grid must be square (ShapeError otherwise);
/// everything else is reported.
inline CheckReport validate_datum(const QLSDatum &d) {
  if (d.theta < 0 || static_cast<int>(d.exponents.size()) != d.theta)
    fail(ErrorKind::ShapeError, "exponent grid must have theta rows");
  for (const auto &row : d.exponents)
    if (static_cast<int>(row.size()) != d.theta)
      fail(ErrorKind::ShapeError, "exponent grid must be square");
  if (d.conductor < 1)
    fail(ErrorKind::InvalidDatum, "conductor must be positive");
  CheckReport r("validate");
  std::string witness;
  for (int i = 0; i < d.theta && witness.empty(); ++i)
    for (int j = i + 1; j < d.theta && witness.empty(); ++j)
      if ((d.exponents[i][j] + d.exponents[j][i]) % d.conductor != 0)
        witness = "q" + std::to_string(i + 1) + std::to_string(j + 1) + " q" +
                  std::to_string(j + 1) + std::to_string(i + 1) + " != 1";
  r.add("skew_symmetry", witness.empty(), witness);

  auto &orders = r.evidence()["orders"] = nlohmann::json::array();
  witness.clear();
  std::string centrality;
  for (int i = 0; i < d.theta; ++i) {
    const int n = d.order(i), m = d.centrality_order(i);
    orders.push_back({{"N", n}, {"M", m}});
    if (!d.group_only && n <= 1 && witness.empty())
      witness = "N" + std::to_string(i + 1) + " = " + std::to_string(n);
    if (n != m && centrality.empty()) {
      int j = 0;
      while (j < d.theta &&
             n % *multiplicative_order(d.q(i, j)) == 0)
        ++j;
      centrality = "N" + std::to_string(i + 1) + " = " + std::to_string(n) +
                   " but M" + std::to_string(i + 1) + " = " +
                   std::to_string(m) + " (pair " + std::to_string(i + 1) +
                   "," + std::to_string(j + 1) + ")";
    }
  }
  if (!d.group_only)
    r.add("nontrivial_orders", witness.empty(), witness);
  r.add("centrality", centrality.empty(), centrality);
  return r;
}

/// A character of A, i.e. an element of B^theta: t_i = kappa(g_i^{N_i}),
/// s_i = kappa(x_i^{N_i}).
struct Character {
  std::vector<Scalar> t, s;

  std::size_t rank() const noexcept { return t.size(); }

  static Character identity(std::size_t theta) {
    return {std::vector<Scalar>(theta, Scalar(1)),
            std::vector<Scalar>(theta, Scalar(0))};
  }

  bool is_identity() const {
    for (std::size_t i = 0; i < t.size(); ++i)
      if (!t[i].is_one() || !s[i].is_zero())
        return false;
    return true;
  }

  /// Canonical text used for hashing and caching.
  std::string key() const {
    std::string k;
    for (std::size_t i = 0; i < t.size(); ++i)
      k += "(" + t[i].str() + "," + s[i].str() + ")";
    return k;
  }

  friend bool operator==(const Character &a, const Character &b) {
    return a.t == b.t && a.s == b.s;
  }
};

namespace detail {

inline void check_compatible(const Character &a, const Character &b) {
  if (a.t.size() != b.t.size() || a.s.size() != b.s.size() ||
      a.t.size() != a.s.size())
    fail(ErrorKind::DatumMismatch, "characters belong to different data");
}

} // namespace detail

/// (t, s)(t', s') = (t t', s + t s') in each factor.
inline Character char_mul(const Character &a, const Character &b) {
  detail::check_compatible(a, b);
  Character c;
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    c.t.push_back(a.t[i] * b.t[i]);
    c.s.push_back(a.s[i] + a.t[i] * b.s[i]);
  }
  return c;
}

inline Character char_inv(const Character &a) {
  detail::check_compatible(a, a);
  Character c;
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    if (a.t[i].is_zero())
      fail(ErrorKind::InvalidScalar, "character with t = 0");
    const Scalar ti = a.t[i].inverse();
    c.t.push_back(ti);
    c.s.push_back(-(ti * a.s[i]));
  }
  return c;
}

inline Character char_identity(const QLSDatum &d) {
  return Character::identity(static_cast<std::size_t>(d.theta));
}

inline Character char_pow(const Character &a, long long n) {
  Character base = n < 0 ? char_inv(a) : a;
  Character acc = Character::identity(a.rank());
  for (long long k = n < 0 ? -n : n; k > 0; --k)
    acc = char_mul(acc, base);
  return acc;
}

/// Exponent vector (a_1..a_theta, b_1..b_theta) of x^a g^b.
using Monomial = std::vector<long long>;

/// Sparse linear combination of normal-form monomials.
using PBWElement = std::map<Monomial, Scalar>;

enum class Gen { X, G };

struct Letter {
  Gen gen;
  int index;
  long long exponent = 1;
};

/// A fiber H_kappa as an algebra on its monomial basis.
struct Fiber {
  Character kappa;
  std::vector<std::string> labels;
  Algebra alg;
};

/// Cleaving data for H_kappa as an H_eps-comodule algebra over k.
struct CleavingSection {
  SparseMatrix chi;         ///< H_eps -> H_kappa
  SparseMatrix chi_inverse; ///< convolution inverse
  SparseMatrix xi;          ///< H_kappa -> k
};

namespace detail {

/// Build-once map shared between threads. Builders run outside the lock; if
/// two threads race on a key the first stored value wins.
template <class V> class SharedCache {
public:
  template <class F>
  std::shared_ptr<const V> get(const std::string &key, F &&build) const {
    {
      std::shared_lock lock(mu_);
      if (auto it = map_.find(key); it != map_.end())
        return it->second;
    }
    std::shared_ptr<const V> v = std::make_shared<const V>(build());
    std::unique_lock lock(mu_);
    return map_.try_emplace(key, std::move(v)).first->second;
  }

private:
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<std::string, std::shared_ptr<const V>> map_;
};

} // namespace detail

/// Fibers H_kappa with the maps Delta_{kappa,gamma}: H_{kappa gamma} ->
/// H_kappa (x) H_gamma and S_kappa: H_kappa -> H_{kappa^{-1}}.
class HopfSystem {
public:
  virtual ~HopfSystem() = default;
  virtual std::size_t fiber_dim() const = 0;
  virtual Character identity() const = 0;
  virtual void check_character(const Character &k) const = 0;
  virtual std::shared_ptr<const Fiber> fiber(const Character &k) const = 0;
  virtual std::shared_ptr<const SparseMatrix>
  delta(const Character &k, const Character &g) const = 0;
  virtual std::shared_ptr<const SparseMatrix>
  antipode(const Character &k) const = 0;
  /// Counit of H_eps.
  virtual Vec counit() const = 0;

  /// H_eps as a Hopf algebra.
  HopfData hopf_identity() const {
    const Character e = identity();
    const auto f = fiber(e);
    const std::size_t d = fiber_dim();
    HopfData h;
    h.labels = f->labels;
    h.alg = f->alg;
    h.coalg.dim = d;
    const auto dm = delta(e, e);
    for (std::size_t i = 0; i < d; ++i)
      h.coalg.comult.push_back(dm->col(i));
    h.coalg.counit = counit();
    h.antipode = *antipode(e);
    return h;
  }
};

class QLSModel : public HopfSystem {
public:
  explicit QLSModel(QLSDatum d) : d_(std::move(d)) {
    const auto r = validate_datum(d_);
    if (!r.passed()) {
      std::string why;
      for (const auto &e : r.entries())
        if (!e.passed)
          why += e.name + ": " + e.detail + "; ";
      fail(ErrorKind::InvalidDatum, why);
    }
    const std::size_t th = static_cast<std::size_t>(d_.theta);
    n_.resize(th);
    radix_.resize(2 * th);
    for (std::size_t i = 0; i < th; ++i) {
      n_[i] = d_.order(static_cast<int>(i));
      radix_[i] = d_.group_only ? 1 : n_[i];
      radix_[th + i] = n_[i];
    }
    dim_ = 1;
    for (long long r : radix_)
      dim_ *= static_cast<std::size_t>(r);
  }

  const QLSDatum &datum() const noexcept { return d_; }
  std::size_t theta() const noexcept { return n_.size(); }
  long long order(std::size_t i) const { return n_.at(i); }
  /// prod N_i^2 (prod N_i in group_only mode).
  std::size_t fiber_dim() const override { return dim_; }
  Character identity() const override { return Character::identity(theta()); }

  /// Checks that a character fits this datum: right rank, t_i != 0, and
  /// s = 0 in group_only mode.
  void check_character(const Character &k) const override {
    if (k.t.size() != theta() || k.s.size() != theta())
      fail(ErrorKind::DatumMismatch, "character has rank " +
                                         std::to_string(k.t.size()) +
                                         ", datum has theta " +
                                         std::to_string(theta()));
    for (std::size_t i = 0; i < theta(); ++i) {
      if (k.t[i].is_zero())
        fail(ErrorKind::InvalidScalar, "character with t = 0");
      if (d_.group_only && !k.s[i].is_zero())
        fail(ErrorKind::DatumMismatch, "group_only characters have s = 0");
    }
  }

  Monomial decode(std::size_t idx) const {
    Monomial m(radix_.size());
    for (std::size_t k = radix_.size(); k-- > 0;) {
      m[k] = static_cast<long long>(idx % radix_[k]);
      idx /= radix_[k];
    }
    return m;
  }

  std::size_t encode(const Monomial &m) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < radix_.size(); ++k) {
      if (m[k] < 0 || m[k] >= radix_[k])
        fail(ErrorKind::NotInBasis, "monomial exponent out of fiber range");
      idx = idx * radix_[k] + static_cast<std::size_t>(m[k]);
    }
    return idx;
  }

  std::string label(const Monomial &m) const {
    const std::size_t th = theta();
    std::string out;
    auto put = [&](const char *sym, std::size_t i, long long e) {
      if (e == 0)
        return;
      if (!out.empty())
        out += " ";
      out += sym + std::to_string(i + 1);
      if (e != 1)
        out += "^" + std::to_string(e);
    };
    for (std::size_t i = 0; i < th; ++i)
      put("x", i, m[i]);
    for (std::size_t i = 0; i < th; ++i)
      put("g", i, m[th + i]);
    return out.empty() ? "1" : out;
  }

  /// Product of two monomials in H (fiber == nullptr) or in H_kappa.
  /// Returns a zero coefficient when a wrap-around hits s_i = 0.
  std::pair<Scalar, Monomial> monomial_product(const Monomial &u,
                                               const Monomial &v,
                                               const Character *fiber) const {
    const std::size_t th = theta();
    long long qexp = 0;
    // g^b x^c = prod q_ij^{b_i c_j} x^c g^b
    for (std::size_t i = 0; i < th; ++i)
      for (std::size_t j = 0; j < th; ++j)
        qexp += d_.exponents[i][j] * u[th + i] * v[j];
    // x_i^{a_i} x_j^{c_j} = q_ij^{a_i c_j} x_j^{c_j} x_i^{a_i} for i > j
    for (std::size_t i = 0; i < th; ++i)
      for (std::size_t j = 0; j < i; ++j)
        qexp += d_.exponents[i][j] * u[i] * v[j];
    Scalar c = Scalar::root_of_unity(d_.conductor, qexp);
    Monomial m(2 * th);
    for (std::size_t k = 0; k < 2 * th; ++k)
      m[k] = u[k] + v[k];
    if (fiber != nullptr)
      c = c * wrap(m, *fiber);
    return {c, m};
  }

  /// Normal form of a word of generators. In H, x-exponents are unbounded
  /// and g-exponents range over Z; in a fiber both are reduced with
  /// x_i^{N_i} = s_i and g_i^{N_i} = t_i.
  PBWElement normalize(const std::vector<Letter> &word,
                       const Character *fiber = nullptr) const {
    if (fiber != nullptr)
      check_character(*fiber);
    const std::size_t th = theta();
    Monomial acc_m(2 * th, 0);
    Scalar acc_c(1);
    for (const Letter &l : word) {
      if (l.index < 0 || static_cast<std::size_t>(l.index) >= th)
        fail(ErrorKind::NotInBasis, "generator index out of range");
      Monomial m(2 * th, 0);
      if (l.gen == Gen::X) {
        if (d_.group_only)
          fail(ErrorKind::NotInBasis, "group_only datum has no x generators");
        if (l.exponent < 0)
          fail(ErrorKind::NotInBasis, "negative power of x");
        m[l.index] = l.exponent;
      } else {
        m[th + l.index] = l.exponent;
      }
      auto [c, next] = monomial_product(acc_m, m, fiber);
      acc_c = acc_c * c;
      acc_m = std::move(next);
      if (acc_c.is_zero())
        return {};
    }
    if (fiber != nullptr)
      acc_c = acc_c * wrap(acc_m, *fiber);
    return {{acc_m, acc_c}};
  }

  /// Product of two elements (H or fiber).
  PBWElement multiply(const PBWElement &a, const PBWElement &b,
                      const Character *fiber = nullptr) const {
    PBWElement out;
    for (const auto &[u, x] : a)
      for (const auto &[v, y] : b) {
        auto [c, m] = monomial_product(u, v, fiber);
        if (c.is_zero())
          continue;
        auto [it, fresh] = out.try_emplace(m, x * y * c);
        if (!fresh) {
          it->second += x * y * c;
          if (it->second.is_zero())
            out.erase(it);
        }
      }
    return out;
  }

  /// Fiber element as a vector on the monomial basis.
  SparseVec to_fiber_vec(const PBWElement &e) const {
    SparseVec v;
    for (const auto &[m, c] : e)
      axpy(v, encode(m), c);
    return v;
  }

  std::shared_ptr<const Fiber> fiber(const Character &kappa) const override {
    check_character(kappa);
    return fibers_.get(kappa.key(), [&] {
      Fiber f;
      f.kappa = kappa;
      f.alg.dim = dim_;
      f.alg.mult.resize(dim_ * dim_);
      std::vector<Monomial> mons(dim_);
      for (std::size_t i = 0; i < dim_; ++i) {
        mons[i] = decode(i);
        f.labels.push_back(label(mons[i]));
      }
      for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) {
          auto [c, m] = monomial_product(mons[i], mons[j], &kappa);
          if (!c.is_zero())
            f.alg.mult[i * dim_ + j] = {{encode(m), c}};
        }
      f.alg.unit = unit_vec(0);
      return f;
    });
  }

  /// Delta_{kappa,gamma}: H_{kappa gamma} -> H_kappa (x) H_gamma, a matrix
  /// with D^2 rows. Each monomial's image is the product of the images
  /// Delta(x_i) = x_i (x) 1 + g_i (x) x_i and Delta(g_i) = g_i (x) g_i taken
  /// in the tensor product algebra.
  std::shared_ptr<const SparseMatrix>
  delta(const Character &kappa, const Character &gamma) const override {
    return deltas_.get(kappa.key() + "|" + gamma.key(),
                       [&] { return build_delta(kappa, gamma); });
  }

  /// S_kappa: H_kappa -> H_{kappa^{-1}}, anti-multiplicative, from
  /// S(x_i) = -g_i^{-1} x_i and S(g_i) = g_i^{-1}.
  std::shared_ptr<const SparseMatrix>
  antipode(const Character &kappa) const override {
    check_character(kappa);
    return antipodes_.get(kappa.key(), [&] { return build_antipode(kappa); });
  }

private:
  SparseMatrix build_delta(const Character &kappa,
                           const Character &gamma) const {
    const auto fk = fiber(kappa), fg = fiber(gamma);
    const std::size_t th = theta(), d = dim_;
    std::vector<SparseVec> dx(th), dg(th);
    for (std::size_t i = 0; i < th; ++i) {
      const int ii = static_cast<int>(i);
      const SparseVec gk = fiber_element({{Gen::G, ii, 1}}, kappa);
      const SparseVec gg = fiber_element({{Gen::G, ii, 1}}, gamma);
      dg[i] = tensor(gk, gg);
      if (!d_.group_only) {
        const SparseVec xk = fiber_element({{Gen::X, ii, 1}}, kappa);
        const SparseVec xg = fiber_element({{Gen::X, ii, 1}}, gamma);
        dx[i] = tensor(xk, unit_vec(0));
        for (const auto &[p, c] : tensor(gk, xg))
          axpy(dx[i], p, c);
      }
    }
    SparseMatrix m(d * d, d);
    for (std::size_t idx = 0; idx < d; ++idx) {
      const Monomial mono = decode(idx);
      SparseVec acc = unit_vec(0);
      for (std::size_t i = 0; i < th; ++i)
        for (long long k = 0; k < mono[i]; ++k)
          acc = tensor_product(fk->alg, fg->alg, acc, dx[i]);
      for (std::size_t i = 0; i < th; ++i)
        for (long long k = 0; k < mono[th + i]; ++k)
          acc = tensor_product(fk->alg, fg->alg, acc, dg[i]);
      m.col(idx) = std::move(acc);
    }
    return m;
  }

  SparseMatrix build_antipode(const Character &kappa) const {
    const Character target = char_inv(kappa);
    const auto ft = fiber(target);
    const std::size_t th = theta();
    std::vector<SparseVec> sx(th), sg(th);
    for (std::size_t i = 0; i < th; ++i) {
      const int ii = static_cast<int>(i);
      sg[i] = fiber_element({{Gen::G, ii, -1}}, target);
      if (!d_.group_only)
        sx[i] = scaled(fiber_element({{Gen::G, ii, -1}, {Gen::X, ii, 1}}, target),
                       Scalar(-1));
    }
    SparseMatrix m(dim_, dim_);
    for (std::size_t idx = 0; idx < dim_; ++idx) {
      const Monomial mono = decode(idx);
      SparseVec acc = unit_vec(0);
      // S(x_1^{a_1} ... x_th^{a_th} g^b) = S(g^b) S(x_th)^{a_th} ... S(x_1)^{a_1}
      for (std::size_t i = 0; i < th; ++i)
        for (long long k = 0; k < mono[th + i]; ++k)
          acc = ft->alg.product(acc, sg[i]);
      for (std::size_t i = th; i-- > 0;)
        for (long long k = 0; k < mono[i]; ++k)
          acc = ft->alg.product(acc, sx[i]);
      m.col(idx) = std::move(acc);
    }
    return m;
  }

public:
  /// eps: H_eps -> k, 1 on g^b and 0 on monomials containing x.
  Vec counit() const override {
    Vec e(dim_);
    for (std::size_t idx = 0; idx < dim_; ++idx) {
      const Monomial m = decode(idx);
      bool has_x = false;
      for (std::size_t i = 0; i < theta(); ++i)
        has_x = has_x || m[i] != 0;
      e[idx] = Scalar(has_x ? 0 : 1);
    }
    return e;
  }

  /// A normal-basis section chi: H_eps -> H_kappa with its convolution
  /// inverse and the retraction xi: H_kappa -> k. chi sends x^a g^b to
  /// x^a g^beta with beta_i = ((a_i + b_i) mod N_i) - a_i, which agrees with
  /// the naive identification of monomials whenever no g-exponent wraps.
  CleavingSection cleaving_section(const Character &kappa) const {
    check_character(kappa);
    const std::size_t th = theta(), d = dim_;
    CleavingSection out{SparseMatrix(d, d), SparseMatrix(d, d),
                        SparseMatrix(1, d)};
    for (std::size_t idx = 0; idx < d; ++idx) {
      Monomial m = decode(idx);
      for (std::size_t i = 0; i < th; ++i)
        m[th + i] = (m[i] + m[th + i]) % n_[i] - m[i];
      const Scalar c = wrap(m, kappa);
      out.chi.col(idx) = {{encode(m), c}};
    }
    const auto fk = fiber(kappa);
    const Character e = identity();
    const auto de = delta(e, e);
    const Vec eps = counit();
    // sum chi(h_1) chi^{-1}(h_2) = eps(h) 1, unknowns chi^{-1}(b_k)_l at k*d+l
    const std::size_t unknowns = d * d;
    Matrix sys(d * d, unknowns + 1);
    for (std::size_t h = 0; h < d; ++h) {
      for (const auto &[jk, c] : de->col(h)) {
        const std::size_t j = jk / d, k = jk % d;
        for (const auto &[p, x] : out.chi.col(j))
          for (std::size_t l = 0; l < d; ++l)
            for (const auto &[r, y] : fk->alg.mul(p, l))
              sys(h * d + r, k * d + l) += c * x * y;
      }
      if (!eps[h].is_zero())
        sys(h * d + 0, unknowns) += eps[h];
    }
    auto ech = reduce_rows(std::move(sys));
    if (ech.rank() != unknowns || ech.pivots.back() == unknowns)
      fail(ErrorKind::TheoremViolation,
           "section has no convolution inverse at " + kappa.key());
    for (std::size_t row = 0; row < ech.rank(); ++row) {
      const Scalar &v = ech.reduced(row, unknowns);
      if (!v.is_zero())
        out.chi_inverse.col(ech.pivots[row] / d).emplace(ech.pivots[row] % d, v);
    }
    // xi(c) = c_0 chi^{-1}(c_1) lands in k 1
    const auto rho = delta(kappa, e);
    for (std::size_t idx = 0; idx < d; ++idx) {
      SparseVec acc;
      for (const auto &[jk, c] : rho->col(idx))
        axpy(acc, c, fk->alg.product(unit_vec(jk / d), out.chi_inverse.col(jk % d)));
      if (acc.empty())
        continue;
      if (acc.size() != 1 || acc.begin()->first != 0)
        fail(ErrorKind::TheoremViolation,
             "xi(c) is not a scalar: coinvariants of H_kappa exceed k");
      out.xi.col(idx) = {{0, acc.begin()->second}};
    }
    return out;
  }

  /// Normalized fiber element for a word.
  SparseVec fiber_element(const std::vector<Letter> &word,
                          const Character &kappa) const {
    return to_fiber_vec(normalize(word, &kappa));
  }

private:
  SparseVec tensor(const SparseVec &u, const SparseVec &v) const {
    SparseVec out;
    for (const auto &[i, x] : u)
      for (const auto &[j, y] : v)
        axpy(out, i * dim_ + j, x * y);
    return out;
  }

  // Reduces exponents into the fiber range in place; returns the scalar
  // picked up from x_i^{N_i} = s_i and g_i^{N_i} = t_i.
  Scalar wrap(Monomial &m, const Character &k) const {
    const std::size_t th = theta();
    Scalar c(1);
    for (std::size_t i = 0; i < th; ++i) {
      const long long n = n_[i];
      if (!d_.group_only && m[i] >= n) {
        c = c * k.s[i].pow(m[i] / n);
        m[i] %= n;
      }
      const long long b = m[th + i];
      const long long q = b >= 0 ? b / n : -((-b + n - 1) / n);
      if (q != 0)
        c = c * k.t[i].pow(q);
      m[th + i] = b - q * n;
    }
    return c;
  }

  QLSDatum d_;
  std::vector<long long> n_;
  std::vector<long long> radix_;
  std::size_t dim_ = 1;

  detail::SharedCache<Fiber> fibers_;
  detail::SharedCache<SparseMatrix> deltas_;
  detail::SharedCache<SparseMatrix> antipodes_;
};

/// The cleaving section of H_kappa checked as a cleaving pair for the
/// extension k -> H_kappa -> H_eps, plus both convolution-inverse identities.
inline CheckReport verify_fiber_cleaving(const QLSModel &model,
                                         const Character &kappa) {
  const CleavingSection sec = model.cleaving_section(kappa);
  const std::size_t d = model.fiber_dim();
  const HopfData he = model.hopf_identity();
  ComoduleAlgebra c{model.fiber(kappa)->alg, *model.delta(kappa, model.identity())};
  SparseMatrix iota(d, 1);
  iota.col(0) = unit_vec(0);
  CheckReport r = verify_cleaving_pair(sec.xi, sec.chi, trivial_hopf().alg,
                                       iota, c, he);
  std::string witness;
  const auto &alg = c.alg;
  for (std::size_t h = 0; h < d && witness.empty(); ++h) {
    SparseVec left;
    for (const auto &[jk, x] : he.coalg.comult[h])
      axpy(left, x, alg.product(sec.chi_inverse.col(jk / d), sec.chi.col(jk % d)));
    if (left != scaled(unit_vec(0), he.coalg.counit[h]))
      witness = he.labels[h];
  }
  r.add("chi_inverse_left", witness.empty(), witness);
  return r;
}

/// Identities of the Hopf system on the given characters:
/// multiplicativity of Delta, well-definedness on the relations, counit
/// laws, coassociativity on all triples, and the antipode identities.
inline CheckReport verify_system_coherence(const HopfSystem &model,
                                           const std::vector<Character> &chars) {
  CheckReport r("coherence");
  const std::size_t d = model.fiber_dim();
  const Character e = model.identity();
  const Vec eps = model.counit();
  SparseMatrix eps_map(1, d);
  for (std::size_t i = 0; i < d; ++i)
    if (!eps[i].is_zero())
      eps_map.col(i) = {{0, eps[i]}};

  std::string witness;
  for (const auto &k : chars)
    for (const auto &g : chars) {
      if (!witness.empty())
        break;
      const auto fkg = model.fiber(char_mul(k, g));
      const auto fk = model.fiber(k), fg = model.fiber(g);
      const auto dm = model.delta(k, g);
      for (std::size_t i = 0; i < d && witness.empty(); ++i)
        for (std::size_t j = 0; j < d && witness.empty(); ++j)
          if (dm->apply(fkg->alg.mul(i, j)) !=
              tensor_product(fk->alg, fg->alg, dm->col(i), dm->col(j)))
            witness = k.key() + " " + g.key();
    }
  r.add("delta_multiplicative", witness.empty(), witness);

  witness.clear();
  for (const auto &k : chars) {
    const auto id = SparseMatrix::identity(d);
    // (id (x) eps) Delta_{k,e} and (eps (x) id) Delta_{e,k}
    const auto dke = model.delta(k, e), dek = model.delta(e, k);
    for (std::size_t i = 0; i < d && witness.empty(); ++i) {
      SparseVec a, b;
      for (const auto &[p, c] : apply_tensor(id, eps_map, dke->col(i)))
        axpy(a, p, c);
      for (const auto &[p, c] : apply_tensor(eps_map, id, dek->col(i)))
        axpy(b, p, c);
      if (a != unit_vec(i) || b != unit_vec(i))
        witness = k.key();
    }
  }
  r.add("counit_laws", witness.empty(), witness);

  witness.clear();
  std::size_t triples = 0;
  for (const auto &k : chars)
    for (const auto &g : chars)
      for (const auto &n : chars) {
        if (!witness.empty())
          break;
        const Character kg = char_mul(k, g), gn = char_mul(g, n);
        const auto left_outer = model.delta(kg, n);
        const auto left_inner = model.delta(k, g);
        const auto right_outer = model.delta(k, gn);
        const auto right_inner = model.delta(g, n);
        const auto id = SparseMatrix::identity(d);
        for (std::size_t i = 0; i < d && witness.empty(); ++i) {
          const SparseVec l = apply_tensor(*left_inner, id, left_outer->col(i));
          const SparseVec rr = apply_tensor(id, *right_inner, right_outer->col(i));
          if (l != rr)
            witness = k.key() + " " + g.key() + " " + n.key();
        }
        ++triples;
      }
  r.add("coassociativity", witness.empty(),
        witness.empty() ? std::to_string(triples) + " triples" : witness);

  witness.clear();
  for (const auto &k : chars) {
    const Character ki = char_inv(k);
    const auto fk = model.fiber(k);
    const auto s_ki = model.antipode(ki); // H_{k^-1} -> H_k
    const auto d1 = model.delta(k, ki), d2 = model.delta(ki, k);
    for (std::size_t i = 0; i < d && witness.empty(); ++i) {
      SparseVec a, b;
      for (const auto &[jk, c] : d1->col(i))
        axpy(a, c, fk->alg.product(unit_vec(jk / d), s_ki->col(jk % d)));
      for (const auto &[jk, c] : d2->col(i))
        axpy(b, c, fk->alg.product(s_ki->col(jk / d), unit_vec(jk % d)));
      const SparseVec expect = scaled(unit_vec(0), eps[i]);
      if (a != expect || b != expect)
        witness = k.key() + " at " + fk->labels[i];
    }
  }
  r.add("antipode_axiom", witness.empty(), witness);

  witness.clear();
  for (const auto &k : chars) {
    const Character ki = char_inv(k);
    const auto fk = model.fiber(k), fki = model.fiber(ki);
    const auto s = model.antipode(k);
    for (std::size_t i = 0; i < d && witness.empty(); ++i)
      for (std::size_t j = 0; j < d && witness.empty(); ++j)
        if (s->apply(fk->alg.mul(i, j)) != fki->alg.product(s->col(j), s->col(i)))
          witness = k.key();
    if (witness.empty() && rank(s->dense()) != d)
      witness = k.key() + " (not bijective)";
  }
  r.add("antipode_antimultiplicative", witness.empty(), witness);
  return r;
}

} // namespace hflab
