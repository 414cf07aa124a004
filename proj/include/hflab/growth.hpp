#pragma once

// Cayley-ball growth of finitely generated subgroups of B^theta, growth
// classification and the GK / Noetherian / regularity verdicts read off
// from it.

#include "hflab/errors.hpp"
#include "hflab/qls.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace hflab {

/// Elements of B^theta share the character group law.
using BorelElement = Character;

/// BudgetExceeded carrying the sizes computed before the budget ran out.
class BudgetError : public Error {
public:
  BudgetError(const std::string &what, std::vector<std::size_t> partial)
      : Error(ErrorKind::BudgetExceeded, what), partial_(std::move(partial)) {}
  const std::vector<std::size_t> &partial() const noexcept { return partial_; }

private:
  std::vector<std::size_t> partial_;
};

struct Ball {
  std::vector<std::size_t> sizes; ///< |B_0| .. |B_n|
  std::vector<std::string> keys;  ///< canonical keys in BFS order
  std::size_t bytes = 0;          ///< estimated visited-set footprint
  bool stabilized() const {
    return sizes.size() >= 2 && sizes.back() == sizes[sizes.size() - 2];
  }
};

namespace detail {

// rough footprint of one visited entry: the key, the node, and a stored element
inline std::size_t entry_bytes(const std::string &key, const BorelElement &e) {
  std::size_t b = 2 * key.size() + 96;
  for (std::size_t i = 0; i < e.rank(); ++i)
    b += 64 * (e.t[i].degree() + e.s[i].degree());
  return b;
}

} // namespace detail

/// BFS over the Cayley graph with generators gens and their inverses.
/// budget_bytes = 0 means unlimited; jobs > 1 expands the frontier in
/// parallel and merges in a fixed order, so the result does not depend on it.
inline Ball ball_growth_detail(const std::vector<BorelElement> &gens, int n_max,
                               std::size_t budget_bytes = 0, unsigned jobs = 1) {
  if (gens.empty())
    fail(ErrorKind::InvalidDatum, "ball_growth needs at least one generator");
  if (n_max < 1)
    fail(ErrorKind::InvalidDatum, "n_max must be positive");
  std::vector<BorelElement> steps;
  for (const auto &g : gens) {
    detail::check_compatible(g, gens.front());
    steps.push_back(g);
    steps.push_back(char_inv(g));
  }
  Ball ball;
  std::unordered_set<std::string> seen;
  std::vector<BorelElement> frontier{BorelElement::identity(gens.front().rank())};
  const std::string k0 = frontier[0].key();
  seen.insert(k0);
  ball.keys.push_back(k0);
  ball.bytes = detail::entry_bytes(k0, frontier[0]);
  ball.sizes.push_back(1);
  jobs = std::max(1u, jobs);

  for (int n = 1; n <= n_max; ++n) {
    // neighbours of each frontier element, in (element, step) order
    auto expand = [&](std::size_t lo, std::size_t hi) {
      std::vector<std::pair<std::string, BorelElement>> out;
      out.reserve((hi - lo) * steps.size());
      for (std::size_t i = lo; i < hi; ++i)
        for (const auto &s : steps) {
          BorelElement e = char_mul(frontier[i], s);
          std::string k = e.key();
          out.emplace_back(std::move(k), std::move(e));
        }
      return out;
    };
    std::vector<std::vector<std::pair<std::string, BorelElement>>> chunks;
    const std::size_t f = frontier.size();
    if (jobs == 1 || f < 64) {
      chunks.push_back(expand(0, f));
    } else {
      std::vector<std::future<std::vector<std::pair<std::string, BorelElement>>>>
          parts;
      const std::size_t per = (f + jobs - 1) / jobs;
      for (std::size_t lo = 0; lo < f; lo += per)
        parts.push_back(
            std::async(std::launch::async, expand, lo, std::min(f, lo + per)));
      for (auto &p : parts)
        chunks.push_back(p.get());
    }
    std::vector<BorelElement> next;
    for (auto &chunk : chunks)
      for (auto &[k, e] : chunk) {
        if (seen.count(k))
          continue;
        ball.bytes += detail::entry_bytes(k, e);
        if (budget_bytes != 0 && ball.bytes > budget_bytes)
          throw BudgetError("ball of radius " + std::to_string(n) +
                                " exceeds the memory budget",
                            ball.sizes);
        seen.insert(k);
        ball.keys.push_back(k);
        next.push_back(std::move(e));
      }
    ball.sizes.push_back(seen.size());
    frontier = std::move(next);
  }
  return ball;
}

inline std::vector<std::size_t> ball_growth(const std::vector<BorelElement> &gens,
                                            int n_max, std::size_t budget_bytes = 0,
                                            unsigned jobs = 1) {
  return ball_growth_detail(gens, n_max, budget_bytes, jobs).sizes;
}

enum class GrowthKind { Polynomial, Exponential, Inconclusive };

inline std::string to_string(GrowthKind k) {
  switch (k) {
  case GrowthKind::Polynomial: return "polynomial";
  case GrowthKind::Exponential: return "exponential";
  case GrowthKind::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct GrowthClass {
  GrowthKind kind = GrowthKind::Inconclusive;
  int degree = 0; ///< for Polynomial
  nlohmann::json diagnostics;
};

namespace growth_constants {
inline constexpr std::size_t window = 4;
inline constexpr double integer_tolerance = 0.25;
inline constexpr double ratio_bound = 1.0 + 1.0 / 16.0;
inline constexpr int default_n_max = 12;
inline constexpr std::size_t min_points = 6;
} // namespace growth_constants

namespace detail {

inline double round6(double x) { return std::round(x * 1e6) / 1e6; }

// least-squares slope and residual of y against x
inline std::pair<double, double> fit(const std::vector<double> &x,
                                     const std::vector<double> &y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxx == 0 ? 0 : sxy / sxx;
  double res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (my + slope * (x[i] - mx));
    res += e * e;
  }
  return {slope, res};
}

} // namespace detail

/// Polynomial(d) if the degree estimates log(|B_n|/|B_{n-1}|) / log(n/(n-1))
/// of the last 4 points are all within 0.25 of the same integer d; else
/// exponential if every ratio |B_n|/|B_{n-1}| is at least 1 + 1/16; else
/// inconclusive. Floats appear only here.
inline GrowthClass classify_growth(const std::vector<std::size_t> &sizes) {
  using namespace growth_constants;
  if (sizes.size() < min_points)
    fail(ErrorKind::InsufficientData,
         "classification needs at least " + std::to_string(min_points) +
             " ball sizes, got " + std::to_string(sizes.size()));
  GrowthClass c;
  std::vector<double> degrees, ratios;
  for (std::size_t n = 2; n < sizes.size(); ++n) {
    const double num = std::log(static_cast<double>(sizes[n]) /
                                static_cast<double>(sizes[n - 1]));
    const double den = std::log(static_cast<double>(n) / static_cast<double>(n - 1));
    degrees.push_back(num / den);
  }
  for (std::size_t n = 1; n < sizes.size(); ++n)
    ratios.push_back(static_cast<double>(sizes[n]) /
                     static_cast<double>(sizes[n - 1]));

  std::vector<double> logn, nn, logb;
  for (std::size_t n = 1; n < sizes.size(); ++n) {
    logn.push_back(std::log(static_cast<double>(n)));
    nn.push_back(static_cast<double>(n));
    logb.push_back(std::log(static_cast<double>(sizes[n])));
  }
  const auto [pslope, pres] = detail::fit(logn, logb);
  const auto [eslope, eres] = detail::fit(nn, logb);
  auto &dg = c.diagnostics["degree_estimates"] = nlohmann::json::array();
  for (double d : degrees)
    dg.push_back(detail::round6(d));
  auto &rt = c.diagnostics["ratios"] = nlohmann::json::array();
  for (double r : ratios)
    rt.push_back(detail::round6(r));
  c.diagnostics["polynomial_fit"] = {{"slope", detail::round6(pslope)},
                                     {"residual", detail::round6(pres)}};
  c.diagnostics["exponential_fit"] = {{"slope", detail::round6(eslope)},
                                      {"residual", detail::round6(eres)}};

  const std::size_t w = std::min(window, degrees.size());
  const double target = std::round(degrees.back());
  bool poly = target >= 0;
  for (std::size_t i = degrees.size() - w; i < degrees.size(); ++i)
    poly = poly && std::abs(degrees[i] - target) <= integer_tolerance;
  if (poly) {
    c.kind = GrowthKind::Polynomial;
    c.degree = static_cast<int>(target);
    return c;
  }
  if (std::all_of(ratios.begin(), ratios.end(),
                  [](double r) { return r >= ratio_bound; })) {
    c.kind = GrowthKind::Exponential;
    return c;
  }
  return c;
}

/// abelian(rank interval, torsion) or nonabelian(witness pair).
struct CommutationCertificate {
  bool abelian = false;
  std::size_t rank_lower = 0; ///< rank of the image under norm valuations
  std::size_t rank_upper = 0; ///< generators minus rank of found relations
  std::vector<long long> torsion; ///< invariant factors > 1 of found relations
  /// Set when rank_upper = 0 and the elements met in the search already
  /// exhaust Z^r / (found relations), which makes the order exact.
  std::optional<std::size_t> finite_order;
  int search_length = 0;
  std::size_t pair_i = 0, pair_j = 0; ///< nonabelian witness
  std::string witness;
};

namespace detail {

// Invariant factors of an integer matrix (rows are relations).
inline std::vector<long long> smith_invariants(std::vector<std::vector<long long>> m) {
  std::vector<long long> out;
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  std::size_t t = 0;
  while (t < rows && t < cols) {
    // smallest nonzero pivot in the remaining block
    std::size_t pr = rows, pc = cols;
    for (std::size_t i = t; i < rows; ++i)
      for (std::size_t j = t; j < cols; ++j)
        if (m[i][j] != 0 &&
            (pr == rows || std::llabs(m[i][j]) < std::llabs(m[pr][pc]))) {
          pr = i;
          pc = j;
        }
    if (pr == rows)
      break;
    std::swap(m[t], m[pr]);
    for (auto &row : m)
      std::swap(row[t], row[pc]);
    bool clean = false;
    while (!clean) {
      clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        const long long q = m[i][t] / m[t][t];
        if (q != 0)
          for (std::size_t j = t; j < cols; ++j)
            m[i][j] -= q * m[t][j];
        if (m[i][t] != 0) {
          std::swap(m[t], m[i]);
          clean = false;
        }
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        const long long q = m[t][j] / m[t][t];
        if (q != 0)
          for (std::size_t i = t; i < rows; ++i)
            m[i][j] -= q * m[i][t];
        if (m[t][j] != 0) {
          for (auto &row : m)
            std::swap(row[t], row[j]);
          clean = false;
        }
      }
      if (clean)
        // the pivot must divide the rest of the block
        for (std::size_t i = t + 1; i < rows && clean; ++i)
          for (std::size_t j = t + 1; j < cols && clean; ++j)
            if (m[i][j] % m[t][t] != 0) {
              for (std::size_t k = t; k < cols; ++k)
                m[t][k] += m[i][k];
              clean = false;
            }
    }
    out.push_back(std::llabs(m[t][t]));
    ++t;
  }
  return out;
}

// exponents of the primes dividing a nonzero rational
inline void add_valuations(const mpq_class &q, std::map<unsigned long, long long> &v,
                           long long sign) {
  auto factor = [&](mpz_class n, long long s) {
    n = abs(n);
    for (unsigned long p = 2; n > 1; ++p) {
      if (p * p > n) {
        v[n.get_ui()] += s;
        break;
      }
      while (n % p == 0) {
        n /= p;
        v[p] += s;
      }
    }
  };
  factor(q.get_num(), sign);
  factor(q.get_den(), -sign);
}

} // namespace detail

/// Pairwise commutation; for abelian generating sets, relations among the
/// generators are collected from collisions of exponent vectors with
/// |e|_1 <= L and reduced by Smith normal form. The rank interval is
/// [rank of the norm-valuation image, generators - rank of relations].
inline CommutationCertificate commutation_certificate(const std::vector<BorelElement> &gens,
                                                      int search_length = 10) {
  CommutationCertificate c;
  c.search_length = search_length;
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      const auto ab = char_mul(gens[i], gens[j]), ba = char_mul(gens[j], gens[i]);
      if (!(ab == ba)) {
        c.pair_i = i;
        c.pair_j = j;
        c.witness = "g" + std::to_string(i + 1) + " g" + std::to_string(j + 1) +
                    " = " + ab.key() + " != " + ba.key() + " = g" +
                    std::to_string(j + 1) + " g" + std::to_string(i + 1);
        return c;
      }
    }
  c.abelian = true;
  const std::size_t r = gens.size();
  if (r == 0)
    return c;

  // BFS on exponent vectors; colliding vectors differ by a relation
  using Exps = std::vector<long long>;
  std::unordered_map<std::string, Exps> where;
  std::vector<std::pair<Exps, BorelElement>> frontier{
      {Exps(r, 0), BorelElement::identity(gens[0].rank())}};
  std::set<Exps> visited{Exps(r, 0)};
  where.emplace(frontier[0].second.key(), Exps(r, 0));
  std::vector<std::vector<long long>> relations;
  for (int len = 1; len <= search_length && !frontier.empty(); ++len) {
    std::vector<std::pair<Exps, BorelElement>> next;
    for (const auto &[e, x] : frontier)
      for (std::size_t i = 0; i < r; ++i)
        for (int sgn : {1, -1}) {
          Exps f = e;
          f[i] += sgn;
          if (!visited.insert(f).second)
            continue;
          BorelElement y = char_mul(x, sgn > 0 ? gens[i] : char_inv(gens[i]));
          auto [it, fresh] = where.try_emplace(y.key(), f);
          if (!fresh) {
            Exps rel(r);
            for (std::size_t k = 0; k < r; ++k)
              rel[k] = f[k] - it->second[k];
            relations.push_back(rel);
            continue; // y is already represented
          }
          next.emplace_back(std::move(f), std::move(y));
        }
    frontier = std::move(next);
  }
  const auto inv = detail::smith_invariants(relations);
  c.rank_upper = r - inv.size();
  for (long long d : inv)
    if (d > 1)
      c.torsion.push_back(d);
  if (c.rank_upper == 0) {
    std::size_t order = 1;
    for (long long d : inv)
      order *= static_cast<std::size_t>(d);
    if (order == where.size())
      c.finite_order = order;
  }

  // norm valuations give a homomorphism to a free abelian group
  // (prime, factor) -> column
  std::map<std::pair<unsigned long, std::size_t>, std::size_t> prime_index;
  std::vector<std::map<std::pair<unsigned long, std::size_t>, long long>> vals(r);
  for (std::size_t g = 0; g < r; ++g)
    for (std::size_t i = 0; i < gens[g].rank(); ++i) {
      std::map<unsigned long, long long> v;
      detail::add_valuations(gens[g].t[i].norm(), v, 1);
      for (const auto &[p, e] : v)
        if (e != 0) {
          prime_index.try_emplace({p, i}, prime_index.size());
          vals[g][{p, i}] = e;
        }
    }
  std::vector<std::vector<long long>> image(r, std::vector<long long>(prime_index.size()));
  for (std::size_t g = 0; g < r; ++g)
    for (const auto &[p, e] : vals[g])
      image[g][prime_index[p]] = e;
  c.rank_lower = prime_index.empty() ? 0 : detail::smith_invariants(image).size();
  return c;
}

inline nlohmann::json to_json(const CommutationCertificate &c) {
  if (!c.abelian)
    return {{"kind", "nonabelian"},
            {"pair", {c.pair_i + 1, c.pair_j + 1}},
            {"witness", c.witness}};
  nlohmann::json j{{"kind", "abelian"},
                   {"rank_lower", c.rank_lower},
                   {"rank_upper", c.rank_upper},
                   {"torsion", c.torsion},
                   {"search_length", c.search_length}};
  if (c.finite_order)
    j["finite_order"] = *c.finite_order;
  return j;
}

struct GrowthVerdicts {
  std::string gk;         ///< degree, "infinite" or "inconclusive"
  std::string noetherian; ///< "yes" or "undetermined"
  std::string regular;    ///< "yes", "no" or "n/a"
  std::optional<std::size_t> gldim_bound;
  nlohmann::json certificate;
  std::string reason;
};

/// GK from the growth class; Noetherian when Gamma is abelian or the ball
/// stabilized (finite); regular iff H_eps is semisimple, only when
/// Noetherian. Non-polycyclicity is never claimed.
inline GrowthVerdicts verdicts(const std::vector<BorelElement> &gens,
                               const GrowthClass &cls, bool h_eps_semisimple,
                               const std::vector<std::size_t> &sizes) {
  GrowthVerdicts v;
  switch (cls.kind) {
  case GrowthKind::Polynomial: v.gk = std::to_string(cls.degree); break;
  case GrowthKind::Exponential: v.gk = "infinite"; break;
  case GrowthKind::Inconclusive: v.gk = "inconclusive"; break;
  }
  const auto cert = commutation_certificate(gens);
  v.certificate = to_json(cert);
  const bool finite =
      sizes.size() >= 2 && sizes.back() == sizes[sizes.size() - 2];
  if (finite) {
    v.noetherian = "yes";
    v.certificate["ball_stabilized_at"] = sizes.back();
    v.gldim_bound = 0;
  } else if (cert.abelian) {
    v.noetherian = "yes";
    v.gldim_bound = cert.rank_upper;
  } else {
    v.noetherian = "undetermined";
  }
  if (v.noetherian == "yes") {
    v.regular = h_eps_semisimple ? "yes" : "no";
    v.reason = h_eps_semisimple ? "H_eps is semisimple" : "H_eps is not semisimple";
  } else {
    v.regular = "n/a";
    v.reason = "Noetherian property undetermined";
  }
  return v;
}

inline nlohmann::json to_json(const GrowthVerdicts &v) {
  nlohmann::json j{{"gk", v.gk},
                   {"noetherian", v.noetherian},
                   {"regular", v.regular},
                   {"reason", v.reason},
                   {"certificate", v.certificate}};
  j["gldim_bound"] = v.gldim_bound ? nlohmann::json(*v.gldim_bound) : nlohmann::json();
  return j;
}

/// Budget in bytes from HFLAB_BUDGET_MB, or the given default in MB.
inline std::size_t budget_from_env(std::size_t default_mb) {
  std::size_t mb = default_mb;
  if (const char *s = std::getenv("HFLAB_BUDGET_MB")) {
    char *end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end != s && *end == '\0' && v > 0)
      mb = static_cast<std::size_t>(v);
  }
  return mb * 1024 * 1024;
}

} // namespace hflab
