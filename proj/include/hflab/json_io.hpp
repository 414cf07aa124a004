#pragma once

// JSON forms of scalars, data, characters, cocycles and Hopf data. Every
// shape problem is reported as SchemaError.

#include "hflab/errors.hpp"
#include "hflab/hopf.hpp"
#include "hflab/qls.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace hflab::io {

using json = nlohmann::json;

[[noreturn]] inline void schema(const std::string &what) {
  fail(ErrorKind::SchemaError, what);
}

inline const json &field(const json &j, const char *name) {
  if (!j.is_object())
    schema(std::string("expected an object holding \"") + name + "\"");
  auto it = j.find(name);
  if (it == j.end())
    schema(std::string("missing field \"") + name + "\"");
  return *it;
}

inline long long as_int(const json &j, const std::string &what) {
  if (!j.is_number_integer())
    schema(what + " must be an integer");
  return j.get<long long>();
}

/// Integer, or a string in the scalar syntax ("1/2 - z^3").
inline Scalar parse_scalar(const json &j, int conductor) {
  if (j.is_number_integer())
    return Scalar(j.get<long long>());
  if (!j.is_string())
    schema("scalar must be an integer or a string, got " + j.dump());
  try {
    return Scalar::parse(j.get<std::string>(), conductor);
  } catch (const Error &e) {
    schema("bad scalar \"" + j.get<std::string>() + "\": " + e.what());
  }
}

inline json scalar_json(const Scalar &s) { return s.str(); }

/// {"theta", "conductor", "exponents", "mode": "qls" | "group_only"}.
inline QLSDatum parse_datum(const json &j) {
  QLSDatum d;
  d.theta = static_cast<int>(as_int(field(j, "theta"), "theta"));
  d.conductor = static_cast<int>(as_int(field(j, "conductor"), "conductor"));
  if (d.conductor < 1)
    schema("conductor must be positive");
  const json &e = field(j, "exponents");
  if (!e.is_array())
    schema("exponents must be an array of rows");
  for (const auto &row : e) {
    if (!row.is_array())
      schema("exponents must be an array of rows");
    std::vector<long long> r;
    for (const auto &x : row)
      r.push_back(as_int(x, "exponent"));
    d.exponents.push_back(std::move(r));
  }
  if (auto it = j.find("mode"); it != j.end()) {
    if (*it == "group_only")
      d.group_only = true;
    else if (*it != "qls")
      schema("mode must be \"qls\" or \"group_only\", got " + it->dump());
  }
  return d;
}

inline json datum_json(const QLSDatum &d) {
  return {{"theta", d.theta},
          {"conductor", d.conductor},
          {"exponents", d.exponents},
          {"mode", d.group_only ? "group_only" : "qls"}};
}

/// {"t": [...], "s": [...]}; "s" may be left out and then defaults to zeros.
inline Character parse_character(const json &j, const QLSDatum &d) {
  const json &t = field(j, "t");
  if (!t.is_array())
    schema("character field t must be an array, got " + t.dump());
  Character k;
  for (const auto &x : t)
    k.t.push_back(parse_scalar(x, d.conductor));
  if (auto it = j.find("s"); it != j.end()) {
    if (!it->is_array() || it->size() != t.size())
      schema("character fields t and s must have equal length");
    for (const auto &x : *it)
      k.s.push_back(parse_scalar(x, d.conductor));
  } else {
    k.s.assign(k.t.size(), Scalar(0));
  }
  if (k.t.size() != static_cast<std::size_t>(d.theta))
    schema("character " + j.dump() + " has rank " + std::to_string(k.t.size()) +
           ", datum has theta " + std::to_string(d.theta));
  for (const auto &x : k.t)
    if (x.is_zero())
      schema("character " + j.dump() + " has t = 0");
  return k;
}

inline json character_json(const Character &k) {
  json t = json::array(), s = json::array();
  for (std::size_t i = 0; i < k.rank(); ++i) {
    t.push_back(scalar_json(k.t[i]));
    s.push_back(scalar_json(k.s[i]));
  }
  return {{"t", t}, {"s", s}};
}

inline std::vector<Character> parse_characters(const json &j, const QLSDatum &d,
                                               const std::string &what) {
  if (!j.is_array())
    schema(what + " must be an array of characters");
  std::vector<Character> out;
  for (const auto &c : j)
    out.push_back(parse_character(c, d));
  return out;
}

inline json characters_json(const std::vector<Character> &ks) {
  json j = json::array();
  for (const auto &k : ks)
    j.push_back(character_json(k));
  return j;
}

/// Sparse map entries [[col, row, "s"], ...] of a d x d map.
inline json matrix_json(const SparseMatrix &m) {
  json j = json::array();
  for (std::size_t c = 0; c < m.cols(); ++c)
    for (const auto &[r, x] : m.col(c))
      j.push_back({c, r, scalar_json(x)});
  return j;
}

/// Structure-constant table [[i, j, k, "s"], ...]: entry k of table[i*d+j].
inline json table_json(const std::vector<SparseVec> &t, std::size_t d) {
  json j = json::array();
  for (std::size_t ij = 0; ij < t.size(); ++ij)
    for (const auto &[k, x] : t[ij])
      j.push_back({ij / d, ij % d, k, scalar_json(x)});
  return j;
}

inline json hopf_json(const HopfData &h) {
  const std::size_t d = h.dim();
  json j;
  j["dim"] = d;
  j["basis_labels"] = h.labels;
  j["mult"] = table_json(h.alg.mult, d);
  json unit = json::array();
  for (const auto &[k, x] : h.alg.unit)
    unit.push_back({k, scalar_json(x)});
  j["unit"] = unit;
  // comult[i] entries j * d + k become [i, j, k, s]
  json comult = json::array();
  for (std::size_t i = 0; i < h.coalg.comult.size(); ++i)
    for (const auto &[jk, x] : h.coalg.comult[i])
      comult.push_back({i, jk / d, jk % d, scalar_json(x)});
  j["comult"] = comult;
  json counit = json::array();
  for (const auto &x : h.coalg.counit)
    counit.push_back(scalar_json(x));
  j["counit"] = counit;
  j["antipode"] = h.antipode ? matrix_json(*h.antipode) : json();
  return j;
}

inline HopfData parse_hopf(const json &j, int conductor) {
  HopfData h;
  const std::size_t d = static_cast<std::size_t>(as_int(field(j, "dim"), "dim"));
  auto index = [&](const json &x) {
    const long long v = as_int(x, "basis index");
    if (v < 0 || static_cast<std::size_t>(v) >= d)
      schema("basis index " + std::to_string(v) + " out of range");
    return static_cast<std::size_t>(v);
  };
  auto rows = [&](const char *name, std::size_t width) -> const json & {
    const json &r = field(j, name);
    if (!r.is_array())
      schema(std::string(name) + " must be an array");
    for (const auto &e : r)
      if (!e.is_array() || e.size() != width)
        schema(std::string(name) + " entries must have " +
               std::to_string(width) + " fields");
    return r;
  };
  h.alg.dim = h.coalg.dim = d;
  if (auto it = j.find("basis_labels"); it != j.end() && it->is_array())
    for (const auto &l : *it)
      h.labels.push_back(l.is_string() ? l.get<std::string>() : l.dump());
  h.labels.resize(d);
  h.alg.mult.assign(d * d, SparseVec{});
  for (const auto &e : rows("mult", 4))
    axpy(h.alg.mult[index(e[0]) * d + index(e[1])], index(e[2]),
         parse_scalar(e[3], conductor));
  for (const auto &e : rows("unit", 2))
    axpy(h.alg.unit, index(e[0]), parse_scalar(e[1], conductor));
  h.coalg.comult.assign(d, SparseVec{});
  for (const auto &e : rows("comult", 4))
    axpy(h.coalg.comult[index(e[0])], index(e[1]) * d + index(e[2]),
         parse_scalar(e[3], conductor));
  const json &cu = field(j, "counit");
  if (!cu.is_array() || cu.size() != d)
    schema("counit must list one scalar per basis element");
  for (const auto &x : cu)
    h.coalg.counit.push_back(parse_scalar(x, conductor));
  if (auto it = j.find("antipode"); it != j.end() && !it->is_null()) {
    SparseMatrix s(d, d);
    for (const auto &e : rows("antipode", 3))
      axpy(s.col(index(e[0])), index(e[1]), parse_scalar(e[2], conductor));
    h.antipode = std::move(s);
  }
  return h;
}

} // namespace hflab::io
