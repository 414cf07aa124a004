#pragma once

// Scenario files, the check runner and the JSON report.

#include "hflab/graded.hpp"
#include "hflab/growth.hpp"
#include "hflab/json_io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <tuple>

namespace hflab {

inline constexpr const char *kVersion = "1.0.0";

struct GrowthSpec {
  std::vector<Character> generators; ///< defaults to the Gamma generators
  int n_max = growth_constants::default_n_max;
  std::size_t budget_mb = 512;
};

struct CocycleSpec {
  std::string kind = "trivial"; ///< "trivial" or "bicharacter"
  std::vector<std::vector<long long>> exponents;
  /// Overwrites sigma(i, j); used for deliberately broken fixtures.
  std::vector<std::tuple<std::size_t, std::size_t, Scalar>> mutate;
};

struct Scenario {
  std::string name;
  QLSDatum datum;
  std::vector<Character> gamma_generators;
  std::vector<Character> support;
  std::vector<std::string> checks;
  std::optional<GrowthSpec> growth;
  std::optional<CocycleSpec> cocycle;
  GradedMutation mutation;
  std::optional<std::string> output;
};

/// Names accepted in "checks"; "validate" always runs first.
inline const std::vector<std::string> &known_checks() {
  static const std::vector<std::string> names{
      "validate",  "hopf_identity", "strong_grading", "exact_sequence",
      "coradical", "cosemisimple",  "normality",      "coherence",
      "cleaving",  "twist",         "growth",         "finite_gamma"};
  return names;
}

/// The graded-system suite run by `verify` (and by `twist` on the twisted
/// system).
inline const std::vector<std::string> &verify_suite() {
  static const std::vector<std::string> names{
      "strong_grading", "exact_sequence", "coradical",
      "cosemisimple",   "normality",      "coherence"};
  return names;
}

namespace detail {

inline bool is_known_check(const std::string &c) {
  const auto &k = known_checks();
  return std::find(k.begin(), k.end(), c) != k.end();
}

inline std::size_t index_field(const io::json &j, std::size_t bound) {
  const long long v = io::as_int(j, "cocycle index");
  if (v < 0 || static_cast<std::size_t>(v) >= bound)
    io::schema("cocycle index " + std::to_string(v) + " out of range");
  return static_cast<std::size_t>(v);
}

} // namespace detail

inline Scenario parse_scenario(const io::json &j) {
  if (!j.is_object())
    io::schema("scenario must be a JSON object");
  static const std::vector<std::string> allowed{
      "name",  "datum",  "gamma_generators", "support", "checks",
      "growth", "cocycle", "mutation",         "output",  "description"};
  for (const auto &[k, v] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      io::schema("unknown scenario field \"" + k + "\"");

  Scenario s;
  if (auto it = j.find("name"); it != j.end()) {
    if (!it->is_string())
      io::schema("name must be a string");
    s.name = it->get<std::string>();
  }
  s.datum = io::parse_datum(io::field(j, "datum"));
  if (s.datum.theta < 0 ||
      s.datum.exponents.size() != static_cast<std::size_t>(s.datum.theta))
    io::schema("exponents must have theta rows");
  for (const auto &row : s.datum.exponents)
    if (row.size() != static_cast<std::size_t>(s.datum.theta))
      io::schema("exponents must be a theta x theta grid");

  s.gamma_generators = io::parse_characters(io::field(j, "gamma_generators"),
                                            s.datum, "gamma_generators");
  if (auto it = j.find("support"); it != j.end()) {
    s.support = io::parse_characters(*it, s.datum, "support");
  } else {
    s.support.push_back(Character::identity(static_cast<std::size_t>(s.datum.theta)));
    for (const auto &g : s.gamma_generators) {
      s.support.push_back(g);
      s.support.push_back(char_inv(g));
    }
    s.support = detail::dedupe(s.support);
  }

  const io::json &checks = io::field(j, "checks");
  if (!checks.is_array())
    io::schema("checks must be an array of names");
  s.checks.push_back("validate");
  for (const auto &c : checks) {
    if (!c.is_string())
      io::schema("check names must be strings");
    const std::string name = c.get<std::string>();
    if (!detail::is_known_check(name))
      io::schema("unknown check \"" + name + "\"");
    if (std::find(s.checks.begin(), s.checks.end(), name) == s.checks.end())
      s.checks.push_back(name);
  }

  if (auto it = j.find("growth"); it != j.end()) {
    GrowthSpec g;
    g.generators = s.gamma_generators;
    if (auto gi = it->find("generators"); it->is_object() && gi != it->end())
      g.generators = io::parse_characters(*gi, s.datum, "growth.generators");
    if (!it->is_object())
      io::schema("growth must be an object");
    if (auto n = it->find("n_max"); n != it->end())
      g.n_max = static_cast<int>(io::as_int(*n, "growth.n_max"));
    if (auto b = it->find("budget_mb"); b != it->end()) {
      const long long mb = io::as_int(*b, "growth.budget_mb");
      if (mb <= 0)
        io::schema("growth.budget_mb must be positive");
      g.budget_mb = static_cast<std::size_t>(mb);
    }
    s.growth = std::move(g);
  }

  if (auto it = j.find("cocycle"); it != j.end()) {
    CocycleSpec c;
    c.kind = io::field(*it, "kind").is_string()
                 ? io::field(*it, "kind").get<std::string>()
                 : "";
    if (c.kind != "trivial" && c.kind != "bicharacter")
      io::schema("cocycle.kind must be \"trivial\" or \"bicharacter\"");
    if (c.kind == "bicharacter") {
      const io::json &e = io::field(*it, "exponents");
      if (!e.is_array() || e.size() != static_cast<std::size_t>(s.datum.theta))
        io::schema("cocycle.exponents must be theta x theta");
      for (const auto &row : e) {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(s.datum.theta))
          io::schema("cocycle.exponents must be theta x theta");
        std::vector<long long> r;
        for (const auto &x : row)
          r.push_back(io::as_int(x, "cocycle exponent"));
        c.exponents.push_back(std::move(r));
      }
    }
    if (auto m = it->find("mutate"); m != it->end()) {
      if (!m->is_array())
        io::schema("cocycle.mutate must be an array of [i, j, value]");
      for (const auto &e : *m) {
        if (!e.is_array() || e.size() != 3)
          io::schema("cocycle.mutate entries are [i, j, value]");
        c.mutate.emplace_back(detail::index_field(e[0], SIZE_MAX),
                              detail::index_field(e[1], SIZE_MAX),
                              io::parse_scalar(e[2], s.datum.conductor));
      }
    }
    s.cocycle = std::move(c);
  }

  if (auto it = j.find("mutation"); it != j.end()) {
    if (!it->is_object())
      io::schema("mutation must be an object");
    if (auto a = it->find("identity_antipode"); a != it->end()) {
      if (!a->is_boolean())
        io::schema("mutation.identity_antipode must be a boolean");
      s.mutation.identity_antipode = a->get<bool>();
    }
    if (auto z = it->find("zero_block"); z != it->end()) {
      if (!z->is_array() || z->size() != 2)
        io::schema("mutation.zero_block must be [kappa, gamma]");
      s.mutation.zero_block = std::make_pair(io::parse_character((*z)[0], s.datum),
                                             io::parse_character((*z)[1], s.datum));
    }
  }

  if (auto it = j.find("output"); it != j.end()) {
    if (!it->is_string())
      io::schema("output must be a string");
    s.output = it->get<std::string>();
  }
  return s;
}

inline io::json read_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    io::schema("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return io::json::parse(buf.str());
  } catch (const io::json::parse_error &e) {
    io::schema(path + ": " + e.what());
  }
}

inline Scenario load_scenario(const std::string &path) {
  return parse_scenario(read_json_file(path));
}

/// The scenario as parsed, in canonical form.
inline io::json scenario_json(const Scenario &s) {
  io::json j;
  j["name"] = s.name;
  j["datum"] = io::datum_json(s.datum);
  j["gamma_generators"] = io::characters_json(s.gamma_generators);
  j["support"] = io::characters_json(s.support);
  j["checks"] = s.checks;
  if (s.growth)
    j["growth"] = {{"generators", io::characters_json(s.growth->generators)},
                   {"n_max", s.growth->n_max},
                   {"budget_mb", s.growth->budget_mb}};
  if (s.cocycle) {
    io::json c{{"kind", s.cocycle->kind}};
    if (s.cocycle->kind == "bicharacter")
      c["exponents"] = s.cocycle->exponents;
    if (!s.cocycle->mutate.empty()) {
      auto &m = c["mutate"] = io::json::array();
      for (const auto &[i, k, x] : s.cocycle->mutate)
        m.push_back({i, k, x.str()});
    }
    j["cocycle"] = c;
  }
  if (s.mutation.identity_antipode || s.mutation.zero_block) {
    io::json m{{"identity_antipode", s.mutation.identity_antipode}};
    if (s.mutation.zero_block)
      m["zero_block"] = {io::character_json(s.mutation.zero_block->first),
                         io::character_json(s.mutation.zero_block->second)};
    j["mutation"] = m;
  }
  return j;
}

struct RunOptions {
  unsigned jobs = 1;
  /// HFLAB_BUDGET_MB; caps the scenario's growth budget when set.
  std::optional<std::size_t> budget_cap_mb;
};

struct RunResult {
  io::json report;
  int exit_code = 0;
};

inline std::optional<std::size_t> budget_cap_from_env() {
  if (const char *s = std::getenv("HFLAB_BUDGET_MB")) {
    char *end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end != s && *end == '\0' && v > 0)
      return static_cast<std::size_t>(v);
  }
  return std::nullopt;
}

/// Ball sizes, classification and verdicts. Without a datum the regularity
/// verdict is n/a.
inline CheckReport growth_check(const std::vector<Character> &gens, int n_max,
                                std::size_t budget_mb, unsigned jobs,
                                std::optional<bool> h_eps_semisimple) {
  CheckReport r("growth");
  const auto sizes = ball_growth(gens, n_max, budget_mb * 1024 * 1024, jobs);
  bool monotone = sizes.front() == 1;
  for (std::size_t n = 1; n < sizes.size(); ++n)
    monotone = monotone && sizes[n] >= sizes[n - 1];
  r.add("ball_sizes", monotone, std::to_string(sizes.size()) + " radii");
  const GrowthClass cls = classify_growth(sizes);
  r.add("classified", cls.kind != GrowthKind::Inconclusive, to_string(cls.kind));
  GrowthVerdicts v = verdicts(gens, cls, h_eps_semisimple.value_or(false), sizes);
  if (!h_eps_semisimple) {
    v.regular = "n/a";
    v.reason = "no datum given";
  }
  auto &ev = r.evidence();
  ev["generators"] = io::characters_json(gens);
  ev["n_max"] = n_max;
  ev["sizes"] = sizes;
  ev["classification"] = {
      {"kind", to_string(cls.kind)},
      {"degree",
       cls.kind == GrowthKind::Polynomial ? io::json(cls.degree) : io::json()},
      {"diagnostics", cls.diagnostics}};
  ev["verdicts"] = to_json(v);
  return r;
}

/// Runs checks of one scenario. Math failures and input errors raised inside
/// a check become failing entries; TheoremViolation and
/// InternalInconsistency propagate to the caller.
class ScenarioRunner {
public:
  ScenarioRunner(Scenario s, RunOptions opt) : s_(std::move(s)), opt_(opt) {}

  const Scenario &scenario() const noexcept { return s_; }

  /// Runs `validate` and then `checks` in declared order (concurrently when
  /// jobs > 1). With on_twisted, the checks see the twisted system and the
  /// twist construction is reported under "twist".
  RunResult run(const std::vector<std::string> &checks, bool on_twisted = false) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    io::json out_checks = io::json::array();
    io::json timing = io::json::object();
    io::json extra = io::json::object();
    bool all_pass = true;

    auto timed = [&](const std::string &name, auto &&fn) {
      const auto a = clock::now();
      io::json j = fn();
      timing[name] = std::chrono::duration<double, std::milli>(clock::now() - a).count();
      return j;
    };

    io::json v = timed("validate", [&] { return validate(); });
    all_pass = all_pass && v["status"] == "pass";
    out_checks.push_back(v);

    std::vector<std::string> rest;
    for (const auto &c : checks)
      if (c != "validate")
        rest.push_back(c);

    if (v["status"] != "pass") {
      for (const auto &c : rest)
        out_checks.push_back({{"name", c},
                              {"status", "skipped"},
                              {"entries", io::json::array()},
                              {"evidence", {{"reason", "validate failed"}}}});
      if (!rest.empty())
        all_pass = false;
    } else {
      build_system();
      const GradedSystem *target = sys_.get();
      if (on_twisted) {
        io::json tw = timed("twist", [&] { return twist_construction(); });
        extra["twist"] = tw;
        all_pass = all_pass && tw["status"] == "pass";
        target = twisted_.get();
      }
      std::vector<io::json> results(rest.size());
      std::vector<double> ms(rest.size());
      auto one = [&, target](std::size_t i) {
        const auto a = clock::now();
        results[i] = target ? dispatch(rest[i], *target)
                            : skipped(rest[i], "twisted system unavailable");
        ms[i] = std::chrono::duration<double, std::milli>(clock::now() - a).count();
      };
      const std::size_t jobs = std::max<std::size_t>(1, opt_.jobs);
      for (std::size_t start = 0; start < rest.size(); start += jobs) {
        const std::size_t stop = std::min(rest.size(), start + jobs);
        if (jobs == 1) {
          one(start);
          continue;
        }
        std::vector<std::future<void>> fs;
        for (std::size_t i = start; i < stop; ++i)
          fs.push_back(std::async(std::launch::async, one, i));
        for (auto &f : fs)
          f.get();
      }
      for (std::size_t i = 0; i < rest.size(); ++i) {
        all_pass = all_pass && results[i]["status"] == "pass";
        out_checks.push_back(std::move(results[i]));
        timing[rest[i]] = ms[i];
      }
    }

    RunResult r;
    r.exit_code = all_pass ? 0 : 1;
    io::json &rep = r.report;
    rep["tool"] = "hflab";
    rep["version"] = kVersion;
    rep["scenario"] = scenario_json(s_);
    rep["checks"] = std::move(out_checks);
    for (auto &[k, x] : extra.items())
      rep[k] = x;
    rep["status"] = all_pass ? "pass" : "fail";
    rep["exit_code"] = r.exit_code;
    rep["timing"] = {
        {"total_ms",
         std::chrono::duration<double, std::milli>(clock::now() - t0).count()},
        {"checks", timing}};
    return r;
  }

private:
  static io::json skipped(const std::string &name, const std::string &why) {
    return {{"name", name},
            {"status", "skipped"},
            {"entries", io::json::array()},
            {"evidence", {{"reason", why}}}};
  }

  static io::json finish(const std::string &name, const CheckReport &r) {
    io::json j = r.to_json();
    j["name"] = name;
    return j;
  }

  static io::json raised(const std::string &name, const Error &e,
                         io::json evidence = io::json::object()) {
    evidence["error_kind"] = std::string(to_string(e.kind()));
    return {{"name", name},
            {"status", "fail"},
            {"entries",
             io::json::array({{{"name", "raised"},
                               {"status", "fail"},
                               {"detail", e.what()}}})},
            {"evidence", evidence}};
  }

  io::json validate() {
    CheckReport r = validate_datum(s_.datum);
    if (r.passed()) {
      const QLSModel m(s_.datum);
      std::string witness;
      auto check = [&](const Character &k, const std::string &where) {
        if (!witness.empty())
          return;
        try {
          m.check_character(k);
        } catch (const Error &e) {
          witness = where + " " + k.key() + ": " + e.what();
        }
      };
      for (const auto &g : s_.gamma_generators)
        check(g, "generator");
      for (const auto &k : s_.support)
        check(k, "support");
      if (s_.growth)
        for (const auto &g : s_.growth->generators)
          check(g, "growth generator");
      if (s_.mutation.zero_block) {
        check(s_.mutation.zero_block->first, "zero_block");
        check(s_.mutation.zero_block->second, "zero_block");
      }
      r.add("characters", witness.empty(), witness);
      r.evidence()["fiber_dim"] = m.fiber_dim();
    }
    return finish("validate", r);
  }

  void build_system() {
    model_ = std::make_shared<const QLSModel>(s_.datum);
    sys_ = std::make_shared<const GradedSystem>(model_, s_.gamma_generators,
                                                s_.mutation);
  }

  CocycleData make_cocycle() const {
    CocycleData c = s_.cocycle && s_.cocycle->kind == "bicharacter"
                        ? bicharacter_cocycle(*model_, s_.cocycle->exponents)
                        : CocycleData::trivial(model_->hopf_identity());
    if (s_.cocycle)
      for (const auto &[i, j, x] : s_.cocycle->mutate) {
        if (i >= model_->fiber_dim() || j >= model_->fiber_dim())
          fail(ErrorKind::ShapeError, "cocycle mutation index out of range");
        c.values(i, j) = x;
      }
    return c;
  }

  io::json twist_construction() {
    try {
      TwistResult t = twist_system(*sys_, make_cocycle(), s_.support);
      twisted_ = t.system;
      return finish("twist", t.report);
    } catch (const Error &e) {
      if (e.is_internal())
        throw;
      return raised("twist", e);
    }
  }

  io::json dispatch(const std::string &name, const GradedSystem &sys) {
    try {
      return finish(name, run_check(name, sys));
    } catch (const BudgetError &e) {
      return raised(name, e, {{"partial_sizes", e.partial()}});
    } catch (const Error &e) {
      if (e.is_internal())
        throw;
      return raised(name, e);
    }
  }

  CheckReport run_check(const std::string &name, const GradedSystem &sys) {
    const auto &sup = s_.support;
    if (name == "hopf_identity") {
      const HopfData h = sys.fibers().hopf_identity();
      CheckReport r = verify_hopf(h);
      r.evidence()["dim"] = h.dim();
      r.evidence()["basis_labels"] = h.labels;
      return r;
    }
    if (name == "strong_grading")
      return verify_strong_grading(sys, all_pairs(detail::dedupe(sup)));
    if (name == "exact_sequence")
      return verify_exact_sequence(sys, sup);
    if (name == "coradical")
      return verify_coradical_theorem(sys, sup);
    if (name == "cosemisimple")
      return cosemisimplicity_verdict(sys, sup).report;
    if (name == "normality")
      return normality_check(sys, sup);
    if (name == "coherence")
      return verify_coherence(sys, sup);
    if (name == "cleaving")
      return cleaving(sup);
    if (name == "twist")
      return twist_check();
    if (name == "growth")
      return growth();
    if (name == "finite_gamma")
      return finite_gamma(sys);
    fail(ErrorKind::SchemaError, "unknown check " + name);
  }

  CheckReport cleaving(const std::vector<Character> &sup) const {
    CheckReport r("cleaving");
    auto &done = r.evidence()["characters"] = io::json::array();
    for (const auto &k : detail::dedupe(sup)) {
      r.merge(verify_fiber_cleaving(*model_, k), k.key() + ".");
      done.push_back(k.key());
    }
    return r;
  }

  // construction report plus the verify suite on the twisted system
  CheckReport twist_check() {
    const TwistResult t = twist_system(*sys_, make_cocycle(), s_.support);
    CheckReport r = t.report;
    for (const auto &c : {"strong_grading", "exact_sequence", "coherence"})
      r.merge(run_check(c, *t.system), std::string("twisted.") + c + ".");
    return r;
  }

  CheckReport growth() const {
    GrowthSpec g;
    if (s_.growth)
      g = *s_.growth;
    else
      g.generators = s_.gamma_generators;
    std::size_t mb = g.budget_mb;
    if (opt_.budget_cap_mb)
      mb = std::min(mb, *opt_.budget_cap_mb);
    return growth_check(g.generators, g.n_max, mb, opt_.jobs,
                        is_semisimple(model_->hopf_identity()));
  }

  CheckReport finite_gamma(const GradedSystem &sys) const {
    CheckReport r("finite_gamma");
    const auto elems = enumerate_finite_gamma(sys);
    r.add("finite", elems.has_value(),
          elems ? std::to_string(elems->size()) + " elements"
                : "more than 64 elements");
    if (!elems)
      return r;
    const HopfData h = materialize(sys, *elems);
    r.merge(verify_hopf(h), "hopf.");
    auto &ev = r.evidence();
    ev["order"] = elems->size();
    ev["dim"] = h.dim();
    auto &keys = ev["elements"] = io::json::array();
    for (const auto &k : *elems)
      keys.push_back(k.key());
    ev["semisimple"] = is_semisimple(h);
    return r;
  }

  Scenario s_;
  RunOptions opt_;
  std::shared_ptr<const QLSModel> model_;
  std::shared_ptr<const GradedSystem> sys_;
  std::shared_ptr<const GradedSystem> twisted_;
};

/// True for files with a datum and a check list; anything else handed to
/// `growth` is read as {"generators", "n_max", "budget_mb", "conductor"}.
inline bool is_scenario(const io::json &j) {
  return j.is_object() && j.contains("datum") && j.contains("checks");
}

/// The standalone growth input.
inline RunResult run_growth_file(const io::json &j, const RunOptions &opt) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  if (!j.is_object())
    io::schema("growth input must be a JSON object");
  for (const auto &[k, v] : j.items())
    if (k != "generators" && k != "n_max" && k != "budget_mb" &&
        k != "conductor" && k != "name")
      io::schema("unknown growth field \"" + k + "\"");
  QLSDatum d;
  if (auto c = j.find("conductor"); c != j.end())
    d.conductor = static_cast<int>(io::as_int(*c, "conductor"));
  if (d.conductor < 1)
    io::schema("conductor must be positive");
  const io::json &gj = io::field(j, "generators");
  if (!gj.is_array() || gj.empty())
    io::schema("generators must be a nonempty array of characters");
  d.theta = static_cast<int>(io::field(gj[0], "t").size());
  const auto gens = io::parse_characters(gj, d, "generators");
  int n_max = growth_constants::default_n_max;
  if (auto n = j.find("n_max"); n != j.end())
    n_max = static_cast<int>(io::as_int(*n, "n_max"));
  std::size_t mb = 512;
  if (auto b = j.find("budget_mb"); b != j.end()) {
    const long long v = io::as_int(*b, "budget_mb");
    if (v <= 0)
      io::schema("budget_mb must be positive");
    mb = static_cast<std::size_t>(v);
  }
  if (opt.budget_cap_mb)
    mb = std::min(mb, *opt.budget_cap_mb);

  io::json check;
  try {
    check = growth_check(gens, n_max, mb, opt.jobs, std::nullopt).to_json();
  } catch (const BudgetError &e) {
    check = {{"status", "fail"},
             {"entries", io::json::array({{{"name", "raised"},
                                           {"status", "fail"},
                                           {"detail", e.what()}}})},
             {"evidence",
              {{"error_kind", "BudgetExceeded"}, {"partial_sizes", e.partial()}}}};
  } catch (const Error &e) {
    if (e.is_internal() || e.kind() == ErrorKind::SchemaError)
      throw;
    check = {{"status", "fail"},
             {"entries", io::json::array({{{"name", "raised"},
                                           {"status", "fail"},
                                           {"detail", e.what()}}})},
             {"evidence", {{"error_kind", std::string(to_string(e.kind()))}}}};
  }
  check["name"] = "growth";
  const double ms =
      std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  RunResult r;
  const bool pass = check["status"] == "pass";
  r.exit_code = pass ? 0 : 1;
  r.report["tool"] = "hflab";
  r.report["version"] = kVersion;
  r.report["input"] = {{"generators", io::characters_json(gens)},
                       {"n_max", n_max},
                       {"budget_mb", mb},
                       {"conductor", d.conductor}};
  r.report["checks"] = io::json::array({check});
  r.report["status"] = pass ? "pass" : "fail";
  r.report["exit_code"] = r.exit_code;
  r.report["timing"] = {{"total_ms", ms}, {"checks", {{"growth", ms}}}};
  return r;
}

/// H_eps as full Hopf data; any other fiber as its algebra, the coaction
/// Delta_{kappa,eps} = [[i, j, k, s]] (i in H_kappa, j in H_kappa, k in
/// H_eps) and S_kappa with its target character.
inline io::json fiber_json(const QLSModel &m, const Character &kappa) {
  if (kappa.is_identity())
    return io::hopf_json(m.hopf_identity());
  const auto f = m.fiber(kappa);
  const std::size_t d = m.fiber_dim();
  io::json j;
  j["kappa"] = io::character_json(kappa);
  j["dim"] = d;
  j["basis_labels"] = f->labels;
  j["mult"] = io::table_json(f->alg.mult, d);
  io::json unit = io::json::array();
  for (const auto &[k, x] : f->alg.unit)
    unit.push_back({k, io::scalar_json(x)});
  j["unit"] = unit;
  const auto co = m.delta(kappa, m.identity());
  io::json coaction = io::json::array();
  for (std::size_t i = 0; i < d; ++i)
    for (const auto &[jk, x] : co->col(i))
      coaction.push_back({i, jk / d, jk % d, io::scalar_json(x)});
  j["coaction"] = coaction;
  j["antipode"] = {{"target", io::character_json(char_inv(kappa))},
                   {"entries", io::matrix_json(*m.antipode(kappa))}};
  return j;
}

/// The report without its timing block, as compared by golden tests.
inline io::json strip_timing(io::json report) {
  report.erase("timing");
  return report;
}

/// One line per check.
inline std::string summary_table(const io::json &report) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %-8s %9s %10s\n", "check", "status",
                "entries", "ms");
  os << line;
  const io::json &timing = report["timing"]["checks"];
  auto row = [&](const io::json &c) {
    std::size_t ok = 0;
    for (const auto &e : c["entries"])
      ok += e["status"] == "pass" ? 1 : 0;
    const std::string name = c["name"].get<std::string>();
    const std::string counts =
        std::to_string(ok) + "/" + std::to_string(c["entries"].size());
    const double ms = timing.contains(name) ? timing[name].get<double>() : 0.0;
    std::snprintf(line, sizeof line, "%-16s %-8s %9s %10.1f\n", name.c_str(),
                  c["status"].get<std::string>().c_str(), counts.c_str(), ms);
    os << line;
    for (const auto &e : c["entries"])
      if (e["status"] != "pass")
        os << "    " << e["name"].get<std::string>() << ": "
           << e["detail"].get<std::string>() << "\n";
  };
  if (report.contains("twist"))
    row(report["twist"]);
  for (const auto &c : report["checks"])
    row(c);
  os << "status: " << report["status"].get<std::string>()
     << " (exit " << report["exit_code"].get<int>() << ")\n";
  return os.str();
}

inline void write_report(const io::json &report, const std::string &path) {
  std::ofstream out(path);
  if (!out)
    fail(ErrorKind::SchemaError, "cannot write " + path);
  out << report.dump(2) << "\n";
}

} // namespace hflab
