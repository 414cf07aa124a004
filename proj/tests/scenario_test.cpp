#include "hflab/scenario.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

using namespace hflab;
using namespace hflab::testing;
namespace fs = std::filesystem;
using io::json;

namespace {

const fs::path root = HFLAB_SOURCE_DIR;

std::vector<fs::path> bundled() {
  std::vector<fs::path> out;
  for (const auto &e : fs::directory_iterator(root / "scenarios"))
    if (e.path().extension() == ".json")
      out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

RunResult run_file(const fs::path &p, unsigned jobs = 1) {
  ScenarioRunner r(load_scenario(p.string()), {jobs, std::nullopt});
  return r.run(r.scenario().checks);
}

const json &check(const json &report, const std::string &name) {
  for (const auto &c : report["checks"])
    if (c["name"] == name)
      return c;
  throw std::runtime_error("no check " + name);
}

int cli(const std::string &args) {
  const std::string cmd = std::string(HFLAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / "hflab_scenario_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(Scenarios, AtLeastEightBundledWithGoldens) {
  const auto files = bundled();
  EXPECT_GE(files.size(), 8u);
  for (const auto &f : files)
    EXPECT_TRUE(fs::exists(root / "tests/golden" / f.filename())) << f;
}

TEST(Scenarios, ReportsMatchGoldens) {
  for (const auto &f : bundled()) {
    const RunResult r = run_file(f);
    EXPECT_EQ(r.exit_code, 0) << f;
    const json golden = read_json_file((root / "tests/golden" / f.filename()).string());
    EXPECT_EQ(strip_timing(r.report), golden) << f;
  }
}

TEST(Scenarios, DeterministicAcrossRunsAndJobs) {
  for (const auto &name : {"klein.json", "twisted_klein.json", "exponential.json"}) {
    const fs::path f = root / "scenarios" / name;
    const json a = strip_timing(run_file(f).report);
    const json b = strip_timing(run_file(f).report);
    const json c = strip_timing(run_file(f, 4).report);
    EXPECT_EQ(a.dump(), b.dump()) << name;
    EXPECT_EQ(a.dump(), c.dump()) << name;
  }
}

// Golden values against closed forms computed here.
TEST(Scenarios, GoldenGrowthAgainstClosedForms) {
  auto sizes = [](const std::string &name) {
    const json g = read_json_file((root / "tests/golden" / name).string());
    return check(g, "growth")["evidence"]["sizes"].get<std::vector<std::size_t>>();
  };
  const auto z = sizes("sweedler_z.json");
  const auto z2 = sizes("sweedler_z2.json");
  ASSERT_EQ(z.size(), 13u);
  ASSERT_EQ(z2.size(), 13u);
  for (std::size_t n = 0; n <= 12; ++n) {
    EXPECT_EQ(z[n], 2 * n + 1);
    EXPECT_EQ(z2[n], 2 * n * n + 2 * n + 1);
  }
  const auto fin = sizes("group_only_finite.json");
  EXPECT_EQ(fin[0], 1u);
  for (std::size_t n = 1; n < fin.size(); ++n)
    EXPECT_EQ(fin[n], 2u);
}

TEST(Scenarios, GoldenVerdictTable) {
  auto verdicts = [](const std::string &name) {
    const json g = read_json_file((root / "tests/golden" / name).string());
    return check(g, "growth")["evidence"]["verdicts"];
  };
  const json a = verdicts("group_only_z2.json");
  EXPECT_EQ(a["gk"], "2");
  EXPECT_EQ(a["noetherian"], "yes");
  EXPECT_EQ(a["regular"], "yes");
  EXPECT_EQ(a["gldim_bound"], 2);
  const json b = verdicts("sweedler_z.json");
  EXPECT_EQ(b["gk"], "1");
  EXPECT_EQ(b["noetherian"], "yes");
  EXPECT_EQ(b["regular"], "no");
  const json c = verdicts("exponential.json");
  EXPECT_EQ(c["gk"], "infinite");
  EXPECT_EQ(c["noetherian"], "undetermined");
  EXPECT_EQ(c["regular"], "n/a");
}

// With every s = 0 each component is the dual of a fiber with x^N = 0, whose
// corad_n has dimension N (n + 1).
TEST(Scenarios, GoldenCoradicalDims) {
  auto dims = [](const std::string &name) {
    const json g = read_json_file((root / "tests/golden" / name).string());
    std::vector<std::vector<std::size_t>> out;
    for (const auto &c : check(g, "coradical")["evidence"]["component_dims"])
      out.push_back(c["dims"].get<std::vector<std::size_t>>());
    return out;
  };
  for (const auto &d : dims("sweedler_z.json"))
    EXPECT_EQ(d, (std::vector<std::size_t>{2, 4}));
  for (const auto &d : dims("cyclic3.json"))
    EXPECT_EQ(d, (std::vector<std::size_t>{3, 6, 9}));
  for (const auto &d : dims("group_only_finite.json"))
    EXPECT_EQ(d, (std::vector<std::size_t>{2}));
}

TEST(Scenarios, TrivialTwistReportEqualsVerify) {
  Scenario s = load_scenario((root / "scenarios/sweedler_z.json").string());
  ScenarioRunner a(s, {}), b(s, {});
  const json v = a.run(verify_suite()).report;
  const json t = b.run(verify_suite(), true).report;
  EXPECT_EQ(v["checks"], t["checks"]);
  EXPECT_EQ(t["twist"]["status"], "pass");
}

TEST(Scenarios, MutatedFixturesFail) {
  const std::map<std::string, std::string> expect{
      {"wrong_antipode.json", "normality"},
      {"zeroed_block.json", "strong_grading"},
      {"broken_cocycle.json", "twist"},
      {"bad_centrality.json", "validate"}};
  for (const auto &[file, name] : expect) {
    const RunResult r = run_file(root / "tests/fixtures" / file);
    EXPECT_EQ(r.exit_code, 1) << file;
    EXPECT_EQ(check(r.report, name)["status"], "fail") << file;
  }
  const RunResult bad = run_file(root / "tests/fixtures/bad_centrality.json");
  EXPECT_EQ(check(bad.report, "strong_grading")["status"], "skipped");
  bool found = false;
  for (const auto &e : check(bad.report, "validate")["entries"])
    if (e["name"] == "centrality") {
      found = true;
      EXPECT_EQ(e["status"], "fail");
      EXPECT_NE(e["detail"].get<std::string>().find("pair 1,2"), std::string::npos);
    }
  EXPECT_TRUE(found);
}

TEST(Scenarios, BudgetCapFailsGrowthWithPartialSizes) {
  ScenarioRunner r(load_scenario((root / "scenarios/exponential.json").string()),
                   {1, std::size_t{1}});
  const RunResult out = r.run({"growth"});
  EXPECT_EQ(out.exit_code, 1);
  const json &g = check(out.report, "growth");
  EXPECT_EQ(g["evidence"]["error_kind"], "BudgetExceeded");
  const auto partial = g["evidence"]["partial_sizes"].get<std::vector<std::size_t>>();
  const auto full = ball_growth({chr1(2, 0), chr1(1, 1)}, 12);
  ASSERT_FALSE(partial.empty());
  for (std::size_t i = 0; i < partial.size(); ++i)
    EXPECT_EQ(partial[i], full[i]);
}

TEST(ScenarioParse, RejectsBadInput) {
  const json good = read_json_file((root / "scenarios/sweedler_z.json").string());
  auto expect_schema = [](const json &j, const char *what) {
    try {
      (void)parse_scenario(j);
      ADD_FAILURE() << what;
    } catch (const Error &e) {
      EXPECT_EQ(e.kind(), ErrorKind::SchemaError) << what;
    }
  };
  json j = good;
  j["checks"].push_back("telepathy");
  expect_schema(j, "unknown check");
  j = good;
  j["colour"] = 1;
  expect_schema(j, "unknown field");
  j = good;
  j["support"][1]["t"] = {"2", "3"};
  expect_schema(j, "rank mismatch");
  j = good;
  j["support"][1]["t"] = {"0"};
  expect_schema(j, "t = 0");
  j = good;
  j["gamma_generators"][0]["s"] = {"1/0"};
  expect_schema(j, "bad scalar");
  j = good;
  j["datum"]["exponents"] = {{1, 1}};
  expect_schema(j, "ragged grid");
  j = good;
  j["datum"]["mode"] = "lie";
  expect_schema(j, "mode");
  j = good;
  j.erase("datum");
  expect_schema(j, "missing datum");
}

TEST(ScenarioParse, DefaultSupportIsIdentityAndGenerators) {
  const Scenario s = load_scenario((root / "scenarios/cyclic3.json").string());
  ASSERT_EQ(s.support.size(), 3u);
  EXPECT_TRUE(s.support[0].is_identity());
  EXPECT_EQ(s.support[1], chr1(2, 0));
  EXPECT_EQ(s.support[2], chr1(mpq_class(1, 2), 0));
  EXPECT_EQ(s.checks.front(), "validate");
}

TEST(JsonIo, HopfRoundTripOnRandomFibers) {
  std::mt19937 rng(5);
  for (const QLSDatum &d : {sweedler_datum(), cyclic3_datum(), klein_datum()}) {
    const QLSModel m(d);
    const HopfData h = m.hopf_identity();
    const HopfData back = io::parse_hopf(io::hopf_json(h), d.conductor);
    EXPECT_EQ(back.labels, h.labels);
    EXPECT_EQ(back.alg.mult, h.alg.mult);
    EXPECT_EQ(back.alg.unit, h.alg.unit);
    EXPECT_EQ(back.coalg.comult, h.coalg.comult);
    EXPECT_EQ(back.coalg.counit, h.coalg.counit);
    EXPECT_EQ(*back.antipode, *h.antipode);
    for (int i = 0; i < 3; ++i) {
      const Character k = random_character(rng, m);
      EXPECT_EQ(io::parse_character(io::character_json(k), d), k);
    }
  }
}

TEST(JsonIo, ScalarForms) {
  EXPECT_EQ(io::parse_scalar(json(3), 4), Scalar(3));
  EXPECT_EQ(io::parse_scalar(json("z"), 4), Scalar::root_of_unity(4, 1));
  EXPECT_THROW((void)io::parse_scalar(json(1.5), 4), Error);
  EXPECT_THROW((void)io::parse_scalar(json("z +"), 4), Error);
  EXPECT_THROW((void)io::parse_hopf(json{{"dim", 1}}, 2), Error);
}

// The Sweedler algebra by hand: basis 1, g, x, xg with g^2 = 1, x^2 = 0,
// gx = -xg, x primitive-skew: Delta x = x (x) 1 + g (x) x.
TEST(Fiber, GoldenIsTheSweedlerAlgebra) {
  const json g = read_json_file((root / "tests/golden/fiber_sweedler_eps.json").string());
  const HopfData h = io::parse_hopf(g, 2);
  ASSERT_EQ(h.dim(), 4u);
  EXPECT_TRUE(verify_hopf(h).passed());
  const std::size_t one = 0, gg = 1, x = 2, xg = 3;
  EXPECT_EQ(h.alg.mul(gg, gg), unit_vec(one));
  EXPECT_TRUE(h.alg.mul(x, x).empty());
  EXPECT_EQ(h.alg.mul(gg, x), scaled(unit_vec(xg), Scalar(-1)));
  EXPECT_EQ(h.alg.mul(x, gg), unit_vec(xg));
  SparseVec dx;
  axpy(dx, x * 4 + one, Scalar(1));
  axpy(dx, gg * 4 + x, Scalar(1));
  EXPECT_EQ(h.coalg.comult[x], dx);

  const fs::path out = scratch("fiber.json");
  EXPECT_EQ(cli("fiber " + (root / "scenarios/sweedler_z.json").string() +
                " --char '{\"t\": [\"1\"], \"s\": [\"0\"]}' --out " + out.string()),
            0);
  EXPECT_EQ(read_json_file(out.string()), g);
}

TEST(Cli, ExitCodes) {
  const std::string s = (root / "scenarios").string() + "/";
  const std::string f = (root / "tests/fixtures").string() + "/";
  const std::string out = " --out " + scratch("r.json").string();
  EXPECT_EQ(cli("run " + s + "sweedler_z.json" + out), 0);
  EXPECT_EQ(cli("validate " + s + "klein.json" + out), 0);
  EXPECT_EQ(cli("verify " + s + "cyclic3.json" + out), 0);
  EXPECT_EQ(cli("growth " + s + "sweedler_z2.json" + out), 0);
  EXPECT_EQ(cli("twist " + s + "twisted_klein.json" + out), 0);
  EXPECT_EQ(cli("run " + f + "wrong_antipode.json" + out), 1);
  EXPECT_EQ(cli("run " + f + "zeroed_block.json" + out), 1);
  EXPECT_EQ(cli("run " + f + "broken_cocycle.json" + out), 1);
  EXPECT_EQ(cli("run " + f + "bad_centrality.json" + out), 1);
  EXPECT_EQ(cli("validate " + f + "bad_centrality.json" + out), 1);
  EXPECT_EQ(cli("run " + f + "malformed.json" + out), 2);
  EXPECT_EQ(cli("fiber " + s + "sweedler_z.json --char '{\"t\": [\"0\"]}'"), 2);
  EXPECT_EQ(cli("fiber " + s + "sweedler_z.json --char 'nope'"), 2);
  EXPECT_EQ(cli("fiber " + s + "sweedler_z.json --char '{\"t\": [\"2\"], \"s\": [\"1\"]}'"), 0);
}

TEST(Cli, GrowthInputAndEnvironmentBudget) {
  const fs::path in = scratch("growth_in.json"), out = scratch("growth_out.json");
  std::ofstream(in) << R"({"generators": [{"t": ["2"], "s": ["0"]},
                                          {"t": ["3"], "s": ["0"]}],
                          "n_max": 12, "budget_mb": 512})";
  EXPECT_EQ(cli("growth " + in.string() + " --out " + out.string()), 0);
  const json r = read_json_file(out.string());
  const json &ev = check(r, "growth")["evidence"];
  EXPECT_EQ(ev["classification"]["kind"], "polynomial");
  EXPECT_EQ(ev["classification"]["degree"], 2);
  EXPECT_EQ(ev["verdicts"]["regular"], "n/a");

  EXPECT_EQ(cli("growth " + (root / "scenarios/exponential.json").string() +
                " --out " + out.string()),
            0);
  ::setenv("HFLAB_BUDGET_MB", "1", 1);
  EXPECT_EQ(cli("growth " + (root / "scenarios/exponential.json").string() +
                " --out " + out.string()),
            1);
  ::unsetenv("HFLAB_BUDGET_MB");
  EXPECT_EQ(check(read_json_file(out.string()), "growth")["evidence"]["error_kind"],
            "BudgetExceeded");
}

TEST(Cli, RunWritesReportWithTiming) {
  const fs::path out = scratch("timed.json");
  ASSERT_EQ(cli("run " + (root / "scenarios/group_only_finite.json").string() +
                " --jobs 3 --out " + out.string()),
            0);
  const json r = read_json_file(out.string());
  EXPECT_TRUE(r["timing"].contains("total_ms"));
  EXPECT_EQ(strip_timing(r),
            read_json_file((root / "tests/golden/group_only_finite.json").string()));
}

} // namespace
