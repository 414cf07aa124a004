// hflab: scenario runner and inspection tool.
//
// Exit codes: 0 every check passed, 1 a check failed, 2 bad input,
// 3 a theorem-level invariant broke (a bug).

#include "hflab/hflab.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace {

using hflab::io::json;

int exit_for(const hflab::Error &e) {
  if (e.is_internal())
    return 3;
  switch (e.kind()) {
  case hflab::ErrorKind::SchemaError:
  case hflab::ErrorKind::ShapeError:
  case hflab::ErrorKind::InvalidScalar:
  case hflab::ErrorKind::ConductorMismatch:
  case hflab::ErrorKind::DatumMismatch:
    return 2;
  default:
    return 1;
  }
}

void emit(const hflab::RunResult &r, const std::string &out) {
  std::cout << hflab::summary_table(r.report);
  if (out.empty())
    return;
  const std::filesystem::path p(out);
  if (p.has_parent_path())
    std::filesystem::create_directories(p.parent_path());
  hflab::write_report(r.report, out);
  std::cout << "report: " << out << "\n";
}

hflab::RunOptions options(unsigned jobs) {
  return {std::max(1u, jobs), hflab::budget_cap_from_env()};
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"hflab: fibers, graded systems and growth of quantum linear "
               "space data"};
  app.require_subcommand(1);

  std::string file, out, chr;
  unsigned jobs = 1;

  auto add_common = [&](CLI::App *c, bool parallel) {
    c->add_option("file", file, "scenario JSON")->required()->check(CLI::ExistingFile);
    c->add_option("--out", out, "write the JSON report here");
    if (parallel)
      c->add_option("--jobs", jobs, "checks run concurrently")->check(CLI::PositiveNumber);
  };
  auto *run = app.add_subcommand("run", "run the scenario's checks");
  add_common(run, true);
  auto *validate = app.add_subcommand("validate", "datum checks only");
  add_common(validate, false);
  auto *fiber = app.add_subcommand("fiber", "dump the fiber at a character");
  add_common(fiber, false);
  fiber->add_option("--char", chr, R"(character JSON, e.g. '{"t":["2"],"s":["0"]}')")
      ->required();
  auto *verify = app.add_subcommand("verify", "graded-system suite on the support");
  add_common(verify, true);
  auto *growth = app.add_subcommand("growth", "ball growth and verdicts");
  add_common(growth, true);
  auto *twist = app.add_subcommand("twist", "graded-system suite on the twisted system");
  add_common(twist, true);

  CLI11_PARSE(app, argc, argv);

  try {
    const json input = hflab::read_json_file(file);
    if (*growth && !hflab::is_scenario(input)) {
      const auto r = hflab::run_growth_file(input, options(jobs));
      emit(r, out);
      return r.exit_code;
    }
    hflab::Scenario s = hflab::parse_scenario(input);

    if (*fiber) {
      json cj;
      try {
        cj = json::parse(chr);
      } catch (const json::parse_error &e) {
        hflab::io::schema(std::string("--char: ") + e.what());
      }
      const hflab::Character k = hflab::io::parse_character(cj, s.datum);
      const auto check = hflab::validate_datum(s.datum);
      if (!check.passed()) {
        std::cerr << "datum fails validation:\n";
        for (const auto &e : check.entries())
          if (!e.passed)
            std::cerr << "  " << e.name << ": " << e.detail << "\n";
        return 1;
      }
      const hflab::QLSModel m(s.datum);
      m.check_character(k);
      const std::string text = hflab::fiber_json(m, k).dump(2) + "\n";
      if (out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(out) << text;
      }
      return 0;
    }

    std::vector<std::string> checks;
    bool on_twisted = false;
    if (*run) {
      checks = s.checks;
      if (out.empty() && s.output)
        out = *s.output;
    } else if (*validate) {
      checks = {"validate"};
    } else if (*verify) {
      checks = hflab::verify_suite();
    } else if (*growth) {
      checks = {"growth"};
    } else {
      checks = hflab::verify_suite();
      on_twisted = true;
    }
    hflab::ScenarioRunner runner(std::move(s), options(jobs));
    const auto r = runner.run(checks, on_twisted);
    emit(r, out);
    return r.exit_code;
  } catch (const hflab::Error &e) {
    std::cerr << "hflab: " << e.what() << "\n";
    return exit_for(e);
  } catch (const json::exception &e) {
    std::cerr << "hflab: SchemaError: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "hflab: InternalInconsistency: " << e.what() << "\n";
    return 3;
  }
}
