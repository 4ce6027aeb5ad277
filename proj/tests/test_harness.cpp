#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hjj/fixtures.hpp"
#include "hjj/harness.hpp"
#include "hjj/problem_io.hpp"

using namespace hjj;
namespace fs = std::filesystem;

namespace {

fs::path scratch(std::string const& name) {
  fs::path const p = fs::temp_directory_path() / ("hjj_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(fs::path const& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fixture_path(std::string const& name) {
  return fs::path(HJJ_FIXTURE_DIR) / (name + ".json");
}

int run_quiet(std::string const& sub, fs::path const& problem, fs::path const& out) {
  std::ostringstream o;
  std::ostringstream e;
  RunOptions opts;
  opts.out_dir = out;
  return run_file(sub, problem, opts, o, e);
}

std::string const kMinimal = R"({
  "schema_version": 1,
  "name": "minimal",
  "K": 2,
  "edges": [
    {"length": 1.0, "n_cells": 100, "far_bc": {"kind": "neumann", "slope": 0.0},
     "hamiltonian": {"family": "abs_shift", "b": 0.0, "c": 1.0}},
    {"length": 1.0, "n_cells": 100, "far_bc": {"kind": "neumann", "slope": 0.0},
     "hamiltonian": {"family": "abs_shift", "b": 0.0, "c": 2.0}}
  ],
  "junction": {"kind": "state_constraint"}
})";

}  // namespace

TEST_CASE("fixture files round-trip") {
  for (auto const& name : fixture_names()) {
    CAPTURE(name);
    auto const p = load_problem(fixture_path(name));
    CHECK(same_problem(p, builtin_fixture(name)));
    CHECK(same_problem(parse_problem(write_problem(p)), p));
    CHECK(write_problem(p) == slurp(fixture_path(name)));
  }
}

TEST_CASE("problem validation") {
  auto const p = parse_problem(kMinimal);
  CHECK(p.K() == 2);
  CHECK(p.hamiltonians.size() == 2);

  auto expect_error = [](std::string const& text, std::string const& needle) {
    try {
      parse_problem(text);
      FAIL("accepted: " << needle);
    } catch (ProblemError const& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  std::string sweep = kMinimal;
  sweep.insert(sweep.rfind('}'), R"(, "viscous": {"eps_list": [0.05, 0.1, 0.2]})");
  expect_error(sweep, "eps_list must decrease");

  std::string family = kMinimal;
  family.replace(family.find("\"abs_shift\""), 11, "\"cubic\"");
  expect_error(family, "cubic");

  std::string length = kMinimal;
  length.replace(length.find("1.0"), 3, "-1.0");
  expect_error(length, "edges[0].length");

  std::string extra = kMinimal;
  extra.insert(extra.rfind('}'), R"(, "colour": "red")");
  expect_error(extra, "colour");

  try {
    parse_problem("{\n  \"name\": \"x\",\n  \"edges\": [ 1, ]\n}");
    FAIL("accepted malformed JSON");
  } catch (ProblemError const& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() > 0);
  }

  std::string expr = kMinimal;
  expr.replace(expr.find(R"("family": "abs_shift", "b": 0.0, "c": 1.0)"), 41,
               R"("family": "expression", "expr": "abs(p) - 1 - 0.5*x")");
  CHECK(parse_problem(expr).hamiltonians[0](0.0, -1.0) == doctest::Approx(-0.5));
  std::string bad = kMinimal;
  bad.replace(bad.find(R"("family": "abs_shift", "b": 0.0, "c": 1.0)"), 41,
              R"("family": "expression", "expr": "abs(q) - 1")");
  CHECK_THROWS(parse_problem(bad));
}

TEST_CASE("exit codes") {
  auto const out = scratch("exit");
  CHECK(run_quiet("solve-junction", fixture_path("abs_pair"), out) == kExitOk);
  CHECK(run_quiet("flux-limited", fixture_path("abs_pair"), out / "flux") == kExitInvalid);
  CHECK(run_quiet("viscous-sweep", fixture_path("abs_pair"), out / "visc") == kExitInvalid);
  CHECK(run_quiet("solve-junction", out / "missing.json", out) == kExitInvalid);

  fs::path const broken = out / "broken.json";
  std::ofstream(broken) << "{ \"edges\": ";
  CHECK(run_quiet("solve-junction", broken, out) == kExitInvalid);

  CHECK_THROWS_AS(builtin_fixture("nope"), std::invalid_argument);

  RunOptions opts;
  opts.out_dir = out / "tight";
  opts.tol = 1e-30;
  auto const r = run("solve-edge", builtin_fixture("dirichlet_convergence"), opts);
  CHECK(r.exit_code == kExitNotConverged);
  CHECK(r.report["status"] == "not_converged");
  CHECK(r.report["partial"] == true);
}

TEST_CASE("solve-junction report") {
  auto const out = scratch("junction");
  RunOptions opts;
  opts.out_dir = out;
  auto const r = run("solve-junction", builtin_fixture("abs_pair"), opts);
  CHECK(r.exit_code == kExitOk);
  double const u0 = r.report["junction"]["node_value"].get<double>();
  CHECK(std::abs(u0 - 1.0) <= 2e-2);
  CHECK(all_finite(r.report));
  CHECK(r.report["metadata"]["non_finite_fields"] == 0);
  CHECK(fs::exists(out / "report.json"));
  CHECK(fs::exists(out / "profile.csv"));
  CHECK(fs::exists(out / "profile.gp"));
  std::string const csv = slurp(out / "profile.csv");
  CHECK(csv.rfind("edge_index,x,u\n", 0) == 0);
  for (auto const& e : fs::directory_iterator(out)) {
    CHECK(e.path().extension() != ".tmp");
  }
}

TEST_CASE("determinism") {
  for (std::string sub : {"solve-junction", "viscous-sweep", "convergence"}) {
    CAPTURE(sub);
    std::string const fixture = sub == "viscous-sweep" ? "viscous_abs"
                                : sub == "convergence" ? "dirichlet_convergence"
                                                       : "abs_mixed3";
    auto const a = scratch(sub + "_a");
    auto const b = scratch(sub + "_b");
    REQUIRE(run_quiet(sub, fixture_path(fixture), a) == kExitOk);
    REQUIRE(run_quiet(sub, fixture_path(fixture), b) == kExitOk);
    for (auto const& e : fs::directory_iterator(a)) {
      if (e.path().extension() == ".csv") {
        CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
      }
    }
  }
}

TEST_CASE("sweep and convergence reports") {
  auto const out = scratch("sweep");
  RunOptions opts;
  opts.out_dir = out;
  auto const s = run("viscous-sweep", builtin_fixture("viscous_abs"), opts);
  CHECK(s.exit_code == kExitOk);
  CHECK(slurp(out / "sweep.csv").rfind("epsilon,node_value,kirchhoff_sum\n", 0) == 0);
  CHECK(s.report["viscous"]["classification"] == "SelectsStateConstraint");

  opts.out_dir = out / "conv";
  auto const c = run("convergence", builtin_fixture("dirichlet_convergence"), opts);
  CHECK(c.exit_code == kExitOk);
  CHECK(c.report["convergence"]["min_observed_order"].get<double>() >= 0.9);
  CHECK(slurp(out / "conv" / "convergence.csv").rfind("h,error,observed_order\n", 0) == 0);
}

TEST_CASE("plot scripts") {
  auto const out = scratch("plots");
  RunOptions opts;
  opts.out_dir = out;
  auto const j = run("solve-junction", builtin_fixture("abs_mixed3"), opts);
  std::string const profile = plot_script(j.report, "profile");
  CHECK(profile.find("edge 0") != std::string::npos);
  CHECK(profile.find("edge 2") != std::string::npos);
  CHECK(profile.find("profile.csv") != std::string::npos);

  auto const v = run("viscous-sweep", builtin_fixture("viscous_abs"), opts);
  CHECK(plot_script(v.report, "sweep").find("set logscale x") != std::string::npos);

  auto const c = run("convergence", builtin_fixture("dirichlet_convergence"), opts);
  std::string const conv = plot_script(c.report, "convergence");
  CHECK(conv.find("set logscale xy") != std::string::npos);
  CHECK(conv.find("fitted slope") != std::string::npos);

  CHECK_THROWS_WITH_AS(plot_script(j.report, "sweep"), doctest::Contains("'sweep'"),
                       std::invalid_argument);
}

TEST_CASE("observed orders") {
  auto const o = observed_orders({0.1, 0.05, 0.025}, {0.4, 0.1, 0.025});
  REQUIRE(o.size() == 2);
  CHECK(o[0] == doctest::Approx(2.0));
  CHECK(o[1] == doctest::Approx(2.0));
  Report r = {{"a", 1.0}, {"b", {1.0, 2.0}}};
  CHECK(all_finite(r));
  r["b"].push_back(std::nan(""));
  CHECK_FALSE(all_finite(r));
}

TEST_CASE("write_atomic replaces content") {
  auto const out = scratch("atomic");
  write_atomic(out / "f.txt", "one");
  write_atomic(out / "f.txt", "two");
  CHECK(slurp(out / "f.txt") == "two");
}
