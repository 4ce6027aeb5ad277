#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hjj/edge_solver.hpp"
#include "hjj/fatten2d.hpp"
#include "hjj/fixtures.hpp"
#include "hjj/harness.hpp"
#include "hjj/junction_solver.hpp"
#include "hjj/properties.hpp"
#include "hjj/viscous.hpp"

using namespace hjj;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

class Detail {
 public:
  template <class T>
  Detail& operator<<(T const& v) {
    out_ << v;
    return *this;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

Hamiltonian builtin(char const* family, double b, double c) {
  double const p[2] = {b, c};
  return make_builtin(family, p);
}

double min_of(std::vector<double> const& v) { return *std::min_element(v.begin(), v.end()); }

constexpr double kTol = SolveParams{}.tol;

Outcome criterion1() {
  auto const h = builtin("abs_shift", 0, 1);
  EdgeSpec const edge{1.0, 400, Neumann{0.0}};
  auto const sc = solve_edge(h, edge, StateConstraint{});
  auto const d = solve_edge(h, edge, Dirichlet{0.0});
  double e1 = 0.0;
  double e2 = 0.0;
  for (int j = 0; j <= 400; ++j) {
    e1 = std::max(e1, std::abs(sc.u.values[j] - 1.0));
    e2 = std::max(e2, std::abs(d.u.values[j] - (1.0 - std::exp(edge.x(j)))));
  }
  bool const ok = sc.report.converged && d.report.converged && e1 <= 1e-2 && e2 <= 1e-2;
  return {ok, (Detail() << "state-constraint error " << e1 << ", Dirichlet error " << e2).str()};
}

Outcome criterion2() {
  bool ok = true;
  Detail d;
  for (auto const& name : state_constraint_fixture_names()) {
    double err[2];
    int k = 0;
    for (double h : {1.0 / 400, 1.0 / 800}) {
      auto const p = builtin_fixture(name).junction_problem().with_spacing(h);
      auto const direct = solve_junction_direct(p);
      auto const cons = solve_junction_constructive(p);
      ok = ok && direct.report.converged && cons.report.converged;
      err[k++] = std::abs(direct.u.node_value - min_of(cons.sc_values));
    }
    bool const fine = err[0] <= 2e-2 && err[1] <= std::max(err[0], 10.0 * kTol);
    ok = ok && fine;
    d << name << " " << err[0] << " -> " << err[1] << "; ";
  }
  return {ok, d.str()};
}

Outcome criterion3() {
  bool ok = true;
  double worst = 0.0;
  for (auto const& name : state_constraint_fixture_names()) {
    for (double h : {1.0 / 200, 1.0 / 400}) {
      auto const p = builtin_fixture(name).junction_problem().with_spacing(h);
      auto const direct = solve_junction_direct(p);
      auto const cons = solve_junction_constructive(p);
      double const dist = max_distance(direct.u, cons.u);
      worst = std::max(worst, dist);
      ok = ok && direct.report.converged && cons.report.converged &&
           dist <= std::max(5e-2, 3.0 * std::sqrt(h));
    }
  }
  return {ok, (Detail() << "worst max-norm distance " << worst).str()};
}

Outcome criterion4() {
  bool ok = true;
  Detail d;
  EdgeSpec const edge{1.0, 400};
  for (auto const& h : {builtin("abs_shift", 0, 1), builtin("quadratic", 1, 1)}) {
    double const sc = solve_edge(h, edge, StateConstraint{}).u.node_value();
    std::vector<double> cs;
    for (int k = 0; k < 8; ++k) {
      cs.push_back(sc - 0.1 - 0.25 * (7 - k));
    }
    auto const r = check_dirichlet_structure(h, edge, cs);
    ok = ok && r.passed() && r.records.size() == 8;
    double slope_err = 0.0;
    if (h.minima().front() == 0.0) {
      for (auto const& rec : r.records) {
        slope_err = std::max(slope_err, std::abs(rec.slope - (rec.c - 1.0)));
      }
      ok = ok && slope_err <= 5e-3;
      d << "|p|-1 slope error " << slope_err << "; ";
    }
    double worst_res = 0.0;
    double worst_der = -1e300;
    for (auto const& rec : r.records) {
      worst_res = std::max(worst_res, std::abs(rec.residual));
      worst_der = std::max(worst_der, rec.derivative);
    }
    d << "u_sc(0) " << sc << " residual " << worst_res << " H' " << worst_der << "; ";
    for (auto const& f : r.failures) {
      d << f << "; ";
    }
  }
  return {ok, d.str()};
}

bool kirchhoff_identity(VanishingViscosityReport const& r, double& worst) {
  bool ok = true;
  for (auto const& rec : r.records) {
    if (rec.converged) {
      worst = std::max({worst, rec.node_residual, rec.interior_residual});
      ok = ok && rec.node_residual <= 1e-8 && rec.interior_residual <= 1e-8;
    }
  }
  return ok;
}

std::vector<VanishingViscosityReport> g_sweeps;

Outcome criterion5() {
  auto const p = builtin_fixture("viscous_abs").junction_problem();
  auto r = epsilon_sweep(p, {0.2, 0.1, 0.05, 0.025});
  double const u_hat = r.sc_reference;
  double const gap05 = std::abs(r.records[2].node_value - u_hat);
  double const gap025 = std::abs(r.records[3].node_value - u_hat);
  bool const ok = r.all_converged() &&
                  r.classification == LimitClass::SelectsStateConstraint &&
                  std::abs(r.extrapolated - u_hat) <= 5e-2 && gap05 > gap025;
  Detail d;
  d << to_string(r.classification) << ", extrapolated " << r.extrapolated << ", u_hat(0) " << u_hat
    << ", gaps " << gap05 << " > " << gap025;
  g_sweeps.push_back(std::move(r));
  return {ok, d.str()};
}

Outcome criterion6() {
  auto const p = builtin_fixture("viscous_quadratic").junction_problem();
  auto r = epsilon_sweep(p, {0.2, 0.1, 0.05, 0.025});
  double const sum = r.records.back().kirchhoff_sum;
  bool const ok = r.all_converged() && r.classification == LimitClass::KirchhoffLimit &&
                  r.extrapolated < r.sc_reference - 0.05 && std::abs(sum) <= 5e-2;
  Detail d;
  d << to_string(r.classification) << ", extrapolated " << r.extrapolated << ", u_hat(0) "
    << r.sc_reference << ", slope sum " << sum;
  g_sweeps.push_back(std::move(r));

  auto const pd = builtin_fixture("viscous_quadratic_dirichlet").junction_problem();
  auto rd = epsilon_sweep(pd, {0.2, 0.1, 0.05, 0.025});
  d << "; Dirichlet(-1) variant: " << to_string(rd.classification) << ", extrapolated "
    << rd.extrapolated << ", u_hat(0) " << rd.sc_reference;
  g_sweeps.push_back(std::move(rd));
  return {ok, d.str()};
}

Outcome criterion7() {
  bool ok = !g_sweeps.empty();
  double worst = 0.0;
  int solves = 0;
  for (auto const& r : g_sweeps) {
    ok = kirchhoff_identity(r, worst) && ok;
    for (auto const& rec : r.records) {
      solves += rec.converged;
    }
  }
  return {ok, (Detail() << solves << " converged solves, worst residual " << worst).str()};
}

Outcome criterion8() {
  bool ok = true;
  Detail d;
  for (auto const& name : flux_limited_fixture_names()) {
    auto const p = builtin_fixture(name).junction_problem();
    auto const s = solve_flux_limited(p);
    bool fixture_ok = s.report.converged && s.u.node_value <= -p.condition.A + 2e-2;
    for (auto const& rec : shift_comparison(s.u, p, {0.05, 0.1, 0.5})) {
      fixture_ok = fixture_ok && rec.ok;
    }
    ok = ok && fixture_ok;
    d << name << " u(0) " << s.u.node_value << " vs -A " << -p.condition.A
      << (fixture_ok ? "" : " FAILED") << "; ";
  }
  return {ok, d.str()};
}

Outcome criterion9() {
  auto const problem = builtin_fixture("fatten_max");
  auto const& spec = *problem.fatten;
  FattenParams params;
  params.a1 = spec.a1;
  params.a2 = spec.a2;
  params.h2_ratio = spec.h2_ratio;
  auto const r = fattening_study(*problem.hamiltonian_2d, {0.2, 0.1}, params);
  auto const w = counterexample_witness();
  bool const ok = r.all_converged() && r.records.size() == 2 && r.records[0].h2 == 0.2 / 8 &&
                  r.records[1].h2 == 0.1 / 8 && r.records[1].max_error() <= 0.1 &&
                  r.records[1].max_error() <= r.records[0].max_error() && w.joint == 11.0 &&
                  w.reduced_max() == 10.0;
  Detail d;
  d << "errors " << r.records[0].max_error() << " -> " << r.records[1].max_error()
    << ", witness H(1,1) " << w.joint << " vs " << w.reduced_max();
  return {ok, d.str()};
}

Outcome criterion10() {
  bool ok = true;
  Detail d;
  for (auto const& m : {check_monotone_interior_1d(1), check_monotone_node_1d(2),
                        check_monotone_interior_2d(3)}) {
    ok = ok && m.passed() && m.trials == 1000;
    d << m.name << " " << m.failures << "/" << m.trials << "; ";
  }
  RunOptions opts;
  opts.out_dir = std::filesystem::temp_directory_path() / "hjj_acceptance_convergence";
  auto const run_result = run("convergence", builtin_fixture("dirichlet_convergence"), opts);
  auto const& rows = run_result.report["convergence"]["rows"];
  std::vector<double> hs;
  for (auto const& row : rows) {
    hs.push_back(row["h"].get<double>());
  }
  double const order = run_result.report["convergence"]["min_observed_order"].get<double>();
  bool const grid_ok = hs.size() == 3 && std::abs(hs[0] - 0.01) < 1e-12 &&
                       std::abs(hs[1] - 0.005) < 1e-12 && std::abs(hs[2] - 0.0025) < 1e-12;
  ok = ok && run_result.exit_code == kExitOk && grid_ok && order >= 0.9;
  d << "observed order " << order;
  return {ok, d.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double budget;
    std::function<Outcome()> fn;
  };
  std::vector<Criterion> const criteria{
      {1, 5.0, criterion1},    {2, 0.0, criterion2},   {3, 0.0, criterion3},
      {4, 30.0, criterion4},   {5, 0.0, criterion5},   {6, 60.0, criterion6},
      {7, 0.0, criterion7},    {8, 0.0, criterion8},   {9, 120.0, criterion9},
      {10, 0.0, criterion10}};
  int failed = 0;
  for (auto const& c : criteria) {
    auto const t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (std::exception const& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double const secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool const in_time = c.budget <= 0.0 || secs < c.budget;
    bool const pass = o.passed && in_time;
    failed += !pass;
    std::printf("criterion %d: %s (%.2f s%s) %s\n", c.id, pass ? "PASS" : "FAIL", secs,
                in_time ? "" : ", over budget", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
