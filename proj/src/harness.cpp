#include "hjj/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "hjj/edge_solver.hpp"
#include "hjj/expression.hpp"
#include "hjj/fatten2d.hpp"
#include "hjj/fixtures.hpp"
#include "hjj/junction_solver.hpp"
#include "hjj/parallel.hpp"
#include "hjj/properties.hpp"
#include "hjj/viscous.hpp"

namespace hjj {
namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Report solve_report_json(SolveReport const& r) {
  Report j;
  j["iterations"] = r.iterations;
  j["final_residual"] = r.final_residual;
  j["dt"] = r.dt;
  j["converged"] = r.converged;
  j["wall_time"] = r.wall_time;
  j["method"] = r.method;
  j["flags"] = r.flags;
  return j;
}

Report grid_json(GridFunction1D const& g) {
  Report j;
  j["length"] = g.edge.length;
  j["n_cells"] = g.edge.n_cells;
  j["far_bc"] = describe(g.edge.far_bc);
  j["role"] = to_string(g.role);
  j["node_value"] = g.node_value();
  j["lipschitz"] = g.lipschitz();
  j["values"] = g.values;
  return j;
}

Report edges_json(JunctionGridFunction const& u) {
  Report out = Report::array();
  for (auto const& g : u.per_edge) {
    out.push_back(grid_json(g));
  }
  return out;
}

Report diagnostics_json(NodeDiagnostics const& d) {
  Report j;
  j["node_value"] = d.node_value;
  j["slopes"] = d.slopes;
  j["sc_residual"] = d.sc_residual;
  if (d.flux_residual) {
    j["flux_residual"] = *d.flux_residual;
  }
  j["kirchhoff_sum"] = d.kirchhoff_sum;
  j["p_bar"] = d.p_bar;
  j["p_under"] = d.p_under;
  return j;
}

std::string profile_csv(std::vector<GridFunction1D> const& edges) {
  std::string out = "edge_index,x,u\n";
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto const& g = edges[i];
    for (int j = 0; j <= g.n(); ++j) {
      out += std::to_string(i) + "," + num(g.edge.x(j)) + "," + num(g.values[j]) + "\n";
    }
  }
  return out;
}

struct Context {
  ProblemFile const& problem;
  RunOptions const& options;
  SolveParams params;
  Report& report;
  std::vector<fs::path>& files;
  bool converged = true;
  bool failed_checks = false;

  void write(std::string const& name, std::string const& content) {
    fs::path const path = options.out_dir / name;
    write_atomic(path, content);
    files.push_back(path);
  }
  void series(std::string const& kind, Report value) { report["series"][kind] = std::move(value); }
};

void require_condition(ProblemFile const& p, JunctionCondition::Kind kind, char const* sub) {
  if (p.junction.kind != kind) {
    throw ProblemError("junction.kind", std::string(sub) + " needs a " +
                                            (kind == JunctionCondition::Kind::StateConstraint
                                                 ? "state_constraint"
                                                 : "flux_limited") +
                                            " junction");
  }
}

void run_solve_edge(Context& c) {
  NodeBC const bc = c.problem.node_bc.value_or(NodeBC{StateConstraint{}});
  std::vector<GridFunction1D> grids;
  Report edges = Report::array();
  auto const specs = c.problem.edge_specs();
  for (int i = 0; i < c.problem.K(); ++i) {
    EdgeSolution const sol = solve_edge(c.problem.hamiltonians[i], specs[i], bc, c.params);
    c.converged = c.converged && sol.report.converged;
    Report e = grid_json(sol.u);
    e["index"] = i;
    e["node_slope"] = node_slope(sol.u, 2);
    e["report"] = solve_report_json(sol.report);
    edges.push_back(std::move(e));
    grids.push_back(sol.u);
  }
  c.report["node_bc"] = std::holds_alternative<Dirichlet>(bc)
                            ? "dirichlet(" + num(std::get<Dirichlet>(bc).value) + ")"
                            : std::string("state_constraint");
  c.report["edges"] = std::move(edges);
  c.write("profile.csv", profile_csv(grids));
  c.series("profile", {{"csv", "profile.csv"}, {"edges", c.problem.K()}});
}

void run_solve_junction(Context& c) {
  require_condition(c.problem, JunctionCondition::Kind::StateConstraint, "solve-junction");
  JunctionProblem const jp = c.problem.junction_problem();
  JunctionSolution const direct = solve_junction_direct(jp, c.params);
  JunctionSolution const constructive = solve_junction_constructive(jp, c.params);
  c.converged = direct.report.converged && constructive.report.converged;

  double min_sc = constructive.sc_values.front();
  for (double v : constructive.sc_values) {
    min_sc = std::min(min_sc, v);
  }
  Report j;
  j["node_value"] = direct.u.node_value;
  j["min_sc"] = min_sc;
  j["value_formula_error"] = std::abs(direct.u.node_value - min_sc);
  j["sc_values"] = constructive.sc_values;
  j["argmin_edges"] = constructive.argmin_edges;
  j["cross_solver_distance"] = max_distance(direct.u, constructive.u);
  j["diagnostics"] = diagnostics_json(node_diagnostics(direct.u, jp));
  j["report_direct"] = solve_report_json(direct.report);
  j["report_constructive"] = solve_report_json(constructive.report);
  j["edges"] = edges_json(direct.u);
  c.report["junction"] = std::move(j);
  c.write("profile.csv", profile_csv(direct.u.per_edge));
  c.series("profile", {{"csv", "profile.csv"}, {"edges", c.problem.K()}});
}

void run_flux_limited(Context& c) {
  require_condition(c.problem, JunctionCondition::Kind::FluxLimited, "flux-limited");
  JunctionProblem const jp = c.problem.junction_problem();
  JunctionSolution const sol = solve_flux_limited(jp, c.params);
  c.converged = sol.report.converged;
  Report j;
  j["A"] = jp.condition.A;
  j["node_value"] = sol.u.node_value;
  j["below_minus_A"] = sol.u.node_value <= -jp.condition.A + 2e-2;
  j["diagnostics"] = diagnostics_json(node_diagnostics(sol.u, jp));
  Report shifts = Report::array();
  for (auto const& s : shift_comparison(sol.u, jp, {0.1, 0.5}, c.params)) {
    shifts.push_back({{"lambda", s.lambda},
                      {"max_residual", s.max_residual},
                      {"min_residual", s.min_residual},
                      {"excess", s.excess},
                      {"return_distance", s.return_distance},
                      {"ok", s.ok}});
  }
  j["shifts"] = std::move(shifts);
  j["report"] = solve_report_json(sol.report);
  j["edges"] = edges_json(sol.u);
  c.report["flux_limited"] = std::move(j);
  c.write("profile.csv", profile_csv(sol.u.per_edge));
  c.series("profile", {{"csv", "profile.csv"}, {"edges", c.problem.K()}});
}

void run_viscous_sweep(Context& c) {
  if (!c.problem.viscous) {
    throw ProblemError("viscous", "viscous-sweep needs a viscous section with eps_list");
  }
  JunctionProblem const jp = c.problem.junction_problem();
  VanishingViscosityReport const vv = epsilon_sweep(jp, c.problem.viscous->eps_list, {}, {}, c.params);
  c.converged = vv.all_converged() && vv.records.size() == c.problem.viscous->eps_list.size();

  Report records = Report::array();
  std::string csv = "epsilon,node_value,kirchhoff_sum\n";
  for (auto const& r : vv.records) {
    records.push_back({{"epsilon", r.epsilon},
                       {"node_value", r.node_value},
                       {"slopes", r.slopes},
                       {"kirchhoff_sum", r.kirchhoff_sum},
                       {"newton_iters", r.newton_iters},
                       {"converged", r.converged},
                       {"interior_residual", r.interior_residual},
                       {"node_residual", r.node_residual},
                       {"lipschitz", r.lipschitz}});
    csv += num(r.epsilon) + "," + num(r.node_value) + "," + num(r.kirchhoff_sum) + "\n";
  }
  Report j;
  j["records"] = std::move(records);
  j["extrapolated"] = vv.extrapolated;
  j["classification"] = to_string(vv.classification);
  j["predicted"] = to_string(vv.predicted);
  j["sc_reference"] = vv.sc_reference;
  j["wall_time"] = vv.wall_time;
  if (!vv.records.empty()) {
    j["finest_profile"] = edges_json(vv.records.back().u);
    c.write("profile.csv", profile_csv(vv.records.back().u.per_edge));
    c.series("profile", {{"csv", "profile.csv"}, {"edges", c.problem.K()}});
  }
  c.report["viscous"] = std::move(j);
  c.write("sweep.csv", csv);
  c.series("sweep", {{"csv", "sweep.csv"}, {"sc_reference", vv.sc_reference}});
}

void run_fatten(Context& c) {
  if (!c.problem.fatten || !c.problem.hamiltonian_2d) {
    throw ProblemError("fatten", "fatten2d needs a fatten section");
  }
  auto const& spec = *c.problem.fatten;
  FattenParams params;
  params.a1 = spec.a1;
  params.a2 = spec.a2;
  params.h2_ratio = spec.h2_ratio;
  params.solve = c.params;
  FatteningReport const study = fattening_study(*c.problem.hamiltonian_2d, spec.eps_list, params);
  c.converged = study.all_converged();

  Report records = Report::array();
  std::string csv = "epsilon,h2,max_error,node_value,reference_node_value\n";
  for (auto const& r : study.records) {
    records.push_back({{"epsilon", r.epsilon},
                       {"h2", r.h2},
                       {"converged", r.converged},
                       {"iterations", r.iterations},
                       {"node_value", r.node_value},
                       {"reference_node_value", r.reference_node_value},
                       {"trace_error", {r.trace_error[0], r.trace_error[1]}},
                       {"max_error", r.max_error()},
                       {"reduced_residual", {r.reduced_residual[0], r.reduced_residual[1]}},
                       {"junction_supersolution", r.junction_supersolution},
                       {"wall_time", r.wall_time}});
    csv += num(r.epsilon) + "," + num(r.h2) + "," + num(r.max_error()) + "," + num(r.node_value) +
           "," + num(r.reference_node_value) + "\n";
  }
  auto const w = counterexample_witness();
  Report j;
  j["hamiltonian"] = spec.expr;
  j["records"] = std::move(records);
  j["errors_nonincreasing"] = study.errors_nonincreasing();
  j["counterexample"] = {{"hamiltonian", "p1^2 + 10*p2^2"},
                         {"joint", w.joint},
                         {"reduced1", w.reduced1},
                         {"reduced2", w.reduced2},
                         {"reduced_max", w.reduced_max()},
                         {"differs", w.joint != w.reduced_max()}};
  j["wall_time"] = study.wall_time;
  c.report["fatten"] = std::move(j);
  c.write("fatten.csv", csv);
  c.series("fatten", {{"csv", "fatten.csv"}});
  auto const& last = study.records.back();
  c.write("traces.csv", profile_csv({last.traces[0], last.traces[1]}));
  c.series("profile", {{"csv", "traces.csv"}, {"edges", 2}});
}

void run_convergence(Context& c) {
  if (!c.problem.convergence) {
    throw ProblemError("convergence", "convergence needs a convergence section");
  }
  auto const& spec = *c.problem.convergence;
  Expression const exact(spec.exact, {"x"});
  NodeBC const bc = c.problem.node_bc.value_or(NodeBC{StateConstraint{}});
  EdgeSpec edge = c.problem.edge_specs().front();

  std::vector<double> hs;
  std::vector<double> errs;
  for (int n : spec.n_cells) {
    edge.n_cells = n;
    EdgeSolution const sol = solve_edge(c.problem.hamiltonians.front(), edge, bc, c.params);
    c.converged = c.converged && sol.report.converged;
    double err = 0.0;
    for (int j = 0; j <= n; ++j) {
      double const x = edge.x(j);
      err = std::max(err, std::abs(sol.u.values[j] - exact(std::span<double const>(&x, 1))));
    }
    hs.push_back(edge.h());
    errs.push_back(err);
  }
  auto const orders = observed_orders(hs, errs);

  Report rows = Report::array();
  std::string csv = "h,error,observed_order\n";
  for (std::size_t k = 0; k < hs.size(); ++k) {
    Report row{{"n_cells", spec.n_cells[k]}, {"h", hs[k]}, {"error", errs[k]}};
    csv += num(hs[k]) + "," + num(errs[k]) + ",";
    if (k > 0) {
      row["observed_order"] = orders[k - 1];
      csv += num(orders[k - 1]);
    }
    csv += "\n";
    rows.push_back(std::move(row));
  }
  double const lo = *std::min_element(orders.begin(), orders.end());
  double fitted = 0.0;
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double const m = static_cast<double>(hs.size());
    for (std::size_t k = 0; k < hs.size(); ++k) {
      double const x = std::log(hs[k]);
      double const y = std::log(errs[k]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    fitted = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  c.report["convergence"] = {{"exact", spec.exact},
                             {"rows", std::move(rows)},
                             {"min_observed_order", lo},
                             {"fitted_slope", fitted}};
  c.write("convergence.csv", csv);
  c.series("convergence", {{"csv", "convergence.csv"}, {"fitted_slope", fitted}});
}

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

void run_verify(Context& c) {
  std::vector<Check> checks;
  auto add = [&](std::string name, bool ok, std::string detail) {
    checks.push_back({std::move(name), ok, std::move(detail)});
  };
  auto guarded = [&](std::string const& name, std::function<void()> const& fn) {
    try {
      fn();
    } catch (std::exception const& e) {
      add(name, false, std::string("exception: ") + e.what());
    }
  };

  for (auto const& m : {check_monotone_interior_1d(c.options.seed),
                        check_monotone_node_1d(c.options.seed + 1),
                        check_monotone_interior_2d(c.options.seed + 2)}) {
    add("monotone " + m.name, m.passed(),
        std::to_string(m.failures) + "/" + std::to_string(m.trials) + " failures");
  }

  guarded("analytic edge oracle", [&] {
    double const p[2] = {0.0, 1.0};
    Hamiltonian const h = make_builtin("abs_shift", p);
    EdgeSpec const edge{1.0, 400, Neumann{0.0}};
    auto const sc = solve_edge(h, edge, StateConstraint{}, c.params);
    auto const d = solve_edge(h, edge, Dirichlet{0.0}, c.params);
    double e1 = 0.0;
    double e2 = 0.0;
    for (int j = 0; j <= 400; ++j) {
      e1 = std::max(e1, std::abs(sc.u.values[j] - 1.0));
      e2 = std::max(e2, std::abs(d.u.values[j] - (1.0 - std::exp(edge.x(j)))));
    }
    add("analytic edge oracle", e1 <= 1e-2 && e2 <= 1e-2,
        "state constraint " + num(e1) + ", dirichlet " + num(e2));
  });

  guarded("dirichlet structure", [&] {
    double const p[2] = {0.0, 1.0};
    double const cs[] = {-1.5, -1.0, -0.5, 0.0, 0.5};
    auto const r = check_dirichlet_structure(make_builtin("abs_shift", p), EdgeSpec{1.0, 400},
                                             cs, c.params);
    add("dirichlet structure", r.passed(), r.passed() ? "" : r.failures.front());
  });

  for (auto const& name : state_constraint_fixture_names()) {
    guarded("fixture " + name, [&] {
      JunctionProblem const jp = builtin_fixture(name).junction_problem().with_spacing(1.0 / 200);
      auto const d = solve_junction_direct(jp, c.params);
      auto const k = solve_junction_constructive(jp, c.params);
      double min_sc = k.sc_values.front();
      for (double v : k.sc_values) {
        min_sc = std::min(min_sc, v);
      }
      double const dist = max_distance(d.u, k.u);
      double const ferr = std::abs(d.u.node_value - min_sc);
      double const bound = std::max(5e-2, 3.0 * std::sqrt(1.0 / 200));
      add("fixture " + name, d.report.converged && dist <= bound && ferr <= 2e-2,
          "cross-solver " + num(dist) + ", value formula " + num(ferr));
    });
  }

  for (auto const& name : flux_limited_fixture_names()) {
    guarded("fixture " + name, [&] {
      JunctionProblem const jp = builtin_fixture(name).junction_problem().with_spacing(1.0 / 200);
      auto const s = solve_flux_limited(jp, c.params);
      bool ok = s.report.converged && s.u.node_value <= -jp.condition.A + 2e-2;
      for (auto const& r : shift_comparison(s.u, jp, {0.1, 0.5}, c.params)) {
        ok = ok && r.ok;
      }
      add("fixture " + name, ok, "u(0) " + num(s.u.node_value) + ", -A " + num(-jp.condition.A));
    });
  }

  guarded("counterexample witness", [&] {
    auto const w = counterexample_witness();
    add("counterexample witness", w.joint == 11.0 && w.reduced_max() == 10.0,
        "H(1,1) " + num(w.joint) + ", max(H1(1), H2(1)) " + num(w.reduced_max()));
  });

  guarded("problem " + c.problem.name, [&] {
    JunctionProblem const jp = c.problem.junction_problem();
    JunctionSolution const s = jp.condition.kind == JunctionCondition::Kind::FluxLimited
                                   ? solve_flux_limited(jp, c.params)
                                   : solve_junction_direct(jp, c.params);
    double const res = junction_residual(s.u, jp, c.params).max_abs();
    add("problem " + c.problem.name, s.report.converged && res <= 10.0 * c.params.tol,
        "scheme residual " + num(res));
  });

  Report list = Report::array();
  int failed = 0;
  for (auto const& ch : checks) {
    failed += !ch.passed;
    list.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
  }
  c.report["verify"] = {{"checks", std::move(list)},
                        {"passed", static_cast<int>(checks.size()) - failed},
                        {"failed", failed}};
  c.failed_checks = failed > 0;
}

void null_non_finite(Report& j, int& count) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) {
    j = nullptr;
    ++count;
  } else if (j.is_structured()) {
    for (auto& v : j) {
      null_non_finite(v, count);
    }
  }
}

}  // namespace

std::vector<std::string> subcommands() {
  return {"solve-edge", "solve-junction", "flux-limited", "viscous-sweep",
          "fatten2d",   "verify",         "convergence"};
}

void write_atomic(fs::path const& path, std::string const& content) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write " + tmp.string());
    }
    out << content;
    if (!out.flush()) {
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::vector<double> observed_orders(std::vector<double> const& h, std::vector<double> const& err) {
  std::vector<double> out;
  for (std::size_t k = 1; k < h.size() && k < err.size(); ++k) {
    out.push_back(std::log(err[k - 1] / err[k]) / std::log(h[k - 1] / h[k]));
  }
  return out;
}

bool all_finite(Report const& report) {
  if (report.is_number_float()) {
    return std::isfinite(report.get<double>());
  }
  if (report.is_structured()) {
    for (auto const& v : report) {
      if (!all_finite(v)) {
        return false;
      }
    }
  }
  return true;
}

std::string plot_script(Report const& report, std::string const& kind) {
  if (!report.contains("series") || !report["series"].contains(kind)) {
    throw std::invalid_argument("report has no series '" + kind + "'");
  }
  Report const& s = report["series"][kind];
  std::string const csv = s.at("csv").get<std::string>();
  std::ostringstream out;
  out << "set datafile separator ','\n";
  if (kind == "profile") {
    int const edges = s.at("edges").get<int>();
    out << "set terminal pngcairo size 900,600\n"
        << "set output 'profile.png'\n"
        << "set xlabel 'x'\nset ylabel 'u'\n"
        << "plot";
    for (int i = 0; i < edges; ++i) {
      out << (i ? ", \\\n    " : " ") << "'" << csv << "' every ::1 using 2:($1 == " << i
          << " ? $3 : 1/0) with lines title 'edge " << i << "'";
    }
    out << "\n";
  } else if (kind == "sweep") {
    out << "set terminal pngcairo size 900,600\n"
        << "set output 'sweep.png'\n"
        << "set logscale x\n"
        << "set xlabel 'epsilon'\nset ylabel 'u(0)'\n";
    if (s.contains("sc_reference")) {
      out << "sc = " << num(s["sc_reference"].get<double>()) << "\n"
          << "plot '" << csv
          << "' every ::1 using 1:2 with linespoints title 'node value', sc title "
             "'state-constraint value'\n";
    } else {
      out << "plot '" << csv << "' every ::1 using 1:2 with linespoints title 'node value'\n";
    }
  } else if (kind == "convergence") {
    out << "set terminal pngcairo size 900,600\n"
        << "set output 'convergence.png'\n"
        << "set logscale xy\n"
        << "set xlabel 'h'\nset ylabel 'max error'\n"
        << "set label 1 sprintf('fitted slope %.3f', " << num(s.at("fitted_slope").get<double>())
        << ") at graph 0.05, graph 0.9\n"
        << "plot '" << csv << "' every ::1 using 1:2 with linespoints title 'error'\n";
  } else if (kind == "fatten") {
    out << "set terminal pngcairo size 900,600\n"
        << "set output 'fatten.png'\n"
        << "set logscale x\n"
        << "set xlabel 'epsilon'\nset ylabel 'max trace error'\n"
        << "plot '" << csv << "' every ::1 using 1:3 with linespoints title 'trace error'\n";
  } else {
    throw std::invalid_argument("unknown plot kind '" + kind + "'");
  }
  return out.str();
}

fs::path emit_plot_script(Report const& report, std::string const& kind, fs::path const& out_dir) {
  fs::path const path = out_dir / (kind + ".gp");
  write_atomic(path, plot_script(report, kind));
  return path;
}

RunResult run(std::string const& subcommand, ProblemFile const& problem,
              RunOptions const& options) {
  static std::map<std::string, void (*)(Context&)> const table{
      {"solve-edge", run_solve_edge},       {"solve-junction", run_solve_junction},
      {"flux-limited", run_flux_limited},   {"viscous-sweep", run_viscous_sweep},
      {"fatten2d", run_fatten},             {"verify", run_verify},
      {"convergence", run_convergence}};
  auto const it = table.find(subcommand);
  if (it == table.end()) {
    throw std::invalid_argument("unknown subcommand '" + subcommand + "'");
  }

  auto const t0 = std::chrono::steady_clock::now();
  RunResult result;
  Report& r = result.report;
  r["metadata"] = {{"subcommand", subcommand},
                   {"problem", problem.name},
                   {"schema_version", problem.schema_version},
                   {"seed", options.seed},
                   {"tol", options.tol.value_or(SolveParams{}.tol)},
                   {"threads", thread_budget()}};
  fs::create_directories(options.out_dir);

  Context c{problem, options, SolveParams{}, r, result.files};
  if (options.tol) {
    c.params.tol = *options.tol;
  }
  it->second(c);

  r["metadata"]["wall_time"] = seconds_since(t0);
  r["status"] = c.failed_checks ? "checks_failed" : c.converged ? "ok" : "not_converged";
  r["partial"] = !c.converged;
  int non_finite = 0;
  null_non_finite(r, non_finite);
  r["metadata"]["non_finite_fields"] = non_finite;

  if (r.contains("series")) {
    for (auto const& [kind, value] : r["series"].items()) {
      result.files.push_back(emit_plot_script(r, kind, options.out_dir));
    }
  }
  fs::path const report_path = options.out_dir / "report.json";
  write_atomic(report_path, r.dump(2) + "\n");
  result.files.push_back(report_path);
  result.exit_code = (c.converged && !c.failed_checks) ? kExitOk : kExitNotConverged;
  return result;
}

int run_file(std::string const& subcommand, fs::path const& problem_path,
             RunOptions const& options, std::ostream& out, std::ostream& err) {
  try {
    ProblemFile const problem = load_problem(problem_path);
    RunResult const result = run(subcommand, problem, options);
    out << subcommand << " " << problem.name << ": " << result.report["status"].get<std::string>()
        << "\n";
    for (auto const& f : result.files) {
      out << "  wrote " << f.string() << "\n";
    }
    return result.exit_code;
  } catch (ProblemError const& e) {
    err << "invalid problem: " << e.what() << "\n";
    return kExitInvalid;
  } catch (HamiltonianError const& e) {
    err << "invalid problem: " << e.what() << "\n";
    return kExitInvalid;
  } catch (ParseError const& e) {
    err << "invalid problem: " << e.what() << "\n";
    return kExitInvalid;
  } catch (std::invalid_argument const& e) {
    err << "invalid problem: " << e.what() << "\n";
    return kExitInvalid;
  } catch (std::exception const& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitNotConverged;
  }
}

}  // namespace hjj
