#include "hjj/viscous.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hjj/edge_solver.hpp"

namespace hjj {
namespace {

constexpr double kSelectionSlack = 1e-9;

JunctionGridFunction cold_start(JunctionProblem const& problem) {
  double g = -std::numeric_limits<double>::infinity();
  for (auto const& h : problem.hamiltonians) {
    for (double x : h.x_samples()) {
      g = std::max(g, h(0.0, x));
    }
  }
  g = -g;
  JunctionGridFunction u;
  for (auto const& e : problem.edges) {
    auto gf = GridFunction1D::constant(e, g);
    if (auto const* d = std::get_if<Dirichlet>(&e.far_bc)) {
      gf.values.front() = d->value;
    }
    u.per_edge.push_back(std::move(gf));
  }
  u.node_value = g;
  u.sync_node();
  return u;
}

void split_residual(StarVector const& r, ViscousSolution& out) {
  out.node_residual = std::abs(r.node);
  out.interior_residual = 0.0;
  for (auto const& e : r.edge) {
    for (double v : e) {
      out.interior_residual = std::max(out.interior_residual, std::abs(v));
    }
  }
}

}  // namespace

ViscousSystem::ViscousSystem(JunctionProblem const& problem, double epsilon)
    : problem_(problem), epsilon_(epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  for (auto const& e : problem.edges) {
    e.validate();
    if (std::holds_alternative<StateConstraint>(e.far_bc)) {
      throw std::invalid_argument(
          "the viscous system needs Dirichlet or Neumann data at the far ends");
    }
  }
}

double ViscousSystem::row(int i, int j, double um, double u, double up) const {
  auto const& e = problem_.edges[i];
  auto const& h = problem_.hamiltonians[i];
  double const dx = e.h();
  double const x = e.x(j);
  if (j == 0) {
    if (auto const* d = std::get_if<Dirichlet>(&e.far_bc)) {
      return u - d->value;
    }
    double const s = std::get<Neumann>(e.far_bc).slope;
    double const ghost = up - 2.0 * dx * s;
    return -epsilon_ * (up - 2.0 * u + ghost) / (dx * dx) + u + h(s, x);
  }
  return -epsilon_ * (up - 2.0 * u + um) / (dx * dx) + u + h((up - um) / (2.0 * dx), x);
}

double ViscousSystem::node_row(double u0, std::span<double const> last,
                               std::span<double const> second_last) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < problem_.edges.size(); ++i) {
    sum += (3.0 * u0 - 4.0 * last[i] + second_last[i]) / (2.0 * problem_.edges[i].h());
  }
  return sum;
}

std::vector<double> continuation_schedule(double start, double target) {
  if (!(target > 0.0) || !(start > 0.0)) {
    throw std::invalid_argument("continuation values must be positive");
  }
  if (target >= start) {
    return {target};
  }
  std::vector<double> out{start};
  double e = start;
  while (e * 0.5 > target * (1.0 + 1e-12)) {
    e *= 0.5;
    out.push_back(e);
  }
  out.push_back(target);
  return out;
}

ViscousSolution solve_viscous_kirchhoff(JunctionProblem const& problem, ViscousParams const& params,
                                        JunctionGridFunction const* warm, double warm_epsilon) {
  auto const start = std::chrono::steady_clock::now();
  ViscousSystem const validated(problem, params.epsilon);

  ViscousSolution out;
  out.u = warm ? *warm : cold_start(problem);
  out.report.method = "damped_newton_continuation";
  out.report.converged = true;

  std::vector<double> schedule =
      continuation_schedule(warm ? warm_epsilon : params.continuation_start, params.epsilon);
  if (warm && schedule.size() > 1) {
    schedule.erase(schedule.begin());
  }

  NewtonOptions opts;
  opts.tol = params.newton_tol;
  opts.max_iters = params.max_newton;
  opts.pseudo_transient = false;
  opts.min_step = params.min_step;

  auto attempt = [&](double eps, JunctionGridFunction& u) {
    ViscousSystem const sys(problem, eps);
    JunctionGridFunction trial = u;
    SolveReport r = newton_solve(sys, trial, opts);
    out.report.iterations += r.iterations;
    if (r.converged) {
      u = std::move(trial);
      out.schedule.push_back(eps);
    }
    return r;
  };

  double last_ok = warm ? warm_epsilon : std::numeric_limits<double>::quiet_NaN();
  for (double eps : schedule) {
    SolveReport r = attempt(eps, out.u);
    if (!r.converged && std::isfinite(last_ok)) {
      out.report.flags.push_back("finer_continuation");
      bool ok = true;
      for (double e = last_ok; ok && e > eps;) {
        double const next = std::max(eps, e * std::pow(2.0, -0.25));
        ok = attempt(next, out.u).converged;
        e = next;
      }
      r.converged = ok;
    }
    if (!r.converged) {
      out.report.converged = false;
      out.report.flags.push_back("newton_failed");
      break;
    }
    last_ok = eps;
  }

  ViscousSystem const final_sys(problem, params.epsilon);
  StarVector const res = evaluate_residual(final_sys, out.u);
  split_residual(res, out);
  out.report.final_residual = res.max_abs();
  out.report.converged = out.report.converged && out.report.final_residual <= params.newton_tol;
  out.report.dt = params.epsilon;
  out.report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string to_string(LimitClass c) {
  switch (c) {
    case LimitClass::SelectsStateConstraint:
      return "SelectsStateConstraint";
    case LimitClass::KirchhoffLimit:
      return "KirchhoffLimit";
    case LimitClass::Undetermined:
      break;
  }
  return "Undetermined";
}

std::string to_string(Selection s) {
  return s == Selection::SelectsStateConstraint ? "SelectsStateConstraint" : "NoGuarantee";
}

bool VanishingViscosityReport::all_converged() const {
  return std::all_of(records.begin(), records.end(),
                     [](SweepRecord const& r) { return r.converged; });
}

Selection predict_selection(JunctionProblem const& problem) {
  double sum = 0.0;
  for (auto const& h : problem.hamiltonians) {
    if (h.minima().empty()) {
      throw HamiltonianError("Hamiltonian " + h.describe() + " has no recorded minima");
    }
    sum += h.minima().back();
  }
  return sum <= kSelectionSlack ? Selection::SelectsStateConstraint : Selection::NoGuarantee;
}

double extrapolate_node_value(std::vector<SweepRecord> const& records) {
  if (records.size() < 2) {
    throw std::invalid_argument("extrapolation needs two records");
  }
  auto const& a = records[records.size() - 2];
  auto const& b = records.back();
  return (a.epsilon * b.node_value - b.epsilon * a.node_value) / (a.epsilon - b.epsilon);
}

LimitClass classify_limit(VanishingViscosityReport const& report, double sc_value,
                          ClassifyThresholds thresholds) {
  if (report.records.size() < 3) {
    throw std::invalid_argument("classification needs at least 3 records");
  }
  double const l = report.extrapolated;
  if (std::abs(l - sc_value) <= thresholds.delta_sc) {
    return LimitClass::SelectsStateConstraint;
  }
  if (l < sc_value - thresholds.delta_sc &&
      std::abs(report.records.back().kirchhoff_sum) <= thresholds.delta_k) {
    return LimitClass::KirchhoffLimit;
  }
  return LimitClass::Undetermined;
}

VanishingViscosityReport epsilon_sweep(JunctionProblem const& problem,
                                       std::vector<double> const& eps_list,
                                       ViscousParams const& params, ClassifyThresholds thresholds,
                                       SolveParams const& first_order) {
  auto const start = std::chrono::steady_clock::now();
  if (eps_list.size() < 3) {
    throw std::invalid_argument("eps_list needs at least 3 values");
  }
  for (std::size_t k = 1; k < eps_list.size(); ++k) {
    if (!(eps_list[k] < eps_list[k - 1])) {
      throw std::invalid_argument("eps_list must decrease");
    }
  }
  double const eps_min = eps_list.back();
  for (auto const& e : problem.edges) {
    if (e.h() > eps_min / 4.0 * (1.0 + 1e-12)) {
      throw std::invalid_argument("grid too coarse for epsilon " + std::to_string(eps_min) +
                                  ": need h <= eps/4");
    }
  }

  VanishingViscosityReport report;
  JunctionGridFunction const* warm = nullptr;
  double warm_eps = 0.0;
  for (double eps : eps_list) {
    ViscousParams p = params;
    p.epsilon = eps;
    ViscousSolution sol = solve_viscous_kirchhoff(problem, p, warm, warm_eps);

    SweepRecord rec;
    rec.epsilon = eps;
    rec.node_value = sol.u.node_value;
    for (auto const& g : sol.u.per_edge) {
      double const s = node_slope(g, 2);
      rec.slopes.push_back(s);
      rec.kirchhoff_sum += s;
    }
    rec.newton_iters = sol.report.iterations;
    rec.converged = sol.report.converged;
    rec.interior_residual = sol.interior_residual;
    rec.node_residual = sol.node_residual;
    rec.lipschitz = sol.u.lipschitz();
    rec.u = std::move(sol.u);
    report.records.push_back(std::move(rec));
    if (!report.records.back().converged) {
      break;
    }
    warm = &report.records.back().u;
    warm_eps = eps;
  }

  auto const sc = solve_junction_direct(problem.with_condition(JunctionCondition::state_constraint()),
                                        first_order);
  report.sc_reference = sc.u.node_value;
  report.predicted = predict_selection(problem);
  if (report.records.size() >= 3) {
    report.extrapolated = extrapolate_node_value(report.records);
    report.classification = report.all_converged()
                                ? classify_limit(report, report.sc_reference, thresholds)
                                : LimitClass::Undetermined;
  } else {
    report.extrapolated = report.records.empty() ? 0.0 : report.records.back().node_value;
  }
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace hjj
