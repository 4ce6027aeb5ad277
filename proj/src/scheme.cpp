#include "hjj/scheme.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hjj {
namespace {

double dissipation(Hamiltonian const& h, double data_level) {
  auto const xs = h.x_samples();
  double const level = std::max(h.coercivity_level(), data_level);
  double const bound = std::max(h.coercivity_bound(), probe_coercivity(h, level, xs));
  auto [lo, hi] = sublevel_hull(h, level, bound, xs);
  double const pad = 0.25 * (hi - lo) + 0.5;
  lo -= pad;
  hi += pad;
  double const lip = slope_lipschitz(h, lo, hi, xs, 4096);
  return std::max(1.02 * lip, 1e-3);
}

}  // namespace

double lax_friedrichs_flux(Hamiltonian const& h, double p_minus, double p_plus, double theta,
                           double x) {
  return h(0.5 * (p_minus + p_plus), x) - 0.5 * theta * (p_plus - p_minus);
}

StarScheme::StarScheme(std::vector<Hamiltonian> hamiltonians, std::vector<EdgeSpec> edges,
                       NodeCondition node, double theta_override)
    : node_(std::move(node)) {
  if (hamiltonians.size() != edges.size() || edges.empty()) {
    throw std::invalid_argument("star needs one Hamiltonian per edge and at least one edge");
  }
  double data_level = 0.0;
  if (auto const* d = std::get_if<Dirichlet>(&node_)) {
    data_level = std::max(data_level, std::abs(d->value) + 1.0);
  }
  if (auto const* f = std::get_if<FluxLimiter>(&node_)) {
    data_level = std::max(data_level, std::abs(f->limiter_value()) + 1.0);
    if (f->envelopes().size() != edges.size()) {
      throw std::invalid_argument("flux limiter size does not match the edge count");
    }
  }
  for (auto const& e : edges) {
    e.validate();
    if (auto const* d = std::get_if<Dirichlet>(&e.far_bc)) {
      data_level = std::max(data_level, std::abs(d->value) + 1.0);
    }
  }

  edges_.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto const& h = hamiltonians[i];
    double const theta = theta_override > 0.0 ? theta_override : dissipation(h, data_level);
    double const range = h.coercivity_bound();
    edges_.push_back(EdgeData{h, edges[i], edges[i].h(), theta, SlopeEnvelope(h, 0.0, range),
                              SlopeEnvelope(h, -edges[i].length, range)});
  }
}

double StarScheme::row(int i, int j, double um, double u, double up) const {
  auto const& e = edges_[i];
  double const h = e.h;
  double const pp = (up - u) / h;
  if (j > 0) {
    return u + lax_friedrichs_flux(e.hamiltonian, (u - um) / h, pp, e.theta, e.spec.x(j));
  }
  double const x = -e.spec.length;
  if (auto const* d = std::get_if<Dirichlet>(&e.spec.far_bc)) {
    return u - d->value;
  }
  if (auto const* n = std::get_if<Neumann>(&e.spec.far_bc)) {
    return u + lax_friedrichs_flux(e.hamiltonian, n->slope, pp, e.theta, x);
  }
  return u + e.far_env.prefix_min(pp);
}

double StarScheme::node_envelope(int i, double p) const { return edges_[i].node_env.suffix_min(p); }

double StarScheme::node_row(double u0, std::span<double const> last,
                            std::span<double const>) const {
  if (auto const* f = std::get_if<FluxLimiter>(&node_)) {
    thread_local std::vector<double> q;
    q.resize(edges_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      q[i] = (last[i] - u0) / edges_[i].h;
    }
    return u0 + (*f)(q);
  }
  double sc = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    sc = std::max(sc, edges_[i].node_env.suffix_min((u0 - last[i]) / edges_[i].h));
  }
  sc += u0;
  if (auto const* d = std::get_if<Dirichlet>(&node_)) {
    return std::max(u0 - d->value, sc);
  }
  return sc;
}

double StarScheme::explicit_dt(double cfl) const {
  double dt = 1.0;
  for (auto const& e : edges_) {
    dt = std::min(dt, e.h / (e.theta + e.h));
  }
  return cfl * dt;
}

JunctionGridFunction StarScheme::initial_guess() const {
  double g = -std::numeric_limits<double>::infinity();
  for (auto const& e : edges_) {
    for (double x : e.hamiltonian.x_samples()) {
      g = std::max(g, e.hamiltonian(0.0, x));
    }
  }
  g = -g;
  if (auto const* d = std::get_if<Dirichlet>(&node_)) {
    g = std::min(g, d->value);
  }
  for (auto const& e : edges_) {
    if (auto const* d = std::get_if<Dirichlet>(&e.spec.far_bc)) {
      g = std::min(g, d->value);
    }
  }

  JunctionGridFunction u;
  for (auto const& e : edges_) {
    auto gf = GridFunction1D::constant(e.spec, g);
    if (auto const* d = std::get_if<Dirichlet>(&e.spec.far_bc)) {
      gf.values.front() = d->value;
    }
    u.per_edge.push_back(std::move(gf));
  }
  u.node_value = g;
  u.sync_node();
  return u;
}

double StarScheme::explicit_step(JunctionGridFunction& u, double dt) const {
  StarVector const r = evaluate_residual(*this, u);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    auto& v = u.per_edge[i].values;
    for (std::size_t j = 0; j < r.edge[i].size(); ++j) {
      v[j] -= dt * r.edge[i][j];
    }
  }
  u.node_value -= dt * r.node;
  u.sync_node();
  return r.max_abs();
}

SolveReport solve_star(StarScheme const& scheme, JunctionGridFunction& u,
                       SolveParams const& params) {
  auto const start = std::chrono::steady_clock::now();
  SolveReport report;
  double const dt = scheme.explicit_dt(params.cfl);

  if (params.method == SolveMethod::PseudoTransient) {
    NewtonOptions opts;
    opts.tol = params.tol;
    opts.max_iters = static_cast<int>(std::min<long>(params.max_iters, 400));
    opts.pseudo_transient = true;
    JunctionGridFunction trial = u;
    report = newton_solve(scheme, trial, opts);
    if (report.converged) {
      u = std::move(trial);
    } else if (std::isfinite(report.final_residual) && trial.lipschitz() < 1e6) {
      u = std::move(trial);
      report.flags.push_back("explicit_fallback");
    } else {
      report.flags.push_back("explicit_fallback");
    }
  }

  if (!report.converged) {
    report.method = report.method.empty() ? "explicit" : report.method + "+explicit";
    double norm = 0.0;
    long it = 0;
    long const budget = params.max_iters - report.iterations;
    for (; it < budget; ++it) {
      norm = scheme.explicit_step(u, dt);
      if (norm <= params.tol || !std::isfinite(norm)) {
        break;
      }
    }
    StarVector const r = evaluate_residual(scheme, u);
    report.iterations += it;
    report.final_residual = r.max_abs();
    report.converged = report.final_residual <= params.tol;
  }
  report.dt = dt;
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace hjj
