#include "hjj/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hjj {

std::string describe(FarBC const& bc) {
  std::ostringstream out;
  if (auto const* d = std::get_if<Dirichlet>(&bc)) {
    out << "dirichlet(" << d->value << ")";
  } else if (auto const* n = std::get_if<Neumann>(&bc)) {
    out << "neumann(" << n->slope << ")";
  } else {
    out << "state_constraint";
  }
  return out.str();
}

void EdgeSpec::validate() const {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("edge length must be positive and finite");
  }
  if (n_cells < 8) {
    throw std::invalid_argument("edge needs at least 8 cells");
  }
}

std::string to_string(GridRole role) {
  switch (role) {
    case GridRole::StateConstraint:
      return "state_constraint";
    case GridRole::Dirichlet:
      return "dirichlet";
    case GridRole::Generic:
      break;
  }
  return "generic";
}

double GridFunction1D::lipschitz() const {
  double lip = 0.0;
  for (std::size_t j = 0; j + 1 < values.size(); ++j) {
    lip = std::max(lip, std::abs(values[j + 1] - values[j]));
  }
  return lip / h();
}

GridFunction1D GridFunction1D::constant(EdgeSpec const& edge, double value, GridRole role) {
  return GridFunction1D{edge, std::vector<double>(static_cast<std::size_t>(edge.n_cells) + 1, value),
                        role};
}

void JunctionGridFunction::sync_node() {
  for (auto& g : per_edge) {
    g.values.back() = node_value;
  }
}

JunctionGridFunction JunctionGridFunction::shifted(double lambda) const {
  JunctionGridFunction out = *this;
  for (auto& g : out.per_edge) {
    for (double& v : g.values) {
      v += lambda;
    }
  }
  out.node_value += lambda;
  out.sync_node();
  return out;
}

double JunctionGridFunction::lipschitz() const {
  double lip = 0.0;
  for (auto const& g : per_edge) {
    lip = std::max(lip, g.lipschitz());
  }
  return lip;
}

bool SolveReport::has_flag(std::string const& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

void SolveReport::absorb(SolveReport const& other) {
  iterations += other.iterations;
  wall_time += other.wall_time;
  final_residual = std::max(final_residual, other.final_residual);
  converged = converged && other.converged;
  for (auto const& f : other.flags) {
    if (!has_flag(f)) {
      flags.push_back(f);
    }
  }
  if (method.empty()) {
    method = other.method;
    dt = other.dt;
  }
}

}  // namespace hjj
