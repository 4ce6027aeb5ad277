#pragma once

#include <string>
#include <variant>
#include <vector>

namespace hjj {

struct Dirichlet {
  double value = 0.0;
};
struct Neumann {
  double slope = 0.0;
};
struct StateConstraint {};

using FarBC = std::variant<Dirichlet, Neumann, StateConstraint>;
using NodeBC = std::variant<Dirichlet, StateConstraint>;

std::string describe(FarBC const& bc);

/// One edge (-a, 0) of a star, discretized by n_cells uniform cells. Node j
/// sits at x_j = -a + j h; j = n_cells is the junction end.
struct EdgeSpec {
  double length = 1.0;
  int n_cells = 400;
  FarBC far_bc = Neumann{0.0};

  double h() const { return length / n_cells; }
  double x(int j) const { return -length + j * h(); }
  /// Throws std::invalid_argument on a non-positive length or n_cells < 8.
  void validate() const;
};

enum class GridRole { StateConstraint, Dirichlet, Generic };

std::string to_string(GridRole role);

struct GridFunction1D {
  EdgeSpec edge;
  std::vector<double> values;  // n_cells + 1 entries, x = -a ... 0
  GridRole role = GridRole::Generic;

  double h() const { return edge.h(); }
  int n() const { return edge.n_cells; }
  double node_value() const { return values.back(); }
  /// max_j |u_{j+1} - u_j| / h
  double lipschitz() const;

  static GridFunction1D constant(EdgeSpec const& edge, double value,
                                 GridRole role = GridRole::Generic);
};

/// Per-edge arrays sharing one junction value: per_edge[i].values.back()
/// always equals node_value.
struct JunctionGridFunction {
  std::vector<GridFunction1D> per_edge;
  double node_value = 0.0;

  int K() const { return static_cast<int>(per_edge.size()); }
  /// Copies node_value into the last entry of every edge.
  void sync_node();
  JunctionGridFunction shifted(double lambda) const;
  double lipschitz() const;
};

enum class SolveMethod { Explicit, PseudoTransient };

struct SolveParams {
  double tol = 1e-8;
  long max_iters = 200000;
  double cfl = 0.9;
  SolveMethod method = SolveMethod::PseudoTransient;
  double theta = 0.0;  // > 0 overrides the sampled dissipation coefficient
};

struct SolveReport {
  long iterations = 0;
  double final_residual = 0.0;
  double dt = 0.0;
  bool converged = false;
  double wall_time = 0.0;
  std::string method;
  std::vector<std::string> flags;

  bool has_flag(std::string const& flag) const;
  /// Accumulates iterations, time and flags of a sub-solve; the residual and
  /// convergence state become the worst of both.
  void absorb(SolveReport const& other);
};

}  // namespace hjj
