#pragma once

#include <span>
#include <vector>

#include "hjj/grid.hpp"

namespace hjj {

/// A nonlinear system on a star grid. The unknowns are u_{i,j} for
/// j = 0 .. n_i - 1 on every edge plus the shared node value u0 (which plays
/// the role of u_{i,n_i}). Row (i, j) depends on u_{i,j-1}, u_{i,j} and
/// u_{i,j+1} only; the node row depends on u0 and on the last two unknowns of
/// every edge. The Jacobian therefore has arrow structure.
class StarResidual {
 public:
  virtual ~StarResidual() = default;

  virtual int edges() const = 0;
  virtual int cells(int i) const = 0;
  /// `um` is NaN for j = 0.
  virtual double row(int i, int j, double um, double u, double up) const = 0;
  virtual double node_row(double u0, std::span<double const> last,
                          std::span<double const> second_last) const = 0;
};

struct StarVector {
  std::vector<std::vector<double>> edge;  // n_i entries each
  double node = 0.0;

  double max_abs() const;
};

/// Residual of `u` (node copies in u.per_edge are ignored; u.node_value is used).
StarVector evaluate_residual(StarResidual const& sys, JunctionGridFunction const& u);

/// Tridiagonal block per edge, a column coupling row n_i - 1 to the node and
/// a node row with entries on the last two unknowns of each edge.
struct ArrowMatrix {
  struct Block {
    std::vector<double> lower, diag, upper;  // lower[0] and upper[n-1] unused
    double to_node = 0.0;                    // d row(n-1) / d u0
    double from_last = 0.0;                  // d node / d u_{n-1}
    double from_second_last = 0.0;           // d node / d u_{n-2}
  };
  std::vector<Block> blocks;
  double node_diag = 0.0;
};

/// Central finite-difference Jacobian with steps 1e-7 (1 + |u|).
ArrowMatrix assemble_jacobian(StarResidual const& sys, JunctionGridFunction const& u);

/// Solves (J + shift I) x = rhs by Thomas sweeps and a Schur complement on the
/// node. Returns false on a vanishing pivot.
bool solve_arrow(ArrowMatrix const& jac, double shift, StarVector const& rhs, StarVector& x);

struct NewtonOptions {
  double tol = 1e-8;
  int max_iters = 200;
  bool pseudo_transient = true;   // pseudo-transient continuation
  double dtau0 = 1.0;
  double min_step = 1.0 / 64.0;   // backtracking floor (plain damped Newton)
};

/// Newton iteration on `u` in place. With pseudo_transient the step solves
/// (J + I/dtau) d = -R and dtau grows with the residual ratio; otherwise
/// backtracking halves the step until the residual norm drops.
SolveReport newton_solve(StarResidual const& sys, JunctionGridFunction& u,
                         NewtonOptions const& opts);

}  // namespace hjj
