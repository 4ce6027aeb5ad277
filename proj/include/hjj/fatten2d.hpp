#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <vector>

#include "hjj/grid.hpp"
#include "hjj/hamiltonian.hpp"
#include "hjj/junction_solver.hpp"

namespace hjj {

/// Node grid over [-a1 - eps, eps] x [-a2 - eps, eps] with spacing h2 and a
/// mask for the L-shaped tube
///   [-a1, eps/2] x [-eps/2, eps/2]  union  [-eps/2, eps/2] x [-a2, eps/2]
/// (or only the first rectangle for a single arm). Both axes are gridlines.
struct FatDomain {
  struct Cell {
    int i = 0;  // x1 index
    int k = 0;  // x2 index
    int left = -1, right = -1, down = -1, up = -1;  // neighbor cells, -1 outside
  };

  double a1 = 1.0;
  double a2 = 1.0;
  double epsilon = 0.2;
  double h2 = 0.05;
  bool single_arm = false;
  int nx = 0;
  int ny = 0;
  double x1_min = 0.0;
  double x2_min = 0.0;
  std::vector<int> index;  // nx * ny, cell id or -1
  std::vector<Cell> cells;
  std::vector<int> boundary;  // cells missing at least one neighbor
  int axis_row = 0;           // k with x2 = 0
  int axis_col = 0;           // i with x1 = 0

  double x1(int i) const { return x1_min + i * h2; }
  double x2(int k) const { return x2_min + k * h2; }
  int at(int i, int k) const;
  bool connected() const;
  /// Width of the tube in cells along a cross-section.
  int tube_cells() const;
};

/// Throws std::invalid_argument unless h2 <= eps/4, eps < min(a1, a2)/2 and
/// (a + eps)/h2 is an integer for both arms.
FatDomain build_fat_domain(double a1, double a2, double epsilon, double h2);
/// One straight arm [-a, eps/2] x [-eps/2, eps/2].
FatDomain build_arm_domain(double a, double epsilon, double h2);

struct GridFunction2D {
  std::shared_ptr<FatDomain const> domain;
  std::vector<double> values;  // one per cell

  double lipschitz() const;
};

/// Sampled bounds of |dH/dp1| and |dH/dp2| over [-B, B]^2 x (arm samples).
std::pair<double, double> dissipation_2d(Hamiltonian2D const& h, FatDomain const& dom);

/// Explicit state-constraint scheme on a fat domain: 2-D Lax-Friedrichs in
/// every direction with both neighbors, and minimization over the admissible
/// half-line of the test slope in a direction with a missing neighbor.
class FatScheme {
 public:
  FatScheme(Hamiltonian2D h, std::shared_ptr<FatDomain const> dom, double theta1 = 0.0,
            double theta2 = 0.0);

  double residual(int cell, std::vector<double> const& u) const;
  double dt(double cfl) const;
  double theta1() const { return theta1_; }
  double theta2() const { return theta2_; }
  double bound() const { return bound_; }
  FatDomain const& domain() const { return *dom_; }
  /// u - dt * residual at one cell
  double update(int cell, std::vector<double> const& u, double dt) const;

 private:
  Hamiltonian2D h_;
  std::shared_ptr<FatDomain const> dom_;
  double theta1_;
  double theta2_;
  double bound_;
};

struct FatSolution {
  GridFunction2D u;
  SolveReport report;
};

/// Jacobi pseudo-time iteration from `initial` (default: the constant
/// -max H(0, 0, x) over the arms, a sub-solution).
FatSolution solve_fat_state_constraint(Hamiltonian2D const& h, FatDomain const& dom,
                                       SolveParams const& params = {},
                                       std::optional<double> initial = std::nullopt);

/// Values on the gridline of the given axis over the arm [-a, 0]; the last
/// entry is the value at the origin.
GridFunction1D extract_axis_trace(GridFunction2D const& u, int axis);

struct FatteningRecord {
  double epsilon = 0.0;
  double h2 = 0.0;
  bool converged = false;
  long iterations = 0;
  double node_value = 0.0;
  double reference_node_value = 0.0;
  double trace_error[2] = {0.0, 0.0};    // max |trace - u_hat| per arm
  double reduced_residual[2] = {0.0, 0.0};
  double junction_supersolution = 0.0;   // u(0) + H(slope1, slope2, 0, 0)
  double wall_time = 0.0;
  GridFunction1D traces[2];

  double max_error() const { return std::max(trace_error[0], trace_error[1]); }
};

struct FattenParams {
  double a1 = 1.0;
  double a2 = 1.0;
  double h2_ratio = 8.0;  // h2 = eps / h2_ratio
  int reduce_resolution = 256;
  SolveParams solve;
};

struct FatteningReport {
  std::vector<FatteningRecord> records;  // decreasing epsilon
  double wall_time = 0.0;

  bool all_converged() const;
  /// max error nonincreasing between consecutive records (up to `floor`)
  bool errors_nonincreasing(double floor = 0.0) const;
};

/// Solves every epsilon (decreasing) in parallel, extracts both traces and
/// compares them with the state-constraint junction solution of the reduced
/// Hamiltonians (state constraint at the far ends as well), computed on the
/// trace grid refined until its spacing is at most 1/400.
FatteningReport fattening_study(Hamiltonian2D const& h, std::vector<double> const& eps_list,
                                FattenParams const& params = {});

/// H(p1, p2) = p1^2 + 10 p2^2 at (1, 1) against its reductions
/// H1(1) = min_p2 H(1, p2) and H2(1) = min_p1 H(p1, 1).
struct CounterexampleWitness {
  double joint = 0.0;
  double reduced1 = 0.0;
  double reduced2 = 0.0;

  double reduced_max() const { return std::max(reduced1, reduced2); }
};
CounterexampleWitness counterexample_witness();

}  // namespace hjj
