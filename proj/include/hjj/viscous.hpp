#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hjj/junction_solver.hpp"
#include "hjj/newton.hpp"

namespace hjj {

struct ViscousParams {
  double epsilon = 0.1;
  double newton_tol = 1e-10;
  int max_newton = 60;
  double damping = 0.5;
  double min_step = 1.0 / 64.0;
  double continuation_start = 1.0;
};

/// -eps u'' + u + H_i(u', x) = 0 on each edge with central differences, far
/// ends from the EdgeSpec (Dirichlet pinned, Neumann by a reflected ghost) and
/// the Kirchhoff node row sum_i (3u0 - 4u_{i,n-1} + u_{i,n-2})/(2h_i) = 0.
class ViscousSystem : public StarResidual {
 public:
  ViscousSystem(JunctionProblem const& problem, double epsilon);

  int edges() const override { return static_cast<int>(problem_.edges.size()); }
  int cells(int i) const override { return problem_.edges[i].n_cells; }
  double row(int i, int j, double um, double u, double up) const override;
  double node_row(double u0, std::span<double const> last,
                  std::span<double const> second_last) const override;

  double epsilon() const { return epsilon_; }

 private:
  JunctionProblem const& problem_;
  double epsilon_;
};

struct ViscousSolution {
  JunctionGridFunction u;
  SolveReport report;
  double interior_residual = 0.0;  // max over edge rows
  double node_residual = 0.0;      // |Kirchhoff row|
  std::vector<double> schedule;    // continuation values actually solved
};

/// The continuation values from `start` halving down to `target` (target
/// alone when it is not below start).
std::vector<double> continuation_schedule(double start, double target);

/// Damped Newton along the continuation schedule. With `warm` the schedule
/// starts at `warm_epsilon` from that grid function instead of a constant.
ViscousSolution solve_viscous_kirchhoff(JunctionProblem const& problem, ViscousParams const& params,
                                        JunctionGridFunction const* warm = nullptr,
                                        double warm_epsilon = 0.0);

enum class LimitClass { SelectsStateConstraint, KirchhoffLimit, Undetermined };
enum class Selection { SelectsStateConstraint, NoGuarantee };

std::string to_string(LimitClass c);
std::string to_string(Selection s);

struct SweepRecord {
  double epsilon = 0.0;
  double node_value = 0.0;
  std::vector<double> slopes;
  double kirchhoff_sum = 0.0;
  long newton_iters = 0;
  bool converged = false;
  double interior_residual = 0.0;
  double node_residual = 0.0;
  double lipschitz = 0.0;
  JunctionGridFunction u;
};

struct VanishingViscosityReport {
  std::vector<SweepRecord> records;  // decreasing epsilon
  double extrapolated = 0.0;
  LimitClass classification = LimitClass::Undetermined;
  Selection predicted = Selection::NoGuarantee;
  double sc_reference = 0.0;
  double wall_time = 0.0;

  bool all_converged() const;
};

struct ClassifyThresholds {
  double delta_sc = 5e-2;
  double delta_k = 5e-2;
};

/// Solves every epsilon (strictly decreasing, at least 3 values, h <= eps_min/4
/// on every edge) warm-started from the previous one, extrapolates the node
/// value linearly in epsilon from the last two records, and classifies the
/// limit against the direct state-constraint solution on the same grid.
VanishingViscosityReport epsilon_sweep(JunctionProblem const& problem,
                                       std::vector<double> const& eps_list,
                                       ViscousParams const& params = {},
                                       ClassifyThresholds thresholds = {},
                                       SolveParams const& first_order = {});

/// SelectsStateConstraint iff the largest minima of the edge Hamiltonians sum
/// to at most 1e-9.
Selection predict_selection(JunctionProblem const& problem);

/// Richardson value from the last two records.
double extrapolate_node_value(std::vector<SweepRecord> const& records);

LimitClass classify_limit(VanishingViscosityReport const& report, double sc_value,
                          ClassifyThresholds thresholds = {});

}  // namespace hjj
