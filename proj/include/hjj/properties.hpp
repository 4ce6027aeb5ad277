#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hjj/junction_solver.hpp"

namespace hjj {

struct MonotonicityResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  double worst = 0.0;  // most negative change of the update

  bool passed() const { return trials > 0 && failures == 0; }
};

/// Randomized checks that the explicit update u - dt R(u) at the CFL step is
/// nondecreasing in every value it reads: interior rows of the 1-D scheme,
/// the state-constraint node row, and interior cells of the 2-D scheme.
MonotonicityResult check_monotone_interior_1d(std::uint64_t seed, int trials = 1000);
MonotonicityResult check_monotone_node_1d(std::uint64_t seed, int trials = 1000);
MonotonicityResult check_monotone_interior_2d(std::uint64_t seed, int trials = 1000);

struct ShiftRecord {
  double lambda = 0.0;        // signed shift
  double max_residual = 0.0;  // max scheme residual of u + lambda
  double min_residual = 0.0;
  double excess = 0.0;        // max (u + lambda) - u for lambda < 0, max u - (u + lambda) otherwise
  double return_distance = 0.0;  // |solve from u + lambda - u|
  bool ok = false;
};

/// Comparison checks around a solution u of `problem`: u - lambda must be a
/// discrete sub-solution below u, u + lambda a super-solution above u, and
/// the solver must return to u from both.
std::vector<ShiftRecord> shift_comparison(JunctionGridFunction const& u,
                                          JunctionProblem const& problem,
                                          std::vector<double> const& lambdas,
                                          SolveParams const& params = {});

}  // namespace hjj
