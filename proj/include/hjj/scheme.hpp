#pragma once

#include <span>
#include <variant>
#include <vector>

#include "hjj/grid.hpp"
#include "hjj/hamiltonian.hpp"
#include "hjj/newton.hpp"

namespace hjj {

/// H((p- + p+)/2, x) - (theta/2)(p+ - p-)
double lax_friedrichs_flux(Hamiltonian const& h, double p_minus, double p_plus, double theta,
                           double x);

/// Junction conditions understood by the first-order star scheme. The flux
/// limiter is evaluated on outgoing slopes (u_{n-1} - u0)/h, so its envelopes
/// must be built from reflected Hamiltonians.
using NodeCondition = std::variant<StateConstraint, Dirichlet, FluxLimiter>;

/// Monotone Lax-Friedrichs discretization of u + H_i(u_x, x) = 0 on a star of
/// K edges, with far-end conditions from each EdgeSpec and one of the node
/// conditions above.
///
///   interior   u_j + H^((u_j - u_{j-1})/h, (u_{j+1} - u_j)/h, x_j)
///   Neumann    ghost slope s on the left: u_0 + H^(s, (u_1 - u_0)/h, -a)
///   Dirichlet  u_0 - v
///   far s.c.   u_0 + min_{q <= (u_1 - u_0)/h} H(q, -a)
///   node s.c.  u0 + max_i min_{q >= (u0 - u_{i,n-1})/h_i} H_i(q, 0)
///   node Dir.  max(u0 - c, node s.c. residual)
///   node flux  u0 + H_A((u_{i,n-1} - u0)/h_i)
///
/// The dissipation theta_i bounds |dH_i/dp| on a widened sublevel hull that
/// contains every slope a solution can take.
class StarScheme : public StarResidual {
 public:
  StarScheme(std::vector<Hamiltonian> hamiltonians, std::vector<EdgeSpec> edges,
             NodeCondition node, double theta_override = 0.0);

  int edges() const override { return static_cast<int>(edges_.size()); }
  int cells(int i) const override { return edges_[i].spec.n_cells; }
  double row(int i, int j, double um, double u, double up) const override;
  double node_row(double u0, std::span<double const> last,
                  std::span<double const> second_last) const override;

  double theta(int i) const { return edges_[i].theta; }
  double h(int i) const { return edges_[i].h; }
  EdgeSpec const& edge(int i) const { return edges_[i].spec; }
  Hamiltonian const& hamiltonian(int i) const { return edges_[i].hamiltonian; }
  NodeCondition const& node_condition() const { return node_; }

  /// min over q >= p of H_i(q, 0)
  double node_envelope(int i, double p) const;
  /// cfl * min_i h_i / (theta_i + h_i)
  double explicit_dt(double cfl) const;

  /// A constant that is a sub-solution of every row: -max_{i,x} H_i(0, x),
  /// lowered to the Dirichlet data.
  JunctionGridFunction initial_guess() const;

  /// One Jacobi pseudo-time step u <- u - dt R(u). Returns max |R(u)|.
  double explicit_step(JunctionGridFunction& u, double dt) const;

 private:
  struct EdgeData {
    Hamiltonian hamiltonian;
    EdgeSpec spec;
    double h;
    double theta;
    SlopeEnvelope node_env;
    SlopeEnvelope far_env;
  };

  std::vector<EdgeData> edges_;
  NodeCondition node_;
};

/// Drives the scheme to its fixed point from `guess`: pseudo-transient Newton
/// followed, if needed, by explicit pseudo-time steps with the remaining
/// budget (or explicit steps only when params.method is Explicit).
SolveReport solve_star(StarScheme const& scheme, JunctionGridFunction& u,
                       SolveParams const& params);

}  // namespace hjj
