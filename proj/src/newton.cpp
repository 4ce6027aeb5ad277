#include "hjj/newton.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace hjj {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double fd_step(double u) { return 1e-7 * (1.0 + std::abs(u)); }

double value_at(JunctionGridFunction const& u, int i, int j) {
  auto const& v = u.per_edge[i].values;
  if (j == static_cast<int>(v.size()) - 1) {
    return u.node_value;
  }
  return v[j];
}

void node_neighbors(StarResidual const& sys, JunctionGridFunction const& u,
                    std::vector<double>& last, std::vector<double>& second) {
  int const k = sys.edges();
  last.resize(k);
  second.resize(k);
  for (int i = 0; i < k; ++i) {
    int const n = sys.cells(i);
    last[i] = u.per_edge[i].values[n - 1];
    second[i] = u.per_edge[i].values[n - 2];
  }
}

void apply_step(JunctionGridFunction& u, StarVector const& d, double scale) {
  for (std::size_t i = 0; i < u.per_edge.size(); ++i) {
    auto& v = u.per_edge[i].values;
    for (std::size_t j = 0; j < d.edge[i].size(); ++j) {
      v[j] += scale * d.edge[i][j];
    }
  }
  u.node_value += scale * d.node;
  u.sync_node();
}

bool finite(StarVector const& v) {
  if (!std::isfinite(v.node)) {
    return false;
  }
  for (auto const& e : v.edge) {
    for (double x : e) {
      if (!std::isfinite(x)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

double StarVector::max_abs() const {
  double m = std::abs(node);
  for (auto const& e : edge) {
    for (double x : e) {
      m = std::max(m, std::abs(x));
    }
  }
  return m;
}

StarVector evaluate_residual(StarResidual const& sys, JunctionGridFunction const& u) {
  StarVector r;
  int const k = sys.edges();
  r.edge.resize(k);
  for (int i = 0; i < k; ++i) {
    int const n = sys.cells(i);
    r.edge[i].resize(n);
    for (int j = 0; j < n; ++j) {
      double const um = j == 0 ? kNaN : value_at(u, i, j - 1);
      r.edge[i][j] = sys.row(i, j, um, value_at(u, i, j), value_at(u, i, j + 1));
    }
  }
  std::vector<double> last, second;
  node_neighbors(sys, u, last, second);
  r.node = sys.node_row(u.node_value, last, second);
  return r;
}

ArrowMatrix assemble_jacobian(StarResidual const& sys, JunctionGridFunction const& u) {
  ArrowMatrix jac;
  int const k = sys.edges();
  jac.blocks.resize(k);
  for (int i = 0; i < k; ++i) {
    int const n = sys.cells(i);
    auto& b = jac.blocks[i];
    b.lower.assign(n, 0.0);
    b.diag.assign(n, 0.0);
    b.upper.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
      double const um = j == 0 ? kNaN : value_at(u, i, j - 1);
      double const uc = value_at(u, i, j);
      double const up = value_at(u, i, j + 1);
      if (j > 0) {
        double const s = fd_step(um);
        b.lower[j] = (sys.row(i, j, um + s, uc, up) - sys.row(i, j, um - s, uc, up)) / (2 * s);
      }
      double const sc = fd_step(uc);
      b.diag[j] = (sys.row(i, j, um, uc + sc, up) - sys.row(i, j, um, uc - sc, up)) / (2 * sc);
      double const sp = fd_step(up);
      double const dp = (sys.row(i, j, um, uc, up + sp) - sys.row(i, j, um, uc, up - sp)) / (2 * sp);
      if (j + 1 < n) {
        b.upper[j] = dp;
      } else {
        b.to_node = dp;
      }
    }
  }

  std::vector<double> last, second;
  node_neighbors(sys, u, last, second);
  double const u0 = u.node_value;
  double const s0 = fd_step(u0);
  jac.node_diag =
      (sys.node_row(u0 + s0, last, second) - sys.node_row(u0 - s0, last, second)) / (2 * s0);
  auto partial = [&](std::vector<double>& v, int i) {
    double const keep = v[i];
    double const s = fd_step(keep);
    v[i] = keep + s;
    double const fp = sys.node_row(u0, last, second);
    v[i] = keep - s;
    double const fm = sys.node_row(u0, last, second);
    v[i] = keep;
    return (fp - fm) / (2 * s);
  };
  for (int i = 0; i < k; ++i) {
    jac.blocks[i].from_last = partial(last, i);
    jac.blocks[i].from_second_last = partial(second, i);
  }
  return jac;
}

namespace {

// Thomas algorithm for a tridiagonal block with a diagonal shift.
bool thomas(ArrowMatrix::Block const& b, double shift, std::vector<double> const& rhs,
            std::vector<double>& x, std::vector<double>& scratch) {
  std::size_t const n = b.diag.size();
  x.resize(n);
  scratch.resize(n);
  double denom = b.diag[0] + shift;
  if (std::abs(denom) < 1e-300) {
    return false;
  }
  scratch[0] = b.upper[0] / denom;
  x[0] = rhs[0] / denom;
  for (std::size_t j = 1; j < n; ++j) {
    denom = b.diag[j] + shift - b.lower[j] * scratch[j - 1];
    if (std::abs(denom) < 1e-300 || !std::isfinite(denom)) {
      return false;
    }
    scratch[j] = j + 1 < n ? b.upper[j] / denom : 0.0;
    x[j] = (rhs[j] - b.lower[j] * x[j - 1]) / denom;
  }
  for (std::size_t j = n - 1; j-- > 0;) {
    x[j] -= scratch[j] * x[j + 1];
  }
  return true;
}

}  // namespace

bool solve_arrow(ArrowMatrix const& jac, double shift, StarVector const& rhs, StarVector& x) {
  std::size_t const k = jac.blocks.size();
  x.edge.resize(k);
  std::vector<std::vector<double>> z(k);
  std::vector<double> scratch;
  std::vector<double> col;
  double schur = jac.node_diag + shift;
  double node_rhs = rhs.node;
  for (std::size_t i = 0; i < k; ++i) {
    auto const& b = jac.blocks[i];
    std::size_t const n = b.diag.size();
    if (!thomas(b, shift, rhs.edge[i], x.edge[i], scratch)) {
      return false;
    }
    col.assign(n, 0.0);
    col[n - 1] = b.to_node;
    if (!thomas(b, shift, col, z[i], scratch)) {
      return false;
    }
    double const y_last = x.edge[i][n - 1];
    double const y_second = n >= 2 ? x.edge[i][n - 2] : 0.0;
    double const z_last = z[i][n - 1];
    double const z_second = n >= 2 ? z[i][n - 2] : 0.0;
    node_rhs -= b.from_last * y_last + b.from_second_last * y_second;
    schur -= b.from_last * z_last + b.from_second_last * z_second;
  }
  if (std::abs(schur) < 1e-300 || !std::isfinite(schur)) {
    return false;
  }
  x.node = node_rhs / schur;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < x.edge[i].size(); ++j) {
      x.edge[i][j] -= z[i][j] * x.node;
    }
  }
  return finite(x);
}

SolveReport newton_solve(StarResidual const& sys, JunctionGridFunction& u,
                         NewtonOptions const& opts) {
  auto const start = std::chrono::steady_clock::now();
  SolveReport report;
  report.method = opts.pseudo_transient ? "pseudo_transient_newton" : "damped_newton";
  u.sync_node();

  StarVector r = evaluate_residual(sys, u);
  double norm = r.max_abs();
  double dtau = opts.dtau0;
  StarVector rhs, step;
  int stalls = 0;

  while (report.iterations < opts.max_iters && norm > opts.tol && std::isfinite(norm)) {
    ++report.iterations;
    ArrowMatrix const jac = assemble_jacobian(sys, u);
    rhs = r;
    for (auto& e : rhs.edge) {
      for (double& v : e) {
        v = -v;
      }
    }
    rhs.node = -rhs.node;

    if (opts.pseudo_transient) {
      bool const solved = solve_arrow(jac, 1.0 / dtau, rhs, step);
      JunctionGridFunction trial = u;
      if (solved) {
        apply_step(trial, step, 1.0);
      }
      StarVector const rt = solved ? evaluate_residual(sys, trial) : StarVector{};
      double const nt = solved ? rt.max_abs() : std::numeric_limits<double>::infinity();
      if (solved && std::isfinite(nt) && nt < 2.0 * norm) {
        double const ratio = norm / std::max(nt, 1e-300);
        dtau = std::min(dtau * std::clamp(ratio, 0.1, 10.0), 1e14);
        u = std::move(trial);
        r = rt;
        norm = nt;
        stalls = 0;
      } else {
        dtau *= 0.25;
        if (dtau < 1e-10 || ++stalls > 40) {
          report.flags.push_back("newton_stagnated");
          break;
        }
      }
      continue;
    }

    if (!solve_arrow(jac, 0.0, rhs, step)) {
      report.flags.push_back("singular_jacobian");
      break;
    }
    double lambda = 1.0;
    bool accepted = false;
    while (lambda >= opts.min_step) {
      JunctionGridFunction trial = u;
      apply_step(trial, step, lambda);
      StarVector const rt = evaluate_residual(sys, trial);
      double const nt = rt.max_abs();
      if (std::isfinite(nt) && nt < (1.0 - 1e-4 * lambda) * norm) {
        u = std::move(trial);
        r = rt;
        norm = nt;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      report.flags.push_back("newton_stagnated");
      break;
    }
  }

  report.final_residual = norm;
  report.converged = norm <= opts.tol;
  report.dt = dtau;
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace hjj
