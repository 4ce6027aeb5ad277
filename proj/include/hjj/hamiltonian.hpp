#pragma once

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hjj {

/// Thrown when a Hamiltonian cannot be built or does not meet the
/// assumptions an operation needs (coercivity, single minimum, ...).
class HamiltonianError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ShapeFlags {
  bool quasiconvex = false;
  bool convex = false;
  bool no_flat_parts = true;
};

/// Where a Hamiltonian came from; enough to write it back to a problem file.
struct HamiltonianSource {
  std::string family;          // abs_shift | quadratic | double_well | expression | derived
  std::vector<double> params;  // family parameters (b, c)
  std::string text;            // expression text or a description for derived forms
};

struct ProbeDefaults {
  static constexpr double kHardCap = 1e4;
  static constexpr double kResolution = 1e-3;
  static constexpr int kMinimaResolution = 4096;
};

/// A continuous map (p, x) -> H(p, x) on an edge parametrized by x in [-a, 0].
///
/// Values are immutable after construction and evaluation is pure, so a
/// Hamiltonian may be shared freely between threads. Construction probes the
/// coercivity bound at level max_x |H(0, x)| + 1 over the edge and locates
/// the local minima of p -> H(p, 0).
class Hamiltonian {
 public:
  using Fn = std::function<double(double p, double x)>;

  /// Builds from a callable. When `minima` / `shape` are given they are
  /// trusted (closed-form families); otherwise both are detected by sampling.
  static Hamiltonian from_function(Fn fn, HamiltonianSource source, double domain_length = 1.0,
                                   std::vector<double> const* minima = nullptr,
                                   ShapeFlags const* shape = nullptr);

  /// Wraps a transform of `parent` (envelope, reflection) that shares its
  /// probe data; no coercivity probing is done.
  static Hamiltonian derived(Fn fn, std::string description, Hamiltonian const& parent,
                             std::vector<double> minima, ShapeFlags shape);

  double operator()(double p, double x) const { return (*fn_)(p, x); }

  double coercivity_bound() const noexcept { return bound_; }
  double coercivity_level() const noexcept { return level_; }
  std::vector<double> const& minima() const noexcept { return minima_; }
  ShapeFlags shape() const noexcept { return shape_; }
  HamiltonianSource const& source() const noexcept { return source_; }
  double domain_length() const noexcept { return domain_length_; }
  bool minima_overridden() const noexcept { return minima_overridden_; }

  /// Evenly spaced sample positions in [-domain_length, 0] (both ends included).
  std::vector<double> x_samples(int count = 9) const;

  /// Re-probes over a different edge length.
  Hamiltonian with_domain(double length) const;
  /// Replaces the detected minima (problem files may supply them).
  Hamiltonian with_minima(std::vector<double> minima) const;
  /// Re-probes the coercivity bound at a higher level (never lowers it).
  Hamiltonian with_level(double level) const;

  std::string describe() const;

 private:
  Hamiltonian() = default;

  std::shared_ptr<Fn const> fn_;
  HamiltonianSource source_;
  double domain_length_ = 1.0;
  double level_ = 0.0;
  double bound_ = 0.0;
  std::vector<double> minima_;
  ShapeFlags shape_;
  bool minima_overridden_ = false;
};

/// Closed-form families: abs_shift |p-b|-c, quadratic (p-b)^2-c and
/// double_well ((p-b)^2-1)^2-c. `params` is (b, c).
Hamiltonian make_builtin(std::string_view family, std::span<double const> params,
                         double domain_length = 1.0);

/// Parses an expression in the variables p and x.
Hamiltonian parse_expression(std::string_view src, double domain_length = 1.0);

/// Smallest probed magnitude P with H(+-q, x) >= level for every probed q >= P
/// and every x in `x_samples`. Doubling search, then a scan and bisection to
/// `resolution`. Throws HamiltonianError("not coercive ...") past `hard_cap`.
double probe_coercivity(Hamiltonian::Fn const& fn, double level, std::span<double const> x_samples,
                        double hard_cap = ProbeDefaults::kHardCap,
                        double resolution = ProbeDefaults::kResolution);
double probe_coercivity(Hamiltonian const& h, double level, std::span<double const> x_samples);

/// Local minimizers of p -> H(p, x) on [-bound, bound], refined by
/// golden-section search to 1e-8 and merged within 1e-6. A run of equal
/// samples counts as one minimum (its midpoint) and is reported as flat.
struct MinimaScan {
  std::vector<double> minima;
  bool flat = false;
};
MinimaScan scan_minima(Hamiltonian::Fn const& fn, double bound, int resolution, double x = 0.0);
std::vector<double> find_minima(Hamiltonian const& h, double bound,
                                int resolution = ProbeDefaults::kMinimaResolution);

/// H^-(p) = H(min(p, p0), 0) for a single-minimum Hamiltonian with minimizer p0.
Hamiltonian nonincreasing_part(Hamiltonian const& h);

/// Mirror image p -> H(-p, x); used to move between the edge coordinate
/// (x in [-a, 0]) and the coordinate pointing away from the junction.
Hamiltonian reflect(Hamiltonian const& h);

/// The junction Hamiltonian H_A(p_1..p_K) = max(A, max_i H_i^-(p_i, 0)).
class FluxLimiter {
 public:
  FluxLimiter(double limiter_value, std::vector<Hamiltonian> envelopes);

  double operator()(std::span<double const> slopes) const;

  double limiter_value() const noexcept { return limiter_value_; }
  std::vector<Hamiltonian> const& envelopes() const noexcept { return envelopes_; }

 private:
  double limiter_value_;
  std::vector<Hamiltonian> envelopes_;
};

FluxLimiter make_flux_limiter(std::span<Hamiltonian const> hamiltonians, double limiter_value);

/// P-bar = inf of the connected set {z : H(z,0) <= H(p,0) for all p >= z}
/// that reaches the coercivity bound; computed with a suffix-minimum scan and
/// refined by bisection to 1e-6.
double rightward_min_threshold(Hamiltonian const& h);

/// Running minima of q -> H(q, x) over half-lines, exact up to minima
/// detection: the minimum over [p, R] is attained at p, R or an interior
/// local minimizer.
class SlopeEnvelope {
 public:
  SlopeEnvelope() = default;
  SlopeEnvelope(Hamiltonian const& h, double x, double range);

  /// min over q in [p, max(p, range)] of H(q, x).
  double suffix_min(double p) const;
  /// min over q in [min(p, -range), p] of H(q, x).
  double prefix_min(double p) const;

 private:
  std::shared_ptr<Hamiltonian::Fn const> fn_;
  double x_ = 0.0;
  double range_ = 0.0;
  std::vector<double> minimizers_;
  std::vector<double> values_;
};

/// Sampled max |dH/dp| over [lo, hi] x x_samples.
double slope_lipschitz(Hamiltonian const& h, double lo, double hi,
                       std::span<double const> x_samples, int samples = 2048);

/// Bounding interval of {p in [-bound, bound] : min_x H(p, x) <= level}.
std::pair<double, double> sublevel_hull(Hamiltonian const& h, double level, double bound,
                                        std::span<double const> x_samples, int samples = 4096);

/// H(p1, p2, x1, x2) on the plane, coercive jointly in (p1, p2).
class Hamiltonian2D {
 public:
  using Fn = std::function<double(double p1, double p2, double x1, double x2)>;

  /// Probes the joint coercivity bound at level max |H(0,0,x)| + 1 over the
  /// two arms {(x1,0): x1 in [-a1,0]} and {(0,x2): x2 in [-a2,0]}.
  static Hamiltonian2D from_function(Fn fn, std::string description, double a1 = 1.0,
                                     double a2 = 1.0);

  double operator()(double p1, double p2, double x1, double x2) const {
    return (*fn_)(p1, p2, x1, x2);
  }

  double coercivity_bound() const noexcept { return bound_; }
  double coercivity_level() const noexcept { return level_; }
  std::string const& source() const noexcept { return source_; }
  std::pair<double, double> arms() const noexcept { return {a1_, a2_}; }

  Hamiltonian2D with_arms(double a1, double a2) const;

 private:
  Hamiltonian2D() = default;

  std::shared_ptr<Fn const> fn_;
  std::string source_;
  double a1_ = 1.0;
  double a2_ = 1.0;
  double level_ = 0.0;
  double bound_ = 0.0;
};

/// Parses an expression in p1, p2, x1, x2.
Hamiltonian2D parse_expression_2d(std::string_view src, double a1 = 1.0, double a2 = 1.0);

/// H_1(p1, x1) = min_{p2} H(p1, p2, x1, 0) (axis 1) or
/// H_2(p2, x2) = min_{p1} H(p1, p2, 0, x2) (axis 2), minimizing over the
/// transverse slope on a grid of [-P, P] with golden-section refinement.
Hamiltonian reduce_2d(Hamiltonian2D const& h2, int axis, int resolution = 256);

/// Golden-section search for a minimum of f on [lo, hi]; returns (argmin, min).
std::pair<double, double> golden_section_min(std::function<double(double)> const& f, double lo,
                                             double hi, double tol = 1e-10);

}  // namespace hjj
