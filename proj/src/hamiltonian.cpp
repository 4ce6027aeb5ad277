#include "hjj/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "hjj/expression.hpp"

namespace hjj {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;

// Generic bound search: smallest q with margin(q') >= 0 for every probed q' >= q.
double probe_bound(std::function<double(double)> const& margin, double hard_cap,
                   double resolution) {
  std::vector<double> probes;
  for (double q = 0.0625; q < hard_cap; q *= 2.0) {
    probes.push_back(q);
  }
  probes.push_back(hard_cap);

  std::vector<bool> holds(probes.size());
  for (std::size_t k = 0; k < probes.size(); ++k) {
    holds[k] = margin(probes[k]) >= 0.0;
  }
  if (!holds.back()) {
    std::ostringstream os;
    os << "not coercive at this level (no bound found below " << hard_cap << ")";
    throw HamiltonianError(os.str());
  }
  std::size_t first = probes.size() - 1;
  while (first > 0 && holds[first - 1]) {
    --first;
  }

  double const hi = probes[first];
  double const lo = first == 0 ? 0.0 : probes[first - 1];

  // Walk down from hi until the condition first fails.
  constexpr int kScan = 256;
  double const step = (hi - lo) / kScan;
  double pass = hi;
  double fail = lo;
  bool failed = first != 0;
  for (int k = 1; k <= kScan; ++k) {
    double const q = hi - k * step;
    if (margin(q) < 0.0) {
      fail = q;
      failed = true;
      break;
    }
    pass = q;
  }
  if (!failed) {
    return std::max(pass, resolution);
  }
  while (pass - fail > resolution) {
    double const mid = 0.5 * (pass + fail);
    if (margin(mid) >= 0.0) {
      pass = mid;
    } else {
      fail = mid;
    }
  }
  return pass;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> xs(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    xs[static_cast<std::size_t>(k)] =
        count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (count - 1);
  }
  return xs;
}

ShapeFlags detect_shape(Hamiltonian::Fn const& fn, double bound, MinimaScan const& scan) {
  constexpr int kSamples = 4096;
  double const dp = 2.0 * bound / kSamples;
  std::vector<double> v(kSamples + 1);
  double scale = 1.0;
  for (int k = 0; k <= kSamples; ++k) {
    v[static_cast<std::size_t>(k)] = fn(-bound + k * dp, 0.0);
    scale = std::max(scale, std::abs(v[static_cast<std::size_t>(k)]));
  }

  ShapeFlags flags;
  flags.no_flat_parts = !scan.flat;

  double const tol = 1e-9 * scale;
  flags.convex = true;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    if (v[k - 1] - 2.0 * v[k] + v[k + 1] < -tol) {
      flags.convex = false;
      break;
    }
  }

  flags.quasiconvex = scan.minima.size() == 1;
  if (flags.quasiconvex) {
    double const p0 = scan.minima.front();
    for (std::size_t k = 1; k < v.size(); ++k) {
      double const p = -bound + static_cast<double>(k) * dp;
      bool const left = p <= p0;
      if (left && v[k] > v[k - 1] + tol) {
        flags.quasiconvex = false;
        break;
      }
      if (!left && p - dp >= p0 && v[k] < v[k - 1] - tol) {
        flags.quasiconvex = false;
        break;
      }
    }
  }
  return flags;
}

}  // namespace

std::pair<double, double> golden_section_min(std::function<double(double)> const& f, double lo,
                                             double hi, double tol) {
  double a = lo;
  double b = hi;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  double const m = 0.5 * (a + b);
  double const fm = f(m);
  // Bracket ends can win on kinked or one-sided functions.
  std::array<std::pair<double, double>, 3> cand{{{m, fm}, {lo, f(lo)}, {hi, f(hi)}}};
  return *std::min_element(cand.begin(), cand.end(),
                           [](auto const& x, auto const& y) { return x.second < y.second; });
}

// ---------------------------------------------------------------------------
// Hamiltonian

Hamiltonian Hamiltonian::from_function(Fn fn, HamiltonianSource source, double domain_length,
                                       std::vector<double> const* minima,
                                       ShapeFlags const* shape) {
  if (!(domain_length > 0.0) || !std::isfinite(domain_length)) {
    throw HamiltonianError("domain length must be positive and finite");
  }
  Hamiltonian h;
  h.fn_ = std::make_shared<Fn const>(std::move(fn));
  h.source_ = std::move(source);
  h.domain_length_ = domain_length;

  auto const xs = h.x_samples();
  double level = 0.0;
  for (double x : xs) {
    double const v = (*h.fn_)(0.0, x);
    if (!std::isfinite(v)) {
      throw HamiltonianError("Hamiltonian is not finite at p = 0");
    }
    level = std::max(level, std::abs(v));
  }
  h.level_ = level + 1.0;
  h.bound_ = probe_coercivity(*h.fn_, h.level_, xs);

  // Finiteness on the probed box.
  for (double x : xs) {
    for (double p : linspace(-h.bound_, h.bound_, 257)) {
      if (!std::isfinite((*h.fn_)(p, x))) {
        throw HamiltonianError("Hamiltonian is not finite on [-P, P]");
      }
    }
  }

  MinimaScan scan;
  if (minima != nullptr) {
    scan.minima = *minima;
    std::sort(scan.minima.begin(), scan.minima.end());
  } else {
    scan = scan_minima(*h.fn_, h.bound_, ProbeDefaults::kMinimaResolution);
  }
  h.minima_ = scan.minima;
  h.shape_ = shape != nullptr ? *shape : detect_shape(*h.fn_, h.bound_, scan);
  return h;
}

std::vector<double> Hamiltonian::x_samples(int count) const {
  return linspace(-domain_length_, 0.0, count);
}

Hamiltonian Hamiltonian::with_domain(double length) const {
  bool const closed_form = source_.family != "expression" && source_.family != "derived";
  auto const keep = minima_;
  Hamiltonian h = (minima_overridden_ || closed_form)
                      ? from_function(*fn_, source_, length, &keep, &shape_)
                      : from_function(*fn_, source_, length, nullptr, nullptr);
  h.minima_overridden_ = minima_overridden_;
  return h;
}

Hamiltonian Hamiltonian::with_minima(std::vector<double> minima) const {
  Hamiltonian h = *this;
  std::sort(minima.begin(), minima.end());
  h.minima_ = std::move(minima);
  h.minima_overridden_ = true;
  return h;
}

Hamiltonian Hamiltonian::with_level(double level) const {
  if (level <= level_) {
    return *this;
  }
  Hamiltonian h = *this;
  h.level_ = level;
  auto const xs = x_samples();
  h.bound_ = probe_coercivity(*fn_, level, xs);
  return h;
}

std::string Hamiltonian::describe() const {
  std::ostringstream os;
  if (source_.family == "expression" || source_.family == "derived") {
    os << source_.text;
  } else {
    os << source_.family << "(";
    for (std::size_t k = 0; k < source_.params.size(); ++k) {
      os << (k == 0 ? "b=" : ", c=") << source_.params[k];
    }
    os << ")";
  }
  return os.str();
}

Hamiltonian make_builtin(std::string_view family, std::span<double const> params,
                         double domain_length) {
  if (family == "expression") {
    throw HamiltonianError("family 'expression' needs source text; use parse_expression");
  }
  if (family != "abs_shift" && family != "quadratic" && family != "double_well") {
    throw HamiltonianError("unknown Hamiltonian family '" + std::string(family) + "'");
  }
  if (params.size() != 2) {
    throw HamiltonianError("family '" + std::string(family) + "' expects parameters (b, c), got " +
                           std::to_string(params.size()));
  }
  double const b = params[0];
  double const c = params[1];
  if (!std::isfinite(b) || !std::isfinite(c)) {
    throw HamiltonianError("Hamiltonian parameters must be finite");
  }

  HamiltonianSource src{std::string(family), {b, c}, {}};
  if (family == "abs_shift") {
    std::vector<double> const minima{b};
    ShapeFlags const flags{true, true, true};
    return Hamiltonian::from_function([b, c](double p, double) { return std::abs(p - b) - c; },
                                      src, domain_length, &minima, &flags);
  }
  if (family == "quadratic") {
    std::vector<double> const minima{b};
    ShapeFlags const flags{true, true, true};
    return Hamiltonian::from_function(
        [b, c](double p, double) { return (p - b) * (p - b) - c; }, src, domain_length, &minima,
        &flags);
  }
  std::vector<double> const minima{b - 1.0, b + 1.0};
  ShapeFlags const flags{false, false, true};
  return Hamiltonian::from_function(
      [b, c](double p, double) {
        double const s = (p - b) * (p - b) - 1.0;
        return s * s - c;
      },
      src, domain_length, &minima, &flags);
}

Hamiltonian parse_expression(std::string_view src, double domain_length) {
  auto expr = std::make_shared<Expression const>(src, std::vector<std::string>{"p", "x"});
  return Hamiltonian::from_function(
      [expr](double p, double x) {
        std::array<double, 2> const v{p, x};
        return (*expr)(v);
      },
      HamiltonianSource{"expression", {}, std::string(src)}, domain_length);
}

double probe_coercivity(Hamiltonian::Fn const& fn, double level, std::span<double const> x_samples,
                        double hard_cap, double resolution) {
  if (!std::isfinite(level)) {
    throw HamiltonianError("coercivity level must be finite");
  }
  std::vector<double> const xs(x_samples.begin(), x_samples.end());
  auto margin = [&](double q) {
    double m = kInf;
    for (double x : xs) {
      m = std::min({m, fn(q, x), fn(-q, x)});
    }
    return m - level;
  };
  return probe_bound(margin, hard_cap, resolution);
}

double probe_coercivity(Hamiltonian const& h, double level, std::span<double const> x_samples) {
  return probe_coercivity([&h](double p, double x) { return h(p, x); }, level, x_samples);
}

MinimaScan scan_minima(Hamiltonian::Fn const& fn, double bound, int resolution, double x) {
  if (resolution < 64) {
    throw HamiltonianError("minima scan resolution must be at least 64");
  }
  double const dp = 2.0 * bound / resolution;
  std::vector<double> v(static_cast<std::size_t>(resolution) + 1);
  for (int k = 0; k <= resolution; ++k) {
    v[static_cast<std::size_t>(k)] = fn(-bound + k * dp, x);
  }
  auto same = [](double a, double b) {
    return std::abs(a - b) <= 1e-13 * (1.0 + std::abs(a));
  };

  MinimaScan out;
  std::size_t const n = v.size();
  std::size_t s = 1;
  while (s + 1 < n) {
    std::size_t e = s;
    while (e + 1 < n && same(v[e + 1], v[s])) {
      ++e;
    }
    if (e + 1 < n && v[s - 1] > v[s] && v[e + 1] > v[e]) {
      if (e == s) {
        double const p = -bound + static_cast<double>(s) * dp;
        auto f = [&](double q) { return fn(q, x); };
        auto [arg, val] = golden_section_min(f, p - dp, p + dp, 1e-9);
        out.minima.push_back(val <= v[s] ? arg : p);
      } else {
        out.flat = true;
        out.minima.push_back(-bound + 0.5 * static_cast<double>(s + e) * dp);
      }
    }
    s = e + 1;
  }

  std::vector<double> merged;
  for (double m : out.minima) {
    if (merged.empty() || m - merged.back() > 1e-6) {
      merged.push_back(m);
    }
  }
  out.minima = std::move(merged);
  return out;
}

std::vector<double> find_minima(Hamiltonian const& h, double bound, int resolution) {
  return scan_minima([&h](double p, double x) { return h(p, x); }, bound, resolution).minima;
}

Hamiltonian Hamiltonian::derived(Fn fn, std::string description, Hamiltonian const& parent,
                                 std::vector<double> minima, ShapeFlags shape) {
  Hamiltonian h;
  h.fn_ = std::make_shared<Fn const>(std::move(fn));
  h.source_ = HamiltonianSource{"derived", {}, std::move(description)};
  h.domain_length_ = parent.domain_length_;
  h.level_ = parent.level_;
  h.bound_ = parent.bound_;
  std::sort(minima.begin(), minima.end());
  h.minima_ = std::move(minima);
  h.shape_ = shape;
  return h;
}

Hamiltonian nonincreasing_part(Hamiltonian const& h) {
  if (h.minima().size() != 1 || !h.shape().quasiconvex) {
    throw HamiltonianError("flux limiter requires quasiconvex H with a single minimum (" +
                           h.describe() + " has " + std::to_string(h.minima().size()) +
                           " minima)");
  }
  double const p0 = h.minima().front();
  ShapeFlags const flags{true, h.shape().convex, false};
  return Hamiltonian::derived([h, p0](double p, double) { return h(std::min(p, p0), 0.0); },
                              "nonincreasing_part(" + h.describe() + ")", h, {p0}, flags);
}

Hamiltonian reflect(Hamiltonian const& h) {
  std::vector<double> minima;
  for (double m : h.minima()) {
    minima.push_back(-m);
  }
  return Hamiltonian::derived([h](double p, double x) { return h(-p, x); },
                              "reflect(" + h.describe() + ")", h, std::move(minima), h.shape());
}

// ---------------------------------------------------------------------------
// Flux limiter

FluxLimiter::FluxLimiter(double limiter_value, std::vector<Hamiltonian> envelopes)
    : limiter_value_(limiter_value), envelopes_(std::move(envelopes)) {
  if (!std::isfinite(limiter_value_)) {
    throw HamiltonianError("flux limiter value must be finite");
  }
  if (envelopes_.empty()) {
    throw HamiltonianError("flux limiter needs at least one edge");
  }
}

double FluxLimiter::operator()(std::span<double const> slopes) const {
  if (slopes.size() != envelopes_.size()) {
    throw HamiltonianError("flux limiter expects " + std::to_string(envelopes_.size()) +
                           " slopes, got " + std::to_string(slopes.size()));
  }
  double value = limiter_value_;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    value = std::max(value, envelopes_[i](slopes[i], 0.0));
  }
  return value;
}

FluxLimiter make_flux_limiter(std::span<Hamiltonian const> hamiltonians, double limiter_value) {
  std::vector<Hamiltonian> envelopes;
  envelopes.reserve(hamiltonians.size());
  for (auto const& h : hamiltonians) {
    envelopes.push_back(nonincreasing_part(h));
  }
  return FluxLimiter(limiter_value, std::move(envelopes));
}

// ---------------------------------------------------------------------------
// Envelopes and sampled bounds

SlopeEnvelope::SlopeEnvelope(Hamiltonian const& h, double x, double range)
    : fn_(std::make_shared<Hamiltonian::Fn const>([h](double p, double y) { return h(p, y); })),
      x_(x),
      range_(range) {
  auto const scan = scan_minima(*fn_, range_, ProbeDefaults::kMinimaResolution, x_);
  minimizers_ = scan.minima;
  for (double m : minimizers_) {
    values_.push_back((*fn_)(m, x_));
  }
}

double SlopeEnvelope::suffix_min(double p) const {
  double const right = std::max(p, range_);
  double m = std::min((*fn_)(p, x_), (*fn_)(right, x_));
  for (std::size_t k = 0; k < minimizers_.size(); ++k) {
    if (minimizers_[k] > p && minimizers_[k] < right) {
      m = std::min(m, values_[k]);
    }
  }
  return m;
}

double SlopeEnvelope::prefix_min(double p) const {
  double const left = std::min(p, -range_);
  double m = std::min((*fn_)(p, x_), (*fn_)(left, x_));
  for (std::size_t k = 0; k < minimizers_.size(); ++k) {
    if (minimizers_[k] < p && minimizers_[k] > left) {
      m = std::min(m, values_[k]);
    }
  }
  return m;
}

double slope_lipschitz(Hamiltonian const& h, double lo, double hi,
                       std::span<double const> x_samples, int samples) {
  double const dp = (hi - lo) / samples;
  double lip = 0.0;
  for (double x : x_samples) {
    double prev = h(lo, x);
    for (int k = 1; k <= samples; ++k) {
      double const cur = h(lo + k * dp, x);
      lip = std::max(lip, std::abs(cur - prev) / dp);
      prev = cur;
    }
  }
  return lip;
}

std::pair<double, double> sublevel_hull(Hamiltonian const& h, double level, double bound,
                                        std::span<double const> x_samples, int samples) {
  double const dp = 2.0 * bound / samples;
  double lo = kInf;
  double hi = -kInf;
  double best = kInf;
  double best_p = 0.0;
  for (int k = 0; k <= samples; ++k) {
    double const p = -bound + k * dp;
    double v = kInf;
    for (double x : x_samples) {
      v = std::min(v, h(p, x));
    }
    if (v <= level) {
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    if (v < best) {
      best = v;
      best_p = p;
    }
  }
  if (lo > hi) {
    return {best_p, best_p};
  }
  return {lo, hi};
}

double rightward_min_threshold(Hamiltonian const& h) {
  double const bound = h.coercivity_bound();
  SlopeEnvelope const env(h, 0.0, bound);
  auto passes = [&](double z) { return h(z, 0.0) <= env.suffix_min(z) + 1e-12; };

  constexpr int kGrid = 8192;
  double const dz = 2.0 * bound / kGrid;
  int k = kGrid;
  while (k >= 0 && passes(-bound + k * dz)) {
    --k;
  }
  if (k < 0) {
    return -bound;
  }
  double fail = -bound + k * dz;
  double pass = fail + dz;
  while (pass - fail > 1e-7) {
    double const mid = 0.5 * (pass + fail);
    if (passes(mid)) {
      pass = mid;
    } else {
      fail = mid;
    }
  }
  return pass;
}

// ---------------------------------------------------------------------------
// Two-dimensional Hamiltonians

Hamiltonian2D Hamiltonian2D::from_function(Fn fn, std::string description, double a1,
                                           double a2) {
  if (!(a1 > 0.0) || !(a2 > 0.0)) {
    throw HamiltonianError("arm lengths must be positive");
  }
  Hamiltonian2D h;
  h.fn_ = std::make_shared<Fn const>(std::move(fn));
  h.source_ = std::move(description);
  h.a1_ = a1;
  h.a2_ = a2;

  std::vector<std::pair<double, double>> xs;
  for (double t : linspace(0.0, 1.0, 5)) {
    xs.emplace_back(-t * a1, 0.0);
    xs.emplace_back(0.0, -t * a2);
  }
  double level = 0.0;
  for (auto [x1, x2] : xs) {
    double const v = (*h.fn_)(0.0, 0.0, x1, x2);
    if (!std::isfinite(v)) {
      throw HamiltonianError("Hamiltonian is not finite at p = 0");
    }
    level = std::max(level, std::abs(v));
  }
  h.level_ = level + 1.0;

  constexpr int kPerSide = 64;
  auto const& f = *h.fn_;
  auto margin = [&](double q) {
    double m = kInf;
    for (auto [x1, x2] : xs) {
      for (int k = 0; k <= kPerSide; ++k) {
        double const t = -q + 2.0 * q * k / kPerSide;
        m = std::min({m, f(q, t, x1, x2), f(-q, t, x1, x2), f(t, q, x1, x2), f(t, -q, x1, x2)});
      }
    }
    return m - h.level_;
  };
  h.bound_ = probe_bound(margin, ProbeDefaults::kHardCap, ProbeDefaults::kResolution);
  return h;
}

Hamiltonian2D Hamiltonian2D::with_arms(double a1, double a2) const {
  return from_function(*fn_, source_, a1, a2);
}

Hamiltonian2D parse_expression_2d(std::string_view src, double a1, double a2) {
  auto expr = std::make_shared<Expression const>(
      src, std::vector<std::string>{"p1", "p2", "x1", "x2"});
  return Hamiltonian2D::from_function(
      [expr](double p1, double p2, double x1, double x2) {
        std::array<double, 4> const v{p1, p2, x1, x2};
        return (*expr)(v);
      },
      std::string(src), a1, a2);
}

Hamiltonian reduce_2d(Hamiltonian2D const& h2, int axis, int resolution) {
  if (resolution < 16) {
    throw HamiltonianError("resolution too coarse (need at least 16 samples)");
  }
  if (axis != 1 && axis != 2) {
    throw HamiltonianError("axis must be 1 or 2");
  }
  double const bound = h2.coercivity_bound();
  auto fn = [h2, axis, resolution, bound](double p, double x) {
    auto eval = [&](double q) { return axis == 1 ? h2(p, q, x, 0.0) : h2(q, p, 0.0, x); };
    double const dq = 2.0 * bound / resolution;
    int best = 0;
    double best_v = kInf;
    for (int k = 0; k <= resolution; ++k) {
      double const v = eval(-bound + k * dq);
      if (v < best_v) {
        best_v = v;
        best = k;
      }
    }
    double const q = -bound + best * dq;
    double const lo = best == 0 ? q : q - dq;
    double const hi = best == resolution ? q : q + dq;
    if (hi > lo) {
      best_v = std::min(best_v, golden_section_min(eval, lo, hi, 1e-10).second);
    }
    return best_v;
  };
  auto const [a1, a2] = h2.arms();
  std::string const text =
      std::string(axis == 1 ? "min_p2 " : "min_p1 ") + "[" + h2.source() + "]";
  return Hamiltonian::from_function(fn, HamiltonianSource{"derived", {}, text},
                                    axis == 1 ? a1 : a2);
}

}  // namespace hjj
