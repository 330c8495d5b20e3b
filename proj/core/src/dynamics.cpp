#include "lqb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "lqb/errors.hpp"
#include "lqb/expm.hpp"
#include "lqb/spectrum.hpp"

namespace lqb {

namespace {

constexpr StateTolerance kPropagationTolerance{1e-12, 1e-10, 1e-10};
constexpr double kDistanceFloor = 1e-14;

void require_increasing(std::span<const double> t) {
  if (t.empty()) throw InvalidArgument("time grid is empty");
  if (!(t.front() >= 0.0)) throw InvalidArgument("time grid must start at t >= 0");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw InvalidArgument("time grid must be strictly increasing");
  }
}

}  // namespace

Propagator::Propagator(SuperOp sop) : sop_(std::move(sop)) {}

namespace {

// exp(L t) with the rounding drift of the trace row removed: the exact map
// satisfies tau^T U = tau^T, and long stiff windows otherwise accumulate it.
Mat9 step_matrix(const Mat9& l, double t) {
  Mat9 u = expm(l * t);
  const Eigen::Matrix<cplx, 1, 9> tau = trace_functional().transpose();
  const Eigen::Matrix<cplx, 1, 9> drift = tau - tau * u;
  u += (tau.transpose() / 3.0) * drift;
  return u;
}

}  // namespace

Mat3 Propagator::evolve(const Mat3& rho, double t) const {
  if (t == 0.0) return rho;
  return devectorize(Vec9(step_matrix(sop_.matrix, t) * vectorize(rho)));
}

std::vector<Mat3> Propagator::evolve_grid(const Mat3& rho0, std::span<const double> times) const {
  std::vector<Mat3> out;
  out.reserve(times.size());
  Vec9 v = vectorize(rho0);
  double t_prev = 0.0;
  double cached_dt = -1.0;
  Mat9 step;
  for (double t : times) {
    const double dt = t - t_prev;
    if (dt > 0.0) {
      // Uniform grids differ in dt only by rounding of t_i.
      if (std::abs(dt - cached_dt) > 1e-10 * dt) {
        step = step_matrix(sop_.matrix, dt);
        cached_dt = dt;
      }
      v = step * v;
    }
    out.push_back(devectorize(v));
    t_prev = t;
  }
  return out;
}

std::vector<double> uniform_grid(double t_max, int points) {
  if (!(t_max > 0.0) || points < 2) throw InvalidArgument("uniform grid needs t_max > 0 and >= 2 points");
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) t[static_cast<std::size_t>(i)] = t_max * i / (points - 1);
  return t;
}

std::vector<double> default_time_grid(double t_max, int points) {
  if (!(t_max > 0.0) || points < 8) throw InvalidArgument("time grid needs t_max > 0 and >= 8 points");
  const int n_lin = points / 4;
  const int n_log = points - n_lin;
  const double t_knee = t_max / 100.0;
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < n_lin; ++i) t.push_back(t_knee * i / n_lin);
  const double l0 = std::log(t_knee);
  const double l1 = std::log(t_max);
  for (int i = 0; i < n_log; ++i) t.push_back(std::exp(l0 + (l1 - l0) * i / (n_log - 1)));
  t.back() = t_max;
  return t;
}

double default_t_max(const SystemParams& p, double gap_multiples) {
  return gap_multiples / gaps(build_liouvillian(p)).delta;
}

Trajectory propagate(const DensityMatrix& rho0, const SystemParams& p,
                     std::span<const double> t_grid) {
  require_increasing(t_grid);
  SuperOp sop = build_liouvillian(p);
  const Mat3 steady = steady_state(sop).matrix();
  const Propagator prop(std::move(sop));

  Trajectory traj;
  traj.steady = steady;
  traj.times.assign(t_grid.begin(), t_grid.end());
  traj.states = prop.evolve_grid(rho0.matrix(), t_grid);
  traj.energies.reserve(traj.size());
  traj.hs_distances.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    Mat3& rho = traj.states[i];
    rho = hermitize(rho);
    try {
      check_density_matrix(rho, kPropagationTolerance);
    } catch (const InvalidArgument& e) {
      throw NumericalError(fmt::format("propagated state at t = {:.6g} us is unphysical: {}",
                                       traj.times[i], e.what()));
    }
    traj.energies.push_back(energy(rho, p));
    traj.hs_distances.push_back(hs_norm(rho - steady));
  }
  return traj;
}

double relaxation_time(const Trajectory& traj, const SystemParams& p, double epsilon,
                       double bisection_rel) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (traj.size() == 0) throw InvalidArgument("empty trajectory");
  const auto hit = std::find_if(traj.hs_distances.begin(), traj.hs_distances.end(),
                                [epsilon](double d) { return d < epsilon; });
  if (hit == traj.hs_distances.end()) {
    throw NotConverged(fmt::format("not converged by t_max = {:.6g} us (epsilon = {:.3g}, final distance {:.3g})",
                                   traj.times.back(), epsilon, traj.hs_distances.back()));
  }
  const auto i = static_cast<std::size_t>(hit - traj.hs_distances.begin());
  if (i == 0) return traj.times.front();

  const Propagator prop(build_liouvillian(p));
  const Mat3& rho_start = traj.states.front();
  const double t0 = traj.times.front();
  double lo = traj.times[i - 1];
  double hi = traj.times[i];
  while (hi - lo > bisection_rel * hi) {
    const double mid = 0.5 * (lo + hi);
    const double d = hs_norm(prop.evolve(rho_start, mid - t0) - traj.steady);
    (d < epsilon ? hi : lo) = mid;
  }
  return hi;
}

double relaxation_time(const DensityMatrix& rho0, const SystemParams& p, double epsilon,
                       const DynamicsOptions& opts) {
  const double t_max = opts.t_max > 0.0 ? opts.t_max : default_t_max(p, opts.gap_multiples);
  const auto grid = uniform_grid(t_max, opts.points);
  return relaxation_time(propagate(rho0, p, grid), p, epsilon, opts.bisection_rel);
}

ChargingMetrics charging_metrics(const DensityMatrix& rho0, const SystemParams& p, double epsilon,
                                 const DynamicsOptions& opts) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  const SuperOp sop = build_liouvillian(p);
  const GapReport g = gaps(sop);

  const double t_max = opts.t_max > 0.0 ? opts.t_max : opts.gap_multiples / g.delta;
  const auto grid = uniform_grid(t_max, opts.points);
  const Trajectory traj = propagate(rho0, p, grid);

  ChargingMetrics m;
  m.epsilon = epsilon;
  m.delta = g.delta;
  m.e_s = energy(traj.steady, p);
  m.tau_s = relaxation_time(traj, p, epsilon, opts.bisection_rel);
  if (m.tau_s > 0.0) {
    m.p_s = m.e_s / m.tau_s;
  } else {
    m.p_s = m.e_s == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  const double log_inv = std::log(1.0 / epsilon);
  m.tau_gap_ref = log_inv / g.delta;
  m.p_gap_ref = m.e_s * g.delta / log_inv;
  const double e_max = *std::max_element(traj.energies.begin(), traj.energies.end());
  // Absolute floor on the e1 scale keeps roundoff from flagging an empty battery.
  m.overshoot = e_max > m.e_s + opts.overshoot_rel * std::max(m.e_s, p.e1);
  return m;
}

ChargingMetrics charging_metrics(const SystemParams& p, double epsilon, const DynamicsOptions& opts) {
  return charging_metrics(DensityMatrix::basis(kGround), p, epsilon, opts);
}

double fit_decay_rate(std::span<const double> t, std::span<const double> d, EnvelopeMode mode) {
  if (t.size() != d.size() || t.size() < 3) throw InvalidArgument("decay fit needs >= 3 matching samples");
  for (double x : d) {
    if (!(x > kDistanceFloor)) {
      throw NumericalError(fmt::format("distance {:.3g} below the numerical floor {:g} in the fit window",
                                       x, kDistanceFloor));
    }
  }

  std::vector<double> xs;
  std::vector<double> ys;
  if (mode == EnvelopeMode::kPeaks) {
    // Peaks of log d after removing its straight-line trend, so that weakly
    // modulated (monotone) oscillations still yield one point per period.
    const double k = fit_decay_rate(t, d, EnvelopeMode::kDirect);
    std::vector<double> r(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) r[i] = std::log(d[i]) + k * t[i];
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
      if (!(r[i] > r[i - 1] && r[i] >= r[i + 1])) continue;
      // Vertex of the parabola through the three detrended samples around the peak.
      const double x0 = t[i - 1], x1 = t[i], x2 = t[i + 1];
      const double y0 = r[i - 1], y1 = r[i], y2 = r[i + 1];
      const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
      const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
      const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
      const double c = y1 - a * x1 * x1 - b * x1;
      if (a < 0.0) {
        const double xv = -b / (2.0 * a);
        xs.push_back(xv);
        ys.push_back(c - b * b / (4.0 * a) - k * xv);
      } else {
        xs.push_back(x1);
        ys.push_back(y1 - k * x1);
      }
    }
    if (xs.size() < 2) throw NumericalError("peak-envelope fit found fewer than two local maxima");
  } else {
    xs.assign(t.begin(), t.end());
    for (double x : d) ys.push_back(std::log(x));
  }

  const auto n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  return -sxy / sxx;
}

double decay_envelope_fit(const Trajectory& traj, const SystemParams& p, EnvelopeMode mode) {
  if (traj.size() < 3) throw InvalidArgument("trajectory too short for an envelope fit");
  const SuperOp sop = build_liouvillian(p);
  const auto slow = eigenvalues(extract_blocks(sop).l5);
  const double delta_slow = gap_of(slow, true);

  const double t_end = traj.times.back();
  const double t_start = 0.5 * t_end;
  if (t_end - t_start < 3.0 / delta_slow) {
    throw InvalidArgument(fmt::format(
        "late window [{:.4g}, {:.4g}] us spans less than 3 / Delta_slow = {:.4g} us", t_start, t_end,
        3.0 / delta_slow));
  }

  if (mode == EnvelopeMode::kAuto) {
    const cplx dom = dominant_nonzero(slow);
    mode = std::abs(dom.imag()) > 1e-6 * std::abs(dom) ? EnvelopeMode::kPeaks : EnvelopeMode::kDirect;
  }

  const auto first = static_cast<std::size_t>(
      std::lower_bound(traj.times.begin(), traj.times.end(), t_start) - traj.times.begin());
  const std::span<const double> t(traj.times.data() + first, traj.size() - first);
  const std::span<const double> d(traj.hs_distances.data() + first, traj.size() - first);
  return fit_decay_rate(t, d, mode);
}

}  // namespace lqb
