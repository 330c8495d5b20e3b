#pragma once

#include <span>
#include <vector>

#include "lqb/liouvillian.hpp"
#include "lqb/params.hpp"
#include "lqb/state.hpp"

namespace lqb {

/// Sampled evolution rho(t) together with E(t) and ||rho(t) - rho_ss||.
struct Trajectory {
  std::vector<double> times;  ///< us, strictly increasing
  std::vector<Mat3> states;
  std::vector<double> energies;      ///< eV
  std::vector<double> hs_distances;  ///< to `steady`
  Mat3 steady = Mat3::Zero();

  [[nodiscard]] std::size_t size() const { return times.size(); }
};

/// Steady-state charging figures of merit for one parameter point.
struct ChargingMetrics {
  double e_s = 0.0;          ///< eV
  double tau_s = 0.0;        ///< us
  double p_s = 0.0;          ///< eV/us
  double tau_gap_ref = 0.0;  ///< ln(1/eps) / Delta
  double p_gap_ref = 0.0;    ///< e_s Delta / ln(1/eps)
  double epsilon = 0.0;
  double delta = 0.0;        ///< full gap used for the references and window
  bool overshoot = false;
};

struct DynamicsOptions {
  double t_max = 0.0;          ///< 0 selects gap_multiples / Delta
  double gap_multiples = 100.0;
  int points = 4000;           ///< uniform samples used to bracket tau_s
  double bisection_rel = 1e-6;
  double overshoot_rel = 1e-6;  ///< relative to max(e_s, e1)
};

/// Applies exp(L t) with Pade scaling and squaring.
class Propagator {
 public:
  explicit Propagator(SuperOp sop);

  [[nodiscard]] const SuperOp& generator() const { return sop_; }
  /// exp(L t) applied to rho (no validation).
  [[nodiscard]] Mat3 evolve(const Mat3& rho, double t) const;
  /// Step-wise evolution over a strictly increasing grid starting at t = 0.
  [[nodiscard]] std::vector<Mat3> evolve_grid(const Mat3& rho0, std::span<const double> times) const;

 private:
  SuperOp sop_;
};

[[nodiscard]] std::vector<double> uniform_grid(double t_max, int points);

/// A quarter of the points linear on [0, t_max/100], the rest log-spaced up to t_max.
[[nodiscard]] std::vector<double> default_time_grid(double t_max, int points = 2000);

/// gap_multiples / Delta for the full Liouvillian at `p`.
[[nodiscard]] double default_t_max(const SystemParams& p, double gap_multiples = 100.0);

/// rho(t_i) = exp(L t_i) rho0 on a strictly increasing, non-negative grid.
/// Each state is re-Hermitized and checked (trace 1e-10, positivity -1e-10);
/// a violation raises NumericalError.
[[nodiscard]] Trajectory propagate(const DensityMatrix& rho0, const SystemParams& p,
                                   std::span<const double> t_grid);

/// Earliest time with ||rho(t) - rho_ss|| < epsilon: first sampled crossing,
/// refined by bisection on the bracketing interval. Returns 0 if the first
/// sample is already inside. Throws NotConverged when no sample crosses.
[[nodiscard]] double relaxation_time(const Trajectory& trajectory, const SystemParams& p,
                                     double epsilon, double bisection_rel = 1e-6);
[[nodiscard]] double relaxation_time(const DensityMatrix& rho0, const SystemParams& p,
                                     double epsilon, const DynamicsOptions& opts = {});

[[nodiscard]] ChargingMetrics charging_metrics(const DensityMatrix& rho0, const SystemParams& p,
                                               double epsilon, const DynamicsOptions& opts = {});
/// Starts from the discharged battery |0><0|.
[[nodiscard]] ChargingMetrics charging_metrics(const SystemParams& p, double epsilon,
                                               const DynamicsOptions& opts = {});

enum class EnvelopeMode { kAuto, kDirect, kPeaks };

/// Least-squares decay rate -d ln(d)/dt. kPeaks fits only the local maxima of
/// the linearly detrended ln(d) (vertex-refined), for oscillating distances.
/// kAuto behaves as kDirect.
[[nodiscard]] double fit_decay_rate(std::span<const double> times, std::span<const double> distances,
                                    EnvelopeMode mode);

/// Late-window [t_end/2, t_end] decay rate of ||rho(t) - rho_ss||. kAuto picks
/// peak fitting when the dominant slow eigenvalue is complex.
[[nodiscard]] double decay_envelope_fit(const Trajectory& trajectory, const SystemParams& p,
                                        EnvelopeMode mode = EnvelopeMode::kAuto);

}  // namespace lqb
