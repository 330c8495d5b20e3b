#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lqb/dynamics.hpp"
#include "lqb/params.hpp"

namespace lqb {

enum class SweepParam { kNth, kOmegaOver2Pi, kDeltaOver2Pi, kEpsilon };
enum class Spacing { kLinear, kLog };

[[nodiscard]] std::string_view to_string(SweepParam param);
[[nodiscard]] std::string_view to_string(Spacing spacing);
/// Accepts n_th, omega_over_2pi, delta_over_2pi, epsilon.
[[nodiscard]] SweepParam parse_sweep_param(std::string_view name);

struct Axis {
  SweepParam param = SweepParam::kNth;
  double min = 0.0;
  double max = 1.0;
  int count = 2;
  Spacing spacing = Spacing::kLinear;

  void validate() const;
  /// Ascending grid; the end points are exact.
  [[nodiscard]] std::vector<double> values() const;
};

/// "name:min:max:count[:linear|log]".
[[nodiscard]] Axis parse_axis(std::string_view text);

enum class Metric {
  kDelta,
  kDeltaSlow,
  kDeltaL2,
  kEs,
  kTauS,
  kPs,
  kCl1,
  kSvon,
  kOvershoot,
  kLambdaSlowReal,
  kLambdaSlowImag,
};

[[nodiscard]] std::string_view to_string(Metric metric);
[[nodiscard]] Metric parse_metric(std::string_view name);
[[nodiscard]] std::vector<Metric> all_metrics();
/// Comma-separated list, or "all".
[[nodiscard]] std::vector<Metric> parse_metric_list(std::string_view text);

/// One grid point. Unrequested or failed metrics stay empty.
struct SweepRow {
  double n_th = 0.0;
  double omega_over_2pi_mhz = 0.0;
  double delta_over_2pi_mhz = 0.0;
  double epsilon = 0.0;
  std::optional<double> delta;
  std::optional<double> delta_slow;
  std::optional<double> delta_l2;
  std::optional<double> e_s;
  std::optional<double> tau_s;
  std::optional<double> p_s;
  std::optional<double> c_l1;
  std::optional<double> s_von;
  std::optional<bool> overshoot;
  std::optional<double> lambda_slow_real;
  std::optional<double> lambda_slow_imag;
  std::string status = "ok";
};

inline constexpr std::string_view kStatusOk = "ok";
inline constexpr std::string_view kStatusNotConverged = "not_converged";
inline constexpr std::string_view kStatusDegenerate = "degenerate_steady_state";
inline constexpr std::string_view kStatusNumerical = "numerical_error";
inline constexpr std::string_view kStatusInvalid = "invalid_params";

/// Computes the requested metrics at one point; failures land in `status`.
[[nodiscard]] SweepRow evaluate_point(const SystemParams& p, double epsilon,
                                      const std::vector<Metric>& metrics,
                                      const DynamicsOptions& opts = {});

struct SweepSpec {
  Axis axis1;
  Axis axis2{SweepParam::kOmegaOver2Pi, 1.0, 40.0, 2, Spacing::kLinear};
  SystemParams fixed = reference_defaults();
  double epsilon = 1e-8;  ///< used unless an axis sweeps epsilon
  std::vector<Metric> metrics = all_metrics();
  DynamicsOptions dynamics;
  /// Locate the EP along n_th for each omega value (needs an n_th x omega grid).
  bool ep_curve = false;

  void validate() const;
};

struct EpPoint {
  double n_th = 0.0;
  double omega_over_2pi_mhz = 0.0;
};

struct SweepMetadata {
  std::string tool_version;
  SweepSpec spec;
  int threads = 1;
  double wall_time_s = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< axis1 outer, axis2 inner, both ascending
  std::vector<EpPoint> ep_curve;
  SweepMetadata metadata;

  [[nodiscard]] bool all_ok() const;
};

[[nodiscard]] std::string tool_version();

/// Worker count from LIOUVILLE_THREADS, else 1.
[[nodiscard]] int default_threads();

/// Output does not depend on `threads`.
[[nodiscard]] SweepResult run_sweep(const SweepSpec& spec, int threads = 1);

/// EP along n_th in [n_lo, n_hi] for each omega (MHz); omegas without a
/// discriminant sign change are skipped. Requires zero detuning.
[[nodiscard]] std::vector<EpPoint> ep_trajectory(const SystemParams& fixed,
                                                 const std::vector<double>& omegas_mhz,
                                                 double n_lo, double n_hi);

}  // namespace lqb
