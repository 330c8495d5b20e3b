#include "lqb/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include <fmt/format.h>

#include "lqb/errors.hpp"
#include "lqb/liouvillian.hpp"
#include "lqb/slow_sector.hpp"
#include "lqb/spectrum.hpp"
#include "lqb/state.hpp"

namespace lqb {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s, std::string_view what) {
  const std::string buf(trim(s));
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(v)) {
    throw InvalidArgument(fmt::format("{}: '{}' is not a finite number", what, buf));
  }
  return v;
}

bool contains(const std::vector<Metric>& metrics, Metric m) {
  return std::find(metrics.begin(), metrics.end(), m) != metrics.end();
}

SystemParams apply(SystemParams p, SweepParam param, double value, double& epsilon) {
  switch (param) {
    case SweepParam::kNth: p.n_th = value; break;
    case SweepParam::kOmegaOver2Pi: p.omega_rabi = mhz_to_angular(value); break;
    case SweepParam::kDeltaOver2Pi: p.delta = mhz_to_angular(value); break;
    case SweepParam::kEpsilon: epsilon = value; break;
  }
  return p;
}

}  // namespace

std::string_view to_string(SweepParam param) {
  switch (param) {
    case SweepParam::kNth: return "n_th";
    case SweepParam::kOmegaOver2Pi: return "omega_over_2pi";
    case SweepParam::kDeltaOver2Pi: return "delta_over_2pi";
    case SweepParam::kEpsilon: return "epsilon";
  }
  return "?";
}

std::string_view to_string(Spacing spacing) {
  return spacing == Spacing::kLog ? "log" : "linear";
}

SweepParam parse_sweep_param(std::string_view name) {
  for (SweepParam p : {SweepParam::kNth, SweepParam::kOmegaOver2Pi, SweepParam::kDeltaOver2Pi,
                       SweepParam::kEpsilon}) {
    if (to_string(p) == name) return p;
  }
  throw InvalidArgument(fmt::format(
      "unknown sweep parameter '{}' (expected n_th, omega_over_2pi, delta_over_2pi or epsilon)", name));
}

void Axis::validate() const {
  if (count < 2) throw InvalidArgument(fmt::format("axis {}: count must be >= 2", to_string(param)));
  if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
    throw InvalidArgument(fmt::format("axis {}: min must be < max", to_string(param)));
  }
  if (spacing == Spacing::kLog && !(min > 0.0)) {
    throw InvalidArgument(fmt::format("axis {}: log spacing requires min > 0", to_string(param)));
  }
  if (param == SweepParam::kEpsilon && !(min > 0.0 && max < 1.0)) {
    throw InvalidArgument("axis epsilon: values must lie in (0, 1)");
  }
}

std::vector<double> Axis::values() const {
  validate();
  std::vector<double> v(static_cast<std::size_t>(count));
  const double n = count - 1;
  for (int i = 0; i < count; ++i) {
    const double f = i / n;
    if (spacing == Spacing::kLog) {
      v[i] = std::exp(std::log(min) + f * (std::log(max) - std::log(min)));
    } else {
      v[i] = min + f * (max - min);
    }
  }
  v.front() = min;
  v.back() = max;
  return v;
}

Axis parse_axis(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 4 && parts.size() != 5) {
    throw InvalidArgument(fmt::format("axis '{}': expected name:min:max:count[:linear|log]", text));
  }
  Axis a;
  a.param = parse_sweep_param(trim(parts[0]));
  a.min = parse_double(parts[1], "axis min");
  a.max = parse_double(parts[2], "axis max");
  const double count = parse_double(parts[3], "axis count");
  if (count != std::floor(count) || count > 1e6) throw InvalidArgument("axis count must be an integer");
  a.count = static_cast<int>(count);
  if (parts.size() == 5) {
    const auto s = trim(parts[4]);
    if (s == "log") {
      a.spacing = Spacing::kLog;
    } else if (s == "linear") {
      a.spacing = Spacing::kLinear;
    } else {
      throw InvalidArgument(fmt::format("axis spacing '{}' must be linear or log", s));
    }
  }
  a.validate();
  return a;
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kDelta: return "delta";
    case Metric::kDeltaSlow: return "delta_slow";
    case Metric::kDeltaL2: return "delta_l2";
    case Metric::kEs: return "e_s";
    case Metric::kTauS: return "tau_s";
    case Metric::kPs: return "p_s";
    case Metric::kCl1: return "c_l1";
    case Metric::kSvon: return "s_von";
    case Metric::kOvershoot: return "overshoot";
    case Metric::kLambdaSlowReal: return "lambda_slow_real";
    case Metric::kLambdaSlowImag: return "lambda_slow_imag";
  }
  return "?";
}

std::vector<Metric> all_metrics() {
  return {Metric::kDelta, Metric::kDeltaSlow, Metric::kDeltaL2, Metric::kEs,
          Metric::kTauS,  Metric::kPs,        Metric::kCl1,     Metric::kSvon,
          Metric::kOvershoot, Metric::kLambdaSlowReal, Metric::kLambdaSlowImag};
}

Metric parse_metric(std::string_view name) {
  for (Metric m : all_metrics()) {
    if (to_string(m) == name) return m;
  }
  throw InvalidArgument(fmt::format("unknown metric '{}'", name));
}

std::vector<Metric> parse_metric_list(std::string_view text) {
  if (trim(text) == "all") return all_metrics();
  std::vector<Metric> out;
  for (auto part : split(text, ',')) {
    const Metric m = parse_metric(trim(part));
    if (!contains(out, m)) out.push_back(m);
  }
  if (out.empty()) throw InvalidArgument("metric list is empty");
  return out;
}

namespace {

void set_coordinate(SweepRow& row, SweepParam param, double value) {
  switch (param) {
    case SweepParam::kNth: row.n_th = value; break;
    case SweepParam::kOmegaOver2Pi: row.omega_over_2pi_mhz = value; break;
    case SweepParam::kDeltaOver2Pi: row.delta_over_2pi_mhz = value; break;
    case SweepParam::kEpsilon: row.epsilon = value; break;
  }
}

}  // namespace

SweepRow evaluate_point(const SystemParams& p, double epsilon, const std::vector<Metric>& metrics,
                        const DynamicsOptions& opts) {
  SweepRow row;
  row.n_th = p.n_th;
  row.omega_over_2pi_mhz = angular_to_mhz(p.omega_rabi);
  row.delta_over_2pi_mhz = angular_to_mhz(p.delta);
  row.epsilon = epsilon;

  auto wants = [&](std::initializer_list<Metric> ms) {
    return std::any_of(ms.begin(), ms.end(), [&](Metric m) { return contains(metrics, m); });
  };

  try {
    validate_params(p);
    const SuperOp sop = build_liouvillian(p);
    if (wants({Metric::kDelta, Metric::kDeltaSlow, Metric::kDeltaL2})) {
      const GapReport g = gaps(sop);
      if (contains(metrics, Metric::kDelta)) row.delta = g.delta;
      if (contains(metrics, Metric::kDeltaSlow)) row.delta_slow = g.delta_slow;
      if (contains(metrics, Metric::kDeltaL2)) row.delta_l2 = g.delta_l2;
    }
    if (wants({Metric::kLambdaSlowReal, Metric::kLambdaSlowImag})) {
      const cplx dom = dominant_nonzero(eigenvalues(extract_blocks(sop).l5));
      if (contains(metrics, Metric::kLambdaSlowReal)) row.lambda_slow_real = dom.real();
      if (contains(metrics, Metric::kLambdaSlowImag)) row.lambda_slow_imag = dom.imag();
    }
    if (wants({Metric::kEs, Metric::kCl1, Metric::kSvon})) {
      const DensityMatrix rho = steady_state(sop);
      if (contains(metrics, Metric::kEs)) row.e_s = energy(rho, p);
      if (contains(metrics, Metric::kCl1)) row.c_l1 = l1_coherence(rho.matrix());
      if (contains(metrics, Metric::kSvon)) row.s_von = von_neumann_entropy(rho.matrix());
    }
    if (wants({Metric::kTauS, Metric::kPs, Metric::kOvershoot})) {
      const ChargingMetrics m = charging_metrics(p, epsilon, opts);
      if (contains(metrics, Metric::kTauS)) row.tau_s = m.tau_s;
      if (contains(metrics, Metric::kPs)) row.p_s = m.p_s;
      if (contains(metrics, Metric::kOvershoot)) row.overshoot = m.overshoot;
    }
  } catch (const NotConverged&) {
    row.status = kStatusNotConverged;
  } catch (const DegenerateSteadyState&) {
    row.status = kStatusDegenerate;
  } catch (const NumericalError&) {
    row.status = kStatusNumerical;
  } catch (const InvalidArgument&) {
    row.status = kStatusInvalid;
  }
  return row;
}

void SweepSpec::validate() const {
  axis1.validate();
  axis2.validate();
  if (axis1.param == axis2.param) throw InvalidArgument("axis1 and axis2 must sweep different parameters");
  if (metrics.empty()) throw InvalidArgument("no metrics requested");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  if (ep_curve) {
    const bool nth_omega = (axis1.param == SweepParam::kNth && axis2.param == SweepParam::kOmegaOver2Pi) ||
                           (axis1.param == SweepParam::kOmegaOver2Pi && axis2.param == SweepParam::kNth);
    if (!nth_omega) throw InvalidArgument("ep curve needs an n_th x omega_over_2pi grid");
    if (fixed.delta != 0.0) throw InvalidArgument("ep curve requires zero detuning");
  }
}

bool SweepResult::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.status == kStatusOk; });
}

std::string tool_version() { return LQB_VERSION; }

int default_threads() {
  if (const char* env = std::getenv("LIOUVILLE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
  }
  return 1;
}

std::vector<EpPoint> ep_trajectory(const SystemParams& fixed, const std::vector<double>& omegas_mhz,
                                   double n_lo, double n_hi) {
  std::vector<EpPoint> out;
  for (double w : omegas_mhz) {
    SystemParams p = fixed;
    p.omega_rabi = mhz_to_angular(w);
    try {
      const EPResult ep = locate_ep(p, n_lo, n_hi);
      out.push_back({ep.n_th_ep, w});
    } catch (const NumericalError&) {
    }
  }
  return out;
}

SweepResult run_sweep(const SweepSpec& spec, int threads) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> v1 = spec.axis1.values();
  const std::vector<double> v2 = spec.axis2.values();
  const std::size_t total = v1.size() * v2.size();

  SweepResult result;
  result.rows.resize(total);
  threads = std::clamp(threads, 1, 1024);
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), total);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      double eps = spec.epsilon;
      SystemParams p = apply(spec.fixed, spec.axis1.param, v1[k / v2.size()], eps);
      p = apply(p, spec.axis2.param, v2[k % v2.size()], eps);
      SweepRow row = evaluate_point(p, eps, spec.metrics, spec.dynamics);
      // Report the grid values themselves, not their round trip through angular units.
      set_coordinate(row, spec.axis1.param, v1[k / v2.size()]);
      set_coordinate(row, spec.axis2.param, v2[k % v2.size()]);
      result.rows[k] = std::move(row);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
  }

  if (spec.ep_curve) {
    const bool nth_first = spec.axis1.param == SweepParam::kNth;
    const Axis& n_axis = nth_first ? spec.axis1 : spec.axis2;
    result.ep_curve = ep_trajectory(spec.fixed, nth_first ? v2 : v1, n_axis.min, n_axis.max);
  }

  result.metadata.tool_version = tool_version();
  result.metadata.spec = spec;
  result.metadata.threads = threads;
  result.metadata.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace lqb
