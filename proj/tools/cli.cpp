#include "cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "lqb/dynamics.hpp"
#include "lqb/emit.hpp"
#include "lqb/errors.hpp"
#include "lqb/liouvillian.hpp"
#include "lqb/params.hpp"
#include "lqb/presets.hpp"
#include "lqb/slow_sector.hpp"
#include "lqb/spectrum.hpp"
#include "lqb/state.hpp"
#include "lqb/sweep.hpp"

namespace lqb::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

/// Bad command-line input; the message starts with the offending flag.
class UsageError : public std::runtime_error {
 public:
  UsageError(std::string_view flag, std::string_view what)
      : std::runtime_error(fmt::format("{}: {}", flag, what)) {}
};

struct Globals {
  SystemParams defaults = reference_defaults();
  double gamma20 = defaults.gamma20;
  double gamma21 = defaults.gamma21;
  double gamma10 = defaults.gamma10;
  double nth = defaults.n_th;
  double omega_mhz = angular_to_mhz(defaults.omega_rabi);
  double delta_mhz = angular_to_mhz(defaults.delta);
  double e1 = defaults.e1;
  double e2 = defaults.e2;
  double epsilon = 1e-8;
  double tmax = 0.0;
  int points = 0;
  std::string out;
  std::string format = "csv";
  int threads = 1;
  bool record_timing = false;
  std::string initial = "ground";
};

struct Context {
  Globals g;
  std::ostream& out;
  std::ostream& err;
};

std::string flag_for_field(std::string_view message) {
  static const std::vector<std::pair<std::string_view, std::string_view>> fields{
      {"gamma20", "--gamma20"}, {"gamma21", "--gamma21"}, {"gamma10", "--gamma10"},
      {"n_th", "--nth"},        {"omega_rabi", "--omega"}, {"delta", "--delta"},
      {"e1", "--e1"},           {"e2", "--e2"}};
  for (const auto& [field, flag] : fields) {
    if (message.substr(0, field.size()) == field) return std::string(flag);
  }
  return "parameters";
}

SystemParams params_of(const Globals& g) {
  SystemParams p;
  p.gamma20 = g.gamma20;
  p.gamma21 = g.gamma21;
  p.gamma10 = g.gamma10;
  p.n_th = g.nth;
  p.omega_rabi = mhz_to_angular(g.omega_mhz);
  p.delta = mhz_to_angular(g.delta_mhz);
  p.e1 = g.e1;
  p.e2 = g.e2;
  try {
    return validate_params(p);
  } catch (const InvalidArgument& e) {
    throw UsageError(flag_for_field(e.what()), e.what());
  }
}

DensityMatrix initial_state(const std::string& name) {
  if (name == "ground") return DensityMatrix::basis(kGround);
  if (name == "storage") return DensityMatrix::basis(kStorage);
  if (name == "excited") return DensityMatrix::basis(kExcited);
  return DensityMatrix::maximally_mixed();
}

Metadata params_meta(const SystemParams& p) {
  return {{"tool_version", tool_version()},
          {"params.gamma20_per_us", p.gamma20},
          {"params.gamma21_per_us", p.gamma21},
          {"params.gamma10_per_us", p.gamma10},
          {"params.nth", p.n_th},
          {"params.omega_over_2pi_mhz", angular_to_mhz(p.omega_rabi)},
          {"params.delta_over_2pi_mhz", angular_to_mhz(p.delta)},
          {"params.e1_ev", p.e1},
          {"params.e2_ev", p.e2}};
}

Format format_of(const Globals& g) { return parse_format(g.format); }

void write(const Context& c, const Table& t) {
  if (c.g.out.empty()) {
    write_table(c.out, t, format_of(c.g));
  } else {
    write_table(std::filesystem::path(c.g.out), t, format_of(c.g));
  }
}

/// Two-column quantity/value table.
struct KeyValue {
  Table table;
  KeyValue() { table.columns = {"quantity", "value"}; }
  void add(std::string key, Cell value) { table.add_row({std::move(key), std::move(value)}); }
  void add_complex(const std::string& key, cplx z) {
    add(key + "_re", z.real());
    add(key + "_im", z.imag());
  }
};

std::pair<double, double> parse_range(const std::string& text, std::string_view flag) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError(flag, "expected lo:hi");
  try {
    std::size_t used_lo = 0;
    std::size_t used_hi = 0;
    const std::string lo_s = text.substr(0, colon);
    const std::string hi_s = text.substr(colon + 1);
    const double lo = std::stod(lo_s, &used_lo);
    const double hi = std::stod(hi_s, &used_hi);
    if (used_lo != lo_s.size() || used_hi != hi_s.size()) throw std::invalid_argument("trailing text");
    if (!(lo < hi)) throw UsageError(flag, "lo must be < hi");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw UsageError(flag, fmt::format("'{}' is not a numeric lo:hi range", text));
  }
}

int run_spectrum(const Context& c, const std::string& block) {
  const SystemParams p = params_of(c.g);
  const SuperOp sop = build_liouvillian(p);
  Table t;
  t.columns = {"block", "index", "re", "im"};
  t.metadata = params_meta(p);
  auto add = [&](const std::string& name, const std::vector<cplx>& ev) {
    for (std::size_t a = 0; a < ev.size(); ++a) {
      t.add_row({name, static_cast<double>(a), ev[a].real(), ev[a].imag()});
    }
  };

  int code = kExitOk;
  if (block == "full" || block == "all") {
    const Spectrum s = eigendecompose(sop.matrix);
    add("full", s.eigenvalues);
    t.metadata.emplace_back("spectrum.condition_number", s.condition_number);
    t.metadata.emplace_back("spectrum.defective", s.defective);
    t.metadata.emplace_back("spectrum.near_zero_modes", static_cast<double>(s.count_near_zero()));
  }
  if (block != "full") {
    const LiouvillianBlocks b = extract_blocks(sop);
    if (block == "l5" || block == "all") add("l5", eigenvalues(b.l5));
    if (block == "l2l" || block == "all") add("l2l", eigenvalues(b.l2_left));
    if (block == "l2r" || block == "all") add("l2r", eigenvalues(b.l2_right));
  }
  try {
    const GapReport g = gaps(sop);
    t.metadata.emplace_back("gaps.delta", g.delta);
    t.metadata.emplace_back("gaps.delta_slow", g.delta_slow);
    t.metadata.emplace_back("gaps.delta_l2", g.delta_l2);
    t.metadata.emplace_back("status", std::string(kStatusOk));
  } catch (const DegenerateSteadyState& e) {
    c.err << "error: " << e.what() << '\n';
    t.metadata.emplace_back("status", std::string(kStatusDegenerate));
    code = kExitNumerical;
  }
  write(c, t);
  return code;
}

int run_steady(const Context& c) {
  const SystemParams p = params_of(c.g);
  KeyValue kv;
  kv.table.metadata = params_meta(p);
  int code = kExitOk;
  try {
    const DensityMatrix rho = steady_state(build_liouvillian(p));
    const Mat3& m = rho.matrix();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) kv.add_complex(fmt::format("rho{}{}", i, j), m(i, j));
    }
    kv.add("e_s_ev", energy(rho, p));
    kv.add("c_l1", l1_coherence(m));
    kv.add("s_von", von_neumann_entropy(m));
    kv.add("status", std::string(kStatusOk));
  } catch (const NumericalError& e) {
    c.err << "error: " << e.what() << '\n';
    kv.add("status", std::string(dynamic_cast<const DegenerateSteadyState*>(&e) ? kStatusDegenerate
                                                                               : kStatusNumerical));
    code = kExitNumerical;
  }
  write(c, kv.table);
  return code;
}

int run_propagate(const Context& c, const std::string& grid_kind) {
  const SystemParams p = params_of(c.g);
  if (c.g.tmax < 0.0) throw UsageError("--tmax", "must be >= 0");
  const int points = c.g.points > 0 ? c.g.points : 2000;
  if (points < 2) throw UsageError("--points", "must be >= 2");

  Table t;
  t.columns = {"t_us",     "rho00",    "rho11",    "rho22",    "rho12_re",  "rho12_im",
               "rho20_re", "rho20_im", "rho10_re", "rho10_im", "energy_ev", "hs_distance"};
  t.metadata = params_meta(p);
  t.metadata.emplace_back("initial_state", c.g.initial);
  int code = kExitOk;
  try {
    const double t_max = c.g.tmax > 0.0 ? c.g.tmax : default_t_max(p);
    const std::vector<double> times =
        grid_kind == "uniform" ? uniform_grid(t_max, points) : default_time_grid(t_max, points);
    t.metadata.emplace_back("t_max_us", t_max);
    t.metadata.emplace_back("grid", grid_kind);
    const Trajectory tr = propagate(initial_state(c.g.initial), p, times);
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const Mat3& r = tr.states[i];
      t.add_row({tr.times[i], r(0, 0).real(), r(1, 1).real(), r(2, 2).real(), r(1, 2).real(), r(1, 2).imag(),
                 r(2, 0).real(), r(2, 0).imag(), r(1, 0).real(), r(1, 0).imag(), tr.energies[i],
                 tr.hs_distances[i]});
    }
    t.metadata.emplace_back("status", std::string(kStatusOk));
  } catch (const NumericalError& e) {
    c.err << "error: " << e.what() << '\n';
    t.metadata.emplace_back("status", std::string(kStatusNumerical));
    code = kExitNumerical;
  }
  write(c, t);
  return code;
}

DynamicsOptions dynamics_of(const Globals& g) {
  if (g.tmax < 0.0) throw UsageError("--tmax", "must be >= 0");
  DynamicsOptions o;
  o.t_max = g.tmax;
  if (g.points > 0) {
    if (g.points < 2) throw UsageError("--points", "must be >= 2");
    o.points = g.points;
  }
  return o;
}

void check_epsilon(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw UsageError("--epsilon", "must lie in (0, 1)");
}

int run_metrics(const Context& c) {
  const SystemParams p = params_of(c.g);
  check_epsilon(c.g.epsilon);
  const DynamicsOptions opts = dynamics_of(c.g);
  KeyValue kv;
  kv.table.metadata = params_meta(p);
  kv.table.metadata.emplace_back("initial_state", c.g.initial);
  int code = kExitOk;
  try {
    const ChargingMetrics m = charging_metrics(initial_state(c.g.initial), p, c.g.epsilon, opts);
    kv.add("epsilon", m.epsilon);
    kv.add("e_s_ev", m.e_s);
    kv.add("tau_s_us", m.tau_s);
    kv.add("p_s_ev_per_us", m.p_s);
    kv.add("delta", m.delta);
    kv.add("tau_gap_ref_us", m.tau_gap_ref);
    kv.add("p_gap_ref_ev_per_us", m.p_gap_ref);
    kv.add("overshoot", m.overshoot);
    kv.add("status", std::string(kStatusOk));
  } catch (const NumericalError& e) {
    c.err << "error: " << e.what() << '\n';
    kv.add("epsilon", c.g.epsilon);
    kv.add("status", std::string(dynamic_cast<const NotConverged*>(&e) ? kStatusNotConverged
                                                                        : kStatusNumerical));
    code = kExitNumerical;
  }
  write(c, kv.table);
  return code;
}

int run_slow_sector(const Context& c) {
  const SystemParams p = params_of(c.g);
  KeyValue kv;
  kv.table.metadata = params_meta(p);
  const std::vector<cplx> numeric = slow_eigenvalues(p);
  for (std::size_t k = 0; k < numeric.size(); ++k) kv.add_complex(fmt::format("l5_eig{}", k), numeric[k]);
  kv.add("delta_slow", gap_of(numeric, true));
  kv.add("analytic", p.delta == 0.0);
  if (p.delta == 0.0) {
    const CubicCoefficients k = cubic_coefficients(p);
    kv.add("gamma_sigma", sigma_rate(p));
    kv.add("gamma_bar", build_m(p).gamma_bar);
    kv.add("a", k.a);
    kv.add("b", k.b);
    kv.add("c", k.c);
    kv.add("P", k.p_big);
    kv.add("R", k.r_big);
    kv.add("discriminant", k.discriminant);
    kv.add("regime", std::string(k.discriminant > 0.0 ? "underdamped" : "overdamped"));
    kv.add("closed_form_consistent", k.closed_form_consistent);
    const auto roots = cardano_roots(k);
    for (std::size_t i = 0; i < roots.size(); ++i) kv.add_complex(fmt::format("root{}", i), roots[i]);
    const KappaEff kap = kappa_eff(p);
    kv.add("kappa_eff_exact", kap.exact);
    kv.add("kappa_eff_asymptotic", kap.asymptotic);
  }
  write(c, kv.table);
  return kExitOk;
}

int run_ep(const Context& c, const std::string& nth_range, const std::string& omega_range, int omega_count) {
  SystemParams p = params_of(c.g);
  if (p.delta != 0.0) throw UsageError("--delta", "EP search requires zero detuning");
  const auto [n_lo, n_hi] = parse_range(nth_range, "--nth-range");
  if (n_lo < 0.0) throw UsageError("--nth-range", "lo must be >= 0");

  std::vector<double> omegas{c.g.omega_mhz};
  if (!omega_range.empty()) {
    const auto [w_lo, w_hi] = parse_range(omega_range, "--omega-range");
    if (omega_count < 2) throw UsageError("--omega-count", "must be >= 2");
    if (w_lo < 0.0) throw UsageError("--omega-range", "lo must be >= 0");
    omegas = Axis{SweepParam::kOmegaOver2Pi, w_lo, w_hi, omega_count, Spacing::kLinear}.values();
  }

  Table t;
  t.columns = {"omega_over_2pi_mhz", "nth_ep", "lambda_ep_re", "lambda_ep_im", "kernel_dim",
               "discriminant_residual", "sqrt_exponent", "c1", "c2", "status"};
  t.metadata = params_meta(p);
  t.metadata.emplace_back("nth_range.lo", n_lo);
  t.metadata.emplace_back("nth_range.hi", n_hi);
  int failures = 0;
  for (double w : omegas) {
    p.omega_rabi = mhz_to_angular(w);
    try {
      const EPResult ep = locate_ep(p, n_lo, n_hi);
      t.add_row({w, ep.n_th_ep, ep.lambda_ep.real(), ep.lambda_ep.imag(), static_cast<double>(ep.kernel_dim),
                 ep.discriminant_residual, ep.sqrt_fit_exponent, ep.c1, ep.c2, std::string(kStatusOk)});
    } catch (const NumericalError& e) {
      ++failures;
      if (omegas.size() == 1) c.err << "error: " << e.what() << '\n';
      t.add_row({w, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, std::string("no_ep")});
    }
  }
  write(c, t);
  // A trajectory legitimately has Omega values without an EP.
  return omegas.size() == 1 && failures > 0 ? kExitNumerical : kExitOk;
}

int run_sweep_cmd(const Context& c, const std::string& axis1, const std::string& axis2,
                  const std::string& metrics, bool ep_curve) {
  SweepSpec spec;
  auto axis = [](const std::string& text, std::string_view flag) {
    try {
      return parse_axis(text);
    } catch (const InvalidArgument& e) {
      throw UsageError(flag, e.what());
    }
  };
  spec.axis1 = axis(axis1, "--axis1");
  spec.axis2 = axis(axis2, "--axis2");
  if (spec.axis1.param == spec.axis2.param) throw UsageError("--axis2", "must differ from --axis1");
  try {
    spec.metrics = parse_metric_list(metrics);
  } catch (const InvalidArgument& e) {
    throw UsageError("--metrics", e.what());
  }
  spec.fixed = params_of(c.g);
  check_epsilon(c.g.epsilon);
  spec.epsilon = c.g.epsilon;
  spec.dynamics = dynamics_of(c.g);
  spec.ep_curve = ep_curve;
  try {
    spec.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError("--ep-curve", e.what());
  }

  const SweepResult r = run_sweep(spec, c.g.threads);
  const Format f = format_of(c.g);
  if (c.g.out.empty()) {
    emit(c.out, r, f, c.g.record_timing);
  } else {
    const std::filesystem::path path(c.g.out);
    emit(path, r, f, c.g.record_timing);
    if (ep_curve && f == Format::kCsv) {
      std::filesystem::path side = path;
      side.replace_filename(path.stem().string() + "_ep" + path.extension().string());
      write_table(side, ep_curve_table(r), f);
    }
  }
  if (c.g.record_timing) c.err << fmt::format("wall time {:.3f} s\n", r.metadata.wall_time_s);
  if (!r.all_ok()) {
    c.err << "error: some grid points failed; see the status column\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int run_preset_cmd(const Context& c, const std::string& name, const std::string& out_dir, int grid, bool list) {
  if (list) {
    for (const auto& n : preset_names()) c.out << n << '\n';
    return kExitOk;
  }
  if (name.empty()) throw UsageError("preset", "a preset name is required (see --list)");
  PresetOptions o;
  o.out_dir = !out_dir.empty() ? out_dir : (!c.g.out.empty() ? c.g.out : ".");
  if (grid < 2) throw UsageError("--grid", "must be >= 2");
  o.grid = grid;
  o.threads = c.g.threads;
  o.format = format_of(c.g);
  o.base = params_of(c.g);
  check_epsilon(c.g.epsilon);
  o.epsilon = c.g.epsilon;
  o.record_timing = c.g.record_timing;
  std::vector<std::filesystem::path> files;
  try {
    files = run_preset(name, o);
  } catch (const InvalidArgument& e) {
    throw UsageError("preset", e.what());
  }
  for (const auto& f : files) c.out << f.string() << '\n';
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral analysis and charging dynamics of a three-level quantum battery", "liouville"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from a key = value file (flags override it)");

  Context ctx{Globals{}, out, err};
  Globals& g = ctx.g;
  app.add_option("--gamma20", g.gamma20, "Decay rate 2 -> 0 (1/us)")->capture_default_str();
  app.add_option("--gamma21", g.gamma21, "Decay rate 2 -> 1 (1/us)")->capture_default_str();
  app.add_option("--gamma10", g.gamma10, "Decay rate 1 -> 0 (1/us)")->capture_default_str();
  app.add_option("--nth", g.nth, "Thermal occupation N_th")->capture_default_str();
  app.add_option("--omega", g.omega_mhz, "Rabi frequency Omega/2pi (MHz)")->capture_default_str();
  app.add_option("--delta", g.delta_mhz, "Detuning delta/2pi (MHz)")->capture_default_str();
  app.add_option("--e1", g.e1, "Storage level energy (eV)")->capture_default_str();
  app.add_option("--e2", g.e2, "Excited level energy (eV)")->capture_default_str();
  app.add_option("--epsilon", g.epsilon, "Relaxation threshold on ||rho - rho_ss||")->capture_default_str();
  app.add_option("--tmax", g.tmax, "Propagation window (us); 0 picks 100 / Delta")->capture_default_str();
  app.add_option("--points", g.points, "Time samples; 0 picks the command default")->capture_default_str();
  app.add_option("--out", g.out, "Output file (default stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for sweeps")
      ->envname("LIOUVILLE_THREADS")
      ->check(CLI::Range(1, 1024))
      ->capture_default_str();
  app.add_option("--initial", g.initial, "Initial state")
      ->check(CLI::IsMember({"ground", "storage", "excited", "mixed"}))
      ->capture_default_str();
  app.add_flag("--record-timing", g.record_timing, "Report wall time (stderr, JSON metadata)");

  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of the full generator or its blocks");
  std::string block = "full";
  spectrum->add_option("--block", block, "full, l5, l2l, l2r or all")
      ->check(CLI::IsMember({"full", "l5", "l2l", "l2r", "all"}))
      ->capture_default_str();

  auto* steady = app.add_subcommand("steady", "Steady state and its observables");

  auto* prop = app.add_subcommand("propagate", "Trajectory rho(t), E(t) and distance to the steady state");
  std::string grid_kind = "mixed";
  prop->add_option("--grid", grid_kind, "mixed (linear head, log tail) or uniform")
      ->check(CLI::IsMember({"mixed", "uniform"}))
      ->capture_default_str();

  auto* metrics = app.add_subcommand("metrics", "Stored energy, charging time and power");

  auto* slow = app.add_subcommand("slow-sector", "Cubic, Cardano roots, discriminant and kappa_eff");

  auto* ep = app.add_subcommand("ep", "Exceptional point along N_th (or its trajectory over Omega)");
  std::string nth_range = "0.1:20";
  std::string omega_range;
  int omega_count = 40;
  ep->add_option("--nth-range", nth_range, "Search interval lo:hi")->capture_default_str();
  ep->add_option("--omega-range", omega_range, "Omega/2pi interval lo:hi (MHz) for a trajectory");
  ep->add_option("--omega-count", omega_count, "Omega samples for a trajectory")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Two-dimensional parameter grid");
  std::string axis1;
  std::string axis2;
  std::string metric_list = "all";
  bool ep_curve = false;
  sweep->add_option("--axis1", axis1, "name:min:max:count[:linear|log] (outer loop)")->required();
  sweep->add_option("--axis2", axis2, "name:min:max:count[:linear|log] (inner loop)")->required();
  sweep->add_option("--metrics", metric_list, "Comma-separated metrics or all")->capture_default_str();
  sweep->add_flag("--ep-curve", ep_curve, "Also locate the EP for every Omega (n_th x omega grids)");

  auto* preset = app.add_subcommand("preset", "Write the dataset behind a figure preset");
  std::string preset_name;
  std::string out_dir;
  int grid = 101;
  bool list = false;
  preset->add_option("name", preset_name, "Preset name");
  preset->add_option("--out-dir", out_dir, "Output directory (default: --out or .)");
  preset->add_option("--grid", grid, "Points per grid axis")->capture_default_str();
  preset->add_flag("--list", list, "List preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (spectrum->parsed()) return run_spectrum(ctx, block);
    if (steady->parsed()) return run_steady(ctx);
    if (prop->parsed()) return run_propagate(ctx, grid_kind);
    if (metrics->parsed()) return run_metrics(ctx);
    if (slow->parsed()) return run_slow_sector(ctx);
    if (ep->parsed()) return run_ep(ctx, nth_range, omega_range, omega_count);
    if (sweep->parsed()) return run_sweep_cmd(ctx, axis1, axis2, metric_list, ep_curve);
    if (preset->parsed()) return run_preset_cmd(ctx, preset_name, out_dir, grid, list);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace lqb::cli
