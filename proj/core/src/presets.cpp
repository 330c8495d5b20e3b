#include "lqb/presets.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>

#include <fmt/format.h>

#include "lqb/errors.hpp"
#include "lqb/liouvillian.hpp"
#include "lqb/slow_sector.hpp"
#include "lqb/spectrum.hpp"

namespace lqb {

namespace {

namespace fs = std::filesystem;

constexpr double kNthMin = 0.1;
constexpr double kNthMax = 20.0;
constexpr double kOmegaMin = 1.0;
constexpr double kOmegaMax = 40.0;
constexpr double kOmegaFixed = 20.0;
constexpr double kDetuningSpan = 20.0;
const std::vector<double> kFig3Nth{1.0, 2.0, 4.8, 8.0, 16.0};
const std::vector<double> kFig7Eps{1e-4, 1e-5, 1e-6, 1e-7};

struct Output {
  std::vector<fs::path> files;
  Metadata meta;
};

SystemParams resonant(const PresetOptions& o, double omega_mhz) {
  SystemParams p = o.base;
  p.omega_rabi = mhz_to_angular(omega_mhz);
  p.delta = 0.0;
  return p;
}

Axis nth_axis(int grid) { return {SweepParam::kNth, kNthMin, kNthMax, grid, Spacing::kLinear}; }
Axis omega_axis(int grid) { return {SweepParam::kOmegaOver2Pi, kOmegaMin, kOmegaMax, grid, Spacing::kLinear}; }

fs::path file_for(const PresetOptions& o, const std::string& stem) {
  return o.out_dir / (stem + std::string(extension(o.format)));
}

void base_meta(Metadata& m, std::string_view name, const PresetOptions& o) {
  m.emplace_back("preset", std::string(name));
  m.emplace_back("tool_version", tool_version());
  m.emplace_back("grid", static_cast<double>(o.grid));
  m.emplace_back("base.gamma20_per_us", o.base.gamma20);
  m.emplace_back("base.gamma21_per_us", o.base.gamma21);
  m.emplace_back("base.gamma10_per_us", o.base.gamma10);
  m.emplace_back("base.e1_ev", o.base.e1);
  m.emplace_back("base.e2_ev", o.base.e2);
}

void axis_meta(Metadata& m, const std::string& prefix, const Axis& a) {
  m.emplace_back(prefix + ".param", std::string(to_string(a.param)));
  m.emplace_back(prefix + ".min", a.min);
  m.emplace_back(prefix + ".max", a.max);
  m.emplace_back(prefix + ".count", static_cast<double>(a.count));
  m.emplace_back(prefix + ".spacing", std::string(to_string(a.spacing)));
}

/// Runs a sweep, writes it (and its EP curve) and records the grid.
SweepResult sweep_to(const PresetOptions& o, const SweepSpec& spec, const std::string& stem, Output& out) {
  const SweepResult r = run_sweep(spec, o.threads);
  const fs::path main = file_for(o, stem);
  emit(main, r, o.format, o.record_timing);
  out.files.push_back(main);
  if (spec.ep_curve) {
    const fs::path ep = file_for(o, stem + "_ep");
    Table t = ep_curve_table(r);
    t.metadata.emplace_back("source", stem);
    write_table(ep, t, o.format);
    out.files.push_back(ep);
  }
  axis_meta(out.meta, stem + ".axis1", spec.axis1);
  axis_meta(out.meta, stem + ".axis2", spec.axis2);
  out.meta.emplace_back(stem + ".epsilon", spec.epsilon);
  out.meta.emplace_back(stem + ".fixed_omega_over_2pi_mhz", angular_to_mhz(spec.fixed.omega_rabi));
  out.meta.emplace_back(stem + ".fixed_delta_over_2pi_mhz", angular_to_mhz(spec.fixed.delta));
  out.meta.emplace_back(stem + ".all_ok", r.all_ok());
  return r;
}

void write_out(const PresetOptions& o, const std::string& stem, Table t, Output& out) {
  const fs::path path = file_for(o, stem);
  t.metadata.insert(t.metadata.begin(), {"preset_file", stem});
  write_table(path, t, o.format);
  out.files.push_back(path);
}

double delta_slow_at(const SystemParams& p) { return gaps(build_liouvillian(p)).delta_slow; }

// Block-resolved nonzero eigenvalues along n_th at Omega/2pi = 20.
void fig2a(const PresetOptions& o, Output& out) {
  const Axis ax = nth_axis(o.grid);
  Table t;
  t.columns = {"nth", "block", "mode", "re", "im", "dominant"};
  for (double n : ax.values()) {
    SystemParams p = resonant(o, kOmegaFixed);
    p.n_th = n;
    const LiouvillianBlocks b = extract_blocks(build_liouvillian(p));
    const std::vector<std::pair<std::string, std::vector<cplx>>> blocks{
        {"l5", eigenvalues(b.l5)}, {"l2l", eigenvalues(b.l2_left)}, {"l2r", eigenvalues(b.l2_right)}};
    for (const auto& [name, ev] : blocks) {
      std::size_t skip = ev.size();
      cplx dom = ev.front();
      if (name == "l5") {
        skip = 0;
        for (std::size_t a = 1; a < ev.size(); ++a) {
          if (std::abs(ev[a]) < std::abs(ev[skip])) skip = a;
        }
        dom = dominant_nonzero(ev);
      }
      int mode = 0;
      for (std::size_t a = 0; a < ev.size(); ++a) {
        if (a == skip) continue;
        t.add_row({n, name, static_cast<double>(mode++), ev[a].real(), ev[a].imag(), ev[a].real() == dom.real()});
      }
    }
  }
  write_out(o, "fig2a", std::move(t), out);
  axis_meta(out.meta, "fig2a.axis", ax);
  out.meta.emplace_back("fig2a.omega_over_2pi_mhz", kOmegaFixed);
  const EPResult ep = locate_ep(resonant(o, kOmegaFixed), kNthMin, kNthMax);
  out.meta.emplace_back("fig2a.nth_ep", ep.n_th_ep);
}

void fig2_map(const PresetOptions& o, std::string_view name, Metric metric, Output& out) {
  SweepSpec s;
  s.axis1 = nth_axis(o.grid);
  s.axis2 = omega_axis(o.grid);
  s.fixed = resonant(o, kOmegaFixed);
  s.epsilon = o.epsilon;
  s.metrics = {metric};
  s.ep_curve = true;
  (void)sweep_to(o, s, std::string(name), out);
}

// Time grid shared by fig3 and fig4: ten slowest relaxation times of the fig3 set.
double fig3_t_max(const PresetOptions& o) {
  double slowest = INFINITY;
  for (double n : kFig3Nth) {
    SystemParams p = resonant(o, kOmegaFixed);
    p.n_th = n;
    slowest = std::min(slowest, delta_slow_at(p));
  }
  return 10.0 / slowest;
}

int time_points(const PresetOptions& o) { return 4 * (o.grid - 1) + 1; }

void fig3(const PresetOptions& o, Output& out) {
  const double t_max = fig3_t_max(o);
  const std::vector<double> times = uniform_grid(t_max, time_points(o));
  Table curves;
  curves.columns = {"nth", "t_us", "e_over_es", "e_ev"};
  for (double n : kFig3Nth) {
    SystemParams p = resonant(o, kOmegaFixed);
    p.n_th = n;
    const Trajectory tr = propagate(DensityMatrix::basis(kGround), p, times);
    const double e_s = energy(DensityMatrix::from_matrix(tr.steady, {1e-10, 1e-10, 1e-10}), p);
    for (std::size_t i = 0; i < tr.size(); ++i) {
      curves.add_row({n, tr.times[i], tr.energies[i] / e_s, tr.energies[i]});
    }
  }
  write_out(o, "fig3", std::move(curves), out);

  const Axis ax = nth_axis(o.grid);
  Table inset;
  inset.columns = {"nth", "delta_slow", "marker"};
  for (double n : ax.values()) {
    SystemParams p = resonant(o, kOmegaFixed);
    p.n_th = n;
    inset.add_row({n, delta_slow_at(p), false});
  }
  for (double n : kFig3Nth) {
    SystemParams p = resonant(o, kOmegaFixed);
    p.n_th = n;
    inset.add_row({n, delta_slow_at(p), true});
  }
  write_out(o, "fig3_inset", std::move(inset), out);

  std::string ns;
  for (double n : kFig3Nth) ns += (ns.empty() ? "" : ",") + format_number(n);
  out.meta.emplace_back("fig3.nth_values", ns);
  out.meta.emplace_back("fig3.t_max_us", t_max);
  out.meta.emplace_back("fig3.time_points", static_cast<double>(times.size()));
  out.meta.emplace_back("fig3.initial_state", "ground");
  axis_meta(out.meta, "fig3_inset.axis", ax);
}

void fig4(const PresetOptions& o, Output& out) {
  const double t_max = fig3_t_max(o);
  const std::vector<double> times = uniform_grid(t_max, time_points(o));
  const Axis ax = nth_axis(o.grid);
  Table t;
  t.columns = {"nth", "t_us", "hs_distance", "exp_ref"};
  for (double n : ax.values()) {
    SystemParams p = resonant(o, kOmegaFixed);
    p.n_th = n;
    const double ds = delta_slow_at(p);
    const Trajectory tr = propagate(DensityMatrix::basis(kGround), p, times);
    for (std::size_t i = 0; i < tr.size(); ++i) {
      t.add_row({n, tr.times[i], tr.hs_distances[i], std::exp(-ds * tr.times[i])});
    }
  }
  write_out(o, "fig4", std::move(t), out);
  axis_meta(out.meta, "fig4.axis", ax);
  out.meta.emplace_back("fig4.t_max_us", t_max);
  out.meta.emplace_back("fig4.time_points", static_cast<double>(times.size()));
  out.meta.emplace_back("fig4.nth_ep", locate_ep(resonant(o, kOmegaFixed), kNthMin, kNthMax).n_th_ep);
}

void fig5(const PresetOptions& o, Output& out) {
  const Axis na = nth_axis(o.grid);
  const Axis ea{SweepParam::kEpsilon, 1e-8, 1e-3, o.grid, Spacing::kLog};
  Table t;
  t.columns = {"nth", "epsilon", "tau_s_us", "p_s_ev_per_us", "e_s_ev", "delta", "delta_slow",
               "tau_over_ln_inv_eps_us", "p_times_ln_inv_eps_ev_per_us", "tau_delta_us", "p_delta_ev_per_us",
               "status"};
  for (double n : na.values()) {
    SystemParams p = resonant(o, kOmegaFixed);
    p.n_th = n;
    const double ds = delta_slow_at(p);
    for (double eps : ea.values()) {
      const double l = std::log(1.0 / eps);
      try {
        const ChargingMetrics m = charging_metrics(p, eps);
        t.add_row({n, eps, m.tau_s, m.p_s, m.e_s, m.delta, ds, m.tau_s / l, m.p_s * l, 1.0 / m.delta,
                   m.e_s * m.delta, std::string(kStatusOk)});
      } catch (const NotConverged&) {
        t.add_row({n, eps, Cell{}, Cell{}, Cell{}, Cell{}, ds, Cell{}, Cell{}, Cell{}, Cell{},
                   std::string(kStatusNotConverged)});
      }
    }
  }
  write_out(o, "fig5", std::move(t), out);
  axis_meta(out.meta, "fig5.axis1", na);
  axis_meta(out.meta, "fig5.axis2", ea);
  out.meta.emplace_back("fig5.omega_over_2pi_mhz", kOmegaFixed);
}

void fig6(const PresetOptions& o, Output& out) { (void)sweep_to(o, fig6_spec(o), "fig6", out); }

void fig7(const PresetOptions& o, Output& out) {
  for (double eps : kFig7Eps) {
    SweepSpec s = fig6_spec(o);
    s.epsilon = eps;
    s.metrics = {Metric::kTauS, Metric::kDeltaSlow};
    (void)sweep_to(o, s, fmt::format("fig7_eps{:.0e}", eps), out);
  }
}

void fig8(const PresetOptions& o, Output& out) {
  SweepSpec s;
  s.axis1 = nth_axis(o.grid);
  s.axis2 = {SweepParam::kDeltaOver2Pi, -kDetuningSpan, kDetuningSpan, o.grid, Spacing::kLinear};
  s.fixed = resonant(o, kOmegaFixed);
  s.epsilon = o.epsilon;
  s.metrics = {Metric::kDelta, Metric::kDeltaSlow, Metric::kTauS, Metric::kPs, Metric::kEs};
  const SweepResult r = sweep_to(o, s, "fig8", out);

  // Ridge along n_th for every detuning: maximal gap, minimal tau_s, maximal power.
  std::map<double, std::array<const SweepRow*, 3>> best;
  for (const SweepRow& row : r.rows) {
    auto& b = best[row.delta_over_2pi_mhz];
    if (row.delta_slow && (!b[0] || *row.delta_slow > *b[0]->delta_slow)) b[0] = &row;
    if (row.tau_s && (!b[1] || *row.tau_s < *b[1]->tau_s)) b[1] = &row;
    if (row.p_s && (!b[2] || *row.p_s > *b[2]->p_s)) b[2] = &row;
  }
  Table t;
  t.columns = {"delta_over_2pi_mhz", "nth_max_delta_slow", "nth_min_tau_s", "nth_max_p_s"};
  for (const auto& [d, b] : best) {
    auto nth = [](const SweepRow* row) { return row ? Cell{row->n_th} : Cell{}; };
    t.add_row({d, nth(b[0]), nth(b[1]), nth(b[2])});
  }
  write_out(o, "fig8_ridge", std::move(t), out);
}

using Runner = std::function<void(const PresetOptions&, Output&)>;

const std::map<std::string, Runner, std::less<>>& runners() {
  static const std::map<std::string, Runner, std::less<>> m{
      {"fig2a", fig2a},
      {"fig2b", [](const PresetOptions& o, Output& out) { fig2_map(o, "fig2b", Metric::kDelta, out); }},
      {"fig2c", [](const PresetOptions& o, Output& out) { fig2_map(o, "fig2c", Metric::kDeltaSlow, out); }},
      {"fig2d", [](const PresetOptions& o, Output& out) { fig2_map(o, "fig2d", Metric::kDeltaL2, out); }},
      {"fig3", fig3},
      {"fig4", fig4},
      {"fig5", fig5},
      {"fig6", fig6},
      {"fig7", fig7},
      {"fig8", fig8},
  };
  return m;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : runners()) v.push_back(k);
    return v;
  }();
  return names;
}

SweepSpec fig6_spec(const PresetOptions& o) {
  SweepSpec s;
  s.axis1 = nth_axis(o.grid);
  s.axis2 = omega_axis(o.grid);
  s.fixed = resonant(o, kOmegaFixed);
  s.epsilon = o.epsilon;
  s.metrics = {Metric::kPs, Metric::kEs, Metric::kCl1, Metric::kSvon,
               Metric::kTauS, Metric::kDelta, Metric::kDeltaSlow};
  s.ep_curve = true;
  return s;
}

std::vector<fs::path> run_preset(std::string_view name, const PresetOptions& opts) {
  const auto it = runners().find(name);
  if (it == runners().end()) {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw InvalidArgument(fmt::format("unknown preset '{}' (known: {})", name, known));
  }
  if (opts.grid < 2) throw InvalidArgument("preset grid must be >= 2");
  validate_params(opts.base);
  fs::create_directories(opts.out_dir);

  const auto start = std::chrono::steady_clock::now();
  Output out;
  base_meta(out.meta, name, opts);
  it->second(opts, out);
  if (opts.record_timing) {
    out.meta.emplace_back("wall_time_s",
                          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }

  Table meta;
  meta.metadata = std::move(out.meta);
  std::string files;
  for (const auto& f : out.files) files += (files.empty() ? "" : ",") + f.filename().string();
  meta.metadata.emplace_back("files", files);
  const fs::path meta_path = opts.out_dir / (std::string(name) + ".meta.json");
  write_table(meta_path, meta, Format::kJson);
  out.files.push_back(meta_path);
  return out.files;
}

}  // namespace lqb
