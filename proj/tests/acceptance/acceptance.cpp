// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "lqb/dynamics.hpp"
#include "lqb/errors.hpp"
#include "lqb/liouvillian.hpp"
#include "lqb/presets.hpp"
#include "lqb/slow_sector.hpp"
#include "lqb/spectrum.hpp"
#include "lqb/sweep.hpp"
#include "multiset.hpp"
#include "ode_oracle.hpp"
#include "random_params.hpp"

namespace {

using namespace lqb;

struct Outcome {
  bool pass = false;
  std::string detail;
};

SystemParams at(double n, double omega_mhz = 20.0) {
  SystemParams p = reference_defaults();
  p.n_th = n;
  p.omega_rabi = mhz_to_angular(omega_mhz);
  return p;
}

double slow_gap(const SystemParams& p) { return gaps(build_liouvillian(p)).delta_slow; }

Outcome ep_location() {
  const EPResult ep = locate_ep(reference_defaults(), 0.1, 20.0);
  return {ep.n_th_ep >= 4.3 && ep.n_th_ep <= 5.3, fmt::format("N_EP = {:.6f}", ep.n_th_ep)};
}

Outcome gap_maximum() {
  const double step = 0.05;
  const double n_ep = locate_ep(reference_defaults(), 0.1, 20.0).n_th_ep;
  double best = -1.0;
  double best_n = 0.0;
  const int count = static_cast<int>(std::lround((20.0 - 0.1) / step)) + 1;
  for (int i = 0; i < count; ++i) {
    const double n = 0.1 + step * i;
    const double d = slow_gap(at(n));
    if (d > best) {
      best = d;
      best_n = n;
    }
  }
  const double off = std::abs(best_n - n_ep);
  return {off <= step + 1e-12,
          fmt::format("argmax N = {:.2f}, N_EP = {:.4f}, |diff| = {:.4f}", best_n, n_ep, off)};
}

Outcome large_occupation() {
  const SystemParams p = at(1000.0);
  const double ds = slow_gap(p);
  const KappaEff k = kappa_eff(p);
  const double rel_kappa = std::abs(ds - k.exact) / ds;
  const double rel_half = std::abs(ds - 0.5 * p.gamma21) / ds;
  return {rel_kappa < 0.01 && rel_half < 0.03,
          fmt::format("Delta_slow = {:.5f}, kappa_eff = {:.5f} (rel {:.2e}), gamma21/2 = {:.2f} (rel {:.3f})", ds,
                      k.exact, rel_kappa, 0.5 * p.gamma21, rel_half)};
}

Outcome cardano_equivalence() {
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const SystemParams p = at(0.1 + (20.0 - 0.1) * i / 49.0, 1.0 + 39.0 * j / 49.0);
      const auto roots = cardano_roots(cubic_coefficients(p));
      const std::vector<cplx> ev = eigenvalues(build_m(p).m);
      double scale = 0.0;
      for (const cplx& z : ev) scale = std::max(scale, std::abs(z));
      worst = std::max(worst, testing::multiset_distance({roots.begin(), roots.end()}, ev) / scale);
    }
  }
  return {worst < 1e-9, fmt::format("max relative deviation {:.3e}", worst)};
}

Outcome block_completeness() {
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const SuperOp sop = build_liouvillian(testing::random_params(rng));
    const LiouvillianBlocks b = extract_blocks(sop);
    std::vector<cplx> all = eigenvalues(b.l5);
    for (const cplx& z : eigenvalues(b.l2_left)) all.push_back(z);
    for (const cplx& z : eigenvalues(b.l2_right)) all.push_back(z);
    worst = std::max(worst, testing::multiset_distance(all, eigenvalues(sop.matrix)));
  }
  return {worst < 1e-10, fmt::format("max multiset distance {:.3e}", worst)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(1002);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const SystemParams p = testing::random_params(rng);
    const std::vector<double> times = default_time_grid(default_t_max(p, 20.0), 200);
    const Trajectory tr = propagate(DensityMatrix::basis(kGround), p, times);
    const std::vector<Mat3> ref = testing::ode_trajectory(DensityMatrix::basis(kGround).matrix(), p, times);
    for (std::size_t i = 0; i < times.size(); ++i) worst = std::max(worst, hs_norm(tr.states[i] - ref[i]));
  }
  return {worst < 1e-8, fmt::format("max HS deviation {:.3e}", worst)};
}

Outcome envelope_law() {
  bool ok = true;
  std::string detail;
  for (double n : {2.0, 8.0, 16.0}) {
    const SystemParams p = at(n);
    const double ds = slow_gap(p);
    const Trajectory tr = propagate(DensityMatrix::basis(kGround), p, uniform_grid(12.0 / ds, 3001));
    const EnvelopeMode mode = n < 4.0 ? EnvelopeMode::kPeaks : EnvelopeMode::kDirect;
    const double rate = decay_envelope_fit(tr, p, mode);
    const double rel = std::abs(rate - ds) / ds;
    ok = ok && rel < 0.05;
    detail += fmt::format("{}N={:g}: fit {:.4f} vs {:.4f} ({:.2e})", detail.empty() ? "" : "; ", n, rate, ds, rel);
  }
  return {ok, detail};
}

Outcome threshold_scaling() {
  const SystemParams p = at(8.0);
  double lo = 1e300;
  double hi = 0.0;
  for (double eps : {1e-4, 1e-5, 1e-6, 1e-7}) {
    const double r = relaxation_time(DensityMatrix::basis(kGround), p, eps) / std::log(1.0 / eps);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double spread = (hi - lo) / lo;
  return {spread < 0.15, fmt::format("tau_s/ln(1/eps) in [{:.5f}, {:.5f}] us, spread {:.3f}", lo, hi, spread)};
}

Outcome overshoot_crossover() {
  const bool low = charging_metrics(at(2.0), 1e-8).overshoot;
  const bool high = charging_metrics(at(16.0), 1e-8).overshoot;
  return {low && !high, fmt::format("N=2: {}, N=16: {}", low, high)};
}

Outcome power_ridge() {
  PresetOptions o;
  SweepSpec s = fig6_spec(o);
  s.metrics = {Metric::kPs, Metric::kEs};
  s.ep_curve = false;
  const SweepResult r = run_sweep(s, default_threads());
  if (!r.all_ok()) return {false, "sweep had failing grid points"};
  std::size_t best = 0;
  double e_max = 0.0;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (*r.rows[i].p_s > *r.rows[best].p_s) best = i;
    e_max = std::max(e_max, *r.rows[i].e_s);
  }
  const SweepRow& b = r.rows[best];
  SystemParams p = reference_defaults();
  p.omega_rabi = mhz_to_angular(b.omega_over_2pi_mhz);
  const double n_ep = locate_ep(p, s.axis1.min, s.axis1.max).n_th_ep;
  const double cell = (s.axis1.max - s.axis1.min) / (s.axis1.count - 1);
  const double e_rel = (e_max - *b.e_s) / e_max;
  return {std::abs(b.n_th - n_ep) <= cell && e_rel > 0.05,
          fmt::format("argmax (N={:.3f}, Omega/2pi={:.3f}), N_EP = {:.3f}, cell {:.3f}, E_s {:.2f}% below max",
                      b.n_th, b.omega_over_2pi_mhz, n_ep, cell, 100.0 * e_rel)};
}

Outcome sqrt_scaling() {
  const EPResult ep = locate_ep(reference_defaults(), 0.1, 20.0);
  return {std::abs(ep.sqrt_fit_exponent - 0.5) <= 0.1, fmt::format("exponent {:.4f}", ep.sqrt_fit_exponent)};
}

Outcome physicality() {
  std::mt19937_64 rng(1012);
  double worst_trace = 0.0;
  double worst_herm = 0.0;
  double worst_pos = 0.0;
  int bad_zero = 0;
  int bad_real = 0;
  for (int t = 0; t < 1000; ++t) {
    const SystemParams p = testing::random_params(rng);
    const SuperOp sop = build_liouvillian(p);
    const std::vector<cplx> ev = eigenvalues(sop.matrix);
    int zeros = 0;
    for (const cplx& z : ev) {
      if (std::abs(z) < 1e-9) {
        ++zeros;
      } else if (!(z.real() < 0.0)) {
        ++bad_real;
      }
    }
    bad_zero += zeros != 1;
    const Propagator prop(sop);
    const std::vector<double> times = default_time_grid(default_t_max(p, 20.0), 64);
    for (const Mat3& r : prop.evolve_grid(DensityMatrix::basis(kGround).matrix(), times)) {
      worst_trace = std::max(worst_trace, std::abs(r.trace() - 1.0));
      worst_herm = std::max(worst_herm, (r - r.adjoint()).norm());
      const Mat3 h = 0.5 * (r + r.adjoint());
      worst_pos = std::min(worst_pos, Eigen::SelfAdjointEigenSolver<Mat3>(h).eigenvalues().minCoeff());
    }
  }
  const bool ok = worst_trace < 1e-10 && worst_herm < 1e-10 && worst_pos >= -1e-10 && bad_zero == 0 && bad_real == 0;
  return {ok, fmt::format("trace {:.2e}, hermiticity {:.2e}, min eigenvalue {:.2e}, zero-mode failures {}, "
                          "non-decaying modes {}",
                          worst_trace, worst_herm, worst_pos, bad_zero, bad_real)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "EP location", 1.0, ep_location},
      {2, "gap maximum at EP", 10.0, gap_maximum},
      {3, "large-N_th asymptote", 1.0, large_occupation},
      {4, "Cardano vs eigensolve", 30.0, cardano_equivalence},
      {5, "block-spectrum completeness", 10.0, block_completeness},
      {6, "propagation vs ODE oracle", 60.0, oracle_equivalence},
      {7, "envelope law", 60.0, envelope_law},
      {8, "threshold scaling", 60.0, threshold_scaling},
      {9, "overshoot crossover", 30.0, overshoot_crossover},
      {10, "power ridge", 600.0, power_ridge},
      {11, "square-root EP scaling", 10.0, sqrt_scaling},
      {12, "physicality suite", 300.0, physicality},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    fmt::print("{} {:2d} {}: {} [{:.2f} s / {:g} s{}]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail, secs,
               c.limit_s, in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
