#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lqb/dynamics.hpp"
#include "lqb/errors.hpp"
#include "lqb/spectrum.hpp"
#include "ode_oracle.hpp"
#include "random_params.hpp"

namespace lqb {
namespace {

SystemParams at(double n) {
  SystemParams p;
  p.n_th = n;
  return p;
}

double slow_gap(const SystemParams& p) { return gaps(build_liouvillian(p)).delta_slow; }

TEST(Propagate, SteadyStateIsStationary) {
  const SystemParams p = reference_defaults();
  const DensityMatrix rho = steady_state(build_liouvillian(p));
  const std::vector<double> t = uniform_grid(5.0, 51);
  const Trajectory tr = propagate(rho, p, t);
  for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_LT(tr.hs_distances[i], 1e-12) << i;
}

TEST(Propagate, MatchesOdeOracleAtDefaults) {
  const SystemParams p = reference_defaults();
  const std::vector<double> t = default_time_grid(2.0, 200);
  const Trajectory tr = propagate(DensityMatrix::basis(kGround), p, t);
  const std::vector<Mat3> ref = testing::ode_trajectory(DensityMatrix::basis(kGround).matrix(), p, t);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_LT(hs_norm(tr.states[i] - ref[i]), 1e-8) << t[i];
}

TEST(Propagate, DarkExcitedDecayIsExponential) {
  SystemParams p;
  p.n_th = 0.0;
  p.omega_rabi = 0.0;
  const std::vector<double> t = uniform_grid(0.05, 26);
  const Trajectory tr = propagate(DensityMatrix::basis(kExcited), p, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(tr.states[i](2, 2).real(), std::exp(-(p.gamma20 + p.gamma21) * t[i]), 1e-12);
  }
}

TEST(Propagate, TraceAndHermiticityProperty) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const SystemParams p = testing::random_params(rng);
    const Trajectory tr = propagate(DensityMatrix::basis(kGround), p, default_time_grid(default_t_max(p, 20.0), 100));
    for (const Mat3& r : tr.states) {
      EXPECT_LT(std::abs(r.trace() - 1.0), 1e-10);
      EXPECT_LT((r - r.adjoint()).norm(), 1e-12);
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Mat3>(r).eigenvalues().minCoeff(), -1e-10);
    }
  }
}

TEST(Propagate, SemigroupProperty) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const SystemParams p = testing::random_params(rng);
    const Propagator prop(build_liouvillian(p));
    const Mat3 r0 = DensityMatrix::basis(kGround).matrix();
    const double t1 = 0.013;
    const double t2 = 0.041;
    const Mat3 once = prop.evolve(r0, t1 + t2);
    const Mat3 twice = prop.evolve(prop.evolve(r0, t1), t2);
    EXPECT_LT(hs_norm(once - twice), 1e-9);
  }
}

TEST(Propagate, ReachesSteadyStateAfterManyGapTimes) {
  const SystemParams p = reference_defaults();
  const double t = 30.0 / gaps(build_liouvillian(p)).delta;
  const Trajectory tr = propagate(DensityMatrix::basis(kGround), p, std::vector<double>{0.0, t});
  EXPECT_LT(tr.hs_distances.back(), 1e-10);
}

TEST(Propagate, RejectsInvalidGrid) {
  const SystemParams p = reference_defaults();
  EXPECT_THROW((void)propagate(DensityMatrix::basis(kGround), p, std::vector<double>{0.0, 1.0, 1.0}),
               InvalidArgument);
  EXPECT_THROW((void)propagate(DensityMatrix::basis(kGround), p, std::vector<double>{-1.0, 1.0}),
               InvalidArgument);
  EXPECT_THROW((void)uniform_grid(1.0, 1), InvalidArgument);
}

TEST(RelaxationTime, ZeroWhenAlreadyInside) {
  const SystemParams p = reference_defaults();
  const DensityMatrix rho = steady_state(build_liouvillian(p));
  EXPECT_EQ(relaxation_time(rho, p, 1e-8), 0.0);
  const Trajectory tr = propagate(DensityMatrix::basis(kGround), p, uniform_grid(1.0, 11));
  EXPECT_EQ(relaxation_time(tr, p, 10.0), 0.0);
}

TEST(RelaxationTime, CrossingSatisfiesThreshold) {
  const SystemParams p = at(8.0);
  const double eps = 1e-6;
  const double tau = relaxation_time(DensityMatrix::basis(kGround), p, eps);
  const Propagator prop(build_liouvillian(p));
  const Mat3 ss = steady_state(prop.generator()).matrix();
  const Mat3 r0 = DensityMatrix::basis(kGround).matrix();
  EXPECT_LE(hs_norm(prop.evolve(r0, tau * (1.0 + 1e-5)) - ss), eps * (1.0 + 1e-3));
  EXPECT_GT(hs_norm(prop.evolve(r0, tau * (1.0 - 1e-3)) - ss), eps);
}

TEST(RelaxationTime, FollowsGapEstimate) {
  for (double n : {8.0, 16.0}) {
    const SystemParams p = at(n);
    const ChargingMetrics m = charging_metrics(p, 1e-8);
    EXPECT_NEAR(m.tau_s / m.tau_gap_ref, 1.0, 0.25) << n;
  }
}

TEST(RelaxationTime, RescaledTimeIsFlatInEpsilon) {
  const SystemParams p = at(8.0);
  double lo = 1e300;
  double hi = 0.0;
  for (double eps : {1e-4, 1e-5, 1e-6, 1e-7}) {
    const double r = relaxation_time(DensityMatrix::basis(kGround), p, eps) / std::log(1.0 / eps);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_LT((hi - lo) / lo, 0.15);
}

TEST(RelaxationTime, NotConvergedWhenWindowTooShort) {
  const SystemParams p = reference_defaults();
  DynamicsOptions o;
  o.t_max = 1e-3;
  EXPECT_THROW((void)relaxation_time(DensityMatrix::basis(kGround), p, 1e-8, o), NotConverged);
}

TEST(ChargingMetrics, OvershootBelowEpOnly) {
  EXPECT_TRUE(charging_metrics(at(2.0), 1e-8).overshoot);
  EXPECT_FALSE(charging_metrics(at(16.0), 1e-8).overshoot);
}

TEST(ChargingMetrics, PowerIsEnergyOverTime) {
  const ChargingMetrics m = charging_metrics(reference_defaults(), 1e-8);
  EXPECT_NEAR(m.p_s, m.e_s / m.tau_s, 1e-12 * m.p_s);
  EXPECT_NEAR(m.p_gap_ref, m.e_s * m.delta / std::log(1e8), 1e-12 * m.p_gap_ref);
}

TEST(ChargingMetrics, PowerPeaksNearExceptionalPoint) {
  double best = 0.0;
  double best_n = 0.0;
  for (double n = 1.0; n <= 12.0; n += 0.5) {
    const double ps = charging_metrics(at(n), 1e-8).p_s;
    if (ps > best) {
      best = ps;
      best_n = n;
    }
  }
  EXPECT_GT(best_n, 1.0);
  EXPECT_LT(best_n, 12.0);
  EXPECT_NEAR(best_n, 4.8, 1.5);
}

TEST(ChargingMetrics, DarkConfigurationIsTrivial) {
  SystemParams p;
  p.n_th = 0.0;
  p.omega_rabi = 0.0;
  const ChargingMetrics m = charging_metrics(p, 1e-8);
  EXPECT_EQ(m.tau_s, 0.0);
  EXPECT_EQ(m.e_s, 0.0);
  EXPECT_FALSE(m.overshoot);
}

TEST(Envelope, SyntheticExponential) {
  std::vector<double> t;
  std::vector<double> d;
  for (int i = 0; i <= 200; ++i) {
    t.push_back(0.01 * i);
    d.push_back(3.0 * std::exp(-7.25 * t.back()));
  }
  EXPECT_NEAR(fit_decay_rate(t, d, EnvelopeMode::kDirect), 7.25, 1e-6);
}

TEST(Envelope, SyntheticOscillationUsesPeaks) {
  std::vector<double> t;
  std::vector<double> d;
  for (int i = 0; i <= 4000; ++i) {
    t.push_back(0.001 * i);
    d.push_back(std::exp(-2.0 * t.back()) * (1.2 + std::cos(9.0 * t.back())));
  }
  EXPECT_NEAR(fit_decay_rate(t, d, EnvelopeMode::kPeaks), 2.0, 0.02);
}

TEST(Envelope, TracksSlowGap) {
  for (double n : {2.0, 8.0, 16.0}) {
    const SystemParams p = at(n);
    const double ds = slow_gap(p);
    const Trajectory tr = propagate(DensityMatrix::basis(kGround), p, uniform_grid(12.0 / ds, 3001));
    const double rate = decay_envelope_fit(tr, p);
    EXPECT_NEAR(rate / ds, 1.0, 0.05) << n;
  }
}

TEST(Envelope, OscillationOnlyBelowExceptionalPoint) {
  // Spread of ln d about its straight-line fit in the late window.
  auto wiggle = [](const SystemParams& p) {
    const double ds = slow_gap(p);
    const Trajectory tr = propagate(DensityMatrix::basis(kGround), p, uniform_grid(12.0 / ds, 3001));
    const std::size_t h = tr.size() / 2;
    const std::span<const double> t(tr.times.data() + h, tr.size() - h);
    const std::span<const double> d(tr.hs_distances.data() + h, tr.size() - h);
    const double k = fit_decay_rate(t, d, EnvelopeMode::kDirect);
    double lo = 1e300;
    double hi = -1e300;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double r = std::log(d[i]) + k * t[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    return hi - lo;
  };
  const double below = wiggle(at(2.0));
  const double above = wiggle(at(16.0));
  EXPECT_GT(below, 0.05);
  EXPECT_GT(below, 20.0 * above);
}

}  // namespace
}  // namespace lqb
