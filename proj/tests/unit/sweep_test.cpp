#include <cmath>

#include <gtest/gtest.h>

#include "lqb/errors.hpp"
#include "lqb/presets.hpp"
#include "lqb/slow_sector.hpp"
#include "lqb/sweep.hpp"

namespace lqb {
namespace {

SweepSpec small_spec() {
  SweepSpec s;
  s.axis1 = {SweepParam::kNth, 1.0, 9.0, 3, Spacing::kLinear};
  s.axis2 = {SweepParam::kOmegaOver2Pi, 10.0, 30.0, 3, Spacing::kLinear};
  return s;
}

TEST(Axis, ParsesFullAndShortForms) {
  const Axis a = parse_axis("n_th:0.1:20:5");
  EXPECT_EQ(a.param, SweepParam::kNth);
  EXPECT_EQ(a.count, 5);
  EXPECT_EQ(a.spacing, Spacing::kLinear);
  const Axis b = parse_axis("epsilon:1e-8:1e-3:6:log");
  EXPECT_EQ(b.param, SweepParam::kEpsilon);
  EXPECT_EQ(b.spacing, Spacing::kLog);
  const std::vector<double> v = b.values();
  EXPECT_EQ(v.front(), 1e-8);
  EXPECT_EQ(v.back(), 1e-3);
  EXPECT_NEAR(v[1], 1e-7, 1e-20);
}

TEST(Axis, RejectsMalformed) {
  EXPECT_THROW((void)parse_axis("n_th:1:2"), InvalidArgument);
  EXPECT_THROW((void)parse_axis("bogus:1:2:3"), InvalidArgument);
  EXPECT_THROW((void)parse_axis("n_th:2:1:3"), InvalidArgument);
  EXPECT_THROW((void)parse_axis("n_th:1:2:0"), InvalidArgument);
  EXPECT_THROW((void)parse_axis("n_th:0:2:3:log"), InvalidArgument);
  EXPECT_THROW((void)parse_axis("n_th:1:x:3"), InvalidArgument);
  EXPECT_THROW((void)parse_axis("n_th:1:2:3:cubic"), InvalidArgument);
}

TEST(Metrics, ParseList) {
  EXPECT_EQ(parse_metric_list("all"), all_metrics());
  const std::vector<Metric> m = parse_metric_list("delta,p_s");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[1], Metric::kPs);
  EXPECT_THROW((void)parse_metric_list("delta,nope"), InvalidArgument);
  for (Metric x : all_metrics()) EXPECT_EQ(parse_metric(to_string(x)), x);
}

TEST(Sweep, SmallGridSmoke) {
  const SweepResult r = run_sweep(small_spec());
  ASSERT_EQ(r.rows.size(), 9u);
  EXPECT_TRUE(r.all_ok());
  for (const SweepRow& row : r.rows) {
    EXPECT_TRUE(row.p_s && row.tau_s && row.e_s && row.delta && row.overshoot);
    EXPECT_NEAR(*row.p_s, *row.e_s / *row.tau_s, 1e-12 * *row.p_s);
  }
}

TEST(Sweep, RowOrderIsAxis1Outer) {
  const SweepResult r = run_sweep(small_spec());
  EXPECT_EQ(r.rows[0].n_th, 1.0);
  EXPECT_EQ(r.rows[0].omega_over_2pi_mhz, 10.0);
  EXPECT_EQ(r.rows[1].n_th, 1.0);
  EXPECT_EQ(r.rows[1].omega_over_2pi_mhz, 20.0);
  EXPECT_EQ(r.rows[3].n_th, 5.0);
  EXPECT_EQ(r.rows[8].omega_over_2pi_mhz, 30.0);
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
  SweepSpec s = small_spec();
  s.axis1.count = 5;
  const SweepResult one = run_sweep(s, 1);
  const SweepResult four = run_sweep(s, 4);
  ASSERT_EQ(one.rows.size(), four.rows.size());
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    EXPECT_EQ(one.rows[i].p_s, four.rows[i].p_s);
    EXPECT_EQ(one.rows[i].delta, four.rows[i].delta);
    EXPECT_EQ(one.rows[i].status, four.rows[i].status);
  }
}

TEST(Sweep, InvalidSpecIsRejected) {
  SweepSpec s = small_spec();
  s.axis2.param = SweepParam::kNth;
  EXPECT_THROW((void)run_sweep(s), InvalidArgument);
  s = small_spec();
  s.ep_curve = true;
  s.fixed.delta = 1.0;
  EXPECT_THROW((void)run_sweep(s), InvalidArgument);
  s = small_spec();
  s.metrics.clear();
  EXPECT_THROW((void)run_sweep(s), InvalidArgument);
}

TEST(Sweep, FailuresBecomeStatus) {
  SystemParams p;
  p.n_th = 0.0;
  p.omega_rabi = 0.0;
  p.gamma10 = 0.0;
  const SweepRow r = evaluate_point(p, 1e-8, all_metrics());
  EXPECT_EQ(r.status, kStatusDegenerate);
  EXPECT_FALSE(r.p_s.has_value());

  SystemParams bad;
  bad.gamma20 = -1.0;
  EXPECT_EQ(evaluate_point(bad, 1e-8, all_metrics()).status, kStatusInvalid);

  DynamicsOptions tight;
  tight.t_max = 1e-4;
  EXPECT_EQ(evaluate_point(reference_defaults(), 1e-8, {Metric::kTauS}, tight).status, kStatusNotConverged);
}

TEST(Sweep, EpCurveFollowsLocateEp) {
  SweepSpec s = small_spec();
  s.metrics = {Metric::kDeltaSlow};
  s.ep_curve = true;
  s.axis1 = {SweepParam::kNth, 0.1, 20.0, 3, Spacing::kLinear};
  const SweepResult r = run_sweep(s);
  ASSERT_EQ(r.ep_curve.size(), 3u);
  EXPECT_NEAR(r.ep_curve[1].n_th, locate_ep(reference_defaults(), 0.1, 20.0).n_th_ep, 1e-9);
  EXPECT_LT(r.ep_curve[0].n_th, r.ep_curve[2].n_th);
}

TEST(Sweep, PowerIsSymmetricInDetuning) {
  SystemParams p;
  p.n_th = 6.0;
  for (double d : {3.0, 11.0}) {
    p.delta = mhz_to_angular(d);
    const SweepRow plus = evaluate_point(p, 1e-8, {Metric::kPs});
    p.delta = -p.delta;
    const SweepRow minus = evaluate_point(p, 1e-8, {Metric::kPs});
    ASSERT_TRUE(plus.p_s && minus.p_s);
    EXPECT_NEAR(*plus.p_s, *minus.p_s, 1e-6 * *plus.p_s);
  }
}

TEST(Sweep, PowerMaximumSitsOnEpCurve) {
  PresetOptions o;
  o.grid = 21;
  SweepSpec s = fig6_spec(o);
  s.metrics = {Metric::kPs, Metric::kEs};
  const SweepResult r = run_sweep(s);
  std::size_t best = 0;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (r.rows[i].p_s.value_or(0.0) > r.rows[best].p_s.value_or(0.0)) best = i;
  }
  SystemParams p = reference_defaults();
  p.omega_rabi = mhz_to_angular(r.rows[best].omega_over_2pi_mhz);
  const double n_ep = locate_ep(p, 0.1, 20.0).n_th_ep;
  const double cell = (20.0 - 0.1) / 20.0;
  EXPECT_LE(std::abs(r.rows[best].n_th - n_ep), cell);
}

}  // namespace
}  // namespace lqb
