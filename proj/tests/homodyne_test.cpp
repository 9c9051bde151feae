#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "quadratomo/calibration.hpp"
#include "quadratomo/homodyne.hpp"
#include "quadratomo/rendering.hpp"
#include "test_util.hpp"

using namespace quadratomo;
using namespace quadratomo::homodyne;

namespace {

double variance_se(double v, std::size_t n) { return v * std::sqrt(2.0 / double(n - 1)); }

gaussian::GaussianState best_guess() { return gaussian::squeezed_thermal(0.0556, 10.085, 0.0); }

}  // namespace

TEST(Sample, VacuumIsFlatAtOneHalf) {
  const auto d = sample(gaussian::vacuum(), Detector{}, PhaseSchedule{}, 100000, 1);
  ASSERT_EQ(d.size(), 100000u);
  d.validate();
  const auto pv = variance_vs_phase(d, 10);
  for (std::size_t b = 0; b < 10; ++b) EXPECT_NEAR(pv.curve.variances[b], 0.5, 4 * variance_se(0.5, pv.counts[b]));
  EXPECT_TRUE(pv.flagged.empty());
}

TEST(Sample, BestGuessMinimumIsSixtyEightPercent) {
  const Detector det{"best_guess", 0.36, 0.15};
  const auto d = sample(best_guess(), det, PhaseSchedule{}, 20000, 2);
  const auto pv = variance_vs_phase(d, 100);
  const double expected = 0.36 * 0.0556 + 0.32;
  EXPECT_NEAR(expected / 0.5, 0.68, 0.005);
  EXPECT_NEAR(pv.curve.variances[0], expected, 4 * variance_se(expected, pv.counts[0]));
  EXPECT_NEAR(pv.curve.min(), expected, 0.1);
}

TEST(Sample, DetectedVarianceLaw) {
  const auto s = gaussian::squeezed_thermal(0.12, 4.0, 0.7);
  for (double eta : {0.33, 0.8}) {
    const auto d = sample(s, Detector{"x", eta, 0.0}, PhaseSchedule{}, 100000, 3);
    const auto pv = variance_vs_phase(d, 100);
    for (int k = 0; k < 100; ++k) {
      const double want = eta * gaussian::variance_at(s, pv.curve.thetas[k]) + (1 - eta) / 2;
      EXPECT_NEAR(pv.curve.variances[k], want, 5 * variance_se(want, pv.counts[k])) << k;
    }
  }
}

TEST(Sample, PiPeriodicity) {
  const auto d = sample(gaussian::squeezed_thermal(0.1, 5.0, 0.3), Detector{"x", 0.5, 0}, PhaseSchedule{}, 100000, 4);
  const auto pv = variance_vs_phase(d, 100);
  for (int k = 0; k < 50; ++k) {
    const double a = pv.curve.variances[k], b = pv.curve.variances[k + 50];
    const double se = std::hypot(variance_se(a, pv.counts[k]), variance_se(b, pv.counts[k + 50]));
    EXPECT_NEAR(a, b, 5 * se);
  }
}

TEST(Sample, DisplacedMeanFollowsPhase) {
  Eigen::Vector2d mean(1.5, -0.5);
  const gaussian::GaussianState s(mean, 0.5 * Eigen::Matrix2d::Identity());
  const auto d = sample(s, Detector{"x", 0.64, 0}, PhaseSchedule{ScheduleKind::Swept, 4}, 40000, 5);
  double sum[4] = {0, 0, 0, 0};
  for (const auto& r : d.records) sum[nearest_phase(r.theta, 4)] += r.value;
  const double want[4] = {1.5, -0.5, -1.5, 0.5};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(sum[k] / 10000, 0.8 * want[k], 4 * std::sqrt(0.5 / 10000));
}

TEST(Sample, SeedDeterminism) {
  const auto s = best_guess();
  const Detector det{"best_guess", 0.36, 0.15};
  const auto a = sample(s, det, PhaseSchedule{}, 30000, 42);
  const auto b = sample(s, det, PhaseSchedule{}, 30000, 42);
  const auto c = sample(s, det, PhaseSchedule{}, 30000, 43);
  EXPECT_TRUE(a.records == b.records);
  EXPECT_TRUE(a.meta == b.meta);
  EXPECT_FALSE(a.records == c.records);

  const auto rho = render_fock(gaussian::squeezed_thermal(0.3, 1.5, 0.0));
  EXPECT_TRUE(sample(rho, det, PhaseSchedule{}, 5000, 9).records == sample(rho, det, PhaseSchedule{}, 5000, 9).records);
}

TEST(Sample, ScheduleAssignment) {
  PhaseSchedule swept{ScheduleKind::Swept, 100, 0};
  EXPECT_EQ(swept.index(0, 1000), 0);
  EXPECT_EQ(swept.index(101, 1000), 1);
  PhaseSchedule grid{ScheduleKind::FixedGrid, 4, 0};
  EXPECT_EQ(grid.index(0, 400), 0);
  EXPECT_EQ(grid.index(99, 400), 0);
  EXPECT_EQ(grid.index(100, 400), 1);
  EXPECT_EQ(grid.index(399, 400), 3);
  EXPECT_EQ(parse_schedule(to_string(ScheduleKind::FixedGrid)), ScheduleKind::FixedGrid);
  EXPECT_THROW(parse_schedule("random"), ValidationError);
}

TEST(Sample, RejectsBadInputs) {
  EXPECT_THROW(sample(gaussian::vacuum(), Detector{"x", 0.0, 0}, PhaseSchedule{}, 10, 1), ValidationError);
  EXPECT_THROW(sample(gaussian::vacuum(), Detector{"x", 1.2, 0}, PhaseSchedule{}, 10, 1), ValidationError);
  CMatrix bad = CMatrix::Zero(4, 4);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  EXPECT_THROW(sample(fock::DensityMatrix(1, 3, bad), Detector{}, PhaseSchedule{}, 10, 1), ValidationError);
}

TEST(Sample, FockAndGaussianPathsAgree) {
  const auto s = gaussian::squeezed_thermal(0.2, 2.0, 0.4);
  const auto rho = render_fock(s);
  const Detector det{"x", 0.4, 0};
  const PhaseSchedule sched{ScheduleKind::Swept, 4, 0};
  int low_p = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = sample(s, det, sched, 40000, seed);
    const auto f = sample(rho, det, sched, 40000, 1000 + seed);
    for (int k = 0; k < 4; ++k) {
      std::vector<double> a, b;
      for (const auto& r : g.records)
        if (nearest_phase(r.theta, 4) == k) a.push_back(r.value);
      for (const auto& r : f.records)
        if (nearest_phase(r.theta, 4) == k) b.push_back(r.value);
      low_p += quadratomo::testing::ks_two_sample_p(a, b) <= 0.001;
    }
    const auto vg = variance_vs_phase(g, 4), vf = variance_vs_phase(f, 4);
    for (int k = 0; k < 4; ++k) {
      const double se = std::hypot(variance_se(vg.curve.variances[k], vg.counts[k]),
                                   variance_se(vf.curve.variances[k], vf.counts[k]));
      EXPECT_NEAR(vg.curve.variances[k], vf.curve.variances[k], 4 * se);
    }
  }
  EXPECT_EQ(low_p, 0);
}

TEST(Sample, FockInverseCdfCoversTheMass) {
  const auto rho = render_fock(gaussian::squeezed_thermal(0.2, 2.0, 0.4));
  for (const auto& inv : fock_inverse_cdfs(rho, PhaseSchedule{ScheduleKind::Swept, 8, 0}))
    EXPECT_NEAR(inv.mass(), 1.0, 1e-8);
}

TEST(VarianceVsPhase, SingleBinIsTheSampleVariance) {
  QuadratureDataset d;
  for (double v : {1.0, 2.0, 4.0, 7.0}) d.records.push_back({0.0, v});
  const auto pv = variance_vs_phase(d, 1);
  EXPECT_DOUBLE_EQ(pv.curve.thetas[0], 0.0);
  EXPECT_NEAR(pv.curve.variances[0], 7.0, 1e-14);
  ASSERT_EQ(pv.flagged.size(), 1u);
}

TEST(VarianceVsPhase, NearestCenterWrapsAround) {
  EXPECT_EQ(nearest_phase(2 * std::numbers::pi - 0.01, 100), 0);
  EXPECT_EQ(nearest_phase(2 * std::numbers::pi / 100 * 0.49, 100), 0);
  EXPECT_EQ(nearest_phase(2 * std::numbers::pi / 100 * 0.51, 100), 1);
}

TEST(Histogram, CountsAndWidth) {
  const auto d = sample(gaussian::squeezed_thermal(0.3, 3.0, 0.0), Detector{}, PhaseSchedule{}, 100000, 6);
  const auto h = histogram(d, 2 * std::numbers::pi - 0.01, 0.01, 0.05);
  std::size_t selected = 0;
  double s1 = 0, s2 = 0;
  for (const auto& r : d.records)
    if (in_window(r.theta, 2 * std::numbers::pi - 0.01, 0.01)) {
      ++selected;
      s1 += r.value;
      s2 += r.value * r.value;
    }
  EXPECT_EQ(h.total(), selected);
  EXPECT_EQ(selected, 1000u);
  const double sample_sd = std::sqrt((s2 - s1 * s1 / selected) / (selected - 1));
  double m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    m1 += h.counts[i] * h.center(i);
    m2 += h.counts[i] * h.center(i) * h.center(i);
  }
  const double fitted_sd = std::sqrt(m2 / selected - (m1 / selected) * (m1 / selected));
  EXPECT_NEAR(fitted_sd, sample_sd, 0.02 * sample_sd);

  EXPECT_TRUE(histogram(d, 1.0, 1.0001, 0.1).counts.empty());
  const auto one = histogram(d, 0.0, 7.0, 1e3);
  ASSERT_EQ(one.counts.size(), 1u);
  EXPECT_EQ(one.counts[0], d.size());
}

TEST(VoltageView, RoundTripAndCalibrationAnchor) {
  const auto d = sample(best_guess(), Detector{"best_guess", 0.36, 0.15}, PhaseSchedule{}, 1000, 7);
  const double c = calibration::conversion_factor(calibration::kSqOffVoltageVariance, 0.36, 0.15);
  const auto back = quanta_view(voltage_view(d, c), c);
  for (std::size_t i = 0; i < d.size(); ++i)
    EXPECT_NEAR(back.records[i].value, d.records[i].value, 1e-12 * std::max(1.0, std::abs(d.records[i].value)));
  EXPECT_TRUE(voltage_view(d, 1.0).records == d.records);
  EXPECT_NEAR(0.554 / c, 3.2e-5, 1e-12);
  EXPECT_THROW(voltage_view(d, 0.0), ValidationError);
}
