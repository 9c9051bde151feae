#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "quadratomo/fock.hpp"
#include "quadratomo/gaussian.hpp"
#include "quadratomo/rendering.hpp"
#include "test_util.hpp"

using namespace quadratomo;
using quadratomo::testing::simpson;

namespace {

double gaussian_wigner(const Eigen::Matrix2d& cov, double x, double p) {
  const Eigen::Vector2d r(x, p);
  return std::exp(-0.5 * r.dot(cov.inverse() * r)) / (2.0 * std::numbers::pi * std::sqrt(cov.determinant()));
}

}  // namespace

TEST(Wavefunction, GroundStateNormalizationAndVacuumVariance) {
  EXPECT_NEAR(fock::quadrature_wavefunction(0, 0.0), std::pow(std::numbers::pi, -0.25), 1e-15);
  auto psi0 = [](double x) { return fock::quadrature_wavefunction(0, x); };
  EXPECT_NEAR(simpson([&](double x) { return psi0(x) * psi0(x); }, -12, 12), 1.0, 1e-12);
  EXPECT_NEAR(simpson([&](double x) { return x * x * psi0(x) * psi0(x); }, -12, 12), 0.5, 1e-12);
}

TEST(Wavefunction, OddStatesVanishAtOrigin) {
  EXPECT_EQ(fock::quadrature_wavefunction(1, 0.0), 0.0);
  EXPECT_NEAR(fock::quadrature_wavefunction(13, 0.0), 0.0, 1e-300);
}

TEST(Wavefunction, HighOrderMatchesExtendedPrecision) {
  // reference values: explicit Hermite polynomial in 50-digit arithmetic
  EXPECT_NEAR(fock::quadrature_wavefunction(25, 3.0), 0.29344700435648359148, 1e-10);
  EXPECT_NEAR(fock::quadrature_wavefunction(30, -2.5), -0.27662955450847443397, 1e-10);
  EXPECT_NEAR(fock::quadrature_wavefunction(7, 1.3), 0.40609866425190536303, 1e-12);
}

TEST(Wavefunction, OrthonormalUpToCutoff) {
  const int n_max = 35;
  for (int m = 0; m <= n_max; m += 5)
    for (int n = m; n <= n_max; n += 7) {
      const double overlap = simpson(
          [&](double x) { return fock::quadrature_wavefunction(m, x) * fock::quadrature_wavefunction(n, x); }, -16,
          16, 8000);
      EXPECT_NEAR(overlap, m == n ? 1.0 : 0.0, 1e-10) << m << "," << n;
    }
  const Eigen::VectorXd all = fock::wavefunctions(n_max, 1.7);
  for (int n = 0; n <= n_max; ++n) EXPECT_DOUBLE_EQ(all[n], fock::quadrature_wavefunction(n, 1.7));
}

TEST(DensityMatrix, RejectsBadShapes) {
  EXPECT_THROW(fock::DensityMatrix(3, 4, CMatrix::Identity(5, 5)), ValidationError);
  EXPECT_THROW(fock::DensityMatrix(1, 4, CMatrix::Identity(4, 4)), ValidationError);
  EXPECT_THROW(fock::DensityMatrix(2, 2, CMatrix::Identity(3, 3)), ValidationError);
}

TEST(DensityMatrix, HermitianByConstruction) {
  CMatrix m = CMatrix::Zero(3, 3);
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  m(0, 1) = Complex(0.2, 0.1);
  const fock::DensityMatrix rho(1, 2, m);
  EXPECT_EQ(rho.entry(1, 0), std::conj(rho.entry(0, 1)));
}

TEST(MarginalPdf, VacuumIsGaussianWithHalfVariance) {
  const auto rho = fock::DensityMatrix::vacuum();
  const std::vector<double> xs = fock::uniform_axis(-8, 8, 2001);
  for (double theta : {0.0, 0.9, 2.5}) {
    const auto pdf = fock::marginal_pdf(rho, theta, xs);
    double mass = 0, second = 0;
    const double h = xs[1] - xs[0];
    for (std::size_t i = 0; i < xs.size(); ++i) {
      EXPECT_NEAR(pdf[i], std::exp(-xs[i] * xs[i]) / std::sqrt(std::numbers::pi), 1e-12);
      mass += pdf[i] * h;
      second += xs[i] * xs[i] * pdf[i] * h;
    }
    EXPECT_NEAR(mass, 1.0, 1e-6);
    EXPECT_NEAR(second, 0.5, 1e-6);
  }
}

TEST(MarginalPdf, SqueezedThermalHasClosedFormVariance) {
  const auto rho = render_fock(gaussian::squeezed_thermal(0.25, 1.0, 0.0));
  const std::vector<double> xs = fock::uniform_axis(-8, 8, 4001);
  const auto pdf = fock::marginal_pdf(rho, 0.0, xs);
  double second = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) second += xs[i] * xs[i] * pdf[i] * (xs[1] - xs[0]);
  EXPECT_NEAR(second, 0.25, 1e-4);
}

TEST(MarginalPdf, FirstExcitedStateHasNodeAtOrigin) {
  const auto rho = fock::DensityMatrix::fock(30, 1);
  const std::vector<double> xs{-1.0, 0.0, 0.5};
  const auto pdf = fock::marginal_pdf(rho, 0.0, xs);
  EXPECT_NEAR(pdf[1], 0.0, 1e-15);
  const double psi0 = fock::quadrature_wavefunction(0, 0.5);
  EXPECT_NEAR(pdf[2], 2.0 * 0.25 * psi0 * psi0, 1e-14);
}

TEST(MarginalPdf, RejectsTwoModeInput) {
  const auto two = fock::tensor(fock::DensityMatrix::vacuum(3), fock::DensityMatrix::vacuum(3));
  const std::vector<double> xs{0.0};
  EXPECT_THROW(fock::marginal_pdf(two, 0.0, xs), ValidationError);
}

TEST(MarginalPdf, SecondMomentMatchesQuadratureVarianceForRandomStates) {
  std::mt19937_64 rng(11);
  const std::vector<double> xs = fock::uniform_axis(-12, 12, 3001);
  const double h = xs[1] - xs[0];
  for (int trial = 0; trial < 12; ++trial) {
    const auto rho = quadratomo::testing::random_state(rng, 14, 6);
    for (int k = 0; k < 8; ++k) {
      const double theta = k * std::numbers::pi / 8;
      const auto pdf = fock::marginal_pdf(rho, theta, xs);
      double mass = 0, first = 0, second = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        EXPECT_GE(pdf[i], -1e-9);
        mass += pdf[i] * h;
        first += xs[i] * pdf[i] * h;
        second += xs[i] * xs[i] * pdf[i] * h;
      }
      EXPECT_NEAR(mass, 1.0, 1e-6);
      EXPECT_NEAR(second - first * first, fock::quadrature_variance(rho, theta), 1e-4);
    }
  }
}

TEST(QuadratureVariance, VacuumAndThermal) {
  EXPECT_NEAR(fock::quadrature_variance(fock::DensityMatrix::vacuum(), 1.234), 0.5, 1e-15);
  const auto th = fock::DensityMatrix::thermal(30, 0.15);
  for (double theta : {0.0, 0.3, 2.0}) EXPECT_NEAR(fock::quadrature_variance(th, theta), 0.65, 1e-12);
}

TEST(QuadratureVariance, RotationMovesTheMinorAxis) {
  const auto rho = render_fock(gaussian::squeezed_thermal(0.3, 1.2, 0.0));
  const auto turned = fock::rotate(rho, 0.6);
  for (double theta : {0.0, 0.4, 1.9})
    EXPECT_NEAR(fock::quadrature_variance(turned, theta), fock::quadrature_variance(rho, theta - 0.6), 1e-12);
  const auto ex = fock::variance_extrema(turned);
  EXPECT_NEAR(ex.min_axis, 0.6, 1e-9);
  EXPECT_NEAR(ex.min_variance, 0.3, 1e-6);
  EXPECT_NEAR(ex.max_variance, 1.2, 1e-6);
}

TEST(Wigner, KnownValuesAtOrigin) {
  EXPECT_NEAR(fock::wigner_at(fock::DensityMatrix::vacuum(), 0, 0), 1.0 / std::numbers::pi, 1e-15);
  EXPECT_NEAR(fock::wigner_at(fock::DensityMatrix::fock(30, 1), 0, 0), -1.0 / std::numbers::pi, 1e-14);
}

TEST(Wigner, NormalizationAndMarginalsOnWideGrid) {
  std::mt19937_64 rng(5);
  const auto rho = quadratomo::testing::random_state(rng, 10, 4);
  const auto axis = fock::uniform_axis(-9, 9, 181);
  const auto grid = fock::wigner(rho, axis, axis);
  EXPECT_NEAR(grid.riemann_sum(), 1.0, 1e-3);
  const double h = axis[1] - axis[0];
  const auto pr_x = fock::marginal_pdf(rho, 0.0, axis);
  const auto pr_p = fock::marginal_pdf(rho, std::numbers::pi / 2, axis);
  for (std::size_t i = 0; i < axis.size(); ++i) {
    EXPECT_NEAR(grid.values.row(Eigen::Index(i)).sum() * h, pr_x[i], 1e-3);
    EXPECT_NEAR(grid.values.col(Eigen::Index(i)).sum() * h, pr_p[i], 1e-3);
  }
}

TEST(Wigner, SqueezedStateMatchesGaussianClosedForm) {
  const auto g = gaussian::squeezed_thermal(0.2, 2.0, 0.4);
  const auto rho = render_fock(g);
  const auto axis = fock::uniform_axis(-4, 4, 41);
  const auto grid = fock::wigner(rho, axis, axis);
  for (std::size_t i = 0; i < axis.size(); ++i)
    for (std::size_t j = 0; j < axis.size(); ++j)
      EXPECT_NEAR(grid.values(Eigen::Index(i), Eigen::Index(j)), gaussian_wigner(g.cov, axis[i], axis[j]), 1e-3);
}

TEST(Fidelity, VacuumAndOrthogonality) {
  const auto vac = fock::DensityMatrix::vacuum();
  EXPECT_NEAR(fock::fidelity_pure(vac, fock::PureState::fock(30, 0)), 1.0, 1e-15);
  EXPECT_NEAR(fock::fidelity_pure(vac, fock::PureState::fock(30, 1)), 0.0, 1e-15);
  EXPECT_THROW(fock::fidelity_pure(vac, fock::PureState::fock(20, 0)), ValidationError);
}

TEST(PurityEntropy, ReferenceStates) {
  const auto vac = fock::DensityMatrix::vacuum();
  EXPECT_NEAR(fock::purity(vac), 1.0, 1e-15);
  EXPECT_NEAR(fock::von_neumann_entropy(vac), 0.0, 1e-12);
  CMatrix m = CMatrix::Zero(31, 31);
  m(0, 0) = m(1, 1) = 0.5;
  const fock::DensityMatrix mixed(1, 30, m);
  EXPECT_NEAR(fock::purity(mixed), 0.5, 1e-15);
  EXPECT_NEAR(fock::von_neumann_entropy(mixed), 1.0, 1e-12);
  EXPECT_NEAR(fock::von_neumann_entropy(fock::DensityMatrix::thermal(30, 1.0)), gaussian::entropy_g(1.5), 1e-6);
}

TEST(BestPureSqueezed, SelfMatchAndVacuum) {
  const auto pure = fock::DensityMatrix::from_pure(fock::squeezed_vacuum(30, 0.1, 0.3));
  const auto best = fock::best_pure_squeezed_fock(pure);
  EXPECT_NEAR(best.fidelity, 1.0, 1e-6);
  EXPECT_NEAR(best.v_s, 0.1, 1e-4);
  EXPECT_NEAR(best.axis, 0.3, 1e-6);

  const auto vac = fock::best_pure_squeezed_fock(fock::DensityMatrix::vacuum());
  EXPECT_NEAR(vac.v_s, 0.5, 1e-9);
  EXPECT_NEAR(vac.fidelity, 1.0, 1e-12);
}

TEST(BestPureSqueezed, GaussianSigmaFromTableVariances) {
  // sigma: Gaussian with squeezed / anti-squeezed ratios 0.484 / 20.17
  const auto sigma = render_fock(gaussian::squeezed_thermal(0.242, 10.085, 0.0));
  const auto best = fock::best_pure_squeezed_fock(sigma);
  EXPECT_NEAR(best.fidelity, 0.49, 0.01);
  EXPECT_NEAR(best.v_s, 0.0775, 0.0005);
  EXPECT_NEAR(best.v_s_ratio(), 0.155, 0.001);
}

TEST(SqueezedVacuum, VarianceAlongAxis) {
  const auto rho = fock::DensityMatrix::from_pure(fock::squeezed_vacuum(30, 0.2, 1.1));
  const auto ex = fock::variance_extrema(rho);
  EXPECT_NEAR(ex.min_variance, 0.2, 1e-9);
  EXPECT_NEAR(ex.max_variance, 1.25, 1e-9);
  EXPECT_NEAR(ex.min_axis, 1.1, 1e-9);
}

TEST(Beamsplitter, VacuumIsAFixedPoint) {
  const auto vac = fock::DensityMatrix::vacuum(8);
  const auto out = fock::beamsplitter_combine(vac, vac, 0.7);
  EXPECT_NEAR(out.rho.entry(0, 0).real(), 1.0, 1e-14);
  EXPECT_NEAR(out.leaked_trace, 0.0, 1e-14);
}

TEST(Beamsplitter, SinglePhotonSplitsEvenly) {
  const int N = 6;
  const auto out = fock::beamsplitter_combine(fock::DensityMatrix::fock(N, 1), fock::DensityMatrix::vacuum(N), 0.0);
  const auto i10 = fock::pair_index(N, 1, 0), i01 = fock::pair_index(N, 0, 1);
  EXPECT_NEAR(out.rho.entry(i10, i10).real(), 0.5, 1e-14);
  EXPECT_NEAR(out.rho.entry(i01, i01).real(), 0.5, 1e-14);
  EXPECT_NEAR(std::abs(out.rho.entry(i10, i01)), 0.5, 1e-14);
  EXPECT_NEAR(fock::purity(out.rho), 1.0, 1e-13);
}

TEST(Beamsplitter, OrthogonalSqueezedVacuaGiveTwoModeSqueezing) {
  const double v_s = 0.2;
  const auto sq = fock::DensityMatrix::from_pure(fock::squeezed_vacuum(30, v_s));
  const auto out = fock::beamsplitter_combine(sq, sq, std::numbers::pi / 2);
  EXPECT_TRUE(quadratomo::testing::is_physical(out.rho));
  const auto g = gaussian::squeezed_thermal(v_s, 0.25 / v_s);
  const auto expected = gaussian::beamsplitter_combine(g, g, std::numbers::pi / 2);
  const Eigen::Matrix4d cov = fock::two_mode_covariance(out.rho);
  EXPECT_LT((cov - expected.cov).cwiseAbs().maxCoeff(), 1e-3) << cov << "\n\n" << expected.cov;
}

TEST(Beamsplitter, RejectsCutoffMismatch) {
  EXPECT_THROW(fock::beamsplitter_combine(fock::DensityMatrix::vacuum(4), fock::DensityMatrix::vacuum(5), 0.0),
               ValidationError);
}

TEST(PartialTrace, ProductAndBellStates) {
  const int N = 5;
  const auto a = fock::DensityMatrix::thermal(N, 0.3);
  const auto b = fock::DensityMatrix::fock(N, 2);
  const auto ab = fock::tensor(a, b);
  EXPECT_LT((fock::partial_trace(ab, 0).matrix() - a.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((fock::partial_trace(ab, 1).matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(fock::partial_trace(ab, 1).trace(), ab.trace(), 1e-12);

  const auto d = Eigen::Index((N + 1) * (N + 1));
  CVector bell = CVector::Zero(d);
  bell[fock::pair_index(N, 0, 0)] = std::sqrt(0.5);
  bell[fock::pair_index(N, 1, 1)] = std::sqrt(0.5);
  const fock::DensityMatrix bell_rho(2, N, bell * bell.adjoint());
  const auto reduced = fock::partial_trace(bell_rho, 0);
  EXPECT_NEAR(reduced.entry(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(reduced.entry(1, 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(reduced.entry(0, 1)), 0.0, 1e-15);
}

TEST(PartialTrace, TwoModeSqueezedReducesToThermal) {
  const double v_s = 0.2;
  const auto sq = fock::DensityMatrix::from_pure(fock::squeezed_vacuum(30, v_s));
  const auto out = fock::beamsplitter_combine(sq, sq, std::numbers::pi / 2);
  const auto reduced = fock::partial_trace(out.rho, 1);
  const double nbar = 0.5 * (v_s + 0.25 / v_s) - 0.5;
  const auto ex = fock::variance_extrema(reduced);
  EXPECT_NEAR(ex.min_variance - 0.5, nbar, 1e-3);
  EXPECT_NEAR(ex.max_variance - 0.5, nbar, 1e-3);
  EXPECT_NEAR(fock::moments(reduced).n, nbar, 1e-3);
}

TEST(CoherentInformation, VacuumThermalAndPureInputs) {
  EXPECT_NEAR(fock::coherent_information(fock::DensityMatrix::vacuum(12)), 0.0, 1e-10);
  EXPECT_LE(fock::coherent_information(fock::DensityMatrix::thermal(20, 0.15)), 0.0);

  const auto pure = fock::DensityMatrix::from_pure(fock::squeezed_vacuum(20, 0.2));
  const auto ci = fock::coherent_information_detail(pure);
  EXPECT_NEAR(ci.entropy_ab, 0.0, 1e-3);
  EXPECT_NEAR(ci.ebits, ci.entropy_b, 1e-3);
  EXPECT_NEAR(ci.ebits, gaussian::gaussian_coherent_information(0.2, 1.25), 1e-3);
}

// Inside the regime where the cutoff-30 truncation error stays below 1e-3
// (max variance <= 3 quanta), every Fock quantity matches its Gaussian closed form.
TEST(GaussianOracle, RandomModeratelySqueezedStates) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const double v_max = 0.5 + 2.5 * unit(rng);
    const double v_floor = 0.25 / v_max;
    const double v_min = v_floor + (std::min(v_max, 0.5) - v_floor) * unit(rng);
    const double axis = std::numbers::pi * unit(rng);
    const auto g = gaussian::squeezed_thermal(v_min, v_max, axis);
    const auto rendered = render_fock_detail(g);
    const auto& rho = rendered.rho;
    EXPECT_TRUE(quadratomo::testing::is_physical(rho));
    for (double theta : {0.0, 0.7, 2.2})
      EXPECT_NEAR(fock::quadrature_variance(rho, theta), gaussian::variance_at(g, theta), 1e-3);
    EXPECT_NEAR(fock::purity(rho), gaussian::purity(g), 1e-3);
    EXPECT_NEAR(fock::von_neumann_entropy(rho), gaussian::entropy(g), 1e-3);
    const auto best = gaussian::best_pure_squeezed(v_min, v_max);
    EXPECT_NEAR(fock::fidelity_pure(rho, fock::squeezed_vacuum(30, best.v_s, axis)), best.fidelity, 1e-3);
  }
}
