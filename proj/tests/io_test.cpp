#include <gtest/gtest.h>

#include <filesystem>
#include <limits>
#include <random>

#include "quadratomo/io.hpp"
#include "quadratomo/rendering.hpp"
#include "test_util.hpp"

using namespace quadratomo;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("quadratomo_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Numbers, ShortestFormattingRoundTripsBitExactly) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double v = u(rng) * std::pow(10.0, int(i % 40) - 20);
    EXPECT_EQ(io::parse_double(io::format_double(v)), v);
  }
  for (double v : {0.0, -0.0, 5e-324, std::numeric_limits<double>::max(), 0.1, 1.0 / 3.0})
    EXPECT_EQ(io::parse_double(io::format_double(v)), v);
  EXPECT_TRUE(std::isnan(io::parse_double(io::format_double(std::nan("")))));
  EXPECT_EQ(io::parse_double(io::format_double(INFINITY)), INFINITY);
  EXPECT_EQ(io::parse_double(" +2.5 "), 2.5);
}

TEST(Numbers, RejectsGarbage) {
  EXPECT_THROW(io::parse_double("1.5x"), ValidationError);
  EXPECT_THROW(io::parse_double(""), ValidationError);
  EXPECT_THROW(io::parse_double("abc"), ValidationError);
}

TEST(DensityJson, RoundTripIsBitExact) {
  std::mt19937_64 rng(3);
  const auto rho = quadratomo::testing::random_state(rng, 8, 8);
  const auto back = io::density_from_json(io::json::parse(io::to_json(rho).dump()));
  ASSERT_EQ(back.cutoff(), rho.cutoff());
  EXPECT_EQ(back.matrix(), rho.matrix());
}

TEST(DensityJson, RejectsWrongShape) {
  auto j = io::to_json(fock::DensityMatrix::vacuum(3));
  j["cutoff"] = 4;
  EXPECT_THROW(io::density_from_json(j), ValidationError);
  j.erase("re");
  EXPECT_THROW(io::density_from_json(j), ValidationError);
}

TEST(GaussianJson, RoundTripIsBitExact) {
  auto g = gaussian::squeezed_thermal(0.1234567, 7.654321, 0.3);
  g.mean << 0.1, -2.0 / 3.0;
  const auto back = io::gaussian_from_json(io::json::parse(io::to_json(g).dump()));
  EXPECT_EQ(back.mean, g.mean);
  EXPECT_EQ(back.cov, g.cov);
}

TEST(WignerCsv, RoundTripIsBitExact) {
  const auto axis = fock::uniform_axis(-3, 3, 13);
  const auto g = fock::wigner(render_fock(gaussian::squeezed_thermal(0.2, 3.0, 0.4), 12), axis, axis);
  const auto back = io::wigner_from_csv(io::wigner_csv(g));
  EXPECT_EQ(back.x_axis, g.x_axis);
  EXPECT_EQ(back.p_axis, g.p_axis);
  EXPECT_EQ(back.values, g.values);
}

TEST(VarianceCurveCsv, RoundTripIsBitExact) {
  const auto c = gaussian::variance_curve(gaussian::squeezed_thermal(0.1, 9.0, 1.0), 37);
  const auto back = io::variance_curve_from_csv(io::variance_curve_csv(c));
  EXPECT_EQ(back.thetas, c.thetas);
  EXPECT_EQ(back.variances, c.variances);
}

TEST(NoiseRunsCsv, RoundTripIsBitExact) {
  const auto runs = calibration::synthesize_runs(calibration::quoted_chain(0.9));
  const auto back = io::noise_runs_from_csv(io::noise_runs_csv(runs));
  ASSERT_EQ(back.size(), runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    EXPECT_EQ(back[i].config, runs[i].config);
    EXPECT_EQ(back[i].sw, runs[i].sw);
    ASSERT_EQ(back[i].rows.size(), runs[i].rows.size());
    for (std::size_t k = 0; k < runs[i].rows.size(); ++k) {
      EXPECT_EQ(back[i].rows[k].t_f, runs[i].rows[k].t_f);
      EXPECT_EQ(back[i].rows[k].s, runs[i].rows[k].s);
    }
  }
}

TEST(NoiseRunsCsv, RejectsBadHeaderAndLabels) {
  EXPECT_THROW(io::noise_runs_from_csv("config,switch,T,S\n"), ValidationError);
  EXPECT_THROW(io::noise_runs_from_csv("config,switch,T_f_K,S_arb\nbogus,cold,0.1,2\n"), ValidationError);
  EXPECT_THROW(io::noise_runs_from_csv("config,switch,T_f_K,S_arb\noff_off,cold,0.1\n"), ValidationError);
}

TEST(Dataset, CsvAndSidecarRoundTripBitExactly) {
  const auto d = homodyne::sample(gaussian::squeezed_thermal(0.05, 5.0), homodyne::Detector{"x", 0.36, 0.15},
                                  homodyne::PhaseSchedule{}, 3000, 42);
  const auto dir = temp_dir("dataset");
  io::write_dataset(dir / "d.csv", d);
  EXPECT_TRUE(fs::exists(dir / "d.meta.json"));
  const auto back = io::read_dataset(dir / "d.csv");
  EXPECT_EQ(back.records, d.records);
  EXPECT_EQ(back.meta, d.meta);
}

TEST(Dataset, RejectsMalformedInput) {
  EXPECT_THROW(io::dataset_from_csv("theta,value\n0,1\n"), ValidationError);
  EXPECT_THROW(io::dataset_from_csv("theta_rad,value_quanta\n0,1,2\n"), ValidationError);
  EXPECT_THROW(io::dataset_from_csv("theta_rad,value_quanta\n7,1\n"), ValidationError);
  EXPECT_THROW(io::dataset_from_csv("theta_rad,value_quanta\n0,nan\n"), ValidationError);
  EXPECT_THROW(io::dataset_from_csv(""), ValidationError);
}

TEST(RunReport, RoundTrip) {
  io::RunReport r{1234, -98765.4321, true, 0.36, 30, 100, 201, 77};
  EXPECT_EQ(io::run_report_from_json(io::json::parse(io::to_json(r).dump())), r);
  r.final_loglik = -INFINITY;
  EXPECT_EQ(io::run_report_from_json(io::json::parse(io::to_json(r).dump())).final_loglik, -INFINITY);
}

TEST(BootstrapCsv, RoundTripIsBitExact) {
  mle::BootstrapSummary b;
  for (int i = 0; i < 4; ++i) {
    b.subsets.push_back({0.9 + i * 1e-3, 0.0775 / (i + 1), 0.3 + i / 7.0, 20.0 - i, 0.5 / (i + 1), 1.0 - i / 3.0});
    b.iterations.push_back(100 + i);
    b.converged.push_back(i % 2 == 0);
  }
  const auto back = io::bootstrap_from_csv(io::bootstrap_csv(b));
  ASSERT_EQ(back.subsets.size(), b.subsets.size());
  for (std::size_t i = 0; i < b.subsets.size(); ++i) {
    EXPECT_EQ(back.subsets[i].fidelity, b.subsets[i].fidelity);
    EXPECT_EQ(back.subsets[i].best_v_s, b.subsets[i].best_v_s);
    EXPECT_EQ(back.subsets[i].min_ratio, b.subsets[i].min_ratio);
    EXPECT_EQ(back.subsets[i].max_ratio, b.subsets[i].max_ratio);
    EXPECT_EQ(back.subsets[i].purity, b.subsets[i].purity);
    EXPECT_EQ(back.subsets[i].coherent_information, b.subsets[i].coherent_information);
  }
  EXPECT_EQ(back.iterations, b.iterations);
  EXPECT_EQ(back.converged, b.converged);
}

TEST(ChainJson, RoundTripIsBitExact) {
  const auto p = calibration::quoted_chain(0.87);
  const auto q = io::chain_from_json(io::json::parse(io::to_json(p).dump()));
  EXPECT_EQ(io::to_json(q).dump(), io::to_json(p).dump());
  EXPECT_EQ(q.xi, p.xi);
  EXPECT_EQ(q.n_bar, p.n_bar);
}

TEST(CaseJson, RoundTrip) {
  for (const auto& c : calibration::three_cases()) {
    const auto back = io::case_from_json(io::to_json(c));
    EXPECT_EQ(back.label, c.label);
    EXPECT_EQ(back.eta, c.eta);
    EXPECT_EQ(back.n_bar, c.n_bar);
    EXPECT_EQ(back.conversion, c.conversion);
  }
}

TEST(FileHash, KnownDigest) {
  const auto dir = temp_dir("hash");
  io::write_text(dir / "abc.txt", "abc");
  EXPECT_EQ(io::file_hash(dir / "abc.txt"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
