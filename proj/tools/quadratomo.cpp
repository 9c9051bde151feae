// quadratomo command-line driver.
//
//   quadratomo <verb> --config PATH [--seed N] [--out DIR]
//
// verbs: simulate, calibrate, reconstruct, analyze, bias-study
// exit codes: 0 success, 2 validation error, 3 numerical failure

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "quadratomo/errors.hpp"
#include "quadratomo/pipeline.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace quadratomo;
  namespace fs = std::filesystem;

  CLI::App app{"Homodyne tomography of squeezed microwave states: simulation, calibration, reconstruction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "quadratomo 1.0.0");

  struct Verb {
    const char* name;
    const char* help;
    int (*run)(const pipeline::Context&);
  };
  const Verb verbs[] = {
      {"simulate", "generate a synthetic quadrature dataset", pipeline::cmd_simulate},
      {"calibrate", "fit the detection-chain noise runs and bracket the chain parameters", pipeline::cmd_calibrate},
      {"reconstruct", "maximum-likelihood density matrix from a dataset", pipeline::cmd_reconstruct},
      {"analyze", "state properties per calibration case", pipeline::cmd_analyze},
      {"bias-study", "seed ensemble of simulate + reconstruct on the linear-method Gaussian", pipeline::cmd_bias_study},
  };

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  for (const auto& v : verbs) {
    auto* sub = app.add_subcommand(v.name, v.help);
    sub->add_option("--config", config_path, "configuration file (key = value with [sections])")->required();
    sub->add_option("--seed", seed, "RNG seed; QUADRATOMO_SEED overrides it");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  const Verb* chosen = nullptr;
  for (const auto& v : verbs)
    if (app.got_subcommand(v.name)) chosen = &v;

  try {
    pipeline::Context ctx{config::Config::load(config_path), fs::path(config_path), fs::path(out_dir), seed, &std::cout};
    fs::create_directories(ctx.out);
    return chosen->run(ctx);
  } catch (const ValidationError& e) {
    std::cerr << "quadratomo " << chosen->name << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "quadratomo " << chosen->name << ": numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "quadratomo " << chosen->name << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "quadratomo " << chosen->name << ": " << e.what() << "\n";
    return kExitNumerical;
  }
}
