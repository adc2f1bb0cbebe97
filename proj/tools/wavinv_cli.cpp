// wavinv: eigenbases, boundary data and coefficient recovery from the command line.
//
//   wavinv eigen     --config run.cfg [--out dir]
//   wavinv forward   --config run.cfg [--out dir]
//   wavinv invert    --config run.cfg [--out dir] [--data boundary.csv]
//   wavinv roundtrip --config run.cfg [--out dir] [--theorem 4|5|both] [--max-error x]
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 tolerance exceeded.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wavinv/app/config.hpp"
#include "wavinv/app/runner.hpp"
#include "wavinv/kernels.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--config", common.config, "Run configuration file")->required();
  sub->add_option("--out", common.out, "Output directory (default: [output] dir)");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace wavinv::app;

  CLI::App app{"Coefficient recovery for the variable-speed wave equation from boundary data"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Print the selected SIMD kernel table");
  app.fallthrough();

  Common eigen_opts;
  Common forward_opts;
  Common invert_opts;
  Common roundtrip_opts;
  std::string data_path;
  std::string theorem = "both";
  std::optional<double> max_error;

  auto* eigen = app.add_subcommand("eigen", "Compute and export the Robin and Dirichlet bases");
  add_common(eigen, eigen_opts);
  auto* forward = app.add_subcommand("forward", "Synthesize boundary data for the phantoms");
  add_common(forward, forward_opts);
  auto* invert = app.add_subcommand("invert", "Recover coefficients from boundary data");
  add_common(invert, invert_opts);
  invert->add_option("--data", data_path, "Boundary data CSV (default: files in --out)");
  auto* roundtrip = app.add_subcommand("roundtrip", "forward -> invert -> reconstruct");
  add_common(roundtrip, roundtrip_opts);
  roundtrip->add_option("--theorem", theorem, "Which inversion to run")
      ->check(CLI::IsMember({"4", "5", "both"}));
  roundtrip->add_option("--max-error", max_error, "Reconstruction error threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  if (verbose) std::clog << "kernels: " << wavinv::kernels::active().name << '\n';

  const Common& common = eigen->parsed()     ? eigen_opts
                          : forward->parsed() ? forward_opts
                          : invert->parsed()  ? invert_opts
                                              : roundtrip_opts;
  RunConfig config;
  try {
    config = load_config(common.config);
  } catch (const std::exception& e) {
    std::cerr << "error [config]: " << e.what() << '\n';
    return kConfigError;
  }
  const std::filesystem::path out = common.out.empty() ? config.output_dir : common.out;

  if (eigen->parsed()) return run_eigen(config, out, std::cout, std::cerr);
  if (forward->parsed()) return run_forward(config, out, std::cout, std::cerr);
  if (invert->parsed()) {
    std::optional<std::filesystem::path> data;
    if (!data_path.empty()) data = data_path;
    return run_invert(config, out, data, std::cout, std::cerr);
  }
  const Theorem which = theorem == "4" ? Theorem::Four : theorem == "5" ? Theorem::Five : Theorem::Both;
  return run_roundtrip(config, out, which, max_error.value_or(config.max_error), std::cout,
                       std::cerr);
}
