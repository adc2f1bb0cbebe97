#pragma once
// Subcommand orchestration shared by the CLI and the integration tests.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "wavinv/app/config.hpp"
#include "wavinv/discrete_operator.hpp"
#include "wavinv/eigenbasis.hpp"
#include "wavinv/forward.hpp"
#include "wavinv/inversion.hpp"

namespace wavinv::app {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kNumericalFailure = 3,
  kToleranceExceeded = 4,
};

/// Grid, speed and both eigenbases for a configuration.
struct Problem {
  std::shared_ptr<const DomainGrid> grid;
  std::shared_ptr<const SpeedField> speed;
  std::optional<EigenBasis> robin;
  std::optional<EigenBasis> dirichlet;
};

Problem build_problem(const RunConfig& config);

/// sum_j amplitude_j phi_{mode_j} over the given basis. Throws InvalidInput if
/// a mode index exceeds the basis size.
Eigen::VectorXd build_phantom(const std::vector<PhantomTerm>& terms, const EigenBasis& basis);

/// Phantom built from a basis large enough for every requested mode, even if
/// that exceeds num_modes (the forward span gate then rejects it).
Eigen::VectorXd phantom_field(const RunConfig& config, const Problem& problem, BcKind basis);

/// Time grid resolving both bases and covering the damping horizon.
TimeGrid make_time_grid(const RunConfig& config, const Problem& problem);

enum class Theorem { Four, Five, Both };

struct TheoremOutcome {
  int theorem = 4;
  CoefficientReport report;
  double rel_l2_error = 0.0;
};

// Each run_* writes into `out`, prints progress to `log`, and returns an
// ExitCode. Failures are reported on `err` with the stage name.
int run_eigen(const RunConfig& config, const std::filesystem::path& out, std::ostream& log,
              std::ostream& err);
int run_forward(const RunConfig& config, const std::filesystem::path& out, std::ostream& log,
                std::ostream& err);
int run_invert(const RunConfig& config, const std::filesystem::path& out,
               const std::optional<std::filesystem::path>& data_path, std::ostream& log,
               std::ostream& err);
int run_roundtrip(const RunConfig& config, const std::filesystem::path& out, Theorem theorem,
                  double max_error, std::ostream& log, std::ostream& err,
                  std::vector<TheoremOutcome>* outcomes = nullptr);

}  // namespace wavinv::app
