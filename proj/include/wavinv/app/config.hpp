#pragma once
// Flat `key = value` run configuration with sections
// [domain] [speed] [bc] [phantom] [time] [damping] [output].

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wavinv/eigenbasis.hpp"
#include "wavinv/error.hpp"
#include "wavinv/grid.hpp"
#include "wavinv/inversion.hpp"

namespace wavinv::app {

class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

struct DomainSpec {
  DomainKind kind = DomainKind::Interval;
  double lx = 1.0;
  double ly = 1.0;
  std::size_t nx = 64;
  std::size_t ny = 64;
  CornerNormal corner = CornerNormal::XFacing;
  bool operator==(const DomainSpec&) const = default;
};

struct PhantomTerm {
  std::size_t mode = 1;  // 1-based
  double amplitude = 0.0;
  bool operator==(const PhantomTerm&) const = default;
};

struct RunConfig {
  DomainSpec domain;
  std::string speed = "constant:1";
  double alpha = 1.0;
  std::size_t num_modes = 10;
  EigenPrecision precision = EigenPrecision::Extended;
  std::vector<PhantomTerm> robin_phantom;      // f in span{phi_l^R}, drives the Robin-trace path
  std::vector<PhantomTerm> dirichlet_phantom;  // f in span{phi_k^D}, drives the normal-derivative path
  double samples_per_period = 20.0;
  std::optional<double> horizon;  // defaults to the damping schedule's horizon
  DampingSchedule damping;
  std::optional<std::size_t> k_max;
  std::string output_dir = "out";
  double max_error = 5e-2;

  bool operator==(const RunConfig& other) const;
};

RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& config);

/// Throws ConfigError for values that violate module preconditions
/// (alpha <= 0, bad schedule, ...). Called by parse_config.
void validate(const RunConfig& config);

}  // namespace wavinv::app
