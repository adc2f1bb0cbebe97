#pragma once
// Spectral realization of the wave-forward operators:
//   W f(x, t) = sum_l <f, phi_l> phi_l(x) cos(lambda_l t)
// and the two boundary measurement types (Robin trace, Dirichlet normal
// derivative) sampled on a uniform time grid.

#include <cstddef>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "wavinv/eigenbasis.hpp"

namespace wavinv {

struct TimeGrid {
  double dt = 0.0;
  std::size_t n_steps = 0;

  static TimeGrid make(double dt, std::size_t n_steps);

  /// Largest admissible step: `samples_per_period` samples per period of the
  /// fastest frequency (>= 20 required).
  static double max_dt(double lambda_max, double samples_per_period = 20.0);

  /// Uniform grid resolving `lambda_max` and covering at least `horizon`.
  /// n_steps is rounded up to an even count.
  static TimeGrid resolving(double lambda_max, double horizon, double samples_per_period = 20.0);

  double time(std::size_t j) const { return dt * static_cast<double>(j); }
  double duration() const { return dt * static_cast<double>(n_steps); }
  std::size_t samples() const { return n_steps + 1; }

  /// Throws InvalidInput when dt > 2 pi / (20 lambda_max).
  void check_resolves(double lambda_max) const;
};

enum class DataKind { RobinTrace, DirichletNormalDeriv };

std::string to_string(DataKind kind);
DataKind parse_data_kind(const std::string& text);

struct BoundaryData {
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  DataKind kind = DataKind::RobinTrace;
  TimeGrid timegrid;
  Matrix values;  // boundary node x time sample
  std::shared_ptr<const DomainGrid> grid;

  std::size_t num_boundary() const { return static_cast<std::size_t>(values.rows()); }
};

/// Relative projection residual above which an initial function is treated as
/// outside the span of the basis.
inline constexpr double kSpanTolerance = 1e-6;

/// Bytes above which synthesis prints a memory warning.
inline constexpr double kDataWarnBytes = 1e9;

/// c_l = <f, phi_l>.
Eigen::VectorXd expand(const Eigen::Ref<const Eigen::VectorXd>& f, const EigenBasis& basis);

/// sum_l c_l phi_l over all nodes; fewer coefficients than modes is allowed.
Eigen::VectorXd synthesize(const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                           const EigenBasis& basis);

/// ||f - P f||_w / ||f||_w (0 for f = 0), P the projection onto the basis span.
double span_residual(const Eigen::Ref<const Eigen::VectorXd>& f, const EigenBasis& basis);

/// Robin trace of W_R f at boundary nodes. Requires f in span(basis_r).
BoundaryData forward_robin(const Eigen::Ref<const Eigen::VectorXd>& f, const EigenBasis& basis_r,
                           const TimeGrid& tg);

/// Normal derivative of W_D f at boundary nodes. Requires f in span(basis_d).
BoundaryData forward_dirichlet(const Eigen::Ref<const Eigen::VectorXd>& f,
                               const EigenBasis& basis_d, const TimeGrid& tg);

/// W f(., t) on all nodes.
Eigen::VectorXd interior_field(const Eigen::Ref<const Eigen::VectorXd>& f,
                               const EigenBasis& basis, double t);

}  // namespace wavinv
