#pragma once
// Recovery of expansion coefficients from boundary data through Abel-damped
// time integrals:
//   Robin trace  -> <f, phi_k^D> = -1/lambda_D,k  lim_{eps->0} int_0^inf int_dOmega
//                   e^{-eps t} W_R f  d_nu phi_k^D  sin(lambda_D,k t) dsigma dt
//   Dirichlet normal derivative -> <f, phi_l^R> = +1/lambda_R,l  lim_{eps->0} ...
// The eps -> 0 limit is taken by polynomial extrapolation in eps^2.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wavinv/eigenbasis.hpp"
#include "wavinv/forward.hpp"

namespace wavinv {

struct DampingSchedule {
  std::vector<double> eps{0.4, 0.2, 0.1, 0.05};
  double tail_cut = 1e-10;
  std::size_t degree = 3;

  /// Throws InvalidInput unless eps is positive and strictly decreasing,
  /// tail_cut is in (0, 1e-6] and degree < eps.size().
  void validate() const;

  /// T(eps) = ln(1/tail_cut) / eps: e^{-eps T} = tail_cut.
  double horizon(double e) const;
  /// Horizon of the smallest eps.
  double max_horizon() const;
};

struct EpsSample {
  double eps = 0.0;
  double value = 0.0;
};

/// Closed form of int_0^inf e^{-eps t} sin(a t) cos(b t) dt.
double bateman_kernel(double a, double b, double eps);

/// Composite Simpson approximation of int_0^{T(eps)} e^{-eps t} g(t) sin(lam t) dt
/// for samples g(t_j) on `tg`. T(eps) is rounded up to an even number of steps.
double damped_time_integral(std::span<const double> series, double lam, double eps,
                            const TimeGrid& tg, double tail_cut);

/// Value at eps = 0 of the least-squares polynomial of the given degree in
/// eps^2 (interpolation when degree == pairs - 1, the default).
double extrapolate_to_zero(std::span<const EpsSample> pairs,
                           std::optional<std::size_t> degree = std::nullopt);

inline constexpr double kRelErrFloor = 1e-12;

struct ModeCoefficient {
  std::size_t index = 0;  // 1-based mode number in the target basis
  double lambda = 0.0;
  double coeff = 0.0;
  std::vector<EpsSample> per_eps;
  std::optional<double> ref;
  std::optional<double> rel_err;
};

struct CoefficientReport {
  BcKind target_bc = BcKind::Dirichlet;
  DataKind source = DataKind::RobinTrace;
  std::vector<ModeCoefficient> modes;
  DampingSchedule schedule;

  Eigen::VectorXd coeffs() const;
  /// Sets ref and rel_err = |coeff - ref| / max(|ref|, kRelErrFloor) per mode.
  void attach_reference(const Eigen::Ref<const Eigen::VectorXd>& reference);
  /// Largest rel_err; requires a reference.
  double max_rel_err() const;
};

/// Robin-trace path: Robin-trace data -> coefficients against the Dirichlet basis.
/// Recovers the first k_max modes (all modes of basis_d by default).
CoefficientReport robin_to_dirichlet_coeffs(const BoundaryData& data, const EigenBasis& basis_d,
                                            const DampingSchedule& sched,
                                            std::optional<std::size_t> k_max = std::nullopt);

/// Normal-derivative path: Dirichlet normal-derivative data -> coefficients against the
/// Robin basis.
CoefficientReport dirichlet_to_robin_coeffs(const BoundaryData& data, const EigenBasis& basis_r,
                                            const DampingSchedule& sched,
                                            std::optional<std::size_t> k_max = std::nullopt);

/// |lambda_R^2 - lambda_D^2| below which the Green-identity quotient is
/// replaced by the directly computed inner product.
inline constexpr double kResonanceThreshold = 1e-8;

struct OracleResult {
  Eigen::VectorXd coeffs;
  std::size_t resonant_pairs = 0;
};

/// Quadrature-free limit of the inversion for synthetic data whose modal
/// decomposition `source_coeffs` against `source` is known: every damped
/// integral is replaced by its exact eps -> 0 limit, so coefficient k is
///   sum_l c_l P_lk / (lambda_R,l^2 - lambda_D,k^2)
/// with P the boundary pairing. Works in both directions (Robin source ->
/// Dirichlet target and the reverse).
OracleResult analytic_limit_oracle(const Eigen::Ref<const Eigen::VectorXd>& source_coeffs,
                                   const EigenBasis& source, const EigenBasis& target,
                                   std::optional<std::size_t> k_max = std::nullopt);

/// sum_k coeff_k phi_k over the target basis of the report.
Eigen::VectorXd reconstruct(const CoefficientReport& report, const EigenBasis& basis);

namespace detail {
// Shared quadrature path. `prefactor_sign` is -1 for the Robin-trace formula
// and +1 for the Dirichlet one; exposed so tests can flip it.
CoefficientReport invert_coefficients(const BoundaryData& data, const EigenBasis& target,
                                      const DampingSchedule& sched, double prefactor_sign,
                                      std::optional<std::size_t> k_max);

// Simpson weights times e^{-eps t_j} for j = 0..N, N even, t_N >= T(eps).
std::vector<double> damped_simpson_weights(double eps, const TimeGrid& tg, double tail_cut);
}  // namespace detail

}  // namespace wavinv
