#pragma once
// Eigenpairs of the pencil (S, M), orthonormal in <f, g> = int f g c^{-1} dx,
// together with the boundary traces the inversion formulas consume.

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "wavinv/discrete_operator.hpp"
#include "wavinv/grid.hpp"

namespace wavinv {

enum class EigenPrecision {
  Double,
  // Dense solve in long double, rounded to double. Keeps eigenvector
  // round-off near 1e-16 so coefficients that vanish by symmetry stay tiny.
  Extended,
};

struct BasisOptions {
  EigenPrecision precision = EigenPrecision::Extended;
  double residual_tolerance = 1e-8;
  double orthonormality_tolerance = 1e-8;
};

class EigenBasis {
 public:
  const BcFlavor& bc() const { return bc_; }
  const std::shared_ptr<const DomainGrid>& grid() const { return grid_; }
  const std::shared_ptr<const SpeedField>& speed() const { return speed_; }

  std::size_t size() const { return static_cast<std::size_t>(lambda_sq_.size()); }
  const Eigen::VectorXd& lambda_sq() const { return lambda_sq_; }
  const Eigen::VectorXd& lambda() const { return lambda_; }
  double lambda_max() const { return size() == 0 ? 0.0 : lambda_[lambda_.size() - 1]; }

  /// Modes as columns over all grid nodes (Dirichlet modes zero on dOmega).
  const Eigen::MatrixXd& modes() const { return modes_; }
  auto mode(std::size_t i) const { return modes_.col(static_cast<Eigen::Index>(i)); }

  /// Boundary values phi(b) and normal derivatives d_nu phi(b), boundary node x mode.
  const Eigen::MatrixXd& boundary_trace() const { return trace_; }
  const Eigen::MatrixXd& normal_trace() const { return normal_trace_; }

  /// Largest |<phi_i, phi_j> - delta_ij| and largest relative eigen-residual
  /// ||S phi - lambda^2 M phi|| / (lambda^2 ||M phi||), measured at construction.
  double orthonormality_error() const { return orthonormality_error_; }
  double max_residual() const { return max_residual_; }

 private:
  friend EigenBasis compute_basis(const DiscreteOperator&, std::size_t, const BasisOptions&);
  EigenBasis(BcFlavor bc) : bc_(bc) {}

  BcFlavor bc_;
  std::shared_ptr<const DomainGrid> grid_;
  std::shared_ptr<const SpeedField> speed_;
  Eigen::VectorXd lambda_sq_;
  Eigen::VectorXd lambda_;
  Eigen::MatrixXd modes_;
  Eigen::MatrixXd trace_;
  Eigen::MatrixXd normal_trace_;
  double orthonormality_error_ = 0.0;
  double max_residual_ = 0.0;
};

/// The `num_modes` smallest eigenpairs, ascending in lambda^2, each signed so
/// that its first significant active component is positive.
EigenBasis compute_basis(const DiscreteOperator& op, std::size_t num_modes,
                         const BasisOptions& options = {});

/// sum_i f_i g_i w_i / c_i over all nodes.
double weighted_inner(const Eigen::Ref<const Eigen::VectorXd>& f,
                      const Eigen::Ref<const Eigen::VectorXd>& g, const DomainGrid& grid,
                      const SpeedField& speed);

/// One-sided second-order normal derivative at every boundary node:
/// (3 phi_0 - 4 phi_1 + phi_2) / (2h) along the inward node line.
Eigen::VectorXd normal_derivative_trace(const Eigen::Ref<const Eigen::VectorXd>& phi,
                                        const DomainGrid& grid);

/// G_lk = <phi_l^R, phi_k^D>.
Eigen::MatrixXd cross_gram(const EigenBasis& robin, const EigenBasis& dirichlet);

/// P_lk = sum_b sigma_b phi_l^R(b) d_nu phi_k^D(b), the boundary side of the
/// Green identity (lambda_R,l^2 - lambda_D,k^2) G_lk = P_lk.
Eigen::MatrixXd boundary_pairing(const EigenBasis& robin, const EigenBasis& dirichlet);

/// Writes <dir>/<stem>.json and <dir>/<stem>_modes.csv (one mode per column).
void write_basis(const EigenBasis& basis, const std::filesystem::path& dir,
                 const std::string& stem);

}  // namespace wavinv
