#pragma once
// Discrete -c(x) Laplacian as the symmetric pencil (S, M):
//   S_ij = B(e_i, e_j) = int grad e_i . grad e_j dx  [+ (1/alpha) int_dOmega e_i e_j dsigma]
//   M_ii = w_i / c_i
// with nodal (trapezoid) quadrature throughout. Dirichlet conditions are
// imposed by restricting to interior nodes.

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "wavinv/grid.hpp"

namespace wavinv {

enum class BcKind { Robin, Dirichlet };

class BcFlavor {
 public:
  static BcFlavor robin(double alpha);
  static BcFlavor dirichlet() { return BcFlavor(BcKind::Dirichlet, 0.0); }

  BcKind kind() const { return kind_; }
  bool is_robin() const { return kind_ == BcKind::Robin; }
  /// Robin parameter; zero for Dirichlet.
  double alpha() const { return alpha_; }
  std::string name() const;

  bool operator==(const BcFlavor&) const = default;

 private:
  BcFlavor(BcKind kind, double alpha) : kind_(kind), alpha_(alpha) {}
  BcKind kind_;
  double alpha_;
};

std::string to_string(BcKind kind);

class DiscreteOperator {
 public:
  using SparseMatrix = Eigen::SparseMatrix<double>;
  using Factorization = Eigen::SimplicialLDLT<SparseMatrix>;

  const std::shared_ptr<const DomainGrid>& grid() const { return grid_; }
  const std::shared_ptr<const SpeedField>& speed() const { return speed_; }
  const BcFlavor& bc() const { return bc_; }

  /// Node ids of the active unknowns (all nodes for Robin, interior for Dirichlet).
  const std::vector<std::size_t>& active_nodes() const { return active_; }
  std::size_t size() const { return active_.size(); }

  const SparseMatrix& stiffness() const { return stiffness_; }
  const Eigen::VectorXd& mass() const { return mass_; }

  /// Ratio of extreme pivots of the LDL^T factorization; a cheap lower bound
  /// on cond(S).
  double condition_estimate() const { return condition_estimate_; }

  /// M^{-1} S field, i.e. the discrete -c Laplacian on active unknowns.
  Eigen::VectorXd apply(const Eigen::VectorXd& field) const;

  /// Discrete T: solves S u = M f.
  Eigen::VectorXd solve_elliptic(const Eigen::VectorXd& f) const;

  /// Active-set vector -> full nodal vector (zeros on eliminated nodes).
  Eigen::VectorXd extend(const Eigen::VectorXd& active) const;
  /// Full nodal vector -> active-set vector.
  Eigen::VectorXd restrict_to_active(const Eigen::VectorXd& full) const;

 private:
  friend DiscreteOperator assemble(std::shared_ptr<const DomainGrid>,
                                   std::shared_ptr<const SpeedField>, BcFlavor);
  DiscreteOperator(BcFlavor bc) : bc_(bc) {}

  std::shared_ptr<const DomainGrid> grid_;
  std::shared_ptr<const SpeedField> speed_;
  BcFlavor bc_;
  std::vector<std::size_t> active_;
  SparseMatrix stiffness_;
  Eigen::VectorXd mass_;
  std::shared_ptr<const Factorization> factorization_;
  double condition_estimate_ = 0.0;
};

/// Pivot-ratio threshold above which assembly reports S as singular.
inline constexpr double kMaxConditionEstimate = 1e14;

DiscreteOperator assemble(std::shared_ptr<const DomainGrid> grid,
                          std::shared_ptr<const SpeedField> speed, BcFlavor bc);

}  // namespace wavinv
