#include "wavinv/eigenbasis.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "wavinv/error.hpp"
#include "wavinv/format.hpp"
#include "wavinv/kernels.hpp"

namespace wavinv {
namespace {

template <class Scalar>
void solve_symmetric(const DiscreteOperator& op, std::size_t count, Eigen::VectorXd& values,
                     Eigen::MatrixXd& vectors) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto n = static_cast<Eigen::Index>(op.size());

  // M^{-1/2} S M^{-1/2} y = lambda^2 y with phi = M^{-1/2} y; M-orthonormal phi
  // follow from orthonormal y.
  Vector scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    scale[i] = Scalar(1) / std::sqrt(static_cast<Scalar>(op.mass()[i]));
  }
  Matrix a = Matrix::Zero(n, n);
  const auto& s = op.stiffness();
  for (int k = 0; k < s.outerSize(); ++k) {
    for (DiscreteOperator::SparseMatrix::InnerIterator it(s, k); it; ++it) {
      a(it.row(), it.col()) = scale[it.row()] * static_cast<Scalar>(it.value()) * scale[it.col()];
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("compute_basis: dense eigensolver did not converge for the " +
                           op.bc().name() + " pencil");
  }
  const auto m = static_cast<Eigen::Index>(count);
  values = solver.eigenvalues().head(m).template cast<double>();
  const Matrix phi = scale.asDiagonal() * solver.eigenvectors().leftCols(m);
  vectors = phi.template cast<double>();
}

}  // namespace

EigenBasis compute_basis(const DiscreteOperator& op, std::size_t num_modes,
                         const BasisOptions& options) {
  require(num_modes >= 1 && num_modes <= op.size(),
          "compute_basis: num_modes must be in [1, " + std::to_string(op.size()) + "], got " +
              std::to_string(num_modes));
  EigenBasis basis(op.bc());
  basis.grid_ = op.grid();
  basis.speed_ = op.speed();

  Eigen::VectorXd values;
  Eigen::MatrixXd active_modes;
  if (options.precision == EigenPrecision::Extended) {
    solve_symmetric<long double>(op, num_modes, values, active_modes);
  } else {
    solve_symmetric<double>(op, num_modes, values, active_modes);
  }

  const auto m = static_cast<Eigen::Index>(num_modes);
  for (Eigen::Index k = 0; k < m; ++k) {
    if (!(values[k] > 0.0)) {
      throw NumericalFailure("compute_basis: mode " + std::to_string(k + 1) +
                             " has non-positive eigenvalue " + format_double(values[k]));
    }
    auto col = active_modes.col(k);
    const double peak = col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (op.grid()->is_boundary(op.active_nodes()[static_cast<std::size_t>(i)])) continue;
      if (std::abs(col[i]) > 1e-8 * peak) {
        if (col[i] < 0.0) col = -col;
        break;
      }
    }
  }

  // Invariant checks on the rounded double-precision basis.
  const Eigen::VectorXd& mass = op.mass();
  double max_residual = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::VectorXd phi = active_modes.col(k);
    const Eigen::VectorXd mphi = mass.cwiseProduct(phi);
    const double residual =
        (op.stiffness() * phi - values[k] * mphi).norm() / (values[k] * mphi.norm());
    if (!(residual <= options.residual_tolerance)) {
      throw NumericalFailure("compute_basis: " + op.bc().name() + " mode " +
                             std::to_string(k + 1) + " eigen-residual " +
                             format_double(residual) + " exceeds " +
                             format_double(options.residual_tolerance));
    }
    max_residual = std::max(max_residual, residual);
  }
  const Eigen::MatrixXd gram = active_modes.transpose() * mass.asDiagonal() * active_modes;
  const double ortho = (gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
  if (!(ortho <= options.orthonormality_tolerance)) {
    throw NumericalFailure("compute_basis: " + op.bc().name() +
                           " basis orthonormality deviation " + format_double(ortho));
  }

  basis.lambda_sq_ = values;
  basis.lambda_ = values.cwiseSqrt();
  basis.max_residual_ = max_residual;
  basis.orthonormality_error_ = ortho;

  const auto& grid = *op.grid();
  basis.modes_.resize(static_cast<Eigen::Index>(grid.num_nodes()), m);
  for (Eigen::Index k = 0; k < m; ++k) basis.modes_.col(k) = op.extend(active_modes.col(k));

  const auto& bd = grid.boundary();
  const auto nb = static_cast<Eigen::Index>(bd.size());
  basis.trace_.resize(nb, m);
  basis.normal_trace_.resize(nb, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index b = 0; b < nb; ++b) {
      basis.trace_(b, k) = basis.modes_(static_cast<Eigen::Index>(bd.node_ids[static_cast<std::size_t>(b)]), k);
    }
    basis.normal_trace_.col(k) = normal_derivative_trace(basis.modes_.col(k), grid);
  }
  return basis;
}

double weighted_inner(const Eigen::Ref<const Eigen::VectorXd>& f,
                      const Eigen::Ref<const Eigen::VectorXd>& g, const DomainGrid& grid,
                      const SpeedField& speed) {
  const auto n = static_cast<Eigen::Index>(grid.num_nodes());
  require(f.size() == n && g.size() == n,
          "weighted_inner: expected " + std::to_string(n) + " nodal values, got " +
              std::to_string(f.size()) + " and " + std::to_string(g.size()));
  require(speed.grid().get() == &grid, "weighted_inner: speed field belongs to another grid");
  const auto& w = speed.weighted_volume();
  const auto size = static_cast<std::size_t>(n);
  return kernels::dot3({f.data(), size}, {g.data(), size}, {w.data(), size});
}

Eigen::VectorXd normal_derivative_trace(const Eigen::Ref<const Eigen::VectorXd>& phi,
                                        const DomainGrid& grid) {
  require(static_cast<std::size_t>(phi.size()) == grid.num_nodes(),
          "normal_derivative_trace: expected " + std::to_string(grid.num_nodes()) +
              " nodal values, got " + std::to_string(phi.size()));
  for (std::size_t axis = 0; axis < static_cast<std::size_t>(grid.dim()); ++axis) {
    require(grid.cells()[axis] >= 2,
            "normal_derivative_trace: need at least 3 nodes along each normal line");
  }
  const auto& bd = grid.boundary();
  Eigen::VectorXd out(static_cast<Eigen::Index>(bd.size()));
  for (std::size_t b = 0; b < bd.size(); ++b) {
    const auto i0 = static_cast<std::ptrdiff_t>(bd.node_ids[b]);
    const auto step = bd.inward_step[b];
    const double p0 = phi[i0];
    const double p1 = phi[i0 + step];
    const double p2 = phi[i0 + 2 * step];
    out[static_cast<Eigen::Index>(b)] = (3.0 * p0 - 4.0 * p1 + p2) / (2.0 * bd.normal_spacing[b]);
  }
  return out;
}

namespace {

void require_pair(const EigenBasis& robin, const EigenBasis& dirichlet, const char* what) {
  require(robin.bc().is_robin(), std::string(what) + ": first basis must be Robin");
  require(dirichlet.bc().kind() == BcKind::Dirichlet,
          std::string(what) + ": second basis must be Dirichlet");
  require(robin.grid() == dirichlet.grid() && robin.speed() == dirichlet.speed(),
          std::string(what) + ": bases were computed on different grids or speed fields");
}

}  // namespace

Eigen::MatrixXd cross_gram(const EigenBasis& robin, const EigenBasis& dirichlet) {
  require_pair(robin, dirichlet, "cross_gram");
  const auto rows = static_cast<Eigen::Index>(robin.size());
  const auto cols = static_cast<Eigen::Index>(dirichlet.size());
  Eigen::MatrixXd gram(rows, cols);
  for (Eigen::Index l = 0; l < rows; ++l) {
    for (Eigen::Index k = 0; k < cols; ++k) {
      gram(l, k) = weighted_inner(robin.modes().col(l), dirichlet.modes().col(k), *robin.grid(),
                                  *robin.speed());
    }
  }
  return gram;
}

Eigen::MatrixXd boundary_pairing(const EigenBasis& robin, const EigenBasis& dirichlet) {
  require_pair(robin, dirichlet, "boundary_pairing");
  const auto& sigma = robin.grid()->boundary().surface_weights;
  const auto nb = sigma.size();
  const auto rows = static_cast<Eigen::Index>(robin.size());
  const auto cols = static_cast<Eigen::Index>(dirichlet.size());
  Eigen::MatrixXd pairing(rows, cols);
  for (Eigen::Index l = 0; l < rows; ++l) {
    const Eigen::VectorXd trace = robin.boundary_trace().col(l);
    for (Eigen::Index k = 0; k < cols; ++k) {
      const Eigen::VectorXd dnu = dirichlet.normal_trace().col(k);
      pairing(l, k) = kernels::dot3({sigma.data(), nb}, {trace.data(), nb}, {dnu.data(), nb});
    }
  }
  return pairing;
}

}  // namespace wavinv
