#include "wavinv/discrete_operator.hpp"

#include <cmath>

#include "wavinv/error.hpp"
#include "wavinv/format.hpp"

namespace wavinv {

BcFlavor BcFlavor::robin(double alpha) {
  require(std::isfinite(alpha) && alpha > 0.0,
          "Robin parameter alpha must be > 0, got " + format_double(alpha));
  return BcFlavor(BcKind::Robin, alpha);
}

std::string BcFlavor::name() const { return to_string(kind_); }

std::string to_string(BcKind kind) { return kind == BcKind::Robin ? "robin" : "dirichlet"; }

namespace {

using Triplet = Eigen::Triplet<double>;

// 1-D piecewise-linear stiffness (1/h) tridiag(-1, 2, -1) with halved ends.
void add_1d_stiffness(std::vector<Triplet>& out, std::size_t n_cells, double h, double scale,
                      auto&& node_of) {
  const double k = scale / h;
  for (std::size_t c = 0; c < n_cells; ++c) {
    const auto a = static_cast<int>(node_of(c));
    const auto b = static_cast<int>(node_of(c + 1));
    out.emplace_back(a, a, k);
    out.emplace_back(b, b, k);
    out.emplace_back(a, b, -k);
    out.emplace_back(b, a, -k);
  }
}

}  // namespace

DiscreteOperator assemble(std::shared_ptr<const DomainGrid> grid,
                          std::shared_ptr<const SpeedField> speed, BcFlavor bc) {
  require(grid != nullptr && speed != nullptr, "assemble: null grid or speed");
  require(speed->grid() == grid, "assemble: speed field was sampled on a different grid");

  DiscreteOperator op(bc);
  op.grid_ = grid;
  op.speed_ = speed;

  const std::size_t n = grid->num_nodes();
  std::vector<Triplet> triplets;
  triplets.reserve(10 * n);

  if (grid->kind() == DomainKind::Interval) {
    add_1d_stiffness(triplets, grid->cells()[0], grid->spacing()[0], 1.0,
                     [](std::size_t i) { return i; });
  } else {
    // Q1 gradient form under nodal quadrature: Kx (x) Wy + Wx (x) Ky, the
    // 5-point stencil.
    const auto [nx, ny] = grid->cells();
    const auto [hx, hy] = grid->spacing();
    for (std::size_t j = 0; j <= ny; ++j) {
      const double wy = (j == 0 || j == ny) ? 0.5 * hy : hy;
      add_1d_stiffness(triplets, nx, hx, wy, [&](std::size_t i) { return grid->index(i, j); });
    }
    for (std::size_t i = 0; i <= nx; ++i) {
      const double wx = (i == 0 || i == nx) ? 0.5 * hx : hx;
      add_1d_stiffness(triplets, ny, hy, wx, [&](std::size_t j) { return grid->index(i, j); });
    }
  }
  if (bc.is_robin()) {
    const auto& bd = grid->boundary();
    for (std::size_t b = 0; b < bd.size(); ++b) {
      const auto id = static_cast<int>(bd.node_ids[b]);
      triplets.emplace_back(id, id, bd.surface_weights[b] / bc.alpha());
    }
  }
  DiscreteOperator::SparseMatrix full(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  full.setFromTriplets(triplets.begin(), triplets.end());

  if (bc.is_robin()) {
    op.active_.resize(n);
    for (std::size_t i = 0; i < n; ++i) op.active_[i] = i;
    op.stiffness_ = std::move(full);
  } else {
    op.active_ = grid->interior_nodes();
    std::vector<std::ptrdiff_t> slot(n, -1);
    for (std::size_t a = 0; a < op.active_.size(); ++a) slot[op.active_[a]] = static_cast<std::ptrdiff_t>(a);
    std::vector<Triplet> restricted;
    restricted.reserve(triplets.size());
    for (int k = 0; k < full.outerSize(); ++k) {
      for (DiscreteOperator::SparseMatrix::InnerIterator it(full, k); it; ++it) {
        const auto r = slot[static_cast<std::size_t>(it.row())];
        const auto c = slot[static_cast<std::size_t>(it.col())];
        if (r >= 0 && c >= 0) restricted.emplace_back(static_cast<int>(r), static_cast<int>(c), it.value());
      }
    }
    const auto m = static_cast<Eigen::Index>(op.active_.size());
    op.stiffness_.resize(m, m);
    op.stiffness_.setFromTriplets(restricted.begin(), restricted.end());
  }
  op.stiffness_.makeCompressed();

  const auto& wc = speed->weighted_volume();
  op.mass_.resize(static_cast<Eigen::Index>(op.active_.size()));
  for (std::size_t a = 0; a < op.active_.size(); ++a) {
    op.mass_[static_cast<Eigen::Index>(a)] = wc[static_cast<Eigen::Index>(op.active_[a])];
  }

  auto factorization = std::make_shared<DiscreteOperator::Factorization>(op.stiffness_);
  if (factorization->info() != Eigen::Success) {
    throw NumericalFailure("assemble: LDL^T factorization of the " + bc.name() +
                           " stiffness failed");
  }
  const Eigen::VectorXd pivots = factorization->vectorD().cwiseAbs();
  const double smallest = pivots.minCoeff();
  op.condition_estimate_ = smallest > 0.0 ? pivots.maxCoeff() / smallest : INFINITY;
  if (!(op.condition_estimate_ <= kMaxConditionEstimate)) {
    throw NumericalFailure("assemble: " + bc.name() + " stiffness is singular or ill-conditioned "
                           "(pivot ratio " + format_double(op.condition_estimate_) + ")");
  }
  op.factorization_ = std::move(factorization);
  return op;
}

Eigen::VectorXd DiscreteOperator::apply(const Eigen::VectorXd& field) const {
  require(static_cast<std::size_t>(field.size()) == size(),
          "apply: field has " + std::to_string(field.size()) + " entries, operator has " +
              std::to_string(size()) + " unknowns");
  return (stiffness_ * field).cwiseQuotient(mass_);
}

Eigen::VectorXd DiscreteOperator::solve_elliptic(const Eigen::VectorXd& f) const {
  require(static_cast<std::size_t>(f.size()) == size(),
          "solve_elliptic: right-hand side has " + std::to_string(f.size()) +
              " entries, operator has " + std::to_string(size()) + " unknowns");
  const Eigen::VectorXd load = mass_.cwiseProduct(f);
  Eigen::VectorXd u = factorization_->solve(load);
  if (factorization_->info() != Eigen::Success || !u.allFinite()) {
    throw NumericalFailure("solve_elliptic: back-substitution failed");
  }
  return u;
}

Eigen::VectorXd DiscreteOperator::extend(const Eigen::VectorXd& active) const {
  require(static_cast<std::size_t>(active.size()) == size(), "extend: dimension mismatch");
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid_->num_nodes()));
  for (std::size_t a = 0; a < active_.size(); ++a) {
    full[static_cast<Eigen::Index>(active_[a])] = active[static_cast<Eigen::Index>(a)];
  }
  return full;
}

Eigen::VectorXd DiscreteOperator::restrict_to_active(const Eigen::VectorXd& full) const {
  require(static_cast<std::size_t>(full.size()) == grid_->num_nodes(),
          "restrict_to_active: dimension mismatch");
  Eigen::VectorXd active(static_cast<Eigen::Index>(active_.size()));
  for (std::size_t a = 0; a < active_.size(); ++a) {
    active[static_cast<Eigen::Index>(a)] = full[static_cast<Eigen::Index>(active_[a])];
  }
  return active;
}

}  // namespace wavinv
