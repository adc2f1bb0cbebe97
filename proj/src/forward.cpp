#include "wavinv/forward.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <vector>

#include "wavinv/error.hpp"
#include "wavinv/format.hpp"
#include "wavinv/kernels.hpp"
#include "wavinv/parallel.hpp"

namespace wavinv {

TimeGrid TimeGrid::make(double dt, std::size_t n_steps) {
  require(std::isfinite(dt) && dt > 0.0, "TimeGrid: dt must be > 0, got " + format_double(dt));
  require(n_steps >= 2, "TimeGrid: need at least 2 steps");
  return TimeGrid{dt, n_steps};
}

double TimeGrid::max_dt(double lambda_max, double samples_per_period) {
  require(lambda_max > 0.0, "TimeGrid: lambda_max must be > 0");
  require(samples_per_period >= 20.0, "TimeGrid: need at least 20 samples per period, got " +
                                          format_double(samples_per_period));
  return 2.0 * std::numbers::pi / (samples_per_period * lambda_max);
}

TimeGrid TimeGrid::resolving(double lambda_max, double horizon, double samples_per_period) {
  require(std::isfinite(horizon) && horizon > 0.0, "TimeGrid: horizon must be > 0");
  const double dt = max_dt(lambda_max, samples_per_period);
  auto steps = static_cast<std::size_t>(std::ceil(horizon / dt));
  steps += steps % 2;
  return make(dt, std::max<std::size_t>(steps, 2));
}

void TimeGrid::check_resolves(double lambda_max) const {
  const double limit = max_dt(lambda_max);
  // Relative slack so a grid built by resolving() at exactly 20 samples passes.
  require(dt <= limit * (1.0 + 1e-12),
          "TimeGrid: dt = " + format_double(dt) + " under-resolves lambda = " +
              format_double(lambda_max) + " (need dt <= " + format_double(limit) + ")");
}

std::string to_string(DataKind kind) {
  return kind == DataKind::RobinTrace ? "robin_trace" : "dirichlet_normal_derivative";
}

DataKind parse_data_kind(const std::string& text) {
  if (text == "robin_trace") return DataKind::RobinTrace;
  if (text == "dirichlet_normal_derivative") return DataKind::DirichletNormalDeriv;
  throw InvalidInput("unknown boundary data kind '" + text + "'");
}

Eigen::VectorXd expand(const Eigen::Ref<const Eigen::VectorXd>& f, const EigenBasis& basis) {
  require(static_cast<std::size_t>(f.size()) == basis.grid()->num_nodes(),
          "expand: expected " + std::to_string(basis.grid()->num_nodes()) +
              " nodal values, got " + std::to_string(f.size()));
  Eigen::VectorXd coeffs(static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index l = 0; l < coeffs.size(); ++l) {
    coeffs[l] = weighted_inner(f, basis.modes().col(l), *basis.grid(), *basis.speed());
  }
  return coeffs;
}

Eigen::VectorXd synthesize(const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                           const EigenBasis& basis) {
  require(static_cast<std::size_t>(coeffs.size()) <= basis.size(),
          "synthesize: " + std::to_string(coeffs.size()) + " coefficients for a basis of " +
              std::to_string(basis.size()) + " modes");
  const auto n = basis.grid()->num_nodes();
  Eigen::VectorXd field = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (Eigen::Index l = 0; l < coeffs.size(); ++l) {
    kernels::axpy(coeffs[l], {basis.modes().col(l).data(), n}, {field.data(), n});
  }
  return field;
}

double span_residual(const Eigen::Ref<const Eigen::VectorXd>& f, const EigenBasis& basis) {
  const auto& grid = *basis.grid();
  const auto& speed = *basis.speed();
  const double norm_sq = weighted_inner(f, f, grid, speed);
  if (norm_sq == 0.0) return 0.0;
  const Eigen::VectorXd residual = f - synthesize(expand(f, basis), basis);
  return std::sqrt(std::max(0.0, weighted_inner(residual, residual, grid, speed)) / norm_sq);
}

namespace {

Eigen::VectorXd checked_coefficients(const Eigen::Ref<const Eigen::VectorXd>& f,
                                     const EigenBasis& basis, const char* what) {
  const Eigen::VectorXd coeffs = expand(f, basis);
  const double residual = span_residual(f, basis);
  if (!(residual <= kSpanTolerance)) {
    throw InvalidInput(std::string(what) + ": initial function is not in the span of the " +
                       std::to_string(basis.size()) + " computed " + basis.bc().name() +
                       " modes (relative projection residual " + format_double(residual) +
                       " > " + format_double(kSpanTolerance) + ")");
  }
  return coeffs;
}

// values(b, j) = sum_l coeffs_l traces(b, l) cos(lambda_l t_j)
BoundaryData synthesize_boundary(const Eigen::VectorXd& coeffs, const Eigen::MatrixXd& traces,
                                 const EigenBasis& basis, const TimeGrid& tg, DataKind kind) {
  tg.check_resolves(basis.lambda_max());
  const std::size_t samples = tg.samples();
  const auto nb = static_cast<std::size_t>(traces.rows());
  const double bytes = 8.0 * static_cast<double>(nb) * static_cast<double>(samples);
  if (bytes > kDataWarnBytes) {
    std::clog << "warning: boundary data will occupy " << format_sig(bytes / 1e9, 3)
              << " GB (" << nb << " nodes x " << samples << " samples)\n";
  }

  const auto modes = static_cast<std::size_t>(coeffs.size());
  std::vector<std::vector<double>> cosines(modes, std::vector<double>(samples));
  parallel_for(modes, [&](std::size_t l) {
    const double lam = basis.lambda()[static_cast<Eigen::Index>(l)];
    for (std::size_t j = 0; j < samples; ++j) cosines[l][j] = std::cos(lam * tg.time(j));
  });

  BoundaryData data;
  data.kind = kind;
  data.timegrid = tg;
  data.grid = basis.grid();
  data.values = BoundaryData::Matrix::Zero(static_cast<Eigen::Index>(nb),
                                           static_cast<Eigen::Index>(samples));
  parallel_for(nb, [&](std::size_t b) {
    std::span<double> row(data.values.row(static_cast<Eigen::Index>(b)).data(), samples);
    for (std::size_t l = 0; l < modes; ++l) {
      const double amplitude = coeffs[static_cast<Eigen::Index>(l)] *
                               traces(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(l));
      if (amplitude != 0.0) kernels::axpy(amplitude, cosines[l], row);
    }
  });
  if (!data.values.allFinite()) {
    throw NumericalFailure("forward: synthesized boundary data contains non-finite values");
  }
  return data;
}

}  // namespace

BoundaryData forward_robin(const Eigen::Ref<const Eigen::VectorXd>& f, const EigenBasis& basis_r,
                           const TimeGrid& tg) {
  require(basis_r.bc().is_robin(), "forward_robin: basis must be Robin");
  const Eigen::VectorXd coeffs = checked_coefficients(f, basis_r, "forward_robin");
  return synthesize_boundary(coeffs, basis_r.boundary_trace(), basis_r, tg, DataKind::RobinTrace);
}

BoundaryData forward_dirichlet(const Eigen::Ref<const Eigen::VectorXd>& f,
                               const EigenBasis& basis_d, const TimeGrid& tg) {
  require(basis_d.bc().kind() == BcKind::Dirichlet, "forward_dirichlet: basis must be Dirichlet");
  const Eigen::VectorXd coeffs = checked_coefficients(f, basis_d, "forward_dirichlet");
  return synthesize_boundary(coeffs, basis_d.normal_trace(), basis_d, tg,
                             DataKind::DirichletNormalDeriv);
}

Eigen::VectorXd interior_field(const Eigen::Ref<const Eigen::VectorXd>& f,
                               const EigenBasis& basis, double t) {
  Eigen::VectorXd coeffs = checked_coefficients(f, basis, "interior_field");
  for (Eigen::Index l = 0; l < coeffs.size(); ++l) coeffs[l] *= std::cos(basis.lambda()[l] * t);
  return synthesize(coeffs, basis);
}

}  // namespace wavinv
