#include "wavinv/inversion.hpp"

#include <algorithm>
#include <cmath>

#include "wavinv/error.hpp"
#include "wavinv/format.hpp"
#include "wavinv/kernels.hpp"
#include "wavinv/parallel.hpp"

namespace wavinv {

void DampingSchedule::validate() const {
  require(eps.size() >= 2, "damping schedule: need at least two eps values");
  for (std::size_t j = 0; j < eps.size(); ++j) {
    require(std::isfinite(eps[j]) && eps[j] > 0.0,
            "damping schedule: eps must be positive, got " + format_double(eps[j]));
    if (j > 0) {
      require(eps[j] < eps[j - 1], "damping schedule: eps must be strictly decreasing");
    }
  }
  require(tail_cut > 0.0 && tail_cut <= 1e-6,
          "damping schedule: tail_cut must lie in (0, 1e-6], got " + format_double(tail_cut));
  require(degree < eps.size(), "damping schedule: extrapolation degree " +
                                   std::to_string(degree) + " needs more than " +
                                   std::to_string(eps.size()) + " eps values");
}

double DampingSchedule::horizon(double e) const { return std::log(1.0 / tail_cut) / e; }

double DampingSchedule::max_horizon() const {
  return horizon(*std::min_element(eps.begin(), eps.end()));
}

double bateman_kernel(double a, double b, double eps) {
  require(eps > 0.0, "bateman_kernel: eps must be > 0");
  const double sum = a + b;
  const double diff = a - b;
  const double e2 = eps * eps;
  return sum / (2.0 * (e2 + sum * sum)) + diff / (2.0 * (e2 + diff * diff));
}

namespace detail {

std::vector<double> damped_simpson_weights(double eps, const TimeGrid& tg, double tail_cut) {
  require(eps > 0.0, "damped_time_integral: eps must be > 0");
  const double horizon = std::log(1.0 / tail_cut) / eps;
  auto steps = static_cast<std::size_t>(std::ceil(horizon / tg.dt - 1e-9));
  steps += steps % 2;
  steps = std::max<std::size_t>(steps, 2);
  if (steps > tg.n_steps) {
    throw InvalidInput("damped_time_integral: eps = " + format_double(eps) + " needs " +
                       format_sig(static_cast<double>(steps) * tg.dt, 9) +
                       " time units of data, only " + format_sig(tg.duration(), 9) +
                       " available");
  }
  std::vector<double> weights(steps + 1);
  const double third = tg.dt / 3.0;
  for (std::size_t j = 0; j <= steps; ++j) {
    const double simpson = (j == 0 || j == steps) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    weights[j] = simpson * third * std::exp(-eps * tg.time(j));
  }
  return weights;
}

}  // namespace detail

double damped_time_integral(std::span<const double> series, double lam, double eps,
                            const TimeGrid& tg, double tail_cut) {
  require(series.size() == tg.samples(),
          "damped_time_integral: series has " + std::to_string(series.size()) +
              " samples, time grid has " + std::to_string(tg.samples()));
  require(tail_cut > 0.0 && tail_cut < 1.0, "damped_time_integral: tail_cut must be in (0, 1)");
  if (lam > 0.0) tg.check_resolves(lam);
  const auto weights = detail::damped_simpson_weights(eps, tg, tail_cut);
  std::vector<double> sine(weights.size());
  for (std::size_t j = 0; j < sine.size(); ++j) sine[j] = std::sin(lam * tg.time(j));
  return kernels::dot3(weights, sine, series.first(weights.size()));
}

double extrapolate_to_zero(std::span<const EpsSample> pairs, std::optional<std::size_t> degree) {
  require(pairs.size() >= 2, "extrapolate_to_zero: need at least two (eps, I) pairs");
  const std::size_t n = pairs.size();
  for (std::size_t i = 0; i < n; ++i) {
    require(std::isfinite(pairs[i].eps) && std::isfinite(pairs[i].value),
            "extrapolate_to_zero: non-finite sample");
    for (std::size_t j = 0; j < i; ++j) {
      require(pairs[i].eps * pairs[i].eps != pairs[j].eps * pairs[j].eps,
              "extrapolate_to_zero: duplicate eps values");
    }
  }
  const std::size_t d = degree.value_or(n - 1);
  require(d + 1 <= n, "extrapolate_to_zero: degree " + std::to_string(d) + " needs at least " +
                          std::to_string(d + 1) + " pairs");

  if (d + 1 == n) {
    // Neville's scheme evaluated at x = 0, x = eps^2.
    std::vector<double> x(n);
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = pairs[i].eps * pairs[i].eps;
      p[i] = pairs[i].value;
    }
    for (std::size_t level = 1; level < n; ++level) {
      for (std::size_t i = 0; i + level < n; ++i) {
        const std::size_t j = i + level;
        p[i] = (x[i] * p[i + 1] - x[j] * p[i]) / (x[i] - x[j]);
      }
    }
    return p[0];
  }

  Eigen::MatrixXd vandermonde(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d + 1));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double x = pairs[i].eps * pairs[i].eps;
    double power = 1.0;
    for (std::size_t k = 0; k <= d; ++k) {
      vandermonde(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = power;
      power *= x;
    }
    rhs[static_cast<Eigen::Index>(i)] = pairs[i].value;
  }
  const Eigen::VectorXd fit = vandermonde.colPivHouseholderQr().solve(rhs);
  return fit[0];
}

Eigen::VectorXd CoefficientReport::coeffs() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t k = 0; k < modes.size(); ++k) out[static_cast<Eigen::Index>(k)] = modes[k].coeff;
  return out;
}

void CoefficientReport::attach_reference(const Eigen::Ref<const Eigen::VectorXd>& reference) {
  require(static_cast<std::size_t>(reference.size()) >= modes.size(),
          "attach_reference: " + std::to_string(reference.size()) + " reference values for " +
              std::to_string(modes.size()) + " modes");
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const double ref = reference[static_cast<Eigen::Index>(k)];
    modes[k].ref = ref;
    modes[k].rel_err = std::abs(modes[k].coeff - ref) / std::max(std::abs(ref), kRelErrFloor);
  }
}

double CoefficientReport::max_rel_err() const {
  double worst = 0.0;
  for (const auto& m : modes) {
    require(m.rel_err.has_value(), "max_rel_err: report has no reference values");
    worst = std::max(worst, *m.rel_err);
  }
  return worst;
}

namespace detail {

CoefficientReport invert_coefficients(const BoundaryData& data, const EigenBasis& target,
                                      const DampingSchedule& sched, double prefactor_sign,
                                      std::optional<std::size_t> k_max) {
  sched.validate();
  require(data.grid == target.grid(), "inversion: boundary data and basis use different grids");
  const auto nb = data.num_boundary();
  require(nb == target.grid()->boundary().size(),
          "inversion: data has " + std::to_string(nb) + " boundary rows, grid has " +
              std::to_string(target.grid()->boundary().size()));
  require(static_cast<std::size_t>(data.values.cols()) == data.timegrid.samples(),
          "inversion: data columns do not match its time grid");
  const std::size_t count = std::min(k_max.value_or(target.size()), target.size());
  require(count >= 1, "inversion: k_max must be >= 1");

  const TimeGrid& tg = data.timegrid;
  tg.check_resolves(target.lambda()[static_cast<Eigen::Index>(count - 1)]);

  // Per-eps damped Simpson weights are shared by every mode.
  std::vector<std::vector<double>> weights(sched.eps.size());
  for (std::size_t e = 0; e < sched.eps.size(); ++e) {
    weights[e] = damped_simpson_weights(sched.eps[e], tg, sched.tail_cut);
  }
  std::size_t longest = 0;
  for (const auto& w : weights) longest = std::max(longest, w.size());

  const bool dirichlet_target = target.bc().kind() == BcKind::Dirichlet;
  const Eigen::MatrixXd& traces = dirichlet_target ? target.normal_trace() : target.boundary_trace();
  const auto& sigma = target.grid()->boundary().surface_weights;

  CoefficientReport report;
  report.target_bc = target.bc().kind();
  report.source = data.kind;
  report.schedule = sched;
  report.modes.resize(count);

  parallel_for(count, [&](std::size_t k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const double lam = target.lambda()[kk];

    // s_k(t) = sum_b sigma_b g(b, t) trace_k(b)
    std::vector<double> signal(longest, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
      const double weight = sigma[b] * traces(static_cast<Eigen::Index>(b), kk);
      if (weight == 0.0) continue;
      kernels::axpy(weight, {data.values.row(static_cast<Eigen::Index>(b)).data(), longest},
                    signal);
    }
    std::vector<double> sine(longest);
    for (std::size_t j = 0; j < longest; ++j) sine[j] = std::sin(lam * tg.time(j));

    ModeCoefficient& out = report.modes[k];
    out.index = k + 1;
    out.lambda = lam;
    out.per_eps.reserve(sched.eps.size());
    for (std::size_t e = 0; e < sched.eps.size(); ++e) {
      const std::size_t len = weights[e].size();
      const double integral = kernels::dot3(weights[e], std::span<const double>(sine).first(len),
                                            std::span<const double>(signal).first(len));
      out.per_eps.push_back({sched.eps[e], integral});
    }
    out.coeff = prefactor_sign / lam * extrapolate_to_zero(out.per_eps, sched.degree);
  });
  for (const auto& m : report.modes) {
    if (!std::isfinite(m.coeff)) {
      throw NumericalFailure("inversion: non-finite coefficient for mode " +
                             std::to_string(m.index));
    }
  }
  return report;
}

}  // namespace detail

CoefficientReport robin_to_dirichlet_coeffs(const BoundaryData& data, const EigenBasis& basis_d,
                                            const DampingSchedule& sched,
                                            std::optional<std::size_t> k_max) {
  require(data.kind == DataKind::RobinTrace,
          "robin_to_dirichlet_coeffs: expected robin_trace data, got " + to_string(data.kind));
  require(basis_d.bc().kind() == BcKind::Dirichlet,
          "robin_to_dirichlet_coeffs: target basis must be Dirichlet");
  return detail::invert_coefficients(data, basis_d, sched, -1.0, k_max);
}

CoefficientReport dirichlet_to_robin_coeffs(const BoundaryData& data, const EigenBasis& basis_r,
                                            const DampingSchedule& sched,
                                            std::optional<std::size_t> k_max) {
  require(data.kind == DataKind::DirichletNormalDeriv,
          "dirichlet_to_robin_coeffs: expected dirichlet_normal_derivative data, got " +
              to_string(data.kind));
  require(basis_r.bc().is_robin(), "dirichlet_to_robin_coeffs: target basis must be Robin");
  return detail::invert_coefficients(data, basis_r, sched, +1.0, k_max);
}

OracleResult analytic_limit_oracle(const Eigen::Ref<const Eigen::VectorXd>& source_coeffs,
                                   const EigenBasis& source, const EigenBasis& target,
                                   std::optional<std::size_t> k_max) {
  require(source.bc().kind() != target.bc().kind(),
          "analytic_limit_oracle: source and target bases must have different conditions");
  require(static_cast<std::size_t>(source_coeffs.size()) <= source.size(),
          "analytic_limit_oracle: more coefficients than source modes");
  const bool robin_source = source.bc().is_robin();
  const EigenBasis& robin = robin_source ? source : target;
  const EigenBasis& dirichlet = robin_source ? target : source;
  const Eigen::MatrixXd pairing = boundary_pairing(robin, dirichlet);  // l (Robin) x k (Dirichlet)

  const std::size_t count = std::min(k_max.value_or(target.size()), target.size());
  OracleResult result;
  result.coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count));
  for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(count); ++t) {
    double total = 0.0;
    for (Eigen::Index s = 0; s < source_coeffs.size(); ++s) {
      const double c = source_coeffs[s];
      if (c == 0.0) continue;
      const Eigen::Index l = robin_source ? s : t;
      const Eigen::Index k = robin_source ? t : s;
      const double gap = robin.lambda_sq()[l] - dirichlet.lambda_sq()[k];
      double overlap = 0.0;
      if (std::abs(gap) < kResonanceThreshold) {
        ++result.resonant_pairs;
        overlap = weighted_inner(robin.modes().col(l), dirichlet.modes().col(k), *robin.grid(),
                                 *robin.speed());
      } else {
        overlap = pairing(l, k) / gap;
      }
      total += c * overlap;
    }
    result.coeffs[t] = total;
  }
  return result;
}

Eigen::VectorXd reconstruct(const CoefficientReport& report, const EigenBasis& basis) {
  require(report.target_bc == basis.bc().kind(),
          "reconstruct: report targets the " + to_string(report.target_bc) +
              " basis, got a " + basis.bc().name() + " basis");
  require(report.modes.size() <= basis.size(), "reconstruct: report has more modes than basis");
  return synthesize(report.coeffs(), basis);
}

}  // namespace wavinv
