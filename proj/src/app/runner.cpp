#include "wavinv/app/runner.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>

#include "wavinv/app/export.hpp"
#include "wavinv/app/metrics.hpp"
#include "wavinv/format.hpp"

namespace wavinv::app {
namespace {

// Runs `body`, mapping exceptions to exit codes tagged with the stage name.
int staged(std::ostream& err, const std::function<int(std::string&)>& body) {
  std::string stage = "setup";
  try {
    return body(stage);
  } catch (const ConfigError& e) {
    err << "error [" << stage << "]: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error [" << stage << "]: " << e.what() << '\n';
    return stage == "config" ? kConfigError : kNumericalFailure;
  }
}

const EigenBasis& basis_of(const Problem& p, BcKind kind) {
  return kind == BcKind::Robin ? *p.robin : *p.dirichlet;
}

void print_lambdas(const EigenBasis& basis, std::ostream& log) {
  log << basis.bc().name() << " eigenvalues (" << basis.size() << " modes)\n";
  log << "  mode        lambda            lambda^2\n";
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    char line[96];
    std::snprintf(line, sizeof(line), "  %4zu  %16s  %16s\n", k + 1,
                  format_sig(basis.lambda()[kk], 9).c_str(),
                  format_sig(basis.lambda_sq()[kk], 9).c_str());
    log << line;
  }
}

std::string data_file(DataKind kind) {
  return kind == DataKind::RobinTrace ? "boundary_robin.csv" : "boundary_dirichlet.csv";
}

BoundaryData forward_for(BcKind source, const Eigen::VectorXd& f, const Problem& p,
                         const TimeGrid& tg) {
  return source == BcKind::Robin ? forward_robin(f, *p.robin, tg)
                                 : forward_dirichlet(f, *p.dirichlet, tg);
}

CoefficientReport invert_for(const BoundaryData& data, const Problem& p, const RunConfig& c) {
  return data.kind == DataKind::RobinTrace
             ? robin_to_dirichlet_coeffs(data, *p.dirichlet, c.damping, c.k_max)
             : dirichlet_to_robin_coeffs(data, *p.robin, c.damping, c.k_max);
}

}  // namespace

Problem build_problem(const RunConfig& config) {
  Problem p;
  if (config.domain.kind == DomainKind::Interval) {
    p.grid = build_interval(config.domain.lx, config.domain.nx);
  } else {
    p.grid = build_rectangle(config.domain.lx, config.domain.ly, config.domain.nx,
                             config.domain.ny, config.domain.corner);
  }
  p.speed = sample_speed(p.grid, parse_speed_spec(config.speed));
  BasisOptions options;
  options.precision = config.precision;
  const auto robin_op = assemble(p.grid, p.speed, BcFlavor::robin(config.alpha));
  const auto dirichlet_op = assemble(p.grid, p.speed, BcFlavor::dirichlet());
  p.robin = compute_basis(robin_op, std::min(config.num_modes, robin_op.size()), options);
  p.dirichlet = compute_basis(dirichlet_op, std::min(config.num_modes, dirichlet_op.size()), options);
  return p;
}

Eigen::VectorXd build_phantom(const std::vector<PhantomTerm>& terms, const EigenBasis& basis) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.grid()->num_nodes()));
  for (const auto& term : terms) {
    require(term.mode >= 1 && term.mode <= basis.size(),
            "phantom mode " + std::to_string(term.mode) + " exceeds the " +
                std::to_string(basis.size()) + "-mode " + basis.bc().name() + " basis");
    f += term.amplitude * basis.modes().col(static_cast<Eigen::Index>(term.mode - 1));
  }
  return f;
}

Eigen::VectorXd phantom_field(const RunConfig& config, const Problem& problem, BcKind kind) {
  const auto& terms = kind == BcKind::Robin ? config.robin_phantom : config.dirichlet_phantom;
  const EigenBasis& basis = basis_of(problem, kind);
  std::size_t needed = 0;
  for (const auto& t : terms) needed = std::max(needed, t.mode);
  if (needed <= basis.size()) return build_phantom(terms, basis);

  const BcFlavor bc = kind == BcKind::Robin ? BcFlavor::robin(config.alpha) : BcFlavor::dirichlet();
  const auto op = assemble(problem.grid, problem.speed, bc);
  require(needed <= op.size(), "phantom mode " + std::to_string(needed) + " exceeds the " +
                                   std::to_string(op.size()) + " available unknowns");
  BasisOptions options;
  options.precision = config.precision;
  return build_phantom(terms, compute_basis(op, needed, options));
}

TimeGrid make_time_grid(const RunConfig& config, const Problem& problem) {
  const double lambda_max = std::max(problem.robin->lambda_max(), problem.dirichlet->lambda_max());
  const double horizon = config.horizon.value_or(config.damping.max_horizon());
  return TimeGrid::resolving(lambda_max, horizon, config.samples_per_period);
}

int run_eigen(const RunConfig& config, const std::filesystem::path& out, std::ostream& log,
              std::ostream& err) {
  return staged(err, [&](std::string& stage) {
    stage = "eigen";
    const Problem p = build_problem(config);
    stage = "export";
    std::filesystem::create_directories(out);
    write_basis(*p.robin, out, "basis_robin");
    write_basis(*p.dirichlet, out, "basis_dirichlet");
    print_lambdas(*p.robin, log);
    print_lambdas(*p.dirichlet, log);
    return static_cast<int>(kSuccess);
  });
}

int run_forward(const RunConfig& config, const std::filesystem::path& out, std::ostream& log,
                std::ostream& err) {
  return staged(err, [&](std::string& stage) {
    if (config.robin_phantom.empty() && config.dirichlet_phantom.empty()) {
      stage = "config";
      throw ConfigError("forward: [phantom] defines neither robin nor dirichlet terms");
    }
    stage = "eigen";
    const Problem p = build_problem(config);
    const TimeGrid tg = make_time_grid(config, p);
    for (BcKind kind : {BcKind::Robin, BcKind::Dirichlet}) {
      const auto& terms = kind == BcKind::Robin ? config.robin_phantom : config.dirichlet_phantom;
      if (terms.empty()) continue;
      stage = "phantom";
      const Eigen::VectorXd f = phantom_field(config, p, kind);
      stage = "forward";
      const BoundaryData data = forward_for(kind, f, p, tg);
      stage = "export";
      write_boundary_data(data, out / data_file(data.kind));
      log << "wrote " << (out / data_file(data.kind)).string() << " (" << data.num_boundary()
          << " boundary nodes x " << tg.samples() << " samples, dt = " << format_sig(tg.dt, 9)
          << ")\n";
    }
    return static_cast<int>(kSuccess);
  });
}

int run_invert(const RunConfig& config, const std::filesystem::path& out,
               const std::optional<std::filesystem::path>& data_path, std::ostream& log,
               std::ostream& err) {
  return staged(err, [&](std::string& stage) {
    stage = "eigen";
    const Problem p = build_problem(config);
    std::vector<std::filesystem::path> inputs;
    if (data_path) {
      inputs.push_back(*data_path);
    } else {
      for (DataKind kind : {DataKind::RobinTrace, DataKind::DirichletNormalDeriv}) {
        if (std::filesystem::exists(out / data_file(kind))) inputs.push_back(out / data_file(kind));
      }
    }
    if (inputs.empty()) {
      stage = "config";
      throw ConfigError("invert: no boundary data given (--data) or found in " + out.string());
    }
    for (const auto& path : inputs) {
      stage = "read";
      const BoundaryData data = read_boundary_data(path, p.grid);
      stage = "invert";
      CoefficientReport report = invert_for(data, p, config);
      const int theorem = data.kind == DataKind::RobinTrace ? 4 : 5;
      const EigenBasis& target = basis_of(p, report.target_bc);
      const BcKind source = data.kind == DataKind::RobinTrace ? BcKind::Robin : BcKind::Dirichlet;
      const auto& terms = source == BcKind::Robin ? config.robin_phantom : config.dirichlet_phantom;
      const Eigen::VectorXd f_rec = reconstruct(report, target);
      Eigen::VectorXd f_true = Eigen::VectorXd::Zero(f_rec.size());
      if (!terms.empty()) {
        f_true = phantom_field(config, p, source);
        report.attach_reference(expand(f_true, target));
      }
      stage = "export";
      const std::string suffix = "theorem" + std::to_string(theorem);
      write_report(report, out / ("report_" + suffix + ".json"));
      write_reconstruction(*p.grid, f_true, f_rec, out / ("reconstruction_" + suffix + ".csv"));
      log << "theorem " << theorem << ": recovered " << report.modes.size() << " "
          << to_string(report.target_bc) << " coefficients from " << path.string() << '\n';
      if (!terms.empty()) {
        log << "rel_l2_error=" << format_sig(relative_l2_error(f_true, f_rec, *p.grid, *p.speed), 9)
            << '\n';
      }
    }
    return static_cast<int>(kSuccess);
  });
}

int run_roundtrip(const RunConfig& config, const std::filesystem::path& out, Theorem theorem,
                  double max_error, std::ostream& log, std::ostream& err,
                  std::vector<TheoremOutcome>* outcomes) {
  return staged(err, [&](std::string& stage) {
    stage = "config";
    std::vector<int> theorems;
    if (theorem != Theorem::Five) theorems.push_back(4);
    if (theorem != Theorem::Four) theorems.push_back(5);
    for (int t : theorems) {
      if ((t == 4 ? config.robin_phantom : config.dirichlet_phantom).empty()) {
        throw ConfigError("roundtrip: theorem " + std::to_string(t) + " needs a [phantom] " +
                          (t == 4 ? "robin" : "dirichlet") + " entry");
      }
    }
    if (!(max_error >= 0.0)) throw ConfigError("roundtrip: max error must be >= 0");

    stage = "eigen";
    const Problem p = build_problem(config);
    const TimeGrid tg = make_time_grid(config, p);
    bool within = true;
    for (int t : theorems) {
      const BcKind source = t == 4 ? BcKind::Robin : BcKind::Dirichlet;
      stage = "phantom";
      const Eigen::VectorXd f = phantom_field(config, p, source);
      stage = "forward";
      const BoundaryData data = forward_for(source, f, p, tg);
      stage = "invert";
      CoefficientReport report = invert_for(data, p, config);
      const EigenBasis& target = basis_of(p, report.target_bc);
      report.attach_reference(expand(f, target));
      stage = "reconstruct";
      const Eigen::VectorXd f_rec = reconstruct(report, target);
      const double error = relative_l2_error(f, f_rec, *p.grid, *p.speed);

      stage = "export";
      const std::string suffix = "theorem" + std::to_string(t);
      write_boundary_data(data, out / data_file(data.kind));
      write_report(report, out / ("report_" + suffix + ".json"));
      write_reconstruction(*p.grid, f, f_rec, out / ("reconstruction_" + suffix + ".csv"));

      log << "theorem " << t << ": " << report.modes.size() << " "
          << to_string(report.target_bc) << " coefficients, max coefficient rel_err "
          << format_sig(report.max_rel_err(), 9) << '\n';
      log << "rel_l2_error=" << format_sig(error, 9) << '\n';
      if (!(error <= max_error)) {
        err << "theorem " << t << ": rel_l2_error " << format_sig(error, 9)
            << " exceeds max error " << format_sig(max_error, 9) << '\n';
        within = false;
      }
      if (outcomes) outcomes->push_back({t, std::move(report), error});
    }
    return static_cast<int>(within ? kSuccess : kToleranceExceeded);
  });
}

}  // namespace wavinv::app
