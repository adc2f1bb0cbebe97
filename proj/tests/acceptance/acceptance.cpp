// Acceptance checks. One PASS/FAIL line per criterion with the measured
// quantities; exit status is nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"
#include "wavinv/app/config.hpp"
#include "wavinv/app/metrics.hpp"
#include "wavinv/app/runner.hpp"
#include "wavinv/format.hpp"
#include "wavinv/forward.hpp"
#include "wavinv/inversion.hpp"

using namespace wavinv;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) { return format_sig(v, 3); }

double rel(double value, double ref) {
  return std::abs(value - ref) / std::max(std::abs(ref), kRelErrFloor);
}

// Scale-aware relative residual of the Green identity over the leading
// count x count block. Entries that vanish by symmetry are measured against
// 1e-8 max|P|.
double green_residual(const EigenBasis& r, const EigenBasis& d, std::size_t count) {
  const auto G = cross_gram(r, d);
  const auto P = boundary_pairing(r, d);
  const auto n = static_cast<Eigen::Index>(count);
  const double floor = 1e-8 * P.topLeftCorner(n, n).cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (Eigen::Index l = 0; l < n; ++l) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double lhs = (r.lambda_sq()[l] - d.lambda_sq()[k]) * G(l, k);
      worst = std::max(worst, std::abs(lhs - P(l, k)) /
                                  std::max({std::abs(lhs), std::abs(P(l, k)), floor}));
    }
  }
  return worst;
}

struct Pair {
  std::shared_ptr<const DomainGrid> grid;
  std::shared_ptr<const SpeedField> speed;
  EigenBasis robin;
  EigenBasis dirichlet;
};

Pair make_pair(std::shared_ptr<const DomainGrid> g, const SpeedSpec& speed, double alpha,
               std::size_t modes) {
  auto s = sample_speed(g, speed);
  auto r = compute_basis(assemble(g, s, BcFlavor::robin(alpha)), modes);
  auto d = compute_basis(assemble(g, s, BcFlavor::dirichlet()), modes);
  return {g, s, std::move(r), std::move(d)};
}

// Shared A1 state, built once by criterion 1 and reused afterwards.
struct A1 {
  app::RunConfig config;
  app::Problem problem;
  TimeGrid tg;
  Eigen::VectorXd f4;  // phi_1^R + 0.5 phi_3^R
  Eigen::VectorXd f5;  // phi_2^D - 0.3 phi_4^D
  BoundaryData data4;
  BoundaryData data5;
  CoefficientReport report4;
  CoefficientReport report5;
};

A1& a1() {
  static A1 state;
  return state;
}

Outcome eigen_structure() {
  auto& s = a1();
  s.config = app::load_config(std::string(WAVINV_SOURCE_DIR) + "/configs/a1.cfg");
  s.problem = app::build_problem(s.config);
  const auto& r = *s.problem.robin;
  const auto& d = *s.problem.dirichlet;
  const double gram = std::max(r.orthonormality_error(), d.orthonormality_error());
  const double res = std::max(r.max_residual(), d.max_residual());
  const double min_l2 = std::min(r.lambda_sq().minCoeff(), d.lambda_sq().minCoeff());
  return {gram <= 1e-8 && res <= 1e-8 && min_l2 > 0.0,
          "gram dev " + sci(gram) + ", eigen residual " + sci(res) + ", min lambda^2 " +
              sci(min_l2)};
}

Outcome analytic_eigenvalues() {
  auto err = [](std::size_t n) {
    auto g = build_interval(pi, n);
    auto b = compute_basis(assemble(g, sample_speed(g, ConstantSpeed{1.0}), BcFlavor::dirichlet()), 5);
    double e = 0.0;
    for (Eigen::Index k = 1; k <= 5; ++k) e = std::max(e, std::abs(b.lambda()[k - 1] - double(k)) / double(k));
    return e;
  };
  const double e400 = err(400);
  const double e800 = err(800);
  const double ratio = e400 / e800;
  return {e400 <= 1e-3 && ratio >= 3.5,
          "max rel err " + sci(e400) + " at 400 cells, halving ratio " + sci(ratio)};
}

Outcome green_identity() {
  const auto& s = a1();
  const double fine = green_residual(*s.problem.robin, *s.problem.dirichlet, 5);
  const auto coarse_pair =
      make_pair(build_interval(pi, 200), parse_speed_spec(s.config.speed), s.config.alpha, 5);
  const double coarse = green_residual(coarse_pair.robin, coarse_pair.dirichlet, 5);
  const double order = std::log2(coarse / fine);
  return {fine <= 5e-2 && order >= 1.0,
          "residual " + sci(fine) + " at 400 cells (" + sci(coarse) + " at 200), order " +
              sci(order)};
}

double limit_error(double lr, double ld, const DampingSchedule& sched) {
  std::vector<EpsSample> pairs;
  for (double e : sched.eps) pairs.push_back({e, bateman_kernel(ld, lr, e)});
  return std::abs((lr * lr - ld * ld) * extrapolate_to_zero(pairs) + ld);
}

Outcome scalar_core() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.5, 10.0);
  const DampingSchedule sched;
  double worst = 0.0, worst_scaled = 0.0, min_failing_gap = 1e300;
  int failures = 0;
  for (int i = 0; i < 50; ++i) {
    double lr = u(rng), ld = u(rng);
    while (lr == ld) ld = u(rng);
    const double e = limit_error(lr, ld, sched);
    worst = std::max(worst, e);
    if (e > 1e-6) {
      ++failures;
      min_failing_gap = std::min(min_failing_gap, std::abs(lr - ld));
    }
    // Diagnostic only: eps rescaled below the frequency gap.
    DampingSchedule scaled = sched;
    for (auto& x : scaled.eps) x *= std::min(1.0, std::abs(lr - ld) / 2.0);
    worst_scaled = std::max(worst_scaled, limit_error(lr, ld, scaled));
  }
  std::string detail = "default schedule: worst |err| " + sci(worst) + ", " +
                       std::to_string(failures) + "/50 pairs above 1e-6";
  if (failures > 0) detail += " (smallest failing gap " + sci(min_failing_gap) + ")";
  detail += "; gap-scaled eps diagnostic worst " + sci(worst_scaled);
  return {failures == 0, detail};
}

Outcome roundtrip(int theorem) {
  auto& s = a1();
  const auto& p = s.problem;
  if (s.tg.n_steps == 0) s.tg = app::make_time_grid(s.config, p);
  const bool four = theorem == 4;
  const EigenBasis& source = four ? *p.robin : *p.dirichlet;
  const EigenBasis& target = four ? *p.dirichlet : *p.robin;
  Eigen::VectorXd f = four ? Eigen::VectorXd(source.mode(0) + 0.5 * source.mode(2))
                           : Eigen::VectorXd(source.mode(1) - 0.3 * source.mode(3));
  BoundaryData data = four ? forward_robin(f, source, s.tg) : forward_dirichlet(f, source, s.tg);
  CoefficientReport report = four ? robin_to_dirichlet_coeffs(data, target, s.config.damping)
                                  : dirichlet_to_robin_coeffs(data, target, s.config.damping);
  const Eigen::VectorXd exact = expand(f, target);
  report.attach_reference(exact);
  const double coeff_err = report.max_rel_err();
  const double l2 = app::relative_l2_error(f, reconstruct(report, target), *p.grid, *p.speed);
  // Best achievable reconstruction with exact coefficients in the target basis.
  const double floor_err = app::relative_l2_error(f, synthesize(exact, target), *p.grid, *p.speed);
  (four ? s.f4 : s.f5) = f;
  (four ? s.data4 : s.data5) = data;
  (four ? s.report4 : s.report5) = report;
  return {coeff_err <= 5e-2 && l2 <= 5e-2,
          "max coeff rel err " + sci(coeff_err) + ", rel_l2_error " + sci(l2) +
              " (exact-coefficient truncation floor " + sci(floor_err) + ")"};
}

Outcome oracle_agreement() {
  const auto& s = a1();
  const auto& p = s.problem;
  double worst = 0.0;
  const auto o4 = analytic_limit_oracle(expand(s.f4, *p.robin), *p.robin, *p.dirichlet);
  const auto o5 = analytic_limit_oracle(expand(s.f5, *p.dirichlet), *p.dirichlet, *p.robin);
  const Eigen::VectorXd q4 = s.report4.coeffs();
  const Eigen::VectorXd q5 = s.report5.coeffs();
  for (Eigen::Index k = 0; k < q4.size(); ++k) worst = std::max(worst, rel(q4[k], o4.coeffs[k]));
  for (Eigen::Index k = 0; k < q5.size(); ++k) worst = std::max(worst, rel(q5[k], o5.coeffs[k]));
  return {worst <= 2e-2, "max rel deviation " + sci(worst) + " over " +
                             std::to_string(q4.size() + q5.size()) + " coefficients"};
}

Outcome bateman_utility() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng), e = u(rng);
    worst = std::max(worst, std::abs(bateman_kernel(a, b, e) - oracle::damped_sin_cos_quadrature(a, b, e)));
  }
  return {worst <= 1e-6, "max |closed form - quadrature| " + sci(worst)};
}

Outcome elliptic_suite() {
  const auto& s = a1();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  double id_err = 0.0, adj_err = 0.0;
  for (const auto& bc : {BcFlavor::robin(s.config.alpha), BcFlavor::dirichlet()}) {
    const auto op = assemble(s.problem.grid, s.problem.speed, bc);
    const auto n = static_cast<Eigen::Index>(op.size());
    const auto& M = op.mass();
    for (int t = 0; t < 20; ++t) {
      Eigen::VectorXd u(n), v(n);
      for (auto& x : u) x = nd(rng);
      for (auto& x : v) x = nd(rng);
      id_err = std::max(id_err, (op.solve_elliptic(op.apply(u)) - u).norm() / u.norm());
      const double lhs = op.solve_elliptic(u).dot(M.asDiagonal() * v);
      const double rhs = u.dot(M.asDiagonal() * op.solve_elliptic(v));
      adj_err = std::max(adj_err, std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)));
    }
  }
  return {id_err <= 1e-9 && adj_err <= 1e-10,
          "solve(apply(u)) rel err " + sci(id_err) + ", weighted self-adjointness " + sci(adj_err)};
}

Outcome square_smoke() {
  const auto cfg = app::load_config(std::string(WAVINV_SOURCE_DIR) + "/configs/square.cfg");
  const auto p = app::build_problem(cfg);
  const auto& r = *p.robin;
  const auto& d = *p.dirichlet;
  const double gram = std::max(r.orthonormality_error(), d.orthonormality_error());
  const double lemma = green_residual(r, d, 3);
  const auto tg = app::make_time_grid(cfg, p);
  const Eigen::VectorXd f = r.mode(0);
  auto report = robin_to_dirichlet_coeffs(forward_robin(f, r, tg), d, cfg.damping);
  report.attach_reference(expand(f, d));
  const double coeff = report.max_rel_err();
  return {gram <= 1e-8 && lemma <= 1e-1 && coeff <= 1e-1,
          "gram dev " + sci(gram) + ", green residual (l,k<=3) " + sci(lemma) +
              ", single-mode coeff rel err " + sci(coeff)};
}

Outcome sign_guard() {
  const auto& s = a1();
  const auto& p = s.problem;
  double min_ratio = 1e300;
  std::string parts;
  for (int theorem : {4, 5}) {
    const bool four = theorem == 4;
    const BoundaryData& data = four ? s.data4 : s.data5;
    const EigenBasis& target = four ? *p.dirichlet : *p.robin;
    const Eigen::VectorXd exact = expand(four ? s.f4 : s.f5, target);
    const double sign = four ? -1.0 : 1.0;
    auto flipped = detail::invert_coefficients(data, target, s.config.damping, -sign, std::nullopt);
    flipped.attach_reference(exact);
    const CoefficientReport& good = four ? s.report4 : s.report5;
    const double ratio = flipped.max_rel_err() / good.max_rel_err();
    min_ratio = std::min(min_ratio, ratio);
    parts += (parts.empty() ? "" : ", ") + std::string(theorem == 4 ? "Robin-trace" : "normal-derivative") +
             " degraded x" + sci(ratio);
  }
  return {min_ratio >= 100.0, parts};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
  double time_limit;  // seconds; <= 0 means none
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "eigen-structure on A1", eigen_structure, 10.0},
      {2, "analytic Dirichlet eigenvalues", analytic_eigenvalues, 0.0},
      {3, "Green identity between bases", green_identity, 0.0},
      {4, "scalar limit identity", scalar_core, 1.0},
      {5, "Robin-trace roundtrip on A1", [] { return roundtrip(4); }, 60.0},
      {6, "normal-derivative roundtrip A1", [] { return roundtrip(5); }, 60.0},
      {7, "quadrature vs analytic oracle", oracle_agreement, 0.0},
      {8, "damped sin-cos closed form", bateman_utility, 0.0},
      {9, "elliptic operator suite", elliptic_suite, 0.0},
      {10, "2-D unit square smoke test", square_smoke, 300.0},
      {11, "sign-regression guard", sign_guard, 0.0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = format_sig(secs, 3) + " s";
    if (c.time_limit > 0.0) {
      timing += " (limit " + format_sig(c.time_limit, 3) + " s)";
      if (secs >= c.time_limit) out.pass = false;
    }
    if (!out.pass) ++failed;
    std::printf("%s  %2d  %-32s %s | %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
              criteria.size());
  return failed == 0 ? 0 : 1;
}
