#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "wavinv/app/config.hpp"
#include "wavinv/app/export.hpp"
#include "wavinv/app/metrics.hpp"
#include "wavinv/app/runner.hpp"
#include "wavinv/error.hpp"

using namespace wavinv;
using namespace wavinv::app;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(# small interval run
[domain]
kind = interval
length = pi
cells = 120

[speed]
speed = "sine:amp=0.5,base=1.0"

[bc]
alpha = 1.0
num_modes = 6

[phantom]
robin = 1:1.0, 2:-0.25
dirichlet = 2:1.0, 4:-0.3

[time]
samples_per_period = 20
horizon = auto

[damping]
eps = 0.4, 0.2, 0.1, 0.05
tail_cut = 1e-10
degree = 3

[output]
dir = out/small
max_error = 0.5
)";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(WAVINV_TEST_TMP) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("relative weighted L2 error") {
  auto g = build_interval(std::numbers::pi, 32);
  auto s = sample_speed(g, SineSpeed{0.5, 1.0});
  Eigen::VectorXd f(33);
  for (Eigen::Index i = 0; i < 33; ++i) f[i] = std::sin(0.1 * double(i)) + 0.2;
  CHECK(relative_l2_error(f, f, *g, *s) == 0.0);
  CHECK(relative_l2_error(f, Eigen::VectorXd::Zero(33), *g, *s) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(relative_l2_error(f, 1.1 * f, *g, *s) - 0.1) <= 1e-12);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(33);
  CHECK(relative_l2_error(zero, f, *g, *s) == doctest::Approx(std::sqrt(weighted_inner(f, f, *g, *s))));
  CHECK_THROWS_AS(relative_l2_error(f, Eigen::VectorXd::Zero(3), *g, *s), InvalidInput);
}

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(kSmall);
  CHECK(c.domain.kind == DomainKind::Interval);
  CHECK(c.domain.lx == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(c.domain.nx == 120);
  CHECK(c.speed == "sine:amp=0.5,base=1.0");
  CHECK(c.alpha == 1.0);
  CHECK(c.num_modes == 6);
  REQUIRE(c.robin_phantom.size() == 2);
  CHECK(c.robin_phantom[1] == PhantomTerm{2, -0.25});
  CHECK(c.damping.eps == std::vector<double>{0.4, 0.2, 0.1, 0.05});
  CHECK(!c.horizon.has_value());
  CHECK(c.output_dir == "out/small");
  CHECK(c.max_error == 0.5);

  const RunConfig a1 = load_config(fs::path(WAVINV_SOURCE_DIR) / "configs" / "a1.cfg");
  CHECK(a1.domain.nx == 400);
  CHECK(a1.num_modes == 10);

  const RunConfig sq = load_config(fs::path(WAVINV_SOURCE_DIR) / "configs" / "square.cfg");
  CHECK(sq.domain.kind == DomainKind::Rectangle);
  CHECK(sq.domain.ny == 24);
}

TEST_CASE("config round trip") {
  for (const std::string text :
       {std::string(kSmall), slurp(fs::path(WAVINV_SOURCE_DIR) / "configs" / "a1.cfg"),
        slurp(fs::path(WAVINV_SOURCE_DIR) / "configs" / "square.cfg")}) {
    const RunConfig first = parse_config(text);
    const std::string again = serialize_config(first);
    CHECK(parse_config(again) == first);
    CHECK(serialize_config(parse_config(again)) == again);
  }
  RunConfig c = parse_config(kSmall);
  c.horizon = 123.5;
  c.k_max = 3;
  c.precision = EigenPrecision::Double;
  CHECK(parse_config(serialize_config(c)) == c);
  RunConfig r = parse_config(slurp(fs::path(WAVINV_SOURCE_DIR) / "configs" / "square.cfg"));
  r.domain.corner = CornerNormal::YFacing;
  CHECK(parse_config(serialize_config(r)) == r);
}

TEST_CASE("config errors") {
  auto with = [](const std::string& from, const std::string& to) {
    std::string text = kSmall;
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
  };
  CHECK_THROWS_AS(parse_config(with("alpha = 1.0", "alpha = -0.5")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("alpha = 1.0", "alpha = 0")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("cells = 120", "cells = 4")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("[bc]", "[boundary]")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("num_modes = 6", "modes = 6")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("robin = 1:1.0, 2:-0.25", "robin = 0:1.0")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("eps = 0.4, 0.2, 0.1, 0.05", "eps = 0.1, 0.2")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("samples_per_period = 20", "samples_per_period = 10")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(with("sine:amp=0.5", "wave:amp=0.5")), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), ConfigError);
  try {
    parse_config(with("alpha = 1.0", "alpha = abc"), "run.cfg");
    FAIL("expected rejection");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("run.cfg:") != std::string::npos);
  }
  const RunConfig pi_forms = parse_config(with("length = pi", "length = 2*pi"));
  CHECK(pi_forms.domain.lx == doctest::Approx(2 * std::numbers::pi));
}

TEST_CASE("eigen subcommand prints analytic eigenvalues") {
  RunConfig c = parse_config(kSmall);
  c.speed = "constant:1";
  c.domain.nx = 400;
  const fs::path out = scratch("eigen") / "nested" / "dir";
  std::ostringstream log, err;
  CHECK(run_eigen(c, out, log, err) == kSuccess);
  CHECK(fs::exists(out / "basis_robin.json"));
  CHECK(fs::exists(out / "basis_dirichlet_modes.csv"));
  std::istringstream lines(log.str());
  std::string line;
  bool in_dirichlet = false;
  int seen = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("dirichlet", 0) == 0) in_dirichlet = true;
    std::istringstream row(line);
    int mode = 0;
    double lambda = 0.0;
    if (in_dirichlet && (row >> mode >> lambda) && mode <= 5) {
      CHECK(std::abs(lambda - mode) <= 1e-3 * mode);
      ++seen;
    }
  }
  CHECK(seen == 5);
}

TEST_CASE("roundtrip writes reports and honours the threshold") {
  const RunConfig c = parse_config(kSmall);
  const fs::path out = scratch("roundtrip");
  std::ostringstream log, err;
  std::vector<TheoremOutcome> outcomes;
  CHECK(run_roundtrip(c, out, Theorem::Both, 0.5, log, err, &outcomes) == kSuccess);
  REQUIRE(outcomes.size() == 2);
  for (const char* name : {"boundary_robin.csv", "boundary_dirichlet.csv", "report_theorem4.json",
                           "report_theorem5.json", "reconstruction_theorem4.csv",
                           "reconstruction_theorem5.csv", "boundary_robin_nodes.json"}) {
    CHECK(fs::exists(out / name));
  }
  CHECK(log.str().find("rel_l2_error=") != std::string::npos);

  const auto j = nlohmann::json::parse(slurp(out / "report_theorem4.json"));
  CHECK(j["target_bc"] == "dirichlet");
  REQUIRE(j["modes"].size() == 6);
  CHECK(j["modes"][0]["per_eps"].size() == 4);
  CHECK(j["modes"][0]["coeff"].get<double>() == outcomes[0].report.modes[0].coeff);
  CHECK(j["schedule"]["eps"].size() == 4);

  std::ostringstream log0, err0;
  CHECK(run_roundtrip(c, scratch("roundtrip0"), Theorem::Four, 0.0, log0, err0) ==
        kToleranceExceeded);
  CHECK(log0.str().find("rel_l2_error=") != std::string::npos);
  CHECK(err0.str().find("exceeds") != std::string::npos);
}

TEST_CASE("reports are byte-identical across runs") {
  const RunConfig c = parse_config(kSmall);
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  std::ostringstream log, err;
  REQUIRE(run_roundtrip(c, a, Theorem::Both, 1.0, log, err) == kSuccess);
  REQUIRE(run_roundtrip(c, b, Theorem::Both, 1.0, log, err) == kSuccess);
  for (const char* name : {"report_theorem4.json", "report_theorem5.json", "boundary_robin.csv"}) {
    CHECK(slurp(a / name) == slurp(b / name));
  }
}

TEST_CASE("stage failures map to exit codes") {
  RunConfig c = parse_config(kSmall);
  c.robin_phantom = {{9, 1.0}};
  std::ostringstream log, err;
  CHECK(run_roundtrip(c, scratch("beyond"), Theorem::Four, 0.5, log, err) == kNumericalFailure);
  CHECK(err.str().find("[forward]") != std::string::npos);

  RunConfig none = parse_config(kSmall);
  none.dirichlet_phantom.clear();
  std::ostringstream log2, err2;
  CHECK(run_roundtrip(none, scratch("none"), Theorem::Five, 0.5, log2, err2) == kConfigError);

  std::ostringstream log3, err3;
  CHECK(run_invert(parse_config(kSmall), scratch("nodata"), std::nullopt, log3, err3) ==
        kConfigError);
}

TEST_CASE("boundary data files round trip and feed the invert subcommand") {
  const RunConfig c = parse_config(kSmall);
  const fs::path out = scratch("files");
  std::ostringstream log, err;
  REQUIRE(run_forward(c, out, log, err) == kSuccess);
  const Problem p = build_problem(c);
  const auto tg = make_time_grid(c, p);
  const auto direct = forward_robin(phantom_field(c, p, BcKind::Robin), *p.robin, tg);
  const auto read = read_boundary_data(out / "boundary_robin.csv", p.grid);
  CHECK(read.kind == DataKind::RobinTrace);
  CHECK(read.timegrid.n_steps == tg.n_steps);
  CHECK(read.timegrid.dt == tg.dt);
  CHECK(read.values == direct.values);

  std::ostringstream log2, err2;
  REQUIRE(run_invert(c, out, std::nullopt, log2, err2) == kSuccess);
  const auto j = nlohmann::json::parse(slurp(out / "report_theorem4.json"));
  const auto mem = robin_to_dirichlet_coeffs(direct, *p.dirichlet, c.damping);
  CHECK(j["modes"][1]["coeff"].get<double>() == mem.modes[1].coeff);

  CHECK_THROWS_AS(read_boundary_data(out / "boundary_robin.csv", build_rectangle(1, 1, 8, 8)),
                  InvalidInput);
}
