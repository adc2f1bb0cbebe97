#include "wavinv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wavinv/error.hpp"
#include "wavinv/format.hpp"

namespace wavinv {

std::string format_sig(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*g", digits, value);
  return buffer;
}

bool parse_double(std::string_view text, double& out) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

double BoundaryDescriptor::measure() const {
  double total = 0.0;
  for (double w : surface_weights) total += w;
  return total;
}

double DomainGrid::measure() const {
  return kind_ == DomainKind::Interval ? extents_[0] : extents_[0] * extents_[1];
}

double DomainGrid::boundary_measure() const {
  return kind_ == DomainKind::Interval ? 2.0 : 2.0 * (extents_[0] + extents_[1]);
}

void DomainGrid::finalize() {
  boundary_slot_.assign(nodes_.size(), -1);
  for (std::size_t b = 0; b < boundary_.size(); ++b) {
    boundary_slot_[boundary_.node_ids[b]] = static_cast<std::ptrdiff_t>(b);
  }
  interior_.clear();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (boundary_slot_[i] < 0) interior_.push_back(i);
  }
}

namespace {

// Trapezoid weights of a uniform 1-D grid with n cells of width h.
std::vector<double> trapezoid(std::size_t n, double h) {
  std::vector<double> w(n + 1, h);
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return w;
}

}  // namespace

std::shared_ptr<const DomainGrid> build_interval(double length, std::size_t n_cells,
                                                 GridLimits limits) {
  require(std::isfinite(length) && length > 0.0,
          "build_interval: length must be positive, got " + format_double(length));
  require(n_cells >= limits.min_cells, "build_interval: n_cells must be >= " +
                                           std::to_string(limits.min_cells) + ", got " +
                                           std::to_string(n_cells));
  std::shared_ptr<DomainGrid> grid(new DomainGrid());
  grid->kind_ = DomainKind::Interval;
  grid->extents_ = {length, 0.0};
  grid->cells_ = {n_cells, 0};
  const double h = length / static_cast<double>(n_cells);
  grid->spacing_ = {h, 0.0};

  grid->nodes_.resize(n_cells + 1);
  for (std::size_t i = 0; i <= n_cells; ++i) {
    // Exact endpoint so boundary nodes lie on dOmega.
    grid->nodes_[i] = {i == n_cells ? length : static_cast<double>(i) * h, 0.0};
  }
  const auto w = trapezoid(n_cells, h);
  grid->volume_weights_ = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));

  auto& bd = grid->boundary_;
  bd.node_ids = {0, n_cells};
  bd.normals = {Point{-1.0, 0.0}, Point{1.0, 0.0}};
  bd.surface_weights = {1.0, 1.0};
  bd.inward_step = {1, -1};
  bd.normal_spacing = {h, h};
  grid->finalize();
  return grid;
}

std::shared_ptr<const DomainGrid> build_rectangle(double lx, double ly, std::size_t nx,
                                                  std::size_t ny, CornerNormal corner,
                                                  GridLimits limits) {
  require(std::isfinite(lx) && lx > 0.0 && std::isfinite(ly) && ly > 0.0,
          "build_rectangle: extents must be positive, got " + format_double(lx) + " x " +
              format_double(ly));
  require(nx >= limits.min_cells && ny >= limits.min_cells,
          "build_rectangle: cell counts must be >= " + std::to_string(limits.min_cells) +
              ", got " + std::to_string(nx) + " x " + std::to_string(ny));
  std::shared_ptr<DomainGrid> grid(new DomainGrid());
  grid->kind_ = DomainKind::Rectangle;
  grid->extents_ = {lx, ly};
  grid->cells_ = {nx, ny};
  grid->corner_ = corner;
  const double hx = lx / static_cast<double>(nx);
  const double hy = ly / static_cast<double>(ny);
  grid->spacing_ = {hx, hy};

  const auto wx = trapezoid(nx, hx);
  const auto wy = trapezoid(ny, hy);
  const std::size_t stride = nx + 1;
  const std::size_t count = (nx + 1) * (ny + 1);
  grid->nodes_.resize(count);
  grid->volume_weights_.resize(static_cast<Eigen::Index>(count));
  auto coord = [](std::size_t i, std::size_t n, double len, double h) {
    return i == n ? len : static_cast<double>(i) * h;
  };

  auto& bd = grid->boundary_;
  for (std::size_t j = 0; j <= ny; ++j) {
    for (std::size_t i = 0; i <= nx; ++i) {
      const std::size_t id = i + stride * j;
      grid->nodes_[id] = {coord(i, nx, lx, hx), coord(j, ny, ly, hy)};
      grid->volume_weights_[static_cast<Eigen::Index>(id)] = wx[i] * wy[j];

      const bool on_x_edge = (i == 0 || i == nx);
      const bool on_y_edge = (j == 0 || j == ny);
      if (!on_x_edge && !on_y_edge) continue;

      // Edge-trapezoid weights; a corner collects half a cell from each edge.
      double weight = 0.0;
      if (on_x_edge) weight += wy[j];
      if (on_y_edge) weight += wx[i];

      const bool use_x = on_x_edge && (!on_y_edge || corner == CornerNormal::XFacing);
      Point normal{0.0, 0.0};
      std::ptrdiff_t step = 0;
      double spacing = 0.0;
      if (use_x) {
        normal[0] = (i == 0) ? -1.0 : 1.0;
        step = (i == 0) ? 1 : -1;
        spacing = hx;
      } else {
        normal[1] = (j == 0) ? -1.0 : 1.0;
        step = (j == 0) ? static_cast<std::ptrdiff_t>(stride) : -static_cast<std::ptrdiff_t>(stride);
        spacing = hy;
      }
      bd.node_ids.push_back(id);
      bd.normals.push_back(normal);
      bd.surface_weights.push_back(weight);
      bd.inward_step.push_back(step);
      bd.normal_spacing.push_back(spacing);
    }
  }
  grid->finalize();
  return grid;
}

// ---------------------------------------------------------------------------

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_number(const std::string& text, const std::string& context) {
  double value = 0.0;
  if (!parse_double(text, value) || !std::isfinite(value)) {
    throw InvalidInput("speed spec: cannot parse number '" + text + "' in " + context);
  }
  return value;
}

}  // namespace

SpeedSpec parse_speed_spec(const std::string& raw) {
  const std::string text = trim(raw);
  const auto colon = text.find(':');
  require(colon != std::string::npos,
          "speed spec: expected '<kind>:<args>', got '" + text + "'");
  const std::string kind = trim(text.substr(0, colon));
  const std::string args = trim(text.substr(colon + 1));

  if (kind == "constant") {
    return ConstantSpeed{parse_number(args, text)};
  }
  if (kind == "sine") {
    SineSpeed spec;
    bool have_amp = false;
    bool have_base = false;
    std::stringstream stream(args);
    std::string item;
    while (std::getline(stream, item, ',')) {
      const auto eq = item.find('=');
      require(eq != std::string::npos, "speed spec: expected key=value in '" + item + "'");
      const std::string key = trim(item.substr(0, eq));
      const double value = parse_number(trim(item.substr(eq + 1)), text);
      if (key == "amp") {
        spec.amp = value;
        have_amp = true;
      } else if (key == "base") {
        spec.base = value;
        have_base = true;
      } else {
        throw InvalidInput("speed spec: unknown sine parameter '" + key + "'");
      }
    }
    require(have_amp && have_base, "speed spec: sine profile needs amp= and base=");
    return spec;
  }
  if (kind == "file") {
    require(!args.empty(), "speed spec: empty file path");
    std::ifstream in(args);
    require(in.good(), "speed spec: cannot open '" + args + "'");
    NodalSpeed spec;
    spec.source = args;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      line = trim(line);
      if (line.empty() || line.front() == '#') continue;
      spec.values.push_back(parse_number(line, args + ":" + std::to_string(line_no)));
    }
    return spec;
  }
  throw InvalidInput("speed spec: unknown kind '" + kind + "'");
}

std::string format_speed_spec(const SpeedSpec& spec) {
  struct Visitor {
    std::string operator()(const ConstantSpeed& s) const {
      return "constant:" + format_double(s.value);
    }
    std::string operator()(const SineSpeed& s) const {
      return "sine:amp=" + format_double(s.amp) + ",base=" + format_double(s.base);
    }
    std::string operator()(const NodalSpeed& s) const { return "file:" + s.source; }
  };
  return std::visit(Visitor{}, spec);
}

SpeedField::SpeedField(std::shared_ptr<const DomainGrid> grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(grid_ != nullptr, "SpeedField: null grid");
  require(static_cast<std::size_t>(values_.size()) == grid_->num_nodes(),
          "SpeedField: " + std::to_string(values_.size()) + " values for " +
              std::to_string(grid_->num_nodes()) + " nodes");
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
      throw InvalidInput("SpeedField: non-positive speed " + format_double(values_[i]) +
                         " at node " + std::to_string(i));
    }
  }
  c_min_ = values_.minCoeff();
  c_max_ = values_.maxCoeff();
  weighted_volume_ = grid_->volume_weights().cwiseQuotient(values_);
}

std::shared_ptr<const SpeedField> sample_speed(std::shared_ptr<const DomainGrid> grid,
                                               const SpeedSpec& spec) {
  require(grid != nullptr, "sample_speed: null grid");
  const auto n = static_cast<Eigen::Index>(grid->num_nodes());
  Eigen::VectorXd values(n);
  if (const auto* constant = std::get_if<ConstantSpeed>(&spec)) {
    values.setConstant(constant->value);
  } else if (const auto* sine = std::get_if<SineSpeed>(&spec)) {
    const auto& ext = grid->extents();
    for (Eigen::Index i = 0; i < n; ++i) {
      const Point& p = grid->nodes()[static_cast<std::size_t>(i)];
      double shape = std::sin(std::numbers::pi * p[0] / ext[0]);
      if (grid->dim() == 2) shape *= std::sin(std::numbers::pi * p[1] / ext[1]);
      values[i] = sine->base + sine->amp * shape;
    }
  } else {
    const auto& nodal = std::get<NodalSpeed>(spec);
    require(static_cast<Eigen::Index>(nodal.values.size()) == n,
            "sample_speed: nodal list has " + std::to_string(nodal.values.size()) +
                " values, grid has " + std::to_string(n) + " nodes");
    values = Eigen::Map<const Eigen::VectorXd>(nodal.values.data(), n);
  }
  return std::make_shared<const SpeedField>(std::move(grid), std::move(values));
}

}  // namespace wavinv
