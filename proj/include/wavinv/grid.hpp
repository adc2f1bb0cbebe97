#pragma once
// Uniform discretization of the object domain (interval or axis-aligned
// rectangle), its boundary with outward normals and surface quadrature, and the
// sampled squared-speed coefficient c(x).

#include <array>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace wavinv {

using Point = std::array<double, 2>;

enum class DomainKind { Interval, Rectangle };

/// Which edge owns a rectangle corner (its normal and inward stencil line).
enum class CornerNormal { XFacing, YFacing };

struct GridLimits {
  std::size_t min_cells = 8;
};

struct BoundaryDescriptor {
  std::vector<std::size_t> node_ids;
  std::vector<Point> normals;          // unit outward normal per boundary node
  std::vector<double> surface_weights; // quadrature weights for dsigma
  // Offset (in node indices) of the next node along the inward normal line,
  // and the mesh width along that line. Used by the one-sided normal stencil.
  std::vector<std::ptrdiff_t> inward_step;
  std::vector<double> normal_spacing;

  std::size_t size() const { return node_ids.size(); }
  double measure() const;
};

class DomainGrid {
 public:
  DomainKind kind() const { return kind_; }
  int dim() const { return kind_ == DomainKind::Interval ? 1 : 2; }
  const Point& extents() const { return extents_; }
  const std::array<std::size_t, 2>& cells() const { return cells_; }
  const Point& spacing() const { return spacing_; }
  CornerNormal corner_normal() const { return corner_; }

  std::size_t num_nodes() const { return nodes_.size(); }
  const std::vector<Point>& nodes() const { return nodes_; }
  const Eigen::VectorXd& volume_weights() const { return volume_weights_; }
  const BoundaryDescriptor& boundary() const { return boundary_; }
  const std::vector<std::size_t>& interior_nodes() const { return interior_; }
  bool is_boundary(std::size_t node) const { return boundary_slot_[node] >= 0; }
  /// Position of `node` inside boundary().node_ids, or -1 for interior nodes.
  std::ptrdiff_t boundary_slot(std::size_t node) const { return boundary_slot_[node]; }

  /// |Omega| and |dOmega| of the continuous domain.
  double measure() const;
  double boundary_measure() const;

  /// Linear node index of lattice point (i, j); j is ignored on intervals.
  std::size_t index(std::size_t i, std::size_t j = 0) const { return i + (cells_[0] + 1) * j; }

 private:
  friend std::shared_ptr<const DomainGrid> build_interval(double, std::size_t, GridLimits);
  friend std::shared_ptr<const DomainGrid> build_rectangle(double, double, std::size_t,
                                                           std::size_t, CornerNormal, GridLimits);
  DomainGrid() = default;
  void finalize();

  DomainKind kind_ = DomainKind::Interval;
  Point extents_{0.0, 0.0};
  std::array<std::size_t, 2> cells_{0, 0};
  Point spacing_{0.0, 0.0};
  CornerNormal corner_ = CornerNormal::XFacing;
  std::vector<Point> nodes_;
  Eigen::VectorXd volume_weights_;
  BoundaryDescriptor boundary_;
  std::vector<std::size_t> interior_;
  std::vector<std::ptrdiff_t> boundary_slot_;
};

std::shared_ptr<const DomainGrid> build_interval(double length, std::size_t n_cells,
                                                 GridLimits limits = {});

std::shared_ptr<const DomainGrid> build_rectangle(double lx, double ly, std::size_t nx,
                                                  std::size_t ny,
                                                  CornerNormal corner = CornerNormal::XFacing,
                                                  GridLimits limits = {});

// ---------------------------------------------------------------------------
// Speed field

struct ConstantSpeed {
  double value = 1.0;
  bool operator==(const ConstantSpeed&) const = default;
};

/// base + amp * sin(pi x / L) on intervals,
/// base + amp * sin(pi x / Lx) sin(pi y / Ly) on rectangles.
struct SineSpeed {
  double amp = 0.0;
  double base = 1.0;
  bool operator==(const SineSpeed&) const = default;
};

struct NodalSpeed {
  std::vector<double> values;
  std::string source;  // file path when read from disk, for messages/round-trip
  bool operator==(const NodalSpeed&) const = default;
};

using SpeedSpec = std::variant<ConstantSpeed, SineSpeed, NodalSpeed>;

/// Parses "constant:<v>", "sine:amp=<a>,base=<b>" or "file:<path>" (one nodal
/// value per line in node order).
SpeedSpec parse_speed_spec(const std::string& text);
std::string format_speed_spec(const SpeedSpec& spec);

class SpeedField {
 public:
  SpeedField(std::shared_ptr<const DomainGrid> grid, Eigen::VectorXd values);

  const std::shared_ptr<const DomainGrid>& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  double c_min() const { return c_min_; }
  double c_max() const { return c_max_; }
  /// w_i / c_i: the lumped weight of <f, g> = int f g c^{-1} dx.
  const Eigen::VectorXd& weighted_volume() const { return weighted_volume_; }

 private:
  std::shared_ptr<const DomainGrid> grid_;
  Eigen::VectorXd values_;
  Eigen::VectorXd weighted_volume_;
  double c_min_ = 0.0;
  double c_max_ = 0.0;
};

std::shared_ptr<const SpeedField> sample_speed(std::shared_ptr<const DomainGrid> grid,
                                               const SpeedSpec& spec);

}  // namespace wavinv
