#pragma once
// Plot-ready file formats: boundary data CSV (+ node sidecar JSON),
// coefficient report JSON, reconstruction CSV.

#include <filesystem>
#include <memory>

#include <json.hpp>

#include "wavinv/forward.hpp"
#include "wavinv/inversion.hpp"

namespace wavinv::app {

/// Header "# kind, dt, n_steps, n_boundary" followed by the values on a second
/// comment line, then rows "boundary_id, t, value". Writes
/// <stem>_nodes.json next to the CSV with boundary node coordinates.
void write_boundary_data(const BoundaryData& data, const std::filesystem::path& csv_path);

/// Reads a file written by write_boundary_data and attaches `grid` as its
/// provenance; the boundary size must match.
BoundaryData read_boundary_data(const std::filesystem::path& csv_path,
                                std::shared_ptr<const DomainGrid> grid);

nlohmann::ordered_json report_to_json(const CoefficientReport& report);
void write_report(const CoefficientReport& report, const std::filesystem::path& path);

/// Rows "node, x[, y], f_true, f_rec".
void write_reconstruction(const DomainGrid& grid, const Eigen::VectorXd& f_true,
                          const Eigen::VectorXd& f_rec, const std::filesystem::path& path);

}  // namespace wavinv::app
