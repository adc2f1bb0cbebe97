#include "wavinv/app/export.hpp"

#include <fstream>
#include <sstream>

#include "wavinv/error.hpp"
#include "wavinv/format.hpp"

namespace wavinv::app {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  return out;
}

}  // namespace

void write_boundary_data(const BoundaryData& data, const std::filesystem::path& csv_path) {
  auto out = open_out(csv_path);
  const std::size_t nb = data.num_boundary();
  out << "# kind, dt, n_steps, n_boundary\n";
  out << "# " << to_string(data.kind) << ", " << format_double(data.timegrid.dt) << ", "
      << data.timegrid.n_steps << ", " << nb << '\n';
  out << "boundary_id,t,value\n";
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t j = 0; j < data.timegrid.samples(); ++j) {
      out << b << ',' << format_double(data.timegrid.time(j)) << ','
          << format_double(data.values(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j)))
          << '\n';
    }
  }

  if (!data.grid) return;
  const auto& bd = data.grid->boundary();
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (std::size_t b = 0; b < bd.size(); ++b) {
    const auto& p = data.grid->nodes()[bd.node_ids[b]];
    nlohmann::ordered_json entry;
    entry["boundary_id"] = b;
    entry["node"] = bd.node_ids[b];
    entry["x"] = p[0];
    if (data.grid->dim() == 2) entry["y"] = p[1];
    entry["normal"] = {bd.normals[b][0], bd.normals[b][1]};
    entry["surface_weight"] = bd.surface_weights[b];
    nodes.push_back(entry);
  }
  nlohmann::ordered_json sidecar;
  sidecar["kind"] = to_string(data.kind);
  sidecar["boundary"] = nodes;
  auto side = open_out(csv_path.parent_path() / (csv_path.stem().string() + "_nodes.json"));
  side << sidecar.dump(2) << '\n';
}

BoundaryData read_boundary_data(const std::filesystem::path& csv_path,
                                std::shared_ptr<const DomainGrid> grid) {
  std::ifstream in(csv_path);
  if (!in) throw InvalidInput("cannot open boundary data " + csv_path.string());
  std::string header;
  std::string meta;
  std::getline(in, header);
  std::getline(in, meta);
  if (header.rfind("# kind", 0) != 0 || meta.rfind("# ", 0) != 0) {
    throw InvalidInput(csv_path.string() + ": missing '# kind, dt, n_steps, n_boundary' header");
  }
  std::stringstream fields(meta.substr(2));
  std::string kind;
  std::string dt_text;
  std::string steps_text;
  std::string nb_text;
  std::getline(fields, kind, ',');
  std::getline(fields, dt_text, ',');
  std::getline(fields, steps_text, ',');
  std::getline(fields, nb_text, ',');
  double dt = 0.0;
  double steps = 0.0;
  double nb = 0.0;
  if (!parse_double(dt_text, dt) || !parse_double(steps_text, steps) || !parse_double(nb_text, nb)) {
    throw InvalidInput(csv_path.string() + ": malformed header values '" + meta + "'");
  }
  BoundaryData data;
  data.kind = parse_data_kind(kind);
  data.timegrid = TimeGrid::make(dt, static_cast<std::size_t>(steps));
  data.grid = std::move(grid);
  const auto rows = static_cast<Eigen::Index>(nb);
  require(data.grid == nullptr || static_cast<std::size_t>(rows) == data.grid->boundary().size(),
          csv_path.string() + ": " + std::to_string(rows) + " boundary nodes, grid has " +
              std::to_string(data.grid ? data.grid->boundary().size() : 0));
  const auto cols = static_cast<Eigen::Index>(data.timegrid.samples());
  data.values = BoundaryData::Matrix::Zero(rows, cols);

  std::string line;
  std::getline(in, line);  // column names
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string id_text;
    std::string t_text;
    std::string v_text;
    std::getline(row, id_text, ',');
    std::getline(row, t_text, ',');
    std::getline(row, v_text, ',');
    double id = 0.0;
    double t = 0.0;
    double v = 0.0;
    if (!parse_double(id_text, id) || !parse_double(t_text, t) || !parse_double(v_text, v)) {
      throw InvalidInput(csv_path.string() + ": malformed row '" + line + "'");
    }
    const auto b = static_cast<Eigen::Index>(id);
    const auto j = static_cast<Eigen::Index>(std::llround(t / dt));
    require(b >= 0 && b < rows && j >= 0 && j < cols,
            csv_path.string() + ": row out of range '" + line + "'");
    data.values(b, j) = v;
    ++seen;
  }
  require(seen == static_cast<std::size_t>(rows * cols),
          csv_path.string() + ": expected " + std::to_string(rows * cols) + " rows, read " +
              std::to_string(seen));
  return data;
}

nlohmann::ordered_json report_to_json(const CoefficientReport& report) {
  nlohmann::ordered_json doc;
  doc["target_bc"] = to_string(report.target_bc);
  doc["source"] = to_string(report.source);
  nlohmann::ordered_json modes = nlohmann::ordered_json::array();
  for (const auto& m : report.modes) {
    nlohmann::ordered_json entry;
    entry["index"] = m.index;
    entry["lambda"] = m.lambda;
    entry["coeff"] = m.coeff;
    nlohmann::ordered_json per_eps = nlohmann::ordered_json::array();
    for (const auto& s : m.per_eps) per_eps.push_back({s.eps, s.value});
    entry["per_eps"] = per_eps;
    entry["ref"] = m.ref ? nlohmann::ordered_json(*m.ref) : nlohmann::ordered_json(nullptr);
    entry["rel_err"] = m.rel_err ? nlohmann::ordered_json(*m.rel_err) : nlohmann::ordered_json(nullptr);
    modes.push_back(entry);
  }
  doc["modes"] = modes;
  nlohmann::ordered_json schedule;
  schedule["eps"] = report.schedule.eps;
  schedule["tail_cut"] = report.schedule.tail_cut;
  schedule["degree"] = report.schedule.degree;
  doc["schedule"] = schedule;
  return doc;
}

void write_report(const CoefficientReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << report_to_json(report).dump(2) << '\n';
}

void write_reconstruction(const DomainGrid& grid, const Eigen::VectorXd& f_true,
                          const Eigen::VectorXd& f_rec, const std::filesystem::path& path) {
  require(static_cast<std::size_t>(f_true.size()) == grid.num_nodes() &&
              f_rec.size() == f_true.size(),
          "write_reconstruction: dimension mismatch");
  auto out = open_out(path);
  const bool two_d = grid.dim() == 2;
  out << (two_d ? "node,x,y,f_true,f_rec\n" : "node,x,f_true,f_rec\n");
  for (std::size_t i = 0; i < grid.num_nodes(); ++i) {
    const auto& p = grid.nodes()[i];
    out << i << ',' << format_double(p[0]);
    if (two_d) out << ',' << format_double(p[1]);
    out << ',' << format_double(f_true[static_cast<Eigen::Index>(i)]) << ','
        << format_double(f_rec[static_cast<Eigen::Index>(i)]) << '\n';
  }
}

}  // namespace wavinv::app
