#include <fstream>

#include <json.hpp>

#include "wavinv/eigenbasis.hpp"
#include "wavinv/error.hpp"
#include "wavinv/format.hpp"

namespace wavinv {

void write_basis(const EigenBasis& basis, const std::filesystem::path& dir,
                 const std::string& stem) {
  std::filesystem::create_directories(dir);
  const std::string modes_name = stem + "_modes.csv";

  nlohmann::ordered_json doc;
  doc["bc"] = basis.bc().name();
  if (basis.bc().is_robin()) doc["alpha"] = basis.bc().alpha();
  doc["num_nodes"] = basis.grid()->num_nodes();
  doc["num_modes"] = basis.size();
  doc["lambdas"] = std::vector<double>(basis.lambda().begin(), basis.lambda().end());
  doc["lambda_sq"] = std::vector<double>(basis.lambda_sq().begin(), basis.lambda_sq().end());
  doc["modes_file"] = modes_name;
  std::ofstream json(dir / (stem + ".json"));
  if (!json) throw InvalidInput("write_basis: cannot write " + (dir / (stem + ".json")).string());
  json << doc.dump(2) << '\n';

  std::ofstream csv(dir / modes_name);
  if (!csv) throw InvalidInput("write_basis: cannot write " + (dir / modes_name).string());
  const auto& modes = basis.modes();
  for (Eigen::Index k = 0; k < modes.cols(); ++k) {
    csv << (k == 0 ? "" : ",") << "mode_" << (k + 1);
  }
  csv << '\n';
  for (Eigen::Index i = 0; i < modes.rows(); ++i) {
    for (Eigen::Index k = 0; k < modes.cols(); ++k) {
      csv << (k == 0 ? "" : ",") << format_double(modes(i, k));
    }
    csv << '\n';
  }
}

}  // namespace wavinv
