#include "wavinv/app/metrics.hpp"

#include <cmath>

#include "wavinv/eigenbasis.hpp"
#include "wavinv/error.hpp"

namespace wavinv::app {

double relative_l2_error(const Eigen::Ref<const Eigen::VectorXd>& f_true,
                         const Eigen::Ref<const Eigen::VectorXd>& f_rec, const DomainGrid& grid,
                         const SpeedField& speed) {
  require(f_true.size() == f_rec.size(), "relative_l2_error: dimension mismatch");
  const Eigen::VectorXd diff = f_true - f_rec;
  const double err = std::sqrt(std::max(0.0, weighted_inner(diff, diff, grid, speed)));
  const double norm = std::sqrt(std::max(0.0, weighted_inner(f_true, f_true, grid, speed)));
  return norm == 0.0 ? err : err / norm;
}

}  // namespace wavinv::app
