#pragma once

#include <Eigen/Dense>

#include "wavinv/grid.hpp"

namespace wavinv::app {

/// ||f_true - f_rec||_w / ||f_true||_w in L^2(Omega, c^{-1} dx); the absolute
/// norm of f_rec when f_true vanishes.
double relative_l2_error(const Eigen::Ref<const Eigen::VectorXd>& f_true,
                         const Eigen::Ref<const Eigen::VectorXd>& f_rec, const DomainGrid& grid,
                         const SpeedField& speed);

}  // namespace wavinv::app
