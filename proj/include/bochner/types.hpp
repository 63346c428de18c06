#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>

namespace bochner {

using Index = Eigen::Index;
using Complex = std::complex<double>;

using VectorXd = Eigen::VectorXd;
using VectorXcd = Eigen::VectorXcd;
using MatrixXd = Eigen::MatrixXd;
using MatrixXcd = Eigen::MatrixXcd;

/// One flag per lattice site, row-major like every other per-site array.
using SiteMask = Eigen::Array<bool, Eigen::Dynamic, 1>;

}  // namespace bochner
