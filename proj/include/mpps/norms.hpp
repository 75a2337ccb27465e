#pragma once

#include <Eigen/Dense>

namespace mpps {

// Row-sum matrix norm max_i sum_j |a_ij| and its induced vector max-norm;
// every bound in the project is stated in this pair.
inline double row_sum_norm(const Eigen::MatrixXd& m) {
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}
inline double inf_norm(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

} // namespace mpps
