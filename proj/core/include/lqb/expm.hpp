#pragma once

#include <Eigen/Dense>

namespace lqb {

/// Matrix exponential by Pade approximation with scaling and squaring
/// (orders 3, 5, 7, 9, 13 chosen from the 1-norm). Intended for small dense
/// generators; accuracy is close to unit roundoff relative to ||exp(A)||.
[[nodiscard]] Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

}  // namespace lqb
