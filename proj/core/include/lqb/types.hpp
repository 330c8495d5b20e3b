#pragma once

#include <complex>

#include <Eigen/Dense>

namespace lqb {

using cplx = std::complex<double>;

using Mat2 = Eigen::Matrix<cplx, 2, 2>;
using Mat3 = Eigen::Matrix<cplx, 3, 3>;
using Mat5 = Eigen::Matrix<cplx, 5, 5>;
using Mat9 = Eigen::Matrix<cplx, 9, 9>;
using Vec3 = Eigen::Matrix<cplx, 3, 1>;
using Vec9 = Eigen::Matrix<cplx, 9, 1>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cplx kI{0.0, 1.0};

/// Basis labels of the battery: ground, metastable storage, short-lived excited.
enum Level : int { kGround = 0, kStorage = 1, kExcited = 2 };

}  // namespace lqb
