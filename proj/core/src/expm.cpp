#include "lqb/expm.hpp"

#include <array>
#include <cmath>

#include "lqb/errors.hpp"

namespace lqb {

namespace {

using Mat = Eigen::MatrixXcd;

constexpr std::array<double, 4> kB3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kB5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kB7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                       25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kB9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                        30270240.0,    2162160.0,    110880.0,     3960.0,
                                        90.0,          1.0};
constexpr std::array<double, 14> kB13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// Backward-error bounds for each Pade degree in double precision.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e+0;
constexpr double kTheta13 = 5.371920351148152e+0;

double norm1(const Mat& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

Mat solve_pade(const Mat& u, const Mat& v) { return (v - u).partialPivLu().solve(v + u); }

template <std::size_t N>
Mat pade_low(const Mat& a, const std::array<double, N>& b) {
  const auto n = a.rows();
  const Mat id = Mat::Identity(n, n);
  const Mat a2 = a * a;
  Mat even = b[0] * id;
  Mat odd = b[1] * id;
  Mat power = id;
  for (std::size_t k = 2; k + 1 < N; k += 2) {
    power = power * a2;
    even += b[k] * power;
    odd += b[k + 1] * power;
  }
  return solve_pade(a * odd, even);
}

Mat pade13(const Mat& a) {
  const auto n = a.rows();
  const Mat id = Mat::Identity(n, n);
  const Mat a2 = a * a;
  const Mat a4 = a2 * a2;
  const Mat a6 = a4 * a2;
  const auto& b = kB13;
  const Mat u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const Mat v =
      a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return solve_pade(u, v);
}

}  // namespace

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("expm expects a square matrix");
  if (!a.allFinite()) throw InvalidArgument("expm input has non-finite entries");
  if (a.rows() == 0) return a;

  const double nrm = norm1(a);
  if (nrm <= kTheta3) return pade_low(a, kB3);
  if (nrm <= kTheta5) return pade_low(a, kB5);
  if (nrm <= kTheta7) return pade_low(a, kB7);
  if (nrm <= kTheta9) return pade_low(a, kB9);

  const int s = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / kTheta13))));
  Mat x = pade13(a * std::ldexp(1.0, -s));
  for (int k = 0; k < s; ++k) x = x * x;
  return x;
}

}  // namespace lqb
