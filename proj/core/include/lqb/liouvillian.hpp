#pragma once

#include <array>
#include <string_view>

#include "lqb/params.hpp"
#include "lqb/state.hpp"
#include "lqb/types.hpp"

namespace lqb {

/// Row-major stacking: rho(i, j) lives at slot 3 i + j. With this convention
/// vec(A X B) = (A (x) B^T) vec(X), so the Kronecker form of the generator is
/// -i (H (x) 1 - 1 (x) H^T) + sum J (x) J* - 1/2 (J^dagger J (x) 1 + 1 (x) (J^dagger J)^T).
[[nodiscard]] constexpr int vec_index(int i, int j) { return 3 * i + j; }

/// Canonical slots in block order
/// (rho22, rho12, rho21, rho11, rho00 | rho20, rho10 | rho02, rho01).
inline constexpr std::array<int, 9> kBlockOrder = {
    vec_index(2, 2), vec_index(1, 2), vec_index(2, 1), vec_index(1, 1), vec_index(0, 0),
    vec_index(2, 0), vec_index(1, 0), vec_index(0, 2), vec_index(0, 1)};

[[nodiscard]] Vec9 vectorize(const Mat3& rho);
[[nodiscard]] Vec9 vectorize(const DensityMatrix& rho);
[[nodiscard]] Mat3 devectorize(const Vec9& v);
/// Dynamic-size overload; throws InvalidArgument unless v.size() == 9.
[[nodiscard]] Mat3 devectorize(const Eigen::VectorXcd& v);

/// <1| : the vectorized identity, whose inner product with |rho> is Tr rho.
[[nodiscard]] Vec9 trace_functional();

struct SuperOp {
  static constexpr std::string_view kConvention = "row-major stacking, basis |0>,|1>,|2>";

  Mat9 matrix = Mat9::Zero();

  /// P^T L P with P the permutation to kBlockOrder.
  [[nodiscard]] Mat9 in_block_order() const;
  [[nodiscard]] Mat3 apply(const Mat3& rho) const { return devectorize(Vec9(matrix * vectorize(rho))); }
};

/// Builds the 9x9 Liouvillian; parameters are validated first.
[[nodiscard]] SuperOp build_liouvillian(const SystemParams& p);

struct LiouvillianBlocks {
  Mat5 l5;        ///< on (rho22, rho12, rho21, rho11, rho00)
  Mat2 l2_left;   ///< on (rho20, rho10)
  Mat2 l2_right;  ///< on (rho02, rho01)
};

/// Reads the 5 + 2 + 2 blocks. Every cross-block entry must be exactly zero;
/// anything else is a construction bug and raises NumericalError.
[[nodiscard]] LiouvillianBlocks extract_blocks(const SuperOp& sop);

}  // namespace lqb
