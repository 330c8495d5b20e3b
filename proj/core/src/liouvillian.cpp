#include "lqb/liouvillian.hpp"

#include <fmt/format.h>

#include "lqb/errors.hpp"

namespace lqb {

namespace {

Mat9 kron(const Mat3& a, const Mat3& b) {
  Mat9 out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
    }
  }
  return out;
}

int block_of(int position) { return position < 5 ? 0 : (position < 7 ? 1 : 2); }

}  // namespace

Vec9 vectorize(const Mat3& rho) {
  Vec9 v;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) v(vec_index(i, j)) = rho(i, j);
  }
  return v;
}

Vec9 vectorize(const DensityMatrix& rho) { return vectorize(rho.matrix()); }

Mat3 devectorize(const Vec9& v) {
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = v(vec_index(i, j));
  }
  return m;
}

Mat3 devectorize(const Eigen::VectorXcd& v) {
  if (v.size() != 9) {
    throw InvalidArgument(fmt::format("devectorize expects 9 components, got {}", v.size()));
  }
  return devectorize(Vec9(v));
}

Vec9 trace_functional() { return vectorize(Mat3(Mat3::Identity())); }

Mat9 SuperOp::in_block_order() const {
  Mat9 out;
  for (int r = 0; r < 9; ++r) {
    for (int c = 0; c < 9; ++c) out(r, c) = matrix(kBlockOrder[r], kBlockOrder[c]);
  }
  return out;
}

SuperOp build_liouvillian(const SystemParams& params) {
  const SystemParams p = validate_params(params);
  const Mat3 id = Mat3::Identity();
  const Mat3 h = hamiltonian(p);

  SuperOp sop;
  sop.matrix = -kI * (kron(h, id) - kron(id, h.transpose()));
  for (const Mat3& j : jump_operators(p)) {
    const Mat3 jdj = j.adjoint() * j;
    sop.matrix += kron(j, j.conjugate()) - 0.5 * (kron(jdj, id) + kron(id, jdj.transpose()));
  }
  return sop;
}

LiouvillianBlocks extract_blocks(const SuperOp& sop) {
  const Mat9 m = sop.in_block_order();
  for (int r = 0; r < 9; ++r) {
    for (int c = 0; c < 9; ++c) {
      if (block_of(r) != block_of(c) && m(r, c) != cplx(0.0, 0.0)) {
        throw NumericalError(fmt::format(
            "Liouvillian is not block diagonal: entry ({}, {}) in block order is {}{:+}i", r, c,
            m(r, c).real(), m(r, c).imag()));
      }
    }
  }
  return {m.block<5, 5>(0, 0), m.block<2, 2>(5, 5), m.block<2, 2>(7, 7)};
}

}  // namespace lqb
