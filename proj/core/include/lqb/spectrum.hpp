#pragma once

#include <vector>

#include "lqb/liouvillian.hpp"
#include "lqb/state.hpp"
#include "lqb/types.hpp"

namespace lqb {

/// Eigenvalues with biorthogonal right/left eigenvectors.
///
/// Column a of `right` is |R_a>, column a of `left` is |L_a>, normalized so
/// that left.adjoint() * right is the identity. Eigenvalues are sorted by
/// descending real part, near-ties by ascending imaginary part.
struct Spectrum {
  std::vector<cplx> eigenvalues;
  Eigen::MatrixXcd right;
  Eigen::MatrixXcd left;
  double condition_number = 1.0;  ///< 2-norm condition number of `right`
  bool defective = false;         ///< eigenbasis too ill-conditioned (near an EP)

  [[nodiscard]] std::size_t size() const { return eigenvalues.size(); }
  /// Index of the eigenvalue with smallest modulus.
  [[nodiscard]] std::size_t zero_mode() const;
  /// Number of eigenvalues with |lambda| < tol.
  [[nodiscard]] std::size_t count_near_zero(double tol = 1e-9) const;
};

/// Condition number above which the eigenbasis is treated as defective.
inline constexpr double kDefectiveCondition = 1e8;

/// Dense non-Hermitian eigendecomposition of a square complex matrix (n <= 9).
[[nodiscard]] Spectrum eigendecompose(const Eigen::MatrixXcd& m);

/// In-place ordering used throughout: descending real part, near-ties by
/// ascending imaginary part.
void sort_spectral(std::vector<cplx>& values);

/// Eigenvalues only, same ordering as eigendecompose().
[[nodiscard]] std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& m);

/// Relaxation rates in 1/us.
struct GapReport {
  double delta = 0.0;       ///< full Liouvillian gap
  double delta_slow = 0.0;  ///< slow 5x5 block
  double delta_l2 = 0.0;    ///< the two 2x2 coherence blocks
  [[nodiscard]] double tau_delta() const { return 1.0 / delta; }
};

/// Gaps from the full generator and its blocks. Throws DegenerateSteadyState
/// if more than one eigenvalue of the full generator lies within 1e-9 of zero.
[[nodiscard]] GapReport gaps(const SuperOp& sop);

/// -max Re over the nonzero eigenvalues; `with_zero_mode` drops the smallest-|lambda| one.
[[nodiscard]] double gap_of(const std::vector<cplx>& eigenvalues, bool with_zero_mode);

/// Nonzero eigenvalue with the largest real part (the smallest-|lambda| entry
/// is treated as the zero mode). Needs at least two eigenvalues.
[[nodiscard]] cplx dominant_nonzero(const std::vector<cplx>& eigenvalues);

/// Unique steady state by replacing the rho00 row of L with the trace
/// functional. Throws DegenerateSteadyState when the null space is not one-dimensional.
[[nodiscard]] DensityMatrix steady_state(const SuperOp& sop);

/// c_a = <L_a|rho0> for every mode (the zero-mode term reproduces rho_ss).
/// Throws NumericalError on a defective spectrum.
[[nodiscard]] std::vector<cplx> expansion_coefficients(const DensityMatrix& rho0,
                                                       const Spectrum& spectrum);

/// sum_a c_a exp(lambda_a t) |R_a>, devectorized.
[[nodiscard]] Mat3 reconstruct(const Spectrum& spectrum, const std::vector<cplx>& coefficients,
                               double t);

}  // namespace lqb
