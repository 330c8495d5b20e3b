#pragma once

#include <array>

#include "lqb/params.hpp"
#include "lqb/types.hpp"

namespace lqb {

/// Tolerances for accepting a 3x3 matrix as a physical state.
struct StateTolerance {
  double hermiticity = 1e-12;
  double trace = 1e-12;
  double positivity = 1e-10;  ///< smallest eigenvalue may dip to -positivity
};

/// Throws InvalidArgument if `m` is not Hermitian, unit-trace and positive
/// within `tol`.
void check_density_matrix(const Mat3& m, const StateTolerance& tol = {});

/// (m + m^dagger) / 2
[[nodiscard]] Mat3 hermitize(const Mat3& m);

/// A validated battery state; element (i, j) is <i|rho|j> over |0>, |1>, |2>.
class DensityMatrix {
 public:
  /// Validates `m`; throws InvalidArgument on failure.
  static DensityMatrix from_matrix(const Mat3& m, const StateTolerance& tol = {});
  static DensityMatrix basis(int level);
  static DensityMatrix maximally_mixed();
  /// |psi><psi| for a (not necessarily normalized) ket.
  static DensityMatrix pure(const Vec3& psi);

  [[nodiscard]] const Mat3& matrix() const { return m_; }
  [[nodiscard]] cplx operator()(int i, int j) const { return m_(i, j); }
  [[nodiscard]] double population(int level) const { return m_(level, level).real(); }

 private:
  explicit DensityMatrix(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

/// Rotating-frame Hamiltonian Omega (|1><2| + |2><1|) + delta |2><2|.
[[nodiscard]] Mat3 hamiltonian(const SystemParams& p);

/// The four jump operators, rates folded in:
/// sqrt(g20 (N+1)) |0><2|, sqrt(g20 N) |2><0|, sqrt(g21) |1><2|, sqrt(g10) |0><1|.
[[nodiscard]] std::array<Mat3, 4> jump_operators(const SystemParams& p);

/// drho/dt = -i[H, rho] + sum_mu D[J_mu] rho, evaluated with 3x3 operator algebra.
[[nodiscard]] Mat3 lindblad_rhs(const Mat3& rho, const SystemParams& p);
[[nodiscard]] Mat3 lindblad_rhs(const DensityMatrix& rho, const SystemParams& p);

/// Stored energy e1 rho11 + e2 rho22 (eV).
[[nodiscard]] double energy(const Mat3& rho, const SystemParams& p);
[[nodiscard]] double energy(const DensityMatrix& rho, const SystemParams& p);

/// Sum of |rho_ij| over i != j.
[[nodiscard]] double l1_coherence(const Mat3& rho);

/// -sum lambda ln lambda (nats), eigenvalues clamped to [0, 1], 0 ln 0 := 0.
[[nodiscard]] double von_neumann_entropy(const Mat3& rho);

/// sqrt(Tr(A A^dagger)).
[[nodiscard]] double hs_norm(const Mat3& a);

struct Observables {
  double energy = 0.0;        ///< eV
  double l1_coherence = 0.0;
  double entropy = 0.0;       ///< nats
  double hs_norm = 0.0;       ///< distance to the reference state
};

[[nodiscard]] Observables observe(const DensityMatrix& rho, const SystemParams& p,
                                  const DensityMatrix& reference);

}  // namespace lqb
