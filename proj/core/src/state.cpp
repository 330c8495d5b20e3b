#include "lqb/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "lqb/errors.hpp"

namespace lqb {

namespace {

Mat3 outer(int i, int j) {
  Mat3 m = Mat3::Zero();
  m(i, j) = 1.0;
  return m;
}

}  // namespace

Mat3 hermitize(const Mat3& m) { return 0.5 * (m + m.adjoint()); }

void check_density_matrix(const Mat3& m, const StateTolerance& tol) {
  if (!m.allFinite()) throw InvalidArgument("density matrix has non-finite entries");
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol.hermiticity) {
    throw InvalidArgument(fmt::format("density matrix is not Hermitian (deviation {:.3g})", herm));
  }
  const cplx tr = m.trace();
  if (std::abs(tr - 1.0) > tol.trace) {
    throw InvalidArgument(
        fmt::format("density matrix trace {:.15g}{:+.3g}i differs from 1", tr.real(), tr.imag()));
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(hermitize(m), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (lo < -tol.positivity) {
    throw InvalidArgument(fmt::format("density matrix has negative eigenvalue {:.3g}", lo));
  }
}

DensityMatrix DensityMatrix::from_matrix(const Mat3& m, const StateTolerance& tol) {
  check_density_matrix(m, tol);
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::basis(int level) {
  if (level < 0 || level > 2) throw InvalidArgument("basis level must be 0, 1 or 2");
  return DensityMatrix(outer(level, level));
}

DensityMatrix DensityMatrix::maximally_mixed() { return DensityMatrix(Mat3::Identity() / 3.0); }

DensityMatrix DensityMatrix::pure(const Vec3& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw InvalidArgument("pure state needs a nonzero ket");
  const Vec3 k = psi / n;
  return DensityMatrix(k * k.adjoint());
}

Mat3 hamiltonian(const SystemParams& p) {
  return p.omega_rabi * (outer(kStorage, kExcited) + outer(kExcited, kStorage)) +
         p.delta * outer(kExcited, kExcited);
}

std::array<Mat3, 4> jump_operators(const SystemParams& p) {
  return {std::sqrt(p.gamma20 * (p.n_th + 1.0)) * outer(kGround, kExcited),
          std::sqrt(p.gamma20 * p.n_th) * outer(kExcited, kGround),
          std::sqrt(p.gamma21) * outer(kStorage, kExcited),
          std::sqrt(p.gamma10) * outer(kGround, kStorage)};
}

Mat3 lindblad_rhs(const Mat3& rho, const SystemParams& p) {
  const Mat3 h = hamiltonian(p);
  Mat3 out = -kI * (h * rho - rho * h);
  for (const Mat3& j : jump_operators(p)) {
    const Mat3 jdj = j.adjoint() * j;
    out += j * rho * j.adjoint() - 0.5 * (jdj * rho + rho * jdj);
  }
  return out;
}

Mat3 lindblad_rhs(const DensityMatrix& rho, const SystemParams& p) {
  return lindblad_rhs(rho.matrix(), p);
}

double energy(const Mat3& rho, const SystemParams& p) {
  return p.e1 * rho(kStorage, kStorage).real() + p.e2 * rho(kExcited, kExcited).real();
}

double energy(const DensityMatrix& rho, const SystemParams& p) { return energy(rho.matrix(), p); }

double l1_coherence(const Mat3& rho) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) s += std::abs(rho(i, j));
    }
  }
  return s;
}

double von_neumann_entropy(const Mat3& rho) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(hermitize(rho), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double lam = std::clamp(es.eigenvalues()(k), 0.0, 1.0);
    if (lam > 0.0) s -= lam * std::log(lam);
  }
  return s;
}

double hs_norm(const Mat3& a) { return a.norm(); }

Observables observe(const DensityMatrix& rho, const SystemParams& p,
                    const DensityMatrix& reference) {
  return {energy(rho, p), l1_coherence(rho.matrix()), von_neumann_entropy(rho.matrix()),
          hs_norm(rho.matrix() - reference.matrix())};
}

}  // namespace lqb
