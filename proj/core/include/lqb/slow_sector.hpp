#pragma once

#include <array>
#include <vector>

#include "lqb/params.hpp"
#include "lqb/types.hpp"

namespace lqb {

// Closed-form analysis of the 5x5 slow block at zero detuning with the
// metastable decay gamma10 neglected. Every entry point in this group throws
// InvalidArgument when p.delta != 0; use slow_eigenvalues() for the general case.

/// Slow block on (rho22, rho12, rho21, rho11, rho00) with
/// Gamma = 1/2 [gamma21 + gamma20 (N+1)].
[[nodiscard]] Mat5 build_l5_analytic(const SystemParams& p);

/// Gamma: decay rate of sigma = rho12 + rho21, an exact eigenvalue -Gamma of the slow block.
[[nodiscard]] double sigma_rate(const SystemParams& p);

/// Generator of x = (d rho22, A, d rho11) with A = rho12 - rho21, after
/// eliminating d rho00 = -(d rho22 + d rho11).
struct ReducedGenerator {
  Mat3 m;
  double gamma_bar = 0.0;
};

[[nodiscard]] ReducedGenerator build_m(const SystemParams& p);

/// det(lambda I - M) = lambda^3 + a lambda^2 + b lambda + c, depressed by
/// lambda = x - a/3 to x^3 + p x + q with p = 3P, q = -2R.
struct CubicCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double p_big = 0.0;  ///< P
  double r_big = 0.0;  ///< R
  double p = 0.0;
  double q = 0.0;
  double discriminant = 0.0;  ///< Lambda = R^2 + P^3
  /// False if the closed forms for a, P, R disagreed with det(lambda I - M)
  /// and the determinant-derived values were substituted.
  bool closed_form_consistent = true;
};

[[nodiscard]] CubicCoefficients cubic_coefficients(const SystemParams& p);

/// Convenience: R^2 + P^3 at `p`.
[[nodiscard]] double discriminant(const SystemParams& p);

/// Cardano roots lambda_k = x_k - a/3, x_k = w^k u + w^-k v, w = exp(2 pi i/3).
/// u^3 = R +- sqrt(Lambda) (the larger in modulus) and v = -P/u so that
/// u v = -p/3 holds on every branch. Sorted by descending real part.
[[nodiscard]] std::array<cplx, 3> cardano_roots(const CubicCoefficients& coeffs);

struct EPResult {
  double n_th_ep = 0.0;
  double omega_rabi = 0.0;
  cplx lambda_ep{};
  int kernel_dim = 0;              ///< dim ker(M - lambda_EP), 1 at a genuine EP
  double discriminant_residual = 0.0;  ///< |Lambda(n_th_ep)| / (R^2 + |P|^3)
  double sqrt_fit_exponent = 0.0;  ///< slope of log|lambda+ - lambda-| vs log|N - N_EP|
  double c1 = 0.0;                 ///< linear drift of the pair mean (fit)
  double c2 = 0.0;                 ///< square-root splitting coefficient (fit)
};

/// EP along N_th at the fixed Omega of `p`: first sign change of Lambda on
/// [n_lo, n_hi], bisected to |Lambda| < 1e-12 scale, followed by the rank test
/// and the square-root fit. Throws NumericalError if Lambda never changes
/// sign or if the degeneracy is diagonalizable (kernel dimension 2).
[[nodiscard]] EPResult locate_ep(const SystemParams& p, double n_lo, double n_hi);

struct SqrtFit {
  double exponent = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Fits the pair splitting on the overdamped side over offsets
/// N_EP * [1e-3, 1e-1]. Throws NumericalError if the splitting is unresolvable.
[[nodiscard]] SqrtFit sqrt_scaling_fit(const EPResult& ep, const SystemParams& p);

struct KappaEff {
  double exact = 0.0;       ///< rational expression from adiabatic elimination
  double asymptotic = 0.0;  ///< gamma21/2 + [24 Omega^2 - gamma21 (gamma20 + gamma21)] / (4 N gamma20)
};

[[nodiscard]] KappaEff kappa_eff(const SystemParams& p);

/// Quasi-static (d rho22, A) for a given storage deviation d rho11.
struct AdiabaticCoherences {
  cplx delta_rho22{};
  cplx antisymmetric{};
};

[[nodiscard]] AdiabaticCoherences adiabatic_coherences(const SystemParams& p, cplx delta_rho11);

/// Numeric eigenvalues of the slow block taken from the full generator
/// (any detuning, gamma10 included), sorted.
[[nodiscard]] std::vector<cplx> slow_eigenvalues(const SystemParams& p);

}  // namespace lqb
