#pragma once

#include "lqb/types.hpp"

namespace lqb {

/// Physical parameters of the three-level battery.
///
/// Rates are plain rates in 1/us. The Rabi frequency and detuning are angular
/// (rad/us); user-facing inputs give Omega/2pi and delta/2pi in MHz, see
/// mhz_to_angular(). Level energies are in eV with the ground level at zero.
struct SystemParams {
  double gamma20 = 140.0;   ///< |2> -> |0> decay
  double gamma21 = 9.0;     ///< |2> -> |1> decay
  double gamma10 = 1.3e-6;  ///< |1> -> |0> decay (metastable storage)
  double n_th = 4.8;        ///< reservoir occupation on the 0-2 transition
  double omega_rabi = kTwoPi * 20.0;
  double delta = 0.0;
  double e1 = 1.70;
  double e2 = 3.15;

  /// Decay rate of the 1-2 coherence, 1/2 [gamma10 + gamma21 + gamma20 (N+1)].
  [[nodiscard]] double coherence_damping() const {
    return 0.5 * (gamma10 + gamma21 + gamma20 * (n_th + 1.0));
  }
};

[[nodiscard]] constexpr double mhz_to_angular(double f_mhz) { return kTwoPi * f_mhz; }
[[nodiscard]] constexpr double angular_to_mhz(double w) { return w / kTwoPi; }

/// The rates and energies used throughout the reference calculations
/// (Omega/2pi = 20 MHz, delta = 0, N_th = 4.8).
[[nodiscard]] SystemParams reference_defaults();

/// Returns `p` unchanged if every constraint holds, otherwise throws
/// InvalidArgument naming the first violated constraint.
SystemParams validate_params(const SystemParams& p);

}  // namespace lqb
