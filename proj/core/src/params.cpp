#include "lqb/params.hpp"

#include <cmath>
#include <string>

#include "lqb/errors.hpp"

namespace lqb {

SystemParams reference_defaults() { return SystemParams{}; }

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw InvalidArgument(message);
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be finite");
}

}  // namespace

SystemParams validate_params(const SystemParams& p) {
  require_finite(p.gamma20, "gamma20");
  require_finite(p.gamma21, "gamma21");
  require_finite(p.gamma10, "gamma10");
  require_finite(p.n_th, "n_th");
  require_finite(p.omega_rabi, "omega_rabi");
  require_finite(p.delta, "delta");
  require_finite(p.e1, "e1");
  require_finite(p.e2, "e2");

  require(p.gamma20 > 0.0, "gamma20 must be > 0");
  require(p.gamma21 > 0.0, "gamma21 must be > 0");
  require(p.gamma10 >= 0.0, "gamma10 must be >= 0");
  require(p.n_th >= 0.0, "n_th must be >= 0");
  require(p.omega_rabi >= 0.0, "omega_rabi must be >= 0");
  require(p.e1 > 0.0, "e1 must be > 0");
  require(p.e2 > p.e1, "e2 must be > e1");
  return p;
}

}  // namespace lqb
