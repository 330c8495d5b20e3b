#include "lqb/slow_sector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "lqb/errors.hpp"
#include "lqb/liouvillian.hpp"
#include "lqb/spectrum.hpp"

namespace lqb {

namespace {

SystemParams checked_resonant(const SystemParams& p) {
  const SystemParams q = validate_params(p);
  if (q.delta != 0.0) throw InvalidArgument("analytic slow sector requires zero detuning");
  return q;
}

double gamma_bar(const SystemParams& p) { return 0.5 * (p.gamma21 + p.gamma20 * (p.n_th + 1.0)); }

cplx char_poly(double a, double b, double c, cplx z) { return ((z + a) * z + b) * z + c; }

CubicCoefficients from_abc(double a, double b, double c) {
  CubicCoefficients k;
  k.a = a;
  k.b = b;
  k.c = c;
  k.p = b - a * a / 3.0;
  k.q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  k.p_big = k.p / 3.0;
  k.r_big = -k.q / 2.0;
  k.discriminant = k.r_big * k.r_big + k.p_big * k.p_big * k.p_big;
  return k;
}

}  // namespace

Mat5 build_l5_analytic(const SystemParams& params) {
  const SystemParams p = checked_resonant(params);
  const double g = gamma_bar(p);
  const double w = p.omega_rabi;
  const double up = p.n_th * p.gamma20;
  const double down = p.gamma20 * (p.n_th + 1.0);
  const cplx iw = kI * w;

  Mat5 l = Mat5::Zero();
  l(0, 0) = -2.0 * g;  l(0, 1) = -iw;  l(0, 2) = iw;   l(0, 4) = up;
  l(1, 0) = -iw;       l(1, 1) = -g;   l(1, 3) = iw;
  l(2, 0) = iw;        l(2, 2) = -g;   l(2, 3) = -iw;
  l(3, 0) = p.gamma21; l(3, 1) = iw;   l(3, 2) = -iw;
  l(4, 0) = down;      l(4, 4) = -up;
  return l;
}

double sigma_rate(const SystemParams& p) { return gamma_bar(checked_resonant(p)); }

ReducedGenerator build_m(const SystemParams& params) {
  const SystemParams p = checked_resonant(params);
  const double g = gamma_bar(p);
  const double up = p.n_th * p.gamma20;
  const cplx iw = kI * p.omega_rabi;

  ReducedGenerator r;
  r.gamma_bar = g;
  r.m << -(2.0 * g + up), -iw,  -up,
         -2.0 * iw,       -g,   2.0 * iw,
         p.gamma21,       iw,   0.0;
  return r;
}

CubicCoefficients cubic_coefficients(const SystemParams& params) {
  const SystemParams p = checked_resonant(params);
  const double n = p.n_th;
  const double g20 = p.gamma20;
  const double g21 = p.gamma21;
  const double w2 = p.omega_rabi * p.omega_rabi;
  const double gs = g20 + g21;

  CubicCoefficients k;
  k.a = 0.5 * (5.0 * n * g20 + 3.0 * g20 + 3.0 * g21);
  k.p_big = 4.0 * w2 / 3.0 - gs * gs / 12.0 - n * g20 * g20 / 3.0 - 13.0 / 36.0 * n * n * g20 * g20;
  k.r_big = (3.0 * g21 - 4.0 * n * g20) * w2 / 3.0 - n * g20 * gs * gs / 24.0 -
            n * n * g20 * g20 * g20 * (36.0 + 35.0 * n) / 216.0;
  k.p = 3.0 * k.p_big;
  k.q = -2.0 * k.r_big;
  k.b = k.p + k.a * k.a / 3.0;
  k.c = k.q - 2.0 * k.a * k.a * k.a / 27.0 + k.a * k.b / 3.0;
  k.discriminant = k.r_big * k.r_big + k.p_big * k.p_big * k.p_big;

  // Cross-check the closed forms against det(lambda I - M) at fixed pseudo-random points.
  const Mat3 m = build_m(p).m;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  bool ok = true;
  for (int i = 0; i < 5 && ok; ++i) {
    const cplx z(scale * u(rng), scale * u(rng));
    const cplx det = (z * Mat3::Identity() - m).determinant();
    const cplx poly = char_poly(k.a, k.b, k.c, z);
    const double mag = std::pow(std::abs(z), 3) + std::abs(k.a) * std::norm(z) +
                       std::abs(k.b) * std::abs(z) + std::abs(k.c);
    ok = std::abs(det - poly) <= 1e-8 * mag;
  }
  if (!ok) {
    const double a = -m.trace().real();
    const double b = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) -
                      m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                         .real();
    const double c = -m.determinant().real();
    k = from_abc(a, b, c);
    k.closed_form_consistent = false;
  }
  return k;
}

double discriminant(const SystemParams& p) { return cubic_coefficients(p).discriminant; }

std::array<cplx, 3> cardano_roots(const CubicCoefficients& k) {
  const cplx sqrt_disc = std::sqrt(cplx(k.discriminant, 0.0));
  const cplx plus = k.r_big + sqrt_disc;
  const cplx minus = k.r_big - sqrt_disc;
  const cplx base = std::abs(plus) >= std::abs(minus) ? plus : minus;

  std::array<cplx, 3> x{};
  if (std::abs(base) == 0.0) {
    x = {0.0, 0.0, 0.0};  // P = R = 0: triple root
  } else {
    const cplx u = std::pow(base, 1.0 / 3.0);
    const cplx v = -k.p_big / u;
    const cplx w = std::polar(1.0, kTwoPi / 3.0);
    const cplx w2 = std::conj(w);
    x = {u + v, w * u + w2 * v, w2 * u + w * v};
  }
  std::vector<cplx> roots;
  for (const cplx& xi : x) roots.push_back(xi - k.a / 3.0);
  sort_spectral(roots);
  return {roots[0], roots[1], roots[2]};
}

SqrtFit sqrt_scaling_fit(const EPResult& ep, const SystemParams& params) {
  SystemParams p = checked_resonant(params);
  p.omega_rabi = ep.omega_rabi;

  auto at = [&](double n) {
    SystemParams q = p;
    q.n_th = n;
    return q;
  };
  // Overdamped side: three real roots, Lambda < 0.
  const double probe = 1e-3 * ep.n_th_ep;
  const double side = discriminant(at(ep.n_th_ep + probe)) < 0.0 ? 1.0 : -1.0;

  constexpr int kSamples = 21;
  std::vector<double> lx, ly, offs, drift;
  double c2 = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const double rel = std::pow(10.0, -3.0 + 2.0 * i / (kSamples - 1));
    const double off = rel * ep.n_th_ep;
    const SystemParams q = at(ep.n_th_ep + side * off);
    if (q.n_th < 0.0) continue;
    auto roots = cardano_roots(cubic_coefficients(q));
    std::sort(roots.begin(), roots.end(), [&](cplx l, cplx r) {
      return std::abs(l - ep.lambda_ep) < std::abs(r - ep.lambda_ep);
    });
    const double split = std::abs(roots[0] - roots[1]);
    if (!(split > 1e-10)) {
      throw NumericalError(fmt::format("pair splitting {:.3g} unresolvable at offset {:.3g}", split, off));
    }
    lx.push_back(std::log(off));
    ly.push_back(std::log(split));
    offs.push_back(side * off);
    drift.push_back((0.5 * (roots[0] + roots[1]) - ep.lambda_ep).real());
    if (i == 0) c2 = 0.5 * split / std::sqrt(off);
  }
  if (lx.size() < 3) throw NumericalError("too few samples for the square-root fit");

  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxx = 0, sxy = 0, so = 0, sod = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    so += offs[i] * offs[i];
    sod += offs[i] * drift[i];
  }
  return {sxy / sxx, sod / so, c2};
}

EPResult locate_ep(const SystemParams& params, double n_lo, double n_hi) {
  const SystemParams p = checked_resonant(params);
  if (!(n_lo >= 0.0 && n_hi > n_lo)) throw InvalidArgument("EP search needs 0 <= n_lo < n_hi");

  auto lambda_at = [&](double n) {
    SystemParams q = p;
    q.n_th = n;
    return cubic_coefficients(q);
  };

  constexpr int kScan = 400;
  double lo = n_lo;
  double f_lo = lambda_at(lo).discriminant;
  double hi = lo;
  bool bracketed = f_lo == 0.0;
  for (int i = 1; i <= kScan && !bracketed; ++i) {
    hi = n_lo + (n_hi - n_lo) * i / kScan;
    const double f_hi = lambda_at(hi).discriminant;
    if (f_hi == 0.0 || std::signbit(f_hi) != std::signbit(f_lo)) {
      bracketed = true;
    } else {
      lo = hi;
      f_lo = f_hi;
    }
  }
  if (!bracketed) {
    throw NumericalError(fmt::format(
        "discriminant does not change sign on N_th in [{:g}, {:g}] at Omega/2pi = {:g} MHz", n_lo, n_hi,
        angular_to_mhz(p.omega_rabi)));
  }

  double n_ep = f_lo == 0.0 ? lo : 0.5 * (lo + hi);
  CubicCoefficients k = lambda_at(n_ep);
  auto scale_of = [](const CubicCoefficients& c) {
    return c.r_big * c.r_big + std::abs(c.p_big * c.p_big * c.p_big);
  };
  for (int it = 0; it < 200 && std::abs(k.discriminant) > 1e-12 * scale_of(k); ++it) {
    if (std::signbit(k.discriminant) == std::signbit(f_lo)) {
      lo = n_ep;
    } else {
      hi = n_ep;
    }
    const double next = 0.5 * (lo + hi);
    if (next == n_ep) break;
    n_ep = next;
    k = lambda_at(n_ep);
  }

  EPResult ep;
  ep.n_th_ep = n_ep;
  ep.omega_rabi = p.omega_rabi;
  ep.discriminant_residual = std::abs(k.discriminant) / scale_of(k);

  const auto roots = cardano_roots(k);
  std::size_t a = 0, b = 1;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      if (std::abs(roots[i] - roots[j]) < std::abs(roots[a] - roots[b])) {
        a = i;
        b = j;
      }
    }
  }
  ep.lambda_ep = 0.5 * (roots[a] + roots[b]);

  SystemParams at_ep = p;
  at_ep.n_th = n_ep;
  const Mat3 m = build_m(at_ep).m;
  Eigen::JacobiSVD<Mat3> svd(m - ep.lambda_ep * Mat3::Identity());
  const double tol = 1e-6 * m.norm();
  ep.kernel_dim = static_cast<int>((svd.singularValues().array() < tol).count());
  if (ep.kernel_dim >= 2) {
    throw NumericalError(fmt::format(
        "degeneracy at N_th = {:.6g} is diagonalizable (kernel dimension {}): not an exceptional point",
        n_ep, ep.kernel_dim));
  }

  const SqrtFit fit = sqrt_scaling_fit(ep, p);
  ep.sqrt_fit_exponent = fit.exponent;
  ep.c1 = fit.c1;
  ep.c2 = fit.c2;
  return ep;
}

KappaEff kappa_eff(const SystemParams& params) {
  const SystemParams p = checked_resonant(params);
  const double g = gamma_bar(p);
  const double up = p.n_th * p.gamma20;
  const double w2 = p.omega_rabi * p.omega_rabi;
  const double g21 = p.gamma21;

  KappaEff k;
  k.exact = (g * up * g21 + 4.0 * w2 * (g + up) - 2.0 * w2 * g21) / (2.0 * g * g + g * up + 2.0 * w2);
  k.asymptotic = up > 0.0
                     ? 0.5 * g21 + (24.0 * w2 - g21 * (p.gamma20 + g21)) / (4.0 * up)
                     : std::numeric_limits<double>::infinity();
  return k;
}

AdiabaticCoherences adiabatic_coherences(const SystemParams& params, cplx delta_rho11) {
  const SystemParams p = checked_resonant(params);
  const double g = gamma_bar(p);
  const double up = p.n_th * p.gamma20;
  const double w = p.omega_rabi;
  const double denom = 2.0 * g * g + g * up + 2.0 * w * w;
  if (denom == 0.0) throw NumericalError("adiabatic elimination denominator vanishes");
  return {(2.0 * w * w - g * up) / denom * delta_rho11,
          4.0 * kI * w * (g + up) / denom * delta_rho11};
}

std::vector<cplx> slow_eigenvalues(const SystemParams& p) {
  return eigenvalues(extract_blocks(build_liouvillian(p)).l5);
}

}  // namespace lqb
