#include "lqb/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "lqb/errors.hpp"

namespace lqb {

namespace {

constexpr double kZeroModeTol = 1e-9;

// Insertion sort: descending real part, ascending imaginary part when the real
// parts agree to rounding. The tolerant comparison is not a strict weak order,
// so std::sort is avoided.
std::vector<std::size_t> spectral_order(const std::vector<cplx>& ev) {
  std::vector<std::size_t> idx(ev.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto before = [&](std::size_t a, std::size_t b) {
    const double scale = std::max({1.0, std::abs(ev[a]), std::abs(ev[b])});
    const double dr = ev[a].real() - ev[b].real();
    if (std::abs(dr) > 1e-12 * scale) return dr > 0.0;
    return ev[a].imag() < ev[b].imag();
  };
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0 && before(idx[j], idx[j - 1]); --j) std::swap(idx[j], idx[j - 1]);
  }
  return idx;
}

}  // namespace

std::size_t Spectrum::zero_mode() const {
  std::size_t best = 0;
  for (std::size_t a = 1; a < eigenvalues.size(); ++a) {
    if (std::abs(eigenvalues[a]) < std::abs(eigenvalues[best])) best = a;
  }
  return best;
}

std::size_t Spectrum::count_near_zero(double tol) const {
  return static_cast<std::size_t>(std::count_if(eigenvalues.begin(), eigenvalues.end(),
                                                [tol](cplx z) { return std::abs(z) < tol; }));
}

Spectrum eigendecompose(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument("eigendecompose expects a non-empty square matrix");
  }
  const Eigen::Index n = m.rows();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, true);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");

  std::vector<cplx> raw(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  const auto order = spectral_order(raw);

  Spectrum s;
  s.eigenvalues.resize(raw.size());
  s.right.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    s.eigenvalues[a] = raw[order[a]];
    s.right.col(a) = solver.eigenvectors().col(static_cast<Eigen::Index>(order[a]));
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s.right);
  const auto& sv = svd.singularValues();
  s.condition_number = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
  s.defective = !(s.condition_number <= kDefectiveCondition);

  // Rows of R^{-1} are the left eigenvectors; conjugate-transpose so columns hold |L_a>.
  s.left = s.right.fullPivLu().inverse().adjoint();
  return s;
}

void sort_spectral(std::vector<cplx>& values) {
  const auto order = spectral_order(values);
  std::vector<cplx> sorted;
  sorted.reserve(values.size());
  for (auto i : order) sorted.push_back(values[i]);
  values = std::move(sorted);
}

std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  std::vector<cplx> raw(solver.eigenvalues().data(),
                        solver.eigenvalues().data() + solver.eigenvalues().size());
  const auto order = spectral_order(raw);
  std::vector<cplx> out;
  out.reserve(raw.size());
  for (auto i : order) out.push_back(raw[i]);
  return out;
}

double gap_of(const std::vector<cplx>& ev, bool with_zero_mode) {
  std::size_t skip = ev.size();
  if (with_zero_mode) {
    skip = 0;
    for (std::size_t a = 1; a < ev.size(); ++a) {
      if (std::abs(ev[a]) < std::abs(ev[skip])) skip = a;
    }
  }
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < ev.size(); ++a) {
    if (a != skip) top = std::max(top, ev[a].real());
  }
  return -top;
}

cplx dominant_nonzero(const std::vector<cplx>& ev) {
  if (ev.size() < 2) throw InvalidArgument("dominant_nonzero needs at least two eigenvalues");
  std::size_t zero = 0;
  for (std::size_t a = 1; a < ev.size(); ++a) {
    if (std::abs(ev[a]) < std::abs(ev[zero])) zero = a;
  }
  std::size_t dom = zero == 0 ? 1 : 0;
  for (std::size_t a = 0; a < ev.size(); ++a) {
    if (a != zero && ev[a].real() > ev[dom].real()) dom = a;
  }
  return ev[dom];
}

GapReport gaps(const SuperOp& sop) {
  const auto full = eigenvalues(sop.matrix);
  const auto near_zero = std::count_if(full.begin(), full.end(),
                                       [](cplx z) { return std::abs(z) < kZeroModeTol; });
  if (near_zero > 1) {
    throw DegenerateSteadyState(
        fmt::format("{} eigenvalues within {:g} of zero: dynamics is not primitive", near_zero,
                    kZeroModeTol));
  }
  const LiouvillianBlocks blocks = extract_blocks(sop);
  const auto slow = eigenvalues(blocks.l5);
  auto left = eigenvalues(blocks.l2_left);
  const auto right = eigenvalues(blocks.l2_right);
  left.insert(left.end(), right.begin(), right.end());

  GapReport g;
  g.delta = gap_of(full, true);
  g.delta_slow = gap_of(slow, true);
  g.delta_l2 = gap_of(left, false);
  return g;
}

DensityMatrix steady_state(const SuperOp& sop) {
  Mat9 a = sop.matrix;
  const int row = vec_index(0, 0);
  a.row(row) = trace_functional().transpose();
  Vec9 b = Vec9::Zero();
  b(row) = 1.0;

  Eigen::FullPivLU<Mat9> lu(a);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw DegenerateSteadyState("steady state is not unique (generator null space has dimension > 1)");
  }
  const Vec9 x = lu.solve(b);
  const Mat3 rho = hermitize(devectorize(x));
  const double residual = (sop.matrix * vectorize(rho)).norm();
  const double scale = std::max(1.0, sop.matrix.cwiseAbs().maxCoeff());
  if (!(residual < 1e-12 * scale)) {
    throw NumericalError(fmt::format("steady-state residual {:.3g} too large", residual));
  }
  return DensityMatrix::from_matrix(rho, {1e-10, 1e-10, 1e-10});
}

std::vector<cplx> expansion_coefficients(const DensityMatrix& rho0, const Spectrum& spectrum) {
  if (spectrum.defective) {
    throw NumericalError(fmt::format(
        "spectral expansion refused: eigenbasis condition number {:.3g} marks a defective point",
        spectrum.condition_number));
  }
  if (spectrum.size() != 9) throw InvalidArgument("expansion needs the full 9-mode spectrum");
  const Vec9 v = vectorize(rho0);
  std::vector<cplx> c(spectrum.size());
  for (std::size_t a = 0; a < spectrum.size(); ++a) {
    c[a] = spectrum.left.col(static_cast<Eigen::Index>(a)).dot(v);  // conjugates the left vector
  }
  return c;
}

Mat3 reconstruct(const Spectrum& spectrum, const std::vector<cplx>& coefficients, double t) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(spectrum.size()));
  for (std::size_t a = 0; a < spectrum.size(); ++a) {
    v += coefficients[a] * std::exp(spectrum.eigenvalues[a] * t) *
         spectrum.right.col(static_cast<Eigen::Index>(a));
  }
  return devectorize(v);
}

}  // namespace lqb
