#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

// Fourier collocation on the torus [-pi, pi).
//
// Grid points are x_k = k*pi/M for k = -M..M-1 and coefficient vectors are
// indexed by mode j = -M..M-1 (array slot j + M). Linear operators are
// diagonal in coefficient space, given by real filter functions of
// omega_j = sqrt(j^2 + rho).
//
// Transform convention: (F w)_j = (1/2M) sum_k w_k e^{-i j x_k}, no factor
// on the inverse. Both directions are stored as dense matrices built once
// per grid; at the mode counts used here a matrix-vector product is cheap
// and keeps the transform bit-reproducible for any M >= 2.

namespace kglr {

using Eigen::Index;

template <typename Scalar> using RealVector = Eigen::VectorX<Scalar>;
template <typename Scalar> using ComplexVector = Eigen::VectorX<std::complex<Scalar>>;
template <typename Scalar> using ComplexMatrix = Eigen::MatrixX<std::complex<Scalar>>;

// Arguments below these thresholds switch to a truncated Taylor series,
// keeping the removable singularities exact near the rho = 0 zero mode.
// The difference quotient (sinc - cos)/x^2 cancels catastrophically for
// small x (absolute error ~ eps/x^2), so its series branch extends to 1e-2
// where the direct branch is still accurate to ~1e-12.
inline constexpr double sinc_series_switch = 1e-4;
inline constexpr double start_series_switch = 1e-2;

/// sin(x)/x with sinc(0) = 1.
template <typename Scalar>
Scalar sinc(Scalar x) {
  if (std::abs(x) < Scalar(sinc_series_switch)) {
    const Scalar x2 = x * x;
    return Scalar(1) - x2 / Scalar(6) + x2 * x2 / Scalar(120) - x2 * x2 * x2 / Scalar(5040);
  }
  return std::sin(x) / x;
}

/// (sinc(x) - cos(x)) / x^2 with the limit value 1/3 at x = 0.
template <typename Scalar>
Scalar sinc_minus_cos_over_x2(Scalar x) {
  if (std::abs(x) < Scalar(start_series_switch)) {
    const Scalar x2 = x * x;
    return Scalar(1) / Scalar(3) - x2 / Scalar(30) + x2 * x2 / Scalar(840) -
           x2 * x2 * x2 / Scalar(45360);
  }
  return (sinc(x) - std::cos(x)) / (x * x);
}

template <typename Scalar>
struct Grid {
  Index M = 0;                    // half mode count; the grid has 2M points
  Scalar rho = 0;                 // mass parameter
  RealVector<Scalar> points;      // x_k = k*pi/M, slot k + M
  RealVector<Scalar> omega;       // omega_j = sqrt(j^2 + rho), slot j + M
  ComplexMatrix<Scalar> forward;  // (1/2M) e^{-i j x_k}
  ComplexMatrix<Scalar> inverse;  // e^{i j x_k}

  Index size() const { return 2 * M; }
  Index slot(Index j) const { return j + M; }  // mode index -> array slot
};

template <typename Scalar = double>
Grid<Scalar> make_grid(Index M, Scalar rho) {
  if (M < 2) throw std::invalid_argument("make_grid: M must be >= 2");
  if (!(rho >= Scalar(0))) throw std::invalid_argument("make_grid: rho must be >= 0");

  Grid<Scalar> grid;
  grid.M = M;
  grid.rho = rho;
  const Index n = 2 * M;
  grid.points.resize(n);
  grid.omega.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Index j = i - M;
    grid.points[i] = Scalar(j) * std::numbers::pi_v<Scalar> / Scalar(M);
    grid.omega[i] = std::sqrt(Scalar(j) * Scalar(j) + rho);
  }

  // Twiddle table W[m] = e^{2 pi i m / 2M} with the conjugate half mirrored
  // bitwise and the real entries pinned, so transforming a real field gives
  // exactly conjugate-symmetric coefficients. Without this, a 1-ulp row
  // asymmetry acts as a perturbation seed that chaotic trajectories amplify.
  std::vector<std::complex<Scalar>> twiddle(n);
  twiddle[0] = std::complex<Scalar>(1, 0);
  twiddle[M] = std::complex<Scalar>(-1, 0);
  for (Index m = 1; m < M; ++m) {
    const Scalar angle = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(m) / Scalar(n);
    twiddle[m] = std::polar(Scalar(1), angle);
    twiddle[n - m] = std::conj(twiddle[m]);
  }

  grid.forward.resize(n, n);
  grid.inverse.resize(n, n);
  const Scalar scale = Scalar(1) / Scalar(n);
  for (Index r = 0; r < n; ++r) {
    const Index j = r - M;
    for (Index c = 0; c < n; ++c) {
      const Index k = c - M;
      const Index m = ((j * k) % n + n) % n;  // e^{i j x_k} = W[j k mod 2M]
      grid.inverse(c, r) = twiddle[m];
      grid.forward(r, c) = std::conj(twiddle[m]) * scale;
    }
  }
  return grid;
}

/// Forward transform of real grid samples into coefficient space.
template <typename Scalar>
ComplexVector<Scalar> to_spectral(const RealVector<Scalar>& field, const Grid<Scalar>& grid) {
  if (field.size() != grid.size())
    throw std::invalid_argument("to_spectral: field length does not match grid");
  return grid.forward * field.template cast<std::complex<Scalar>>();
}

/// Inverse transform back to real grid samples. The coefficients must be
/// conjugate-symmetric; the imaginary residue is checked and discarded.
template <typename Scalar>
RealVector<Scalar> from_spectral(const ComplexVector<Scalar>& coeffs, const Grid<Scalar>& grid) {
  if (coeffs.size() != grid.size())
    throw std::invalid_argument("from_spectral: coefficient length does not match grid");
  const ComplexVector<Scalar> w = grid.inverse * coeffs;
  const Scalar re = w.real().template lpNorm<Eigen::Infinity>();
  const Scalar im = w.imag().template lpNorm<Eigen::Infinity>();
  if (im > Scalar(1e-12) * (re + im))
    throw std::invalid_argument("from_spectral: coefficients are not conjugate-symmetric");
  return w.real();
}

enum class FilterKind {
  Cos,            // cos(h omega)
  Sinc,           // sinc(h omega)
  SinTimesOmega,  // omega * sin(h omega)
  CosPlusSinc,    // cos(h omega) + sinc(h omega)
  StartSingular,  // (sinc(h omega) - cos(h omega)) / (h omega)^2
};

template <typename Scalar>
Scalar eval_filter(FilterKind kind, Scalar h, Scalar omega) {
  const Scalar x = h * omega;
  switch (kind) {
    case FilterKind::Cos:
      return std::cos(x);
    case FilterKind::Sinc:
      return sinc(x);
    case FilterKind::SinTimesOmega:
      return omega * std::sin(x);
    case FilterKind::CosPlusSinc:
      return std::cos(x) + sinc(x);
    case FilterKind::StartSingular:
      return sinc_minus_cos_over_x2(x);
  }
  throw std::logic_error("eval_filter: unknown filter kind");
}

/// Filter evaluated on every grid frequency, ready for cwise application.
template <typename Scalar>
RealVector<Scalar> filter_values(FilterKind kind, Scalar h, const Grid<Scalar>& grid) {
  return grid.omega.unaryExpr([kind, h](Scalar w) { return eval_filter(kind, h, w); });
}

/// Coefficientwise product of a real diagonal with a coefficient vector.
template <typename Scalar>
ComplexVector<Scalar> apply_diag(const RealVector<Scalar>& diag, const ComplexVector<Scalar>& coeffs) {
  return coeffs.cwiseProduct(diag.template cast<std::complex<Scalar>>());
}

/// Applies the diagonal operator kind(h sqrt(A)) in coefficient space.
template <typename Scalar>
ComplexVector<Scalar> apply_symbol(FilterKind kind, Scalar h, const Grid<Scalar>& grid,
                                   const ComplexVector<Scalar>& coeffs) {
  if (coeffs.size() != grid.size())
    throw std::invalid_argument("apply_symbol: coefficient length does not match grid");
  return apply_diag(filter_values(kind, h, grid), coeffs);
}

/// Weighted Sobolev norm (sum_j omega_j^{2s} |c_j|^2)^{1/2}. At a zero
/// frequency the weight is 1 for s = 0 and 0 otherwise, so s = 0 is the
/// plain coefficient norm and negative s drops the zero mode.
template <typename Scalar>
Scalar hs_norm(const ComplexVector<Scalar>& coeffs, Scalar s, const Grid<Scalar>& grid) {
  if (coeffs.size() != grid.size())
    throw std::invalid_argument("hs_norm: coefficient length does not match grid");
  Scalar sum = 0;
  for (Index i = 0; i < coeffs.size(); ++i) {
    const Scalar w = grid.omega[i];
    Scalar weight;
    if (w == Scalar(0)) {
      weight = (s == Scalar(0)) ? Scalar(1) : Scalar(0);
    } else if (s == Scalar(0)) {
      weight = Scalar(1);
    } else if (s == Scalar(1)) {
      weight = w * w;
    } else {
      weight = std::pow(w, Scalar(2) * s);
    }
    sum += weight * std::norm(coeffs[i]);
  }
  return std::sqrt(sum);
}

}  // namespace kglr
