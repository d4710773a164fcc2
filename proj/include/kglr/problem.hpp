#pragma once

#include "kglr/rng.hpp"
#include "kglr/spectral.hpp"

#include <cstdint>
#include <stdexcept>

// Klein-Gordon problem data on the torus:
//
//   u_tt - u_xx + rho u = f(u),
//
// written in coefficient space as q'' + Omega^2 q = F f(F^-1 q) with the
// diagonal frequency operator Omega. Each nonlinearity tag carries the pair
// (f, U) with f = -U' and U >= 0, so the semi-discrete system is Hamiltonian
// with energy
//
//   H_M(q, p) = 1/2 sum_j (|p_j|^2 + omega_j^2 |q_j|^2) + 1/2M sum_k U(u(x_k)).

namespace kglr {

enum class Nonlinearity {
  Zero,             // f = 0, U = 0 (linear runs)
  Sine,             // f(u) = sin(u),  U(u) = 1 + cos(u)
  CubicDefocusing,  // f(u) = -u^3,    U(u) = u^4 / 4
};

// Optional instrumentation hook: counts pointwise nonlinearity evaluations.
// Attach one to a ProblemSpec copy to audit the per-step evaluation budget.
struct EvalCounter {
  long long f_evals = 0;
  long long f_prime_evals = 0;
};

template <typename Scalar>
struct ProblemSpec {
  Scalar rho = 0;
  Nonlinearity nonlinearity = Nonlinearity::Sine;
  Scalar theta = 1;       // regularity exponent of the random initial data
  Scalar data_scale = 1;  // multiplier applied to the normalized data
  std::uint64_t seed = 0;
  EvalCounter* counter = nullptr;  // instrumentation only, not part of the value
};

template <typename Scalar>
ProblemSpec<Scalar> with_counter(ProblemSpec<Scalar> spec, EvalCounter* counter) {
  spec.counter = counter;
  return spec;
}

/// Pointwise nonlinearity on grid samples.
template <typename Scalar>
RealVector<Scalar> eval_f(const ProblemSpec<Scalar>& spec, const RealVector<Scalar>& field) {
  if (spec.counter) ++spec.counter->f_evals;
  switch (spec.nonlinearity) {
    case Nonlinearity::Zero:
      return RealVector<Scalar>::Zero(field.size());
    case Nonlinearity::Sine:
      return field.array().sin();
    case Nonlinearity::CubicDefocusing:
      return -field.array().cube();
  }
  throw std::logic_error("eval_f: unknown nonlinearity");
}

/// Pointwise derivative f'(u) on grid samples.
template <typename Scalar>
RealVector<Scalar> eval_f_prime(const ProblemSpec<Scalar>& spec, const RealVector<Scalar>& field) {
  if (spec.counter) ++spec.counter->f_prime_evals;
  switch (spec.nonlinearity) {
    case Nonlinearity::Zero:
      return RealVector<Scalar>::Zero(field.size());
    case Nonlinearity::Sine:
      return field.array().cos();
    case Nonlinearity::CubicDefocusing:
      return Scalar(-3) * field.array().square();
  }
  throw std::logic_error("eval_f_prime: unknown nonlinearity");
}

/// Potential with f = -U' and U >= 0.
template <typename Scalar>
Scalar eval_U(const ProblemSpec<Scalar>& spec, Scalar u) {
  switch (spec.nonlinearity) {
    case Nonlinearity::Zero:
      return Scalar(0);
    case Nonlinearity::Sine:
      return Scalar(1) + std::cos(u);
    case Nonlinearity::CubicDefocusing:
      return u * u * u * u / Scalar(4);
  }
  throw std::logic_error("eval_U: unknown nonlinearity");
}

/// Nonlinearity in coefficient space: F f(F^-1 q).
template <typename Scalar>
ComplexVector<Scalar> spectral_f(const ProblemSpec<Scalar>& spec, const Grid<Scalar>& grid,
                                 const ComplexVector<Scalar>& q) {
  return to_spectral<Scalar>(eval_f(spec, from_spectral(q, grid)), grid);
}

template <typename Scalar>
struct SpectralState {
  ComplexVector<Scalar> q;  // displacement coefficients
  ComplexVector<Scalar> p;  // velocity coefficients
  Scalar t = 0;
};

/// Discrete energy H_M; conserved exactly by the semi-discrete flow.
template <typename Scalar>
Scalar discrete_energy(const ProblemSpec<Scalar>& spec, const Grid<Scalar>& grid,
                       const SpectralState<Scalar>& state) {
  const Scalar q_h1 = hs_norm(state.q, Scalar(1), grid);
  const Scalar p_l2 = hs_norm(state.p, Scalar(0), grid);
  const RealVector<Scalar> u = from_spectral(state.q, grid);
  Scalar potential = 0;
  for (Index k = 0; k < u.size(); ++k) potential += eval_U(spec, u[k]);
  potential /= Scalar(u.size());
  return (q_h1 * q_h1 + p_l2 * p_l2) / Scalar(2) + potential;
}

// Random data from H^theta x H^{theta-1}: coefficients decay like
// <j>^{-theta-1/2} for q and <j>^{-theta+1/2} for p, mirrored for a real
// field, Nyquist mode zeroed, then rescaled to ||q||_{H^1} = ||p||_{L^2} =
// data_scale.
//
// Stream split: the first two outputs of SplitMix64(seed) seed one substream
// for q and one for p. Draw order is mode 0 first, then j = 1..M-1 with the
// real part before the imaginary part, so the data is a pure function of
// (seed, M, theta, data_scale).
template <typename Scalar>
SpectralState<Scalar> rough_initial_data(const ProblemSpec<Scalar>& spec, const Grid<Scalar>& grid) {
  if (!(spec.theta > Scalar(0)))
    throw std::invalid_argument("rough_initial_data: theta must be > 0");
  if (!(spec.data_scale > Scalar(0)))
    throw std::invalid_argument("rough_initial_data: data_scale must be > 0");

  SplitMix64 master(spec.seed);
  SplitMix64 q_stream(master.next());
  SplitMix64 p_stream(master.next());

  const Index M = grid.M;
  SpectralState<Scalar> state;
  state.q = ComplexVector<Scalar>::Zero(2 * M);
  state.p = ComplexVector<Scalar>::Zero(2 * M);
  state.t = 0;

  for (;;) {
    state.q[grid.slot(0)] = Scalar(q_stream.next_symmetric());
    state.p[grid.slot(0)] = Scalar(p_stream.next_symmetric());
    for (Index j = 1; j < M; ++j) {
      const Scalar q_decay = std::pow(Scalar(j), -spec.theta - Scalar(0.5));
      const Scalar p_decay = std::pow(Scalar(j), -spec.theta + Scalar(0.5));
      const Scalar q_re = Scalar(q_stream.next_symmetric());
      const Scalar q_im = Scalar(q_stream.next_symmetric());
      const Scalar p_re = Scalar(p_stream.next_symmetric());
      const Scalar p_im = Scalar(p_stream.next_symmetric());
      state.q[grid.slot(j)] = std::complex<Scalar>(q_re, q_im) * q_decay;
      state.q[grid.slot(-j)] = std::complex<Scalar>(q_re, -q_im) * q_decay;
      state.p[grid.slot(j)] = std::complex<Scalar>(p_re, p_im) * p_decay;
      state.p[grid.slot(-j)] = std::complex<Scalar>(p_re, -p_im) * p_decay;
    }
    const Scalar q_norm = hs_norm(state.q, Scalar(1), grid);
    const Scalar p_norm = hs_norm(state.p, Scalar(0), grid);
    if (q_norm > Scalar(0) && p_norm > Scalar(0)) {
      state.q *= spec.data_scale / q_norm;
      state.p *= spec.data_scale / p_norm;
      return state;
    }
    // zero-norm draw: keep consuming the streams and try again
  }
}

/// Exact flow of the linear equation q'' + Omega^2 q = 0, advanced by t
/// (t may be negative). The rho = 0 zero mode is the free particle
/// q_0(t) = q_0 + t p_0.
template <typename Scalar>
SpectralState<Scalar> linear_flow(const Grid<Scalar>& grid, const SpectralState<Scalar>& state,
                                  Scalar t) {
  if (state.q.size() != grid.size() || state.p.size() != grid.size())
    throw std::invalid_argument("linear_flow: state length does not match grid");
  const Index n = grid.size();
  SpectralState<Scalar> out;
  out.q.resize(n);
  out.p.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Scalar w = grid.omega[i];
    const Scalar c = std::cos(t * w);
    const Scalar ts = t * sinc(t * w);
    const Scalar ws = w * std::sin(t * w);
    out.q[i] = c * state.q[i] + ts * state.p[i];
    out.p[i] = -ws * state.q[i] + c * state.p[i];
  }
  out.t = state.t + t;
  return out;
}

}  // namespace kglr
