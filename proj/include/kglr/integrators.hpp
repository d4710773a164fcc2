#pragma once

#include "kglr/problem.hpp"

#include <stdexcept>
#include <string>
#include <vector>

/*
 Time-stepping schemes for q'' + Omega^2 q = ftilde(q), ftilde = F f(F^-1 .):

 SLR -- symmetric low-regularity two-step scheme:

    q_{n+1} = 2 cos(h Omega) q_n - q_{n-1} + h^2 sinc(h Omega) ftilde(q_n)
    p_{n+1} = -2 Omega sin(h Omega) q_n + p_{n-1}
              + h (cos(h Omega) + sinc(h Omega)) ftilde(q_n)

 One ftilde evaluation per step; the defining relation is invariant under
 (h, n+1, n-1) -> (-h, n-1, n+1), so the recurrence is exactly invertible
 (slr_step_backward). Started with one LR23 step.

 LR23 -- one-step low-regularity scheme, also iterated as a comparator:

    q+ = cos(h Omega) q + h sinc(h Omega) p + h^2/2 sinc(h Omega) ftilde(q)
         + h^3/2 g(h Omega) F[f'(u) v],   g(x) = (sinc x - cos x) / x^2
    p+ = -Omega sin(h Omega) q + cos(h Omega) p
         + h/2 (cos(h Omega) + sinc(h Omega)) ftilde(q)
         + h^2/2 sinc(h Omega) F[f'(u) v]

 TI -- Deuflhard-type trigonometric integrator (classical comparator,
 filters phi = 1, psi = sinc):

    q+ = cos(h Omega) q + h sinc(h Omega) p + h^2/2 sinc(h Omega) ftilde(q)
    p+ = -Omega sin(h Omega) q + cos(h Omega) p
         + h/2 (cos(h Omega) ftilde(q) + ftilde(q+))

 Two ftilde evaluations per step. Accepts a signed step so the adjoint
 composition can be checked directly.
*/

namespace kglr {

enum class MethodTag { SLR, LR23, TI };

template <typename Scalar>
struct TwoStepState {
  SpectralState<Scalar> prev;  // u_{n-1}, v_{n-1} at t_{n-1}
  SpectralState<Scalar> curr;  // u_n, v_n at t_n
  Scalar h = 0;
};

class NonFiniteStateError : public std::runtime_error {
 public:
  explicit NonFiniteStateError(long long step)
      : std::runtime_error("non-finite state detected at step " + std::to_string(step)),
        step_(step) {}
  long long step() const { return step_; }

 private:
  long long step_;
};

template <typename Scalar>
SpectralState<Scalar> lr23_step(const ProblemSpec<Scalar>& spec, const Grid<Scalar>& grid,
                                const SpectralState<Scalar>& state, Scalar h) {
  if (!(h > Scalar(0) && h < Scalar(1)))
    throw std::invalid_argument("lr23_step: step size must lie in (0, 1)");

  const RealVector<Scalar> u = from_spectral(state.q, grid);
  const RealVector<Scalar> v = from_spectral(state.p, grid);
  const ComplexVector<Scalar> f_hat = to_spectral<Scalar>(eval_f(spec, u), grid);
  const ComplexVector<Scalar> g_hat =
      to_spectral<Scalar>(eval_f_prime(spec, u).cwiseProduct(v), grid);

  const RealVector<Scalar> cos_h = filter_values(FilterKind::Cos, h, grid);
  const RealVector<Scalar> sinc_h = filter_values(FilterKind::Sinc, h, grid);
  const RealVector<Scalar> wsin_h = filter_values(FilterKind::SinTimesOmega, h, grid);
  const RealVector<Scalar> both_h = filter_values(FilterKind::CosPlusSinc, h, grid);
  const RealVector<Scalar> start_h = filter_values(FilterKind::StartSingular, h, grid);

  SpectralState<Scalar> next;
  next.q = apply_diag(cos_h, state.q) + apply_diag<Scalar>(h * sinc_h, state.p) +
           apply_diag<Scalar>(h * h / 2 * sinc_h, f_hat) +
           apply_diag<Scalar>(h * h * h / 2 * start_h, g_hat);
  next.p = -apply_diag(wsin_h, state.q) + apply_diag(cos_h, state.p) +
           apply_diag<Scalar>(h / 2 * both_h, f_hat) +
           apply_diag<Scalar>(h * h / 2 * sinc_h, g_hat);
  next.t = state.t + h;
  return next;
}

/// Builds the two-step window (u_0, u_1) from the initial state.
template <typename Scalar>
TwoStepState<Scalar> slr_start(const ProblemSpec<Scalar>& spec, const Grid<Scalar>& grid,
                               const SpectralState<Scalar>& init, Scalar h) {
  TwoStepState<Scalar> ts;
  ts.prev = init;
  ts.curr = lr23_step(spec, grid, init, h);
  ts.h = h;
  return ts;
}

template <typename Scalar>
TwoStepState<Scalar> slr_step(const ProblemSpec<Scalar>& spec, const Grid<Scalar>& grid,
                              const TwoStepState<Scalar>& ts) {
  const Scalar h = ts.h;
  const ComplexVector<Scalar> f_hat = spectral_f(spec, grid, ts.curr.q);

  const RealVector<Scalar> cos2_h = 2 * filter_values(FilterKind::Cos, h, grid);
  const RealVector<Scalar> wsin2_h = 2 * filter_values(FilterKind::SinTimesOmega, h, grid);
  const RealVector<Scalar> sinc_h = filter_values(FilterKind::Sinc, h, grid);
  const RealVector<Scalar> both_h = filter_values(FilterKind::CosPlusSinc, h, grid);

  TwoStepState<Scalar> out;
  out.h = h;
  out.prev = ts.curr;
  out.curr.q = apply_diag(cos2_h, ts.curr.q) - ts.prev.q +
               apply_diag<Scalar>(h * h * sinc_h, f_hat);
  out.curr.p = -apply_diag(wsin2_h, ts.curr.q) + ts.prev.p +
               apply_diag<Scalar>(h * both_h, f_hat);
  out.curr.t = ts.curr.t + h;
  return out;
}

/// The two-step recurrence solved for the earlier pair: from the window
/// (u_n, u_{n+1}) recovers (u_{n-1}, u_n). Uses the same filter values as
/// the forward step, so forward-then-backward cancels to round-off.
template <typename Scalar>
TwoStepState<Scalar> slr_step_backward(const ProblemSpec<Scalar>& spec, const Grid<Scalar>& grid,
                                       const TwoStepState<Scalar>& ts) {
  const Scalar h = ts.h;
  const ComplexVector<Scalar> f_hat = spectral_f(spec, grid, ts.prev.q);

  const RealVector<Scalar> cos2_h = 2 * filter_values(FilterKind::Cos, h, grid);
  const RealVector<Scalar> wsin2_h = 2 * filter_values(FilterKind::SinTimesOmega, h, grid);
  const RealVector<Scalar> sinc_h = filter_values(FilterKind::Sinc, h, grid);
  const RealVector<Scalar> both_h = filter_values(FilterKind::CosPlusSinc, h, grid);

  TwoStepState<Scalar> out;
  out.h = h;
  out.curr = ts.prev;
  out.prev.q = apply_diag(cos2_h, ts.prev.q) - ts.curr.q +
               apply_diag<Scalar>(h * h * sinc_h, f_hat);
  out.prev.p = ts.curr.p + apply_diag(wsin2_h, ts.prev.q) -
               apply_diag<Scalar>(h * both_h, f_hat);
  out.prev.t = ts.prev.t - h;
  return out;
}

template <typename Scalar>
SpectralState<Scalar> ti_step(const ProblemSpec<Scalar>& spec, const Grid<Scalar>& grid,
                              const SpectralState<Scalar>& state, Scalar h) {
  if (!(h != Scalar(0) && std::abs(h) < Scalar(1)))
    throw std::invalid_argument("ti_step: step size must satisfy 0 < |h| < 1");

  const ComplexVector<Scalar> f_hat = spectral_f(spec, grid, state.q);

  const RealVector<Scalar> cos_h = filter_values(FilterKind::Cos, h, grid);
  const RealVector<Scalar> sinc_h = filter_values(FilterKind::Sinc, h, grid);
  const RealVector<Scalar> wsin_h = filter_values(FilterKind::SinTimesOmega, h, grid);

  SpectralState<Scalar> next;
  next.q = apply_diag(cos_h, state.q) + apply_diag<Scalar>(h * sinc_h, state.p) +
           apply_diag<Scalar>(h * h / 2 * sinc_h, f_hat);
  const ComplexVector<Scalar> f_hat_next = spectral_f(spec, grid, next.q);
  next.p = -apply_diag(wsin_h, state.q) + apply_diag(cos_h, state.p) +
           apply_diag<Scalar>(h / 2 * cos_h, f_hat) +
           Scalar(h / 2) * f_hat_next;
  next.t = state.t + h;
  return next;
}

template <typename Scalar>
struct Observation {
  Scalar t = 0;
  Scalar energy = 0;
  Scalar h1_norm = 0;  // || q ||_{H^1}
  Scalar l2_norm = 0;  // || p ||_{L^2}
};

template <typename Scalar>
struct IntegrationResult {
  SpectralState<Scalar> final_state;
  std::vector<Observation<Scalar>> observations;
};

/// Runs n = T/h steps of the chosen method, recording (t, energy, norms)
/// every observe_every steps plus the initial and final states. T must be
/// an integer multiple of h up to 1e-9 relative. Any non-finite coefficient
/// aborts with the failing step index.
template <typename Scalar>
IntegrationResult<Scalar> integrate(MethodTag method, const ProblemSpec<Scalar>& spec,
                                    const Grid<Scalar>& grid, const SpectralState<Scalar>& init,
                                    Scalar h, Scalar T, Index observe_every = 1) {
  if (!(T > Scalar(0))) throw std::invalid_argument("integrate: T must be > 0");
  if (observe_every < 1) throw std::invalid_argument("integrate: observe_every must be >= 1");
  const long long n = std::llround(double(T / h));
  if (n < 1 || std::abs(Scalar(n) * h - T) > Scalar(1e-9) * T)
    throw std::invalid_argument("integrate: T is not an integer multiple of h");

  IntegrationResult<Scalar> out;
  out.observations.reserve(static_cast<std::size_t>(n / observe_every) + 2);
  auto observe = [&](const SpectralState<Scalar>& s) {
    out.observations.push_back({s.t, discrete_energy(spec, grid, s),
                                hs_norm(s.q, Scalar(1), grid), hs_norm(s.p, Scalar(0), grid)});
  };
  auto ensure_finite = [](const SpectralState<Scalar>& s, long long step) {
    if (!s.q.allFinite() || !s.p.allFinite()) throw NonFiniteStateError(step);
  };

  observe(init);
  if (method == MethodTag::SLR) {
    TwoStepState<Scalar> ts = slr_start(spec, grid, init, h);
    ensure_finite(ts.curr, 1);
    if (1 % observe_every == 0 || n == 1) observe(ts.curr);
    for (long long k = 2; k <= n; ++k) {
      ts = slr_step(spec, grid, ts);
      ensure_finite(ts.curr, k);
      if (k % observe_every == 0 || k == n) observe(ts.curr);
    }
    out.final_state = ts.curr;
  } else {
    SpectralState<Scalar> s = init;
    for (long long k = 1; k <= n; ++k) {
      s = (method == MethodTag::LR23) ? lr23_step(spec, grid, s, h) : ti_step(spec, grid, s, h);
      ensure_finite(s, k);
      if (k % observe_every == 0 || k == n) observe(s);
    }
    out.final_state = s;
  }
  return out;
}

}  // namespace kglr
