#pragma once

#include "kglr/integrators.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

// Benchmark harness: convergence-order sweeps against a fine self-reference,
// efficiency sweeps with wall-clock timing, long-time energy-drift series,
// and the reversibility defect of the two-step scheme. All sweeps are
// deterministic functions of the config (timings excluded).

namespace kglr {

enum class ExperimentKind { Convergence, Efficiency, EnergyDrift, Reversibility };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Convergence;
  Index M = 0;
  double theta = 0;
  double rho = 0;
  Nonlinearity nonlinearity = Nonlinearity::Sine;
  std::uint64_t seed = 0;
  std::vector<MethodTag> methods;
  std::vector<double> step_sizes;  // strictly decreasing
  double T_final = 0;
  double data_scale = 1;
  std::optional<double> h_ref;  // reference step, convergence/efficiency only
  Index observe_every = 1;

  bool operator==(const ExperimentConfig&) const = default;

  ProblemSpec<double> problem() const {
    return {rho, nonlinearity, theta, data_scale, seed, nullptr};
  }
};

struct RunRecord {
  MethodTag method = MethodTag::SLR;
  double h = 0;
  double err = 0;
  double wall_seconds = 0;
  std::optional<double> estimated_order;
  std::vector<std::pair<double, double>> energy_series;  // (t, relative drift)
  bool aborted = false;
  std::string abort_message;
};

/// Relative H^1 x L^2 distance: ||q - q_ref||_{H^1} / ||q_ref||_{H^1} +
/// ||p - p_ref||_{L^2} / ||p_ref||_{L^2}. Rejects references with a zero norm.
double relative_err(const SpectralState<double>& num, const SpectralState<double>& ref,
                    const Grid<double>& grid);

/// Pairwise slopes log(err_i / err_{i+1}) / log(h_i / h_{i+1}) for strictly
/// decreasing step sizes and positive errors.
std::vector<double> estimate_order(const std::vector<std::pair<double, double>>& errs);

/// Fine SLR trajectory at step h_ref, evaluated at time T. When cache_dir is
/// nonempty the result is stored on disk keyed by a content hash of every
/// trajectory-determining input, and a cache hit is returned bit-identically.
SpectralState<double> reference_solution(const ProblemSpec<double>& spec, const Grid<double>& grid,
                                         const SpectralState<double>& init, double T, double h_ref,
                                         const std::filesystem::path& cache_dir = {});

/// Error-vs-h sweep for every method in the config. Aborted runs are flagged
/// in their record, not fatal to the sweep.
std::vector<RunRecord> run_convergence(const ExperimentConfig& cfg,
                                       const std::filesystem::path& cache_dir = {}, int jobs = 1);

/// Convergence sweep plus stepping-loop wall time (median of 3 after one
/// discarded warm-up; always sequential).
std::vector<RunRecord> run_efficiency(const ExperimentConfig& cfg,
                                      const std::filesystem::path& cache_dir = {});

/// Per-method series of (t_n, |H(t_n) - H(0)| / |H(0)|) over [0, T_final].
std::vector<RunRecord> run_energy_drift(const ExperimentConfig& cfg, int jobs = 1);

/// n_steps two-step updates after the starting step, then the backward
/// recurrence the same number of times; returns the relative H^1 x L^2
/// defect of the recovered initial state (0/0 counts as 0).
double reversibility_check(const ProblemSpec<double>& spec, const Grid<double>& grid,
                           const SpectralState<double>& init, double h, long long n_steps);

}  // namespace kglr
