#include "kglr/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

namespace kglr {
namespace {

void run_jobs(int jobs, Index count, const std::function<void(Index)>& work) {
  if (jobs <= 1 || count <= 1) {
    for (Index i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<Index> next{0};
  const int workers = static_cast<int>(std::min<Index>(jobs, count));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (Index i = next.fetch_add(1); i < count; i = next.fetch_add(1)) work(i);
    });
  }
  for (auto& th : pool) th.join();
}

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// FNV-1a over the raw bytes of every trajectory-determining input.
class ContentHash {
 public:
  void add_bytes(const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= bytes[i];
      state_ *= 0x100000001B3ull;
    }
  }
  template <typename T>
  void add(const T& value) {
    static_assert(std::is_trivially_copyable_v<T>);
    add_bytes(&value, sizeof(value));
  }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xCBF29CE484222325ull;
};

std::uint64_t reference_key(const ProblemSpec<double>& spec, const Grid<double>& grid,
                            const SpectralState<double>& init, double T, double h_ref) {
  ContentHash hash;
  hash.add<std::uint64_t>(1);  // format version
  hash.add<std::int64_t>(grid.M);
  hash.add(grid.rho);
  hash.add(static_cast<std::int32_t>(spec.nonlinearity));
  hash.add(T);
  hash.add(h_ref);
  hash.add(init.t);
  hash.add_bytes(init.q.data(), sizeof(std::complex<double>) * init.q.size());
  hash.add_bytes(init.p.data(), sizeof(std::complex<double>) * init.p.size());
  return hash.digest();
}

constexpr char cache_magic[8] = {'K', 'G', 'R', 'E', 'F', '0', '0', '1'};

struct CacheHeader {
  char magic[8];
  std::uint64_t key;
  std::int64_t modes;
  double t_final;
};

bool load_reference(const std::filesystem::path& file, std::uint64_t key, Index n,
                    SpectralState<double>& out) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return false;
  CacheHeader header{};
  in.read(reinterpret_cast<char*>(&header), sizeof(header));
  if (!in || std::memcmp(header.magic, cache_magic, sizeof(cache_magic)) != 0 ||
      header.key != key || header.modes * 2 != n)
    return false;
  out.q.resize(n);
  out.p.resize(n);
  in.read(reinterpret_cast<char*>(out.q.data()), sizeof(std::complex<double>) * n);
  in.read(reinterpret_cast<char*>(out.p.data()), sizeof(std::complex<double>) * n);
  if (!in) return false;
  out.t = header.t_final;
  return true;
}

void store_reference(const std::filesystem::path& file, std::uint64_t key,
                     const SpectralState<double>& state) {
  std::filesystem::create_directories(file.parent_path());
  // Write to a temp name first so a concurrent reader never sees a torn file.
  const std::filesystem::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("reference cache: cannot write " + tmp.string());
    CacheHeader header{};
    std::memcpy(header.magic, cache_magic, sizeof(cache_magic));
    header.key = key;
    header.modes = state.q.size() / 2;
    header.t_final = state.t;
    out.write(reinterpret_cast<const char*>(&header), sizeof(header));
    out.write(reinterpret_cast<const char*>(state.q.data()),
              sizeof(std::complex<double>) * state.q.size());
    out.write(reinterpret_cast<const char*>(state.p.data()),
              sizeof(std::complex<double>) * state.p.size());
    if (!out) throw std::runtime_error("reference cache: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

SpectralState<double> run_method(MethodTag method, const ProblemSpec<double>& spec,
                                 const Grid<double>& grid, const SpectralState<double>& init,
                                 double h, double T) {
  return integrate(method, spec, grid, init, h, T, std::llround(T / h)).final_state;
}

}  // namespace

double relative_err(const SpectralState<double>& num, const SpectralState<double>& ref,
                    const Grid<double>& grid) {
  const double q_ref = hs_norm(ref.q, 1.0, grid);
  const double p_ref = hs_norm(ref.p, 0.0, grid);
  if (q_ref == 0.0 || p_ref == 0.0)
    throw std::invalid_argument("relative_err: reference norm is zero");
  const ComplexVector<double> dq = num.q - ref.q;
  const ComplexVector<double> dp = num.p - ref.p;
  return hs_norm(dq, 1.0, grid) / q_ref + hs_norm(dp, 0.0, grid) / p_ref;
}

std::vector<double> estimate_order(const std::vector<std::pair<double, double>>& errs) {
  for (std::size_t i = 0; i < errs.size(); ++i) {
    if (!(errs[i].second > 0.0))
      throw std::invalid_argument("estimate_order: errors must be positive");
    if (i > 0 && !(errs[i].first < errs[i - 1].first))
      throw std::invalid_argument("estimate_order: step sizes must be strictly decreasing");
  }
  std::vector<double> slopes;
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    slopes.push_back(std::log(errs[i].second / errs[i + 1].second) /
                     std::log(errs[i].first / errs[i + 1].first));
  }
  return slopes;
}

SpectralState<double> reference_solution(const ProblemSpec<double>& spec, const Grid<double>& grid,
                                         const SpectralState<double>& init, double T, double h_ref,
                                         const std::filesystem::path& cache_dir) {
  if (cache_dir.empty())
    return run_method(MethodTag::SLR, spec, grid, init, h_ref, T);

  const std::uint64_t key = reference_key(spec, grid, init, T, h_ref);
  char name[32];
  std::snprintf(name, sizeof(name), "ref_%016llx.bin", static_cast<unsigned long long>(key));
  const std::filesystem::path file = cache_dir / name;

  SpectralState<double> cached;
  if (load_reference(file, key, grid.size(), cached)) return cached;
  SpectralState<double> fresh = run_method(MethodTag::SLR, spec, grid, init, h_ref, T);
  store_reference(file, key, fresh);
  return fresh;
}

std::vector<RunRecord> run_convergence(const ExperimentConfig& cfg,
                                       const std::filesystem::path& cache_dir, int jobs) {
  if (cfg.kind != ExperimentKind::Convergence && cfg.kind != ExperimentKind::Efficiency)
    throw std::invalid_argument("run_convergence: config kind mismatch");
  if (!cfg.h_ref) throw std::invalid_argument("run_convergence: h_ref is required");

  const Grid<double> grid = make_grid(cfg.M, cfg.rho);
  const ProblemSpec<double> spec = cfg.problem();
  const SpectralState<double> init = rough_initial_data(spec, grid);
  const SpectralState<double> ref =
      reference_solution(spec, grid, init, cfg.T_final, *cfg.h_ref, cache_dir);

  const Index n_methods = static_cast<Index>(cfg.methods.size());
  const Index n_steps = static_cast<Index>(cfg.step_sizes.size());
  std::vector<RunRecord> records(n_methods * n_steps);

  run_jobs(jobs, n_methods * n_steps, [&](Index idx) {
    const MethodTag method = cfg.methods[idx / n_steps];
    const double h = cfg.step_sizes[idx % n_steps];
    RunRecord& rec = records[idx];
    rec.method = method;
    rec.h = h;
    try {
      const double t0 = now_seconds();
      const SpectralState<double> final_state = run_method(method, spec, grid, init, h, cfg.T_final);
      rec.wall_seconds = now_seconds() - t0;
      rec.err = relative_err(final_state, ref, grid);
    } catch (const NonFiniteStateError& e) {
      rec.aborted = true;
      rec.abort_message = e.what();
    }
  });

  // Pairwise slopes per method, attached to the finer step of each pair.
  for (Index m = 0; m < n_methods; ++m) {
    std::vector<std::pair<double, double>> errs;
    for (Index s = 0; s < n_steps; ++s) {
      const RunRecord& rec = records[m * n_steps + s];
      if (!rec.aborted && rec.err > 0.0) errs.emplace_back(rec.h, rec.err);
    }
    if (errs.size() < 2) continue;
    const std::vector<double> slopes = estimate_order(errs);
    std::size_t pair = 0;
    for (Index s = 0; s < n_steps; ++s) {
      RunRecord& rec = records[m * n_steps + s];
      if (rec.aborted || !(rec.err > 0.0)) continue;
      if (pair > 0) rec.estimated_order = slopes[pair - 1];
      ++pair;
    }
  }
  return records;
}

std::vector<RunRecord> run_efficiency(const ExperimentConfig& cfg,
                                      const std::filesystem::path& cache_dir) {
  if (cfg.kind != ExperimentKind::Efficiency)
    throw std::invalid_argument("run_efficiency: config kind mismatch");

  ExperimentConfig as_convergence = cfg;
  as_convergence.kind = ExperimentKind::Convergence;
  std::vector<RunRecord> records = run_convergence(as_convergence, cache_dir, 1);

  const Grid<double> grid = make_grid(cfg.M, cfg.rho);
  const ProblemSpec<double> spec = cfg.problem();
  const SpectralState<double> init = rough_initial_data(spec, grid);

  // Timing pass: stepping loop only, one discarded warm-up, median of 3.
  // Sequential so runs never contend with each other.
  for (RunRecord& rec : records) {
    if (rec.aborted) continue;
    try {
      run_method(rec.method, spec, grid, init, rec.h, cfg.T_final);  // warm-up
      std::array<double, 3> samples{};
      for (double& sample : samples) {
        const double t0 = now_seconds();
        run_method(rec.method, spec, grid, init, rec.h, cfg.T_final);
        sample = now_seconds() - t0;
      }
      std::sort(samples.begin(), samples.end());
      rec.wall_seconds = samples[1];
    } catch (const NonFiniteStateError& e) {
      rec.aborted = true;
      rec.abort_message = e.what();
    }
  }
  return records;
}

std::vector<RunRecord> run_energy_drift(const ExperimentConfig& cfg, int jobs) {
  if (cfg.kind != ExperimentKind::EnergyDrift)
    throw std::invalid_argument("run_energy_drift: config kind mismatch");

  const Grid<double> grid = make_grid(cfg.M, cfg.rho);
  const ProblemSpec<double> spec = cfg.problem();
  const SpectralState<double> init = rough_initial_data(spec, grid);
  const double h = cfg.step_sizes.front();

  std::vector<RunRecord> records(cfg.methods.size());
  run_jobs(jobs, static_cast<Index>(cfg.methods.size()), [&](Index idx) {
    RunRecord& rec = records[idx];
    rec.method = cfg.methods[idx];
    rec.h = h;
    try {
      const double t0 = now_seconds();
      const IntegrationResult<double> result =
          integrate(rec.method, spec, grid, init, h, cfg.T_final, cfg.observe_every);
      rec.wall_seconds = now_seconds() - t0;
      const double e0 = result.observations.front().energy;
      double max_drift = 0.0;
      rec.energy_series.reserve(result.observations.size());
      for (const Observation<double>& obs : result.observations) {
        const double drift = std::abs(obs.energy - e0) / std::abs(e0);
        rec.energy_series.emplace_back(obs.t, drift);
        max_drift = std::max(max_drift, drift);
      }
      rec.err = max_drift;
    } catch (const NonFiniteStateError& e) {
      rec.aborted = true;
      rec.abort_message = e.what();
    }
  });
  return records;
}

double reversibility_check(const ProblemSpec<double>& spec, const Grid<double>& grid,
                           const SpectralState<double>& init, double h, long long n_steps) {
  if (n_steps < 1) throw std::invalid_argument("reversibility_check: n_steps must be >= 1");

  TwoStepState<double> ts = slr_start(spec, grid, init, h);
  for (long long k = 0; k < n_steps; ++k) ts = slr_step(spec, grid, ts);
  for (long long k = 0; k < n_steps; ++k) ts = slr_step_backward(spec, grid, ts);

  const double denom = hs_norm(init.q, 1.0, grid) + hs_norm(init.p, 0.0, grid);
  const ComplexVector<double> dq = ts.prev.q - init.q;
  const ComplexVector<double> dp = ts.prev.p - init.p;
  const double defect = hs_norm(dq, 1.0, grid) + hs_norm(dp, 0.0, grid);
  if (denom == 0.0) return defect == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return defect / denom;
}

}  // namespace kglr
