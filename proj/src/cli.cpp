#include "kglr/cli.hpp"

#include "kglr/config.hpp"
#include "kglr/csv.hpp"
#include "kglr/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace kglr {
namespace {

CsvValue order_cell(const RunRecord& rec) {
  if (rec.estimated_order) return *rec.estimated_order;
  return std::monostate{};
}

int report_aborts(const std::vector<RunRecord>& records) {
  int failures = 0;
  for (const RunRecord& rec : records) {
    if (rec.aborted) {
      std::cerr << "error: " << to_token(rec.method) << " h=" << rec.h << ": "
                << rec.abort_message << "\n";
      ++failures;
    } else if (!std::isfinite(rec.err)) {
      std::cerr << "error: " << to_token(rec.method) << " h=" << rec.h
                << ": non-finite error value\n";
      ++failures;
    }
  }
  return failures;
}

int cmd_convergence(const ExperimentConfig& cfg, const CliCommand& cmd) {
  const auto records = run_convergence(cfg, cmd.cache_dir, cmd.jobs);
  std::vector<std::vector<CsvValue>> rows;
  for (const RunRecord& rec : records) {
    if (rec.aborted) continue;
    rows.push_back({to_token(rec.method), rec.h, rec.err, order_cell(rec)});
  }
  write_csv(cmd.output_dir / "convergence.csv", {"method", "h", "err", "order"}, rows);
  return report_aborts(records) ? 1 : 0;
}

int cmd_efficiency(const ExperimentConfig& cfg, const CliCommand& cmd) {
  const auto records = run_efficiency(cfg, cmd.cache_dir);
  std::vector<std::vector<CsvValue>> rows;
  for (const RunRecord& rec : records) {
    if (rec.aborted) continue;
    rows.push_back({to_token(rec.method), rec.h, rec.err, order_cell(rec), rec.wall_seconds});
  }
  write_csv(cmd.output_dir / "efficiency.csv", {"method", "h", "err", "order", "wall_seconds"},
            rows);
  return report_aborts(records) ? 1 : 0;
}

int cmd_energy_drift(const ExperimentConfig& cfg, const CliCommand& cmd) {
  const auto records = run_energy_drift(cfg, cmd.jobs);
  std::vector<std::vector<CsvValue>> rows;
  for (const RunRecord& rec : records) {
    for (const auto& [t, drift] : rec.energy_series)
      rows.push_back({to_token(rec.method), t, drift});
  }
  write_csv(cmd.output_dir / "energy_drift.csv", {"method", "t", "rel_drift"}, rows);
  return report_aborts(records) ? 1 : 0;
}

int cmd_reversibility(const ExperimentConfig& cfg, const CliCommand& cmd) {
  const Grid<double> grid = make_grid(cfg.M, cfg.rho);
  const ProblemSpec<double> spec = cfg.problem();
  const SpectralState<double> init = rough_initial_data(spec, grid);
  const double h = cfg.step_sizes.front();
  const long long n_steps = std::llround(cfg.T_final / h);
  const double defect = reversibility_check(spec, grid, init, h, n_steps);
  write_csv(cmd.output_dir / "reversibility.csv", {"h", "n_steps", "defect"},
            {{h, n_steps, defect}});
  if (!std::isfinite(defect)) {
    std::cerr << "error: non-finite reversibility defect\n";
    return 1;
  }
  return 0;
}

int cmd_solve(const ExperimentConfig& cfg, const CliCommand& cmd) {
  const Grid<double> grid = make_grid(cfg.M, cfg.rho);
  const ProblemSpec<double> spec = cfg.problem();
  const SpectralState<double> init = rough_initial_data(spec, grid);
  const double h = cfg.step_sizes.front();

  std::vector<std::vector<CsvValue>> rows;
  int failures = 0;
  for (MethodTag method : cfg.methods) {
    try {
      const auto result = integrate(method, spec, grid, init, h, cfg.T_final, cfg.observe_every);
      for (const Observation<double>& obs : result.observations)
        rows.push_back({to_token(method), obs.t, obs.energy, obs.h1_norm, obs.l2_norm});
    } catch (const NonFiniteStateError& e) {
      std::cerr << "error: " << to_token(method) << " h=" << h << ": " << e.what() << "\n";
      ++failures;
    }
  }
  write_csv(cmd.output_dir / "solve.csv", {"method", "t", "energy", "h1_norm", "l2_norm"}, rows);
  return failures ? 1 : 0;
}

int cmd_selftest() {
  int failed = 0;
  auto check = [&](const char* name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
    if (!ok) ++failed;
  };

  // Linear exactness: every method reduces to the exact flow when f = 0.
  {
    const Grid<double> grid = make_grid<double>(16, 0.5);
    ProblemSpec<double> spec{0.5, Nonlinearity::Zero, 1.5, 1.0, 0};
    const SpectralState<double> init = rough_initial_data(spec, grid);
    const SpectralState<double> exact = linear_flow(grid, init, 2.0);
    for (MethodTag method : {MethodTag::SLR, MethodTag::LR23, MethodTag::TI}) {
      const auto result = integrate(method, spec, grid, init, 0.1, 2.0, 20);
      const double err = relative_err(result.final_state, exact, grid);
      check(("linear exactness: " + to_token(method)).c_str(), err <= 1e-10);
    }
  }

  // Reversibility of the two-step scheme.
  {
    const Grid<double> grid = make_grid<double>(16, 0.0);
    ProblemSpec<double> spec{0.0, Nonlinearity::Sine, 1.5, 1.0, 0};
    const SpectralState<double> init = rough_initial_data(spec, grid);
    const double defect = reversibility_check(spec, grid, init, 0.05, 50);
    check("reversibility defect <= 1e-8", defect <= 1e-8);
  }

  // Potential consistency: -U' = f by central differences.
  {
    bool ok = true;
    for (Nonlinearity nl : {Nonlinearity::Sine, Nonlinearity::CubicDefocusing}) {
      ProblemSpec<double> spec{0.0, nl, 1.0, 1.0, 0};
      const double delta = 1e-5;
      for (int i = 0; i < 100; ++i) {
        const double u = -3.0 + 6.0 * i / 99.0;
        const double fd = -(eval_U(spec, u + delta) - eval_U(spec, u - delta)) / (2 * delta);
        RealVector<double> point(1);
        point[0] = u;
        if (std::abs(fd - eval_f(spec, point)[0]) > 1e-8) ok = false;
      }
    }
    check("potential consistency -U' = f", ok);
  }

  std::cout << (failed ? "selftest: FAILED\n" : "selftest: all checks passed\n");
  return failed ? 1 : 0;
}

}  // namespace

int run_command(const CliCommand& cmd) {
  try {
    if (cmd.verb == "selftest") return cmd_selftest();

    std::vector<std::string> overrides = cmd.overrides;
    if (cmd.seed) overrides.push_back("seed = " + std::to_string(*cmd.seed));
    const ExperimentConfig cfg = parse_config(cmd.config_path, overrides);

    if (cmd.print_config) {
      std::cout << format_config(cfg);
      return 0;
    }

    std::filesystem::create_directories(cmd.output_dir);
    CliCommand resolved = cmd;
    if (resolved.cache_dir.empty()) resolved.cache_dir = cmd.output_dir / "cache";
    {
      std::ofstream out(cmd.output_dir / "effective_config.cfg", std::ios::binary);
      out << format_config(cfg);
    }

    if (cmd.verb == "solve") return cmd_solve(cfg, resolved);
    if (cmd.verb == "convergence") {
      if (cfg.kind != ExperimentKind::Convergence)
        throw ConfigError("convergence verb requires kind = convergence");
      return cmd_convergence(cfg, resolved);
    }
    if (cmd.verb == "efficiency") {
      if (cfg.kind != ExperimentKind::Efficiency)
        throw ConfigError("efficiency verb requires kind = efficiency");
      return cmd_efficiency(cfg, resolved);
    }
    if (cmd.verb == "energy-drift") {
      if (cfg.kind != ExperimentKind::EnergyDrift)
        throw ConfigError("energy-drift verb requires kind = energy-drift");
      return cmd_energy_drift(cfg, resolved);
    }
    if (cmd.verb == "reversibility") {
      if (cfg.kind != ExperimentKind::Reversibility)
        throw ConfigError("reversibility verb requires kind = reversibility");
      return cmd_reversibility(cfg, resolved);
    }
    std::cerr << "error: unknown verb '" << cmd.verb << "'\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace kglr
