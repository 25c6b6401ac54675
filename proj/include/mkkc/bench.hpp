#pragma once

#include "mkkc/kernels.hpp"
#include "mkkc/metrics.hpp"
#include "mkkc/simgen.hpp"
#include "mkkc/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace mkkc {

/// Every scenario cell is run with every variant for `replicates` independent
/// draws; metric values are averaged over replicates.
struct ExperimentGrid {
  /// One entry per cell; the seed field is ignored (derived from base_seed).
  std::vector<ScenarioSpec> scenarios;
  std::vector<Variant> variants;
  std::vector<Metric> metrics;
  int replicates = 5;
  std::uint64_t base_seed = 1;

  NmiMode nmi_mode = NmiMode::Standard;
  KernelSpec kernel{KernelKind::Rbf, 0.5, false};
  int n_starts = 100;
  int max_iter = 500;
  double tol = 1e-4;
  /// Worker threads; 0 means MKKC_THREADS or the hardware concurrency.
  int threads = 0;
};

struct ResultRow {
  std::string scenario;
  std::string level;
  Variant variant = Variant::MinMaxL2;
  Metric metric = Metric::Ari;
  double value = 0.0;
  /// Replicate-mean of the final theta.
  std::vector<double> theta_final;
  double iterations = 0.0;
  bool converged = true;
  /// Empty on success.
  std::string error;
};

/// Replicate-0 solver output for one (cell, variant).
struct CellTrajectory {
  std::string cell_id;
  SolveResult<double> result;
};

struct GridRun {
  /// Sorted by (scenario, level, variant, metric).
  std::vector<ResultRow> rows;
  std::vector<CellTrajectory> trajectories;

  bool any_error() const;
};

void validate(const ExperimentGrid& grid);

/// generate -> prepare_bundle -> solve -> round -> score for every cell.
/// Output is identical for a given grid regardless of thread count.
GridRun run_grid(const ExperimentGrid& grid);

enum class TableFormat { Csv, Markdown };

/// Columns: scenario, level, variant, metric, value, theta, iterations,
/// converged, status. CSV carries full precision; Markdown 3 decimals.
std::string emit_table(const std::vector<ResultRow>& rows, TableFormat format);

/// Paper-style layout: one table per scenario, rows = variant x metric,
/// columns = levels.
std::string emit_pivot_markdown(const std::vector<ResultRow>& rows);

/// iter, theta_1..theta_m, objective, delta
std::string emit_theta_trajectory(const SolveResult<double>& result);

/// Scenarios A/B/C with noise levels 0..10 and redundancy levels
/// cor in {0.45, 0.72, 0.90, 0.97, 1} x N in {2, 4, 6, 8, 10}.
ExperimentGrid paper_tables_grid(std::uint64_t base_seed = 1);

/// Reads a grid from JSON. Either {"preset": "paper-tables", ...overrides} or
/// explicit "scenarios", "variants", "metrics" sections. Throws InputError
/// naming the offending key.
ExperimentGrid parse_grid_config(const nlohmann::json& config);

/// Thread count honoring MKKC_THREADS.
int worker_threads(int requested);

}  // namespace mkkc
