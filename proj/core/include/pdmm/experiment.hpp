#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdmm/regularized.hpp"
#include "pdmm/solver.hpp"

namespace pdmm {

enum class ExperimentMode { single, sweep_n, sweep_k, trace, image_tv };
enum class OperatorKind { random_dense, masked_dft };
enum class RegChoice { none, l1_identity, tv };

/// Whether the seconds column of emitted CSV files carries measured
/// wall-clock or a deterministic zero. Timing is inherently irreproducible,
/// so the deterministic placeholder is the default; measured times are
/// always available in the returned rows, the stdout report and trace files.
enum class TimingColumn { none, wall };

struct ExperimentSpec {
  ExperimentMode mode = ExperimentMode::single;
  OperatorKind operator_kind = OperatorKind::random_dense;
  RegChoice reg = RegChoice::none;
  Index k = 20;
  Index n = 800;
  std::vector<Index> n_list;  // sweep-n points
  std::vector<Index> k_list;  // sweep-k points
  int masks = 21;
  double b_value = 0.1;
  double lambda = 8.0;
  double photon_scale = 1.0;
  int trials = 50;
  std::uint64_t seed = 1;
  SolverConfig solver;
  CurvatureMode curvature = CurvatureMode::eigen;
  TimingColumn timing = TimingColumn::none;
  std::string image_path;      // image-tv input (PGM)
  std::string out_path;        // rows CSV; trace/image outputs derive from it
  std::string out_image_path;  // recovered image; default <out stem>-recovered.pgm
};

/// Throws std::invalid_argument describing the first violated constraint.
void validate_spec(const ExperimentSpec& spec);

struct ResultRow {
  std::string experiment;
  std::uint64_t trial_seed = 0;
  Index k = 0;  // unknown count (signal length, or pixel count for images)
  Index n = 0;  // total measurement count
  double b_value = 0;
  double lambda = 0;
  std::string algorithm;
  double nrmse = 0;
  double objective = 0;
  int outer_iters = 0;
  long inner_iters = 0;
  double seconds = 0;  // measured wall-clock of the solve
  std::string status;
};

struct SummaryRow {
  std::string experiment;
  Index k = 0;
  Index n = 0;
  double b_value = 0;
  double lambda = 0;
  std::string algorithm;
  int trials = 0;
  int failures = 0;  // rows without a finite NRMSE
  double nrmse_mean = 0;
  double nrmse_stderr = 0;
  double nrmse_median = 0;
  double seconds_mean = 0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;      // ordered by (sweep index, trial index)
  std::vector<SummaryRow> summary;  // one entry per sweep point
};

/// Generates instances, solves and evaluates every (sweep point, trial) pair
/// with an independent RNG substream derived from (seed, sweep, trial).
/// Solver aborts become rows with status "aborted" and NaN metrics. Trace
/// mode additionally writes one <out stem>-trace-<trial>.csv per trial with
/// measured (seconds, nrmse, objective) per outer iteration; image-tv writes
/// the recovered image of the first trial.
ExperimentResult run_experiment(const ExperimentSpec& spec);

void write_csv(const std::vector<ResultRow>& rows, const std::string& path,
               TimingColumn timing = TimingColumn::wall);
void write_summary_csv(const std::vector<SummaryRow>& rows,
                       const std::string& path,
                       TimingColumn timing = TimingColumn::wall);

/// 12-significant-digit decimal formatting used for every CSV value.
std::string csv_number(double value);

}  // namespace pdmm
