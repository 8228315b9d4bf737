#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fpflow/cli/experiment.hpp"
#include "fpflow/diagnostics.hpp"
#include "fpflow/solver.hpp"

namespace fpflow::cli {

struct RunOutcome {
  ExperimentSpec spec;
  std::optional<RunResult> result;
  std::optional<DecayFit> fit;
  std::string fit_error;
  std::string error;  // solver failure message, empty on success

  bool ok() const { return error.empty(); }
};

/// Upper bound on concurrent runs: FPFLOW_THREADS if set to a positive
/// integer, else the hardware concurrency.
unsigned thread_limit();

/// Calls fn(0..n-1) on up to `threads` workers; returns when all are done.
/// Exceptions must not escape fn.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Runs every spec, at most `threads` at a time.  Outcomes come back in input
/// order; nothing is written to disk.
std::vector<RunOutcome> execute(const std::vector<ExperimentSpec>& specs, unsigned threads,
                                bool invert_drift = false);

RunOutcome execute_one(const ExperimentSpec& spec, bool invert_drift = false,
                       const SnapshotObserver& observer = {});

/// `<out>/<name>_trace.csv` and `<out>/<name>_fe.svg`.
void write_run_outputs(const RunOutcome& outcome);

}  // namespace fpflow::cli
