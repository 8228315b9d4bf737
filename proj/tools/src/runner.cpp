#include "fpflow/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <string_view>
#include <thread>

#include "fpflow/cli/output.hpp"

namespace fpflow::cli {

unsigned thread_limit() {
  if (const char* env = std::getenv("FPFLOW_THREADS")) {
    const std::string_view s(env);
    unsigned v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RunOutcome execute_one(const ExperimentSpec& spec, bool invert_drift,
                       const SnapshotObserver& observer) {
  RunOutcome out{spec, std::nullopt, std::nullopt, {}, {}};
  try {
    const TensorGrid grid = make_grid(spec);
    const ParameterSet params = make_parameters(spec);
    SolverConfig cfg = make_solver_config(spec);
    cfg.invert_drift = invert_drift;
    const ScalarField f0 = make_initial_condition(spec.ic, params, grid);
    out.result = run(f0, params, cfg, observer);
  } catch (const std::exception& e) {
    out.error = e.what();
    return out;
  }
  try {
    out.fit = fit_decay_rate(out.result->trace, DecayQuantity::FRel, make_fit_options(spec));
  } catch (const std::exception& e) {
    out.fit_error = e.what();
  }
  return out;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  const std::size_t n_workers = std::min<std::size_t>(std::max(1u, threads), n);
  if (n_workers <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(n_workers);
  for (std::size_t k = 0; k < n_workers; ++k) pool.emplace_back(worker);
}

std::vector<RunOutcome> execute(const std::vector<ExperimentSpec>& specs, unsigned threads,
                                bool invert_drift) {
  std::vector<RunOutcome> outcomes(specs.size());
  parallel_for(specs.size(), threads,
               [&](std::size_t i) { outcomes[i] = execute_one(specs[i], invert_drift); });
  return outcomes;
}

void write_run_outputs(const RunOutcome& outcome) {
  const auto& spec = outcome.spec;
  std::filesystem::create_directories(spec.output_dir);
  const auto& trace = outcome.result.value().trace;
  write_file(spec.output_dir / (spec.name + "_trace.csv"), trace_csv(trace));
  const std::string title = spec.name + " (" + spec.diffusion + ", " +
                            std::string(to_string(spec.boundary)) + ")";
  write_file(spec.output_dir / (spec.name + "_fe.svg"),
             semilog_svg({free_energy_series(trace, spec.name)}, title, "t", "F - F_eq"));
}

}  // namespace fpflow::cli
