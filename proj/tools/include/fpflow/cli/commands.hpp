#pragma once

#include <iosfwd>
#include <vector>

#include "fpflow/cli/experiment.hpp"

namespace fpflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // solver, I/O or verification failure
inline constexpr int kExitUsage = 2;    // bad arguments, unknown preset, invalid spec

int cmd_run(const std::vector<ExperimentSpec>& specs, std::ostream& out, std::ostream& err);
/// Needs >= 2 specs with equal dim and n_cells; writes compare.csv and
/// compare.svg into the first spec's output directory.
int cmd_compare(const std::vector<ExperimentSpec>& specs, std::ostream& out, std::ostream& err);
int cmd_equilibrium(const std::vector<ExperimentSpec>& specs, std::ostream& out,
                    std::ostream& err);

/// Entry point of the `fpflow` executable.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fpflow::cli
