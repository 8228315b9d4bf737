#pragma once

#include <string>
#include <vector>

namespace fpflow::cli {

enum class VerifyLevel { Fast, Full };

struct PropertyResult {
  std::string name;
  bool pass;
  std::string detail;
};

/// Fast: 1D figure runs (mass, positivity, discrete energy decay, CKP,
/// max-principle envelope, symmetry), equilibrium stationarity and the
/// oracle comparison.  Full adds the 2D/3D runs and the identity refinement
/// study.  `inject_sign_error` flips the drift in every solver call.
std::vector<PropertyResult> verify(VerifyLevel level, bool inject_sign_error, unsigned threads);

}  // namespace fpflow::cli
