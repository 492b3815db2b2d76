#pragma once

// Lane-parallel integration of several initial states. Every lane follows
// exactly the step sequence of DormandPrince<4>, so results are bitwise equal
// to the scalar integrator whichever kernel runs.

#include <span>
#include <string_view>
#include <vector>

#include "allee/model.hpp"
#include "allee/ode.hpp"

namespace allee {

enum class SimdLevel { Scalar, Avx2 };

std::string_view to_string(SimdLevel s);

/// Best kernel supported by this build and CPU.
SimdLevel detected_simd();

/// True when the level can run here.
bool simd_available(SimdLevel s);

struct BatchLaneStats {
  long steps = 0, rejected = 0, fevals = 0, clipped = 0;
};

struct BatchResult {
  std::vector<State4> final_states;
  std::vector<BatchLaneStats> stats;
};

/// Integrates every state from t = 0 to t_end without validation beyond
/// finiteness. Lanes are processed four at a time.
BatchResult advance_batch(SystemId sys, std::span<const State4> x0, const ModelParams& p,
                          double t_end, const StepOptions& opt,
                          SimdLevel level = detected_simd());

}  // namespace allee
