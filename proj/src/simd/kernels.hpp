#pragma once

// Four-lane trial-step kernels. Arrays are coordinate-major: x[c * 4 + lane].

#include "allee/model.hpp"

namespace allee::simd {

inline constexpr int kLanes = 4;

using AttemptKernel = void (*)(SystemId sys, const ModelParams& p, const double* y,
                               const double* k1, const double* h, double* ynew, double* k7,
                               double* err);

void attempt_scalar(SystemId sys, const ModelParams& p, const double* y, const double* k1,
                    const double* h, double* ynew, double* k7, double* err);

#if defined(ALLEE_HAVE_AVX2)
void attempt_avx2(SystemId sys, const ModelParams& p, const double* y, const double* k1,
                  const double* h, double* ynew, double* k7, double* err);
#endif

}  // namespace allee::simd
