// Compiled with -mavx2. Only lane-vector code lives here so no inline
// function shared with other translation units is emitted with AVX2 encoding.

#include <immintrin.h>

#include "allee/ode_core.hpp"
#include "kernels.hpp"

namespace allee::simd {

namespace {

struct V4 {
  __m256d v;
  V4() = default;
  V4(__m256d x) : v(x) {}
  V4(double s) : v(_mm256_set1_pd(s)) {}
};

inline V4 operator+(V4 a, V4 b) { return _mm256_add_pd(a.v, b.v); }
inline V4 operator-(V4 a, V4 b) { return _mm256_sub_pd(a.v, b.v); }
inline V4 operator*(V4 a, V4 b) { return _mm256_mul_pd(a.v, b.v); }

}  // namespace

void attempt_avx2(SystemId sys, const ModelParams& p, const double* y, const double* k1,
                  const double* h, double* ynew, double* k7, double* err) {
  auto f = [&](const V4* x, V4* out) { field_generic<V4>(sys, p, x, out); };
  V4 yv[4], kv[4];
  for (int c = 0; c < 4; ++c) {
    yv[c] = _mm256_loadu_pd(y + c * kLanes);
    kv[c] = _mm256_loadu_pd(k1 + c * kLanes);
  }
  dopri::Stages<V4, 4> st;
  dopri::attempt<V4, 4>(f, yv, kv, V4(_mm256_loadu_pd(h)), st);
  for (int c = 0; c < 4; ++c) {
    _mm256_storeu_pd(ynew + c * kLanes, st.ynew[c].v);
    _mm256_storeu_pd(k7 + c * kLanes, st.k7[c].v);
    _mm256_storeu_pd(err + c * kLanes, st.err[c].v);
  }
}

}  // namespace allee::simd
