#include "allee/ode_core.hpp"
#include "kernels.hpp"

namespace allee::simd {

void attempt_scalar(SystemId sys, const ModelParams& p, const double* y, const double* k1,
                    const double* h, double* ynew, double* k7, double* err) {
  auto f = [&](const double* x, double* out) { field_generic<double>(sys, p, x, out); };
  for (int lane = 0; lane < kLanes; ++lane) {
    double yl[4], kl[4];
    for (int c = 0; c < 4; ++c) {
      yl[c] = y[c * kLanes + lane];
      kl[c] = k1[c * kLanes + lane];
    }
    dopri::Stages<double, 4> st;
    dopri::attempt<double, 4>(f, yl, kl, h[lane], st);
    for (int c = 0; c < 4; ++c) {
      ynew[c * kLanes + lane] = st.ynew[c];
      k7[c * kLanes + lane] = st.k7[c];
      err[c * kLanes + lane] = st.err[c];
    }
  }
}

}  // namespace allee::simd
