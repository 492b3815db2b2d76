#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "allee/simd.hpp"
#include "kernels.hpp"

namespace allee {

std::string_view to_string(SimdLevel s) {
  switch (s) {
    case SimdLevel::Scalar: return "scalar";
    case SimdLevel::Avx2: return "avx2";
  }
  return "?";
}

bool simd_available(SimdLevel s) {
  if (s == SimdLevel::Scalar) return true;
#if defined(ALLEE_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

SimdLevel detected_simd() {
  static const SimdLevel level =
      simd_available(SimdLevel::Avx2) ? SimdLevel::Avx2 : SimdLevel::Scalar;
  return level;
}

namespace {

using simd::kLanes;

simd::AttemptKernel kernel_for(SimdLevel level) {
  if (!simd_available(level))
    throw std::invalid_argument("advance_batch: kernel '" + std::string(to_string(level)) +
                                "' is not available");
#if defined(ALLEE_HAVE_AVX2)
  if (level == SimdLevel::Avx2) return simd::attempt_avx2;
#endif
  return simd::attempt_scalar;
}

struct Lane {
  bool active = false;
  double t = 0.0, h = 0.0;
  dopri::Controller ctl;
  BatchLaneStats st;
};

// One group of up to four lanes, following DormandPrince<4>::step exactly.
void run_group(simd::AttemptKernel kernel, SystemId sys, const ModelParams& p,
               const State4* x0, std::size_t count, double t_end, const StepOptions& opt,
               State4* out, BatchLaneStats* stats) {
  auto f = [&](const double* x, double* o) { field_generic<double>(sys, p, x, o); };
  std::array<double, 16> y{}, k1{}, ynew{}, k7{}, err{};
  std::array<double, 4> h{};
  std::array<Lane, kLanes> lanes{};
  for (std::size_t l = 0; l < count; ++l) {
    double yl[4], kl[4];
    for (int c = 0; c < 4; ++c) yl[c] = x0[l][c];
    f(yl, kl);
    for (int c = 0; c < 4; ++c) {
      y[c * kLanes + l] = yl[c];
      k1[c * kLanes + l] = kl[c];
    }
    Lane& ln = lanes[l];
    ln.active = 0.0 < t_end;
    ln.st.fevals = 2;
    ln.h = opt.h_init > 0.0 ? opt.h_init
                            : dopri::initial_step<4>(f, yl, kl, opt.rtol, opt.atol, opt.h_max);
  }
  std::array<bool, kLanes> last{};
  for (;;) {
    bool any = false;
    for (std::size_t l = 0; l < kLanes; ++l) {
      Lane& ln = lanes[l];
      h[l] = 0.0;
      if (!ln.active) continue;
      any = true;
      if (ln.st.steps + ln.st.rejected >= opt.max_steps)
        throw IntegrationError(IntegrationError::Kind::StepBudget, "integrator: step budget exhausted");
      double hl = std::min(ln.h, opt.h_max);
      last[l] = false;
      if (ln.t + hl >= t_end) {
        hl = t_end - ln.t;
        last[l] = true;
      }
      if (!(hl > 1e-14 * std::max(1.0, std::abs(ln.t))))
        throw IntegrationError(IntegrationError::Kind::StepUnderflow,
                               "integrator: step size underflow at t = " + std::to_string(ln.t));
      h[l] = hl;
    }
    if (!any) break;
    kernel(sys, p, y.data(), k1.data(), h.data(), ynew.data(), k7.data(), err.data());
    for (std::size_t l = 0; l < kLanes; ++l) {
      Lane& ln = lanes[l];
      if (!ln.active) continue;
      ln.st.fevals += 6;
      double yl[4], nl[4], el[4];
      for (int c = 0; c < 4; ++c) {
        yl[c] = y[c * kLanes + l];
        nl[c] = ynew[c * kLanes + l];
        el[c] = err[c * kLanes + l];
      }
      const double e = dopri::error_norm<4>(el, yl, nl, opt.rtol, opt.atol);
      bool accept = false;
      const double h_next = ln.ctl.propose(h[l], e, accept);
      if (!accept) {
        ++ln.st.rejected;
        ln.h = h_next;
        continue;
      }
      ++ln.st.steps;
      ln.t = last[l] ? t_end : ln.t + h[l];
      for (int c = 0; c < 4; ++c) {
        if (!std::isfinite(nl[c]))
          throw IntegrationError(IntegrationError::Kind::NonFinite, "integrator: non-finite state");
        y[c * kLanes + l] = nl[c];
        k1[c * kLanes + l] = k7[c * kLanes + l];
      }
      if (opt.clip_negative && dopri::clip_negative<4>(nl)) {
        double kl[4];
        f(nl, kl);
        for (int c = 0; c < 4; ++c) {
          y[c * kLanes + l] = nl[c];
          k1[c * kLanes + l] = kl[c];
        }
        ++ln.st.fevals;
        ++ln.st.clipped;
      }
      ln.h = h_next;
      if (!(ln.t < t_end)) ln.active = false;
    }
  }
  for (std::size_t l = 0; l < count; ++l) {
    for (int c = 0; c < 4; ++c) out[l][c] = y[c * kLanes + l];
    stats[l] = lanes[l].st;
  }
}

}  // namespace

BatchResult advance_batch(SystemId sys, std::span<const State4> x0, const ModelParams& p,
                          double t_end, const StepOptions& opt, SimdLevel level) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end))
    throw std::invalid_argument("advance_batch: t_end must be finite and >= 0");
  for (const State4& x : x0)
    for (int c = 0; c < 4; ++c)
      if (!std::isfinite(x[c])) throw std::invalid_argument("advance_batch: non-finite state");
  const simd::AttemptKernel kernel = kernel_for(level);
  BatchResult r;
  r.final_states.resize(x0.size());
  r.stats.resize(x0.size());
  for (std::size_t i = 0; i < x0.size(); i += kLanes) {
    const std::size_t n = std::min<std::size_t>(kLanes, x0.size() - i);
    run_group(kernel, sys, p, x0.data() + i, n, t_end, opt, r.final_states.data() + i,
              r.stats.data() + i);
  }
  return r;
}

}  // namespace allee
