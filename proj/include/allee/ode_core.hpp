#pragma once

// Dormand-Prince 5(4) stage arithmetic, generic over the arithmetic type so
// the scalar integrator and the lane-parallel batch share one operation
// order. T must support +, -, * and construction from double.

#include <cstddef>

namespace allee::dopri {

inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;

// Difference between the 5th and embedded 4th order weights.
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// Dense output weights (Hairer, Norsett & Wanner).
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <class T, std::size_t N>
struct Stages {
  T k2[N], k3[N], k4[N], k5[N], k6[N], k7[N];
  T ynew[N];
  T err[N];  // h * sum e_i k_i
};

/// One trial step from y with slope k1 = f(y) and step h. `f(x, out)`
/// evaluates the field. Fills the stages, the 5th order solution and the
/// local error estimate. k7 = f(ynew) is the next step's k1.
template <class T, std::size_t N, class F>
void attempt(const F& f, const T* y, const T* k1, T h, Stages<T, N>& s) {
  T tmp[N];
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (T(a21) * k1[i]);
  f(tmp, s.k2);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (T(a31) * k1[i] + T(a32) * s.k2[i]);
  f(tmp, s.k3);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (T(a41) * k1[i] + T(a42) * s.k2[i] + T(a43) * s.k3[i]);
  f(tmp, s.k4);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (T(a51) * k1[i] + T(a52) * s.k2[i] + T(a53) * s.k3[i] + T(a54) * s.k4[i]);
  f(tmp, s.k5);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (T(a61) * k1[i] + T(a62) * s.k2[i] + T(a63) * s.k3[i] +
                         T(a64) * s.k4[i] + T(a65) * s.k5[i]);
  f(tmp, s.k6);
  for (std::size_t i = 0; i < N; ++i)
    s.ynew[i] = y[i] + h * (T(a71) * k1[i] + T(a73) * s.k3[i] + T(a74) * s.k4[i] +
                            T(a75) * s.k5[i] + T(a76) * s.k6[i]);
  f(s.ynew, s.k7);
  for (std::size_t i = 0; i < N; ++i)
    s.err[i] = h * (T(e1) * k1[i] + T(e3) * s.k3[i] + T(e4) * s.k4[i] + T(e5) * s.k5[i] +
                    T(e6) * s.k6[i] + T(e7) * s.k7[i]);
}

}  // namespace allee::dopri
