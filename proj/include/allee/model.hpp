#pragma once

// Two-patch predator-prey model with an Allee-type prey and prey dispersal.
//
//   u1' = b1 f1(u1) - u1 v1 + a1 (u2 - u1)
//   v1' = g1 v1 (u1 - m1)
//   u2' = b2 f2(u2) - u2 v2 + a2 (u1 - u2)
//   v2' = g2 v2 (u2 - m2)
//
// with f_i(u) = u (u - l_i) (1 - u). The lower dimensional subsystems pin
// some coordinates to zero and are embedded in the same four-component state.

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace allee {

using Vec4 = std::array<double, 4>;

/// Index of each coordinate in a State4.
enum Coord : std::size_t { kU1 = 0, kV1 = 1, kU2 = 2, kV2 = 3 };

struct ModelParams {
  double alpha1 = 0.0, alpha2 = 0.0;  // prey dispersal rates
  double gamma1 = 1.0, gamma2 = 1.0;  // conversion coefficients
  double m1 = 0.5, m2 = 0.5;          // predator adaptation (mortality)
  double l1 = 0.1, l2 = 0.1;          // Allee thresholds
  double beta1 = 1.0, beta2 = 1.0;    // prey growth rates

  /// Equal parameters in both patches and unit prey growth rates.
  static ModelParams symmetric(double alpha, double gamma, double m, double l);

  bool is_symmetric() const;

  /// Throws std::invalid_argument naming the first violated bound.
  void validate() const;

  /// Throws std::invalid_argument unless is_symmetric().
  void require_symmetric(std::string_view who) const;

  // Shared values in the symmetric case.
  double alpha() const { return alpha1; }
  double gamma() const { return gamma1; }
  double m() const { return m1; }
  double l() const { return l1; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct State4 {
  Vec4 c{};

  constexpr State4() = default;
  constexpr State4(double u1, double v1, double u2, double v2) : c{u1, v1, u2, v2} {}
  constexpr explicit State4(const Vec4& v) : c(v) {}

  constexpr double u1() const { return c[kU1]; }
  constexpr double v1() const { return c[kV1]; }
  constexpr double u2() const { return c[kU2]; }
  constexpr double v2() const { return c[kV2]; }

  constexpr double& operator[](std::size_t i) { return c[i]; }
  constexpr double operator[](std::size_t i) const { return c[i]; }

  /// Patch exchange (u1,v1) <-> (u2,v2).
  constexpr State4 swapped() const { return {c[kU2], c[kV2], c[kU1], c[kV1]}; }

  bool in_first_orthant(double slack = 0.0) const;

  friend bool operator==(const State4&, const State4&) = default;
};

double max_norm(const State4& a, const State4& b);

enum class SystemId {
  Full1,      // (u1, v1, u2, v2)
  Local2,     // (u1, v1): single patch, no dispersal
  PreyPrey3,  // (u1, u2): predator-free patches
  Refuge4a,   // (u1, u2, v2): patch 1 is a prey refuge
  Refuge4b,   // (u1, v1, u2): patch 2 is a prey refuge
};

std::string_view to_string(SystemId sys);
SystemId system_from_string(std::string_view name);

/// Number of dynamical coordinates of a system.
std::size_t dimension(SystemId sys);

/// Indices into State4 of the dynamical coordinates, in order.
std::span<const std::size_t> dynamic_coords(SystemId sys);

bool is_pinned(SystemId sys, std::size_t coord);

/// Allee growth f(u) = u (u - l) (1 - u) and its derivatives in u.
constexpr double allee_growth(double u, double l) { return u * (u - l) * (1.0 - u); }
constexpr double allee_growth_du(double u, double l) {
  return -3.0 * u * u + 2.0 * (1.0 + l) * u - l;
}
constexpr double allee_growth_du2(double u, double l) { return -6.0 * u + 2.0 * (1.0 + l); }

/// Full four-dimensional field evaluated as a polynomial, for any real input.
/// Integrators call this directly; it performs no validation.
inline Vec4 raw_field(const Vec4& x, const ModelParams& p) {
  const double u1 = x[kU1], v1 = x[kV1], u2 = x[kU2], v2 = x[kV2];
  return {p.beta1 * allee_growth(u1, p.l1) - u1 * v1 + p.alpha1 * (u2 - u1),
          p.gamma1 * v1 * (u1 - p.m1),
          p.beta2 * allee_growth(u2, p.l2) - u2 * v2 + p.alpha2 * (u1 - u2),
          p.gamma2 * v2 * (u2 - p.m2)};
}

/// Field of `sys` on raw coordinates for any arithmetic type T that supports
/// +, -, * and construction from double. Pinned coordinates get exactly 0.
/// The operation order matches raw_field, so T = double reproduces it.
template <class T>
inline void field_generic(SystemId sys, const ModelParams& p, const T* x, T* out) {
  auto g = [](const T& u, double l) { return u * (u - T(l)) * (T(1.0) - u); };
  const T u1 = x[kU1], v1 = x[kV1], u2 = x[kU2], v2 = x[kV2];
  if (sys == SystemId::Local2) {
    out[kU1] = T(p.beta1) * g(u1, p.l1) - u1 * v1;
    out[kV1] = T(p.gamma1) * v1 * (u1 - T(p.m1));
    out[kU2] = T(0.0);
    out[kV2] = T(0.0);
    return;
  }
  out[kU1] = T(p.beta1) * g(u1, p.l1) - u1 * v1 + T(p.alpha1) * (u2 - u1);
  out[kV1] = T(p.gamma1) * v1 * (u1 - T(p.m1));
  out[kU2] = T(p.beta2) * g(u2, p.l2) - u2 * v2 + T(p.alpha2) * (u1 - u2);
  out[kV2] = T(p.gamma2) * v2 * (u2 - T(p.m2));
  if (sys == SystemId::PreyPrey3) out[kV1] = out[kV2] = T(0.0);
  if (sys == SystemId::Refuge4a) out[kV1] = T(0.0);
  if (sys == SystemId::Refuge4b) out[kV2] = T(0.0);
}

/// Subsystem field without validation. Pinned coordinates get derivative 0.
Vec4 raw_subsystem_field(SystemId sys, const Vec4& x, const ModelParams& p);

/// Validated field: rejects states outside the first orthant and states with a
/// nonzero pinned coordinate (std::invalid_argument).
State4 vector_field(SystemId sys, const State4& x, const ModelParams& p);

/// Reduced coordinates of `sys` placed into a State4 with pinned entries 0.
State4 embed(SystemId sys, std::span<const double> reduced);

/// Dynamical coordinates of `x` for `sys` (pinned entries are dropped).
std::vector<double> project(SystemId sys, const State4& x);

}  // namespace allee
