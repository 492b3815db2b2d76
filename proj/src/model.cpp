#include "allee/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace allee {

ModelParams ModelParams::symmetric(double alpha, double gamma, double m, double l) {
  ModelParams p;
  p.alpha1 = p.alpha2 = alpha;
  p.gamma1 = p.gamma2 = gamma;
  p.m1 = p.m2 = m;
  p.l1 = p.l2 = l;
  p.beta1 = p.beta2 = 1.0;
  p.validate();
  return p;
}

bool ModelParams::is_symmetric() const {
  return alpha1 == alpha2 && gamma1 == gamma2 && m1 == m2 && l1 == l2 && beta1 == 1.0 &&
         beta2 == 1.0;
}

namespace {

void check(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("ModelParams: ") + what);
}

}  // namespace

void ModelParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  for (double v : {alpha1, alpha2, gamma1, gamma2, m1, m2, l1, l2, beta1, beta2})
    check(finite(v), "non-finite value");
  check(alpha1 >= 0.0 && alpha2 >= 0.0, "alpha must be >= 0");
  check(gamma1 >= 0.0 && gamma2 >= 0.0, "gamma must be >= 0");
  check(m1 >= 0.0 && m2 >= 0.0, "m must be >= 0");
  check(l1 >= 0.0 && l1 <= 1.0 && l2 >= 0.0 && l2 <= 1.0, "l must lie in [0,1]");
  check(beta1 > 0.0 && beta2 > 0.0, "beta must be > 0");
}

void ModelParams::require_symmetric(std::string_view who) const {
  if (!is_symmetric())
    throw std::invalid_argument(std::string(who) + ": requires symmetric parameters");
}

bool State4::in_first_orthant(double slack) const {
  return std::all_of(c.begin(), c.end(), [slack](double v) { return v >= -slack; });
}

double max_norm(const State4& a, const State4& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < 4; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

namespace {

constexpr std::array<std::size_t, 4> kFullIdx{kU1, kV1, kU2, kV2};
constexpr std::array<std::size_t, 2> kLocalIdx{kU1, kV1};
constexpr std::array<std::size_t, 2> kPreyIdx{kU1, kU2};
constexpr std::array<std::size_t, 3> kRefugeAIdx{kU1, kU2, kV2};
constexpr std::array<std::size_t, 3> kRefugeBIdx{kU1, kV1, kU2};

}  // namespace

std::string_view to_string(SystemId sys) {
  switch (sys) {
    case SystemId::Full1: return "full";
    case SystemId::Local2: return "local";
    case SystemId::PreyPrey3: return "prey-prey";
    case SystemId::Refuge4a: return "refuge-a";
    case SystemId::Refuge4b: return "refuge-b";
  }
  return "?";
}

SystemId system_from_string(std::string_view name) {
  for (auto s : {SystemId::Full1, SystemId::Local2, SystemId::PreyPrey3, SystemId::Refuge4a,
                 SystemId::Refuge4b})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown system id '" + std::string(name) + "'");
}

std::span<const std::size_t> dynamic_coords(SystemId sys) {
  switch (sys) {
    case SystemId::Full1: return kFullIdx;
    case SystemId::Local2: return kLocalIdx;
    case SystemId::PreyPrey3: return kPreyIdx;
    case SystemId::Refuge4a: return kRefugeAIdx;
    case SystemId::Refuge4b: return kRefugeBIdx;
  }
  return kFullIdx;
}

std::size_t dimension(SystemId sys) { return dynamic_coords(sys).size(); }

bool is_pinned(SystemId sys, std::size_t coord) {
  auto idx = dynamic_coords(sys);
  return std::find(idx.begin(), idx.end(), coord) == idx.end();
}

Vec4 raw_subsystem_field(SystemId sys, const Vec4& x, const ModelParams& p) {
  if (sys == SystemId::Local2) {
    // Single patch without dispersal terms.
    const double u = x[kU1], v = x[kV1];
    return {p.beta1 * allee_growth(u, p.l1) - u * v, p.gamma1 * v * (u - p.m1), 0.0, 0.0};
  }
  Vec4 f = raw_field(x, p);
  if (sys != SystemId::Full1)
    for (std::size_t i = 0; i < 4; ++i)
      if (is_pinned(sys, i)) f[i] = 0.0;
  return f;
}

State4 vector_field(SystemId sys, const State4& x, const ModelParams& p) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(x[i] >= 0.0))
      throw std::invalid_argument("vector_field: state outside the first orthant");
    if (is_pinned(sys, i) && x[i] != 0.0)
      throw std::invalid_argument("vector_field: nonzero pinned coordinate for system " +
                                  std::string(to_string(sys)));
  }
  return State4(raw_subsystem_field(sys, x.c, p));
}

State4 embed(SystemId sys, std::span<const double> reduced) {
  auto idx = dynamic_coords(sys);
  if (reduced.size() != idx.size())
    throw std::invalid_argument("embed: expected " + std::to_string(idx.size()) +
                                " coordinates for " + std::string(to_string(sys)) + ", got " +
                                std::to_string(reduced.size()));
  State4 x;
  for (std::size_t k = 0; k < idx.size(); ++k) x[idx[k]] = reduced[k];
  return x;
}

std::vector<double> project(SystemId sys, const State4& x) {
  auto idx = dynamic_coords(sys);
  std::vector<double> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(x[i]);
  return out;
}

}  // namespace allee
