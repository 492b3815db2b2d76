#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "allee/flow.hpp"

using namespace allee;

namespace {

double dist(const State4& a, const State4& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

State4 aa(double m, double l) {
  const double v = (m - l) * (1.0 - m);
  return {m, v, m, v};
}

}  // namespace

TEST_CASE("origin is a constant trajectory") {
  const auto p = ModelParams::symmetric(0.02, 1.0, 0.45, 0.1);
  const Trajectory tr = integrate(SystemId::Full1, State4{}, p, 100.0);
  for (const State4& x : tr.x) CHECK(x == State4{});
  CHECK(tr.t.front() == 0.0);
  CHECK(tr.t.back() == doctest::Approx(100.0));
}

TEST_CASE("times increase and states stay in the orthant") {
  const auto p = ModelParams::symmetric(0.02, 1.0, 0.45, 0.1);
  const Trajectory tr = integrate(SystemId::Full1, {0.9, 0.2, 0.05, 0.05}, p, 500.0);
  for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr.t[i] > tr.t[i - 1]);
  for (const State4& x : tr.x)
    for (std::size_t c = 0; c < 4; ++c) {
      CHECK(x[c] >= 0.0);
      CHECK(x[c] <= 1.2);
    }
  CHECK(tr.stats.rtol == 1e-9);
}

TEST_CASE("converges to AA in domain I") {
  const double m = 0.6, l = 0.1;
  const auto p = ModelParams::symmetric(0.1, 1.0, m, l);
  State4 x0 = aa(m, l);
  x0[kU1] += 0.01;
  x0[kV2] -= 0.01;
  CHECK(dist(advance(SystemId::Full1, x0, p, 2000.0), aa(m, l)) < 1e-6);
}

TEST_CASE("symmetric state stays symmetric") {
  const auto p = ModelParams::symmetric(0.02, 1.0, 0.45, 0.1);
  const Trajectory tr = integrate(SystemId::Full1, {0.3, 0.1, 0.3, 0.1}, p, 300.0);
  for (const State4& x : tr.x) {
    CHECK(x[kU1] == x[kU2]);
    CHECK(x[kV1] == x[kV2]);
  }
}

TEST_CASE("pinned coordinates stay exactly zero") {
  const auto p = ModelParams::symmetric(0.03, 1.0, 0.4, 0.1);
  const Trajectory a = integrate(SystemId::PreyPrey3, {0.5, 0.0, 0.4, 0.0}, p, 300.0);
  for (const State4& x : a.x) CHECK((x[kV1] == 0.0 && x[kV2] == 0.0));
  const Trajectory b = integrate(SystemId::Refuge4a, {0.5, 0.0, 0.4, 0.2}, p, 300.0);
  for (const State4& x : b.x) CHECK(x[kV1] == 0.0);
  CHECK_THROWS_AS(integrate(SystemId::Refuge4a, {0.5, 0.1, 0.4, 0.2}, p, 1.0),
                  std::invalid_argument);
}

TEST_CASE("a predator-free hyperplane is invariant in the full system") {
  const auto p = ModelParams::symmetric(0.03, 1.0, 0.4, 0.1);
  const Trajectory tr = integrate(SystemId::Full1, {0.5, 0.2, 0.4, 0.0}, p, 300.0);
  for (const State4& x : tr.x) CHECK(x[kV2] == 0.0);
}

TEST_CASE("subsystem consistency with the embedded full system") {
  const auto p = ModelParams::symmetric(0.03, 1.0, 0.4, 0.1);
  const State4 x0{0.5, 0.0, 0.4, 0.2};
  const State4 full = advance(SystemId::Full1, x0, p, 200.0);
  const State4 sub = advance(SystemId::Refuge4a, x0, p, 200.0);
  CHECK(dist(full, sub) < 1e-7);
  CHECK(full[kV1] == 0.0);
}

TEST_CASE("alpha = 0 decouples the patches") {
  const auto p = ModelParams::symmetric(0.0, 1.0, 0.45, 0.1);
  const State4 x = advance(SystemId::Full1, {0.5, 0.1, 0.7, 0.3}, p, 150.0);
  const State4 a = advance(SystemId::Local2, {0.5, 0.1, 0.0, 0.0}, p, 150.0);
  const State4 b = advance(SystemId::Local2, {0.7, 0.3, 0.0, 0.0}, p, 150.0);
  CHECK(std::abs(x[kU1] - a[kU1]) < 1e-7);
  CHECK(std::abs(x[kV1] - a[kV1]) < 1e-7);
  CHECK(std::abs(x[kU2] - b[kU1]) < 1e-7);
  CHECK(std::abs(x[kV2] - b[kV1]) < 1e-7);
}

TEST_CASE("global error shrinks by at least 16x when the tolerance tightens 32x") {
  const auto p = ModelParams::symmetric(0.0, 1.0, 0.5, 0.1);
  const State4 x0{0.6, 0.15, 0.0, 0.0};
  const double t_end = 200.0;
  IntegratorOptions ref;
  ref.rtol = 1e-12;
  ref.atol = 1e-15;
  const State4 xr = advance(SystemId::Local2, x0, p, t_end, ref);
  auto err = [&](double tol) {
    IntegratorOptions o;
    o.rtol = tol;
    o.atol = tol * 1e-3;
    return dist(advance(SystemId::Local2, x0, p, t_end, o), xr);
  };
  const double coarse = err(1e-7), fine = err(1e-7 / 32.0);
  CHECK(fine > 0.0);
  CHECK(coarse / fine >= 16.0);
}

TEST_CASE("section crossings satisfy the section equation") {
  const auto p = ModelParams::symmetric(0.1, 1.0, 0.5, 0.1);
  const Section s = default_section(SystemId::Full1, p);
  CHECK(s.coord == kU1);
  CHECK(s.level == 0.5);
  const SectionRun run = integrate_crossings(SystemId::Full1, {0.52, 0.2, 0.51, 0.2}, p, 1500.0, s);
  REQUIRE(run.crossings.size() > 5);
  for (const State4& x : run.crossings.x) CHECK(std::abs(x[kU1] - 0.5) <= 1e-10);
  for (std::size_t i = 1; i < run.crossings.size(); ++i)
    CHECK(run.crossings.t[i] > run.crossings.t[i - 1]);

  const Trajectory tr = integrate(SystemId::Full1, {0.52, 0.2, 0.51, 0.2}, p, 300.0);
  const SectionCrossings pc = poincare(tr, s, p);
  REQUIRE(pc.size() > 0);
  for (const State4& x : pc.x) CHECK(std::abs(x[kU1] - 0.5) <= 1e-10);
}

TEST_CASE("domain II cycle: closure, multipliers, monodromy") {
  const auto p = ModelParams::symmetric(0.1, 1.0, 0.5, 0.1);
  const State4 settled = advance(SystemId::Full1, {0.52, 0.2, 0.51, 0.2}, p, 3000.0);
  const CycleRecord c = find_cycle(SystemId::Full1, settled, p, default_section(SystemId::Full1, p));
  CHECK(c.period > 0.0);
  CHECK(c.orbit.size() >= 64);
  CHECK(c.label == CycleLabel::Cu);
  CHECK(c.stable);
  CHECK(c.multiplicity == 1);
  CHECK(c.multipliers.size() == 3);
  CHECK(c.closure_error <= 1e-6 * c.amplitude);

  const auto mono = monodromy_multipliers(SystemId::Full1, c, p);
  REQUIRE(mono.size() == 4);
  std::vector<bool> used(4, false);
  std::size_t trivial = 4;
  double best = 1e9;
  for (std::size_t i = 0; i < 4; ++i)
    if (std::abs(mono[i] - 1.0) < best) best = std::abs(mono[i] - 1.0), trivial = i;
  CHECK(best < 1e-3);
  used[trivial] = true;
  for (const cplx& mu : c.multipliers) {
    double d = 1e9;
    std::size_t j = 4;
    for (std::size_t i = 0; i < 4; ++i)
      if (!used[i] && std::abs(mono[i] - mu) < d) d = std::abs(mono[i] - mu), j = i;
    CHECK(d < 1e-3);
    if (j < 4) used[j] = true;
  }
}

TEST_CASE("cycle search from the origin reports no return") {
  const auto p = ModelParams::symmetric(0.1, 1.0, 0.5, 0.1);
  CycleOptions o;
  o.max_return_time = 200.0;
  try {
    find_cycle(SystemId::Full1, State4{}, p, default_section(SystemId::Full1, p), o);
    FAIL("expected CycleError");
  } catch (const CycleError& e) {
    CHECK(e.kind == CycleError::Kind::NoReturn);
  }
}

TEST_CASE("label_orbit by invariant subspace") {
  std::vector<State4> sym, c3, c4, c3b;
  for (int i = 0; i < 50; ++i) {
    const double a = 2.0 * std::numbers::pi * i / 50.0;
    const double u = 0.4 + 0.1 * std::cos(a), v = 0.2 + 0.1 * std::sin(a);
    sym.push_back({u, v, u, v});
    c3.push_back({u, v, 0.3, 0.0});
    c3b.push_back({0.3, 0.0, u, v});
    c4.push_back({u, v, u + 0.05 * std::sin(a), v});
  }
  CHECK(label_orbit(SystemId::Full1, sym) == CycleLabel::Cu);
  CHECK(label_orbit(SystemId::Full1, c3) == CycleLabel::C3Patch1);
  CHECK(label_orbit(SystemId::Full1, c3b) == CycleLabel::C3Patch2);
  CHECK(label_orbit(SystemId::Full1, c4) == CycleLabel::C4);
}

TEST_CASE("rotation number of a synthetic rotation") {
  for (double rho : {0.1, 0.3, 0.5 - 1e-3, std::numbers::sqrt2 - 1.0}) {
    std::vector<State4> pts;
    for (int i = 0; i < 200; ++i) {
      const double a = 2.0 * std::numbers::pi * rho * i;
      pts.push_back({0.5, 0.3 + 0.1 * std::cos(a), 0.4 + 0.1 * std::sin(a), 0.2});
    }
    const double r = rotation_number(pts);
    CHECK(std::min(std::abs(r - rho), std::abs(1.0 - r - rho)) < 1e-4);
  }
  std::vector<State4> few(10, State4{0.1, 0.1, 0.1, 0.1});
  CHECK_THROWS(rotation_number(few));
}

TEST_CASE("nearest_rational") {
  const Rational r = nearest_rational(0.4, 10);
  CHECK(r.p == 2);
  CHECK(r.q == 5);
  CHECK(r.distance < 1e-15);
  const Rational s = nearest_rational(std::numbers::sqrt2 - 1.0, 5);
  CHECK(s.q <= 5);
  CHECK(s.distance > 1e-3);
}

TEST_CASE("multiplicity from cyclic clusters") {
  std::vector<State4> pts;
  const State4 c[3] = {{0.5, 0.1, 0.3, 0.2}, {0.5, 0.3, 0.4, 0.1}, {0.5, 0.2, 0.6, 0.3}};
  for (int i = 0; i < 90; ++i) {
    State4 x = c[i % 3];
    x[kV1] += 1e-6 * ((i * 7) % 5);
    pts.push_back(x);
  }
  const MultiplicityReport r = detect_period_multiplicity(pts);
  REQUIRE(r.k);
  CHECK(*r.k == 3);
  CHECK_FALSE(r.torus_suspected);

  std::vector<State4> curve;
  for (int i = 0; i < 300; ++i) {
    const double a = 2.0 * std::numbers::pi * (std::numbers::sqrt2 - 1.0) * i;
    curve.push_back({0.5, 0.3 + 0.1 * std::cos(a), 0.4 + 0.1 * std::sin(a), 0.2});
  }
  const MultiplicityReport t = detect_period_multiplicity(curve);
  CHECK_FALSE(t.k);
  CHECK(t.torus_suspected);
  CHECK(box_counting_dimension(curve) == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("Lyapunov exponent signs") {
  const double m = 0.6, l = 0.1;
  const auto p1 = ModelParams::symmetric(0.1, 1.0, m, l);
  State4 x0 = aa(m, l);
  x0[kU1] += 0.01;
  CHECK(lyapunov_max(SystemId::Full1, x0, p1, 500.0).exponent < 0.0);

  const auto p2 = ModelParams::symmetric(0.1, 1.0, 0.5, l);
  const State4 settled = advance(SystemId::Full1, {0.52, 0.2, 0.51, 0.2}, p2, 3000.0);
  const LyapunovResult r = lyapunov_max(SystemId::Full1, settled, p2, 3000.0);
  CHECK(std::abs(r.exponent) < 0.005);
}
