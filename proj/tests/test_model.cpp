#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "allee/model.hpp"

using namespace allee;

TEST_CASE("allee_growth at the cubic roots and midpoint") {
  CHECK(allee_growth(0.0, 0.1) == 0.0);
  CHECK(allee_growth(1.0, 0.1) == 0.0);
  CHECK(allee_growth(0.5, 0.1) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(allee_growth_du(0.0, 0.1) == doctest::Approx(-0.1));
  CHECK(allee_growth_du(1.0, 0.1) == doctest::Approx(-0.9));
}

TEST_CASE("params validation") {
  CHECK_NOTHROW(ModelParams::symmetric(0.02, 1.0, 0.5, 0.1));
  CHECK_THROWS_AS(ModelParams::symmetric(-0.1, 1.0, 0.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::symmetric(0.1, 1.0, 0.5, 1.5), std::invalid_argument);
  ModelParams p = ModelParams::symmetric(0.1, 1.0, 0.5, 0.1);
  CHECK(p.is_symmetric());
  p.beta2 = 2.0;
  CHECK_FALSE(p.is_symmetric());
  CHECK_THROWS(p.require_symmetric("test"));
  p.beta2 = 0.0;
  CHECK_THROWS(p.validate());
}

TEST_CASE("vector_field examples") {
  auto p = ModelParams::symmetric(0.02, 1.0, 0.5, 0.1);
  CHECK(vector_field(SystemId::Full1, State4{}, p) == State4{});

  for (double m : {0.2, 0.45, 0.5, 0.8}) {
    auto q = ModelParams::symmetric(0.02, 1.0, m, 0.1);
    const double vs = (m - 0.1) * (1.0 - m);
    State4 f = vector_field(SystemId::Full1, {m, vs, m, vs}, q);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(f[i]) < 1e-16);
  }

  auto p0 = ModelParams::symmetric(0.0, 0.7, 0.4, 0.1);
  State4 f = vector_field(SystemId::Local2, {0.3, 0.2, 0.0, 0.0}, p0);
  CHECK(f[kU1] == doctest::Approx(allee_growth(0.3, 0.1) - 0.3 * 0.2));
  CHECK(f[kV1] == doctest::Approx(0.7 * 0.2 * (0.3 - 0.4)));
  CHECK(f[kU2] == 0.0);
  CHECK(f[kV2] == 0.0);
}

TEST_CASE("vector_field rejects invalid states") {
  auto p = ModelParams::symmetric(0.02, 1.0, 0.5, 0.1);
  CHECK_THROWS_AS(vector_field(SystemId::PreyPrey3, {0.1, 0.1, 0.1, 0.0}, p),
                  std::invalid_argument);
  CHECK_THROWS_AS(vector_field(SystemId::Refuge4a, {0.1, 0.1, 0.1, 0.1}, p),
                  std::invalid_argument);
  CHECK_THROWS_AS(vector_field(SystemId::Full1, {-0.1, 0.1, 0.1, 0.1}, p),
                  std::invalid_argument);
  CHECK_NOTHROW(raw_field({-0.1, 0.1, 0.1, 0.1}, p));
}

TEST_CASE("embed and project") {
  const double a[] = {0.3, 0.4, 0.5};
  CHECK(embed(SystemId::Refuge4a, a) == State4{0.3, 0.0, 0.4, 0.5});
  CHECK(embed(SystemId::Refuge4b, a) == State4{0.3, 0.4, 0.5, 0.0});
  const double b[] = {0.3, 0.4};
  CHECK(embed(SystemId::PreyPrey3, b) == State4{0.3, 0.0, 0.4, 0.0});
  CHECK(project(SystemId::Refuge4b, {1, 2, 3, 0}) == std::vector<double>{1, 2, 3});
  CHECK_THROWS_AS(embed(SystemId::Full1, b), std::invalid_argument);

  for (auto sys : {SystemId::Full1, SystemId::Local2, SystemId::PreyPrey3, SystemId::Refuge4a,
                   SystemId::Refuge4b}) {
    std::vector<double> r(dimension(sys));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = 0.1 * static_cast<double>(i + 1) + 1e-17;
    CHECK(project(sys, embed(sys, r)) == r);
    CHECK(system_from_string(to_string(sys)) == sys);
  }
  CHECK_THROWS(system_from_string("bogus"));
}

TEST_CASE("property: orthant faces point inward") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.2), A(0.0, 0.3), M(0.05, 1.0);
  for (int k = 0; k < 2000; ++k) {
    auto p = ModelParams::symmetric(A(rng), U(rng), M(rng), 0.05 + 0.5 * U(rng) / 1.2);
    Vec4 x{U(rng), U(rng), U(rng), U(rng)};
    const std::size_t face = static_cast<std::size_t>(k % 4);
    x[face] = 0.0;
    Vec4 f = raw_field(x, p);
    if (face == kU1) CHECK(f[kU1] == doctest::Approx(p.alpha() * x[kU2]));
    if (face == kU2) CHECK(f[kU2] == doctest::Approx(p.alpha() * x[kU1]));
    CHECK(f[face] >= 0.0);
  }
}

TEST_CASE("property: predator-free hyperplanes are invariant exactly") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(0.0, 1.2);
  for (int k = 0; k < 1000; ++k) {
    auto p = ModelParams::symmetric(0.3 * U(rng), U(rng), U(rng) / 1.2, 0.5 * U(rng) / 1.2);
    Vec4 x{U(rng), 0.0, U(rng), U(rng)};
    CHECK(raw_field(x, p)[kV1] == 0.0);
    x = {U(rng), U(rng), U(rng), 0.0};
    CHECK(raw_field(x, p)[kV2] == 0.0);
  }
}

TEST_CASE("property: patch swap commutes with the symmetric field") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(0.0, 1.2);
  for (int k = 0; k < 1000; ++k) {
    auto p = ModelParams::symmetric(0.3 * U(rng), U(rng), U(rng) / 1.2, 0.5 * U(rng) / 1.2);
    State4 x{U(rng), U(rng), U(rng), U(rng)};
    CHECK(vector_field(SystemId::Full1, x.swapped(), p) ==
          vector_field(SystemId::Full1, x, p).swapped());
  }
}

TEST_CASE("property: zero dispersal decouples the patches") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> U(0.0, 1.2);
  for (int k = 0; k < 1000; ++k) {
    auto p = ModelParams::symmetric(0.0, U(rng), U(rng) / 1.2, 0.5 * U(rng) / 1.2);
    State4 x{U(rng), U(rng), U(rng), U(rng)};
    State4 y = x;
    y[kU2] = U(rng);
    y[kV2] = U(rng);
    State4 fx = vector_field(SystemId::Full1, x, p);
    State4 fy = vector_field(SystemId::Full1, y, p);
    CHECK(fx[kU1] == fy[kU1]);
    CHECK(fx[kV1] == fy[kV1]);
    State4 loc = vector_field(SystemId::Local2, {x[kU1], x[kV1], 0.0, 0.0}, p);
    CHECK(loc[kU1] == fx[kU1]);
    CHECK(loc[kV1] == fx[kV1]);
  }
}
