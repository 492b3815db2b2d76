#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "allee/flow.hpp"
#include "allee/simd.hpp"

using namespace allee;

namespace {

std::vector<State4> random_states(std::size_t n, SystemId sys, unsigned seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<State4> out;
  for (std::size_t i = 0; i < n; ++i) {
    State4 x(u(g), 0.5 * u(g), u(g), 0.5 * u(g));
    if (sys == SystemId::Refuge4a) x[kV1] = 0.0;
    if (sys == SystemId::Refuge4b) x[kV2] = 0.0;
    if (sys == SystemId::PreyPrey3) x[kV1] = x[kV2] = 0.0;
    out.push_back(x);
  }
  return out;
}

void check_against_scalar(SystemId sys, const ModelParams& p, std::size_t n, double t_end,
                          SimdLevel level) {
  const auto xs = random_states(n, sys, 11 + n);
  const BatchResult r = advance_batch(sys, xs, p, t_end, StepOptions{}, level);
  REQUIRE(r.final_states.size() == n);
  for (std::size_t i = 0; i < n; ++i) {
    IntegratorStats st;
    const State4 ref = advance(sys, xs[i], p, t_end, {}, &st);
    for (std::size_t c = 0; c < 4; ++c) CHECK(r.final_states[i][c] == ref[c]);
    CHECK(r.stats[i].steps == st.steps);
    CHECK(r.stats[i].rejected == st.rejected);
  }
}

}  // namespace

TEST_CASE("scalar kernel is always available") {
  CHECK(simd_available(SimdLevel::Scalar));
  CHECK(simd_available(detected_simd()));
  CHECK(to_string(SimdLevel::Avx2) == "avx2");
}

TEST_CASE("batch integration is bitwise equal to the scalar integrator") {
  const auto p = ModelParams::symmetric(0.0256, 1.0, 0.45, 0.1);
  for (SimdLevel level : {SimdLevel::Scalar, SimdLevel::Avx2}) {
    if (!simd_available(level)) continue;
    CAPTURE(to_string(level));
    for (std::size_t n : {1u, 4u, 5u, 11u}) check_against_scalar(SystemId::Full1, p, n, 400.0, level);
    for (SystemId sys : {SystemId::Refuge4a, SystemId::Refuge4b, SystemId::PreyPrey3})
      check_against_scalar(sys, p, 6, 300.0, level);
  }
}

TEST_CASE("scalar and AVX2 batches agree bitwise") {
  if (!simd_available(SimdLevel::Avx2)) return;
  const auto p = ModelParams::symmetric(0.0332, 1.0, 0.325, 0.1);
  const auto xs = random_states(13, SystemId::Full1, 5);
  const BatchResult a = advance_batch(SystemId::Full1, xs, p, 1000.0, StepOptions{}, SimdLevel::Scalar);
  const BatchResult b = advance_batch(SystemId::Full1, xs, p, 1000.0, StepOptions{}, SimdLevel::Avx2);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t c = 0; c < 4; ++c) CHECK(a.final_states[i][c] == b.final_states[i][c]);
    CHECK(a.stats[i].fevals == b.stats[i].fevals);
  }
}

TEST_CASE("batch edge cases") {
  const auto p = ModelParams::symmetric(0.02, 1.0, 0.45, 0.1);
  const std::vector<State4> xs{{0.1, 0.2, 0.3, 0.4}, State4{}};
  const BatchResult r = advance_batch(SystemId::Full1, xs, p, 0.0, StepOptions{});
  CHECK(r.final_states[0] == xs[0]);
  CHECK(r.final_states[1] == State4{});
  CHECK(advance_batch(SystemId::Full1, std::span<const State4>{}, p, 1.0, StepOptions{})
            .final_states.empty());
  CHECK_THROWS(advance_batch(SystemId::Full1, xs, p, -1.0, StepOptions{}));
}
