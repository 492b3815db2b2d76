#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "allee/spectral.hpp"

using namespace allee;

namespace {

Spectrum reals(std::vector<double> v) {
  std::vector<cplx> c(v.begin(), v.end());
  return Spectrum::make(c, Provenance::ClosedForm);
}

double max_entry_diff(const Jacobian4& a, const Jacobian4& b) {
  double d = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) d = std::max(d, std::abs(a[i][k] - b[i][k]));
  return d;
}

}  // namespace

TEST_CASE("jacobian structure and finite differences") {
  auto p = ModelParams::symmetric(0.02, 1.0, 0.5, 0.1);
  Jacobian4 j0 = jacobian(State4{}, p);
  CHECK(j0[0][0] == doctest::Approx(-0.12));
  CHECK(j0[1][1] == doctest::Approx(-0.5));
  CHECK(j0[0][1] == 0.0);
  CHECK(j0[1][0] == 0.0);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    auto q = ModelParams::symmetric(0.3 * U(rng), 0.2 + U(rng), U(rng), 0.5 * U(rng));
    State4 x{U(rng), U(rng), U(rng), U(rng)};
    Jacobian4 j = jacobian(x, q);
    CHECK(max_entry_diff(j, jacobian_fd(x, q)) < 1e-6);
    CHECK(j[0][3] == 0.0);
    CHECK(j[1][2] == 0.0);
    CHECK(j[1][3] == 0.0);
    CHECK(j[3][0] == 0.0);
    CHECK(j[3][1] == 0.0);
    CHECK(j[0][2] == q.alpha());
    CHECK(j[2][0] == q.alpha());
    // R_i = g v_i, not g.
    CHECK(j[1][0] == doctest::Approx(q.gamma() * x.v1()));
  }

  Jacobian4 jc = jacobian({0.3, 0.0, 0.7, 0.0}, p);
  for (int r : {1, 3})
    for (int c = 0; c < 4; ++c)
      if (c != r) CHECK(jc[r][c] == 0.0);
}

TEST_CASE("eigen_quartic on diagonal and structured matrices") {
  Jacobian4 d{};
  d[0][0] = 0.3;
  d[1][1] = -1.2;
  d[2][2] = 2.5e-3;
  d[3][3] = -0.7;
  CHECK(spectrum_distance(eigen_quartic(d), reals({0.3, -1.2, 2.5e-3, -0.7})) < 1e-14);

  auto p = ModelParams::symmetric(0.02, 1.0, 0.5, 0.1);
  auto sO = eigen_symmetric(SymmetricPoint::O, p);
  CHECK(spectrum_distance(sO, reals({-0.1, -0.14, -0.5, -0.5})) < 1e-15);
  CHECK(spectrum_distance(eigen_quartic(jacobian(State4{}, p)), sO) < 1e-9);
  auto sl = eigen_symmetric(SymmetricPoint::Ol, p);
  CHECK(spectrum_distance(sl, reals({0.09, 0.05, -0.4, -0.4})) < 1e-15);
  CHECK(spectrum_distance(eigen_quartic(jacobian({0.1, 0, 0.1, 0}, p)), sl) < 1e-9);
}

TEST_CASE("AA closed form uses n = 1 + l - 2m") {
  auto p = ModelParams::symmetric(0.05, 0.8, 0.4, 0.1);
  const double vs = predator_level(0.4, 0.1);
  auto num = eigen_quartic(jacobian({0.4, vs, 0.4, vs}, p));
  CHECK(spectrum_distance(eigen_symmetric(SymmetricPoint::AA, p), num) < 1e-9);
  CHECK(spectrum_distance(eigen_symmetric(SymmetricPoint::AA, p, TableVariant::Nominal), num) > 1e-3);

  auto h1 = ModelParams::symmetric(0.2, 1.0, 0.55, 0.1);
  auto s = eigen_symmetric(SymmetricPoint::AA, h1);
  int axis = 0;
  for (auto& z : s.values) axis += std::abs(z.real()) < 1e-15;
  CHECK(axis == 2);
  CHECK_THROWS(eigen_symmetric(SymmetricPoint::AA, ModelParams::symmetric(0.1, 1, 1.2, 0.1)));
}

TEST_CASE("property: closed forms match the quartic on random parameters") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double l = 0.02 + 0.5 * U(rng);
    const double m = l + (1.0 - l) * (0.02 + 0.96 * U(rng));
    auto p = ModelParams::symmetric(0.2 * U(rng), 0.1 + 1.5 * U(rng), m, l);
    for (auto [pt, x] : {std::pair{SymmetricPoint::O, State4{}},
                         std::pair{SymmetricPoint::Ol, State4{l, 0, l, 0}},
                         std::pair{SymmetricPoint::O11, State4{1, 0, 1, 0}},
                         std::pair{SymmetricPoint::AA,
                                   State4{m, predator_level(m, l), m, predator_level(m, l)}}}) {
      auto closed = eigen_symmetric(pt, p);
      auto num = eigen_quartic(jacobian(x, p));
      CHECK(spectrum_distance(closed, num) < 1e-8);
      auto lem = lemma_spectrum(jacobian(x, p));
      REQUIRE(lem);
      CHECK(lem->which == LemmaCase::BlockSymmetric);
      CAPTURE(static_cast<int>(pt));
      CHECK(spectrum_distance(lem->spectrum, num) < 1e-9);
    }
    for (auto& eq : nontrivial_equilibria(p)) {
      auto j = jacobian(eq.location, p);
      auto lem = lemma_spectrum(j);
      REQUIRE(lem);
      CHECK(lem->which == (eq.family == Family::C ? LemmaCase::PreyOnly
                           : eq.location.v2() == 0.0 ? LemmaCase::SecondDecoupled
                                                     : LemmaCase::FirstDecoupled));
      CHECK(spectrum_distance(lem->spectrum, eigen_quartic(j)) < 1e-8);
    }
  }
}

TEST_CASE("C points contain S1 and S2 as exact roots") {
  auto p = ModelParams::symmetric(0.001, 1.0, 0.45, 0.1);
  for (auto& eq : nontrivial_equilibria(p)) {
    if (eq.family != Family::C) continue;
    auto s = eigen_quartic(jacobian(eq.location, p));
    auto j = jacobian(eq.location, p);
    CHECK(is_subset(reals({j[1][1], j[3][3]}), s, 1e-12));
  }
}

TEST_CASE("characteristic factors") {
  auto p0 = ModelParams::symmetric(0.0, 1.0, 0.45, 0.1);
  for (auto& eq : nontrivial_equilibria(p0))
    if (eq.family == Family::C) {
      auto cf = characteristic_factors(eq, p0);
      const Poly want = Poly::shifted_negx(allee_growth_du(eq.location.u1(), 0.1)) *
                        Poly::shifted_negx(allee_growth_du(eq.location.u2(), 0.1));
      CHECK(coeff_distance(cf.factors[0], want) < 1e-15);
    }

  for (double a : {0.001, 0.01, 0.04}) {
    auto p = ModelParams::symmetric(a, 1.0, 0.45, 0.1);
    for (auto& eq : nontrivial_equilibria(p)) {
      auto cf = characteristic_factors(eq, p);
      CHECK(coeff_distance(cf.product(), charpoly(jacobian(eq.location, p))) < 1e-10);
      if (eq.family == Family::B) {
        const State4 b = eq.location.v1() == 0.0 ? eq.location : eq.location.swapped();
        const double S1 = -(0.45 - b.u1());
        CHECK(std::abs(cf.product()(S1)) < 1e-14);
      }
    }
  }
  EquilibriumRecord o{State4{}, Family::O, "O"};
  CHECK_THROWS(characteristic_factors(o, ModelParams::symmetric(0.1, 1, 0.5, 0.1)));
}

TEST_CASE("table eigenvalues: nominal examples") {
  auto p = ModelParams::symmetric(0.001, 1.0, 0.45, 0.1);
  auto t = table_eigen_C(0, p);
  CHECK(is_subset(reals({-0.449, -0.0988}), t, 1e-12));
  // Tr1 = (1 + l - 2m) m - (1 - m) a = .08945; the pair real part is Tr1 / 2.
  auto b = table_eigen_B(0, p);
  bool found = false;
  for (auto& z : b.values)
    if (std::abs(z.imag()) > 0) found |= std::abs(z.real() - 0.08945 / 2) < 1e-12;
  CHECK(found);
}

TEST_CASE("table eigenvalues: zero-alpha limit") {
  auto p = ModelParams::symmetric(0.0, 1.0, 0.45, 0.1);
  auto c = asymptotic_C(p);
  for (std::size_t row = 0; row < 6; ++row) {
    auto num = eigen_quartic(jacobian(c[row].location, p));
    CAPTURE(row);
    CHECK(spectrum_distance(table_eigen_C(row, p, TableVariant::Corrected), num) < 1e-12);
  }
  auto bs = asymptotic_B(p, TableVariant::Corrected);
  for (std::size_t col = 0; col < 3; ++col) {
    auto num = eigen_quartic(jacobian(bs[col].location.swapped(), p));
    CAPTURE(col);
    CHECK(spectrum_distance(table_eigen_B(col, p, TableVariant::Corrected), num) < 1e-12);
  }
}

TEST_CASE("property: corrected tables agree to second order") {
  const double l = 0.1, m = 0.45;
  for (std::size_t row = 0; row < 6; ++row) {
    std::vector<double> err;
    for (double a : {1e-3, 5e-4, 2.5e-4}) {
      auto p = ModelParams::symmetric(a, 1.0, m, l);
      auto lab = asymptotic_C(p)[row].label;
      for (auto& eq : nontrivial_equilibria(p))
        if (eq.tag == "C_" + lab)
          err.push_back(spectrum_distance(table_eigen_C(row, p, TableVariant::Corrected),
                                          eigen_quartic(jacobian(eq.location, p))));
    }
    CAPTURE(row);
    REQUIRE(err.size() == 3);
    CHECK(err[0] / err[1] > 3.0);
    CHECK(err[1] / err[2] > 3.0);
  }
  for (std::size_t col = 0; col < 3; ++col) {
    std::vector<double> err;
    for (double a : {1e-3, 5e-4, 2.5e-4}) {
      auto p = ModelParams::symmetric(a, 1.0, m, l);
      auto b = solve_B(p);
      err.push_back(spectrum_distance(table_eigen_B(col, p, TableVariant::Corrected),
                                      eigen_quartic(jacobian(b[col].layout1(m), p))));
    }
    CAPTURE(col);
    CHECK(err[0] / err[1] > 3.0);
    CHECK(err[1] / err[2] > 3.0);
  }
}

TEST_CASE("property: subsystem spectra are inherited") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double l = 0.05 + 0.4 * U(rng);
    const double m = l + (1.0 - l) * (0.05 + 0.9 * U(rng));
    auto p = ModelParams::symmetric(0.05 * U(rng), 0.2 + U(rng), m, l);
    for (auto& eq : nontrivial_equilibria(p)) {
      auto full = eigen_quartic(jacobian(eq.location, p));
      if (eq.family == Family::C) {
        auto s2 = eigen_numeric(subsystem_jacobian(SystemId::PreyPrey3, eq.location, p));
        CHECK(is_subset(s2, full, 1e-9));
        auto s3 = eigen_numeric(subsystem_jacobian(SystemId::Refuge4b, eq.location, p));
        CHECK(is_subset(s3, full, 1e-9));
      } else {
        auto sys = eq.location.v2() == 0.0 ? SystemId::Refuge4b : SystemId::Refuge4a;
        auto s3 = eigen_numeric(subsystem_jacobian(sys, eq.location, p));
        CHECK(is_subset(s3, full, 1e-9));
      }
    }
  }
}

TEST_CASE("conjugate closure") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    Jacobian4 j{};
    for (auto& r : j)
      for (auto& v : r) v = U(rng);
    auto s = eigen_quartic(j);
    for (auto& z : s.values) {
      if (z.imag() == 0.0) continue;
      bool partner = false;
      for (auto& w : s.values) partner |= (w == std::conj(z));
      CHECK(partner);
    }
  }
}

TEST_CASE("stability classification") {
  CHECK(classify(Spectrum::make({{-1, 1}, {-1, -1}, -2, -3}, Provenance::ClosedForm)).tag ==
        StabilityTag::StableSpiral);
  CHECK(classify(reals({-1, -2})).tag == StabilityTag::StableNode);
  CHECK(classify(reals({1, -2})).tag == StabilityTag::Saddle);
  CHECK(classify(reals({1, -2, -3})).tag == StabilityTag::SaddleNodeLike);
  CHECK(classify(Spectrum::make({{1, 1}, {1, -1}, -2}, Provenance::ClosedForm)).tag ==
        StabilityTag::SaddleFocus);
  CHECK(classify(reals({1e-9, -2})).tag == StabilityTag::Nonhyperbolic);
  CHECK(classify(reals({1, 2})).unstable_dim == 2);

  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    auto p = ModelParams::symmetric(0.3 * U(rng), 0.1 + U(rng), 0.05 + 0.9 * U(rng), 0.04 + 0.9 * U(rng));
    CHECK(classify(eigen_symmetric(SymmetricPoint::O, p)).tag == StabilityTag::StableNode);
  }

  auto p = ModelParams::symmetric(0.1, 1.0, 0.6, 0.1);
  CHECK(classify(eigen_symmetric(SymmetricPoint::AA, p)).tag == StabilityTag::StableSpiral);
  auto q = ModelParams::symmetric(0.01, 1.0, 0.45, 0.1);
  CHECK(classify(eigen_symmetric(SymmetricPoint::AA, q)).tag == StabilityTag::UnstableSpiral);
}
