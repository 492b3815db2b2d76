#include "allee/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace allee {

Jacobian4 jacobian(const State4& x, const ModelParams& p) {
  const double u1 = x.u1(), v1 = x.v1(), u2 = x.u2(), v2 = x.v2();
  Jacobian4 j{};
  j[0][0] = p.beta1 * allee_growth_du(u1, p.l1) - v1 - p.alpha1;
  j[0][1] = -u1;
  j[0][2] = p.alpha1;
  j[1][0] = p.gamma1 * v1;
  j[1][1] = -p.gamma1 * (p.m1 - u1);
  j[2][0] = p.alpha2;
  j[2][2] = p.beta2 * allee_growth_du(u2, p.l2) - v2 - p.alpha2;
  j[2][3] = -u2;
  j[3][2] = p.gamma2 * v2;
  j[3][3] = -p.gamma2 * (p.m2 - u2);
  return j;
}

Jacobian4 jacobian_fd(const State4& x, const ModelParams& p, double h) {
  Jacobian4 j{};
  for (std::size_t k = 0; k < 4; ++k) {
    Vec4 a = x.c, b = x.c;
    a[k] += h;
    b[k] -= h;
    const Vec4 fa = raw_field(a, p), fb = raw_field(b, p);
    for (std::size_t i = 0; i < 4; ++i) j[i][k] = (fa[i] - fb[i]) / (2.0 * h);
  }
  return j;
}

std::vector<std::vector<double>> subsystem_jacobian(SystemId sys, const State4& x,
                                                    const ModelParams& p) {
  Jacobian4 j = jacobian(x, p);
  if (sys == SystemId::Local2) {
    // No dispersal terms in the single-patch model.
    j[0][0] += p.alpha1;
  }
  const auto idx = dynamic_coords(sys);
  std::vector<std::vector<double>> out(idx.size(), std::vector<double>(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c) out[r][c] = j[idx[r]][idx[c]];
  return out;
}

// ---------------------------------------------------------------------------
// Spectrum

namespace {

bool canonical_less(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

}  // namespace

Spectrum Spectrum::make(std::vector<cplx> v, Provenance prov) {
  std::sort(v.begin(), v.end(), canonical_less);
  return Spectrum{std::move(v), prov};
}

double Spectrum::spectral_radius() const {
  double r = 0.0;
  for (auto& v : values) r = std::max(r, std::abs(v));
  return r;
}

double Spectrum::max_real() const {
  double r = -std::numeric_limits<double>::infinity();
  for (auto& v : values) r = std::max(r, v.real());
  return r;
}

double spectrum_distance(const Spectrum& a, const Spectrum& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  // Best matching over permutations (n <= 4).
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double d = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) d = std::max(d, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, d);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

bool is_subset(const Spectrum& sub, const Spectrum& full, double tol) {
  std::vector<bool> used(full.size(), false);
  // Greedy on sorted input is sufficient for the small, separated sets used here.
  for (auto& s : sub.values) {
    std::size_t best = full.size();
    double bd = tol;
    for (std::size_t j = 0; j < full.size(); ++j)
      if (!used[j] && std::abs(full[j] - s) <= bd) {
        bd = std::abs(full[j] - s);
        best = j;
      }
    if (best == full.size()) return false;
    used[best] = true;
  }
  return true;
}

namespace {

double horner_scale(const Poly& p, double r) {
  double e = 0.0;
  const auto& c = p.coeffs();
  for (std::size_t i = c.size(); i-- > 0;) e = e * r + std::abs(c[i]);
  return e;
}

// Coefficients and roots are computed in extended precision; clustered
// eigenvalues then stay resolved well below 1e-9 after rounding to double.
Spectrum roots_checked(const std::vector<long double>& coeffs) {
  std::vector<double> cd(coeffs.begin(), coeffs.end());
  const Poly psi(cd);
  for (std::uint64_t attempt = 0; attempt < 3; ++attempt) {
    RootOptions opt;
    opt.seed = 0x5eed + 7919 * attempt;
    opt.tol = 1e-18;
    std::vector<std::complex<long double>> r;
    try {
      r = poly_roots(coeffs, opt);
    } catch (const RootFindError&) {
      continue;
    }
    std::vector<cplx> out;
    bool ok = true;
    for (auto& z : r) {
      const cplx zd(static_cast<double>(z.real()), static_cast<double>(z.imag()));
      if (std::abs(psi(zd)) > 1e-10 * std::max(1.0, horner_scale(psi, std::abs(zd)))) ok = false;
      out.push_back(zd);
    }
    if (ok) return Spectrum::make(std::move(out), Provenance::QuarticNumeric);
  }
  throw NumericError("eigen_quartic: backward error above tolerance after restarts");
}

}  // namespace

Spectrum eigen_quartic(const Jacobian4& j) { return roots_checked(charpoly_coeffs<long double>(j)); }

Spectrum eigen_numeric(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  auto pack = [&](auto tag) {
    constexpr std::size_t N = decltype(tag)::value;
    Mat<N> m{};
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) m[i][k] = a[i][k];
    return charpoly_coeffs<long double>(m);
  };
  switch (n) {
    case 1: return Spectrum::make({cplx(a[0][0])}, Provenance::QuarticNumeric);
    case 2: return roots_checked(pack(std::integral_constant<std::size_t, 2>{}));
    case 3: return roots_checked(pack(std::integral_constant<std::size_t, 3>{}));
    case 4: return roots_checked(pack(std::integral_constant<std::size_t, 4>{}));
    default: throw std::invalid_argument("eigen_numeric: dimension must be 1..4");
  }
}

// ---------------------------------------------------------------------------
// Closed forms

std::vector<cplx> quadratic_roots(double a, double b, double c) {
  // a x^2 + b x + c, stable form.
  const double disc = b * b - 4.0 * a * c;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(s, b));
    if (q == 0.0) return {cplx(0.0), cplx(0.0)};
    return {cplx(q / a), cplx(c / q)};
  }
  const double re = -b / (2.0 * a), im = std::sqrt(-disc) / (2.0 * std::abs(a));
  return {cplx(re, im), cplx(re, -im)};
}

std::vector<cplx> cubic_roots(double a, double b, double c, double d) {
  // Normalize to x^3 + B x^2 + C x + D and depress with x = t - B/3.
  const double B = b / a, C = c / a, D = d / a;
  const double sh = B / 3.0;
  const double pp = C - B * B / 3.0;
  const double qq = 2.0 * B * B * B / 27.0 - B * C / 3.0 + D;
  const double disc = qq * qq / 4.0 + pp * pp * pp / 27.0;
  std::vector<cplx> r;
  if (disc < 0.0) {
    // Three distinct real roots.
    const double rho = std::sqrt(-pp / 3.0);
    const double phi = std::acos(std::clamp(-qq / (2.0 * rho * rho * rho), -1.0, 1.0));
    for (int k = 0; k < 3; ++k)
      r.emplace_back(2.0 * rho * std::cos((phi + 2.0 * M_PI * k) / 3.0) - sh);
  } else {
    const double s = std::sqrt(disc);
    const double u = std::cbrt(-qq / 2.0 + s), v = std::cbrt(-qq / 2.0 - s);
    r.emplace_back(u + v - sh);
    const double re = -(u + v) / 2.0 - sh, im = std::sqrt(3.0) / 2.0 * (u - v);
    r.emplace_back(re, im);
    r.emplace_back(re, -im);
  }
  // One Newton step on the monic cubic tightens cancellation-prone roots.
  for (auto& z : r) {
    const cplx f = ((z + B) * z + C) * z + D;
    const cplx df = (3.0 * z + 2.0 * B) * z + C;
    if (std::abs(df) > 1e-300) {
      const cplx zn = z - f / df;
      const cplx fn = ((zn + B) * zn + C) * zn + D;
      if (std::abs(fn) < std::abs(f)) z = (z.imag() == 0.0) ? cplx(zn.real()) : zn;
    }
  }
  return r;
}

Spectrum eigen_symmetric(SymmetricPoint pt, const ModelParams& p, TableVariant v) {
  p.require_symmetric("eigen_symmetric");
  const double a = p.alpha(), g = p.gamma(), m = p.m(), l = p.l();
  std::vector<cplx> ev;
  switch (pt) {
    case SymmetricPoint::O:
      ev = {-g * m, -g * m, -l, -l - 2.0 * a};
      break;
    case SymmetricPoint::Ol:
      ev = {-g * (m - l), -g * (m - l), l * (1.0 - l), l * (1.0 - l) - 2.0 * a};
      break;
    case SymmetricPoint::O11:
      ev = {g * (1.0 - m), g * (1.0 - m), -(1.0 - l), -(1.0 - l) - 2.0 * a};
      break;
    case SymmetricPoint::AA: {
      if (!aa_exists(p)) throw std::invalid_argument("eigen_symmetric: AA requires 0 < l < m < 1");
      const double vs = predator_level(m, l);
      const double n = (v == TableVariant::Nominal) ? 1.0 + l - 2.0 * a : 1.0 + l - 2.0 * m;
      const double t1 = m * n, t2 = m * n - 2.0 * a, det = m * g * vs;
      for (auto z : quadratic_roots(1.0, -t1, det)) ev.push_back(z);
      for (auto z : quadratic_roots(1.0, -t2, det)) ev.push_back(z);
      break;
    }
  }
  return Spectrum::make(std::move(ev), Provenance::ClosedForm);
}

namespace {

struct Blocks {
  double P1, Q1, R1, S1, P2, Q2, R2, S2, a12, a21;
};

Blocks blocks(const Jacobian4& j) {
  return {j[0][0], j[0][1], j[1][0], j[1][1], j[2][2], j[2][3], j[3][2], j[3][3], j[0][2], j[2][0]};
}

bool near(double x, double y, double tol) { return std::abs(x - y) <= tol; }

}  // namespace

Poly lemma_case3_cubic(const Jacobian4& j) {
  const Blocks b = blocks(j);
  const double a2 = b.a12 * b.a21;
  // det(lambda I - M) for M on (u1, v1, u2).
  return Poly{-(b.P1 * b.S1 * b.P2 - b.Q1 * b.R1 * b.P2 - a2 * b.S1),
              b.P1 * b.S1 - b.Q1 * b.R1 + b.P1 * b.P2 + b.S1 * b.P2 - a2,
              -(b.P1 + b.S1 + b.P2), 1.0};
}

Poly lemma_case4_cubic(const Jacobian4& j) {
  const Blocks b = blocks(j);
  const double a2 = b.a12 * b.a21;
  return Poly{-(b.P2 * b.S2 * b.P1 - b.Q2 * b.R2 * b.P1 - a2 * b.S2),
              b.P2 * b.S2 - b.Q2 * b.R2 + b.P1 * b.P2 + b.S2 * b.P1 - a2,
              -(b.P2 + b.S2 + b.P1), 1.0};
}

std::optional<LemmaResult> lemma_spectrum(const Jacobian4& j, double tol) {
  const Blocks b = blocks(j);
  std::vector<cplx> ev;
  auto cubic = [&](const Poly& c) {
    for (auto z : cubic_roots(c[3], c[2], c[1], c[0])) ev.push_back(z);
  };
  if (near(b.P1, b.P2, tol) && near(b.Q1, b.Q2, tol) && near(b.R1, b.R2, tol) &&
      near(b.S1, b.S2, tol) && near(b.a12, b.a21, tol)) {
    // [[P + s a, Q], [R, S]] for s = +1, -1.
    for (double s : {1.0, -1.0}) {
      const double p = b.P1 + s * b.a12;
      for (auto z : quadratic_roots(1.0, -(p + b.S1), p * b.S1 - b.Q1 * b.R1)) ev.push_back(z);
    }
    return LemmaResult{LemmaCase::BlockSymmetric, Spectrum::make(ev, Provenance::ClosedForm)};
  }
  if (std::abs(b.R1) <= tol && std::abs(b.R2) <= tol) {
    ev = {b.S1, b.S2};
    const double a2 = b.a12 * b.a21;
    for (auto z : quadratic_roots(1.0, -(b.P1 + b.P2), b.P1 * b.P2 - a2)) ev.push_back(z);
    return LemmaResult{LemmaCase::PreyOnly, Spectrum::make(ev, Provenance::ClosedForm)};
  }
  if (std::abs(b.Q2 * b.R2) <= tol) {
    ev = {b.S2};
    cubic(lemma_case3_cubic(j));
    return LemmaResult{LemmaCase::SecondDecoupled, Spectrum::make(ev, Provenance::ClosedForm)};
  }
  if (std::abs(b.Q1 * b.R1) <= tol) {
    ev = {b.S1};
    cubic(lemma_case4_cubic(j));
    return LemmaResult{LemmaCase::FirstDecoupled, Spectrum::make(ev, Provenance::ClosedForm)};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Factored characteristic polynomials

Poly CharFactors::product() const {
  Poly out{1.0};
  for (auto& f : factors) out = out * f;
  return out;
}

CharFactors characteristic_factors(const EquilibriumRecord& eq, const ModelParams& p) {
  p.require_symmetric("characteristic_factors");
  const double a = p.alpha(), g = p.gamma(), m = p.m(), l = p.l();
  const State4& x = eq.location;
  CharFactors cf;
  if (eq.family == Family::C) {
    const double P1 = allee_growth_du(x.u1(), l) - a, P2 = allee_growth_du(x.u2(), l) - a;
    const double S1 = -g * (m - x.u1()), S2 = -g * (m - x.u2());
    const Poly phi2 = Poly::shifted_negx(P1) * Poly::shifted_negx(P2) - Poly{a * a};
    cf.factors = {phi2, Poly::shifted_negx(S2), Poly::shifted_negx(S1)};
    return cf;
  }
  if (eq.family == Family::B) {
    // Orient as (y, 0, m, z): patch 1 predator free.
    const State4 b = (x.v1() == 0.0) ? x : x.swapped();
    const double y = b.u1(), z = b.v2();
    const double P1 = allee_growth_du(y, l) - a;
    const double P2 = allee_growth_du(m, l) - z - a;
    const double S1 = -g * (m - y);
    const Poly lam{0.0, 1.0};
    const Poly phi3 = (-1.0) * lam * Poly::shifted_negx(P1) * Poly::shifted_negx(P2) +
                      (g * m * z) * Poly::shifted_negx(P1) + (a * a) * lam;
    cf.factors = {phi3, Poly::shifted_negx(S1)};
    return cf;
  }
  throw std::invalid_argument("characteristic_factors: point must be a C or B equilibrium");
}

// ---------------------------------------------------------------------------
// Tables

Spectrum table_eigen_C(std::size_t row, const ModelParams& p, TableVariant v) {
  p.require_symmetric("table_eigen_C");
  const double a = p.alpha(), g = p.gamma(), m = p.m(), l = p.l();
  const bool pr = v == TableVariant::Nominal;
  std::vector<cplx> ev;
  switch (row) {
    case 0:
      ev = {-g * (m - a), pr ? -g * (m - a / (1.0 - l)) : -g * (m - l - a / (1.0 - l)),
            -l + (1.0 + 2.0 * l) * a, l * (1.0 - l) + (1.0 - 3.0 * l) * a / (1.0 - l)};
      break;
    case 1:
      ev = {-g * (m - a / l), pr ? g * (1.0 - m + a / (1.0 - l)) : g * (1.0 - m - a / (1.0 - l)),
            -l + (2.0 + l) * a / l, -(1.0 - l) + (3.0 - l) * a / (1.0 - l)};
      break;
    case 2:
      ev = {-g * (m - l - a / (1.0 - l)), -g * (m - a),
            l * (1.0 - l) + (1.0 - 3.0 * l) * a / (1.0 - l), -l + (1.0 + 2.0 * l) * a};
      break;
    case 3:
      ev = {pr ? -g * (m - 1.0 + a / (1.0 - l)) : -g * (m - l + a / l),
            pr ? g * (1.0 - m + a) : g * (1.0 - m - a),
            l * (1.0 - l) - (2.0 - 3.0 * l) * a / l, -(1.0 - l) + (3.0 - 2.0 * l) * a};
      break;
    case 4:
      ev = {pr ? g * (1.0 - m + a / (1.0 - l)) : g * (1.0 - m - a / (1.0 - l)), -g * (m - a / l),
            -l + (2.0 + l) * a / l, -(1.0 - l) + (3.0 - l) * a / (1.0 - l)};
      break;
    case 5:
      ev = {pr ? g * (1.0 - m + a) : g * (1.0 - m - a), -g * (m - l + a / l),
            pr ? 1.0 - l - (2.0 - 3.0 * l) * a / l : l * (1.0 - l) - (2.0 - 3.0 * l) * a / l,
            -(1.0 - l) + (3.0 - 2.0 * l) * a};
      break;
    default: throw std::out_of_range("table_eigen_C: row must be 0..5");
  }
  return Spectrum::make(std::move(ev), Provenance::ClosedForm);
}

Spectrum table_eigen_B(std::size_t column, const ModelParams& p, TableVariant v) {
  p.require_symmetric("table_eigen_B");
  if (column > 2) throw std::out_of_range("table_eigen_B: column must be 0..2");
  const double a = p.alpha(), g = p.gamma(), m = p.m(), l = p.l();
  const bool pr = v == TableVariant::Nominal;
  const double mn = (1.0 + l - 2.0 * m) * m;
  const double z = asymptotic_B(p, v)[column].location.v1();
  double l1 = 0.0, l2 = 0.0, tr = 0.0;
  switch (column) {
    case 0:
      l1 = -g * m * (1.0 - a / l);
      l2 = -l + (2.0 * m * l + 2.0 * m - l) * a / l;
      tr = pr ? mn - (1.0 - m) * a : mn;
      break;
    case 1:
      l1 = pr ? -g * (m - l) * (1.0 - a / (l * (1.0 - l))) : -g * (m - l) * (1.0 + a / (l * (1.0 - l)));
      l2 = l * (1.0 - l) - 2.0 * (1.0 - 2.0 * l) * (m - l) * a / (l * (1.0 - l)) - (pr ? 0.0 : a);
      tr = pr ? mn - (1.0 + l - m) * a : mn - a * l / m;
      break;
    case 2:
      l1 = pr ? g * (1.0 - m) / (1.0 - l) * (1.0 - (1.0 + l * m - 2.0 * m) * a / ((1.0 - l) * (1.0 - l)))
              : g * (1.0 - m) * (1.0 - a / (1.0 - l));
      l2 = -(1.0 - l) + (3.0 - l - 4.0 * m + 2.0 * l * m) * a / (1.0 - l);
      tr = pr ? mn - (2.0 - m) * a : mn - a / m;
      break;
  }
  std::vector<cplx> ev{l1, l2};
  for (auto r : quadratic_roots(1.0, -tr, g * m * z)) ev.push_back(r);
  return Spectrum::make(std::move(ev), Provenance::ClosedForm);
}

// ---------------------------------------------------------------------------
// Classification

std::string_view to_string(StabilityTag t) {
  switch (t) {
    case StabilityTag::StableNode: return "stable_node";
    case StabilityTag::StableSpiral: return "stable_spiral";
    case StabilityTag::UnstableNode: return "unstable_node";
    case StabilityTag::UnstableSpiral: return "unstable_spiral";
    case StabilityTag::SaddleNodeLike: return "saddle_node_like";
    case StabilityTag::Saddle: return "saddle";
    case StabilityTag::SaddleFocus: return "saddle_focus";
    case StabilityTag::Nonhyperbolic: return "nonhyperbolic";
  }
  return "?";
}

StabilityClass classify(const Spectrum& s, double tol) {
  const double scale = tol * std::max(1.0, s.spectral_radius());
  StabilityClass c;
  int neg = 0, pos = 0;
  bool complex_pair = false;
  for (auto& v : s.values) {
    if (std::abs(v.real()) < scale) {
      c.tag = StabilityTag::Nonhyperbolic;
      c.unstable_dim = static_cast<int>(std::count_if(
          s.values.begin(), s.values.end(), [scale](const cplx& z) { return z.real() >= scale; }));
      return c;
    }
    (v.real() > 0.0 ? pos : neg)++;
    if (std::abs(v.imag()) > scale) complex_pair = true;
  }
  c.unstable_dim = pos;
  if (pos == 0)
    c.tag = complex_pair ? StabilityTag::StableSpiral : StabilityTag::StableNode;
  else if (neg == 0)
    c.tag = complex_pair ? StabilityTag::UnstableSpiral : StabilityTag::UnstableNode;
  else if (complex_pair)
    c.tag = StabilityTag::SaddleFocus;
  else
    c.tag = s.size() <= 2 ? StabilityTag::Saddle : StabilityTag::SaddleNodeLike;
  return c;
}

EquilibriumSpectrum analyze(const State4& x, const ModelParams& p) {
  Spectrum s = eigen_quartic(jacobian(x, p));
  return {s, classify(s)};
}

}  // namespace allee
