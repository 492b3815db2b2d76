#include "allee/bifurcation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>

#include "allee/equilibria.hpp"

namespace allee {

double hopf_H1(double l) {
  if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("hopf_H1: l must lie in (0, 1)");
  return (l + 1.0) / 2.0;
}

double hopf_H2(double l, double m) {
  if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("hopf_H2: l must lie in (0, 1)");
  const double n = l + 1.0 - 2.0 * m;
  if (n < -1e-15) throw BifurcationError("hopf_H2: no positive crossing for m > (l + 1) / 2");
  return std::max(0.0, m * n / 2.0);
}

Approximate hopf_3d(double l, double m) {
  if (!(l > 0.0 && l < m && m <= (1.0 + l) / 2.0 + 1e-15))
    throw std::invalid_argument("hopf_3d: requires 0 < l < m <= (1 + l) / 2");
  return {std::max(0.0, m * (1.0 + l - 2.0 * m) / (2.0 - m))};
}

std::string_view to_string(SweepParam s) {
  switch (s) {
    case SweepParam::Alpha: return "alpha";
    case SweepParam::M: return "m";
    case SweepParam::Gamma: return "gamma";
    case SweepParam::L: return "l";
  }
  return "?";
}

SweepParam sweep_param_from_string(std::string_view s) {
  for (auto v : {SweepParam::Alpha, SweepParam::M, SweepParam::Gamma, SweepParam::L})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown sweep parameter '" + std::string(s) + "'");
}

std::string_view to_string(HopfTarget t) {
  switch (t) {
    case HopfTarget::AAInPhase: return "AA-in-phase";
    case HopfTarget::AAAntiPhase: return "AA-anti-phase";
    case HopfTarget::BRefuge: return "B-refuge";
  }
  return "?";
}

ModelParams with_param(const ModelParams& p, SweepParam s, double value) {
  ModelParams q = p;
  switch (s) {
    case SweepParam::Alpha: q.alpha1 = q.alpha2 = value; break;
    case SweepParam::M: q.m1 = q.m2 = value; break;
    case SweepParam::Gamma: q.gamma1 = q.gamma2 = value; break;
    case SweepParam::L: q.l1 = q.l2 = value; break;
  }
  q.validate();
  return q;
}

namespace {

std::optional<cplx> pair_of_2x2(double a, double b, double c, double d) {
  const double tr = a + d, det = a * d - b * c;
  const double disc = tr * tr / 4.0 - det;
  if (disc >= 0.0) return std::nullopt;
  return cplx(tr / 2.0, std::sqrt(-disc));
}

}  // namespace

TrackedPair track_pair(HopfTarget target, const ModelParams& p) {
  TrackedPair tp;
  if (target == HopfTarget::BRefuge) {
    const auto roots = solve_B(p);
    if (roots.empty()) throw BifurcationError("track_pair: no B equilibrium");
    const BPoint& b = roots.back();
    tp.location = b.layout1(p.m1);
    tp.sys = SystemId::Refuge4b;
    const Spectrum s = eigen_numeric(subsystem_jacobian(tp.sys, tp.location, p));
    for (const cplx& v : s.values)
      if (v.imag() > 0.0 && (!tp.pair || v.real() > tp.pair->real())) tp.pair = v;
    return tp;
  }
  p.require_symmetric("track_pair");
  if (!aa_exists(p)) throw BifurcationError("track_pair: AA does not exist");
  const double v = predator_level(p.m(), p.l());
  tp.location = State4(p.m(), v, p.m(), v);
  tp.sys = SystemId::Full1;
  const Jacobian4 j = jacobian(tp.location, p);
  const double sign = target == HopfTarget::AAInPhase ? 1.0 : -1.0;
  tp.pair = pair_of_2x2(j[kU1][kU1] + sign * j[kU1][kU2], j[kU1][kV1], j[kV1][kU1], j[kV1][kV1]);
  return tp;
}

HopfPoint locate_hopf(HopfTarget target, const ModelParams& base, SweepParam param, double lo,
                      double hi, double tol) {
  if (!(lo < hi)) throw std::invalid_argument("locate_hopf: empty bracket");
  auto re = [&](double v) {
    const TrackedPair tp = track_pair(target, with_param(base, param, v));
    if (!tp.pair)
      throw BifurcationError("locate_hopf: pair is real at " + std::string(to_string(param)) +
                             " = " + std::to_string(v));
    return tp.pair->real();
  };
  const double flo = re(lo), fhi = re(hi);
  if (flo != 0.0 && fhi != 0.0 && (flo > 0.0) == (fhi > 0.0))
    throw BifurcationError("locate_hopf: no sign change of Re over the bracket");
  double root;
  if (flo == 0.0) {
    root = lo;
  } else if (fhi == 0.0) {
    root = hi;
  } else {
    std::uintmax_t iters = 200;
    auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol; };
    const auto br = boost::math::tools::toms748_solve(re, lo, hi, flo, fhi, stop, iters);
    root = 0.5 * (br.first + br.second);
  }
  HopfPoint h;
  h.target = target;
  h.param = param;
  h.value = root;
  h.params = with_param(base, param, root);
  const TrackedPair tp = track_pair(target, h.params);
  h.sys = tp.sys;
  h.location = tp.location;
  h.omega = tp.pair->imag();
  h.real_part = tp.pair->real();
  const double d = 1e-6 * std::max(1.0, std::abs(root));
  h.transversality = (re(root + d) - re(root - d)) / (2.0 * d);
  return h;
}

namespace {

using CVec = Eigen::VectorXcd;

// Second and third differentials of the field on the dynamical coordinates
// of sys, at x. The field is cubic, so C is constant.
struct Forms {
  SystemId sys;
  ModelParams p;
  State4 x;
  std::vector<std::size_t> idx;

  CVec lift(const CVec& r) const {
    CVec f = CVec::Zero(4);
    for (std::size_t k = 0; k < idx.size(); ++k) f[idx[k]] = r[k];
    return f;
  }
  CVec drop(const CVec& f) const {
    CVec r(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) r[k] = f[idx[k]];
    return r;
  }

  CVec B(const CVec& a_, const CVec& b_) const {
    const CVec a = lift(a_), b = lift(b_);
    CVec out = CVec::Zero(4);
    const double f1 = p.beta1 * allee_growth_du2(x.u1(), p.l1);
    const double f2 = p.beta2 * allee_growth_du2(x.u2(), p.l2);
    out[kU1] = f1 * a[kU1] * b[kU1] - (a[kU1] * b[kV1] + a[kV1] * b[kU1]);
    out[kV1] = p.gamma1 * (a[kV1] * b[kU1] + a[kU1] * b[kV1]);
    out[kU2] = f2 * a[kU2] * b[kU2] - (a[kU2] * b[kV2] + a[kV2] * b[kU2]);
    out[kV2] = p.gamma2 * (a[kV2] * b[kU2] + a[kU2] * b[kV2]);
    return drop(out);
  }

  CVec C(const CVec& a_, const CVec& b_, const CVec& c_) const {
    const CVec a = lift(a_), b = lift(b_), c = lift(c_);
    CVec out = CVec::Zero(4);
    out[kU1] = -6.0 * p.beta1 * a[kU1] * b[kU1] * c[kU1];
    out[kU2] = -6.0 * p.beta2 * a[kU2] * b[kU2] * c[kU2];
    return drop(out);
  }
};

// Eigenvector of m for the eigenvalue closest to target.
CVec eigenvector_near(const Eigen::MatrixXcd& m, cplx target) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()[i] - target) < std::abs(es.eigenvalues()[best] - target)) best = i;
  return es.eigenvectors().col(best);
}

}  // namespace

double lyapunov_first(const HopfPoint& h) {
  if (!(h.omega >= 1e-6))
    throw BifurcationError("lyapunov_first: frequency too small (near a Bogdanov-Takens point)");
  const auto rows = subsystem_jacobian(h.sys, h.location, h.params);
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rows[i][j];
  const Eigen::MatrixXcd ac = a.cast<cplx>();
  const cplx iw(0.0, h.omega);

  CVec q = eigenvector_near(ac, iw);
  q /= q.norm();
  CVec pv = eigenvector_near(ac.transpose(), -iw);
  pv /= std::conj(pv.dot(q));  // <p, q> = 1 with <a, b> = conj(a) . b

  auto dc = dynamic_coords(h.sys);
  Forms f{h.sys, h.params, h.location, std::vector<std::size_t>(dc.begin(), dc.end())};
  const CVec qb = q.conjugate();
  const CVec cqqb = f.C(q, q, qb);
  const CVec bqqb = f.B(q, qb);
  const CVec bqq = f.B(q, q);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const CVec s1 = ac.fullPivLu().solve(bqqb);
  const CVec s2 = (cplx(2.0) * iw * id - ac).fullPivLu().solve(bqq);
  const cplx val = pv.dot(cqqb) - 2.0 * pv.dot(f.B(q, s1)) + pv.dot(f.B(qb, s2));
  return val.real() / (2.0 * h.omega);
}

std::optional<HopfPoint> b_stability_change(const ModelParams& base, double a_lo, double a_hi,
                                            int samples) {
  if (samples < 2 || !(a_lo < a_hi)) throw std::invalid_argument("b_stability_change: bad grid");
  std::optional<double> prev_a, prev_re;
  for (int i = 0; i <= samples; ++i) {
    const double a = a_lo + (a_hi - a_lo) * i / samples;
    std::optional<double> re;
    try {
      const TrackedPair tp = track_pair(HopfTarget::BRefuge, with_param(base, SweepParam::Alpha, a));
      if (tp.pair) re = tp.pair->real();
    } catch (const BifurcationError&) {
    }
    if (re && prev_re && (*re > 0.0) != (*prev_re > 0.0))
      return locate_hopf(HopfTarget::BRefuge, base, SweepParam::Alpha, *prev_a, a);
    prev_a = re ? std::optional<double>(a) : std::nullopt;
    prev_re = re;
  }
  return std::nullopt;
}

}  // namespace allee
