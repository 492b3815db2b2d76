#include "allee/equilibria.hpp"

#include <algorithm>
#include <cmath>

#include "allee/linalg.hpp"
#include "allee/polynomial.hpp"

namespace allee {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::O: return "O";
    case Family::Ol: return "O_l";
    case Family::O11: return "O_11";
    case Family::AA: return "AA";
    case Family::C: return "C";
    case Family::B: return "B";
  }
  return "?";
}

std::string_view to_string(BranchEnd e) {
  switch (e) {
    case BranchEnd::Reached: return "reached";
    case BranchEnd::Fold: return "fold";
    case BranchEnd::Diagonal: return "diagonal";
    case BranchEnd::LeftRange: return "left_range";
    case BranchEnd::NoConvergence: return "no_convergence";
  }
  return "?";
}

double field_residual(const State4& x, const ModelParams& p) {
  const Vec4 f = raw_field(x.c, p);
  double r = 0.0;
  for (double v : f) r = std::max(r, std::abs(v));
  return r;
}

bool aa_exists(const ModelParams& p) {
  return 0.0 < p.l() && p.l() < p.m() && p.m() < 1.0;
}

std::vector<EquilibriumRecord> symmetric_equilibria(const ModelParams& p) {
  p.require_symmetric("symmetric_equilibria");
  const double l = p.l(), m = p.m();
  std::vector<EquilibriumRecord> out;
  out.push_back({State4{}, Family::O, "O"});
  out.push_back({State4{l, 0.0, l, 0.0}, Family::Ol, "O_l"});
  out.push_back({State4{1.0, 0.0, 1.0, 0.0}, Family::O11, "O_11"});
  if (aa_exists(p)) {
    const double vs = predator_level(m, l);
    out.push_back({State4{m, vs, m, vs}, Family::AA, "AA"});
  }
  for (auto& r : out) r.residual = field_residual(r.location, p);
  return out;
}

// ---------------------------------------------------------------------------
// C family

namespace {

struct CHomotopy {
  double l;
  Vec<2> h(double u1, double u2, double a) const {
    return {allee_growth(u1, l) + a * (u2 - u1), allee_growth(u2, l) + a * (u1 - u2)};
  }
  // Columns: d/du1, d/du2, d/da.
  std::array<Vec<3>, 2> dh(double u1, double u2, double a) const {
    return {{{allee_growth_du(u1, l) - a, a, u2 - u1},
             {a, allee_growth_du(u2, l) - a, u1 - u2}}};
  }
};

Vec<3> tangent(const std::array<Vec<3>, 2>& j) {
  // Cross product of the two rows spans the kernel of a full-rank 2x3 matrix.
  Vec<3> t{j[0][1] * j[1][2] - j[0][2] * j[1][1], j[0][2] * j[1][0] - j[0][0] * j[1][2],
           j[0][0] * j[1][1] - j[0][1] * j[1][0]};
  const double n = std::hypot(t[0], t[1], t[2]);
  for (auto& v : t) v /= n;
  return t;
}

std::string root_label(double r, double l) {
  if (r == 0.0) return "0";
  if (r == l) return "l";
  return "1";
}

}  // namespace

double fold_condition_C(double u1, double u2, const ModelParams& p) {
  const double a = p.alpha(), f1 = allee_growth_du(u1, p.l()), f2 = allee_growth_du(u2, p.l());
  return f1 * f2 - a * (f1 + f2);
}

std::optional<CPoint> refine_C(double u1, double u2, const ModelParams& p,
                               const ContinuationOptions& opt) {
  const CHomotopy H{p.l()};
  const double a = p.alpha();
  for (int it = 0; it < opt.newton_max_iter; ++it) {
    const auto r = H.h(u1, u2, a);
    const auto j = H.dh(u1, u2, a);
    Mat<2> J{{{j[0][0], j[0][1]}, {j[1][0], j[1][1]}}};
    auto d = solve(J, Vec<2>{-r[0], -r[1]});
    if (!d) return std::nullopt;
    u1 += (*d)[0];
    u2 += (*d)[1];
    if (!std::isfinite(u1) || !std::isfinite(u2)) return std::nullopt;
    if (std::max(std::abs((*d)[0]), std::abs((*d)[1])) < opt.newton_tol) {
      const auto rr = H.h(u1, u2, a);
      return CPoint{u1, u2, "", std::max(std::abs(rr[0]), std::abs(rr[1]))};
    }
  }
  return std::nullopt;
}

namespace {

struct ArcPoint {
  double u1, u2, a;
};

// Pseudo-arclength continuation of one C branch from (r1, r2, 0) toward
// alpha_target. Stops at folds, the diagonal, or when leaving the box.
CSeedReport continue_branch(double r1, double r2, double l, double alpha_target,
                            const ContinuationOptions& opt, std::vector<ArcPoint>* trace) {
  const CHomotopy H{l};
  CSeedReport rep;
  rep.label = root_label(r1, l) + root_label(r2, l);
  ArcPoint w{r1, r2, 0.0};
  if (trace) trace->push_back(w);
  if (alpha_target <= 0.0) {
    rep.point = CPoint{r1, r2, rep.label, 0.0};
    return rep;
  }
  Vec<3> t = tangent(H.dh(w.u1, w.u2, w.a));
  if (t[2] < 0.0)
    for (auto& v : t) v = -v;
  double ds = 1e-3;
  const double side = r1 - r2;

  for (int step = 0; step < 200000; ++step) {
    rep.steps = step;
    // Predictor and corrector with the arclength constraint.
    bool ok = false;
    ArcPoint nw{};
    int iters = 0;
    while (!ok) {
      const ArcPoint pred{w.u1 + ds * t[0], w.u2 + ds * t[1], w.a + ds * t[2]};
      nw = pred;
      for (iters = 0; iters < opt.newton_max_iter; ++iters) {
        const auto r = H.h(nw.u1, nw.u2, nw.a);
        const auto j = H.dh(nw.u1, nw.u2, nw.a);
        const double c = t[0] * (nw.u1 - pred.u1) + t[1] * (nw.u2 - pred.u2) + t[2] * (nw.a - pred.a);
        Mat<3> J{{j[0], j[1], t}};
        auto d = solve(J, Vec<3>{-r[0], -r[1], -c});
        if (!d) break;
        nw.u1 += (*d)[0];
        nw.u2 += (*d)[1];
        nw.a += (*d)[2];
        if (std::max({std::abs((*d)[0]), std::abs((*d)[1]), std::abs((*d)[2])}) < opt.newton_tol) {
          ok = true;
          break;
        }
      }
      if (!ok) {
        ds *= 0.5;
        if (ds < opt.ds_min) {
          rep.end = BranchEnd::NoConvergence;
          rep.alpha_end = w.a;
          return rep;
        }
      }
    }
    Vec<3> nt = tangent(H.dh(nw.u1, nw.u2, nw.a));
    if (nt[0] * t[0] + nt[1] * t[1] + nt[2] * t[2] < 0.0)
      for (auto& v : nt) v = -v;

    if (nw.a >= alpha_target) {
      // Interpolate to the target and polish at fixed alpha.
      const double s = (alpha_target - w.a) / (nw.a - w.a);
      ModelParams q = ModelParams::symmetric(alpha_target, 1.0, 0.5, l);
      auto c = refine_C(w.u1 + s * (nw.u1 - w.u1), w.u2 + s * (nw.u2 - w.u2), q, opt);
      if (!c) {
        rep.end = BranchEnd::NoConvergence;
        rep.alpha_end = w.a;
        return rep;
      }
      c->label = rep.label;
      rep.point = c;
      rep.end = BranchEnd::Reached;
      rep.alpha_end = alpha_target;
      if (trace) trace->push_back({c->u1, c->u2, alpha_target});
      return rep;
    }
    if ((nw.u1 - nw.u2) * side <= 0.0) {
      rep.end = BranchEnd::Diagonal;
      rep.alpha_end = nw.a;
      if (trace) trace->push_back(nw);
      return rep;
    }
    if (nt[2] < 0.0) {
      rep.end = BranchEnd::Fold;
      rep.alpha_end = std::max(w.a, nw.a);
      if (trace) trace->push_back(nw);
      return rep;
    }
    const double lo = -opt.margin, hi = 1.0 + opt.margin;
    if (nw.u1 < lo || nw.u1 > hi || nw.u2 < lo || nw.u2 > hi) {
      rep.end = BranchEnd::LeftRange;
      rep.alpha_end = nw.a;
      return rep;
    }
    w = nw;
    t = nt;
    if (trace) trace->push_back(w);
    ds = (iters <= 3) ? std::min(2.0 * ds, opt.ds_max) : ds;
    // Do not overshoot the target by more than one step.
    if (t[2] > 0.0) ds = std::min(ds, std::max(opt.ds_min, 1.01 * (alpha_target - w.a) / t[2]));
  }
  rep.end = BranchEnd::NoConvergence;
  rep.alpha_end = w.a;
  return rep;
}

std::array<std::pair<double, double>, 6> c_seeds(double l) {
  return {{{0.0, l}, {l, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {l, 1.0}, {1.0, l}}};
}

}  // namespace

CSolution solve_C(const ModelParams& p, const ContinuationOptions& opt) {
  p.require_symmetric("solve_C");
  CSolution sol;
  std::vector<CPoint> roots;
  for (auto [r1, r2] : c_seeds(p.l())) {
    CSeedReport rep = continue_branch(r1, r2, p.l(), p.alpha(), opt, nullptr);
    if (rep.point) {
      const CPoint& c = *rep.point;
      const bool dup = std::any_of(roots.begin(), roots.end(), [&](const CPoint& o) {
        return std::max(std::abs(o.u1 - c.u1), std::abs(o.u2 - c.u2)) < opt.dedupe_tol;
      });
      if (!dup) roots.push_back(c);
    }
    sol.seeds.push_back(std::move(rep));
  }
  // Pair each root with its swap image.
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(roots[i].u1 - roots[j].u2) < 1e-8 && std::abs(roots[i].u2 - roots[j].u1) < 1e-8) {
        sol.pairs.emplace_back(roots[i], roots[j]);
        used[i] = used[j] = true;
        break;
      }
    }
    if (!used[i]) {
      // The swap image is always a root; refine it explicitly.
      CPoint img{roots[i].u2, roots[i].u1, std::string(roots[i].label.rbegin(), roots[i].label.rend()),
                 roots[i].residual};
      sol.pairs.emplace_back(roots[i], img);
      used[i] = true;
    }
  }
  return sol;
}

int c_pair_count(const ModelParams& p) { return static_cast<int>(solve_C(p).pairs.size()); }

std::vector<CFold> c_branch_ends(double l, double alpha_max, const ContinuationOptions& opt) {
  std::vector<CFold> out;
  for (auto [r1, r2] : c_seeds(l)) {
    if (r1 > r2) continue;  // swap images end at the same alpha
    std::vector<ArcPoint> trace;
    CSeedReport rep = continue_branch(r1, r2, l, alpha_max, opt, &trace);
    if (rep.end != BranchEnd::Fold && rep.end != BranchEnd::Diagonal) continue;
    CFold f;
    f.label = rep.label;
    f.kind = rep.end;
    // Refine the turning point on (H = 0, fold condition = 0).
    ArcPoint w = trace.back();
    if (rep.end == BranchEnd::Diagonal) {
      // On the diagonal only u = l has f'(u) = 2a > 0, so the merger is the
      // pitchfork of O_l.
      w = {l, l, 0.5 * (l - l * l)};
    }
    const CHomotopy H{l};
    auto G = [&](const ArcPoint& x) {
      const auto r = H.h(x.u1, x.u2, x.a);
      const double f1 = allee_growth_du(x.u1, l), f2 = allee_growth_du(x.u2, l);
      return Vec<3>{r[0], r[1], f1 * f2 - x.a * (f1 + f2)};
    };
    if (rep.end == BranchEnd::Fold) {
      for (int it = 0; it < opt.newton_max_iter; ++it) {
        const Vec<3> g = G(w);
        Mat<3> J{};
        const double hstep = 1e-7;
        for (int k = 0; k < 3; ++k) {
          ArcPoint e = w;
          (k == 0 ? e.u1 : k == 1 ? e.u2 : e.a) += hstep;
          const Vec<3> ge = G(e);
          for (int r = 0; r < 3; ++r) J[r][k] = (ge[r] - g[r]) / hstep;
        }
        auto d = solve(J, Vec<3>{-g[0], -g[1], -g[2]});
        if (!d) break;
        w.u1 += (*d)[0];
        w.u2 += (*d)[1];
        w.a += (*d)[2];
        if (std::max({std::abs((*d)[0]), std::abs((*d)[1]), std::abs((*d)[2])}) < 1e-13) break;
      }
    }
    f.alpha = w.a;
    f.u1 = w.u1;
    f.u2 = w.u2;
    f.condition = G(w)[2];
    out.push_back(f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// B family

double fold_condition_B(double y, const ModelParams& p) {
  return allee_growth_du(y, p.l()) - p.alpha();
}

std::vector<BPoint> solve_B(const ModelParams& p) {
  p.require_symmetric("solve_B");
  const double a = p.alpha(), l = p.l(), m = p.m();
  if (!(m > 0.0)) throw std::invalid_argument("solve_B: requires m > 0");
  // f(y) + a (m - y) = -y^3 + (1 + l) y^2 - (l + a) y + a m.
  const Poly g{a * m, -(l + a), 1.0 + l, -1.0};
  const Poly dg = g.derivative();
  std::vector<double> ys;
  for (auto r : poly_roots(g)) {
    if (std::abs(r.imag()) > 1e-7) continue;
    double y = r.real();
    for (int k = 0; k < 4; ++k) {
      const double d = dg(y);
      if (d == 0.0) break;
      const double yn = y - g(y) / d;
      if (std::abs(g(yn)) >= std::abs(g(y))) break;
      y = yn;
    }
    ys.push_back(y);
  }
  std::sort(ys.begin(), ys.end());
  std::vector<BPoint> out;
  for (double y : ys) {
    if (!out.empty() && std::abs(out.back().y - y) < 1e-8) {
      ++out.back().multiplicity;
      continue;
    }
    BPoint b;
    b.y = y;
    b.z = (allee_growth(m, l) + a * (y - m)) / m;
    out.push_back(b);
  }
  if (out.size() == 3) {
    out[0].label = "0";
    out[1].label = "l";
    out[2].label = "1";
  }
  for (auto& b : out) b.residual = field_residual(b.layout1(m), p);
  return out;
}

std::vector<EquilibriumRecord> nontrivial_equilibria(const ModelParams& p) {
  std::vector<EquilibriumRecord> out;
  for (const auto& [c1, c2] : solve_C(p).pairs) {
    for (const CPoint* c : {&c1, &c2}) {
      EquilibriumRecord r;
      r.location = State4{c->u1, 0.0, c->u2, 0.0};
      r.family = Family::C;
      r.tag = "C_" + c->label;
      r.residual = field_residual(r.location, p);
      r.in_orthant = r.location.in_first_orthant();
      out.push_back(r);
    }
  }
  for (const auto& b : solve_B(p)) {
    for (int side : {1, 2}) {
      EquilibriumRecord r;
      r.location = side == 1 ? b.layout1(p.m()) : b.layout2(p.m());
      r.family = Family::B;
      r.tag = "B" + std::to_string(side) + (b.label.empty() ? "" : "_" + b.label);
      r.multiplicity = b.multiplicity;
      r.residual = field_residual(r.location, p);
      r.in_orthant = r.location.in_first_orthant();
      out.push_back(r);
    }
  }
  return out;
}

std::vector<EquilibriumRecord> all_equilibria(const ModelParams& p) {
  auto out = symmetric_equilibria(p);
  auto rest = nontrivial_equilibria(p);
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

// ---------------------------------------------------------------------------
// Tables and boundaries

std::vector<AsymptoticPoint> asymptotic_C(const ModelParams& p) {
  const double a = p.alpha(), l = p.l();
  auto pt = [](std::string lab, double u1, double u2) {
    return AsymptoticPoint{std::move(lab), State4{u1, 0.0, u2, 0.0}};
  };
  return {
      pt("0l", a, l + a / (1.0 - l)),
      pt("01", a / l, 1.0 - a / (1.0 - l)),
      pt("l0", l + a / (1.0 - l), a),
      pt("l1", l - a / l, 1.0 - a),
      pt("10", 1.0 - a / (1.0 - l), a / l),
      pt("1l", 1.0 - a, l - a / l),
  };
}

std::vector<AsymptoticPoint> asymptotic_B(const ModelParams& p, TableVariant v) {
  const double a = p.alpha(), l = p.l(), m = p.m();
  const double vs = predator_level(m, l);
  auto pt = [m](std::string lab, double x, double y) {
    return AsymptoticPoint{std::move(lab), State4{m, y, x, 0.0}};
  };
  std::vector<AsymptoticPoint> out;
  out.push_back(pt("0", m * a / l + m * (m - l + m * l) * a * a / (l * l * l), vs - a * (1.0 - a / l)));
  out.push_back(pt("l", l - (m - l) * a / (l * (1.0 - l)), vs - (m - l) * a / m));
  const double q = (1.0 - m) * (1.0 - 2.0 * m + l * m) * a * a / std::pow(1.0 - l, 3);
  if (v == TableVariant::Nominal)
    out.push_back(pt("1", 1.0 - (1.0 - m) * a / (l * (1.0 - l)) - q, vs - (1.0 - m) * a / m));
  else
    out.push_back(pt("1", 1.0 - (1.0 - m) * a / (1.0 - l) - q, vs + (1.0 - m) * a / m));
  return out;
}

SCBoundary boundary_SC(double l) {
  if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("boundary_SC: requires 0 < l < 1");
  SCBoundary b;
  b.alpha1 = 1.0 - l + l * l - std::cbrt(std::pow((2.0 * l - 1.0) * (l - 2.0) * (l + 1.0), 2)) / 2.0;
  b.alpha2 = (l - l * l) / 2.0;
  return b;
}

SBBoundary boundary_SB(double l, double alpha) {
  if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("boundary_SB: requires 0 < l < 1");
  SBBoundary b;
  b.cusp_alpha = (1.0 - l + l * l) / 3.0;
  b.cusp_m = std::pow(1.0 + l, 3) / (27.0 * b.cusp_alpha);
  if (alpha > 0.0 && alpha < b.cusp_alpha) {
    const double base = 9.0 * (alpha + l) * (1.0 + l);
    const double root = 2.0 * std::pow(1.0 - l + l * l - 3.0 * alpha, 1.5);
    b.m12 = (base + root) / (27.0 * alpha);
    b.m23 = (base - root) / (27.0 * alpha);
    b.m12_in_unit = *b.m12 > 0.0 && *b.m12 < 1.0;
    b.m23_in_unit = *b.m23 > 0.0 && *b.m23 < 1.0;
  }
  return b;
}

std::vector<double> sb_fold_m(double l, double alpha) {
  const double disc = 1.0 - l + l * l - 3.0 * alpha;
  if (!(alpha > 0.0) || disc <= 0.0) return {};
  std::vector<double> ms;
  for (double s : {-1.0, 1.0}) {
    const double y = ((1.0 + l) + s * std::sqrt(disc)) / 3.0;  // f'(y) = alpha
    ms.push_back(y - allee_growth(y, l) / alpha);
  }
  std::sort(ms.begin(), ms.end());
  return ms;
}

double sb_combined(double l, double alpha, double m) {
  const double t = 27.0 * alpha * m - 9.0 * (alpha + l) * (1.0 + l) + 2.0 * std::pow(1.0 + l, 3);
  return t * t + 4.0 * std::pow(3.0 * alpha - 1.0 + l - l * l, 3);
}

}  // namespace allee
