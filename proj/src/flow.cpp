#include "allee/flow.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace allee {

namespace {

struct ModelField {
  SystemId sys;
  ModelParams p;
  void operator()(const double* x, double* out) const { field_generic<double>(sys, p, x, out); }
};

using Integrator4 = DormandPrince<4, ModelField>;

StepOptions step_options(const IntegratorOptions& opt, bool clip = true) {
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0))
    throw std::invalid_argument("integrate: rtol and atol must be > 0");
  StepOptions s;
  s.rtol = opt.rtol;
  s.atol = opt.atol;
  s.max_steps = opt.max_steps;
  s.clip_negative = clip;
  return s;
}

void check_horizon(double t_end, const IntegratorOptions& opt) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end))
    throw std::invalid_argument("integrate: t_end must be finite and >= 0");
  if (t_end > opt.time_budget)
    throw IntegrationError(IntegrationError::Kind::TimeBudget,
                           "integrate: horizon " + std::to_string(t_end) +
                               " exceeds the time budget " + std::to_string(opt.time_budget));
}

template <class I>
IntegratorStats stats_of(const I& ig, const IntegratorOptions& opt) {
  IntegratorStats s;
  s.steps = ig.accepted();
  s.rejected = ig.rejected();
  s.fevals = ig.fevals();
  s.clipped = ig.clipped();
  s.rtol = opt.rtol;
  s.atol = opt.atol;
  return s;
}

State4 to_state(const std::array<double, 4>& a) { return State4(a); }

bool crosses(const Section& s, double g_prev, double g) {
  if (s.direction < 0) return g_prev > 0.0 && g <= 0.0;
  if (s.direction > 0) return g_prev < 0.0 && g >= 0.0;
  return (g_prev > 0.0 && g <= 0.0) || (g_prev < 0.0 && g >= 0.0);
}

// One Runge-Kutta step with the section coordinate as independent variable
// carries a point lying close to the section exactly onto it.
void henon_step(const ModelField& f, const Section& s, State4& x, double& t) {
  const double ds = s.level - x[s.coord];
  if (ds == 0.0) return;
  double fx[4];
  f(x.c.data(), fx);
  if (std::abs(fx[s.coord]) < 1e-12) {
    x[s.coord] = s.level;
    return;
  }
  auto g = [&](const double* y, double* out) {
    double fy[4];
    f(y, fy);
    const double inv = 1.0 / fy[s.coord];
    for (std::size_t i = 0; i < 4; ++i) out[i] = fy[i] * inv;
    out[4] = inv;
  };
  double y[5] = {x[0], x[1], x[2], x[3], 0.0};
  double k1[5];
  g(y, k1);
  dopri::Stages<double, 5> st{};
  dopri::attempt<double, 5>(g, y, k1, ds, st);
  for (std::size_t i = 0; i < 4; ++i) x[i] = st.ynew[i];
  x[s.coord] = s.level;
  t += st.ynew[4];
}

// Locates a crossing inside the last accepted step from the dense output.
void locate_in_step(const Integrator4& ig, const ModelField& f, const Section& s,
                    SectionCrossings& out) {
  double a = ig.t_prev(), b = ig.t();
  double ga = ig.y_prev()[s.coord] - s.level, gb = ig.y()[s.coord] - s.level;
  double tc = b;
  if (gb != 0.0) {
    // Illinois variant of regula falsi.
    int side = 0;
    for (int it = 0; it < 80; ++it) {
      const double c = (a * gb - b * ga) / (gb - ga);
      const double gc = ig.dense(c)[s.coord] - s.level;
      tc = c;
      if (std::abs(gc) < 1e-14 || (b - a) < 1e-15 * std::max(1.0, std::abs(b))) break;
      if ((gc > 0.0) == (gb > 0.0)) {
        b = c;
        gb = gc;
        if (side == -1) ga *= 0.5;
        side = -1;
      } else {
        a = c;
        ga = gc;
        if (side == 1) gb *= 0.5;
        side = 1;
      }
    }
  }
  State4 x = tc == ig.t() ? to_state(ig.y()) : to_state(ig.dense(tc));
  henon_step(f, s, x, tc);
  for (std::size_t i = 0; i < 4; ++i)
    if (x[i] < 0.0) x[i] = 0.0;
  out.t.push_back(tc);
  out.x.push_back(x);
}

}  // namespace

void validate_state(SystemId sys, const State4& x0) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (!std::isfinite(x0[i]) || x0[i] < 0.0)
      throw std::invalid_argument("initial state outside the first orthant");
    if (is_pinned(sys, i) && x0[i] != 0.0)
      throw std::invalid_argument("initial state has a nonzero pinned coordinate for system " +
                                  std::string(to_string(sys)));
  }
}

Trajectory integrate(SystemId sys, const State4& x0, const ModelParams& p, double t_end,
                     const IntegratorOptions& opt) {
  validate_state(sys, x0);
  check_horizon(t_end, opt);
  Trajectory tr;
  tr.sys = sys;
  tr.t.push_back(0.0);
  tr.x.push_back(x0);
  Integrator4 ig(ModelField{sys, p}, step_options(opt));
  ig.reset(0.0, x0.c);
  double next_sample = opt.sample_dt;
  while (ig.t() < t_end) {
    ig.step(t_end);
    if (opt.sample_dt <= 0.0) {
      tr.t.push_back(ig.t());
      tr.x.push_back(to_state(ig.y()));
      continue;
    }
    while (next_sample < ig.t() && next_sample < t_end) {
      State4 x = to_state(ig.dense(next_sample));
      for (std::size_t i = 0; i < 4; ++i)
        if (x[i] < 0.0) x[i] = 0.0;
      tr.t.push_back(next_sample);
      tr.x.push_back(x);
      next_sample += opt.sample_dt;
    }
    if (ig.t() >= t_end) {
      tr.t.push_back(t_end);
      tr.x.push_back(to_state(ig.y()));
    }
  }
  tr.stats = stats_of(ig, opt);
  return tr;
}

State4 advance(SystemId sys, const State4& x0, const ModelParams& p, double t,
               const IntegratorOptions& opt, IntegratorStats* stats) {
  validate_state(sys, x0);
  check_horizon(t, opt);
  Integrator4 ig(ModelField{sys, p}, step_options(opt));
  ig.reset(0.0, x0.c);
  ig.advance_to(t);
  if (stats) *stats = stats_of(ig, opt);
  return to_state(ig.y());
}

Section default_section(SystemId sys, const ModelParams& p) {
  if (sys == SystemId::Refuge4a) return {kU2, p.m2, -1};
  return {kU1, p.m1, -1};
}

Section fallback_section(const ModelParams& p) {
  return {kV1, (p.m1 - p.l1) * (1.0 - p.m1), -1};
}

SectionRun integrate_crossings(SystemId sys, const State4& x0, const ModelParams& p,
                               double t_end, const Section& s, const IntegratorOptions& opt,
                               std::size_t max_crossings) {
  validate_state(sys, x0);
  check_horizon(t_end, opt);
  if (s.coord > 3) throw std::invalid_argument("section coordinate out of range");
  const ModelField f{sys, p};
  Integrator4 ig(f, step_options(opt));
  ig.reset(0.0, x0.c);
  SectionRun run;
  run.crossings.section = s;
  while (ig.t() < t_end && run.crossings.size() < max_crossings) {
    ig.step(t_end);
    const double g_prev = ig.y_prev()[s.coord] - s.level;
    const double g = ig.y()[s.coord] - s.level;
    if (crosses(s, g_prev, g)) locate_in_step(ig, f, s, run.crossings);
  }
  run.final_state = to_state(ig.y());
  run.t_final = ig.t();
  run.stats = stats_of(ig, opt);
  return run;
}

SectionCrossings poincare(const Trajectory& traj, const Section& s, const ModelParams& p,
                          const IntegratorOptions& opt) {
  SectionCrossings out;
  out.section = s;
  const ModelField f{traj.sys, p};
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double g_prev = traj.x[i - 1][s.coord] - s.level;
    const double g = traj.x[i][s.coord] - s.level;
    if (!crosses(s, g_prev, g)) continue;
    const double dt = traj.t[i] - traj.t[i - 1];
    SectionRun r = integrate_crossings(traj.sys, traj.x[i - 1], p, dt, s, opt, 1);
    if (!r.crossings.x.empty()) {
      out.t.push_back(traj.t[i - 1] + r.crossings.t[0]);
      out.x.push_back(r.crossings.x[0]);
      continue;
    }
    // The refined run missed a grazing crossing; interpolate and project.
    const double w = g_prev / (g_prev - g);
    State4 x;
    for (std::size_t k = 0; k < 4; ++k) x[k] = traj.x[i - 1][k] + w * (traj.x[i][k] - traj.x[i - 1][k]);
    double tc = traj.t[i - 1] + w * dt;
    henon_step(f, s, x, tc);
    out.t.push_back(tc);
    out.x.push_back(x);
  }
  return out;
}

std::string_view to_string(CycleLabel l) {
  switch (l) {
    case CycleLabel::Cu: return "c_u";
    case CycleLabel::C4: return "c_4";
    case CycleLabel::C3Patch1: return "c_3^1";
    case CycleLabel::C3Patch2: return "c_3^2";
    case CycleLabel::Unlabeled: return "unlabeled";
  }
  return "?";
}

CycleLabel label_orbit(SystemId sys, const std::vector<State4>& orbit) {
  if (orbit.empty() || sys == SystemId::Local2 || sys == SystemId::PreyPrey3)
    return CycleLabel::Unlabeled;
  constexpr double absent = 1e-9;
  double v1 = 0.0, v2 = 0.0, asym = 0.0;
  std::array<double, 4> lo{}, hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& x : orbit) {
    v1 = std::max(v1, x.v1());
    v2 = std::max(v2, x.v2());
    asym = std::max({asym, std::abs(x.u1() - x.u2()), std::abs(x.v1() - x.v2())});
    for (std::size_t i = 0; i < 4; ++i) {
      lo[i] = std::min(lo[i], x[i]);
      hi[i] = std::max(hi[i], x[i]);
    }
  }
  if (v2 <= absent && v1 > absent) return CycleLabel::C3Patch1;
  if (v1 <= absent && v2 > absent) return CycleLabel::C3Patch2;
  if (v1 <= absent && v2 <= absent) return CycleLabel::Unlabeled;
  double amp = 0.0;
  for (std::size_t i = 0; i < 4; ++i) amp = std::max(amp, hi[i] - lo[i]);
  if (asym <= 1e-6 * std::max(amp, 1e-3)) return CycleLabel::Cu;
  return CycleLabel::C4;
}

namespace {

struct ReturnMap {
  SystemId sys;
  ModelParams p;
  Section s;
  State4 base;
  std::vector<std::size_t> free;
  CycleOptions opt;

  State4 point(const Eigen::VectorXd& xi) const {
    State4 x = base;
    for (std::size_t j = 0; j < free.size(); ++j) x[free[j]] = std::max(0.0, xi[j]);
    x[s.coord] = s.level;
    return x;
  }

  Eigen::VectorXd coords(const State4& x) const {
    Eigen::VectorXd xi(free.size());
    for (std::size_t j = 0; j < free.size(); ++j) xi[j] = x[free[j]];
    return xi;
  }

  // Image after opt.returns crossings and the time it takes.
  std::pair<Eigen::VectorXd, double> operator()(const Eigen::VectorXd& xi) const {
    const double horizon = opt.max_return_time * opt.returns;
    IntegratorOptions io = opt.integ;
    io.time_budget = std::max(io.time_budget, horizon);
    SectionRun r = integrate_crossings(sys, point(xi), p, horizon, s, io,
                                       static_cast<std::size_t>(opt.returns));
    if (r.crossings.size() < static_cast<std::size_t>(opt.returns))
      throw CycleError(CycleError::Kind::NoReturn, "find_cycle: no section return within budget");
    return {coords(r.crossings.x.back()), r.crossings.t.back()};
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& xi, const Eigen::VectorXd& img) const {
    const auto d = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd dp(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double h = opt.fd_step * std::max(1.0, std::abs(xi[j]));
      Eigen::VectorXd xp = xi, xm = xi;
      if (xi[j] - h < 0.0) {
        // One-sided at the orthant boundary.
        xp[j] += h;
        dp.col(j) = ((*this)(xp).first - img) / h;
      } else {
        xp[j] += h;
        xm[j] -= h;
        dp.col(j) = ((*this)(xp).first - (*this)(xm).first) / (2.0 * h);
      }
    }
    return dp;
  }
};

std::vector<std::vector<double>> to_rows(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> r(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
  return r;
}

}  // namespace

CycleRecord find_cycle(SystemId sys, const State4& seed, const ModelParams& p, const Section& s,
                       const CycleOptions& opt) {
  if (opt.returns < 1) throw std::invalid_argument("find_cycle: returns must be >= 1");
  SectionRun first = integrate_crossings(sys, seed, p, opt.max_return_time, s, opt.integ, 1);
  if (first.crossings.size() == 0)
    throw CycleError(CycleError::Kind::NoReturn, "find_cycle: no section return within budget");

  ReturnMap map{sys, p, s, first.crossings.x[0], {}, opt};
  for (std::size_t c : dynamic_coords(sys))
    if (c != s.coord) map.free.push_back(c);
  if (map.free.empty()) throw std::invalid_argument("find_cycle: section leaves no free coordinate");

  Eigen::VectorXd xi = map.coords(map.base);
  auto [img, period] = map(xi);
  Eigen::VectorXd g = img - xi;
  int it = 0;
  for (; it < opt.max_newton && g.lpNorm<Eigen::Infinity>() > opt.newton_tol; ++it) {
    const Eigen::MatrixXd dp = map.jacobian(xi, img);
    const Eigen::MatrixXd a = dp - Eigen::MatrixXd::Identity(dp.rows(), dp.cols());
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() < a.rows())
      throw CycleError(CycleError::Kind::Diverged, "find_cycle: singular return-map Jacobian");
    const Eigen::VectorXd delta = lu.solve(-g);
    double step = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 8; ++ls, step *= 0.5) {
      try {
        const Eigen::VectorXd trial = xi + step * delta;
        auto [ti, tp] = map(trial);
        const Eigen::VectorXd tg = ti - trial;
        if (tg.lpNorm<Eigen::Infinity>() < g.lpNorm<Eigen::Infinity>()) {
          xi = trial;
          img = ti;
          period = tp;
          g = tg;
          improved = true;
          break;
        }
      } catch (const CycleError&) {
      }
    }
    if (!improved) {
      // Fall back to plain iteration when it contracts.
      auto [ni, np] = map(img);
      const Eigen::VectorXd ng = ni - img;
      if (ng.lpNorm<Eigen::Infinity>() >= g.lpNorm<Eigen::Infinity>())
        throw CycleError(CycleError::Kind::Diverged,
                         "find_cycle: return map not contracting and Newton diverges");
      xi = img;
      img = ni;
      period = np;
      g = ng;
    }
  }
  if (g.lpNorm<Eigen::Infinity>() > opt.newton_tol)
    throw CycleError(CycleError::Kind::Diverged, "find_cycle: Newton did not converge");

  CycleRecord c;
  c.section = s;
  c.anchor = map.point(xi);
  c.period = period;
  c.multiplicity = opt.returns;
  c.newton_iterations = it;
  const Eigen::MatrixXd dp = map.jacobian(xi, img);
  c.multipliers = eigen_numeric(to_rows(dp)).values;
  c.stable = std::all_of(c.multipliers.begin(), c.multipliers.end(),
                         [&](const cplx& mu) { return std::abs(mu) < 1.0 + opt.stable_tol; });

  IntegratorOptions io = opt.integ;
  io.sample_dt = period / static_cast<double>(opt.orbit_samples);
  io.time_budget = std::max(io.time_budget, period);
  Trajectory orb = integrate(sys, c.anchor, p, period, io);
  c.t = std::move(orb.t);
  c.orbit = std::move(orb.x);
  c.closure_error = max_norm(c.orbit.back(), c.orbit.front());
  std::array<double, 4> lo{}, hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& x : c.orbit)
    for (std::size_t i = 0; i < 4; ++i) {
      lo[i] = std::min(lo[i], x[i]);
      hi[i] = std::max(hi[i], x[i]);
    }
  for (std::size_t i = 0; i < 4; ++i) c.amplitude = std::max(c.amplitude, hi[i] - lo[i]);
  c.label = label_orbit(sys, c.orbit);
  return c;
}

namespace {

// Jacobian of a subsystem in full coordinates; pinned rows are zero.
Jacobian4 system_jacobian(SystemId sys, const State4& x, const ModelParams& p) {
  Jacobian4 j = jacobian(x, p);
  if (sys == SystemId::Local2) {
    j[kU1][kU1] += p.alpha1;
    j[kU1][kU2] = 0.0;
  }
  for (std::size_t r = 0; r < 4; ++r)
    if (is_pinned(sys, r)) j[r] = {0.0, 0.0, 0.0, 0.0};
  return j;
}

}  // namespace

std::vector<cplx> monodromy_multipliers(SystemId sys, const CycleRecord& c, const ModelParams& p,
                                        const IntegratorOptions& opt) {
  auto var = [sys, p](const double* y, double* out) {
    State4 x(y[0], y[1], y[2], y[3]);
    field_generic<double>(sys, p, y, out);
    const Jacobian4 j = system_jacobian(sys, x, p);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t col = 0; col < 4; ++col) {
        double acc = 0.0;
        for (std::size_t k = 0; k < 4; ++k) acc += j[r][k] * y[4 + 4 * k + col];
        out[4 + 4 * r + col] = acc;
      }
  };
  std::array<double, 20> y{};
  for (std::size_t i = 0; i < 4; ++i) {
    y[i] = c.anchor[i];
    y[4 + 5 * i] = 1.0;
  }
  auto ig = make_dopri<20>(var, step_options(opt, false));
  ig.reset(0.0, y);
  ig.advance_to(c.period);
  auto idx = dynamic_coords(sys);
  std::vector<std::vector<double>> m(idx.size(), std::vector<double>(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) m[a][b] = ig.y()[4 + 4 * idx[a] + idx[b]];
  return eigen_numeric(m).values;
}

double rotation_number(const std::vector<State4>& points) {
  if (points.size() < 30)
    throw std::invalid_argument("rotation_number: needs at least 30 crossings, got " +
                                std::to_string(points.size()));
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  for (const auto& x : points) mean += Eigen::Vector4d(x[0], x[1], x[2], x[3]);
  mean /= static_cast<double>(points.size());
  Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
  for (const auto& x : points) {
    const Eigen::Vector4d d = Eigen::Vector4d(x[0], x[1], x[2], x[3]) - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(cov);
  const Eigen::Vector4d e1 = es.eigenvectors().col(3), e2 = es.eigenvectors().col(2);
  constexpr double two_pi = 6.283185307179586476925;
  double sum = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector4d d = Eigen::Vector4d(points[i][0], points[i][1], points[i][2], points[i][3]) - mean;
    const double th = std::atan2(d.dot(e2), d.dot(e1));
    if (i > 0) {
      double dth = std::fmod(th - prev, two_pi);
      if (dth < 0.0) dth += two_pi;
      sum += dth;
    }
    prev = th;
  }
  double rho = sum / (two_pi * static_cast<double>(points.size() - 1));
  rho -= std::floor(rho);
  return rho;
}

Rational nearest_rational(double x, long q_max) {
  Rational best{0, 1, std::abs(x)};
  for (long q = 1; q <= q_max; ++q) {
    const long pn = std::lround(x * static_cast<double>(q));
    const double d = std::abs(x - static_cast<double>(pn) / static_cast<double>(q));
    if (d < best.distance - 1e-15) best = {pn, q, d};
  }
  return best;
}

LyapunovResult lyapunov_max(SystemId sys, const State4& x0, const ModelParams& p, double horizon,
                            const IntegratorOptions& opt, double interval, double band_tol) {
  validate_state(sys, x0);
  check_horizon(horizon, opt);
  if (!(interval > 0.0)) throw std::invalid_argument("lyapunov_max: interval must be > 0");
  auto tangent = [sys, p](const double* y, double* out) {
    field_generic<double>(sys, p, y, out);
    const Jacobian4 j = system_jacobian(sys, State4(y[0], y[1], y[2], y[3]), p);
    for (std::size_t r = 0; r < 4; ++r) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 4; ++k) acc += j[r][k] * y[4 + k];
      out[4 + r] = acc;
    }
  };
  std::array<double, 8> y{};
  for (std::size_t i = 0; i < 4; ++i) y[i] = x0[i];
  auto idx = dynamic_coords(sys);
  for (std::size_t c : idx) y[4 + c] = 1.0 / std::sqrt(static_cast<double>(idx.size()));

  auto ig = make_dopri<8>(tangent, step_options(opt, false));
  ig.reset(0.0, y);
  const long n = std::max(1L, static_cast<long>(std::floor(horizon / interval)));
  LyapunovResult res;
  double sum = 0.0;
  std::vector<double> running;
  running.reserve(static_cast<std::size_t>(n));
  for (long k = 1; k <= n; ++k) {
    ig.advance_to(static_cast<double>(k) * interval);
    std::array<double, 8> s = ig.y();
    double norm = 0.0;
    for (std::size_t i = 4; i < 8; ++i) norm += s[i] * s[i];
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw IntegrationError(IntegrationError::Kind::NonFinite, "lyapunov_max: degenerate tangent vector");
    sum += std::log(norm);
    for (std::size_t i = 4; i < 8; ++i) s[i] /= norm;
    for (std::size_t i = 0; i < 4; ++i) s[i] = std::max(0.0, s[i]);
    ig.reset(ig.t(), s);
    running.push_back(sum / (static_cast<double>(k) * interval));
  }
  res.renormalizations = n;
  res.exponent = running.back();
  const auto half = running.begin() + static_cast<std::ptrdiff_t>(running.size() / 2);
  res.band_low = *std::min_element(half, running.end());
  res.band_high = *std::max_element(half, running.end());
  res.converged = (res.band_high - res.band_low) < band_tol;
  return res;
}

namespace {

double dist(const State4& a, const State4& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

MultiplicityReport detect_period_multiplicity(const std::vector<State4>& pts,
                                              double radius_fraction) {
  if (pts.size() < 8)
    throw std::invalid_argument("detect_period_multiplicity: needs at least 8 crossings");
  MultiplicityReport rep;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) rep.diameter = std::max(rep.diameter, dist(pts[i], pts[j]));
  constexpr double floor_radius = 1e-5;
  if (rep.diameter <= floor_radius) {
    rep.k = 1;
    rep.clusters = 1;
    rep.margin = std::numeric_limits<double>::infinity();
    return rep;
  }
  const double r = std::max(radius_fraction * rep.diameter, floor_radius);
  DisjointSets ds(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (dist(pts[i], pts[j]) <= r) ds.unite(i, j);
  std::map<std::size_t, std::size_t> ids;
  std::vector<std::size_t> lab(n);
  for (std::size_t i = 0; i < n; ++i) lab[i] = ids.emplace(ds.find(i), ids.size()).first->second;
  rep.clusters = ids.size();

  // Extended clusters (curves, chaotic sets) are not periodic points.
  std::vector<double> spread(rep.clusters, 0.0);
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = dist(pts[i], pts[j]);
      if (lab[i] == lab[j])
        spread[lab[i]] = std::max(spread[lab[i]], d);
      else
        gap = std::min(gap, d);
    }
  const double max_spread = *std::max_element(spread.begin(), spread.end());
  rep.margin = gap / std::max(max_spread, floor_radius);
  const bool point_like = max_spread <= r;
  bool cyclic = rep.clusters <= n / 2;
  for (std::size_t i = 0; cyclic && i + rep.clusters < n; ++i)
    cyclic = lab[i] == lab[i + rep.clusters];
  if (point_like && cyclic) {
    rep.k = static_cast<int>(rep.clusters);
  } else {
    rep.torus_suspected = !point_like;
  }
  return rep;
}

double box_counting_dimension(const std::vector<State4>& pts) {
  if (pts.size() < 2) return 0.0;
  std::array<double, 4> lo{}, hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& x : pts)
    for (std::size_t i = 0; i < 4; ++i) {
      lo[i] = std::min(lo[i], x[i]);
      hi[i] = std::max(hi[i], x[i]);
    }
  double extent = 0.0;
  for (std::size_t i = 0; i < 4; ++i) extent = std::max(extent, hi[i] - lo[i]);
  if (extent <= 0.0) return 0.0;
  std::vector<double> xs, ys;
  for (int j = 2; j <= 5; ++j) {
    const double eps = extent / std::ldexp(1.0, j);
    std::vector<std::array<long, 4>> keys;
    keys.reserve(pts.size());
    for (const auto& x : pts) {
      std::array<long, 4> k{};
      for (std::size_t i = 0; i < 4; ++i) k[i] = static_cast<long>(std::floor((x[i] - lo[i]) / eps));
      keys.push_back(k);
    }
    std::sort(keys.begin(), keys.end());
    const auto boxes = std::unique(keys.begin(), keys.end()) - keys.begin();
    xs.push_back(std::log(1.0 / eps));
    ys.push_back(std::log(static_cast<double>(boxes)));
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace allee
