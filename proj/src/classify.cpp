#include "allee/classify.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "allee/bifurcation.hpp"
#include "allee/equilibria.hpp"
#include "allee/simd.hpp"

namespace allee {

std::string_view to_string(AttractorKind k) {
  switch (k) {
    case AttractorKind::OriginExtinction: return "origin_extinction";
    case AttractorKind::Equilibrium: return "equilibrium";
    case AttractorKind::Cycle: return "cycle";
    case AttractorKind::Torus: return "torus";
    case AttractorKind::Chaotic: return "chaotic";
    case AttractorKind::Undecided: return "undecided";
  }
  return "?";
}

std::string_view to_string(DomainLabel d) {
  switch (d) {
    case DomainLabel::I: return "I";
    case DomainLabel::II: return "II";
    case DomainLabel::III: return "III";
    case DomainLabel::IV: return "IV";
    case DomainLabel::V: return "V";
    case DomainLabel::Boundary: return "boundary";
  }
  return "?";
}

bool AttractorReport::four_dimensional() const {
  switch (kind) {
    case AttractorKind::Equilibrium: return equilibrium_tag == "AA";
    case AttractorKind::Cycle:
    case AttractorKind::Torus:
    case AttractorKind::Chaotic: return label == CycleLabel::Cu || label == CycleLabel::C4;
    default: return false;
  }
}

std::string AttractorReport::summary() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind == AttractorKind::Equilibrium || kind == AttractorKind::OriginExtinction)
    os << "(" << equilibrium_tag << ")";
  if (kind == AttractorKind::Cycle) os << "(k=" << k << ", " << to_string(label) << ")";
  if (kind == AttractorKind::Torus || kind == AttractorKind::Chaotic) os << "(" << to_string(label) << ")";
  if (kind == AttractorKind::Undecided) os << "(" << undecided_test << ")";
  return os.str();
}

namespace {

struct NearestEq {
  double distance = std::numeric_limits<double>::infinity();
  std::string tag;
};

NearestEq nearest_equilibrium(const std::vector<EquilibriumRecord>& eqs, const State4& x) {
  NearestEq best;
  for (const auto& e : eqs) {
    const double d = max_norm(e.location, x);
    if (d < best.distance) best = {d, e.tag};
  }
  return best;
}

double field_norm(SystemId sys, const State4& x, const ModelParams& p) {
  const Vec4 f = raw_subsystem_field(sys, x.c, p);
  double n = 0.0;
  for (double v : f) n = std::max(n, std::abs(v));
  return n;
}

std::vector<Section> candidate_sections(SystemId sys, const ModelParams& p) {
  std::vector<Section> out{default_section(sys, p)};
  if (sys != SystemId::Local2 && sys != SystemId::Refuge4a) out.push_back({kU2, p.m2, -1});
  if (sys != SystemId::Refuge4a && sys != SystemId::PreyPrey3) out.push_back(fallback_section(p));
  return out;
}

}  // namespace

AttractorReport classify_settled(SystemId sys, const State4& settled, const ModelParams& p,
                                 const ClassifyBudget& b, double time_used) {
  AttractorReport rep;
  rep.time_used = time_used;
  State4 x = settled;
  const auto remaining = [&] { return b.t_budget - rep.time_used; };

  // Equilibrium proximity, continuing while the state keeps closing in.
  const std::vector<EquilibriumRecord> eqs =
      p.is_symmetric() ? all_equilibria(p) : std::vector<EquilibriumRecord>{};
  for (;;) {
    NearestEq ne = nearest_equilibrium(eqs, x);
    if (eqs.empty() && field_norm(sys, x, p) < 1e-12) ne = {0.0, "numeric"};
    if (ne.distance < b.eq_tol) {
      rep.kind = ne.tag == "O" ? AttractorKind::OriginExtinction : AttractorKind::Equilibrium;
      rep.equilibrium_tag = ne.tag;
      rep.final_state = x;
      return rep;
    }
    const bool closing = ne.distance < 1e-3 || field_norm(sys, x, p) < 1e-7;
    const double chunk = 1000.0;
    if (!closing || remaining() < chunk) break;
    x = advance(sys, x, p, chunk, b.integ);
    rep.time_used += chunk;
  }

  // Section crossings on the first section that the orbit actually crosses.
  SectionRun run;
  bool have = false;
  for (const Section& s : candidate_sections(sys, p)) {
    const double window = std::min(b.analysis, remaining());
    if (window <= 0.0) break;
    run = integrate_crossings(sys, x, p, window, s, b.integ, b.target_crossings);
    rep.time_used += run.t_final;
    if (run.crossings.size() >= 8) {
      have = true;
      break;
    }
  }
  rep.final_state = run.final_state;
  if (!have) {
    rep.kind = AttractorKind::Undecided;
    rep.undecided_test = "section_crossings";
    return rep;
  }
  const std::vector<State4>& pts = run.crossings.x;
  rep.label = label_orbit(sys, pts);

  const MultiplicityReport mult = detect_period_multiplicity(pts);

  // Cycle search: Newton on the k-th return map from the latest crossing. A
  // stable fixed point the orbit already sits on settles the question even
  // when slow convergence smears the crossing set.
  std::vector<int> ks;
  if (mult.k) ks.push_back(*mult.k);
  for (int k : {1, 2})
    if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
  const double near_tol = std::max(1e-4, 0.01 * mult.diameter);
  for (int k : ks) {
    try {
      CycleOptions co;
      co.integ = b.integ;
      co.integ.rtol = std::min(b.integ.rtol, 1e-11);
      co.integ.atol = std::min(b.integ.atol, 1e-13);
      co.returns = k;
      co.max_return_time = std::min(3000.0, remaining());
      const CycleRecord c = find_cycle(sys, pts.back(), p, run.crossings.section, co);
      if (!c.stable || max_norm(c.anchor, pts.back()) > near_tol) continue;
      rep.kind = AttractorKind::Cycle;
      rep.k = k;
      rep.period = c.period;
      rep.stable = true;
      rep.label = c.label;
      rep.time_used += c.period;
      return rep;
    } catch (const std::exception&) {
    }
  }
  if (mult.k) {
    // Clusters show periodicity although Newton did not confirm it.
    rep.kind = AttractorKind::Cycle;
    rep.k = *mult.k;
    const std::size_t n = pts.size();
    const std::size_t laps = (n - 1) / static_cast<std::size_t>(rep.k);
    const auto& ts = run.crossings.t;
    rep.period = (ts[n - 1] - ts[n - 1 - laps * rep.k]) / static_cast<double>(laps);
    return rep;
  }

  if (pts.size() >= 30) rep.rotation = rotation_number(pts);
  rep.box_dimension = box_counting_dimension(pts);
  const double horizon = std::min(b.lyapunov_horizon, remaining());
  if (horizon < 100.0) {
    rep.kind = AttractorKind::Undecided;
    rep.undecided_test = "budget";
    return rep;
  }
  const LyapunovResult le = lyapunov_max(sys, run.final_state, p, horizon, b.integ);
  rep.time_used += horizon;
  rep.lyapunov = le.exponent;
  const bool curve = *rep.box_dimension >= 0.6 && *rep.box_dimension <= 1.4;
  if (std::abs(le.exponent) <= 5e-3 && curve) {
    rep.kind = AttractorKind::Torus;
  } else if (le.exponent > 1e-2) {
    rep.kind = AttractorKind::Chaotic;
  } else {
    rep.kind = AttractorKind::Undecided;
    rep.undecided_test = "torus_test";
  }
  return rep;
}

AttractorReport classify_ic(SystemId sys, const State4& x0, const ModelParams& p,
                            const ClassifyBudget& b) {
  const double burn = std::min(b.burn_in, b.t_budget);
  const State4 x = advance(sys, x0, p, burn, b.integ);
  return classify_settled(sys, x, p, b, burn);
}

DomainLabel domain_from_reports(const std::vector<AttractorReport>& reports) {
  bool cu = false, c4 = false, aa = false;
  for (const auto& r : reports) {
    if (!r.four_dimensional()) continue;
    if (r.kind == AttractorKind::Equilibrium) aa = true;
    else if (r.label == CycleLabel::Cu) cu = true;
    else c4 = true;
  }
  if (cu && c4) return DomainLabel::IV;
  if (cu) return DomainLabel::II;
  if (c4) return DomainLabel::V;
  if (aa) return DomainLabel::I;
  return DomainLabel::III;
}

std::vector<State4> default_seeds(const ModelParams& p) {
  std::vector<State4> s{{.01, .01, .01, .01}, {.9, .2, .05, .05}};
  if (p.is_symmetric() && aa_exists(p)) {
    const double v = predator_level(p.m(), p.l());
    s.push_back({p.m() + .01, v, p.m() - .01, v});
  }
  s.push_back({.9, .2, .05, 0.0});
  return s;
}

std::vector<State4> seed_set(std::string_view name, const ModelParams& p) {
  if (name == "default") return default_seeds(p);
  if (name == "symmetric") {
    std::vector<State4> s{{.01, .01, .01, .01}, {.9, .2, .9, .2}};
    if (p.is_symmetric() && aa_exists(p)) {
      const double v = predator_level(p.m(), p.l());
      s.push_back({p.m() + .01, v, p.m() + .01, v});
    }
    return s;
  }
  throw std::invalid_argument("unknown seed set '" + std::string(name) + "'");
}

std::vector<std::pair<double, double>> sweep_points(const SweepSpec& s) {
  if (s.n_alpha < 1 || s.n_m < 1) throw std::invalid_argument("sweep: grid must be non-empty");
  std::vector<std::pair<double, double>> pts;
  for (int j = 0; j < s.n_m; ++j)
    for (int i = 0; i < s.n_alpha; ++i) {
      const double a = s.alpha_lo + (s.alpha_hi - s.alpha_lo) * (i + 0.5) / s.n_alpha;
      const double m = s.m_lo + (s.m_hi - s.m_lo) * (j + 0.5) / s.n_m;
      pts.emplace_back(a, m);
    }
  return pts;
}

namespace {

PortraitCell classify_cell(double alpha, double m, const SweepSpec& s) {
  PortraitCell cell;
  cell.alpha = alpha;
  cell.m = m;
  const ModelParams p = ModelParams::symmetric(alpha, s.gamma, m, s.l);
  const std::vector<State4> seeds = seed_set(s.seeds, p);
  const double burn = std::min(s.budget.burn_in, s.budget.t_budget);
  StepOptions so;
  so.rtol = s.budget.integ.rtol;
  so.atol = s.budget.integ.atol;
  so.max_steps = s.budget.integ.max_steps;
  // Lanes reproduce the scalar integrator bit for bit.
  const BatchResult settled = advance_batch(SystemId::Full1, seeds, p, burn, so);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    AttractorReport r;
    try {
      r = classify_settled(SystemId::Full1, settled.final_states[i], p, s.budget, burn);
    } catch (const std::exception& e) {
      r.kind = AttractorKind::Undecided;
      r.undecided_test = std::string("numeric: ") + e.what();
      r.final_state = settled.final_states[i];
    }
    cell.ambiguous = cell.ambiguous || r.kind == AttractorKind::Undecided;
    cell.reports.push_back(std::move(r));
  }
  cell.label = domain_from_reports(cell.reports);
  return cell;
}

template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const std::size_t workers = std::clamp<std::size_t>(jobs < 1 ? 1 : jobs, 1, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<PortraitCell> classify_cells(const std::vector<std::pair<double, double>>& points,
                                         const SweepSpec& s) {
  std::vector<PortraitCell> cells(points.size());
  parallel_for(points.size(), s.jobs,
               [&](std::size_t i) { cells[i] = classify_cell(points[i].first, points[i].second, s); });
  return cells;
}

std::vector<PortraitCell> portrait_sweep(const SweepSpec& s) {
  std::vector<PortraitCell> cells = classify_cells(sweep_points(s), s);
  std::vector<DomainLabel> raw(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) raw[i] = cells[i].label;
  for (int j = 0; j < s.n_m; ++j)
    for (int i = 0; i < s.n_alpha; ++i) {
      PortraitCell& c = cells[j * s.n_alpha + i];
      if (!c.ambiguous) continue;
      const int di[] = {-1, 1, 0, 0}, dj[] = {0, 0, -1, 1};
      for (int d = 0; d < 4; ++d) {
        const int ni = i + di[d], nj = j + dj[d];
        if (ni < 0 || nj < 0 || ni >= s.n_alpha || nj >= s.n_m) continue;
        if (raw[nj * s.n_alpha + ni] != raw[j * s.n_alpha + i]) c.label = DomainLabel::Boundary;
      }
    }
  return cells;
}

bool local_cycle_exists(double l, double m, double gamma, double horizon) {
  ModelParams p = ModelParams::symmetric(0.0, gamma, m, l);
  const double v = predator_level(m, l);
  const State4 seed(m + 0.01, v, 0.0, 0.0);
  IntegratorOptions io;
  io.time_budget = std::max(io.time_budget, horizon);
  const State4 x = advance(SystemId::Local2, seed, p, horizon, io);
  return std::max(x.u1(), x.v1()) > 1e-6 && max_norm(x, State4(m, v, 0.0, 0.0)) > 1e-4;
}

Bracket heteroclinic_bracket(double l, double gamma, double lo, double hi, double width) {
  bool at_lo = local_cycle_exists(l, lo, gamma), at_hi = local_cycle_exists(l, hi, gamma);
  if (at_lo == at_hi)
    throw std::invalid_argument("heteroclinic_bracket: cycle existence does not change over the bracket");
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (local_cycle_exists(l, mid, gamma) == at_lo)
      lo = mid;
    else
      hi = mid;
  }
  return {lo, hi};
}

int local_portrait_2d(double l, double m, double gamma) {
  if (!(l >= 0.0 && l <= 1.0 && m >= 0.0)) throw std::invalid_argument("local_portrait_2d: (l, m) outside M");
  if (m > 1.0) return 1;
  if (m <= l) return 5;
  if (m >= (l + 1.0) / 2.0) return 2;
  return local_cycle_exists(l, m, gamma) ? 3 : 4;
}

namespace {

// Nontrivial attractors of the refuge system from a small probe set.
std::string refuge_regime(double l, double m, double gamma, double a) {
  const ModelParams p = ModelParams::symmetric(a, gamma, m, l);
  std::vector<State4> seeds{{.9, .2, .05, 0.0}, {.5, .1, .9, 0.0}, {.99, .01, .05, 0.0}};
  for (const auto& b : solve_B(p)) {
    State4 x = b.layout1(m);
    if (x.v1() > 0.0) {
      x[kU1] += 0.01;
      seeds.push_back(x);
    }
  }
  ClassifyBudget bud;
  bool cycle = false, eq = false;
  for (const auto& s : seeds) {
    const AttractorReport r = classify_ic(SystemId::Refuge4b, s, p, bud);
    if (r.kind == AttractorKind::Cycle || r.kind == AttractorKind::Torus ||
        r.kind == AttractorKind::Chaotic)
      cycle = true;
    if (r.kind == AttractorKind::Equilibrium && r.equilibrium_tag.rfind("B", 0) == 0) eq = true;
  }
  if (cycle && eq) return "B+cycle";
  if (cycle) return "cycle";
  if (eq) return "B";
  return "none";
}

Bracket bisect_regime(double l, double m, double gamma, double lo, double hi, double width,
                      const std::function<bool(const std::string&)>& pred) {
  const bool at_lo = pred(refuge_regime(l, m, gamma, lo));
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (pred(refuge_regime(l, m, gamma, mid)) == at_lo)
      lo = mid;
    else
      hi = mid;
  }
  return {lo, hi};
}

}  // namespace

RefugeScan refuge_alpha_scan(double l, double m, double gamma, double alpha_max, int samples,
                             double width) {
  if (!(0.0 < l && l < m && m < 1.0)) throw std::invalid_argument("refuge_alpha_scan: requires 0 < l < m < 1");
  RefugeScan scan;
  for (int i = 1; i <= samples; ++i) {
    const double a = alpha_max * i / samples;
    scan.alphas.push_back(a);
    scan.regimes.push_back(refuge_regime(l, m, gamma, a));
  }
  const ModelParams base = ModelParams::symmetric(0.0, gamma, m, l);
  if (auto h = b_stability_change(base, alpha_max / samples, alpha_max, 4 * samples)) scan.b_hopf = h->value;

  auto has_cycle = [](const std::string& r) { return r == "cycle" || r == "B+cycle"; };
  auto has_b = [](const std::string& r) { return r == "B" || r == "B+cycle"; };
  auto any = [](const std::string& r) { return r != "none"; };
  // First sampled change of a predicate, refined by bisection.
  auto first_change = [&](const std::function<bool(const std::string&)>& pred, bool from,
                          std::size_t start) -> std::optional<std::pair<Bracket, std::size_t>> {
    for (std::size_t i = start; i + 1 < scan.alphas.size(); ++i)
      if (pred(scan.regimes[i]) == from && pred(scan.regimes[i + 1]) != from)
        return std::make_pair(bisect_regime(l, m, gamma, scan.alphas[i], scan.alphas[i + 1], width, pred), i + 1);
    return std::nullopt;
  };

  RefugeThreshold t1{"alpha*", std::nullopt, ""};
  if (!scan.regimes.empty() && has_cycle(scan.regimes.front())) {
    t1.note = "cycle already present at the first sample";
  } else if (auto c = first_change(has_cycle, false, 0)) {
    t1.bracket = c->first;
  } else {
    t1.note = "no cycle onset in the scanned range";
  }
  RefugeThreshold t2{"alpha**", std::nullopt, ""};
  if (auto c = first_change(has_b, false, 0))
    t2.bracket = c->first;
  else
    t2.note = "B never observed as an attractor";
  RefugeThreshold t3{"alpha***", std::nullopt, ""};
  if (auto c = first_change(has_b, true, t2.bracket ? 0 : scan.alphas.size()))
    t3.bracket = c->first;
  else
    t3.note = "B stays attracting to the end of the scan";
  RefugeThreshold t4{"alpha****", std::nullopt, ""};
  std::optional<std::size_t> last_any;
  for (std::size_t i = 0; i < scan.regimes.size(); ++i)
    if (any(scan.regimes[i])) last_any = i;
  if (last_any && *last_any + 1 < scan.regimes.size())
    t4.bracket = bisect_regime(l, m, gamma, scan.alphas[*last_any], scan.alphas[*last_any + 1], width, any);
  else
    t4.note = last_any ? "nontrivial attractors persist to the end of the scan" : "no nontrivial attractor sampled";
  scan.thresholds = {t1, t2, t3, t4};
  return scan;
}

}  // namespace allee
