#include "allee/io/commands.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "allee/bifurcation.hpp"
#include "allee/classify.hpp"
#include "allee/equilibria.hpp"
#include "allee/io/svg.hpp"
#include "allee/spectral.hpp"

namespace allee::io {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ResultTable make_table(std::string schema, const RunConfig& c, std::vector<std::string> cols) {
  ResultTable t;
  t.schema = std::move(schema);
  t.config_hash = config_hash(c);
  t.toolkit_version = std::string(kToolkitVersion);
  t.columns = std::move(cols);
  return t;
}

void write_table(CommandResult& r, const RunConfig& c, ResultTable t, const std::string& file) {
  const auto path = c.out_dir / file;
  try {
    write_csv_file(t, path);
  } catch (const std::runtime_error& e) {
    throw OutputError(e.what());
  }
  r.files.push_back(path);
  r.tables.push_back(std::move(t));
}

void write_text(CommandResult& r, const RunConfig& c, const std::string& text,
                const std::string& file) {
  const auto path = c.out_dir / file;
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw OutputError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw OutputError("write failed for '" + path.string() + "'");
  r.files.push_back(path);
}

double opt(const std::optional<double>& v) { return v ? *v : kNaN; }

std::optional<SymmetricPoint> symmetric_point(Family f) {
  switch (f) {
    case Family::O: return SymmetricPoint::O;
    case Family::Ol: return SymmetricPoint::Ol;
    case Family::O11: return SymmetricPoint::O11;
    case Family::AA: return SymmetricPoint::AA;
    default: return std::nullopt;
  }
}

Spectrum spectrum_of(const EquilibriumRecord& e, const ModelParams& p) {
  if (const auto sp = symmetric_point(e.family)) return eigen_symmetric(*sp, p);
  return analyze(e.location, p).spectrum;
}

std::string_view to_string(Provenance p) {
  return p == Provenance::ClosedForm ? "closed_form" : "quartic_numeric";
}

std::pair<double, double> project(const State4& x, Projection pr) {
  switch (pr) {
    case Projection::U1U2: return {x[kU1], x[kU2]};
    case Projection::Totals: return {x[kU1] + x[kU2], x[kV1] + x[kV2]};
    case Projection::Patch1: return {x[kU1], x[kV1]};
    case Projection::Patch2: return {x[kU2], x[kV2]};
  }
  return {0.0, 0.0};
}

Axes projection_axes(Projection pr) {
  switch (pr) {
    case Projection::U1U2: return {"trajectories", "u1", "u2"};
    case Projection::Totals: return {"trajectories", "u1 + u2", "v1 + v2"};
    case Projection::Patch1: return {"trajectories", "u1", "v1"};
    case Projection::Patch2: return {"trajectories", "u2", "v2"};
  }
  return {};
}

std::string report_cell(const AttractorReport& r) {
  std::string s = r.summary();
  if (r.period) s += " T=" + format_double(*r.period);
  return s;
}

}  // namespace

RunConfig effective_config(const RunConfig& c, const CommandOptions& o) {
  RunConfig e = c;
  if (o.out_dir) e.out_dir = *o.out_dir;
  if (o.seed_set) {
    if (*o.seed_set != "default" && *o.seed_set != "symmetric")
      throw ConfigError("--seed-set", "unknown seed set '" + *o.seed_set + "'");
    e.seeds = e.sweep.seeds = *o.seed_set;
  }
  e.sweep.jobs = std::max(1, o.jobs);
  return e;
}

CommandResult cmd_simulate(const RunConfig& c0, const CommandOptions& o) {
  const RunConfig c = effective_config(c0, o);
  CommandResult r;
  std::vector<Series> series;
  for (std::size_t i = 0; i < c.simulate.x0.size(); ++i) {
    ResultTable t = make_table("simulate", c, {"t", "u1", "v1", "u2", "v2"});
    Series s;
    s.name = "x0[" + std::to_string(i) + "]";
    if (c.simulate.t_end > 0.0) {
      const Trajectory tr = integrate(c.system, c.simulate.x0[i], c.params, c.simulate.t_end, c.integ);
      for (std::size_t k = 0; k < tr.size(); ++k) {
        const State4& x = tr.x[k];
        t.add_row({tr.t[k], x[0], x[1], x[2], x[3]});
        if (tr.t[k] >= c.simulate.plot_from) {
          const auto [px, py] = project(x, c.simulate.projection);
          s.x.push_back(px);
          s.y.push_back(py);
        }
      }
    }
    write_table(r, c, std::move(t), "trajectory_" + std::to_string(i) + ".csv");
    series.push_back(std::move(s));
  }
  if (o.svg) write_text(r, c, svg_lines(projection_axes(c.simulate.projection), series), "trajectory.svg");
  return r;
}

CommandResult cmd_equilibria(const RunConfig& c0, const CommandOptions& o) {
  const RunConfig c = effective_config(c0, o);
  CommandResult r;
  ResultTable t = make_table("equilibria", c,
                             {"tag", "family", "u1", "v1", "u2", "v2", "multiplicity", "residual",
                              "in_orthant", "stability", "unstable_dim"});
  for (const EquilibriumRecord& e : all_equilibria(c.params)) {
    const EquilibriumSpectrum s = analyze(e.location, c.params);
    const State4& x = e.location;
    t.add_row({e.tag, std::string(to_string(e.family)), x[0], x[1], x[2], x[3],
               static_cast<double>(e.multiplicity), e.residual,
               std::string(e.in_orthant ? "yes" : "no"), std::string(to_string(s.stability.tag)),
               static_cast<double>(s.stability.unstable_dim)});
  }
  write_table(r, c, std::move(t), "equilibria.csv");
  return r;
}

CommandResult cmd_eigen(const RunConfig& c0, const CommandOptions& o) {
  const RunConfig c = effective_config(c0, o);
  CommandResult r;
  ResultTable t = make_table("eigen", c, {"tag", "index", "re", "im", "provenance"});
  for (const EquilibriumRecord& e : all_equilibria(c.params)) {
    const Spectrum s = spectrum_of(e, c.params);
    for (std::size_t i = 0; i < s.size(); ++i)
      t.add_row({e.tag, static_cast<double>(i), s[i].real(), s[i].imag(),
                 std::string(to_string(s.provenance))});
  }
  write_table(r, c, std::move(t), "eigen.csv");
  return r;
}

CommandResult cmd_boundaries(const RunConfig& c0, const CommandOptions& o) {
  const RunConfig c = effective_config(c0, o);
  const double l = c.params.l1;
  CommandResult r;
  ResultTable t = make_table("boundaries", c, {"curve", "alpha", "m", "note"});
  const BoundarySpec& b = c.boundaries;
  const double h1 = hopf_H1(l);
  t.add_row({std::string("H1"), b.alpha_lo, h1, std::string("closed_form")});
  t.add_row({std::string("H1"), b.alpha_hi, h1, std::string("closed_form")});
  const double m_top = std::min(b.m_hi, h1);
  for (int i = 0; i < b.samples; ++i) {
    const double m = b.m_lo + (m_top - b.m_lo) * i / (b.samples - 1);
    if (!(m > 0.0)) continue;
    t.add_row({std::string("H2"), hopf_H2(l, m), m, std::string("closed_form")});
  }
  for (int i = 0; i < b.samples; ++i) {
    const double m = b.m_lo + (m_top - b.m_lo) * i / (b.samples - 1);
    if (!(m > l)) continue;
    t.add_row({std::string("H3D"), hopf_3d(l, m).value, m, std::string("approximate")});
  }
  const SCBoundary sc = boundary_SC(l);
  t.add_row({std::string("SC1"), sc.alpha1, kNaN, std::string("nominal; independent of m")});
  t.add_row({std::string("SC2"), sc.alpha2, kNaN, std::string("closed_form; independent of m")});
  for (const CFold& f : c_branch_ends(l)) {
    if (f.kind != BranchEnd::Fold && f.kind != BranchEnd::Diagonal) continue;
    t.add_row({std::string("SC_end"), f.alpha, kNaN,
               "branch " + f.label + " " + std::string(to_string(f.kind))});
  }
  for (int i = 0; i < b.samples; ++i) {
    const double a = b.alpha_lo + (b.alpha_hi - b.alpha_lo) * i / (b.samples - 1);
    if (!(a > 0.0)) continue;
    const SBBoundary sb = boundary_SB(l, a);
    if (sb.m12) t.add_row({std::string("SB12"), a, *sb.m12, std::string("nominal")});
    if (sb.m23) t.add_row({std::string("SB23"), a, *sb.m23, std::string("nominal")});
    for (double m : sb_fold_m(l, a)) t.add_row({std::string("SB_fold"), a, m, std::string("exact")});
  }
  const SBBoundary cusp = boundary_SB(l, b.alpha_hi);
  t.add_row({std::string("CuspB"), cusp.cusp_alpha, cusp.cusp_m, std::string("closed_form")});
  write_table(r, c, std::move(t), "boundaries.csv");
  return r;
}

CommandResult cmd_sweep(const RunConfig& c0, const CommandOptions& o) {
  const RunConfig c = effective_config(c0, o);
  c.params.require_symmetric("sweep");
  CommandResult r;
  const std::vector<PortraitCell> cells = portrait_sweep(c.sweep);
  ResultTable t = make_table("sweep", c, {"alpha", "m", "domain", "ambiguous", "reports"});
  std::vector<Rect> rects;
  const double da = (c.sweep.alpha_hi - c.sweep.alpha_lo) / c.sweep.n_alpha;
  const double dm = (c.sweep.m_hi - c.sweep.m_lo) / c.sweep.n_m;
  for (const PortraitCell& cell : cells) {
    std::string reps;
    for (const auto& rep : cell.reports) reps += (reps.empty() ? "" : "; ") + report_cell(rep);
    t.add_row({cell.alpha, cell.m, std::string(to_string(cell.label)),
               std::string(cell.ambiguous ? "yes" : "no"), reps});
    rects.push_back({cell.alpha - da / 2, cell.alpha + da / 2, cell.m - dm / 2, cell.m + dm / 2,
                     std::string(to_string(cell.label))});
  }
  write_table(r, c, std::move(t), "portrait.csv");
  if (o.svg) {
    const std::vector<std::pair<std::string, std::string>> colors{
        {"I", "#4daf4a"}, {"II", "#377eb8"}, {"III", "#bdbdbd"},
        {"IV", "#984ea3"}, {"V", "#ff7f00"}, {"boundary", "#ffffff"}};
    write_text(r, c, svg_rect_map({"domains of 4D attractors", "alpha", "m"}, rects, colors),
               "portrait.svg");
  }
  return r;
}

CommandResult cmd_scan_refuge(const RunConfig& c0, const CommandOptions& o) {
  const RunConfig c = effective_config(c0, o);
  c.params.require_symmetric("scan-refuge");
  const ModelParams& p = c.params;
  CommandResult r;
  const RefugeScan s =
      refuge_alpha_scan(p.l(), p.m(), p.gamma(), c.refuge.alpha_max, c.refuge.samples, c.refuge.width);
  ResultTable a = make_table("refuge_scan", c, {"alpha", "regime"});
  for (std::size_t i = 0; i < s.alphas.size(); ++i) a.add_row({s.alphas[i], s.regimes[i]});
  write_table(r, c, std::move(a), "refuge_scan.csv");

  ResultTable th = make_table("refuge_thresholds", c, {"name", "lo", "hi", "note"});
  for (const RefugeThreshold& t : s.thresholds)
    th.add_row({t.name, t.bracket ? t.bracket->lo : kNaN, t.bracket ? t.bracket->hi : kNaN, t.note});
  th.add_row({std::string("B_hopf"), opt(s.b_hopf), opt(s.b_hopf),
              std::string("eigenvalue crossing of B")});
  if (p.l() < p.m() && p.m() <= (1.0 + p.l()) / 2.0) {
    const double f = hopf_3d(p.l(), p.m()).value;
    th.add_row({std::string("alpha**_formula"), f, f, std::string("approximate")});
  }
  write_table(r, c, std::move(th), "refuge_thresholds.csv");
  return r;
}

CommandResult cmd_classify(const RunConfig& c0, const CommandOptions& o) {
  const RunConfig c = effective_config(c0, o);
  CommandResult r;
  const std::vector<State4> seeds =
      c.classify_x0.empty() ? seed_set(c.seeds, c.params) : c.classify_x0;
  ResultTable t = make_table(
      "classify", c,
      {"seed", "u1", "v1", "u2", "v2", "kind", "summary", "k", "label", "period", "rotation",
       "lyapunov", "box_dimension", "stable", "time_used", "undecided_test", "final_u1",
       "final_v1", "final_u2", "final_v2"});
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const AttractorReport rep = classify_ic(c.system, seeds[i], c.params, c.budget);
    const State4& x = seeds[i];
    const State4& f = rep.final_state;
    t.add_row({static_cast<double>(i), x[0], x[1], x[2], x[3], std::string(to_string(rep.kind)),
               rep.summary(), static_cast<double>(rep.k), std::string(to_string(rep.label)),
               opt(rep.period), opt(rep.rotation), opt(rep.lyapunov), opt(rep.box_dimension),
               std::string(rep.stable ? (*rep.stable ? "yes" : "no") : ""), rep.time_used,
               rep.undecided_test, f[0], f[1], f[2], f[3]});
  }
  write_table(r, c, std::move(t), "classify.csv");
  return r;
}

int run_command(std::string_view name, const std::filesystem::path& config,
                const CommandOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig c = load_config(config);
    CommandResult res;
    if (name == "simulate") res = cmd_simulate(c, o);
    else if (name == "equilibria") res = cmd_equilibria(c, o);
    else if (name == "eigen") res = cmd_eigen(c, o);
    else if (name == "boundaries") res = cmd_boundaries(c, o);
    else if (name == "sweep") res = cmd_sweep(c, o);
    else if (name == "scan-refuge") res = cmd_scan_refuge(c, o);
    else if (name == "classify") res = cmd_classify(c, o);
    else throw ConfigError("", "unknown command '" + std::string(name) + "'");
    for (const auto& f : res.files) out << f.string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const OutputError& e) {
    err << "output error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace allee::io
