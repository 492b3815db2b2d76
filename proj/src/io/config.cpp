#include "allee/io/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "allee/io/table.hpp"

namespace allee::io {

std::string_view to_string(Projection p) {
  switch (p) {
    case Projection::U1U2: return "u1-u2";
    case Projection::Totals: return "totals";
    case Projection::Patch1: return "patch1";
    case Projection::Patch2: return "patch2";
  }
  return "?";
}

Projection projection_from_string(std::string_view s) {
  for (auto p : {Projection::U1U2, Projection::Totals, Projection::Patch1, Projection::Patch2})
    if (to_string(p) == s) return p;
  throw std::invalid_argument("unknown projection '" + std::string(s) +
                              "' (expected u1-u2, totals, patch1 or patch2)");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  try {
    const double d = parse_double(trim(v));
    if (!std::isfinite(d)) throw std::invalid_argument("");
    return d;
  } catch (const std::invalid_argument&) {
    throw ConfigError(key, "expected a finite number, got '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 1e15)
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  return static_cast<long>(d);
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

template <class F>
Setter dbl(F field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    field(c) = to_double(k, v);
  };
}

template <class F>
Setter integer(F field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    field(c) = static_cast<std::remove_reference_t<decltype(field(c))>>(to_long(k, v));
  };
}

const std::map<std::string, Setter>& registry() {
  static const std::map<std::string, Setter> r = [] {
    std::map<std::string, Setter> m;
    // model
    m["model.system"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      try {
        c.system = system_from_string(trim(v));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(k, e.what());
      }
    };
    auto both = [](double ModelParams::*a, double ModelParams::*b) {
      return [a, b](RunConfig& c, const std::string& k, const std::string& v) {
        c.params.*a = c.params.*b = to_double(k, v);
      };
    };
    m["model.alpha"] = both(&ModelParams::alpha1, &ModelParams::alpha2);
    m["model.gamma"] = both(&ModelParams::gamma1, &ModelParams::gamma2);
    m["model.m"] = both(&ModelParams::m1, &ModelParams::m2);
    m["model.l"] = both(&ModelParams::l1, &ModelParams::l2);
    m["model.beta"] = both(&ModelParams::beta1, &ModelParams::beta2);
    m["model.alpha1"] = dbl([](RunConfig& c) -> double& { return c.params.alpha1; });
    m["model.alpha2"] = dbl([](RunConfig& c) -> double& { return c.params.alpha2; });
    m["model.gamma1"] = dbl([](RunConfig& c) -> double& { return c.params.gamma1; });
    m["model.gamma2"] = dbl([](RunConfig& c) -> double& { return c.params.gamma2; });
    m["model.m1"] = dbl([](RunConfig& c) -> double& { return c.params.m1; });
    m["model.m2"] = dbl([](RunConfig& c) -> double& { return c.params.m2; });
    m["model.l1"] = dbl([](RunConfig& c) -> double& { return c.params.l1; });
    m["model.l2"] = dbl([](RunConfig& c) -> double& { return c.params.l2; });
    m["model.beta1"] = dbl([](RunConfig& c) -> double& { return c.params.beta1; });
    m["model.beta2"] = dbl([](RunConfig& c) -> double& { return c.params.beta2; });
    // integrator
    m["integrator.rtol"] = dbl([](RunConfig& c) -> double& { return c.integ.rtol; });
    m["integrator.atol"] = dbl([](RunConfig& c) -> double& { return c.integ.atol; });
    m["integrator.sample_dt"] = dbl([](RunConfig& c) -> double& { return c.integ.sample_dt; });
    m["integrator.time_budget"] = dbl([](RunConfig& c) -> double& { return c.integ.time_budget; });
    m["integrator.max_steps"] = integer([](RunConfig& c) -> long& { return c.integ.max_steps; });
    // simulate
    m["simulate.t_end"] = dbl([](RunConfig& c) -> double& { return c.simulate.t_end; });
    m["simulate.plot_from"] = dbl([](RunConfig& c) -> double& { return c.simulate.plot_from; });
    m["simulate.x0"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      try {
        c.simulate.x0 = parse_states(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(k, e.what());
      }
    };
    m["simulate.projection"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      try {
        c.simulate.projection = projection_from_string(trim(v));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(k, e.what());
      }
    };
    // classify
    m["classify.burn_in"] = dbl([](RunConfig& c) -> double& { return c.budget.burn_in; });
    m["classify.analysis"] = dbl([](RunConfig& c) -> double& { return c.budget.analysis; });
    m["classify.t_budget"] = dbl([](RunConfig& c) -> double& { return c.budget.t_budget; });
    m["classify.target_crossings"] =
        integer([](RunConfig& c) -> std::size_t& { return c.budget.target_crossings; });
    m["classify.eq_tol"] = dbl([](RunConfig& c) -> double& { return c.budget.eq_tol; });
    m["classify.lyapunov_horizon"] =
        dbl([](RunConfig& c) -> double& { return c.budget.lyapunov_horizon; });
    m["classify.seeds"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      const std::string s = trim(v);
      if (s != "default" && s != "symmetric")
        throw ConfigError(k, "unknown seed set '" + s + "' (expected default or symmetric)");
      c.seeds = s;
    };
    m["classify.x0"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      try {
        c.classify_x0 = parse_states(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(k, e.what());
      }
    };
    // sweep
    m["sweep.alpha_lo"] = dbl([](RunConfig& c) -> double& { return c.sweep.alpha_lo; });
    m["sweep.alpha_hi"] = dbl([](RunConfig& c) -> double& { return c.sweep.alpha_hi; });
    m["sweep.m_lo"] = dbl([](RunConfig& c) -> double& { return c.sweep.m_lo; });
    m["sweep.m_hi"] = dbl([](RunConfig& c) -> double& { return c.sweep.m_hi; });
    m["sweep.n_alpha"] = integer([](RunConfig& c) -> int& { return c.sweep.n_alpha; });
    m["sweep.n_m"] = integer([](RunConfig& c) -> int& { return c.sweep.n_m; });
    // boundaries
    m["boundaries.m_lo"] = dbl([](RunConfig& c) -> double& { return c.boundaries.m_lo; });
    m["boundaries.m_hi"] = dbl([](RunConfig& c) -> double& { return c.boundaries.m_hi; });
    m["boundaries.samples"] = integer([](RunConfig& c) -> int& { return c.boundaries.samples; });
    m["boundaries.alpha_lo"] = dbl([](RunConfig& c) -> double& { return c.boundaries.alpha_lo; });
    m["boundaries.alpha_hi"] = dbl([](RunConfig& c) -> double& { return c.boundaries.alpha_hi; });
    // refuge
    m["refuge.alpha_max"] = dbl([](RunConfig& c) -> double& { return c.refuge.alpha_max; });
    m["refuge.samples"] = integer([](RunConfig& c) -> int& { return c.refuge.samples; });
    m["refuge.width"] = dbl([](RunConfig& c) -> double& { return c.refuge.width; });
    // output
    m["output.dir"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.out_dir = trim(v);
    };
    return m;
  }();
  return r;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

void validate(RunConfig& c) {
  try {
    c.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model", e.what());
  }
  require(c.integ.rtol > 0.0, "integrator.rtol", "must be > 0");
  require(c.integ.atol > 0.0, "integrator.atol", "must be > 0");
  require(c.integ.sample_dt >= 0.0, "integrator.sample_dt", "must be >= 0");
  require(c.integ.time_budget > 0.0, "integrator.time_budget", "must be > 0");
  require(c.integ.max_steps > 0, "integrator.max_steps", "must be > 0");
  require(c.simulate.t_end >= 0.0, "simulate.t_end", "must be >= 0");
  require(!c.simulate.x0.empty(), "simulate.x0", "needs at least one state");
  for (const State4& x : c.simulate.x0) {
    try {
      validate_state(c.system, x);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("simulate.x0", e.what());
    }
  }
  for (const State4& x : c.classify_x0) {
    try {
      validate_state(c.system, x);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("classify.x0", e.what());
    }
  }
  require(c.budget.burn_in >= 0.0, "classify.burn_in", "must be >= 0");
  require(c.budget.analysis > 0.0, "classify.analysis", "must be > 0");
  require(c.budget.t_budget > 0.0, "classify.t_budget", "must be > 0");
  require(c.budget.target_crossings >= 30, "classify.target_crossings", "must be >= 30");
  require(c.budget.eq_tol > 0.0, "classify.eq_tol", "must be > 0");
  require(c.budget.lyapunov_horizon > 0.0, "classify.lyapunov_horizon", "must be > 0");
  require(c.sweep.alpha_lo >= 0.0 && c.sweep.alpha_lo < c.sweep.alpha_hi, "sweep.alpha_lo",
          "needs 0 <= alpha_lo < alpha_hi");
  require(c.sweep.m_lo >= 0.0 && c.sweep.m_lo < c.sweep.m_hi, "sweep.m_lo",
          "needs 0 <= m_lo < m_hi");
  require(c.sweep.n_alpha >= 1, "sweep.n_alpha", "must be >= 1");
  require(c.sweep.n_m >= 1, "sweep.n_m", "must be >= 1");
  require(c.boundaries.m_lo < c.boundaries.m_hi, "boundaries.m_lo", "needs m_lo < m_hi");
  require(c.boundaries.samples >= 2, "boundaries.samples", "must be >= 2");
  require(c.boundaries.alpha_lo >= 0.0 && c.boundaries.alpha_lo < c.boundaries.alpha_hi,
          "boundaries.alpha_lo", "needs 0 <= alpha_lo < alpha_hi");
  require(c.refuge.alpha_max > 0.0, "refuge.alpha_max", "must be > 0");
  require(c.refuge.samples >= 2, "refuge.samples", "must be >= 2");
  require(c.refuge.width > 0.0, "refuge.width", "must be > 0");

  c.budget.integ = c.integ;
  c.sweep.gamma = c.params.gamma1;
  c.sweep.l = c.params.l1;
  c.sweep.seeds = c.seeds;
  c.sweep.budget = c.budget;
}

}  // namespace

std::vector<State4> parse_states(std::string_view s) {
  std::vector<State4> out;
  std::string text(s);
  std::stringstream rows(text);
  std::string row;
  while (std::getline(rows, row, ';')) {
    if (trim(row).empty()) continue;
    std::stringstream cols(row);
    std::string tok;
    State4 x;
    std::size_t i = 0;
    while (std::getline(cols, tok, ',')) {
      if (i >= 4) throw std::invalid_argument("state has more than 4 components");
      try {
        x[i++] = parse_double(trim(tok));
      } catch (const std::invalid_argument&) {
        throw std::invalid_argument("bad state component '" + trim(tok) + "'");
      }
    }
    if (i != 4) throw std::invalid_argument("state needs 4 components u1,v1,u2,v2");
    out.push_back(x);
  }
  return out;
}

RunConfig parse_config(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream is{std::string(text)};
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", "malformed config, line " + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig c;
  const auto& reg = registry();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(section, "key outside of a [section]");
    for (const auto& [key, val] : body) {
      const std::string full = section + "." + key;
      const auto it = reg.find(full);
      if (it == reg.end()) throw ConfigError(full, "unknown key");
      it->second(c, full, val.get_value<std::string>());
    }
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("", "cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_text(const RunConfig& c) {
  std::ostringstream os;
  auto kv = [&os](std::string_view k, double v) { os << k << '=' << format_double(v) << '\n'; };
  auto states = [&os](std::string_view k, const std::vector<State4>& xs) {
    os << k << '=';
    for (const State4& x : xs)
      os << format_double(x[0]) << ',' << format_double(x[1]) << ',' << format_double(x[2]) << ','
         << format_double(x[3]) << ';';
    os << '\n';
  };
  const ModelParams& p = c.params;
  os << "model.system=" << to_string(c.system) << '\n';
  kv("model.alpha1", p.alpha1);
  kv("model.alpha2", p.alpha2);
  kv("model.gamma1", p.gamma1);
  kv("model.gamma2", p.gamma2);
  kv("model.m1", p.m1);
  kv("model.m2", p.m2);
  kv("model.l1", p.l1);
  kv("model.l2", p.l2);
  kv("model.beta1", p.beta1);
  kv("model.beta2", p.beta2);
  kv("integrator.rtol", c.integ.rtol);
  kv("integrator.atol", c.integ.atol);
  kv("integrator.sample_dt", c.integ.sample_dt);
  kv("integrator.time_budget", c.integ.time_budget);
  kv("integrator.max_steps", static_cast<double>(c.integ.max_steps));
  kv("simulate.t_end", c.simulate.t_end);
  kv("simulate.plot_from", c.simulate.plot_from);
  states("simulate.x0", c.simulate.x0);
  os << "simulate.projection=" << to_string(c.simulate.projection) << '\n';
  kv("classify.burn_in", c.budget.burn_in);
  kv("classify.analysis", c.budget.analysis);
  kv("classify.t_budget", c.budget.t_budget);
  kv("classify.target_crossings", static_cast<double>(c.budget.target_crossings));
  kv("classify.eq_tol", c.budget.eq_tol);
  kv("classify.lyapunov_horizon", c.budget.lyapunov_horizon);
  os << "classify.seeds=" << c.seeds << '\n';
  states("classify.x0", c.classify_x0);
  kv("sweep.alpha_lo", c.sweep.alpha_lo);
  kv("sweep.alpha_hi", c.sweep.alpha_hi);
  kv("sweep.m_lo", c.sweep.m_lo);
  kv("sweep.m_hi", c.sweep.m_hi);
  kv("sweep.n_alpha", c.sweep.n_alpha);
  kv("sweep.n_m", c.sweep.n_m);
  kv("boundaries.m_lo", c.boundaries.m_lo);
  kv("boundaries.m_hi", c.boundaries.m_hi);
  kv("boundaries.samples", c.boundaries.samples);
  kv("boundaries.alpha_lo", c.boundaries.alpha_lo);
  kv("boundaries.alpha_hi", c.boundaries.alpha_hi);
  kv("refuge.alpha_max", c.refuge.alpha_max);
  kv("refuge.samples", c.refuge.samples);
  kv("refuge.width", c.refuge.width);
  return os.str();
}

std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical_text(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace allee::io
