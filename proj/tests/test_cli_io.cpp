#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "allee/io/commands.hpp"
#include "allee/io/config.hpp"
#include "allee/io/svg.hpp"
#include "allee/io/table.hpp"
#include "allee/spectral.hpp"

using namespace allee;
using namespace allee::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("allee_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

const char* kBase = R"([model]
system = full
alpha = 0.02
gamma = 1
m = 0.45
l = 0.1

[simulate]
t_end = 50
x0 = 0.9, 0.2, 0.05, 0.05
)";

// Sets key in section, replacing an existing assignment or adding the section.
std::string with_key(const std::string& text, const std::string& section, const std::string& key,
                     const std::string& value) {
  std::istringstream in(text);
  std::string line, cur, out;
  bool done = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '[') {
      if (cur == section && !done) out += key + " = " + value + "\n", done = true;
      cur = line.substr(1, line.find(']') - 1);
    } else if (cur == section && line.rfind(key + " ", 0) == 0) {
      if (!done) out += key + " = " + value + "\n", done = true;
      continue;
    }
    out += line + "\n";
  }
  if (!done) out += (cur == section ? "" : "[" + section + "]\n") + key + " = " + value + "\n";
  return out;
}

int run_bin(const std::string& args, std::string* err = nullptr) {
  const char* bin = std::getenv("ALLEE_PATCH_BIN");
  REQUIRE_MESSAGE(bin, "ALLEE_PATCH_BIN not set");
  const fs::path errf = scratch("stderr") / "err.txt";
  const std::string cmd = std::string(bin) + " " + args + " > /dev/null 2> " + errf.string();
  const int st = std::system(cmd.c_str());
  if (err) *err = slurp(errf);
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(kBase);
  CHECK(c.system == SystemId::Full1);
  CHECK(c.params == ModelParams::symmetric(0.02, 1.0, 0.45, 0.1));
  CHECK(c.simulate.t_end == 50.0);
  REQUIRE(c.simulate.x0.size() == 1);
  CHECK(c.simulate.x0[0] == State4{0.9, 0.2, 0.05, 0.05});
  CHECK(c.sweep.l == 0.1);

  const RunConfig d = parse_config("[model]\nalpha = 0.02\nalpha2 = 0.03\n[simulate]\nx0 = 0.1,0.1,0.1,0.1; 0.2,0.2,0.2,0.2\n");
  CHECK(d.params.alpha1 == 0.02);
  CHECK(d.params.alpha2 == 0.03);
  CHECK(d.simulate.x0.size() == 2);
}

TEST_CASE("config errors name the key") {
  auto key_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.key;
    }
    return std::string("<none>");
  };
  CHECK(key_of("[model]\nalpah = 0.1\n") == "model.alpah");
  CHECK(key_of("[modle]\nalpha = 0.1\n") == "modle.alpha");
  CHECK(key_of("[model]\nalpha = abc\n") == "model.alpha");
  CHECK(key_of("[model]\nl = 1.5\n") == "model");
  CHECK(key_of("[simulate]\nx0 = 0.1, 0.2\n") == "simulate.x0");
  CHECK(key_of("[simulate]\nx0 = -0.1, 0.2, 0.1, 0.1\n") == "simulate.x0");
  CHECK(key_of("[integrator]\nrtol = 0\n") == "integrator.rtol");
  CHECK(key_of("[sweep]\nn_alpha = 2.5\n") == "sweep.n_alpha");
  CHECK(key_of("[classify]\nseeds = mine\n") == "classify.seeds");
  CHECK(key_of("[model]\nsystem = five\n") == "model.system");
  CHECK(key_of("alpha = 0.1\n") == "alpha");
  CHECK(key_of("[model\nalpha = 0.1\n") == "");
}

TEST_CASE("config hash changes iff a semantic field changes") {
  const std::string h = config_hash(parse_config(kBase));
  CHECK(h.size() == 16);
  // Same semantics, different spelling, order and comments.
  const std::string same = "; comment\n[simulate]\nx0 = 0.9,0.2,0.05,0.05\nt_end = 5e1\n"
                           "[model]\nl = 0.1\nm = 0.45\ngamma = 1.0\nalpha = 2e-2\n"
                           "[output]\ndir = elsewhere\n";
  CHECK(config_hash(parse_config(same)) == h);

  const char* edits[][3] = {{"model", "alpha1", "0.021"},      {"model", "beta2", "1.1"},
                             {"model", "gamma", "1.5"},        {"integrator", "rtol", "1e-8"},
                             {"integrator", "sample_dt", "1"},  {"simulate", "projection", "totals"},
                             {"classify", "burn_in", "100"},    {"classify", "seeds", "symmetric"},
                             {"sweep", "n_m", "9"},             {"boundaries", "samples", "5"},
                             {"refuge", "width", "1e-3"},       {"classify", "x0", "0.1,0.1,0.1,0.1"}};
  for (const auto& e : edits) {
    CAPTURE(e[1]);
    CHECK(config_hash(parse_config(with_key(kBase, e[0], e[1], e[2]))) != h);
  }
  const RunConfig c = parse_config(kBase);
  RunConfig d = c;
  d.params.m1 = std::nextafter(d.params.m1, 1.0);
  d.params.m2 = d.params.m1;
  CHECK(config_hash(d) != config_hash(c));
  RunConfig e = c;
  e.system = SystemId::Local2;
  CHECK(config_hash(e) != config_hash(c));
}

TEST_CASE("17-digit CSV round trip is bit-identical") {
  std::mt19937_64 g(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ResultTable t;
  t.schema = "test";
  t.config_hash = "0123456789abcdef";
  t.toolkit_version = std::string(kToolkitVersion);
  t.columns = {"x", "y", "text"};
  std::vector<double> values;
  for (int i = 0; i < 500; ++i) {
    const double x = u(g) * std::pow(10.0, static_cast<int>(u(g) * 30));
    const double y = i % 7 == 0 ? std::numeric_limits<double>::denorm_min() * (i + 1) : 1.0 / (i + 1);
    t.add_row({x, y, std::string(i % 3 ? "plain" : "with, comma \"quoted\"")});
  }
  t.add_row({std::numeric_limits<double>::infinity(), -0.0, std::string("42")});
  std::stringstream ss;
  write_csv(t, ss);
  const ResultTable r = read_csv(ss);
  CHECK(r.schema == "test");
  CHECK(r.config_hash == t.config_hash);
  CHECK(r.toolkit_version == t.toolkit_version);
  CHECK(r.columns == t.columns);
  REQUIRE(r.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    REQUIRE(r.rows[i].size() == 3);
    CHECK(same_bits(std::get<double>(r.rows[i][0]), std::get<double>(t.rows[i][0])));
    CHECK(same_bits(std::get<double>(r.rows[i][1]), std::get<double>(t.rows[i][1])));
    CHECK(std::get<std::string>(r.rows[i][2]) == std::get<std::string>(t.rows[i][2]));
  }
  CHECK_THROWS_AS(t.add_row({1.0}), std::invalid_argument);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("svg shape") {
  const std::string s = svg_lines({"t", "x", "y"}, {{"a", {0, 1, 2}, {0, 1, 0}, ""}});
  CHECK(s.find("viewBox=\"0 0 800 600\"") != std::string::npos);
  CHECK(s.find("<path") != std::string::npos);
  CHECK(s.rfind("</svg>") != std::string::npos);
  const std::string m = svg_rect_map({"t", "x", "y"}, {{0, 1, 0, 1, "I"}, {1, 2, 0, 1, "V"}},
                                     {{"I", "#00ff00"}, {"V", "#ff0000"}});
  CHECK(m.find("#00ff00") != std::string::npos);
  CHECK(m.find("#ff0000") != std::string::npos);
}

TEST_CASE("simulate writes t,u1,v1,u2,v2; header only for t_end = 0") {
  const fs::path dir = scratch("simulate");
  CommandOptions o;
  o.out_dir = dir;
  o.svg = true;
  RunConfig c = parse_config(kBase);
  const CommandResult r = cmd_simulate(c, o);
  const ResultTable t = read_csv_file(dir / "trajectory_0.csv");
  CHECK(t.columns == std::vector<std::string>{"t", "u1", "v1", "u2", "v2"});
  CHECK(t.rows.size() > 10);
  CHECK(t.config_hash == config_hash(effective_config(c, o)));
  REQUIRE(r.tables.size() == 1);
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t k = 0; k < 5; ++k)
      CHECK(same_bits(std::get<double>(t.rows[i][k]), std::get<double>(r.tables[0].rows[i][k])));
  CHECK(fs::exists(dir / "trajectory.svg"));

  c.simulate.t_end = 0.0;
  cmd_simulate(c, o);
  const ResultTable e = read_csv_file(dir / "trajectory_0.csv");
  CHECK(e.columns.size() == 5);
  CHECK(e.rows.empty());
}

TEST_CASE("eigen at O gives the closed-form values") {
  const fs::path dir = scratch("eigen");
  CommandOptions o;
  o.out_dir = dir;
  const RunConfig c = parse_config(kBase);
  cmd_eigen(c, o);
  const ResultTable t = read_csv_file(dir / "eigen.csv");
  std::vector<cplx> at_o;
  for (const auto& row : t.rows)
    if (std::get<std::string>(row[0]) == "O") {
      at_o.emplace_back(std::get<double>(row[2]), std::get<double>(row[3]));
      CHECK(std::get<std::string>(row[4]) == "closed_form");
    }
  REQUIRE(at_o.size() == 4);
  const Spectrum expect = Spectrum::make(
      {cplx(-0.1), cplx(-0.1 - 2 * 0.02), cplx(-0.45), cplx(-0.45)}, Provenance::ClosedForm);
  CHECK(spectrum_distance(Spectrum::make(at_o, Provenance::ClosedForm), expect) < 1e-14);
}

TEST_CASE("boundaries table") {
  const fs::path dir = scratch("boundaries");
  CommandOptions o;
  o.out_dir = dir;
  cmd_boundaries(parse_config(kBase), o);
  const ResultTable t = read_csv_file(dir / "boundaries.csv");
  bool h1 = false, h2 = false, cusp = false, sc = false, sb = false;
  for (const auto& row : t.rows) {
    const std::string name = std::get<std::string>(row[0]);
    const double a = std::get<double>(row[1]), m = std::get<double>(row[2]);
    if (name == "H1") h1 = std::abs(m - 0.55) < 1e-15;
    if (name == "H2" && std::abs(m - 0.45) < 1e-12) h2 = std::abs(a - 0.045) < 1e-12;
    if (name == "CuspB") cusp = std::abs(a - 0.30333) < 1e-5 && std::abs(m - 0.1625) < 1e-3;
    if (name == "SC2") sc = std::abs(a - 0.045) < 1e-12;
    if (name == "SB_fold") sb = true;
  }
  CHECK(h1);
  CHECK(h2);
  CHECK(cusp);
  CHECK(sc);
  CHECK(sb);
}

TEST_CASE("classify and equilibria tables") {
  const fs::path dir = scratch("classify");
  CommandOptions o;
  o.out_dir = dir;
  RunConfig c = parse_config(std::string(kBase) + "[classify]\nx0 = 0.05,0.05,0.05,0.05\n");
  cmd_classify(c, o);
  const ResultTable t = read_csv_file(dir / "classify.csv");
  REQUIRE(t.rows.size() == 1);
  CHECK(std::get<std::string>(t.rows[0][5]) == "origin_extinction");
  cmd_equilibria(c, o);
  const ResultTable e = read_csv_file(dir / "equilibria.csv");
  CHECK(e.rows.size() >= 4);
  CHECK(std::get<std::string>(e.rows[0][0]) == "O");
}

TEST_CASE("binary exit codes") {
  const fs::path dir = scratch("bin");
  const fs::path good = dir / "good.ini", bad = dir / "bad.ini", numeric = dir / "num.ini";
  spit(good, kBase);
  spit(bad, with_key(kBase, "model", "bogus_key", "1"));
  spit(numeric, with_key(kBase, "integrator", "max_steps", "3"));
  const std::string out = " --out " + (dir / "out").string();

  CHECK(run_bin("equilibria --config " + good.string() + out) == 0);
  CHECK(fs::exists(dir / "out" / "equilibria.csv"));
  CHECK(run_bin("simulate --svg --config " + good.string() + out) == 0);
  CHECK(fs::exists(dir / "out" / "trajectory.svg"));

  std::string err;
  CHECK(run_bin("simulate --config " + bad.string() + out, &err) == 2);
  CHECK(err.find("bogus_key") != std::string::npos);
  CHECK(run_bin("simulate --config " + numeric.string() + out, &err) == 3);
  CHECK(run_bin("simulate --config " + (dir / "missing.ini").string()) == 2);
  CHECK(run_bin("frobnicate --config " + good.string()) == 2);
  CHECK(run_bin("simulate --config " + good.string() + " --out /proc/allee_nope") == 2);
  CHECK(run_bin("classify --seed-set nope --config " + good.string() + out) == 2);
  CHECK(run_bin("--help") == 0);

  ::setenv("ALLEE_PATCH_JOBS", "zero", 1);
  CHECK(run_bin("equilibria --config " + good.string() + out) == 2);
  ::setenv("ALLEE_PATCH_JOBS", "2", 1);
  CHECK(run_bin("equilibria --config " + good.string() + out) == 0);
  ::unsetenv("ALLEE_PATCH_JOBS");
}
