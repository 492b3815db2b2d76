#pragma once

// Run configuration: INI text with [sections] and key = value lines.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "allee/classify.hpp"
#include "allee/flow.hpp"
#include "allee/model.hpp"

namespace allee::io {

inline constexpr std::string_view kToolkitVersion = "0.1.0";

/// Invalid configuration; `key` names the offending entry when there is one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key(key) {}
  std::string key;
};

enum class Projection { U1U2, Totals, Patch1, Patch2 };
std::string_view to_string(Projection p);
Projection projection_from_string(std::string_view s);

struct SimulateSpec {
  double t_end = 1000.0;
  std::vector<State4> x0{{0.9, 0.2, 0.05, 0.05}};
  double plot_from = 0.0;  // samples before this time are left out of the SVG
  Projection projection = Projection::U1U2;
};

struct BoundarySpec {
  double m_lo = 0.1, m_hi = 0.55;
  int samples = 10;
  double alpha_lo = 0.0, alpha_hi = 0.3;  // SB curve range
};

struct RefugeSpec {
  double alpha_max = 0.2;
  int samples = 40;
  double width = 1e-4;
};

struct RunConfig {
  SystemId system = SystemId::Full1;
  ModelParams params;
  IntegratorOptions integ;
  SimulateSpec simulate;
  ClassifyBudget budget;
  std::string seeds = "default";
  std::vector<State4> classify_x0;  // explicit seeds; overrides the seed set
  SweepSpec sweep;
  BoundarySpec boundaries;
  RefugeSpec refuge;
  std::filesystem::path out_dir = ".";  // not part of the hash
};

/// Parses INI text. Unknown sections or keys, malformed numbers and values
/// outside the model bounds raise ConfigError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text of every semantic field, 17 significant digits per float.
std::string canonical_text(const RunConfig& c);

/// 64-bit FNV-1a of canonical_text, as 16 hex digits.
std::string config_hash(const RunConfig& c);

/// "u1,v1,u2,v2" with states separated by ';'.
std::vector<State4> parse_states(std::string_view s);

}  // namespace allee::io
