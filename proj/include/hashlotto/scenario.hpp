#pragma once

// Scenario files: flat `key = value` text with dotted section names.
//
//   chain.bits = 0x1704ed7f        # or chain.difficulty, never both
//   reward.r_block = 6.25
//   hardware.eta_h = 110           # TH/s
//   hardware.eta_e = 29.5          # J/TH
//   market.p_btc = 42265
//   market.p_e = 0.0885
//   horizon_s = 31536000
//
// Optional: chain.t1_bits, pool.r_pool | pool.preset | pool.realized_{btc,
// machines,eta_h}, fleet.{machines,pooled_machines,realized_btc},
// risk.{theta,alpha,beta,facility_machines}.

#include "hashlotto/chainparams.hpp"
#include "hashlotto/economics.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace hashlotto {

using KeyValues = std::map<std::string, std::string, std::less<>>;

struct RealizedFleet {
  double btc = 0.0;
  std::int64_t machines = 0;
  double eta_h = 0.0;
};

struct ScenarioConfig {
  std::optional<CompactBits> bits;
  std::optional<Difficulty> difficulty;
  std::optional<CompactBits> t1_bits;
  double r_block = 0.0;
  HardwareSpec hardware;
  double p_btc = 0.0;
  double p_e = 0.0;
  double horizon_s = 0.0;

  std::optional<double> r_pool;
  std::optional<std::string> pool_preset;
  std::optional<RealizedFleet> pool_realized;

  std::optional<std::int64_t> machines;
  std::optional<std::int64_t> pooled_machines;
  std::optional<double> realized_btc;

  std::optional<double> theta;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<std::int64_t> facility_machines;

  Target256 difficulty_one() const;
  Target256 target() const;
  HashProbability probability() const;
  MarketParams market() const;
  double machine_hashes() const;

  /// R' from whichever pool source is configured; nullopt if none.
  std::optional<double> pool_payout() const;
};

/// Reads key/value pairs. `#` starts a comment; blank lines are skipped.
KeyValues read_key_values(std::istream& in, std::string_view source);

/// Validates and converts. Errors are ConfigError naming the key.
ScenarioConfig scenario_from_key_values(const KeyValues& kv);

KeyValues load_key_values(const std::filesystem::path& path);

/// HASHLOTTO_SCENARIO_DIR if set, else the directory compiled in.
std::filesystem::path scenario_directory();

/// `<dir>/<name>.cfg`; throws ConfigError if missing.
std::filesystem::path scenario_path(std::string_view name);

/// Resolves a pool preset name: "paper" or "corrected".
double pool_preset_value(std::string_view name);

}  // namespace hashlotto
