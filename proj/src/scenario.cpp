#include "hashlotto/scenario.hpp"

#include "hashlotto/error.hpp"
#include "hashlotto/risk_pool.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>

#ifndef HASHLOTTO_DEFAULT_SCENARIO_DIR
#define HASHLOTTO_DEFAULT_SCENARIO_DIR "scenarios"
#endif

namespace hashlotto {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

const std::set<std::string, std::less<>>& known_keys() {
  static const std::set<std::string, std::less<>> keys{
      "chain.bits",          "chain.difficulty",     "chain.t1_bits",
      "reward.r_block",      "hardware.eta_h",       "hardware.eta_e",
      "market.p_btc",        "market.p_e",           "horizon_s",
      "pool.r_pool",         "pool.preset",          "pool.realized_btc",
      "pool.realized_machines", "pool.realized_eta_h", "fleet.machines",
      "fleet.pooled_machines", "fleet.realized_btc", "risk.theta",
      "risk.alpha",          "risk.beta",            "risk.facility_machines"};
  return keys;
}

[[noreturn]] void config_error(std::string_view key, const std::string& msg) {
  throw Error(Errc::ConfigError, std::string(key) + ": " + msg);
}

double number(const KeyValues& kv, std::string_view key) {
  const auto& text = kv.find(key)->second;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    config_error(key, "not a number: '" + text + "'");
  }
  return value;
}

std::int64_t integer(const KeyValues& kv, std::string_view key) {
  const auto& text = kv.find(key)->second;
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    config_error(key, "not an integer: '" + text + "'");
  }
  return value;
}

double positive(const KeyValues& kv, std::string_view key) {
  const double v = number(kv, key);
  if (!(v > 0.0)) config_error(key, "must be > 0");
  return v;
}

double nonnegative(const KeyValues& kv, std::string_view key) {
  const double v = number(kv, key);
  if (!(v >= 0.0)) config_error(key, "must be >= 0");
  return v;
}

bool has(const KeyValues& kv, std::string_view key) { return kv.find(key) != kv.end(); }

double required(const KeyValues& kv, std::string_view key, double (*get)(const KeyValues&, std::string_view)) {
  if (!has(kv, key)) config_error(key, "missing");
  return get(kv, key);
}

template <typename T, typename Get>
std::optional<T> optional_value(const KeyValues& kv, std::string_view key, Get get) {
  if (!has(kv, key)) return std::nullopt;
  return get(kv, key);
}

}  // namespace

KeyValues read_key_values(std::istream& in, std::string_view source) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) {
      throw Error(Errc::ConfigError, where + ": expected key = value");
    }
    const auto key = trim(view.substr(0, eq));
    const auto value = trim(view.substr(eq + 1));
    if (!known_keys().contains(key)) {
      throw Error(Errc::ConfigError, where + ": unknown key '" + std::string(key) + "'");
    }
    if (!kv.emplace(std::string(key), std::string(value)).second) {
      throw Error(Errc::ConfigError, where + ": duplicate key '" + std::string(key) + "'");
    }
  }
  return kv;
}

KeyValues load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot open " + path.string());
  return read_key_values(in, path.filename().string());
}

ScenarioConfig scenario_from_key_values(const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    if (!known_keys().contains(key)) config_error(key, "unknown key");
  }
  ScenarioConfig cfg;
  const bool has_bits = has(kv, "chain.bits");
  const bool has_difficulty = has(kv, "chain.difficulty");
  if (has_bits == has_difficulty) {
    config_error("chain", "exactly one of chain.bits and chain.difficulty is required");
  }
  try {
    if (has_bits) cfg.bits = parse_compact(kv.find("chain.bits")->second);
    if (has_difficulty) cfg.difficulty = parse_difficulty(kv.find("chain.difficulty")->second);
    if (has(kv, "chain.t1_bits")) cfg.t1_bits = parse_compact(kv.find("chain.t1_bits")->second);
    (void)cfg.target();
  } catch (const Error& e) {
    config_error(has_bits ? "chain.bits" : "chain.difficulty", e.what());
  }

  cfg.r_block = required(kv, "reward.r_block", positive);
  cfg.hardware.eta_h = required(kv, "hardware.eta_h", positive);
  cfg.hardware.eta_e = required(kv, "hardware.eta_e", positive);
  cfg.p_btc = required(kv, "market.p_btc", nonnegative);
  cfg.p_e = required(kv, "market.p_e", nonnegative);
  cfg.horizon_s = required(kv, "horizon_s", positive);

  const int pool_sources = static_cast<int>(has(kv, "pool.r_pool")) +
                           static_cast<int>(has(kv, "pool.preset")) +
                           static_cast<int>(has(kv, "pool.realized_btc") ||
                                            has(kv, "pool.realized_machines") ||
                                            has(kv, "pool.realized_eta_h"));
  if (pool_sources > 1) {
    config_error("pool", "give only one of pool.r_pool, pool.preset, pool.realized_*");
  }
  cfg.r_pool = optional_value<double>(kv, "pool.r_pool", nonnegative);
  if (has(kv, "pool.preset")) {
    const auto& name = kv.find("pool.preset")->second;
    try {
      (void)pool_preset_value(name);
    } catch (const Error& e) {
      config_error("pool.preset", e.what());
    }
    cfg.pool_preset = name;
  }
  if (has(kv, "pool.realized_btc") || has(kv, "pool.realized_machines") ||
      has(kv, "pool.realized_eta_h")) {
    RealizedFleet fleet;
    fleet.btc = required(kv, "pool.realized_btc", nonnegative);
    if (!has(kv, "pool.realized_machines")) config_error("pool.realized_machines", "missing");
    fleet.machines = integer(kv, "pool.realized_machines");
    if (fleet.machines <= 0) config_error("pool.realized_machines", "must be > 0");
    fleet.eta_h = required(kv, "pool.realized_eta_h", positive);
    cfg.pool_realized = fleet;
  }

  cfg.machines = optional_value<std::int64_t>(kv, "fleet.machines", integer);
  if (cfg.machines && *cfg.machines < 0) config_error("fleet.machines", "must be >= 0");
  cfg.pooled_machines = optional_value<std::int64_t>(kv, "fleet.pooled_machines", integer);
  if (cfg.pooled_machines && (*cfg.pooled_machines < 0 || *cfg.pooled_machines > cfg.machines.value_or(0))) {
    config_error("fleet.pooled_machines", "must lie in [0, fleet.machines]");
  }
  cfg.realized_btc = optional_value<double>(kv, "fleet.realized_btc", nonnegative);
  cfg.theta = optional_value<double>(kv, "risk.theta", positive);
  cfg.alpha = optional_value<double>(kv, "risk.alpha", positive);
  cfg.beta = optional_value<double>(kv, "risk.beta", positive);
  if (cfg.beta && !(*cfg.beta < 1.0)) config_error("risk.beta", "must be < 1");
  cfg.facility_machines = optional_value<std::int64_t>(kv, "risk.facility_machines", integer);
  if (cfg.facility_machines && *cfg.facility_machines <= 0) {
    config_error("risk.facility_machines", "must be > 0");
  }
  return cfg;
}

Target256 ScenarioConfig::difficulty_one() const {
  return t1_bits ? decode_compact(*t1_bits) : mainnet_difficulty_one();
}

Target256 ScenarioConfig::target() const {
  if (bits) return decode_compact(*bits);
  return target_from_difficulty(difficulty.value(), difficulty_one());
}

HashProbability ScenarioConfig::probability() const { return success_probability(target()); }

MarketParams ScenarioConfig::market() const {
  return MarketParams{p_btc, p_e, r_block, pool_payout().value_or(0.0)};
}

double ScenarioConfig::machine_hashes() const {
  return hashlotto::machine_hashes(hardware, horizon_s);
}

std::optional<double> ScenarioConfig::pool_payout() const {
  if (r_pool) return r_pool;
  if (pool_preset) return pool_preset_value(*pool_preset);
  if (pool_realized) {
    return pool_payout_from_realized(pool_realized->btc, pool_realized->machines,
                                     HardwareSpec{pool_realized->eta_h, hardware.eta_e}, horizon_s);
  }
  return std::nullopt;
}

std::filesystem::path scenario_directory() {
  if (const char* dir = std::getenv("HASHLOTTO_SCENARIO_DIR"); dir != nullptr && *dir != '\0') {
    return dir;
  }
  return HASHLOTTO_DEFAULT_SCENARIO_DIR;
}

std::filesystem::path scenario_path(std::string_view name) {
  auto path = scenario_directory() / (std::string(name) + ".cfg");
  if (!std::filesystem::exists(path)) {
    throw Error(Errc::ConfigError, "scenario '" + std::string(name) + "' not found at " + path.string());
  }
  return path;
}

double pool_preset_value(std::string_view name) {
  if (name == "paper") return kPoolPayoutPaper;
  if (name == "corrected") return pool_payout_corrected();
  throw Error(Errc::ConfigError, "unknown pool preset '" + std::string(name) +
                                     "' (expected paper or corrected)");
}

}  // namespace hashlotto
