#pragma once

// Expected value, revenue and cost of a mining fleet, plus the
// network-energy estimate from a machine efficiency table.

#include "hashlotto/chainparams.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hashlotto {

inline constexpr double kHashesPerTerahash = 1e12;
inline constexpr double kSecondsPerYear = 365.0 * 86400.0;
inline constexpr double kJoulesPerKwh = 3.6e6;
inline constexpr double kJoulesPerTwh = 3.6e15;

struct HardwareSpec {
  double eta_h = 0.0;  ///< TH/s per machine
  double eta_e = 0.0;  ///< J/TH

  double kwh_per_th() const noexcept { return eta_e / kJoulesPerKwh; }
  void validate() const;
};

struct MarketParams {
  double p_btc = 0.0;    ///< $/BTC
  double p_e = 0.0;      ///< $/kWh
  double r_block = 0.0;  ///< BTC per block, fees excluded
  double r_pool = 0.0;   ///< BTC per pooled hash

  void validate() const;
};

struct FleetPlan {
  std::int64_t machines = 0;
  double horizon_s = kSecondsPerYear;
  std::int64_t pooled_machines = 0;

  void validate() const;
};

struct EfficiencyTableRow {
  std::string model;
  double dominance_pct = 0.0;
  double eff_j_per_gh = 0.0;
};

struct NetworkEnergy {
  double eta_net = 0.0;     ///< dominance-weighted efficiency, J/TH
  double energy_twh = 0.0;  ///< facility energy over the horizon
};

/// EV* = p * R, BTC per hash.
double ev_per_hash(HashProbability p, double r_block);
double ev_per_hash(const Target256& target, double r_block);

/// BTC per terahash.
double ev_per_terahash(HashProbability p, double r_block);

/// H^b = 1 / EV*: hashes needed for one BTC in expectation.
double characteristic_hash_count(HashProbability p, double r_block);
double characteristic_hash_count(const Target256& target, double r_block);

/// Hashes one machine computes over the horizon.
double machine_hashes(const HardwareSpec& hw, double horizon_s);

/// H = M * eta_h * 1e12 * T.
double fleet_hashes(const FleetPlan& plan, const HardwareSpec& hw);

double expected_btc(const FleetPlan& plan, const HardwareSpec& hw, HashProbability p,
                    double r_block);

/// Dollar revenue of direct mining, P_BTC * EV_TH * eta_h * T * (M - M'). Pooled
/// machines are excluded; their payout is R' per hash, outside this function.
double expected_revenue(const FleetPlan& plan, const HardwareSpec& hw, const MarketParams& mkt,
                        HashProbability p);
double expected_revenue(const FleetPlan& plan, const HardwareSpec& hw, const MarketParams& mkt,
                        const Target256& target);

/// Electricity cost, deterministic: eta_e[kWh/TH] * eta_h * T * p_e * M.
double energy_cost(const FleetPlan& plan, const HardwareSpec& hw, const MarketParams& mkt);

/// Expected direct-mining BTC minus realized BTC over the same hashes.
/// Negative when the realized payout beat expectation.
double opportunity_cost(double realized_btc, const FleetPlan& plan, const HardwareSpec& hw,
                        HashProbability p, double r_block);
double opportunity_cost(double realized_btc, const FleetPlan& plan, const HardwareSpec& hw,
                        const Target256& target, double r_block);

NetworkEnergy network_energy(std::span<const EfficiencyTableRow> table, double pue,
                             double net_hashrate_ths, double horizon_s);

/// CSV with header `model,dominance_pct,eff_j_per_gh`. Parse errors carry
/// the 1-based line number.
std::vector<EfficiencyTableRow> read_efficiency_table(std::istream& in);
std::vector<EfficiencyTableRow> read_efficiency_table(const std::filesystem::path& path);

}  // namespace hashlotto
