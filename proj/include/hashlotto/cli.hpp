#pragma once

#include "hashlotto/numerics.hpp"
#include "hashlotto/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hashlotto::cli {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2 };

inline constexpr std::string_view kSizeCsvHeader =
    "mode,theta,alpha,beta,facility_machines,m_min,n_min_hashes,feasible";

struct CalibrationReport {
  std::string bits;  ///< empty when configured by difficulty
  std::string target_hex;
  double target = 0.0;
  double difficulty = 0.0;
  double probability = 0.0;
  double ev_per_hash = 0.0;
  double ev_per_th = 0.0;
  double characteristic_hashes = 0.0;
  double machine_hashes = 0.0;
  double revenue_usd = 0.0;  ///< one machine over the horizon
  double energy_cost_usd = 0.0;
  double margin_usd = 0.0;
  std::optional<double> fleet_expected_btc;
  std::optional<double> fleet_realized_btc;
  std::optional<double> opportunity_cost_btc;
};

CalibrationReport calibrate(const ScenarioConfig& cfg);

enum class SizeMode { Cv, QuantileNormal, QuantileExact };

SizeMode parse_size_mode(std::string_view text);
std::string_view size_mode_name(SizeMode mode);

struct SizeRequest {
  SizeMode mode = SizeMode::QuantileExact;
  bool pool = false;
  std::optional<double> theta;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<std::int64_t> facility_machines;
};

struct SizeRow {
  SizeRequest request;
  std::int64_t m_min = 0;
  double n_min_hashes = 0.0;
  bool feasible = true;
};

/// One sizing evaluation. r_pool is required for pooled requests.
SizeRow run_size(const ScenarioConfig& cfg, const SizeRequest& request,
                 std::optional<double> r_pool);

std::string format_size_row(const SizeRow& row);

/// Inverse of format_size_row; used to re-run emitted rows.
SizeRequest parse_size_row(std::string_view line);

struct UpsideReport {
  std::int64_t machines = 0;
  std::int64_t pooled_machines = 0;
  double alpha = 0.0;
  double direct_revenue_usd = 0.0;
  double pool_revenue_usd = 0.0;
  double expected_revenue_usd = 0.0;
  double energy_cost_usd = 0.0;
  double revenue_threshold_usd = 0.0;
  double profit_threshold_usd = 0.0;
  double probability_normal = 0.0;
  double probability_exact = 0.0;
  TailRegime exact_regime = TailRegime::Auto;
};

UpsideReport upside(const ScenarioConfig& cfg, std::int64_t machines, std::int64_t pooled,
                    double alpha, std::optional<double> r_pool);

enum class VerifySuite { Direct, Pool, All };

struct VerifyOutcome {
  std::string name;
  double analytic = 0.0;
  double mc = 0.0;
  double std_error = 0.0;
  bool passed = false;
};

/// Desk-scale Monte Carlo checks of the analytic tails. With expect_fail the
/// sampled side uses alpha + 0.5, which every check should then reject.
std::vector<VerifyOutcome> run_verify(VerifySuite suite, std::uint64_t seed,
                                      std::uint64_t trials, bool expect_fail,
                                      unsigned threads = 1);

/// Full command-line entry point. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hashlotto::cli
