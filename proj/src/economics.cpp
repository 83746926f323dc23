#include "hashlotto/economics.hpp"

#include "hashlotto/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string_view>

namespace hashlotto {

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void HardwareSpec::validate() const {
  if (!(eta_h > 0.0) || !std::isfinite(eta_h)) {
    throw Error(Errc::InvalidArgument, "hardware.eta_h must be > 0");
  }
  if (!(eta_e > 0.0) || !std::isfinite(eta_e)) {
    throw Error(Errc::InvalidArgument, "hardware.eta_e must be > 0");
  }
}

void MarketParams::validate() const {
  if (!finite_nonneg(p_btc)) throw Error(Errc::InvalidArgument, "market.p_btc must be >= 0");
  if (!finite_nonneg(p_e)) throw Error(Errc::InvalidArgument, "market.p_e must be >= 0");
  if (!(r_block > 0.0) || !std::isfinite(r_block)) {
    throw Error(Errc::InvalidArgument, "reward.r_block must be > 0");
  }
  if (!finite_nonneg(r_pool)) throw Error(Errc::InvalidArgument, "pool.r_pool must be >= 0");
}

void FleetPlan::validate() const {
  if (machines < 0) throw Error(Errc::InvalidArgument, "machines must be >= 0");
  if (!finite_nonneg(horizon_s)) throw Error(Errc::InvalidArgument, "horizon_s must be >= 0");
  if (pooled_machines < 0 || pooled_machines > machines) {
    throw Error(Errc::InvalidArgument, "pooled machines must lie in [0, machines]");
  }
}

double ev_per_hash(HashProbability p, double r_block) { return p.p * r_block; }

double ev_per_hash(const Target256& target, double r_block) {
  return ev_per_hash(success_probability(target), r_block);
}

double ev_per_terahash(HashProbability p, double r_block) {
  return kHashesPerTerahash * ev_per_hash(p, r_block);
}

double characteristic_hash_count(HashProbability p, double r_block) {
  return 1.0 / ev_per_hash(p, r_block);
}

double characteristic_hash_count(const Target256& target, double r_block) {
  // 2^256 / (tau * R), evaluated as a single division so the reciprocal
  // identity with ev_per_hash holds to rounding.
  return characteristic_hash_count(success_probability(target), r_block);
}

double machine_hashes(const HardwareSpec& hw, double horizon_s) {
  hw.validate();
  if (!finite_nonneg(horizon_s)) throw Error(Errc::InvalidArgument, "horizon_s must be >= 0");
  return hw.eta_h * kHashesPerTerahash * horizon_s;
}

double fleet_hashes(const FleetPlan& plan, const HardwareSpec& hw) {
  plan.validate();
  return static_cast<double>(plan.machines) * machine_hashes(hw, plan.horizon_s);
}

double expected_btc(const FleetPlan& plan, const HardwareSpec& hw, HashProbability p,
                    double r_block) {
  return fleet_hashes(plan, hw) * ev_per_hash(p, r_block);
}

double expected_revenue(const FleetPlan& plan, const HardwareSpec& hw, const MarketParams& mkt,
                        HashProbability p) {
  plan.validate();
  hw.validate();
  mkt.validate();
  return mkt.p_btc * ev_per_terahash(p, mkt.r_block) * hw.eta_h * plan.horizon_s *
         static_cast<double>(plan.machines - plan.pooled_machines);
}

double expected_revenue(const FleetPlan& plan, const HardwareSpec& hw, const MarketParams& mkt,
                        const Target256& target) {
  return expected_revenue(plan, hw, mkt, success_probability(target));
}

double energy_cost(const FleetPlan& plan, const HardwareSpec& hw, const MarketParams& mkt) {
  plan.validate();
  hw.validate();
  mkt.validate();
  return hw.kwh_per_th() * hw.eta_h * plan.horizon_s * mkt.p_e *
         static_cast<double>(plan.machines);
}

double opportunity_cost(double realized_btc, const FleetPlan& plan, const HardwareSpec& hw,
                        HashProbability p, double r_block) {
  if (!finite_nonneg(realized_btc)) {
    throw Error(Errc::InvalidArgument, "realized BTC must be >= 0");
  }
  return expected_btc(plan, hw, p, r_block) - realized_btc;
}

double opportunity_cost(double realized_btc, const FleetPlan& plan, const HardwareSpec& hw,
                        const Target256& target, double r_block) {
  return opportunity_cost(realized_btc, plan, hw, success_probability(target), r_block);
}

NetworkEnergy network_energy(std::span<const EfficiencyTableRow> table, double pue,
                             double net_hashrate_ths, double horizon_s) {
  if (table.empty()) throw Error(Errc::EmptyTable, "efficiency table has no rows");
  if (!(pue >= 1.0) || !std::isfinite(pue)) throw Error(Errc::InvalidArgument, "pue must be >= 1");
  if (!finite_nonneg(net_hashrate_ths) || !finite_nonneg(horizon_s)) {
    throw Error(Errc::InvalidArgument, "hash rate and horizon must be >= 0");
  }
  double weight = 0.0;
  double weighted = 0.0;
  for (const auto& row : table) {
    if (!finite_nonneg(row.dominance_pct) || !finite_nonneg(row.eff_j_per_gh)) {
      throw Error(Errc::InvalidArgument, "row '" + row.model + "' has a negative field");
    }
    weight += row.dominance_pct;
    weighted += row.dominance_pct * row.eff_j_per_gh;
  }
  if (std::abs(weight - 100.0) > 0.5) {
    throw Error(Errc::DominanceSumOutOfRange,
                "dominance sums to " + std::to_string(weight) + ", expected 100 +/- 0.5");
  }
  NetworkEnergy out;
  out.eta_net = 1000.0 * weighted / weight;  // J/GH -> J/TH
  // PUE applied last so the result is exactly linear in it.
  out.energy_twh = pue * (out.eta_net * net_hashrate_ths * horizon_s / kJoulesPerTwh);
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_field(std::string_view field, std::size_t line_no, const char* name) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": bad " + name + " '" +
                                      std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::vector<EfficiencyTableRow> read_efficiency_table(std::istream& in) {
  std::vector<EfficiencyTableRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = split_commas(view);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "model" || fields[1] != "dominance_pct" ||
          fields[2] != "eff_j_per_gh") {
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) +
                                          ": expected header model,dominance_pct,eff_j_per_gh");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected 3 fields, got " +
                                        std::to_string(fields.size()));
    }
    rows.push_back(EfficiencyTableRow{std::string(fields[0]),
                                      parse_field(fields[1], line_no, "dominance_pct"),
                                      parse_field(fields[2], line_no, "eff_j_per_gh")});
  }
  if (!header_seen) throw Error(Errc::ParseError, "missing header row");
  return rows;
}

std::vector<EfficiencyTableRow> read_efficiency_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
  return read_efficiency_table(in);
}

}  // namespace hashlotto
