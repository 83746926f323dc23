// Acceptance checks against the published worked examples. One line per
// criterion; `--criterion N` runs a single one. Exit status is 0 only if
// every selected criterion passes.

#include "hashlotto/cli.hpp"
#include "hashlotto/error.hpp"
#include "hashlotto/risk_direct.hpp"
#include "hashlotto/risk_pool.hpp"
#include "hashlotto/scenario.hpp"
#include "properties.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace hashlotto;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records one comparison; the criterion passes only if all do.
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAIL]");
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

ScenarioConfig load(const std::string& name) {
  return scenario_from_key_values(load_key_values(scenario_path(name)));
}

ScenarioConfig load_with(const std::string& name, const std::string& key, const std::string& value) {
  KeyValues kv = load_key_values(scenario_path(name));
  kv.erase("chain.bits");
  kv.erase("chain.difficulty");
  kv[key] = value;
  return scenario_from_key_values(kv);
}

Outcome per_machine_calibration() {
  Outcome o;
  // The stated difficulty is the block's difficulty with its last three
  // digits dropped; the full value is 57,119,871,304,635.
  const auto full = cli::calibrate(load_with("calibration-2023", "chain.difficulty", "57119871304635"));
  o.check(rel(full.revenue_usd, 3724.03) <= 0.005,
          fmt("revenue $%.2f vs $3,724.03 (%+.2f%%)", full.revenue_usd,
              100 * (full.revenue_usd / 3724.03 - 1)));
  o.check(rel(full.energy_cost_usd, 2514.35) <= 0.005,
          fmt("energy $%.2f vs $2,514.35 (%+.2f%%)", full.energy_cost_usd,
              100 * (full.energy_cost_usd / 2514.35 - 1)));
  o.check(rel(full.ev_per_th, 2.54e-11) <= 0.01, fmt("EV/TH %.4e vs 2.54e-11", full.ev_per_th));
  const auto bits = cli::calibrate(load("calibration-2023"));
  o.check(rel(bits.revenue_usd, full.revenue_usd) <= 1e-9, "same from bits 0x1704ed7f");
  const auto literal = cli::calibrate(load_with("calibration-2023", "chain.difficulty", "57119871304"));
  o.note(fmt("difficulty 57,119,871,304 taken literally gives $%.0f per machine (%.0fx)",
             literal.revenue_usd, literal.revenue_usd / full.revenue_usd));
  return o;
}

Outcome compact_bits_consistency() {
  Outcome o;
  const Target256 t = decode_compact(CompactBits{0x1704ed7f});
  const double d = difficulty_from_target(t).value;
  o.check(rel(d, 5.7119871304e10) <= 1e-4, fmt("difficulty %.10e vs stated 5.7119871304e10", d));
  o.check(rel(t.to_double(), 4.72e53) <= 1e-3, fmt("tau %.4e vs 4.72e53", t.to_double()));
  o.note(fmt("vs 5.7119871304e13: rel %.1e", rel(d, 5.7119871304e13)));
  return o;
}

Outcome cv_sizing() {
  Outcome o;
  const auto cfg = load("example-1");
  const double u = cfg.machine_hashes();
  const auto p = cfg.probability();
  const SizingResult a = cv_min_fleet(*cfg.theta, p, u);
  const SizingResult b = cv_min_fleet(0.15, p, u);
  o.check(rel(static_cast<double>(a.m_min), 28171) <= 0.02, fmt("theta 0.05: %.0f vs 28,171", a.m_min));
  o.check(rel(static_cast<double>(b.m_min), 3130) <= 0.02, fmt("theta 0.15: %.0f vs 3,130", b.m_min));
  const double scaling = rel(a.h_min * 0.05 * 0.05, b.h_min * 0.15 * 0.15);
  o.check(scaling <= 1e-12, fmt("theta^-2 scaling rel %.1e", scaling));
  return o;
}

Outcome quantile_sizing() {
  Outcome o;
  const auto cfg = load("example-2");
  const double u = cfg.machine_hashes();
  const auto p = cfg.probability();
  struct Row {
    double beta;
    std::vector<double> anchors;
  };
  for (const Row& row : {Row{0.05, {74058, 74971}}, Row{0.10, {44585}}, Row{0.15, {28870}}}) {
    const SizingResult exact = quantile_min_fleet_exact(*cfg.alpha, row.beta, p, u);
    const SizingResult normal = quantile_min_fleet_normal(*cfg.alpha, row.beta, p, u);
    const double m = static_cast<double>(exact.m_min);
    bool near = false;
    for (const double a : row.anchors) near = near || rel(m, a) <= 0.05;
    o.check(near, fmt("beta %.2f: exact %.0f vs %.0f", row.beta, m, row.anchors.front()));
    o.check(rel(static_cast<double>(normal.m_min), m) <= 0.10,
            fmt("normal %.0f within 10%%", static_cast<double>(normal.m_min)));
  }
  return o;
}

Outcome direct_upside() {
  Outcome o;
  const auto cfg = load("example-3");
  const auto r = cli::upside(cfg, *cfg.machines, 0, *cfg.alpha, std::nullopt);
  o.check(std::abs(100 * r.probability_normal - 35.32) <= 0.5,
          fmt("P %.2f%% vs 35.32%%", 100 * r.probability_normal));
  o.check(rel(r.profit_threshold_usd, 1582083) <= 0.005,
          fmt("profit threshold $%.0f vs $1,582,083 (%+.2f%%)", r.profit_threshold_usd,
              100 * (r.profit_threshold_usd / 1582083 - 1)));
  return o;
}

Outcome opportunity_costs() {
  Outcome o;
  for (const auto& [name, want] : {std::pair{"riot-2022", 2280.0}, std::pair{"marathon-2022", 1485.0}}) {
    const auto r = cli::calibrate(load(name));
    o.check(r.opportunity_cost_btc && rel(*r.opportunity_cost_btc, want) <= 0.02,
            std::string(name) + fmt(" gap %.1f BTC vs %.0f", r.opportunity_cost_btc.value_or(NAN), want));
  }
  return o;
}

Outcome pool_sizing() {
  Outcome o;
  const auto cfg = load("example-4");
  const double u = cfg.machine_hashes();
  for (const auto& [facility, want] : {std::pair{10000, 2191.0}, std::pair{5000, 1671.0}, std::pair{1000, 619.0}}) {
    const PoolProblem problem{facility * u, cfg.probability(), cfg.r_block, *cfg.pool_payout(), u};
    const AllocationResult a = quantile_min_pool_allocation_exact(problem, *cfg.alpha, *cfg.beta);
    o.check(a.feasible && rel(static_cast<double>(a.m_min), want) <= 0.10,
            fmt("%.0f machines: %.0f vs %.0f", facility, static_cast<double>(a.m_min), want));
  }
  return o;
}

Outcome pool_upside() {
  Outcome o;
  const auto cfg = load("example-5");
  const auto r = cli::upside(cfg, *cfg.machines, *cfg.pooled_machines, *cfg.alpha, cfg.pool_payout());
  o.check(rel(r.direct_revenue_usd, 2793022.50) <= 0.005,
          fmt("direct $%.2f vs $2,793,022.50 (%+.2f%%)", r.direct_revenue_usd,
              100 * (r.direct_revenue_usd / 2793022.50 - 1)));
  o.check(rel(r.pool_revenue_usd, 655107.50) <= 0.005,
          fmt("pool $%.2f vs $655,107.50 (%+.2f%%)", r.pool_revenue_usd,
              100 * (r.pool_revenue_usd / 655107.50 - 1)));
  o.check(rel(r.expected_revenue_usd, 3448130) <= 0.005,
          fmt("total $%.0f vs $3,448,130 (%+.2f%%)", r.expected_revenue_usd,
              100 * (r.expected_revenue_usd / 3448130 - 1)));

  // Direct evaluation of the pool upside formula.
  const double u = cfg.machine_hashes();
  const double p = cfg.probability().p;
  const double direct = 750.0 * u;
  const double pooled = 250.0 * u;
  const double level = direct * p + pooled * *cfg.pool_payout() / cfg.r_block;
  const double z = (*cfg.alpha - 1.0) * level / std::sqrt(direct * p * (1.0 - p));
  const double want = 0.5 * std::erfc(z / std::sqrt(2.0));
  o.check(std::abs(r.probability_normal - want) <= 1e-9 && std::abs(100 * want - 34.4) <= 0.5,
          fmt("P %.2f%% vs formula %.2f%% (reference prints 28.70%%)", 100 * r.probability_normal,
              100 * want));
  return o;
}

Outcome properties() {
  Outcome o;
  auto add = [&](const char* name, const props::Report& r) {
    o.check(r.ok(), std::string(name) + " " + std::to_string(r.cases) + " cases" +
                        (r.first_failure.empty() ? "" : " (" + r.first_failure + ")"));
  };
  add("(a) exact vs Poisson", props::exact_vs_poisson(1000, 1));
  props::Report b = props::direct_boundary(200, 2);
  const props::Report b_pool = props::pool_boundary(200, 3);
  b.cases += b_pool.cases;
  b.failures += b_pool.failures;
  if (b.first_failure.empty()) b.first_failure = b_pool.first_failure;
  add("(b) boundary-tight", b);
  add("(c) MC seeds 0-99", props::mc_agreement(100, 20000));
  add("(d) quantile round trip", props::quantile_round_trip(50));
  return o;
}

Outcome network_energy_check() {
  Outcome o;
  const auto rows = read_efficiency_table(std::filesystem::path(HASHLOTTO_TEST_DATA_DIR) /
                                          "machine_efficiency.csv");
  // Weighted mean of the published table, typed in independently.
  const double share[] = {34.31, 28.10, 11.33, 7.00, 5.18, 4.74, 2.59, 2.54, 2.40, 1.28, 0.53};
  const double eff[] = {0.031, 0.034, 0.022, 0.049, 0.054, 0.036, 0.029, 0.065, 0.093, 0.045, 0.050};
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < 11; ++i) {
    num += share[i] * eff[i] * 1000.0;
    den += share[i];
  }
  const auto base = network_energy(rows, 1.0, 4e8, kSecondsPerYear);
  o.check(std::abs(base.eta_net - 36.1) <= 0.2 && std::abs(base.eta_net - num / den) <= 1e-9,
          fmt("eta_net %.4f J/TH (weighted mean %.4f)", base.eta_net, num / den));
  bool linear = true;
  for (const double pue : {1.01, 1.1, 1.2}) {
    linear = linear && network_energy(rows, pue, 4e8, kSecondsPerYear).energy_twh == pue * base.energy_twh;
  }
  o.check(linear, "PUE linearity exact");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"calibration", per_machine_calibration},
      {"compact bits", compact_bits_consistency},
      {"CV sizing", cv_sizing},
      {"quantile sizing", quantile_sizing},
      {"direct upside", direct_upside},
      {"opportunity cost", opportunity_costs},
      {"pool sizing", pool_sizing},
      {"pool upside", pool_upside},
      {"property suite", properties},
      {"network energy", network_energy_check},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: hashlotto_acceptance [--criterion N]\n";
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::cerr << "no criterion " << only << '\n';
    return 2;
  }
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (only != 0 && n != only) continue;
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("threw: ") + e.what();
    }
    all = all && out.pass;
    std::cout << (out.pass ? "PASS" : "FAIL") << "  criterion " << n << " (" << criteria[i].first
              << "): " << out.detail << '\n';
  }
  return all ? 0 : 1;
}
