#include "hashlotto/cli.hpp"

#include "hashlotto/error.hpp"
#include "hashlotto/risk_direct.hpp"
#include "hashlotto/risk_pool.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

namespace hashlotto::cli {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string money(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void kv_line(std::ostream& out, std::string_view key, const std::string& value) {
  out << key;
  for (std::size_t i = key.size(); i < 26; ++i) out << ' ';
  out << value << '\n';
}

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(Errc::ConfigError, std::string(what) + ": not a number '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// calibrate

CalibrationReport calibrate(const ScenarioConfig& cfg) {
  CalibrationReport r;
  const Target256 target = cfg.target();
  const HashProbability p = success_probability(target);
  if (cfg.bits) r.bits = format_compact(*cfg.bits);
  r.target_hex = target.hex();
  r.target = target.to_double();
  r.difficulty = difficulty_from_target(target, cfg.difficulty_one()).value;
  r.probability = p.p;
  r.ev_per_hash = ev_per_hash(p, cfg.r_block);
  r.ev_per_th = ev_per_terahash(p, cfg.r_block);
  r.characteristic_hashes = characteristic_hash_count(p, cfg.r_block);
  r.machine_hashes = cfg.machine_hashes();

  const FleetPlan one{1, cfg.horizon_s, 0};
  const MarketParams mkt = cfg.market();
  r.revenue_usd = expected_revenue(one, cfg.hardware, mkt, p);
  r.energy_cost_usd = energy_cost(one, cfg.hardware, mkt);
  r.margin_usd = r.revenue_usd - r.energy_cost_usd;

  if (cfg.machines && cfg.realized_btc) {
    const FleetPlan fleet{*cfg.machines, cfg.horizon_s, 0};
    r.fleet_expected_btc = expected_btc(fleet, cfg.hardware, p, cfg.r_block);
    r.fleet_realized_btc = *cfg.realized_btc;
    r.opportunity_cost_btc = opportunity_cost(*cfg.realized_btc, fleet, cfg.hardware, p, cfg.r_block);
  }
  return r;
}

namespace {

void print_calibration_text(std::ostream& out, const CalibrationReport& r) {
  if (!r.bits.empty()) kv_line(out, "bits", r.bits);
  kv_line(out, "target", "0x" + r.target_hex);
  kv_line(out, "target_approx", g10(r.target));
  kv_line(out, "difficulty", g10(r.difficulty));
  kv_line(out, "success_probability", g10(r.probability));
  kv_line(out, "ev_per_hash_btc", g10(r.ev_per_hash));
  kv_line(out, "ev_per_th_btc", g10(r.ev_per_th));
  kv_line(out, "characteristic_hashes", g10(r.characteristic_hashes));
  kv_line(out, "machine_hashes", g10(r.machine_hashes));
  kv_line(out, "revenue_usd", money(r.revenue_usd));
  kv_line(out, "energy_cost_usd", money(r.energy_cost_usd));
  kv_line(out, "margin_usd", money(r.margin_usd));
  if (r.opportunity_cost_btc) {
    kv_line(out, "fleet_expected_btc", g10(*r.fleet_expected_btc));
    kv_line(out, "fleet_realized_btc", g10(*r.fleet_realized_btc));
    kv_line(out, "opportunity_cost_btc", g10(*r.opportunity_cost_btc));
  }
}

void print_calibration_csv(std::ostream& out, const CalibrationReport& r) {
  out << "bits,target,difficulty,success_probability,ev_per_hash_btc,ev_per_th_btc,"
         "characteristic_hashes,machine_hashes,revenue_usd,energy_cost_usd,margin_usd,"
         "fleet_expected_btc,fleet_realized_btc,opportunity_cost_btc\n";
  auto opt = [](const std::optional<double>& v) { return v ? g17(*v) : std::string(); };
  out << r.bits << ",0x" << r.target_hex << ',' << g17(r.difficulty) << ',' << g17(r.probability)
      << ',' << g17(r.ev_per_hash) << ',' << g17(r.ev_per_th) << ','
      << g17(r.characteristic_hashes) << ',' << g17(r.machine_hashes) << ','
      << g17(r.revenue_usd) << ',' << g17(r.energy_cost_usd) << ',' << g17(r.margin_usd) << ','
      << opt(r.fleet_expected_btc) << ',' << opt(r.fleet_realized_btc) << ','
      << opt(r.opportunity_cost_btc) << '\n';
}

}  // namespace

// ---------------------------------------------------------------------------
// size

SizeMode parse_size_mode(std::string_view text) {
  if (text == "cv") return SizeMode::Cv;
  if (text == "quantile-normal") return SizeMode::QuantileNormal;
  if (text == "quantile-exact") return SizeMode::QuantileExact;
  throw Error(Errc::ConfigError, "unknown mode '" + std::string(text) +
                                     "' (cv, quantile-normal, quantile-exact)");
}

std::string_view size_mode_name(SizeMode mode) {
  switch (mode) {
    case SizeMode::Cv: return "cv";
    case SizeMode::QuantileNormal: return "quantile-normal";
    case SizeMode::QuantileExact: return "quantile-exact";
  }
  return "?";
}

SizeRow run_size(const ScenarioConfig& cfg, const SizeRequest& request,
                 std::optional<double> r_pool) {
  const HashProbability p = cfg.probability();
  const double mh = cfg.machine_hashes();
  auto need = [](const std::optional<double>& v, const char* name) {
    if (!v) {
      throw Error(Errc::ConfigError, std::string(name) + " missing: pass --" + name +
                                         " or set risk." + name);
    }
    return *v;
  };

  SizeRow row;
  row.request = request;
  if (!request.pool) {
    try {
      SizingResult s;
      switch (request.mode) {
        case SizeMode::Cv: s = cv_min_fleet(need(request.theta, "theta"), p, mh); break;
        case SizeMode::QuantileNormal:
          s = quantile_min_fleet_normal(need(request.alpha, "alpha"), need(request.beta, "beta"), p, mh);
          break;
        case SizeMode::QuantileExact:
          s = quantile_min_fleet_exact(need(request.alpha, "alpha"), need(request.beta, "beta"), p, mh);
          break;
      }
      row.m_min = s.m_min;
      row.n_min_hashes = s.h_min;
    } catch (const Error& e) {
      if (e.code() != Errc::SearchBoundsExceeded) throw;
      row.feasible = false;
    }
    return row;
  }

  if (!request.facility_machines) {
    throw Error(Errc::ConfigError,
                "facility_machines missing: pass --facility-machines or set risk.facility_machines");
  }
  if (!r_pool) {
    throw Error(Errc::ConfigError,
                "pool payout missing: pass --r-pool-paper, --r-pool-corrected or --r-pool, or set pool.*");
  }
  const PoolProblem problem{static_cast<double>(*request.facility_machines) * mh, p, cfg.r_block,
                            *r_pool, mh};
  AllocationResult a;
  switch (request.mode) {
    case SizeMode::Cv: a = cv_min_pool_allocation(problem, need(request.theta, "theta")); break;
    case SizeMode::QuantileNormal:
      a = quantile_min_pool_allocation_normal(problem, need(request.alpha, "alpha"),
                                              need(request.beta, "beta"));
      break;
    case SizeMode::QuantileExact:
      a = quantile_min_pool_allocation_exact(problem, need(request.alpha, "alpha"),
                                             need(request.beta, "beta"));
      break;
  }
  row.m_min = a.m_min;
  row.n_min_hashes = a.n_min;
  row.feasible = a.feasible;
  return row;
}

std::string format_size_row(const SizeRow& row) {
  const auto& q = row.request;
  auto opt = [](const std::optional<double>& v) { return v ? g17(*v) : std::string(); };
  std::string line(size_mode_name(q.mode));
  line += ',' + opt(q.theta) + ',' + opt(q.alpha) + ',' + opt(q.beta) + ',';
  if (q.pool && q.facility_machines) line += std::to_string(*q.facility_machines);
  line += ',' + std::to_string(row.m_min) + ',' + g17(row.n_min_hashes) + ',' +
          (row.feasible ? "true" : "false");
  return line;
}

SizeRequest parse_size_row(std::string_view line) {
  const auto fields = split(line, ',');
  if (fields.size() != 8) throw Error(Errc::ParseError, "size row needs 8 fields");
  SizeRequest q;
  q.mode = parse_size_mode(fields[0]);
  if (!fields[1].empty()) q.theta = parse_double(fields[1], "theta");
  if (!fields[2].empty()) q.alpha = parse_double(fields[2], "alpha");
  if (!fields[3].empty()) q.beta = parse_double(fields[3], "beta");
  if (!fields[4].empty()) {
    q.pool = true;
    q.facility_machines = static_cast<std::int64_t>(parse_double(fields[4], "facility_machines"));
  }
  return q;
}

// ---------------------------------------------------------------------------
// upside

UpsideReport upside(const ScenarioConfig& cfg, std::int64_t machines, std::int64_t pooled,
                    double alpha, std::optional<double> r_pool) {
  if (machines <= 0) throw Error(Errc::ConfigError, "machines must be > 0");
  if (pooled < 0 || pooled > machines) {
    throw Error(Errc::ConfigError, "pooled machines must lie in [0, machines]");
  }
  if (!(alpha > 0.0)) throw Error(Errc::ConfigError, "alpha must be > 0");
  if (pooled > 0 && !r_pool) {
    throw Error(Errc::ConfigError, "pool payout missing for a pooled split");
  }
  const HashProbability p = cfg.probability();
  const double mh = cfg.machine_hashes();
  MarketParams mkt = cfg.market();
  mkt.r_pool = r_pool.value_or(0.0);

  UpsideReport r;
  r.machines = machines;
  r.pooled_machines = pooled;
  r.alpha = alpha;
  r.direct_revenue_usd =
      expected_revenue(FleetPlan{machines - pooled, cfg.horizon_s, 0}, cfg.hardware, mkt, p);
  r.pool_revenue_usd = cfg.p_btc * mkt.r_pool * static_cast<double>(pooled) * mh;
  r.expected_revenue_usd = r.direct_revenue_usd + r.pool_revenue_usd;
  r.energy_cost_usd = energy_cost(FleetPlan{machines, cfg.horizon_s, pooled}, cfg.hardware, mkt);
  r.revenue_threshold_usd = alpha * r.expected_revenue_usd;
  r.profit_threshold_usd = r.revenue_threshold_usd - r.energy_cost_usd;

  const PoolSplit split{static_cast<double>(machines) * mh, static_cast<double>(pooled) * mh,
                        mkt.r_pool, cfg.r_block};
  r.probability_normal = upside_probability_pool(split, p, alpha);
  r.probability_exact = upside_probability_pool_exact(split, p, alpha);
  const double direct = split.h_total - split.n_pooled;
  r.exact_regime = direct > 0.0 ? resolve_regime(TailQuery{direct, p.p, 1.0}) : TailRegime::Auto;
  return r;
}

// ---------------------------------------------------------------------------
// verify

namespace {

struct Claim {
  std::string name;
  // Builds (n, p, k) for a given alpha; n == 0 means X' is identically zero.
  std::function<TailQuery(double alpha)> query;
  double alpha = 0.0;
  McMode mode = McMode::Auto;
};

double tail_or_degenerate(const TailQuery& q) {
  if (q.k <= 0.0) return 0.0;
  if (q.n <= 0.0) return 1.0;
  return binomial_tail_lt(q);
}

std::vector<Claim> build_claims(VerifySuite suite) {
  std::vector<Claim> claims;
  const bool direct = suite != VerifySuite::Pool;
  const bool pool = suite != VerifySuite::Direct;

  auto direct_claim = [](double n, double p, TailRegime regime) {
    return [=](double alpha) { return TailQuery{n, p, alpha * n * p, regime}; };
  };

  if (direct) {
    claims.push_back({"direct/tail-n10-p0.5", direct_claim(10, 0.5, TailRegime::ExactSum), 1.0});
    claims.push_back({"direct/tail-n1e4-p1e-3", direct_claim(1e4, 1e-3, TailRegime::ExactSum), 0.9});
    const double u = 1e4;
    const double p = 1e-3;
    const SizingResult s = quantile_min_fleet_exact(0.9, 0.1, HashProbability{p}, u);
    claims.push_back({"direct/sizing-at-min-" + std::to_string(s.m_min),
                      direct_claim(static_cast<double>(s.m_min) * u, p, TailRegime::ExactSum), 0.9});
    if (s.m_min > 1) {
      claims.push_back({"direct/sizing-below-min-" + std::to_string(s.m_min - 1),
                        direct_claim(static_cast<double>(s.m_min - 1) * u, p, TailRegime::ExactSum),
                        0.9});
    }
    claims.push_back({"direct/upside-n5e4-alpha1.1", direct_claim(5e4, p, TailRegime::ExactSum), 1.1});
    claims.push_back({"direct/poisson-lambda14.1",
                      direct_claim(1.41e25, 1e-24, TailRegime::PoissonGamma), 1.1, McMode::Poisson});
  }
  if (pool) {
    const PoolProblem problem{1e5, HashProbability{1e-3}, 1.0, 2e-3, 1e3};
    auto pool_claim = [problem](double n_pooled) {
      return [problem, n_pooled](double alpha) {
        const PoolSplit s = problem.split(n_pooled);
        return TailQuery{s.h_total - s.n_pooled, problem.p.p,
                         pool_shortfall_threshold(s, problem.p, alpha), TailRegime::ExactSum};
      };
    };
    const AllocationResult exact = quantile_min_pool_allocation_exact(problem, 0.9, 0.1);
    claims.push_back({"pool/alloc-at-min-" + std::to_string(exact.m_min), pool_claim(exact.n_min), 0.9});
    if (exact.m_min > 0) {
      claims.push_back({"pool/alloc-below-min-" + std::to_string(exact.m_min - 1),
                        pool_claim(exact.n_min - problem.machine_hashes), 0.9});
    }
    const AllocationResult normal = quantile_min_pool_allocation_normal(problem, 0.9, 0.1);
    claims.push_back({"pool/normal-alloc-" + std::to_string(normal.m_min),
                      pool_claim(static_cast<double>(normal.m_min) * problem.machine_hashes), 0.9});
    claims.push_back({"pool/no-pooling", pool_claim(0.0), 0.9});
    claims.push_back({"pool/fully-pooled", pool_claim(problem.h_total), 0.9});
  }
  return claims;
}

}  // namespace

std::vector<VerifyOutcome> run_verify(VerifySuite suite, std::uint64_t seed, std::uint64_t trials,
                                      bool expect_fail, unsigned threads) {
  if (trials < kMcMinTrials) {
    throw Error(Errc::TrialsTooSmall, "need at least " + std::to_string(kMcMinTrials) + " trials");
  }
  std::vector<VerifyOutcome> outcomes;
  std::uint64_t stream = 0;
  for (const auto& claim : build_claims(suite)) {
    VerifyOutcome o;
    o.name = claim.name;
    const TailQuery analytic_q = claim.query(claim.alpha);
    o.analytic = tail_or_degenerate(analytic_q);

    const TailQuery sampled_q = claim.query(expect_fail ? claim.alpha + 0.5 : claim.alpha);
    if (sampled_q.k <= 0.0 || sampled_q.n <= 0.0) {
      // No randomness left: revenue is fixed, so the event is decided outright.
      o.mc = tail_or_degenerate(sampled_q);
    } else {
      const McEstimate est = mc_tail_estimate(
          sampled_q, McConfig{trials, seed + 0x1000 * stream, claim.mode, threads});
      o.mc = est.estimate;
      o.std_error = est.std_error;
    }
    ++stream;
    const double se = std::sqrt(o.analytic * (1.0 - o.analytic) / static_cast<double>(trials));
    o.passed = se > 0.0 ? std::abs(o.mc - o.analytic) <= 4.0 * se : o.mc == o.analytic;
    outcomes.push_back(o);
  }
  return outcomes;
}

// ---------------------------------------------------------------------------
// command line

namespace {

struct ScenarioOptions {
  std::string scenario;
  std::string config;
  std::vector<std::string> sets;

  void attach(CLI::App* sub) {
    sub->add_option("--scenario", scenario, "named scenario under the scenario directory");
    sub->add_option("--config", config, "scenario file path");
    sub->add_option("--set", sets, "override a scenario key: key=value (empty value removes it)");
  }

  ScenarioConfig load() const {
    if (!scenario.empty() && !config.empty()) {
      throw Error(Errc::FlagConflict, "--scenario and --config are mutually exclusive");
    }
    KeyValues kv = load_key_values(!config.empty() ? std::filesystem::path(config)
                                                   : scenario_path(scenario.empty() ? "calibration-2023"
                                                                                    : scenario));
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw Error(Errc::ConfigError, "--set needs key=value: " + s);
      const std::string key = s.substr(0, eq);
      const std::string value = s.substr(eq + 1);
      if (value.empty()) {
        kv.erase(key);
      } else {
        kv[key] = value;
      }
    }
    return scenario_from_key_values(kv);
  }
};

struct PoolPayoutOptions {
  bool paper = false;
  bool corrected = false;
  std::optional<double> value;

  void attach(CLI::App* sub) {
    sub->add_flag("--r-pool-paper", paper, "pool payout preset 1.78e-22 BTC/hash");
    sub->add_flag("--r-pool-corrected", corrected, "pool payout from Riot 2022 data");
    sub->add_option("--r-pool", value, "pool payout, BTC per hash");
  }

  std::optional<double> resolve(const ScenarioConfig& cfg) const {
    const int count = static_cast<int>(paper) + static_cast<int>(corrected) +
                      static_cast<int>(value.has_value());
    if (count > 1) throw Error(Errc::FlagConflict, "give at most one pool payout flag");
    if (paper) return pool_preset_value("paper");
    if (corrected) return pool_preset_value("corrected");
    if (value) return value;
    return cfg.pool_payout();
  }
};

struct Sweep {
  std::string param;
  std::vector<double> values;
};

Sweep parse_sweep(std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos) throw Error(Errc::ConfigError, "--sweep needs param=lo:hi:step");
  Sweep sw;
  sw.param = std::string(spec.substr(0, eq));
  if (sw.param != "theta" && sw.param != "alpha" && sw.param != "beta" &&
      sw.param != "facility_machines") {
    throw Error(Errc::ConfigError, "cannot sweep '" + sw.param + "'");
  }
  const auto parts = split(spec.substr(eq + 1), ':');
  if (parts.size() != 3) throw Error(Errc::ConfigError, "--sweep needs param=lo:hi:step");
  const double lo = parse_double(parts[0], "sweep lo");
  const double hi = parse_double(parts[1], "sweep hi");
  const double step = parse_double(parts[2], "sweep step");
  if (!(step > 0.0) || hi < lo) throw Error(Errc::ConfigError, "--sweep needs lo <= hi and step > 0");
  const auto count = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::int64_t i = 0; i < count; ++i) sw.values.push_back(lo + static_cast<double>(i) * step);
  return sw;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::InfeasibleAllocation:
    case Errc::SearchBoundsExceeded: return kExitFailure;
    default: return kExitConfig;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ex ante proof-of-work mining economics and risk sizing"};
  app.name("hashlotto");
  app.require_subcommand(1);

  // calibrate
  ScenarioOptions cal_opts;
  std::string cal_format = "text";
  auto* cal = app.add_subcommand("calibrate", "target, hash price and per-machine economics");
  cal_opts.attach(cal);
  cal->add_option("--format", cal_format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

  // size
  ScenarioOptions size_opts;
  PoolPayoutOptions size_pool;
  std::string size_mode = "quantile-exact";
  bool size_pooled = false;
  std::optional<double> size_theta, size_alpha, size_beta;
  std::optional<std::int64_t> size_facility;
  std::string size_sweep;
  auto* size = app.add_subcommand("size", "minimum fleet or pool allocation as CSV");
  size_opts.attach(size);
  size_pool.attach(size);
  size->add_option("--mode", size_mode, "cv, quantile-normal or quantile-exact");
  size->add_flag("--pool", size_pooled, "size the pooled share of a facility");
  size->add_option("--theta", size_theta, "CV threshold");
  size->add_option("--alpha", size_alpha, "revenue floor as a fraction of the mean");
  size->add_option("--beta", size_beta, "tolerated shortfall probability");
  size->add_option("--facility-machines", size_facility, "facility size for --pool");
  size->add_option("--sweep", size_sweep, "param=lo:hi:step, one row per grid point");

  // upside
  ScenarioOptions up_opts;
  PoolPayoutOptions up_pool;
  std::optional<std::int64_t> up_machines, up_pooled;
  std::optional<double> up_alpha;
  auto* up = app.add_subcommand("upside", "probability of beating alpha times expected revenue");
  up_opts.attach(up);
  up_pool.attach(up);
  up->add_option("--machines", up_machines, "fleet size");
  up->add_option("--pooled", up_pooled, "machines in the pool");
  up->add_option("--alpha", up_alpha, "multiple of expected revenue");

  // verify
  std::uint64_t ver_seed = 42;
  std::uint64_t ver_trials = 1'000'000;
  std::string ver_suite = "all";
  bool ver_expect_fail = false;
  unsigned ver_threads = 1;
  auto* ver = app.add_subcommand("verify", "Monte Carlo check of the analytic tails");
  ver->add_option("--seed", ver_seed, "base seed");
  ver->add_option("--trials", ver_trials, "samples per check");
  ver->add_option("--suite", ver_suite, "direct, pool or all")
      ->check(CLI::IsMember({"direct", "pool", "all"}));
  ver->add_flag("--expect-fail", ver_expect_fail, "sample with alpha + 0.5 (harness self-test)");
  ver->add_option("--threads", ver_threads, "worker threads; results do not depend on it");

  // energy
  std::string en_table;
  double en_pue = 1.0;
  std::optional<double> en_hashrate;
  double en_horizon = kSecondsPerYear;
  auto* en = app.add_subcommand("energy", "network efficiency and energy from a machine table");
  en->add_option("--table", en_table, "CSV: model,dominance_pct,eff_j_per_gh")->required();
  en->add_option("--pue", en_pue, "power usage effectiveness");
  en->add_option("--net-hashrate", en_hashrate, "network hash rate, TH/s");
  en->add_option("--horizon-s", en_horizon, "horizon in seconds");

  std::vector<std::string> argv_storage{"hashlotto"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (cal->parsed()) {
      const auto report = calibrate(cal_opts.load());
      if (cal_format == "csv") {
        print_calibration_csv(out, report);
      } else {
        print_calibration_text(out, report);
      }
      return kExitOk;
    }

    if (size->parsed()) {
      const SizeMode mode = parse_size_mode(size_mode);
      const bool quantile = mode != SizeMode::Cv;
      if (!quantile && (size_alpha || size_beta)) {
        throw Error(Errc::FlagConflict, "--alpha/--beta do not apply to --mode cv");
      }
      if (quantile && size_theta) {
        throw Error(Errc::FlagConflict, "--theta applies only to --mode cv");
      }
      if (size_facility && !size_pooled) {
        throw Error(Errc::FlagConflict, "--facility-machines needs --pool");
      }
      const ScenarioConfig cfg = size_opts.load();
      const auto r_pool = size_pool.resolve(cfg);

      SizeRequest base;
      base.mode = mode;
      base.pool = size_pooled;
      if (!quantile) base.theta = size_theta ? size_theta : cfg.theta;
      if (quantile) {
        base.alpha = size_alpha ? size_alpha : cfg.alpha;
        base.beta = size_beta ? size_beta : cfg.beta;
      }
      if (size_pooled) base.facility_machines = size_facility ? size_facility : cfg.facility_machines;

      std::vector<SizeRequest> requests;
      if (size_sweep.empty()) {
        requests.push_back(base);
      } else {
        const Sweep sw = parse_sweep(size_sweep);
        const bool applies = (sw.param == "theta" && !quantile) ||
                             ((sw.param == "alpha" || sw.param == "beta") && quantile) ||
                             (sw.param == "facility_machines" && size_pooled);
        if (!applies) {
          throw Error(Errc::FlagConflict, "--sweep " + sw.param + " does not apply to this mode");
        }
        const bool explicit_flag = (sw.param == "theta" && size_theta) ||
                                   (sw.param == "alpha" && size_alpha) ||
                                   (sw.param == "beta" && size_beta) ||
                                   (sw.param == "facility_machines" && size_facility);
        if (explicit_flag) {
          throw Error(Errc::FlagConflict, "--sweep " + sw.param + " conflicts with its flag");
        }
        for (const double v : sw.values) {
          SizeRequest q = base;
          if (sw.param == "theta") q.theta = v;
          if (sw.param == "alpha") q.alpha = v;
          if (sw.param == "beta") q.beta = v;
          if (sw.param == "facility_machines") q.facility_machines = std::llround(v);
          requests.push_back(q);
        }
      }

      // Rows are computed before printing so a bad grid point leaves no
      // partial CSV behind.
      std::vector<SizeRow> rows;
      bool all_feasible = true;
      for (const auto& q : requests) {
        rows.push_back(run_size(cfg, q, r_pool));
        all_feasible = all_feasible && rows.back().feasible;
      }
      out << kSizeCsvHeader << '\n';
      for (const auto& row : rows) out << format_size_row(row) << '\n';
      return all_feasible ? kExitOk : kExitFailure;
    }

    if (up->parsed()) {
      const ScenarioConfig cfg = up_opts.load();
      const std::int64_t machines = up_machines ? *up_machines : cfg.machines.value_or(0);
      const std::int64_t pooled = up_pooled ? *up_pooled : cfg.pooled_machines.value_or(0);
      if (!up_alpha && !cfg.alpha) throw Error(Errc::ConfigError, "alpha missing: pass --alpha");
      const double alpha = up_alpha ? *up_alpha : *cfg.alpha;
      const auto r = upside(cfg, machines, pooled, alpha, up_pool.resolve(cfg));
      kv_line(out, "machines", std::to_string(r.machines));
      kv_line(out, "pooled_machines", std::to_string(r.pooled_machines));
      kv_line(out, "alpha", g10(r.alpha));
      kv_line(out, "direct_revenue_usd", money(r.direct_revenue_usd));
      kv_line(out, "pool_revenue_usd", money(r.pool_revenue_usd));
      kv_line(out, "expected_revenue_usd", money(r.expected_revenue_usd));
      kv_line(out, "energy_cost_usd", money(r.energy_cost_usd));
      kv_line(out, "revenue_threshold_usd", money(r.revenue_threshold_usd));
      kv_line(out, "profit_threshold_usd", money(r.profit_threshold_usd));
      kv_line(out, "probability_normal", g10(r.probability_normal));
      kv_line(out, "probability_exact", g10(r.probability_exact));
      kv_line(out, "exact_regime", regime_name(r.exact_regime));
      return kExitOk;
    }

    if (ver->parsed()) {
      const VerifySuite suite = ver_suite == "direct" ? VerifySuite::Direct
                                : ver_suite == "pool" ? VerifySuite::Pool
                                                      : VerifySuite::All;
      const auto outcomes = run_verify(suite, ver_seed, ver_trials, ver_expect_fail, ver_threads);
      bool ok = true;
      for (const auto& o : outcomes) {
        ok = ok && o.passed;
        out << (o.passed ? "PASS " : "FAIL ") << o.name << " analytic=" << g10(o.analytic)
            << " mc=" << g10(o.mc) << " se=" << g10(o.std_error) << '\n';
      }
      out << (ok ? "all checks within 4 standard errors" : "verification failed") << '\n';
      return ok ? kExitOk : kExitFailure;
    }

    if (en->parsed()) {
      const auto table = read_efficiency_table(std::filesystem::path(en_table));
      const auto result = network_energy(table, en_pue, en_hashrate.value_or(0.0), en_horizon);
      kv_line(out, "rows", std::to_string(table.size()));
      kv_line(out, "pue", g10(en_pue));
      kv_line(out, "eta_net_j_per_th", g10(result.eta_net));
      kv_line(out, "facility_j_per_th", g10(en_pue * result.eta_net));
      if (en_hashrate) kv_line(out, "energy_twh", g10(result.energy_twh));
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitConfig;
}

}  // namespace hashlotto::cli
