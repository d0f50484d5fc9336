#include "d2dcache/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <stdexcept>

#include "doctest.h"

using namespace d2dcache;

namespace {

SimConfig quick_config(double n_c, int k, double delta, double ratio, long requests = 20000,
                       int reps = 4) {
  const double t_bs = 1.0 / k;
  SimConfig cfg;
  cfg.params = SystemParams::cluster(30.0, n_c, 1.0, 0.02, delta, t_bs / ratio, t_bs);
  cfg.code = CodeParams{static_cast<int>(n_c), k};
  cfg.popularity = PopularityModel(1000, 0.0, 1000);
  cfg.seed = 20240917;
  cfg.measured_requests = requests;
  cfg.replications = reps;
  return cfg;
}

}  // namespace

TEST_CASE("churn reaches the stationary population") {
  const SimConfig cfg = quick_config(9.0, 3, 1.0, 10.0);
  const SimStats stats = run(cfg);
  CHECK(std::abs(stats.mean_nodes.mean - 30.0) <= 3.0 * stats.mean_nodes.se);
  CHECK(std::abs(stats.mean_storage_nodes.mean - 9.0) <= 3.0 * stats.mean_storage_nodes.se);
  CHECK(stats.requests == 4 * 20000);
}

TEST_CASE("no storage nodes: pure base-station service") {
  SimConfig cfg = quick_config(0.0, 3, 1.0, 10.0, 5000, 2);
  cfg.code = CodeParams{3, 3};  // cell-level code; the cluster holds none of it
  const SimStats stats = run(cfg);
  CHECK(stats.mean_delay.mean == doctest::Approx(3.0 * cfg.params.t_bs).epsilon(1e-12));
  CHECK(stats.mean_delay.se == doctest::Approx(0.0));
  CHECK(stats.idle_fraction.mean == 1.0);
  CHECK(stats.eligible[0] + stats.eligible[1] == 0);
}

TEST_CASE("instantaneous updates put the list share at n_c over M_c") {
  const SimConfig cfg = quick_config(9.0, 5, 0.0, 10.0, 40000, 4);
  const SimStats stats = run(cfg);
  const double se = std::max(stats.list_request_fraction.se, 1e-4);
  CHECK(std::abs(stats.list_request_fraction.mean - 0.3) <= 3.0 * se);
}

TEST_CASE("determinism: same seed, same stats") {
  const SimConfig cfg = quick_config(9.0, 3, 0.5, 10.0, 5000, 2);
  const SimStats a = run(cfg);
  const SimStats b = run(cfg);
  CHECK(a.mean_delay.mean == b.mean_delay.mean);
  CHECK(a.eta_hat.mean == b.eta_hat.mean);
  CHECK(a.idle_fraction.mean == b.idle_fraction.mean);
  CHECK(a.outcome_counts[0] == b.outcome_counts[0]);
  CHECK(a.outcome_counts[1] == b.outcome_counts[1]);

  SimConfig other = cfg;
  other.seed = cfg.seed + 1;
  const SimStats c = run(other);
  CHECK(c.mean_delay.mean != a.mean_delay.mean);
}

TEST_CASE("histogram totals match the eligible counts") {
  const SimConfig cfg = quick_config(15.0, 5, 1.0, 10.0, 10000, 2);
  const SimStats stats = run(cfg);
  for (int i : {0, 1}) {
    std::uint64_t total = 0;
    for (const std::uint64_t c : stats.outcome_counts[i]) total += c;
    CHECK(total == stats.eligible[i]);
  }
}

TEST_CASE("trace rows decompose every delay into slot and symbol charges") {
  const auto path = std::filesystem::temp_directory_path() / "d2dcache_trace_test.csv";
  SimConfig cfg = quick_config(9.0, 3, 0.5, 10.0, 3000, 1);
  cfg.trace_path = path.string();
  run(cfg);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "time,rank,hit,idle,R,attempts,symbols_d2d,delay");
  long rows = 0;
  while (std::getline(in, line)) {
    double t, delay;
    long rank;
    int hit, idle, r, attempts, symbols;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%ld,%d,%d,%d,%d,%d,%lf", &t, &rank, &hit, &idle, &r,
                        &attempts, &symbols, &delay) == 8);
    const int missing = 3 - r - symbols;
    const int a = hit && idle ? attempts : 0;
    const int b = hit ? (idle ? missing : 3 - r) : 3;
    CHECK(a >= 0);
    CHECK(a <= 3);
    CHECK(b >= 0);
    CHECK(b <= 3);
    CHECK(delay == doctest::Approx(a * cfg.params.t_d + b * cfg.params.t_bs).epsilon(1e-12));
    ++rows;
  }
  CHECK(rows == 3000);
  std::filesystem::remove(path);
}

TEST_CASE("simulation tracks the closed forms at the (15,5) working point") {
  const SimConfig cfg = quick_config(15.0, 5, 1.0, 10.0, 20000, 4);
  const SimStats stats = run(cfg);
  const AnalyticResult ana = evaluate(cfg.params, cfg.code, cfg.popularity);
  const ComparisonReport report = compare(stats, ana);
  for (const auto& row : report.rows) {
    INFO(row.name, ": sim=", row.sim, " analytic=", row.analytic, " rel=", row.rel_err,
         " se_mult=", row.se_mult);
    if (row.gating) CHECK(row.pass);
  }
  CHECK(report.pass);
}

TEST_CASE("attempt-chain recursion is exact given the observed list-size law") {
  // Two independent routes to the outcome bins: the event-driven sessions and
  // the recursion fed with the simulator's own posterior of the list size.
  // These must agree within statistical error at any update interval; the
  // analytic posterior itself carries the stationary-approximation bias (see
  // the comparison test).
  for (const auto& [delta, ratio] : std::vector<std::pair<double, double>>{{1.0, 10.0},
                                                                           {2.0, 100.0}}) {
    const SimConfig cfg = quick_config(15.0, 5, delta, ratio, 30000, 5);
    const SimStats stats = run(cfg);
    const AnalyticResult ana = evaluate(cfg.params, cfg.code, cfg.popularity);

    RequestSnapshot hybrid = ana.snapshot;
    for (int i : {0, 1}) {
      hybrid.p_x1_given_r[i].assign(stats.list_alive_given_type[i].begin(),
                                    stats.list_alive_given_type[i].end());
    }
    const D2DOutcomeDistribution chain =
        build_outcomes(hybrid, cfg.code.k, cfg.params.mu, cfg.params.t_d);
    for (int i : {0, 1}) {
      const int need = cfg.code.k - i;
      for (int b = 0; b <= need; ++b) {
        const double from_chain = b == 0 ? chain.p_fail_first[i]
                                  : b == need ? chain.p_full[i]
                                              : chain.p_partial[i][b - 1];
        const Estimate& f = stats.outcome_fractions[i][b];
        const double se =
            std::max(f.se, std::sqrt(from_chain * (1.0 - from_chain) / stats.eligible[i]));
        INFO("delta ", delta, " type ", i, " bin ", b, ": sim=", f.mean, " chain=", from_chain);
        CHECK(std::abs(f.mean - from_chain) <= 3.0 * se);
      }
    }
  }
}

TEST_CASE("outcome bins stay within 3 SE of the closed forms at 1e5 requests") {
  const SimConfig cfg = quick_config(15.0, 5, 1.0, 10.0, 10000, 10);  // 1e5 in total
  const SimStats stats = run(cfg);
  const AnalyticResult ana = evaluate(cfg.params, cfg.code, cfg.popularity);
  const ComparisonReport report = compare(stats, ana);
  for (const auto& row : report.rows) {
    if (!row.gating || row.name == "mean_delay") continue;
    INFO(row.name, ": sim=", row.sim, " analytic=", row.analytic, " se_mult=", row.se_mult);
    CHECK(row.se_mult <= 3.0);
  }
}

TEST_CASE("closed-form idle probability tracks the measured idle fraction") {
  const SimConfig cfg = quick_config(15.0, 5, 1.0, 10.0, 20000, 5);
  const SimStats stats = run(cfg);
  const AnalyticResult ana = evaluate(cfg.params, cfg.code, cfg.popularity);
  REQUIRE(cfg.params.omega * cfg.params.M_c * ana.delay.tbar_eta <= 0.1);
  CHECK(std::abs(stats.idle_fraction.mean - ana.delay.p_idle) / ana.delay.p_idle <= 0.05);
}

TEST_CASE("mean D2D symbols and channel time stay within 5% of the closed forms") {
  // The per-bin posterior bias largely cancels in the means; measured worst
  // relative gaps across the preset grids are ~1.3% for both quantities.
  for (const auto& [delta, ratio] : std::vector<std::pair<double, double>>{
           {0.25, 10.0}, {1.0, 10.0}, {4.0, 10.0}, {2.0, 100.0}}) {
    const SimConfig cfg = quick_config(15.0, 5, delta, ratio, 20000, 4);
    const SimStats stats = run(cfg);
    const AnalyticResult ana = evaluate(cfg.params, cfg.code, cfg.popularity);
    INFO("delta=", delta, " ratio=", ratio);
    CHECK(std::abs(stats.eta_hat.mean - ana.outcomes.eta) / ana.outcomes.eta <= 0.05);
    CHECK(std::abs(stats.d2d_time_hat.mean - ana.outcomes.tbar_eta) / ana.outcomes.tbar_eta <=
          0.05);
  }
}

TEST_CASE("list-origin share and list size track the closed forms") {
  // The stationary approximation behind Pr{R=1|X1} biases the analytic share
  // by about +2% relative at this point (measured gap ~6e-3 absolute), so the
  // check pins that scale rather than a pure sampling band.
  const SimConfig cfg = quick_config(15.0, 5, 1.0, 10.0, 20000, 5);
  const SimStats stats = run(cfg);
  const AnalyticResult ana = evaluate(cfg.params, cfg.code, cfg.popularity);
  CHECK(std::abs(stats.list_request_fraction.mean - ana.delay.p_s) <= 0.01);
  // The update-interval chain weights intervals by "at least one request"
  // rather than by request count, which under-represents crowded clusters;
  // measured bias of the mean list size at this point: +0.094 (about +1%).
  CHECK(std::abs(stats.mean_list_alive.mean - ana.snapshot.mean_x1) <= 0.15);
}

TEST_CASE("compare rejects mismatched points and flags corruption") {
  const SimConfig cfg = quick_config(9.0, 3, 0.5, 10.0, 2000, 2);
  const SimStats stats = run(cfg);

  SUBCASE("mismatched parameters") {
    const SimConfig other = quick_config(15.0, 5, 0.5, 10.0);
    const AnalyticResult ana = evaluate(other.params, other.code, other.popularity);
    CHECK_THROWS_AS(compare(stats, ana), std::invalid_argument);
  }

  SUBCASE("identical synthetic inputs give a zero-error report") {
    AnalyticResult ana = evaluate(cfg.params, cfg.code, cfg.popularity);
    SimStats synthetic = stats;
    synthetic.mean_delay = {ana.delay.tbar_dw, 1e-6};
    synthetic.list_request_fraction = {ana.delay.p_s, 1e-6};
    synthetic.idle_fraction = {ana.delay.p_idle, 1e-6};
    synthetic.eta_hat = {ana.outcomes.eta, 1e-6};
    for (int i : {0, 1}) {
      const int need = 3 - i;
      for (int b = 0; b <= need; ++b) {
        double v;
        if (b == 0) v = ana.outcomes.p_fail_first[i];
        else if (b == need) v = ana.outcomes.p_full[i];
        else v = ana.outcomes.p_partial[i][b - 1];
        synthetic.outcome_fractions[i][b] = {v, 1e-6};
      }
    }
    const ComparisonReport report = compare(synthetic, ana);
    CHECK(report.pass);
    for (const auto& row : report.rows) CHECK(std::abs(row.rel_err) < 1e-9);
  }

  SUBCASE("corrupted analytic value is flagged") {
    AnalyticResult ana = evaluate(cfg.params, cfg.code, cfg.popularity);
    ana.delay.tbar_dw *= 1.5;
    const ComparisonReport report = compare(stats, ana);
    CHECK_FALSE(report.pass);
  }
}

TEST_CASE("invalid configurations are rejected up front") {
  SimConfig cfg = quick_config(9.0, 3, 0.5, 10.0);
  cfg.replications = 0;
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);
  cfg = quick_config(9.0, 3, 0.5, 10.0);
  cfg.params.omega = -1.0;
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);
}
