#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "d2dcache/delay.hpp"
#include "d2dcache/params.hpp"
#include "d2dcache/popularity.hpp"

namespace d2dcache {

struct SimConfig {
  SystemParams params;
  CodeParams code;
  PopularityModel popularity;
  std::uint64_t seed = 1;
  long warmup_requests = 2000;  // measurement also waits for t >= 10 M_c / lambda
  long measured_requests = 100000;
  int replications = 10;
  int threads = 0;                // 0 = hardware concurrency
  std::string trace_path;         // per-request CSV of replication 0; empty = off

  bool operator==(const SimConfig& o) const {
    return params == o.params && code == o.code && popularity == o.popularity;
  }
};

struct Estimate {
  double mean = 0.0;
  double se = 0.0;  // standard error across replications
};

struct SimStats {
  Estimate mean_delay;
  Estimate eta_hat;                 // symbols over D2D per D2D-eligible request
  Estimate d2d_time_hat;            // D2D channel time per D2D-eligible request
  Estimate idle_fraction;           // channel idle at request instants
  Estimate list_request_fraction;   // requests issued by DS-list members
  Estimate mean_list_alive;         // DS-list nodes alive at request instants
  Estimate mean_nodes;              // time-averaged population
  Estimate mean_storage_nodes;
  // Outcome of the D2D phase per request type: bin j < k-i holds "j symbols
  // then failure"; bin k-i is full recovery.
  std::array<std::vector<std::uint64_t>, 2> outcome_counts;
  std::array<std::vector<Estimate>, 2> outcome_fractions;
  // Empirical law of the alive DS-list size seen by D2D-eligible requests of
  // each type (pooled over replications).
  std::array<std::vector<double>, 2> list_alive_given_type;
  std::array<std::uint64_t, 2> eligible = {0, 0};
  std::uint64_t requests = 0;
  SimConfig config;  // echo of the run
};

/// Runs warmup + measured requests for each replication (replications execute
/// in parallel; aggregation is order-independent). Identical (config, seed)
/// yield identical SimStats.
SimStats run(const SimConfig& config);

struct ComparisonRow {
  std::string name;
  double sim = 0.0;
  double analytic = 0.0;
  double rel_err = 0.0;
  double se_mult = 0.0;
  bool gating = false;  // contributes to the overall verdict
  bool pass = true;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  bool pass = true;
};

/// Per-quantity relative error and SE multiples. The verdict requires the
/// mean delay within 5% of Tbar_dw and every outcome bin within 3 SE; the
/// remaining quantities are reported without gating. Rejects stats and
/// analytics from different parameter points.
ComparisonReport compare(const SimStats& stats, const AnalyticResult& analytic);

}  // namespace d2dcache
