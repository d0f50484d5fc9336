#include "d2dcache/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>
#include <thread>

namespace d2dcache {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One purpose-bound random stream. Uniform and exponential draws are mapped
// from raw 64-bit output so that results depend only on (seed, rep, purpose).
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t rep, std::uint64_t purpose)
      : eng_(splitmix64(seed ^ splitmix64(rep * 131 + purpose))) {}

  double uniform01() {  // in (0, 1]
    return ((eng_() >> 11) + 1.0) * 0x1.0p-53;
  }
  double exponential(double rate) { return -std::log(uniform01()) / rate; }
  std::uint32_t index(std::uint32_t n) {  // uniform in [0, n)
    return static_cast<std::uint32_t>(eng_() % n);
  }

 private:
  std::mt19937_64 eng_;
};

enum Purpose : std::uint64_t {
  kRegularArrivals = 1,
  kStorageArrivals,
  kLifetimes,
  kRequestBudget,
  kRequesterChoice,
  kFileRank,
  kD2DPick,
};

struct Node {
  double depart = 0.0;
  std::uint32_t pos = 0;  // index into the present list
  bool storage = false;
  bool listed = false;
};

struct DepartureEvent {
  double time;
  std::uint32_t slot;
  bool operator>(const DepartureEvent& o) const { return time > o.time; }
};

constexpr std::size_t kListHistCap = 96;

// Raw sums of one replication.
struct RepResult {
  double delay_sum = 0.0;
  std::uint64_t requests = 0;
  std::uint64_t idle_count = 0;
  std::uint64_t list_count = 0;
  std::uint64_t list_alive_sum = 0;
  std::array<std::vector<std::uint64_t>, 2> outcomes;
  std::array<std::vector<std::uint64_t>, 2> list_alive_hist;  // at eligible requests
  std::array<std::uint64_t, 2> eligible = {0, 0};
  std::uint64_t symbols = 0;
  double busy_sum = 0.0;
  double node_area = 0.0;
  double storage_area = 0.0;
  double span = 0.0;
};

class Replication {
 public:
  Replication(const SimConfig& cfg, int rep, const std::vector<double>& zipf_cdf,
              std::FILE* trace)
      : cfg_(cfg),
        arrivals_regular_(cfg.seed, rep, kRegularArrivals),
        arrivals_storage_(cfg.seed, rep, kStorageArrivals),
        lifetimes_(cfg.seed, rep, kLifetimes),
        request_budget_(cfg.seed, rep, kRequestBudget),
        requester_choice_(cfg.seed, rep, kRequesterChoice),
        file_rank_(cfg.seed, rep, kFileRank),
        d2d_pick_(cfg.seed, rep, kD2DPick),
        zipf_cdf_(zipf_cdf),
        trace_(trace) {
    const SystemParams& p = cfg.params;
    refresh_per_request_ = p.delta < 1e-9;
    // No storage nodes means nothing is cached in the cluster.
    effective_f_ = p.n_c > 0.0 ? cfg.popularity.cached_files() : 0;
    for (int i : {0, 1}) {
      const int bins = std::max(0, cfg.code.k - i) + 1;
      result_.outcomes[i].assign(bins, 0);
      result_.list_alive_hist[i].assign(kListHistCap, 0);
    }
  }

  RepResult run();

 private:
  double exp_or_inf(Stream& s, double rate) {
    return rate > 0.0 ? s.exponential(rate) : kInf;
  }

  void add_node(double now, bool storage) {
    std::uint32_t slot;
    if (!free_slots_.empty()) {
      slot = free_slots_.back();
      free_slots_.pop_back();
    } else {
      slot = static_cast<std::uint32_t>(nodes_.size());
      nodes_.emplace_back();
    }
    Node& n = nodes_[slot];
    n.depart = now + lifetimes_.exponential(cfg_.params.mu);
    n.storage = storage;
    n.listed = false;
    n.pos = static_cast<std::uint32_t>(present_.size());
    present_.push_back(slot);
    storage_count_ += storage;
    departures_.push({n.depart, slot});
  }

  void remove_node(std::uint32_t slot) {
    const Node& n = nodes_[slot];
    const std::uint32_t last = present_.back();
    present_[n.pos] = last;
    nodes_[last].pos = n.pos;
    present_.pop_back();
    storage_count_ -= n.storage;
    free_slots_.push_back(slot);
  }

  long sample_rank() {
    const double u = file_rank_.uniform01();
    const auto it = std::lower_bound(zipf_cdf_.begin(), zipf_cdf_.end(), u);
    return static_cast<long>(it - zipf_cdf_.begin()) + 1;
  }

  // Resolves a whole D2D session at the request instant; the outcome depends
  // only on already-drawn departure times and the pick stream.
  void d2d_session(double now, std::uint32_t requester, int type, int& attempts, int& got) {
    const int need = cfg_.code.k - type;
    attempts = 0;
    got = 0;
    if (need <= 0) return;
    pool_.clear();
    for (const std::uint32_t slot : present_) {
      const Node& n = nodes_[slot];
      if (slot != requester && n.storage && (refresh_per_request_ || n.listed))
        pool_.push_back(slot);
    }
    const double requester_depart = nodes_[requester].depart;
    double tau = now;
    while (got < need) {
      ++attempts;
      // Candidates: not yet contacted and still alive at the slot start.
      alive_.clear();
      for (std::size_t idx = 0; idx < pool_.size(); ++idx) {
        if (nodes_[pool_[idx]].depart > tau) alive_.push_back(idx);
      }
      if (alive_.empty()) break;  // nobody left to contact; the slot is still spent
      const std::size_t pick = alive_[d2d_pick_.index(static_cast<std::uint32_t>(alive_.size()))];
      const double chosen_depart = nodes_[pool_[pick]].depart;
      pool_[pick] = pool_.back();
      pool_.pop_back();
      const double slot_end = tau + cfg_.params.t_d;
      tau = slot_end;
      if (chosen_depart > slot_end && requester_depart > slot_end) {
        ++got;
      } else {
        break;
      }
    }
  }

  static constexpr double kInf = std::numeric_limits<double>::infinity();

  const SimConfig& cfg_;
  Stream arrivals_regular_, arrivals_storage_, lifetimes_, request_budget_, requester_choice_,
      file_rank_, d2d_pick_;
  const std::vector<double>& zipf_cdf_;
  std::FILE* trace_;

  bool refresh_per_request_ = false;
  long effective_f_ = 0;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> free_slots_;
  std::vector<std::uint32_t> present_;
  std::priority_queue<DepartureEvent, std::vector<DepartureEvent>, std::greater<>> departures_;
  std::vector<std::uint32_t> pool_;
  std::vector<std::size_t> alive_;
  int storage_count_ = 0;

  RepResult result_;
};

RepResult Replication::run() {
  const SystemParams& p = cfg_.params;
  const double regular_rate = (p.M_c - p.n_c) * p.lambda;
  const double storage_rate = p.n_c * p.lambda;

  double t = 0.0;
  double next_regular = exp_or_inf(arrivals_regular_, regular_rate);
  double next_storage = exp_or_inf(arrivals_storage_, storage_rate);
  double next_broadcast = refresh_per_request_ ? kInf : 0.0;

  // The request clock runs on an integrated-hazard budget: one Exp(1) draw is
  // consumed at rate m * omega, which keeps the request process exact while m
  // fluctuates and reuses the same churn path across update intervals.
  double budget = request_budget_.exponential(1.0);
  double budget_mark = 0.0;  // time up to which the budget is already drained

  const double warm_time = 10.0 * p.M_c / p.lambda;
  long requests_seen = 0;
  bool measuring = false;
  double measure_start = 0.0;
  double last_stat_t = 0.0;
  double busy_until = 0.0;

  const long target = cfg_.measured_requests;

  while (result_.requests < static_cast<std::uint64_t>(target)) {
    const double m = static_cast<double>(present_.size());
    const double next_request =
        m > 0.0 ? budget_mark + budget / (m * p.omega) : kInf;
    const double next_depart = departures_.empty() ? kInf : departures_.top().time;
    const double te = std::min({next_regular, next_storage, next_depart, next_broadcast,
                                next_request});

    if (measuring) {
      result_.node_area += m * (te - last_stat_t);
      result_.storage_area += storage_count_ * (te - last_stat_t);
    }
    last_stat_t = te;
    // Drain the request budget over [budget_mark, te] at the current rate.
    budget -= (te - budget_mark) * m * p.omega;
    budget_mark = te;
    t = te;

    if (te == next_regular) {
      add_node(t, false);
      next_regular = t + exp_or_inf(arrivals_regular_, regular_rate);
    } else if (te == next_storage) {
      add_node(t, true);
      next_storage = t + exp_or_inf(arrivals_storage_, storage_rate);
    } else if (te == next_depart) {
      const std::uint32_t slot = departures_.top().slot;
      departures_.pop();
      remove_node(slot);
    } else if (te == next_broadcast) {
      for (const std::uint32_t slot : present_) {
        if (nodes_[slot].storage) nodes_[slot].listed = true;
      }
      next_broadcast = t + p.delta;
    } else {
      // Request event.
      budget = request_budget_.exponential(1.0);
      ++requests_seen;
      if (!measuring && requests_seen > cfg_.warmup_requests && t >= warm_time) {
        measuring = true;
        measure_start = t;
      }

      const std::uint32_t requester =
          present_[requester_choice_.index(static_cast<std::uint32_t>(present_.size()))];
      const Node& rq = nodes_[requester];
      const int type = rq.storage && (refresh_per_request_ || rq.listed) ? 1 : 0;
      const long rank = sample_rank();
      const bool hit = rank <= effective_f_;
      const bool idle = t >= busy_until;
      const int k = cfg_.code.k;

      int attempts = 0;
      int got = 0;
      bool d2d_used = false;
      double delay;
      if (!hit) {
        delay = k * p.t_bs;
      } else if (!idle) {
        delay = (k - type) * p.t_bs;
      } else {
        d2d_used = true;
        d2d_session(t, requester, type, attempts, got);
        busy_until = t + attempts * p.t_d;
        delay = attempts * p.t_d + (k - type - got) * p.t_bs;
      }

      if (measuring) {
        ++result_.requests;
        result_.delay_sum += delay;
        result_.idle_count += idle;
        result_.list_count += type;
        std::size_t listed_alive = 0;
        for (const std::uint32_t slot : present_) {
          const Node& n = nodes_[slot];
          if (n.storage && (refresh_per_request_ || n.listed)) ++listed_alive;
        }
        result_.list_alive_sum += listed_alive;
        if (d2d_used) {
          ++result_.eligible[type];
          result_.symbols += got;
          result_.busy_sum += attempts * p.t_d;
          ++result_.outcomes[type][got];
          ++result_.list_alive_hist[type][std::min(listed_alive, kListHistCap - 1)];
        }
        if (trace_ != nullptr) {
          std::fprintf(trace_, "%.17g,%ld,%d,%d,%d,%d,%d,%.17g\n", t, rank, hit ? 1 : 0,
                       idle ? 1 : 0, type, attempts, got, delay);
        }
      }
    }
  }
  result_.span = t - measure_start;
  return result_;
}

Estimate across_reps(const std::vector<double>& values) {
  Estimate e;
  const double n = static_cast<double>(values.size());
  for (const double v : values) e.mean += v;
  e.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - e.mean) * (v - e.mean);
    e.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return e;
}

}  // namespace

SimStats run(const SimConfig& config) {
  const ValidationReport report =
      validate(config.params, config.code, {.allow_mu_neq_lambda = false, .analytic = false});
  if (!report.pass) {
    std::string what = "simulator: invalid configuration:";
    for (const auto& e : report.errors) what += " " + e + ";";
    throw std::invalid_argument(what);
  }
  if (config.replications < 1) throw std::invalid_argument("simulator: replications must be >= 1");
  if (config.measured_requests < 1)
    throw std::invalid_argument("simulator: measured_requests must be >= 1");

  // Shared Zipf CDF.
  std::vector<double> cdf(config.popularity.library_size());
  {
    double acc = 0.0;
    for (long i = 1; i <= config.popularity.library_size(); ++i) {
      acc += config.popularity.zipf_pmf(i);
      cdf[i - 1] = acc;
    }
    cdf.back() = 1.0;
  }

  std::FILE* trace = nullptr;
  if (!config.trace_path.empty()) {
    trace = std::fopen(config.trace_path.c_str(), "w");
    if (trace == nullptr)
      throw std::runtime_error("simulator: cannot open trace file " + config.trace_path);
    std::fprintf(trace, "time,rank,hit,idle,R,attempts,symbols_d2d,delay\n");
  }

  std::vector<RepResult> results(config.replications);
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int workers = std::min(config.replications,
                               config.threads > 0 ? config.threads : std::max(1, hw));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int rep = next.fetch_add(1);
      if (rep >= config.replications) return;
      Replication r(config, rep, cdf, rep == 0 ? trace : nullptr);
      results[rep] = r.run();
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (trace != nullptr) std::fclose(trace);

  SimStats stats;
  stats.config = config;
  const int reps = config.replications;
  auto collect = [&](auto&& get) {
    std::vector<double> v(reps);
    for (int r = 0; r < reps; ++r) v[r] = get(results[r]);
    return across_reps(v);
  };
  stats.mean_delay = collect([](const RepResult& r) { return r.delay_sum / r.requests; });
  stats.idle_fraction =
      collect([](const RepResult& r) { return static_cast<double>(r.idle_count) / r.requests; });
  stats.list_request_fraction =
      collect([](const RepResult& r) { return static_cast<double>(r.list_count) / r.requests; });
  stats.mean_list_alive =
      collect([](const RepResult& r) { return static_cast<double>(r.list_alive_sum) / r.requests; });
  stats.eta_hat = collect([](const RepResult& r) {
    const std::uint64_t n = r.eligible[0] + r.eligible[1];
    return n > 0 ? static_cast<double>(r.symbols) / n : 0.0;
  });
  stats.d2d_time_hat = collect([](const RepResult& r) {
    const std::uint64_t n = r.eligible[0] + r.eligible[1];
    return n > 0 ? r.busy_sum / n : 0.0;
  });
  stats.mean_nodes =
      collect([](const RepResult& r) { return r.span > 0.0 ? r.node_area / r.span : 0.0; });
  stats.mean_storage_nodes =
      collect([](const RepResult& r) { return r.span > 0.0 ? r.storage_area / r.span : 0.0; });

  for (int i : {0, 1}) {
    const std::size_t bins = results[0].outcomes[i].size();
    stats.outcome_counts[i].assign(bins, 0);
    stats.outcome_fractions[i].resize(bins);
    for (int r = 0; r < reps; ++r) {
      stats.eligible[i] += results[r].eligible[i];
      for (std::size_t b = 0; b < bins; ++b) stats.outcome_counts[i][b] += results[r].outcomes[i][b];
    }
    for (std::size_t b = 0; b < bins; ++b) {
      stats.outcome_fractions[i][b] = collect([&](const RepResult& r) {
        return r.eligible[i] > 0 ? static_cast<double>(r.outcomes[i][b]) / r.eligible[i] : 0.0;
      });
    }
    stats.list_alive_given_type[i].assign(kListHistCap, 0.0);
    if (stats.eligible[i] > 0) {
      for (std::size_t x = 0; x < kListHistCap; ++x) {
        std::uint64_t c = 0;
        for (int r = 0; r < reps; ++r) c += results[r].list_alive_hist[i][x];
        stats.list_alive_given_type[i][x] = static_cast<double>(c) / stats.eligible[i];
      }
    }
  }
  for (int r = 0; r < reps; ++r) stats.requests += results[r].requests;
  return stats;
}

ComparisonReport compare(const SimStats& stats, const AnalyticResult& analytic) {
  if (!(stats.config.params == analytic.params) || !(stats.config.code == analytic.code) ||
      !(stats.config.popularity == analytic.popularity)) {
    throw std::invalid_argument("compare: simulation and analytics are from different points");
  }

  ComparisonReport report;
  auto add = [&](const std::string& name, double sim, double ana, double se, bool gating,
                 bool pass_rule_rel, double tol) {
    ComparisonRow row;
    row.name = name;
    row.sim = sim;
    row.analytic = ana;
    row.rel_err = ana != 0.0 ? (sim - ana) / ana : sim;
    row.se_mult = se > 0.0 ? std::abs(sim - ana) / se : (sim == ana ? 0.0 : HUGE_VAL);
    row.gating = gating;
    row.pass = pass_rule_rel ? std::abs(row.rel_err) <= tol : row.se_mult <= tol;
    if (gating && !row.pass) report.pass = false;
    report.rows.push_back(row);
  };

  add("mean_delay", stats.mean_delay.mean, analytic.delay.tbar_dw, stats.mean_delay.se,
      true, true, 0.05);
  add("p_R1", stats.list_request_fraction.mean, analytic.delay.p_s,
      stats.list_request_fraction.se, false, false, 3.0);
  add("idle", stats.idle_fraction.mean, analytic.delay.p_idle, stats.idle_fraction.se, false,
      false, 3.0);
  add("eta", stats.eta_hat.mean, analytic.outcomes.eta, stats.eta_hat.se, false, false, 3.0);

  const int k = analytic.code.k;
  for (int i : {0, 1}) {
    const int need = k - i;
    const std::uint64_t n_total = stats.eligible[i];
    if (n_total == 0) continue;
    for (int b = 0; b <= need; ++b) {
      double ana;
      if (need == 0) {
        ana = 1.0;  // nothing to download: trivially a full recovery
      } else if (b == 0) {
        ana = analytic.outcomes.p_fail_first[i];
      } else if (b == need) {
        ana = analytic.outcomes.p_full[i];
      } else {
        ana = analytic.outcomes.p_partial[i][b - 1];
      }
      const Estimate& f = stats.outcome_fractions[i][b];
      // Degenerate empirical SE (rare bins) falls back to the binomial SE
      // under the analytic probability.
      const double binom_se = std::sqrt(std::max(ana * (1.0 - ana), 0.0) / n_total);
      const double se = std::max(f.se, binom_se);
      add("outcome[" + std::to_string(i) + "][" + std::to_string(b) + "]", f.mean, ana, se, true,
          false, 3.0);
    }
  }
  return report;
}

}  // namespace d2dcache
