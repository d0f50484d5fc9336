#pragma once

#include <optional>
#include <string>
#include <vector>

#include "d2dcache/params.hpp"
#include "d2dcache/simulator.hpp"

namespace d2dcache {

enum class SweepAxis { delta, sigma };

/// One MDS code point: mean storage nodes per cluster and code dimension.
/// (1,1) is the uncoded reference, (3,1) plain replication.
struct CodePoint {
  double n_c = 9.0;
  int k = 3;
};

enum class RunMode { analytic, simulate, both };

struct SimBudget {
  std::uint64_t seed = 42;
  long requests = 100000;
  int replications = 10;
  long warmup_requests = 2000;
  int threads = 0;
  std::string trace_path;  // first point, first replication
};

/// A named experiment: a grid over one axis, evaluated for a set of codes.
/// All presets normalize T_ref = k * t_bs to 1 t.u. (t_bs = 1/k,
/// t_d = t_bs / tbs_over_td).
struct SweepSpec {
  std::string name;
  SweepAxis axis = SweepAxis::delta;
  std::vector<double> grid;
  std::vector<CodePoint> codes;
  double tbs_over_td = 10.0;
  double m_c = 30.0;
  double mu = 1.0;
  double omega = 0.02;
  double delta = 0.5;  // fixed delta for sigma sweeps
  long library_size = 1000;
  double sigma = 0.0;  // fixed sigma for delta sweeps
  // When set, F is derived per code from the device storage budget;
  // otherwise the whole library is cached (F = Z).
  std::optional<StorageBudget> budget;
  TruncationPolicy policy;
};

/// Named presets: fig2/fig3/fig4 are delta sweeps at t_bs/t_d = 10/100/1000
/// with F = Z; fig5 is a sigma sweep at t_bs = 100 t_d, delta = 0.5, with F
/// derived from a 6 GB budget and 100 MB files over a 1000-file library.
SweepSpec preset(const std::string& name);
std::vector<std::string> preset_names();

struct SweepRow {
  double axis_value = 0.0;
  double n_c = 0.0;
  int k = 0;
  double p_hit = 0.0;
  double p_r1 = 0.0;
  double p_idle = 0.0;
  double eta = 0.0;
  double tbar_eta = 0.0;
  double tbar_dw = 0.0;
  double speedup = 0.0;
  bool has_sim = false;
  Estimate sim_mean_delay, sim_speedup, sim_eta, sim_idle, sim_p_r1;
  bool compared = false;
  bool pass = true;
  ComparisonReport comparison;
};

/// Builds the (params, code, popularity) triple of one grid point.
SimConfig point_config(const SweepSpec& spec, double axis_value, const CodePoint& code);

/// Runs the sweep in deterministic row order (grid-major, then codes).
std::vector<SweepRow> run_sweep(const SweepSpec& spec, RunMode mode,
                                const SimBudget& budget = {});

/// run_sweep with per-point pass/fail comparison attached.
std::vector<SweepRow> run_compare(const SweepSpec& spec, const SimBudget& budget);

/// CSV serialization of sweep rows; `# key: value` header lines document the
/// preset, grid and fixed parameters. Output is written to a temporary file
/// and renamed so a partial result never appears under `path`.
std::string to_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows, RunMode mode);
void write_csv(const std::string& path, const SweepSpec& spec, const std::vector<SweepRow>& rows,
               RunMode mode);

}  // namespace d2dcache
