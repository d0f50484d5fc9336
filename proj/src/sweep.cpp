#include "d2dcache/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "d2dcache/delay.hpp"

namespace d2dcache {

namespace {

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> grid(n);
  const double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i < n; ++i) grid[i] = std::exp(la + (lb - la) * i / (n - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<double> arange(double lo, double hi, double step) {
  std::vector<double> grid;
  for (double v = lo; v <= hi + 1e-12; v += step) grid.push_back(v);
  return grid;
}

const std::vector<CodePoint> kDefaultCodes = {{1.0, 1}, {3.0, 1}, {6.0, 2}, {15.0, 5}};

SweepSpec ratio_preset(const std::string& name, double ratio) {
  SweepSpec s;
  s.name = name;
  s.axis = SweepAxis::delta;
  s.grid = log_spaced(0.05, 5.0, 20);
  s.codes = kDefaultCodes;
  s.tbs_over_td = ratio;
  return s;
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig5"}; }

SweepSpec preset(const std::string& name) {
  if (name == "fig2") return ratio_preset(name, 10.0);
  if (name == "fig3") return ratio_preset(name, 100.0);
  if (name == "fig4") return ratio_preset(name, 1000.0);
  if (name == "fig5") {
    SweepSpec s;
    s.name = name;
    s.axis = SweepAxis::sigma;
    s.grid = arange(0.0, 1.6, 0.2);
    s.codes = kDefaultCodes;
    s.tbs_over_td = 100.0;
    s.delta = 0.5;
    s.library_size = 1000;
    s.budget = StorageBudget{8e8, 4.8e10, 1000};  // 100 MB files, 6 GB per device
    return s;
  }
  std::string what = "unknown preset '" + name + "'; available:";
  for (const auto& p : preset_names()) what += " " + p;
  throw std::invalid_argument(what);
}

SimConfig point_config(const SweepSpec& spec, double axis_value, const CodePoint& code) {
  const double t_bs = 1.0 / code.k;  // T_ref = k * t_bs = 1
  const double t_d = t_bs / spec.tbs_over_td;
  const double delta = spec.axis == SweepAxis::delta ? axis_value : spec.delta;
  const double sigma = spec.axis == SweepAxis::sigma ? axis_value : spec.sigma;

  SimConfig cfg;
  cfg.params = SystemParams::cluster(spec.m_c, code.n_c, spec.mu, spec.omega, delta, t_d, t_bs);
  cfg.code = CodeParams{static_cast<int>(std::lround(code.n_c)), code.k};
  long f = spec.library_size;
  if (spec.budget.has_value()) {
    StorageBudget b = *spec.budget;
    b.library_size = spec.library_size;
    f = cached_file_count(b, cfg.code);
  }
  cfg.popularity = PopularityModel(spec.library_size, sigma, f);
  return cfg;
}

namespace {

SweepRow analytic_row(const SweepSpec& spec, double axis_value, const CodePoint& code) {
  const SimConfig cfg = point_config(spec, axis_value, code);
  const AnalyticResult res = evaluate(cfg.params, cfg.code, cfg.popularity, spec.policy);
  SweepRow row;
  row.axis_value = axis_value;
  row.n_c = code.n_c;
  row.k = code.k;
  row.p_hit = res.delay.p_hit;
  row.p_r1 = res.delay.p_s;
  row.p_idle = res.delay.p_idle;
  row.eta = res.delay.eta;
  row.tbar_eta = res.delay.tbar_eta;
  row.tbar_dw = res.delay.tbar_dw;
  row.speedup = res.delay.speedup;
  return row;
}

void attach_sim(SweepRow& row, const SweepSpec& spec, double axis_value, const CodePoint& code,
                const SimBudget& budget, std::size_t point_index, bool with_compare) {
  SimConfig cfg = point_config(spec, axis_value, code);
  cfg.seed = budget.seed + point_index;  // reproducible, distinct per point
  cfg.measured_requests = budget.requests;
  cfg.replications = budget.replications;
  cfg.warmup_requests = budget.warmup_requests;
  cfg.threads = budget.threads;
  if (point_index == 0) cfg.trace_path = budget.trace_path;
  const SimStats stats = run(cfg);

  row.has_sim = true;
  row.sim_mean_delay = stats.mean_delay;
  row.sim_speedup = {cfg.code.k * cfg.params.t_bs / stats.mean_delay.mean,
                     stats.mean_delay.se > 0.0
                         ? cfg.code.k * cfg.params.t_bs * stats.mean_delay.se /
                               (stats.mean_delay.mean * stats.mean_delay.mean)
                         : 0.0};
  row.sim_eta = stats.eta_hat;
  row.sim_idle = stats.idle_fraction;
  row.sim_p_r1 = stats.list_request_fraction;

  if (with_compare) {
    const AnalyticResult res = evaluate(cfg.params, cfg.code, cfg.popularity, spec.policy);
    row.comparison = compare(stats, res);
    row.compared = true;
    row.pass = row.comparison.pass;
  }
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, RunMode mode, const SimBudget& budget) {
  if (spec.grid.empty()) throw std::invalid_argument("sweep grid must not be empty");
  for (std::size_t i = 1; i < spec.grid.size(); ++i) {
    if (!(spec.grid[i] > spec.grid[i - 1]))
      throw std::invalid_argument("sweep grid must be strictly increasing");
  }
  if (spec.codes.empty()) throw std::invalid_argument("sweep needs at least one code");

  std::vector<SweepRow> rows;
  rows.reserve(spec.grid.size() * spec.codes.size());
  std::size_t point_index = 0;
  for (const double value : spec.grid) {
    for (const CodePoint& code : spec.codes) {
      SweepRow row = analytic_row(spec, value, code);
      if (mode != RunMode::analytic) {
        attach_sim(row, spec, value, code, budget, point_index, mode == RunMode::both);
      }
      rows.push_back(std::move(row));
      ++point_index;
    }
  }
  return rows;
}

std::vector<SweepRow> run_compare(const SweepSpec& spec, const SimBudget& budget) {
  return run_sweep(spec, RunMode::both, budget);
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string to_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows, RunMode mode) {
  std::ostringstream out;
  out << "# preset: " << (spec.name.empty() ? "custom" : spec.name) << "\n";
  out << "# axis: " << (spec.axis == SweepAxis::delta ? "delta" : "sigma") << " (grid chosen by"
      << " this tool; see README)\n";
  out << "# fixed: M_c=" << fmt(spec.m_c) << " mu=lambda=" << fmt(spec.mu)
      << " omega=" << fmt(spec.omega) << " t_bs/t_d=" << fmt(spec.tbs_over_td)
      << " T_ref=1";
  if (spec.axis == SweepAxis::sigma) out << " delta=" << fmt(spec.delta);
  if (spec.budget.has_value())
    out << " file_bits=" << fmt(spec.budget->file_size_bits)
        << " capacity_bits=" << fmt(spec.budget->capacity_bits);
  out << " Z=" << spec.library_size << "\n";

  out << "axis_value,n_c,k,p_hit,p_R1,p_idle,eta,Tbar_eta,Tbar_dw,speedup";
  if (mode != RunMode::analytic) {
    out << ",sim_mean_delay,sim_mean_delay_se,sim_speedup,sim_speedup_se,sim_eta,sim_eta_se,"
           "sim_idle,sim_idle_se,sim_pR1,sim_pR1_se";
  }
  if (mode == RunMode::both) out << ",pass";
  out << "\n";

  for (const SweepRow& r : rows) {
    out << fmt(r.axis_value) << ',' << fmt(r.n_c) << ',' << r.k << ',' << fmt(r.p_hit) << ','
        << fmt(r.p_r1) << ',' << fmt(r.p_idle) << ',' << fmt(r.eta) << ',' << fmt(r.tbar_eta)
        << ',' << fmt(r.tbar_dw) << ',' << fmt(r.speedup);
    if (mode != RunMode::analytic) {
      out << ',' << fmt(r.sim_mean_delay.mean) << ',' << fmt(r.sim_mean_delay.se) << ','
          << fmt(r.sim_speedup.mean) << ',' << fmt(r.sim_speedup.se) << ',' << fmt(r.sim_eta.mean)
          << ',' << fmt(r.sim_eta.se) << ',' << fmt(r.sim_idle.mean) << ',' << fmt(r.sim_idle.se)
          << ',' << fmt(r.sim_p_r1.mean) << ',' << fmt(r.sim_p_r1.se);
    }
    if (mode == RunMode::both) out << ',' << (r.pass ? 1 : 0);
    out << "\n";
  }
  return out.str();
}

void write_csv(const std::string& path, const SweepSpec& spec, const std::vector<SweepRow>& rows,
               RunMode mode) {
  const std::string body = to_csv(spec, rows, mode);
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << body;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace d2dcache
