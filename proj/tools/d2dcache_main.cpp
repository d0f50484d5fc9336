// Experiment CLI: closed-form sweeps, cluster simulations, and side-by-side
// comparison runs, emitted as CSV.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "d2dcache/sweep.hpp"

namespace {

using d2dcache::CodePoint;
using d2dcache::RunMode;
using d2dcache::SimBudget;
using d2dcache::SweepSpec;

constexpr int kExitConfig = 2;
constexpr int kExitCompareFailed = 3;

void apply_config(SweepSpec& spec, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j = nlohmann::json::parse(buf.str());
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    const auto& v = item.value();
    if (key == "grid") {
      spec.grid = v.get<std::vector<double>>();
    } else if (key == "codes") {
      spec.codes.clear();
      for (const auto& c : v) {
        if (!c.is_array() || c.size() != 2)
          throw std::invalid_argument("codes entries must be [n_c, k] pairs");
        spec.codes.push_back(CodePoint{c[0].get<double>(), c[1].get<int>()});
      }
    } else if (key == "tbs_over_td") {
      spec.tbs_over_td = v.get<double>();
    } else if (key == "M_c") {
      spec.m_c = v.get<double>();
    } else if (key == "mu") {
      spec.mu = v.get<double>();
    } else if (key == "omega") {
      spec.omega = v.get<double>();
    } else if (key == "delta") {
      spec.delta = v.get<double>();
    } else if (key == "sigma") {
      spec.sigma = v.get<double>();
    } else if (key == "Z") {
      spec.library_size = v.get<long>();
    } else if (key == "file_size_bits") {
      if (!spec.budget) spec.budget.emplace();
      spec.budget->file_size_bits = v.get<double>();
    } else if (key == "capacity_bits") {
      if (!spec.budget) spec.budget.emplace();
      spec.budget->capacity_bits = v.get<double>();
    } else if (key == "epsilon") {
      spec.policy.epsilon = v.get<double>();
    } else if (key == "hard_cap") {
      spec.policy.hard_cap = v.get<int>();
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Download-delay experiments for MDS-coded D2D caching"};
  app.require_subcommand(1);

  std::string preset_name = "fig2";
  std::string config_path;
  std::string out_path;
  SimBudget budget;

  auto add_common = [&](CLI::App* sub, bool with_sim) {
    sub->add_option("--preset", preset_name, "experiment preset (fig2, fig3, fig4, fig5)");
    sub->add_option("--config", config_path, "JSON file overriding preset fields");
    sub->add_option("--out", out_path, "output CSV path")->required();
    if (with_sim) {
      sub->add_option("--seed", budget.seed, "base RNG seed");
      sub->add_option("--requests", budget.requests, "measured requests per replication");
      sub->add_option("--reps", budget.replications, "independent replications per point");
      sub->add_option("--warmup", budget.warmup_requests, "warmup requests per replication");
      sub->add_option("--threads", budget.threads, "worker threads (0 = hardware)");
      sub->add_option("--trace", budget.trace_path,
                      "per-request trace CSV (first point, first replication)");
    }
  };

  CLI::App* analytic = app.add_subcommand("analytic", "closed-form sweep only");
  add_common(analytic, false);
  CLI::App* simulate = app.add_subcommand("simulate", "simulation sweep");
  add_common(simulate, true);
  CLI::App* compare = app.add_subcommand("compare", "analytic vs simulation with pass/fail");
  add_common(compare, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    SweepSpec spec = d2dcache::preset(preset_name);
    if (!config_path.empty()) apply_config(spec, config_path);

    RunMode mode = RunMode::analytic;
    if (simulate->parsed()) mode = RunMode::simulate;
    if (compare->parsed()) mode = RunMode::both;

    const std::vector<d2dcache::SweepRow> rows = d2dcache::run_sweep(spec, mode, budget);
    d2dcache::write_csv(out_path, spec, rows, mode);

    if (mode == RunMode::both) {
      int failed = 0;
      for (const auto& row : rows) {
        if (!row.pass) {
          ++failed;
          std::fprintf(stderr, "FAIL point %s=%.6g code (%g,%d)\n",
                       spec.axis == d2dcache::SweepAxis::delta ? "delta" : "sigma",
                       row.axis_value, row.n_c, row.k);
        }
      }
      std::fprintf(stderr, "compare: %d/%zu points failed\n", failed, rows.size());
      if (failed > 0) return kExitCompareFailed;
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
