#include "d2dcache/sweep.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <stdexcept>

#include "doctest.h"

using namespace d2dcache;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("presets") {
  for (const auto& name : preset_names()) CHECK_NOTHROW(preset(name));
  CHECK(preset("fig2").tbs_over_td == 10.0);
  CHECK(preset("fig3").tbs_over_td == 100.0);
  CHECK(preset("fig4").tbs_over_td == 1000.0);
  const SweepSpec fig5 = preset("fig5");
  CHECK(fig5.axis == SweepAxis::sigma);
  CHECK(fig5.delta == 0.5);
  CHECK(fig5.grid.size() == 9);
  CHECK(fig5.budget.has_value());
  CHECK_THROWS_WITH_AS(preset("fig9"),
                       "unknown preset 'fig9'; available: fig2 fig3 fig4 fig5",
                       std::invalid_argument);
}

TEST_CASE("sweep validation") {
  SweepSpec spec = preset("fig2");
  spec.grid.clear();
  CHECK_THROWS_AS(run_sweep(spec, RunMode::analytic), std::invalid_argument);
  spec.grid = {1.0, 0.5};
  CHECK_THROWS_AS(run_sweep(spec, RunMode::analytic), std::invalid_argument);
  spec = preset("fig2");
  spec.codes.clear();
  CHECK_THROWS_AS(run_sweep(spec, RunMode::analytic), std::invalid_argument);
}

TEST_CASE("analytic sweeps: row order, speed, golden bytes") {
  const auto t0 = std::chrono::steady_clock::now();
  const SweepSpec fig2 = preset("fig2");
  const std::vector<SweepRow> rows = run_sweep(fig2, RunMode::analytic);
  run_sweep(preset("fig3"), RunMode::analytic);
  run_sweep(preset("fig4"), RunMode::analytic);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 10.0);

  REQUIRE(rows.size() == 20 * 4);
  // Grid-major order with the declared code order inside each grid point.
  CHECK(rows[0].axis_value == doctest::Approx(0.05));
  CHECK(rows[0].k == 1);
  CHECK(rows[0].n_c == 1.0);
  CHECK(rows[3].k == 5);
  CHECK(rows[4].axis_value > rows[0].axis_value);

  const std::string csv = to_csv(fig2, rows, RunMode::analytic);
  const std::string golden = slurp(std::filesystem::path(D2DCACHE_GOLDEN_DIR) / "fig2_analytic.csv");
  CHECK(csv == golden);
}

TEST_CASE("capacity-derived cache contents") {
  const SweepSpec fig5 = preset("fig5");
  const SimConfig at_sigma0 = point_config(fig5, 0.0, CodePoint{15.0, 5});
  CHECK(at_sigma0.popularity.cached_files() == 300);
  CHECK(at_sigma0.popularity.hit_probability() == doctest::Approx(0.3));

  const std::vector<SweepRow> rows = run_sweep(fig5, RunMode::analytic);
  const SweepRow& first_k5 = *std::find_if(rows.begin(), rows.end(),
                                           [](const SweepRow& r) { return r.k == 5; });
  CHECK(first_k5.p_hit == doctest::Approx(0.3));

  SweepSpec full = fig5;
  full.budget.reset();  // cache the whole library instead
  const std::vector<SweepRow> full_rows = run_sweep(full, RunMode::analytic);
  const SweepRow& full_k5 = *std::find_if(full_rows.begin(), full_rows.end(),
                                          [](const SweepRow& r) { return r.k == 5; });
  CHECK(first_k5.speedup < full_k5.speedup);
}

TEST_CASE("simulation sweeps are reproducible byte for byte") {
  SweepSpec spec = preset("fig2");
  spec.grid = {0.5};
  spec.codes = {{3.0, 1}};
  SimBudget budget;
  budget.seed = 7;
  budget.requests = 3000;
  budget.replications = 2;
  const std::string a = to_csv(spec, run_sweep(spec, RunMode::simulate, budget), RunMode::simulate);
  const std::string b = to_csv(spec, run_sweep(spec, RunMode::simulate, budget), RunMode::simulate);
  CHECK(a == b);
  CHECK(a.find("sim_mean_delay") != std::string::npos);
}

TEST_CASE("csv writing is atomic") {
  const auto dir = std::filesystem::temp_directory_path() / "d2dcache_sweep_test";
  std::filesystem::create_directories(dir);
  const auto target = dir / "out.csv";
  SweepSpec spec = preset("fig2");
  spec.grid = {1.0};
  const std::vector<SweepRow> rows = run_sweep(spec, RunMode::analytic);
  write_csv(target.string(), spec, rows, RunMode::analytic);
  CHECK(std::filesystem::exists(target));
  CHECK_FALSE(std::filesystem::exists(target.string() + ".tmp"));

  const auto missing = dir / "nope" / "out.csv";
  CHECK_THROWS(write_csv(missing.string(), spec, rows, RunMode::analytic));
  std::filesystem::remove_all(dir);
}

TEST_CASE("compare mode emits a verdict per point") {
  SweepSpec spec = preset("fig2");
  spec.grid = {1.0};
  spec.codes = {{15.0, 5}};
  SimBudget budget;
  budget.seed = 11;
  budget.requests = 20000;
  budget.replications = 4;
  const std::vector<SweepRow> rows = run_compare(spec, budget);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].compared);
  CHECK(rows[0].pass);
  const std::string csv = to_csv(spec, rows, RunMode::both);
  CHECK(csv.find(",pass") != std::string::npos);
}
