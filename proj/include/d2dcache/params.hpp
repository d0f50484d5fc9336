#pragma once

#include <string>
#include <vector>

namespace d2dcache {

/// Scalar inputs of the system model. All times are in abstract time units
/// (one t.u. equals 1/mu in the default presets); rates are per t.u.
struct SystemParams {
  double M = 30.0;    // devices in the cell
  double C = 1.0;     // clusters
  double M_c = 30.0;  // mean devices per cluster (= M/C)
  double n = 9.0;     // storage nodes in the cell
  double n_c = 9.0;   // mean storage nodes per cluster (= n/C)
  double lambda = 1.0;  // arrival rate per node slot
  double mu = 1.0;      // departure rate per node
  double omega = 0.02;  // request rate per node
  double delta = 1.0;   // DS-list update interval (0 = instantaneous)
  double t_d = 0.02;    // D2D symbol download time
  double t_bs = 0.2;    // BS symbol download time

  /// Convenience: single-cluster setup (C = 1, M = M_c, n = n_c).
  static SystemParams cluster(double m_c, double n_c, double mu, double omega, double delta,
                              double t_d, double t_bs);

  bool operator==(const SystemParams&) const = default;
};

struct CodeParams {
  int n_code = 9;  // MDS code length
  int k = 3;       // MDS code dimension

  double rate() const { return static_cast<double>(k) / n_code; }
  bool operator==(const CodeParams&) const = default;
};

struct StorageBudget {
  double file_size_bits = 8e8;     // B
  double capacity_bits = 4.8e10;   // per-device cache budget
  long library_size = 1000;        // Z
};

struct ValidationReport {
  bool pass = true;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};

struct ValidateOptions {
  bool allow_mu_neq_lambda = false;
  /// The k <= n_c constraint is required by the analytical pipeline only;
  /// the simulator accepts any k <= n_code.
  bool analytic = true;
};

ValidationReport validate(const SystemParams& params, const CodeParams& code,
                          const ValidateOptions& opts = {});

/// Number of cached files per storage node: F = min(Z, floor(capacity / (B/k))).
long cached_file_count(const StorageBudget& budget, const CodeParams& code);

/// Strict JSON (de)serialization; the schema is exactly the field names of
/// each struct and unknown keys are rejected. `text` is a JSON object; fields
/// present override `base`.
SystemParams system_params_from_json(const std::string& text, const SystemParams& base = {});
CodeParams code_params_from_json(const std::string& text, const CodeParams& base = {});
StorageBudget storage_budget_from_json(const std::string& text, const StorageBudget& base = {});
std::string to_json(const SystemParams& params);

}  // namespace d2dcache
