#include "d2dcache/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace d2dcache {

SystemParams SystemParams::cluster(double m_c, double n_c, double mu, double omega, double delta,
                                   double t_d, double t_bs) {
  SystemParams p;
  p.M = m_c;
  p.C = 1.0;
  p.M_c = m_c;
  p.n = n_c;
  p.n_c = n_c;
  p.lambda = mu;
  p.mu = mu;
  p.omega = omega;
  p.delta = delta;
  p.t_d = t_d;
  p.t_bs = t_bs;
  return p;
}

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

ValidationReport validate(const SystemParams& p, const CodeParams& code,
                          const ValidateOptions& opts) {
  ValidationReport rep;
  auto fail = [&](const std::string& msg) {
    rep.pass = false;
    rep.errors.push_back(msg);
  };

  if (!(p.M_c > 0.0)) fail("M_c must be > 0");
  if (p.n_c < 0.0) fail("n_c must be >= 0");
  if (p.n_c > p.M_c) fail("n_c must not exceed M_c");
  if (!(p.C > 0.0)) fail("C must be > 0");
  if (!close(p.M_c * p.C, p.M)) fail("M_c must equal M/C");
  if (!close(p.n_c * p.C, p.n)) fail("n_c must equal n/C");
  if (!(p.lambda > 0.0)) fail("lambda must be > 0");
  if (!(p.mu > 0.0)) fail("mu must be > 0");
  if (!(p.omega > 0.0)) fail("omega must be > 0");
  if (p.delta < 0.0) fail("delta must be >= 0");
  if (!(p.t_d > 0.0)) fail("t_d must be > 0");
  if (!(p.t_bs > 0.0)) fail("t_bs must be > 0");
  if (p.mu != p.lambda && !opts.allow_mu_neq_lambda)
    fail("mu must equal lambda (set the override to explore mu != lambda)");

  if (code.k < 1) fail("k must be >= 1");
  if (code.n_code < code.k) fail("n must be >= k");
  if (opts.analytic && static_cast<double>(code.k) > p.n_c)
    fail("k must not exceed n_c");

  if (p.t_bs <= p.t_d)
    rep.warnings.push_back("t_bs <= t_d: the model assumes BS downloads are much slower than D2D");
  return rep;
}

long cached_file_count(const StorageBudget& budget, const CodeParams& code) {
  if (!(budget.file_size_bits > 0.0) || !(budget.capacity_bits > 0.0) || budget.library_size < 1)
    throw std::invalid_argument("cached_file_count: invalid budget");
  const double symbol_bits = budget.file_size_bits / code.k;
  const long fits = static_cast<long>(std::floor(budget.capacity_bits / symbol_bits + 1e-9));
  return std::min(budget.library_size, fits);
}

namespace {

using nlohmann::json;

json parse_object(const std::string& text) {
  json j = json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  return j;
}

void reject_unknown(const json& j, std::initializer_list<const char*> known) {
  for (const auto& item : j.items()) {
    if (std::none_of(known.begin(), known.end(),
                     [&](const char* k) { return item.key() == k; })) {
      throw std::invalid_argument("unknown config key: " + item.key());
    }
  }
}

double get_num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw std::invalid_argument(std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

}  // namespace

SystemParams system_params_from_json(const std::string& text, const SystemParams& base) {
  const json j = parse_object(text);
  reject_unknown(j, {"M", "C", "M_c", "n", "n_c", "lambda", "mu", "omega", "delta", "t_d", "t_bs"});
  SystemParams p = base;
  p.M = get_num(j, "M", p.M);
  p.C = get_num(j, "C", p.C);
  p.M_c = get_num(j, "M_c", p.M_c);
  p.n = get_num(j, "n", p.n);
  p.n_c = get_num(j, "n_c", p.n_c);
  p.lambda = get_num(j, "lambda", p.lambda);
  p.mu = get_num(j, "mu", p.mu);
  p.omega = get_num(j, "omega", p.omega);
  p.delta = get_num(j, "delta", p.delta);
  p.t_d = get_num(j, "t_d", p.t_d);
  p.t_bs = get_num(j, "t_bs", p.t_bs);
  // Keep the cell-level totals coherent when only per-cluster values are given.
  if (j.contains("M_c") && !j.contains("M")) p.M = p.M_c * p.C;
  if (j.contains("n_c") && !j.contains("n")) p.n = p.n_c * p.C;
  return p;
}

CodeParams code_params_from_json(const std::string& text, const CodeParams& base) {
  const json j = parse_object(text);
  reject_unknown(j, {"n_code", "k"});
  CodeParams c = base;
  c.n_code = static_cast<int>(get_num(j, "n_code", c.n_code));
  c.k = static_cast<int>(get_num(j, "k", c.k));
  return c;
}

StorageBudget storage_budget_from_json(const std::string& text, const StorageBudget& base) {
  const json j = parse_object(text);
  reject_unknown(j, {"file_size_bits", "capacity_bits", "library_size"});
  StorageBudget b = base;
  b.file_size_bits = get_num(j, "file_size_bits", b.file_size_bits);
  b.capacity_bits = get_num(j, "capacity_bits", b.capacity_bits);
  b.library_size = static_cast<long>(get_num(j, "library_size", b.library_size));
  return b;
}

std::string to_json(const SystemParams& p) {
  json j;
  j["M"] = p.M;
  j["C"] = p.C;
  j["M_c"] = p.M_c;
  j["n"] = p.n;
  j["n_c"] = p.n_c;
  j["lambda"] = p.lambda;
  j["mu"] = p.mu;
  j["omega"] = p.omega;
  j["delta"] = p.delta;
  j["t_d"] = p.t_d;
  j["t_bs"] = p.t_bs;
  return j.dump();
}

}  // namespace d2dcache
