#include "d2dcache/request.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace d2dcache {

namespace {

constexpr double kInstantaneousDelta = 1e-9;

// sum_{m>=c} (1 - e^{-m omega delta}) pi_{m-c}(rho), the request-weighted
// mass of the complementary population, truncated at trunc(rho).
double request_weight(int c, double rho, double omega, double delta,
                      const TruncationPolicy& policy) {
  const int t = truncation_index(rho, policy).value;
  double total = 0.0;
  for (int j = t; j >= 0; --j) {
    total += -std::expm1(-(c + j) * omega * delta) * poisson_pmf(j, rho);
  }
  return total;
}

double mean_of(const std::vector<double>& pmf) {
  double m = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) m += i * pmf[i];
  return m;
}

// Pr{R=1|X1=x} for x > 0 with the stationary approximation for Q given X1:
//   sum_{q>=x} sum_v (x/(q+v)) Pr{V=v} pi_{q-x}(E[Q]-E[X1]).
double type_conditional(int x, const std::vector<double>& p_v, double rho_diff,
                        const TruncationPolicy& policy) {
  if (x <= 0) return 0.0;
  const int t_diff = truncation_index(rho_diff, policy).value;
  double total = 0.0;
  for (int dq = 0; dq <= t_diff; ++dq) {
    const double pd = poisson_pmf(dq, rho_diff);
    double inner = 0.0;
    for (std::size_t v = 0; v < p_v.size(); ++v) {
      inner += p_v[v] / (x + dq + static_cast<double>(v));
    }
    total += pd * inner;
  }
  return x * total;
}

void finish_snapshot(RequestSnapshot& s, const TruncationPolicy& policy) {
  s.mean_x1 = mean_of(s.p_x1);
  s.mean_q = mean_of(s.p_q);
  const double rho_diff = std::max(0.0, s.mean_q - s.mean_x1);

  const int ts = static_cast<int>(s.p_x1.size()) - 1;
  s.p_r1_given_x1.assign(ts + 1, 0.0);
  for (int x = 1; x <= ts; ++x)
    s.p_r1_given_x1[x] = type_conditional(x, s.p_v, rho_diff, policy);
  s.p_r1 = 0.0;
  for (int x = 0; x <= ts; ++x) s.p_r1 += s.p_r1_given_x1[x] * s.p_x1[x];

  for (int i : {0, 1}) {
    const double pr = i == 1 ? s.p_r1 : 1.0 - s.p_r1;
    if (pr <= 0.0) {
      s.r_branch_defined[i] = false;
      s.p_x1_given_r[i].clear();
      continue;
    }
    s.p_x1_given_r[i].assign(ts + 1, 0.0);
    for (int x = 0; x <= ts; ++x) {
      const double cond = i == 1 ? s.p_r1_given_x1[x] : 1.0 - s.p_r1_given_x1[x];
      s.p_x1_given_r[i][x] = cond * s.p_x1[x] / pr;
    }
  }
}

}  // namespace

RequestSnapshot build_request_snapshot(const SystemParams& p, const TruncationPolicy& policy) {
  if (p.delta < kInstantaneousDelta) return instantaneous_snapshot(p, policy);

  RequestSnapshot s;
  s.delta = p.delta;
  const int ts = truncation_index(p.n_c, policy).value;
  const int tv = truncation_index(p.M_c - p.n_c, policy).value;
  const double denom = request_in_interval_prob(p.omega, p.delta, p.M_c, policy);

  s.p_y.assign(ts + 1, 0.0);
  for (int y = 0; y <= ts; ++y) {
    s.p_y[y] = poisson_pmf(y, p.n_c) *
               request_weight(y, p.M_c - p.n_c, p.omega, p.delta, policy) / denom;
  }
  // The total storage count at a request instant obeys the same law as the
  // count at the interval start.
  s.p_q = s.p_y;

  s.p_x1.assign(ts + 1, 0.0);
  for (int y = 0; y <= ts; ++y) {
    for (int x = 0; x <= y; ++x) {
      s.p_x1[x] += s.p_y[y] * windowed_survivors_pmf(x, y, p.mu, p.delta);
    }
  }

  s.p_v.assign(tv + 1, 0.0);
  for (int v = 0; v <= tv; ++v) {
    s.p_v[v] = poisson_pmf(v, p.M_c - p.n_c) *
               request_weight(v, p.n_c, p.omega, p.delta, policy) / denom;
  }

  finish_snapshot(s, policy);
  return s;
}

RequestSnapshot instantaneous_snapshot(const SystemParams& p, const TruncationPolicy& policy) {
  RequestSnapshot s;
  s.delta = 0.0;
  s.instantaneous = true;
  const int ts = truncation_index(p.n_c, policy).value;
  const int tm = truncation_index(p.M_c - p.n_c, policy).value;

  s.p_x1.assign(ts + 1, 0.0);
  for (int x = 0; x <= ts; ++x) s.p_x1[x] = poisson_pmf(x, p.n_c);
  s.p_y = s.p_x1;
  s.p_q = s.p_x1;
  s.p_v.assign(tm + 1, 0.0);
  for (int v = 0; v <= tm; ++v) s.p_v[v] = poisson_pmf(v, p.M_c - p.n_c);

  s.p_r1 = p.M_c > 0.0 ? p.n_c / p.M_c : 0.0;
  s.p_r1_given_x1.assign(ts + 1, 0.0);
  for (int x = 1; x <= ts; ++x) {
    double total = 0.0;
    for (int j = 0; j <= tm; ++j) {
      total += static_cast<double>(x) / (x + j) * poisson_pmf(j, p.M_c - p.n_c);
    }
    s.p_r1_given_x1[x] = total;
  }

  s.mean_x1 = mean_of(s.p_x1);
  s.mean_q = s.mean_x1;
  for (int i : {0, 1}) {
    const double pr = i == 1 ? s.p_r1 : 1.0 - s.p_r1;
    if (pr <= 0.0) {
      s.r_branch_defined[i] = false;
      s.p_x1_given_r[i].clear();
      continue;
    }
    s.p_x1_given_r[i].assign(ts + 1, 0.0);
    for (int x = 0; x <= ts; ++x) {
      const double cond = i == 1 ? s.p_r1_given_x1[x] : 1.0 - s.p_r1_given_x1[x];
      s.p_x1_given_r[i][x] = cond * s.p_x1[x] / pr;
    }
  }
  return s;
}

double storage_at_update_pmf(int y, const SystemParams& p, const TruncationPolicy& policy) {
  if (p.delta < kInstantaneousDelta)
    throw std::invalid_argument("storage_at_update_pmf: needs delta > 0 (use the instantaneous path)");
  if (y < 0) return 0.0;
  const double denom = request_in_interval_prob(p.omega, p.delta, p.M_c, policy);
  return poisson_pmf(y, p.n_c) * request_weight(y, p.M_c - p.n_c, p.omega, p.delta, policy) / denom;
}

double ds_list_alive_pmf(int x, const SystemParams& p, const TruncationPolicy& policy) {
  if (p.delta < kInstantaneousDelta)
    throw std::invalid_argument("ds_list_alive_pmf: needs delta > 0 (use the instantaneous path)");
  if (x < 0) return 0.0;
  const int ts = truncation_index(p.n_c, policy).value;
  double total = 0.0;
  for (int y = x; y <= ts; ++y) {
    total += storage_at_update_pmf(y, p, policy) * windowed_survivors_pmf(x, y, p.mu, p.delta);
  }
  return total;
}

double storage_total_pmf(int q, const SystemParams& p, const TruncationPolicy& policy) {
  if (q < 0) return 0.0;
  const double denom = request_in_interval_prob(p.omega, p.delta, p.M_c, policy);
  return poisson_pmf(q, p.n_c) * request_weight(q, p.M_c - p.n_c, p.omega, p.delta, policy) / denom;
}

double regular_pmf(int v, const SystemParams& p, const TruncationPolicy& policy) {
  if (v < 0) return 0.0;
  const double denom = request_in_interval_prob(p.omega, p.delta, p.M_c, policy);
  return poisson_pmf(v, p.M_c - p.n_c) * request_weight(v, p.n_c, p.omega, p.delta, policy) / denom;
}

double request_type_given_x1(int x, const RequestSnapshot& snapshot,
                             const TruncationPolicy& policy) {
  if (x <= 0) return 0.0;
  if (x < static_cast<int>(snapshot.p_r1_given_x1.size())) return snapshot.p_r1_given_x1[x];
  return type_conditional(x, snapshot.p_v, std::max(0.0, snapshot.mean_q - snapshot.mean_x1),
                          policy);
}

double request_from_list_prob(const RequestSnapshot& snapshot) {
  double total = 0.0;
  for (std::size_t x = 0; x < snapshot.p_x1.size(); ++x) {
    total += snapshot.p_r1_given_x1[x] * snapshot.p_x1[x];
  }
  return total;
}

std::optional<double> ds_list_alive_given_request_type(int x, int i,
                                                       const RequestSnapshot& snapshot) {
  if (i != 0 && i != 1) throw std::invalid_argument("request type must be 0 or 1");
  if (!snapshot.r_branch_defined[i]) return std::nullopt;
  if (x < 0 || x >= static_cast<int>(snapshot.p_x1_given_r[i].size())) return 0.0;
  return snapshot.p_x1_given_r[i][x];
}

}  // namespace d2dcache
