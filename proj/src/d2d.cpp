#include "d2dcache/d2d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace d2dcache {

namespace {

const std::vector<double>& posterior(const RequestSnapshot& s, int i) {
  if (i != 0 && i != 1) throw std::invalid_argument("request type must be 0 or 1");
  if (!s.r_branch_defined[i])
    throw std::invalid_argument("posterior undefined: Pr{R=i} is zero for this configuration");
  return s.p_x1_given_r[i];
}

double posterior_at(const std::vector<double>& post, int x) {
  return x >= 0 && x < static_cast<int>(post.size()) ? post[x] : 0.0;
}

}  // namespace

GammaTable::GammaTable(int depth, int g_max, int request_type)
    : depth_(depth), g_max_(g_max), request_type_(request_type),
      data_(static_cast<std::size_t>(depth) * (g_max + 1) * (g_max + 1), 0.0) {}

GammaTable build_gamma(const RequestSnapshot& snapshot, const DeathProcessKernel& kernel, int k,
                       int request_type, const TruncationPolicy& policy) {
  (void)policy;  // the posterior vector is already truncated per policy
  const auto& post = posterior(snapshot, request_type);
  const int depth = std::max(1, k - request_type);
  const int gm = static_cast<int>(post.size()) - 1 + k;  // headroom: chains only shrink g
  GammaTable table(depth, gm, request_type);

  std::vector<double> theta((gm + 1) * (gm + 1), 0.0);
  for (int g = 0; g <= gm; ++g)
    for (int d = 0; d <= g; ++d) theta[g * (gm + 1) + d] = departure_count_pmf(d, g, kernel);

  for (int g = 0; g <= gm; ++g) {
    const double px = posterior_at(post, g + request_type);
    if (px == 0.0) continue;
    for (int d = 0; d <= g; ++d) table.slot(1, g, d) = px * theta[g * (gm + 1) + d];
  }
  for (int j = 2; j <= depth; ++j) {
    for (int g = 0; g <= gm; ++g) {
      // Only predecessors with g' - d' = g + 1 feed this state.
      double carried = 0.0;
      for (int gp = g + 1; gp <= gm; ++gp) {
        carried += (g + 1.0) / gp * table.at(j - 1, gp, gp - g - 1);
      }
      if (carried == 0.0) continue;
      for (int d = 0; d <= g; ++d) table.slot(j, g, d) = theta[g * (gm + 1) + d] * carried;
    }
  }
  return table;
}

double first_attempt_failure(const RequestSnapshot& snapshot, const DeathProcessKernel& kernel,
                             int request_type, const TruncationPolicy& policy) {
  (void)policy;
  const auto& post = posterior(snapshot, request_type);
  const int gm = static_cast<int>(post.size()) - 1;
  double picked_departing = 0.0;
  for (int g = 1; g <= gm; ++g) {
    const double px = posterior_at(post, g + request_type);
    if (px == 0.0) continue;
    double inner = 0.0;
    for (int d = 1; d <= g; ++d) {
      inner += static_cast<double>(d) / g * departure_count_pmf(d, g, kernel);
    }
    picked_departing += px * inner;
  }
  const double stay = std::exp(-kernel.mu * kernel.window);
  return 1.0 + stay * (posterior_at(post, request_type) + picked_departing - 1.0);
}

double full_recovery(const GammaTable& table, const DeathProcessKernel& kernel, int k,
                     int request_type) {
  const int need = k - request_type;
  if (need <= 0) return 1.0;  // nothing to download
  double total = 0.0;
  for (int g = 1; g <= table.g_max(); ++g) {
    for (int d = 0; d <= g; ++d) {
      total += (g - d) / static_cast<double>(g) * table.at(need, g, d);
    }
  }
  return std::exp(-need * kernel.mu * kernel.window) * total;
}

double partial_recovery(const GammaTable& table, const DeathProcessKernel& kernel, int j, int k,
                        int request_type) {
  if (j < 1 || j > k - 1 - request_type) return 0.0;
  const double mtd = kernel.mu * kernel.window;
  const double a = std::exp(-(j + 1) * mtd);
  const double b = std::exp(-j * mtd) * -std::expm1(-mtd);
  double total = table.at(j + 1, 0, 0) * a;
  for (int g = 1; g <= table.g_max(); ++g) {
    for (int d = 0; d <= g; ++d) {
      total += d / static_cast<double>(g) * table.at(j + 1, g, d) * a +
               (g - d) / static_cast<double>(g) * table.at(j, g, d) * b;
    }
  }
  return total;
}

PhaseAggregate aggregate(double p_fail_first, const std::vector<double>& p_partial, double p_full,
                         int k, int request_type, double t_d) {
  const int need = k - request_type;
  if (need <= 0) return {0.0, 0.0};
  double eta = need * p_full;
  double partial_mass = 0.0;
  for (std::size_t idx = 0; idx < p_partial.size(); ++idx) {
    eta += (idx + 1.0) * p_partial[idx];
    partial_mass += p_partial[idx];
  }
  const double tbar = t_d * (eta + p_fail_first + partial_mass);
  return {eta, tbar};
}

std::pair<double, double> combine(double eta_0, double tbar_0, double eta_1, double tbar_1,
                                  double p_s) {
  if (p_s < 0.0 || p_s > 1.0) throw std::invalid_argument("p_s must lie in [0, 1]");
  return {eta_1 * p_s + eta_0 * (1.0 - p_s), tbar_1 * p_s + tbar_0 * (1.0 - p_s)};
}

D2DOutcomeDistribution build_outcomes(const RequestSnapshot& snapshot, int k, double mu,
                                      double t_d, const TruncationPolicy& policy) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  D2DOutcomeDistribution dist;
  dist.p_s = snapshot.p_r1;
  const DeathProcessKernel kernel{mu, t_d};

  auto clamp_track = [&dist](double p) {
    const double excursion = std::max(0.0, std::max(p - 1.0, -p));
    dist.max_excursion = std::max(dist.max_excursion, excursion);
    return std::clamp(p, 0.0, 1.0);
  };

  for (int i : {0, 1}) {
    const int need = k - i;
    if (need <= 0) {
      dist.p_full[i] = 1.0;
      continue;
    }
    const double weight = i == 1 ? dist.p_s : 1.0 - dist.p_s;
    if (!snapshot.r_branch_defined[i] || weight <= 0.0) continue;  // zero-weight branch

    const GammaTable table = build_gamma(snapshot, kernel, k, i, policy);
    dist.p_fail_first[i] = clamp_track(first_attempt_failure(snapshot, kernel, i, policy));
    dist.p_full[i] = clamp_track(full_recovery(table, kernel, k, i));
    dist.p_partial[i].resize(std::max(0, k - 1 - i));
    for (int j = 1; j <= k - 1 - i; ++j) {
      dist.p_partial[i][j - 1] = clamp_track(partial_recovery(table, kernel, j, k, i));
    }
    const PhaseAggregate agg = aggregate(dist.p_fail_first[i], dist.p_partial[i], dist.p_full[i],
                                         k, i, t_d);
    dist.eta_i[i] = agg.eta;
    dist.tbar_i[i] = agg.tbar;
  }

  std::tie(dist.eta, dist.tbar_eta) =
      combine(dist.eta_i[0], dist.tbar_i[0], dist.eta_i[1], dist.tbar_i[1], dist.p_s);
  return dist;
}

}  // namespace d2dcache
