#pragma once

#include <array>
#include <utility>
#include <vector>

#include "d2dcache/kernels.hpp"
#include "d2dcache/request.hpp"

namespace d2dcache {

/// Joint law of the attempt-chain state for one request type: gamma(j, g, d)
/// is the probability of reaching attempt j with g useful list nodes of which
/// d depart during the slot, after j-1 successful downloads. Entries with
/// d > g are identically zero.
class GammaTable {
 public:
  GammaTable(int depth, int g_max, int request_type);

  double at(int j, int g, int d) const {
    if (j < 1 || j > depth_ || g < 0 || g > g_max_ || d < 0 || d > g) return 0.0;
    return data_[(static_cast<std::size_t>(j - 1) * (g_max_ + 1) + g) * (g_max_ + 1) + d];
  }
  double& slot(int j, int g, int d) {
    return data_[(static_cast<std::size_t>(j - 1) * (g_max_ + 1) + g) * (g_max_ + 1) + d];
  }

  int depth() const { return depth_; }
  int g_max() const { return g_max_; }
  int request_type() const { return request_type_; }

 private:
  int depth_;
  int g_max_;
  int request_type_;
  std::vector<double> data_;
};

/// Builds gamma up to depth k-i. The recursion only couples states with
/// g' - d' = g + 1 (a successful slot consumes the contacted node), so
///   gamma_j(g,d) = theta(d,g) * sum_{g'>g} ((g+1)/g') gamma_{j-1}(g', g'-g-1).
GammaTable build_gamma(const RequestSnapshot& snapshot, const DeathProcessKernel& kernel, int k,
                       int request_type, const TruncationPolicy& policy = {});

/// Probability that the first D2D attempt fails (requester departs, no useful
/// node, or the contacted node departs).
double first_attempt_failure(const RequestSnapshot& snapshot, const DeathProcessKernel& kernel,
                             int request_type, const TruncationPolicy& policy = {});

/// Probability that all k-i needed symbols are collected over D2D.
double full_recovery(const GammaTable& table, const DeathProcessKernel& kernel, int k,
                     int request_type);

/// Probability of exactly j successful downloads followed by a failed
/// attempt, 1 <= j <= k-1-i. Zero outside that range.
double partial_recovery(const GammaTable& table, const DeathProcessKernel& kernel, int j, int k,
                        int request_type);

struct PhaseAggregate {
  double eta = 0.0;   // mean symbols over D2D
  double tbar = 0.0;  // mean D2D time
};

/// eta_i and Tbar_i from the outcome probabilities. The total-failure event
/// is charged exactly once, with delay t_d.
PhaseAggregate aggregate(double p_fail_first, const std::vector<double>& p_partial, double p_full,
                         int k, int request_type, double t_d);

/// Mix of the two request types: value = v1 * p_s + v0 * (1 - p_s).
std::pair<double, double> combine(double eta_0, double tbar_0, double eta_1, double tbar_1,
                                  double p_s);

/// Complete outcome distribution of the D2D phase for both request types.
struct D2DOutcomeDistribution {
  std::array<double, 2> p_fail_first = {0.0, 0.0};
  std::array<std::vector<double>, 2> p_partial;  // index j-1, j = 1..k-1-i
  std::array<double, 2> p_full = {0.0, 0.0};
  std::array<double, 2> eta_i = {0.0, 0.0};
  std::array<double, 2> tbar_i = {0.0, 0.0};
  double eta = 0.0;
  double tbar_eta = 0.0;
  double p_s = 0.0;
  // Largest excursion of any raw outcome probability outside [0, 1] before
  // the final clamp; a numerical-quality diagnostic.
  double max_excursion = 0.0;
};

D2DOutcomeDistribution build_outcomes(const RequestSnapshot& snapshot, int k, double mu,
                                      double t_d, const TruncationPolicy& policy = {});

}  // namespace d2dcache
