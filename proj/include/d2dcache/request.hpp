#pragma once

#include <array>
#include <optional>
#include <vector>

#include "d2dcache/kernels.hpp"
#include "d2dcache/params.hpp"

namespace d2dcache {

/// Distributions of the node populations seen at a request instant, and the
/// request-type decomposition. All pmf vectors are truncated per policy and
/// kept unnormalized; the residual mass is a quality diagnostic, never folded
/// back in.
struct RequestSnapshot {
  std::vector<double> p_y;   // storage nodes at the start of the update interval
  std::vector<double> p_x1;  // DS-list nodes alive at the request
  std::vector<double> p_q;   // storage nodes at the request
  std::vector<double> p_v;   // regular nodes at the request
  std::vector<double> p_r1_given_x1;
  double p_r1 = 0.0;
  std::array<std::vector<double>, 2> p_x1_given_r;  // posterior per request type
  // False when Pr{R=i} = 0: the conditional is undefined and the branch
  // carries zero weight downstream.
  std::array<bool, 2> r_branch_defined = {true, true};
  double mean_x1 = 0.0;
  double mean_q = 0.0;
  double delta = 0.0;
  bool instantaneous = false;
};

/// Full snapshot for delta > 0 (branches to the instantaneous path below
/// delta = 1e-9).
RequestSnapshot build_request_snapshot(const SystemParams& params,
                                       const TruncationPolicy& policy = {});

/// Closed forms for delta = 0: Pr{X=x} = pi_x(n_c), Pr{R=1} = n_c/M_c,
/// Pr{R=1|X=x} = sum_m (x/m) pi_{m-x}(M_c - n_c).
RequestSnapshot instantaneous_snapshot(const SystemParams& params,
                                       const TruncationPolicy& policy = {});

// Element-wise surfaces of the same laws (the snapshot builder is the
// production path; these recompute the requested entry).
double storage_at_update_pmf(int y, const SystemParams& params, const TruncationPolicy& policy = {});
double ds_list_alive_pmf(int x, const SystemParams& params, const TruncationPolicy& policy = {});
double storage_total_pmf(int q, const SystemParams& params, const TruncationPolicy& policy = {});
double regular_pmf(int v, const SystemParams& params, const TruncationPolicy& policy = {});

/// Pr{R=1 | X1=x}; requires p_v, mean_q, mean_x1 of the snapshot. Zero at x=0.
double request_type_given_x1(int x, const RequestSnapshot& snapshot,
                             const TruncationPolicy& policy = {});

/// Pr{R=1} = sum_x Pr{R=1|X1=x} Pr{X1=x}.
double request_from_list_prob(const RequestSnapshot& snapshot);

/// Bayes posterior Pr{X1=x | R=i}; empty when Pr{R=i} = 0 (the caller treats
/// that branch as carrying zero weight).
std::optional<double> ds_list_alive_given_request_type(int x, int i,
                                                       const RequestSnapshot& snapshot);

}  // namespace d2dcache
