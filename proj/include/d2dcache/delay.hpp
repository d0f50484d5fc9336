#pragma once

#include "d2dcache/d2d.hpp"
#include "d2dcache/params.hpp"
#include "d2dcache/popularity.hpp"
#include "d2dcache/request.hpp"

namespace d2dcache {

struct DelayBreakdown {
  double p_hit = 0.0;
  double p_idle = 1.0;
  double tbar_eta = 0.0;
  double eta = 0.0;
  double p_s = 0.0;
  double tbar_dw = 0.0;
  double t_ref = 0.0;  // k * t_bs
  double speedup = 1.0;
  // The closed-form idle probability rests on a small-omega*T linearization;
  // set when omega * M_c * tbar_eta > 0.1 and the form is strained.
  bool idle_approx_strained = false;
};

/// Pr{I=1} = 1 / (1 + omega M_c Pr{H=1} Tbar_eta).
double idle_probability(double omega, double m_c, double p_hit, double tbar_eta);

/// Mean file download delay:
///   Pr{H=0} k t_bs + Pr{I=1}Pr{H=1}(Tbar_eta + (k - p_s - eta) t_bs)
///   + Pr{I=0}Pr{H=1}(k - p_s) t_bs.
double average_download_delay(double p_hit, double p_idle, double p_s, double eta,
                              double tbar_eta, int k, double t_bs);

/// T_ref / Tbar_dw with T_ref = k t_bs.
double speedup(double tbar_dw, int k, double t_bs);

struct AnalyticResult {
  SystemParams params;
  CodeParams code;
  PopularityModel popularity;
  RequestSnapshot snapshot;
  D2DOutcomeDistribution outcomes;
  DelayBreakdown delay;
};

/// Full closed-form pipeline for one parameter point. Pure and deterministic:
/// identical inputs yield bit-identical results.
AnalyticResult evaluate(const SystemParams& params, const CodeParams& code,
                        const PopularityModel& popularity, const TruncationPolicy& policy = {});

}  // namespace d2dcache
