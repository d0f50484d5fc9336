#include "d2dcache/delay.hpp"

#include <stdexcept>

namespace d2dcache {

double idle_probability(double omega, double m_c, double p_hit, double tbar_eta) {
  if (omega < 0.0 || m_c < 0.0 || p_hit < 0.0 || tbar_eta < 0.0)
    throw std::invalid_argument("idle_probability: negative input");
  return 1.0 / (1.0 + omega * m_c * p_hit * tbar_eta);
}

double average_download_delay(double p_hit, double p_idle, double p_s, double eta,
                              double tbar_eta, int k, double t_bs) {
  return (1.0 - p_hit) * k * t_bs +
         p_idle * p_hit * (tbar_eta + (k - p_s - eta) * t_bs) +
         (1.0 - p_idle) * p_hit * (k - p_s) * t_bs;
}

double speedup(double tbar_dw, int k, double t_bs) {
  if (!(tbar_dw > 0.0)) throw std::invalid_argument("speedup: delay must be positive");
  return k * t_bs / tbar_dw;
}

AnalyticResult evaluate(const SystemParams& params, const CodeParams& code,
                        const PopularityModel& popularity, const TruncationPolicy& policy) {
  const ValidationReport report = validate(params, code);
  if (!report.pass) {
    std::string what = "evaluate: invalid configuration:";
    for (const auto& e : report.errors) what += " " + e + ";";
    throw std::invalid_argument(what);
  }

  AnalyticResult r{params, code, popularity, {}, {}, {}};
  r.snapshot = build_request_snapshot(params, policy);
  r.outcomes = build_outcomes(r.snapshot, code.k, params.mu, params.t_d, policy);

  DelayBreakdown& b = r.delay;
  b.p_hit = popularity.hit_probability();
  b.p_s = r.outcomes.p_s;
  b.eta = r.outcomes.eta;
  b.tbar_eta = r.outcomes.tbar_eta;
  b.p_idle = idle_probability(params.omega, params.M_c, b.p_hit, b.tbar_eta);
  b.idle_approx_strained = params.omega * params.M_c * b.tbar_eta > 0.1;
  b.tbar_dw = average_download_delay(b.p_hit, b.p_idle, b.p_s, b.eta, b.tbar_eta, code.k,
                                     params.t_bs);
  b.t_ref = code.k * params.t_bs;
  b.speedup = speedup(b.tbar_dw, code.k, params.t_bs);
  return r;
}

}  // namespace d2dcache
