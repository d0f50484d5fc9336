#include "d2dcache/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace d2dcache {

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_poisson_pmf(int m, double rho) {
  if (m < 0 || rho < 0.0) throw std::invalid_argument("poisson_pmf: negative input");
  if (rho == 0.0) return m == 0 ? 0.0 : -HUGE_VAL;
  return m * std::log(rho) - rho - std::lgamma(m + 1.0);
}

double poisson_pmf(int m, double rho) { return std::exp(log_poisson_pmf(m, rho)); }

TruncationIndex truncation_index(double rho, const TruncationPolicy& policy) {
  if (rho < 0.0) throw std::invalid_argument("truncation_index: rho < 0");
  if (policy.epsilon <= 0.0 || policy.epsilon >= 1.0 || policy.hard_cap <= 0)
    throw std::invalid_argument("truncation_index: bad policy");
  for (int t = static_cast<int>(std::floor(rho)) + 1; t <= policy.hard_cap; ++t) {
    if (poisson_pmf(t, rho) < policy.epsilon) return {t, false};
  }
  return {policy.hard_cap, true};
}

double departure_count_pmf(int d, int g, const DeathProcessKernel& kernel) {
  if (kernel.mu < 0.0 || kernel.window < 0.0)
    throw std::invalid_argument("departure_count_pmf: negative kernel");
  if (d < 0 || d > g) return 0.0;
  if (g == 0) return 1.0;
  const double mw = kernel.mu * kernel.window;
  const double q = -std::expm1(-mw);  // per-node departure probability
  if (q == 0.0) return d == 0 ? 1.0 : 0.0;
  if (q == 1.0) return d == g ? 1.0 : 0.0;
  return std::exp(log_binomial(g, d) + d * std::log(q) - (g - d) * mw);
}

double departure_count_pmf_series(int d, int g, const DeathProcessKernel& kernel) {
  if (d < 0 || d > g) return 0.0;
  if (g == 0) return 1.0;
  const double mw = kernel.mu * kernel.window;
  auto partial = [&](int lo) {
    double total = 0.0;
    for (int ip = lo; ip <= g; ++ip) {
      double prod = 1.0;
      for (int j = lo; j <= g; ++j) {
        if (j != ip) prod *= static_cast<double>(j) / (j - ip);
      }
      total += std::exp(-ip * mw) * prod;
    }
    return total;
  };
  return partial(g - d) - partial(g - d + 1);
}

namespace {

// Adaptive Simpson with absolute tolerance.
double simpson_step(const std::function<double(double)>& f, double a, double fa, double b,
                    double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, fa, b, fb, m, fm, whole, tol, 40);
}

// Adaptive quadrature seeded with panel knots around a known feature scale;
// a bare adaptive rule can step straight over integrands whose support is a
// narrow layer inside the interval.
double integrate_with_knots(const std::function<double(double)>& f, double b, double t_scale,
                            double tol) {
  std::vector<double> knots{0.0, b};
  for (int j = -6; j <= 6; ++j) {
    const double t = t_scale * std::exp2(j);
    if (t > 0.0 && t < b) knots.push_back(t);
  }
  for (int j = 1; j < 8; ++j) knots.push_back(b * j / 8.0);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  double total = 0.0;
  const double panel_tol = tol / static_cast<double>(knots.size());
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    total += integrate(f, knots[i], knots[i + 1], panel_tol);
  }
  return total;
}

}  // namespace

double windowed_survivors_pmf(int x, int y, double mu, double delta) {
  if (delta <= 0.0) throw std::invalid_argument("windowed_survivors_pmf: delta must be > 0");
  if (mu < 0.0) throw std::invalid_argument("windowed_survivors_pmf: mu < 0");
  if (x < 0 || x > y) return 0.0;
  if (y == 0) return 1.0;
  if (mu == 0.0) return x == y ? 1.0 : 0.0;
  const double lb = log_binomial(y, x);
  auto f = [&](double t) {
    const double s = -mu * t;
    if (x == y) return std::exp(lb + x * s);
    if (s == 0.0) return 0.0;  // (1 - e^0)^(y-x) with y > x
    return std::exp(lb + x * s + (y - x) * std::log(-std::expm1(s)));
  };
  // The integrand peaks where the survival probability equals x/y.
  double t_scale;
  if (x == 0) {
    t_scale = std::log(std::max(y, 2) * 1.0) / mu;
  } else if (x == y) {
    t_scale = 1.0 / (mu * y);
  } else {
    t_scale = std::log(static_cast<double>(y) / x) / mu;
  }
  return integrate_with_knots(f, delta, t_scale, 1e-10) / delta;
}

double windowed_survivors_pmf_series(int x, int y, double mu, double delta) {
  if (delta <= 0.0) throw std::invalid_argument("windowed_survivors_pmf_series: delta must be > 0");
  if (x < 0 || x > y) return 0.0;
  if (y == 0) return 1.0;
  auto partial = [&](int lo) {
    double total = 0.0;
    for (int ip = lo; ip <= y; ++ip) {
      // (1 - e^{-ip mu delta}) / (ip mu) -> delta as ip -> 0
      const double base = ip == 0 ? delta : -std::expm1(-ip * mu * delta) / (ip * mu);
      double prod = 1.0;
      for (int j = lo; j <= y; ++j) {
        if (j != ip) prod *= static_cast<double>(j) / (j - ip);
      }
      total += base * prod;
    }
    return total;
  };
  return (partial(x) - partial(x + 1)) / delta;
}

double request_in_interval_prob(double omega, double delta, double m_c,
                                const TruncationPolicy& policy) {
  if (omega < 0.0 || delta < 0.0 || m_c < 0.0)
    throw std::invalid_argument("request_in_interval_prob: negative input");
  const int t = truncation_index(m_c, policy).value;
  double total = 0.0;
  for (int m = t; m >= 1; --m) {
    total += -std::expm1(-m * omega * delta) * poisson_pmf(m, m_c);
  }
  return total;
}

}  // namespace d2dcache
