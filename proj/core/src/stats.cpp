#include "tailsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace tailsim::stats {

namespace {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

}  // namespace

EstimatorReport mean_report(std::span<const double> values, std::uint64_t seed) {
  if (values.empty()) throw std::invalid_argument("mean_report: no values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) {
    double d = v - mean;
    ss += d * d;
  }
  double sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  EstimatorReport r;
  r.estimate = mean;
  r.std_error = sd / std::sqrt(static_cast<double>(values.size()));
  r.n = values.size();
  r.ci_low = r.estimate - 1.96 * r.std_error;
  r.ci_high = r.estimate + 1.96 * r.std_error;
  r.seed = seed;
  return r;
}

void add_trimmed_diagnostic(EstimatorReport& report, std::span<const double> values,
                            double trim_fraction) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t k = static_cast<std::size_t>(trim_fraction * static_cast<double>(sorted.size()));
  if (2 * k >= sorted.size()) return;
  double s = 0.0;
  for (std::size_t i = k; i < sorted.size() - k; ++i) s += sorted[i];
  double trimmed = s / static_cast<double>(sorted.size() - 2 * k);
  report.meta["trimmed_mean"] = format_double(trimmed);
  report.meta["trim_fraction"] = format_double(trim_fraction);
}

double z_between(const EstimatorReport& a, const EstimatorReport& b) {
  double diff = a.estimate - b.estimate;
  double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
  if (se == 0.0) return diff == 0.0 ? 0.0 : std::copysign(1e9, diff);
  return diff / se;
}

TwoSidedCheck paired_check(std::span<const double> lhs_values, std::span<const double> rhs_values,
                           std::uint64_t seed) {
  if (lhs_values.size() != rhs_values.size())
    throw std::invalid_argument("paired_check: size mismatch");
  TwoSidedCheck c;
  c.lhs = mean_report(lhs_values, seed);
  c.rhs = mean_report(rhs_values, seed);
  std::vector<double> diffs(lhs_values.size());
  for (std::size_t i = 0; i < diffs.size(); ++i) diffs[i] = lhs_values[i] - rhs_values[i];
  EstimatorReport d = mean_report(diffs, seed);
  c.zscore = d.std_error == 0.0 ? (d.estimate == 0.0 ? 0.0 : std::copysign(1e9, d.estimate))
                                : d.estimate / d.std_error;
  return c;
}

double ks_statistic_uniform(std::vector<double> u) {
  if (u.empty()) throw std::invalid_argument("ks_statistic_uniform: no samples");
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double hi = (static_cast<double>(i) + 1.0) / n - u[i];
    double lo = u[i] - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 101; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, s));
}

double ks_pvalue(double statistic, std::size_t n) {
  double sq = std::sqrt(static_cast<double>(n));
  // Stephens' finite-sample adjustment
  double lambda = (sq + 0.12 + 0.11 / sq) * statistic;
  return kolmogorov_sf(lambda);
}

double two_sample_ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("two_sample_ks: no samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double two_sample_ks_pvalue(double statistic, std::size_t n1, std::size_t n2) {
  double ne = static_cast<double>(n1) * static_cast<double>(n2) /
              (static_cast<double>(n1) + static_cast<double>(n2));
  return kolmogorov_sf(std::sqrt(ne) * statistic);
}

namespace {

// regularized upper incomplete gamma Q(a, x), series/continued-fraction
double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    // P(a,x) by series, return 1 - P
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    double p = sum * std::exp(-x + a * std::log(x) - gln);
    return std::min(1.0, std::max(0.0, 1.0 - p));
  }
  // Q(a,x) by Lentz continued fraction
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  double q = std::exp(-x + a * std::log(x) - gln) * h;
  return std::min(1.0, std::max(0.0, q));
}

}  // namespace

double chi_square_sf(double x, double dof) {
  if (dof <= 0.0) throw std::invalid_argument("chi_square_sf: dof must be > 0");
  if (x <= 0.0) return 1.0;
  return gamma_q(dof / 2.0, x / 2.0);
}

ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                               int fitted_parameters) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  ChiSquareResult r;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) throw std::invalid_argument("chi_square_gof: nonpositive expectation");
    double d = observed[i] - expected[i];
    r.statistic += d * d / expected[i];
  }
  r.dof = static_cast<double>(observed.size()) - 1.0 - fitted_parameters;
  if (r.dof <= 0.0) throw std::invalid_argument("chi_square_gof: no degrees of freedom");
  r.pvalue = chi_square_sf(r.statistic, r.dof);
  return r;
}

WilsonInterval wilson_interval(double successes, double trials, double z) {
  if (trials <= 0.0) return {0.0, 1.0};
  double p = successes / trials;
  double z2 = z * z;
  double denom = 1.0 + z2 / trials;
  double center = (p + z2 / (2.0 * trials)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

CorrelationReport correlation_report(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("correlation_report: need paired samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  CorrelationReport r;
  r.n = x.size();
  if (sxx == 0.0 || syy == 0.0) {
    r.correlation = 0.0;
  } else {
    r.correlation = sxy / std::sqrt(sxx * syy);
  }
  r.std_error = 1.0 / std::sqrt(n);
  r.zscore = r.correlation / r.std_error;
  return r;
}

}  // namespace tailsim::stats
