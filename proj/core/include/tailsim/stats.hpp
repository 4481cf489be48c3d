#pragma once

// Monte Carlo reporting and the small pile of distributional tests the
// diagnostics lean on (Kolmogorov-Smirnov, chi-square, Wilson intervals).

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace tailsim::stats {

struct EstimatorReport {
  double estimate = 0.0;
  double std_error = 0.0;  // sample std / sqrt(n)
  std::size_t n = 0;
  double ci_low = 0.0;  // estimate -/+ 1.96 std_error
  double ci_high = 0.0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> meta;
};

EstimatorReport mean_report(std::span<const double> values, std::uint64_t seed);

// symmetric trimming diagnostic for heavy-tailed summands; records a
// "trimmed_mean" entry in meta (both estimates are reported, the plain
// mean stays authoritative)
void add_trimmed_diagnostic(EstimatorReport& report, std::span<const double> values,
                            double trim_fraction = 0.001);

struct TwoSidedCheck {
  EstimatorReport lhs;
  EstimatorReport rhs;
  double zscore = 0.0;
};

double z_between(const EstimatorReport& a, const EstimatorReport& b);

// paired-design check: z-score of mean(diffs) against zero
TwoSidedCheck paired_check(std::span<const double> lhs_values, std::span<const double> rhs_values,
                           std::uint64_t seed);

// --- distribution tests ---------------------------------------------------

// sup |F_n - F| for samples already transformed through the target CDF
double ks_statistic_uniform(std::vector<double> u);
// asymptotic Kolmogorov tail probability P(sup > stat) at sample size n
double ks_pvalue(double statistic, std::size_t n);
double kolmogorov_sf(double lambda);

double two_sample_ks_statistic(std::vector<double> a, std::vector<double> b);
double two_sample_ks_pvalue(double statistic, std::size_t n1, std::size_t n2);

// survival function of the chi-square distribution (regularized upper
// incomplete gamma)
double chi_square_sf(double x, double dof);

// chi-square goodness of fit of observed counts against expected counts;
// bins with tiny expectation should be merged by the caller
struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double pvalue = 1.0;
};
ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                               int fitted_parameters = 0);

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};
WilsonInterval wilson_interval(double successes, double trials, double z = 1.96);

double normal_cdf(double x);

// Pearson correlation with a plain 1/sqrt(n) null standard error
struct CorrelationReport {
  double correlation = 0.0;
  double std_error = 0.0;
  double zscore = 0.0;
  std::size_t n = 0;
};
CorrelationReport correlation_report(std::span<const double> x, std::span<const double> y);

}  // namespace tailsim::stats
