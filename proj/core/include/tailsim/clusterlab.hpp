#pragma once

// Block machinery for the cluster structure of extremes: block extraction,
// the empirical cluster measure and its functionals (extremal index mass,
// extreme value index, variance functionals), anticlustering / tightness
// diagnostics and limit-distribution tests for the point process of
// clusters.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tailsim/pathkit.hpp"
#include "tailsim/procsim.hpp"
#include "tailsim/stats.hpp"
#include "tailsim/tailcore.hpp"

namespace tailsim::clusterlab {

using pathkit::NormChoice;
using pathkit::Path;
using procsim::ProcessModel;
using stats::EstimatorReport;
using tailcore::TailLaw;

struct ClusterBlocks {
  std::vector<Path> blocks;          // each recentred to start at 0, scaled by 1/a_T
  std::vector<double> scaled_times;  // i / m_T with m_T = T / r_T
  double a_T = 1.0;
  double r_T = 1.0;
  double T = 1.0;
  std::optional<double> u_T;          // set when thresholded rather than scaled
  double discarded_fraction = 0.0;    // trailing partial block share of [0, T]
};

// disjoint blocks a_T^{-1} X over [(i-1) r_T, i r_T); the trailing partial
// block is discarded and recorded. `phase` offsets the block grid.
ClusterBlocks extract_blocks(const Path& path, double r_T, double a_T, double phase = 0.0);

struct ClusterFunctional {
  std::string name;
  std::function<double(const Path&)> fn;
  double operator()(const Path& p) const { return fn(p); }
};

ClusterFunctional K_exceedance();          // 1{sup ||y|| > 1}
ClusterFunctional K_log();                 // int log_+ ||y_s|| ds
ClusterFunctional K_exceed_level(double x);  // 1{sup ||y|| > x}

// random-shift spot check of shift invariance; throws on failure
void check_shift_invariant(const ClusterFunctional& K, const Path& sample, std::uint64_t seed);

// (sum_i K(block_i)) / (T * marginal_tail) with a block-bootstrap standard
// error (whole blocks resampled with replacement)
EstimatorReport empirical_cluster_measure(const ClusterBlocks& blocks, const ClusterFunctional& K,
                                          double marginal_tail, std::uint64_t seed,
                                          std::size_t bootstrap = 1000);

// occupation fraction of {||X_t|| > u} over the window (the plug-in
// replacement for the marginal tail under thresholding)
double empirical_exceedance_fraction(const Path& path, double u,
                                     NormChoice norm = NormChoice::sup_abs);

// variance functional of the extreme-value-index estimator:
// gamma * int E[(||Y_t|| and 1)^alpha] dt, the per-draw integral evaluated
// exactly on the piecewise representation
EstimatorReport gamma_variance_functional(const TailLaw& tail, std::size_t n, std::uint64_t seed,
                                          int workers = 0);

struct CurveTable {
  std::vector<double> x;
  std::vector<double> estimate;
  std::vector<double> std_error;
  std::vector<double> lo;  // Wilson or normal band
  std::vector<double> hi;
  std::size_t n = 0;
  std::map<std::string, double> meta;
};

// P(sup over t <= |s| <= r_T of ||X_s|| > a_T x | ||X(0)|| > a_T) on a
// grid of separations t, estimated by rejection conditioning at a
// stationary interior time
CurveTable anticlustering_diagnostic(const ProcessModel& model, double a_T, double r_T,
                                     const std::vector<double>& t_grid, double x,
                                     std::size_t n_conditioning_events, std::uint64_t seed,
                                     std::size_t max_windows = 0, int workers = 0);

struct FunctionalComparison {
  std::string name;
  double ensemble_mean = 0.0;
  double law_mean = 0.0;
  double zscore = 0.0;
};

struct ConditionalTailReport {
  double x_level = 0.0;
  std::size_t accepted = 0;
  double acceptance_rate = 0.0;
  std::vector<FunctionalComparison> panel;
  double max_abs_z = 0.0;
  double pareto_ks_pvalue = 0.0;
};

// rejection-conditioned path ensembles at each level against the model's
// analytic tail law, compared on a fixed panel of bounded functionals
std::vector<ConditionalTailReport> conditional_tail_paths(const ProcessModel& model,
                                                          const std::vector<double>& x_levels,
                                                          double half_window, std::size_t n_events,
                                                          std::uint64_t seed, int workers = 0);

struct PoissonCountReport {
  std::vector<double> observed;  // histogram of per-window block exceedance counts
  std::vector<double> expected;
  double mean_expected = 0.0;
  double sample_mean = 0.0;
  stats::ChiSquareResult chi2;
  double times_uniform_ks_pvalue = 0.0;  // scaled positions of exceeding blocks
  double adjacent_count_corr_z = 0.0;    // across consecutive windows
  std::size_t n_windows = 0;
};

// per-window counts of blocks whose sup exceeds a_T x, tested against the
// Poisson(theta x^{-alpha}) limit of the point process of clusters
PoissonCountReport cluster_count_poisson_test(const ProcessModel& model, double theta, double r_T,
                                              double x, double T, std::size_t n_windows,
                                              std::uint64_t seed, int workers = 0);

struct RunningMaxReport {
  CurveTable table;  // x, empirical CDF of a_T^{-1} window sup, limit CDF
  double sup_discrepancy = 0.0;
  double theta_hat = 0.0;      // -log ecdf(x) x^alpha at the grid point nearest 1
  double theta_hat_se = 0.0;
  std::size_t n_windows = 0;
};

// empirical law of the scaled running maximum against exp(-theta x^{-alpha});
// mass_factor carries the exact finite-T window mass for the prelimit
// identity of the moving-maxima class (1 for the asymptotic law)
RunningMaxReport running_max_law(const ProcessModel& model, double theta, double T,
                                 const std::vector<double>& x_grid, std::size_t n_windows,
                                 std::uint64_t seed, int workers = 0, double mass_factor = 1.0);

// ratio P(w'(X, 0, b-a, delta) > x eps) / P(||X_0|| > x) per delta
CurveTable tightness_diagnostic(const ProcessModel& model, double a, double b,
                                const std::vector<double>& delta_grid, double x, double eps,
                                std::size_t n, std::uint64_t seed, int workers = 0);

}  // namespace tailsim::clusterlab
