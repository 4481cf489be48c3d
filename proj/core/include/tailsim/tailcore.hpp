#pragma once

// Tail-object calculus: samplers for the tail process Y, the spectral
// tail process Theta, spectral processes Z and the cluster process Q,
// linked by the change-of-measure identities they satisfy; candidate
// extremal index estimators; and Monte Carlo checkers for the time-change,
// tilt-shift, tilted-independence and forward identities.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tailsim/pathkit.hpp"
#include "tailsim/stats.hpp"

namespace tailsim::tailcore {

using pathkit::NormChoice;
using pathkit::Path;
using stats::EstimatorReport;
using stats::TwoSidedCheck;

using PathSampler = std::function<Path(std::mt19937_64&)>;

// P(|Y_0| > x) = x^{-alpha} for x >= 1, by inverse CDF
double pareto_sample(double alpha, std::mt19937_64& gen);

// +1 with probability p, else -1 (extremal skewness)
double sample_sign(double skewness_p, std::mt19937_64& gen);

// Sampler bundle for one tail model. sample_theta draws the spectral
// tail process (||Theta(0)|| = 1 exactly), sample_y the tail process
// (||Y(0)|| Pareto(alpha), independent of Theta), sample_q the cluster
// process when the model is dissipative (sup ||Q|| = 1 exactly, compact
// support, anchored so the maximum sits at time 0).
struct TailLaw {
  double alpha = 1.0;
  NormChoice norm = NormChoice::sup_abs;
  PathSampler sample_theta;
  PathSampler sample_y;
  PathSampler sample_q;  // empty when unknown / not dissipative
  std::optional<double> theta_closed_form;
  // reference radius: sampled paths vanish outside [-R, R] (exactly for
  // bounded session laws, with high probability otherwise)
  double support_radius = 1.0;
  std::string name;

  bool dissipative() const { return static_cast<bool>(sample_q); }
};

// builds sample_y = Pareto(alpha) * Theta from a Theta sampler
TailLaw tail_law_from_theta(std::string name, double alpha, PathSampler theta,
                            double support_radius, PathSampler q = {},
                            std::optional<double> theta_closed_form = {});

struct SpectralLaw {
  double alpha = 1.0;
  NormChoice norm = NormChoice::sup_abs;
  PathSampler sample_z;  // E||Z_0||^alpha = 1, P(Z = 0) = 0
  std::string name;
};

// bounded path functional for the Monte Carlo checkers
struct PathFunctional {
  std::string name;
  std::function<double(const Path&)> fn;
  double bound = 1.0;  // declared sup bound, recorded for SE validity
  double operator()(const Path& p) const { return fn(p); }
};

PathFunctional constant_functional(double c);
// min(exceedance(y, level), cap)
PathFunctional capped_exceedance_functional(double level, double cap);
// 1{infargmax(y) <= t0}; 0-homogeneous and usable with check_tilt_shift
PathFunctional infargmax_indicator(double t0);
// 1{exceedance(y, level) > s}; shift-invariant, 0-homogeneous jointly in
// (y, level) -- at fixed level it is shift-invariant only
PathFunctional exceedance_indicator(double level, double s);
// ||y(t0)|| / ||y||_{[a,b]}* capped at `cap`; 0-homogeneous
PathFunctional normalized_value_functional(double t0, double a, double b, double cap);

// --- constructions ----------------------------------------------------------

struct TailFromQOptions {
  std::size_t pool_size = 20000;
  std::size_t check_n = 4000;  // Monte Carlo size for the normalization check
  std::uint64_t seed = 1;
  bool skip_normalization_check = false;
};

// Tail law built from a cluster process sampler: Y = Y_par * B^T Q /
// ||Q(-T)|| with (Q, T) drawn from the theta-weighted joint law (Q tilted
// by its alpha-integral, T from the piecewise-power conditional density).
// Construction verifies theta * integral E||Q_t||^alpha dt = 1 within 3
// standard errors.
TailLaw tail_from_q(const PathSampler& q_sampler, double alpha, double theta,
                    double support_radius, const TailFromQOptions& opts = {});

// spectral process Z built from a tail law: Z = J(B^T Y)^{-1/alpha} B^T Y
// with T uniform on [-R, R] and J the windowed alpha-energy under that
// density; E||Z_0||^alpha = 1 by construction
SpectralLaw spectral_from_tail(const TailLaw& tail, double half_width = 0.0);

EstimatorReport check_spectral_normalization(const SpectralLaw& spectral, std::size_t n,
                                             std::uint64_t seed, int workers = 0);

struct QFromTheta {
  PathSampler sample_q;         // weighted resampling over the pool
  EstimatorReport theta_hat;    // mean of (Theta*)^alpha / ||Theta||_alpha^alpha
  double effective_sample_size = 0.0;
  bool low_ess_warning = false;  // ESS / n < 0.1
};

// self-normalized importance sampler for Q given a Theta sampler; every
// emitted Q has sup norm exactly 1 and its maximum anchored at time 0
QFromTheta q_from_theta(const PathSampler& theta_sampler, double alpha, std::size_t pool_size,
                        std::uint64_t seed, NormChoice norm = NormChoice::sup_abs);

// --- candidate extremal index ----------------------------------------------

// mean of 1 / exceedance(Y_i, 1) over n tail process draws
EstimatorReport candidate_via_exceedance(const TailLaw& tail, std::size_t n, std::uint64_t seed,
                                         int workers = 0);

// mean of (Theta*)^alpha / ||Theta||_alpha^alpha
EstimatorReport candidate_via_theta(const TailLaw& tail, std::size_t n, std::uint64_t seed,
                                    int workers = 0);

// shot-noise conditional form: 1 / E[session length]
EstimatorReport candidate_conditional_shotnoise(
    const std::function<double(std::mt19937_64&)>& eta_sampler, std::size_t n, std::uint64_t seed,
    int workers = 0);

// --- identity checkers -------------------------------------------------------

// E[H(Y) 1{||Y_t|| > x}]  vs  x^{-alpha} E[H(x B^t Y) 1{x ||Y_{-t}|| > 1}],
// independent Monte Carlo streams on the two sides
TwoSidedCheck check_time_change(const TailLaw& tail, const PathFunctional& H, double t, double x,
                                std::size_t n, std::uint64_t seed, int workers = 0);

// E[||Z_t||^alpha H0(Z)]  vs  E[||Z_0||^alpha H0(B^t Z)] for bounded
// 0-homogeneous H0 (spot-checked on random scalings)
TwoSidedCheck check_tilt_shift(const SpectralLaw& spectral, const PathFunctional& H0, double t,
                               std::size_t n, std::uint64_t seed, int workers = 0);

// E[S(Y) 1{Y* > x} / E(Y)]  vs  x^{-alpha} E[S(Y) / E(Y)], x > 1, paired
// design on shared draws
TwoSidedCheck check_independence_tilted(const TailLaw& tail, const PathFunctional& S, double x,
                                        std::size_t n, std::uint64_t seed, int workers = 0);

// theta E[(int ||Q_s|| ds)^alpha]  vs  alpha E[(int_0^inf ||Theta_s|| ds)^{alpha-1}];
// signed_mode uses the positive-part convention for scalar paths
TwoSidedCheck check_forward_identity(const TailLaw& tail, double theta, std::size_t n,
                                     std::uint64_t seed, bool signed_mode = false,
                                     int workers = 0);

// Monte Carlo z against exact 1 for theta * integral E||Q_t||^alpha dt
TwoSidedCheck check_q_normalization(const TailLaw& tail, double theta, std::size_t n,
                                    std::uint64_t seed, int workers = 0);

// --- anchoring maps ----------------------------------------------------------

enum class AnchorKind { infargmax, first_exceedance };

struct DensityTable {
  std::vector<double> t;
  std::vector<double> density;
  std::vector<double> std_error;
  double trapezoid_mass = 0.0;
  double density_at_zero_minus = 0.0;
  // Monte Carlo estimate of P(Y ||Q at the anchor|| > 1); equal to 1 when
  // the anchor is hit by an upward jump
  double continuity_probability = 0.0;
  double theta_used = 0.0;
  std::uint64_t seed = 0;
};

// density of the anchor time of Y estimated through the cluster process:
// f(t) = theta P(Y ||Q_{I(YQ) - t}|| > 1) on the grid
DensityTable anchor_density(const TailLaw& tail, AnchorKind anchor, std::vector<double> t_grid,
                            std::size_t n, std::uint64_t seed, int workers = 0);

// --- structural checks --------------------------------------------------------

// KS p-value of ||Y(0)|| against Pareto(alpha)
double pareto_ks_pvalue(const TailLaw& tail, std::size_t n, std::uint64_t seed, int workers = 0);

// correlation z between ||Y(0)|| and a bounded functional of Theta
stats::CorrelationReport theta_independence_check(const TailLaw& tail, std::size_t n,
                                                  std::uint64_t seed, int workers = 0);

}  // namespace tailsim::tailcore
