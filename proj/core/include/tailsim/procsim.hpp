#pragma once

// Windowed simulators for the built-in stationary process classes, each
// paired with its analytic tail law and a truncation policy whose error
// is reported, never hidden: infinite-source Poisson shot noise (exact),
// functional moving averages (exact for alpha < 1), mixed moving maxima
// (exact by dominated stopping), sub-Gaussian max-stable fields on a grid
// and sum-stable series with a fixed atom count.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tailsim/pathkit.hpp"
#include "tailsim/stats.hpp"
#include "tailsim/tailcore.hpp"

namespace tailsim::procsim {

using pathkit::Path;
using tailcore::PathSampler;
using tailcore::TailLaw;

// session-length law with finite mean
class EtaLaw {
 public:
  static EtaLaw deterministic(double c);
  static EtaLaw exponential(double rate);
  static EtaLaw uniform(double a, double b);
  static EtaLaw pareto(double scale, double shape);  // shape > 1

  double mean() const;
  double sample(std::mt19937_64& gen) const;
  // density proportional to x * law(dx)
  double sample_length_biased(std::mt19937_64& gen) const;
  // stationary residual lifetime (integrated-tail law); equal in law to
  // U * L with L length-biased and U uniform
  double sample_residual_life(std::mt19937_64& gen) const;
  double quantile(double q) const;
  bool bounded() const;
  double upper_bound() const;  // quantile(1 - 1e-9) when unbounded
  std::string describe() const;

 private:
  enum class Kind { deterministic, exponential, uniform, pareto };
  Kind kind_;
  double a_ = 0.0, b_ = 0.0;
  EtaLaw(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
};

// regularly varying jump sizes with declared tail index and skewness
class JumpLaw {
 public:
  // |V| Pareto(alpha), sign +1 with probability skewness_p
  static JumpLaw pareto(double alpha, double skewness_p = 1.0);
  static JumpLaw constant(double v);

  double sample(std::mt19937_64& gen) const;
  bool regularly_varying() const { return kind_ == Kind::pareto; }
  double alpha() const;
  double skewness() const { return skew_; }
  double tail_constant() const;  // lim x^alpha P(|V| > x)
  std::string describe() const;

 private:
  enum class Kind { pareto, constant };
  Kind kind_;
  double alpha_ = 1.0, skew_ = 1.0, value_ = 1.0;
  JumpLaw(Kind kind, double alpha, double skew, double v)
      : kind_(kind), alpha_(alpha), skew_(skew), value_(v) {}
};

struct SimulatedPath {
  Path path;
  std::string model;
  std::map<std::string, double> diagnostics;
};

struct CoupledPaths {
  SimulatedPath full;
  SimulatedPath truncated;  // m-dependent approximation on shared randomness
  double m = 0.0;
};

// --- shot noise (infinite-source Poisson) ------------------------------------

struct Session {
  double start;
  double length;
  double value;
};

// stationary session set over [0, T]: sessions alive at time zero carry
// their age (M/G/infinity occupancy), later births arrive at unit rate
std::vector<Session> shot_noise_sessions(const EtaLaw& eta, const JumpLaw& jumps, double T,
                                         std::mt19937_64& gen);

// exact path on [0, T): at every event the level is recomputed as the sum
// of covering session values in session order. Session lengths are capped
// at m when given (the m-dependent coupling).
Path assemble_sessions(const std::vector<Session>& sessions, double T,
                       double m = pathkit::time_infinity);

SimulatedPath sim_shot_noise(const EtaLaw& eta, const JumpLaw& jumps, double T,
                             std::mt19937_64& gen);

// analytic tail law: Y = Pareto * sign * 1_{[-zeta', zeta)} with
// (zeta', zeta) a uniform split of a length-biased session;
// theta = 1 / E[session length]
TailLaw shot_noise_tail_law(const EtaLaw& eta, double alpha, double skewness_p = 1.0);

// --- functional moving average ------------------------------------------------

// shape moved over a unit-rate Poisson point set; exact on the window,
// requires alpha < 1
SimulatedPath sim_functional_ma(const Path& shape, const JumpLaw& jumps, double alpha, double T,
                                std::mt19937_64& gen);

// exact tail law: Y = Pareto * sign * B^T shape / |shape(-T)| with T from
// the piecewise-power density; closed-form theta = sup|f|^alpha / int|f|^alpha
TailLaw ma_tail_law(const Path& shape, double alpha, double skewness_p = 1.0);

double ma_theta_closed_form(const Path& shape, double alpha);

// left-endpoint discretization of a continuous shape onto a regular grid
Path discretize_shape(const std::function<double(double)>& f, double a, double b, double step);

// --- mixed moving maxima (max-stable) ------------------------------------------

// cluster atom description for the moving-maxima / sum-stable classes
struct ClusterLaw {
  PathSampler sample;  // sup norm exactly 1
  double theta = 1.0;  // 1 / integral E||Q_t||^alpha dt
  double support_lo = 0.0;
  double support_hi = 1.0;
  bool bounded_support = true;
  double mean_alpha_integral = 1.0;  // integral E||Q_t||^alpha dt
};

// indicator sessions Q = sign * 1_{[0, L)}; the alpha-integral is E[L]
// for every alpha
ClusterLaw session_cluster_law(const EtaLaw& eta, double skewness_p = 1.0);

struct M3Realization {
  std::vector<Path> atoms;  // retained scaled atoms
  Path path;                // pointwise max of the atoms on the window
  double stop_level = 0.0;  // no atom below this level can change the window
};

// exact simulation by dominated stopping: atoms are added in decreasing
// magnitude until the next level falls below the running window minimum
M3Realization m3_realization(const ClusterLaw& q, double alpha, double T, std::mt19937_64& gen,
                             std::size_t max_atoms = 10'000'000);

SimulatedPath sim_max_stable_m3(const ClusterLaw& q, double alpha, double T,
                                std::mt19937_64& gen);

// exact window mass nu({y : sup over [0,T] > 1}) for indicator-session
// atoms: theta * (T + E[L]); the finite-T running-max identity is
// -log P(sup <= x) = x^{-alpha} * this mass
double m3_window_mass(const ClusterLaw& q, double T);

// --- sub-Gaussian max-stable (Brown-Resnick type) -------------------------------

struct BrownResnickSpec {
  double alpha = 1.0;
  double variogram_scale = 1.0;  // Var(W_t) = scale * |t|
  double grid_step = 0.01;
  double tail_radius = 40.0;  // window half-width for the tail law grid
};

// exact grid simulation through extremal functions (per-site Poisson
// descent with rejection of dominated atoms)
SimulatedPath sim_brown_resnick(const BrownResnickSpec& spec, double T, std::mt19937_64& gen);

// grid tail law: Y = Pareto * exp(W_t - alpha sigma_t^2 / 2) on
// [-tail_radius, tail_radius]; exceedance support is reported against the
// window boundary
TailLaw brown_resnick_tail_law(const BrownResnickSpec& spec);

// independent direct estimate of E[sup e^{alpha What} / int e^{alpha What}]
// on the same grid (oracle for the candidate extremal index)
stats::EstimatorReport brown_resnick_candidate_direct(const BrownResnickSpec& spec, std::size_t n,
                                                      std::uint64_t seed, int workers = 0);

// drift-condition diagnostic: fraction of tail draws whose exceedance set
// touches the outer band of the grid window. The drift of the chosen
// variance function is a user obligation; this measures the spill it
// leaves at the configured radius.
stats::EstimatorReport brown_resnick_boundary_spill(const BrownResnickSpec& spec, std::size_t n,
                                                    std::uint64_t seed, int workers = 0);

// --- sum-stable series -----------------------------------------------------------

// X = sum of the K largest Poisson atoms P_i B^{T_i} Q^{(i)} on the
// widened window; remainder exceedance order x^{-K alpha} is recorded in
// the diagnostics
SimulatedPath sim_sum_stable_series(const ClusterLaw& q, double alpha, bool symmetric, double T,
                                    std::size_t K, std::mt19937_64& gen);

// K-sensitivity on shared randomness: same atom stream cut at K1 < K2
std::pair<SimulatedPath, SimulatedPath> sim_sum_stable_pair(const ClusterLaw& q, double alpha,
                                                            bool symmetric, double T,
                                                            std::size_t K1, std::size_t K2,
                                                            std::mt19937_64& gen);

// --- model interface --------------------------------------------------------------

class ProcessModel {
 public:
  virtual ~ProcessModel() = default;
  virtual std::string name() const = 0;
  virtual std::string class_tag() const = 0;
  virtual double alpha() const = 0;
  virtual SimulatedPath simulate(double T, std::mt19937_64& gen) const = 0;
  virtual TailLaw tail_law() const = 0;
  // scale a_T with T P(||X_0|| > a_T) -> 1
  virtual double scale_for(double T) const = 0;
  // one stationary marginal draw ||X(t)|| (used for threshold calibration)
  virtual double sample_marginal(std::mt19937_64& gen) const;
  virtual std::optional<double> theta_closed_form() const { return std::nullopt; }
  // coupled (X, X^(m)) on shared randomness; throws for classes without a
  // kernel-truncation meaning
  virtual CoupledPaths simulate_m_coupled(double m, double T, std::mt19937_64& gen) const;
};

std::unique_ptr<ProcessModel> make_shot_noise_model(const EtaLaw& eta, const JumpLaw& jumps);
std::unique_ptr<ProcessModel> make_functional_ma_model(const Path& shape, const JumpLaw& jumps);
std::unique_ptr<ProcessModel> make_max_stable_m3_model(const EtaLaw& sessions, double alpha,
                                                       std::uint64_t tail_seed = 1);
std::unique_ptr<ProcessModel> make_brown_resnick_model(const BrownResnickSpec& spec);
std::unique_ptr<ProcessModel> make_sum_stable_model(const EtaLaw& sessions, double alpha,
                                                    bool symmetric, std::size_t K,
                                                    std::uint64_t tail_seed = 1);

std::vector<std::string> model_class_tags();

}  // namespace tailsim::procsim
