#include "tailsim/procsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tailsim/rng.hpp"

namespace tailsim::procsim {

using pathkit::NormChoice;
using pathkit::restrict;
using pathkit::shift;
using tailcore::pareto_sample;
using tailcore::sample_sign;

// --- EtaLaw -----------------------------------------------------------------

EtaLaw EtaLaw::deterministic(double c) {
  if (!(c > 0)) throw std::invalid_argument("EtaLaw: session length must be > 0");
  return EtaLaw(Kind::deterministic, c, c);
}

EtaLaw EtaLaw::exponential(double rate) {
  if (!(rate > 0)) throw std::invalid_argument("EtaLaw: rate must be > 0");
  return EtaLaw(Kind::exponential, rate, 0.0);
}

EtaLaw EtaLaw::uniform(double a, double b) {
  if (!(0.0 <= a && a < b)) throw std::invalid_argument("EtaLaw: need 0 <= a < b");
  return EtaLaw(Kind::uniform, a, b);
}

EtaLaw EtaLaw::pareto(double scale, double shape) {
  if (!(scale > 0) || !(shape > 1))
    throw std::invalid_argument("EtaLaw: pareto needs scale > 0 and shape > 1 (finite mean)");
  return EtaLaw(Kind::pareto, scale, shape);
}

double EtaLaw::mean() const {
  switch (kind_) {
    case Kind::deterministic: return a_;
    case Kind::exponential: return 1.0 / a_;
    case Kind::uniform: return 0.5 * (a_ + b_);
    case Kind::pareto: return a_ * b_ / (b_ - 1.0);
  }
  return 0.0;
}

double EtaLaw::sample(std::mt19937_64& gen) const {
  switch (kind_) {
    case Kind::deterministic: return a_;
    case Kind::exponential: return std::exponential_distribution<double>(a_)(gen);
    case Kind::uniform: return std::uniform_real_distribution<double>(a_, b_)(gen);
    case Kind::pareto: return a_ * std::pow(rng::uniform_pos(gen), -1.0 / b_);
  }
  return 0.0;
}

double EtaLaw::sample_length_biased(std::mt19937_64& gen) const {
  switch (kind_) {
    case Kind::deterministic:
      return a_;
    case Kind::exponential: {
      std::exponential_distribution<double> e(a_);
      return e(gen) + e(gen);
    }
    case Kind::uniform: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      return std::sqrt(a_ * a_ + u(gen) * (b_ * b_ - a_ * a_));
    }
    case Kind::pareto:
      return a_ * std::pow(rng::uniform_pos(gen), -1.0 / (b_ - 1.0));
  }
  return 0.0;
}

double EtaLaw::sample_residual_life(std::mt19937_64& gen) const {
  double biased = sample_length_biased(gen);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(gen) * biased;
}

double EtaLaw::quantile(double q) const {
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("EtaLaw::quantile: q in [0,1)");
  switch (kind_) {
    case Kind::deterministic: return a_;
    case Kind::exponential: return -std::log1p(-q) / a_;
    case Kind::uniform: return a_ + q * (b_ - a_);
    case Kind::pareto: return a_ * std::pow(1.0 - q, -1.0 / b_);
  }
  return 0.0;
}

bool EtaLaw::bounded() const {
  return kind_ == Kind::deterministic || kind_ == Kind::uniform;
}

double EtaLaw::upper_bound() const {
  if (kind_ == Kind::deterministic) return a_;
  if (kind_ == Kind::uniform) return b_;
  return quantile(1.0 - 1e-9);
}

std::string EtaLaw::describe() const {
  switch (kind_) {
    case Kind::deterministic: return "deterministic(" + std::to_string(a_) + ")";
    case Kind::exponential: return "exponential(rate=" + std::to_string(a_) + ")";
    case Kind::uniform: return "uniform(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
    case Kind::pareto:
      return "pareto(scale=" + std::to_string(a_) + ",shape=" + std::to_string(b_) + ")";
  }
  return "";
}

// --- JumpLaw -----------------------------------------------------------------

JumpLaw JumpLaw::pareto(double alpha, double skewness_p) {
  if (!(alpha > 0)) throw std::invalid_argument("JumpLaw: alpha must be > 0");
  if (!(skewness_p >= 0.0 && skewness_p <= 1.0))
    throw std::invalid_argument("JumpLaw: skewness in [0,1]");
  return JumpLaw(Kind::pareto, alpha, skewness_p, 0.0);
}

JumpLaw JumpLaw::constant(double v) { return JumpLaw(Kind::constant, 0.0, 1.0, v); }

double JumpLaw::sample(std::mt19937_64& gen) const {
  if (kind_ == Kind::constant) return value_;
  return sample_sign(skew_, gen) * std::pow(rng::uniform_pos(gen), -1.0 / alpha_);
}

double JumpLaw::alpha() const {
  if (kind_ != Kind::pareto)
    throw std::invalid_argument("JumpLaw: constant jumps have no tail index");
  return alpha_;
}

double JumpLaw::tail_constant() const {
  if (kind_ != Kind::pareto)
    throw std::invalid_argument("JumpLaw: constant jumps are not regularly varying");
  return 1.0;
}

std::string JumpLaw::describe() const {
  if (kind_ == Kind::constant) return "constant(" + std::to_string(value_) + ")";
  return "pareto(alpha=" + std::to_string(alpha_) + ",p=" + std::to_string(skew_) + ")";
}

// --- shot noise ---------------------------------------------------------------

std::vector<Session> shot_noise_sessions(const EtaLaw& eta, const JumpLaw& jumps, double T,
                                         std::mt19937_64& gen) {
  if (!(T > 0)) throw std::invalid_argument("shot_noise_sessions: T must be > 0");
  std::vector<Session> sessions;
  // sessions alive at time zero: length-biased length, uniform age
  std::poisson_distribution<long> count(eta.mean());
  long n0 = count(gen);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  sessions.reserve(static_cast<std::size_t>(n0) + static_cast<std::size_t>(T) + 16);
  for (long i = 0; i < n0; ++i) {
    double len = eta.sample_length_biased(gen);
    double age = u(gen) * len;
    sessions.push_back({-age, len, jumps.sample(gen)});
  }
  // unit-rate births on (0, T]
  std::exponential_distribution<double> gap(1.0);
  for (double t = gap(gen); t <= T; t += gap(gen))
    sessions.push_back({t, eta.sample(gen), jumps.sample(gen)});
  return sessions;
}

Path assemble_sessions(const std::vector<Session>& sessions, double T, double m) {
  std::vector<Path> atoms;
  atoms.reserve(sessions.size());
  for (const Session& s : sessions) {
    double len = std::min(s.length, m);
    if (!(len > 0)) continue;
    double end = s.start + len;
    if (end <= 0.0 || s.start >= T) continue;
    atoms.push_back(Path::indicator(s.start, end, s.value));
  }
  return pathkit::sum_step_atoms(atoms, 0.0, T);
}

SimulatedPath sim_shot_noise(const EtaLaw& eta, const JumpLaw& jumps, double T,
                             std::mt19937_64& gen) {
  auto sessions = shot_noise_sessions(eta, jumps, T, gen);
  SimulatedPath out{assemble_sessions(sessions, T), "shot_noise", {}};
  out.diagnostics["sessions"] = static_cast<double>(sessions.size());
  double initial = 0.0;
  for (const Session& s : sessions)
    if (s.start <= 0.0) initial += 1.0;
  out.diagnostics["initial_sessions"] = initial;
  return out;
}

TailLaw shot_noise_tail_law(const EtaLaw& eta, double alpha, double skewness_p) {
  auto theta_sampler = [eta, skewness_p](std::mt19937_64& gen) {
    double len = eta.sample_length_biased(gen);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double backward = u(gen) * len;  // zeta' (uniform split of the session)
    return shift(Path::indicator(0.0, len, sample_sign(skewness_p, gen)), -backward);
  };
  auto q_sampler = [eta, skewness_p](std::mt19937_64& gen) {
    return Path::indicator(0.0, eta.sample(gen), sample_sign(skewness_p, gen));
  };
  double radius = eta.bounded() ? eta.upper_bound() : eta.quantile(1.0 - 1e-9);
  return tailcore::tail_law_from_theta("shot_noise(" + eta.describe() + ")", alpha, theta_sampler,
                                       radius, q_sampler, 1.0 / eta.mean());
}

// --- functional moving average ---------------------------------------------------

SimulatedPath sim_functional_ma(const Path& shape, const JumpLaw& jumps, double alpha, double T,
                                std::mt19937_64& gen) {
  if (!(alpha < 1.0))
    throw std::invalid_argument(
        "sim_functional_ma: unsupported configuration, alpha must be < 1 (series truncation "
        "is only controlled below 1)");
  if (!(T > 0)) throw std::invalid_argument("sim_functional_ma: T must be > 0");
  double lo = shape.window_start(), hi = shape.window_end();
  // points whose shifted shape can touch [0, T)
  double strip_lo = -hi, strip_hi = T - lo;
  std::poisson_distribution<long> count(strip_hi - strip_lo);
  long n = count(gen);
  std::uniform_real_distribution<double> pos(strip_lo, strip_hi);
  std::vector<Path> atoms;
  atoms.reserve(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) {
    double t = pos(gen);
    double v = jumps.sample(gen);
    atoms.push_back(shift(shape, t).scaled(v));
  }
  SimulatedPath out{pathkit::sum_step_atoms(atoms, 0.0, T), "functional_ma", {}};
  out.diagnostics["points"] = static_cast<double>(n);
  return out;
}

double ma_theta_closed_form(const Path& shape, double alpha) {
  double sup = 0.0, energy = 0.0;
  for (std::size_t i = 0; i < shape.piece_count(); ++i) {
    double v = std::abs(shape.piece_value(i).front());
    sup = std::max(sup, v);
    if (v > 0) energy += std::pow(v, alpha) * shape.piece_length(i);
  }
  if (!(energy > 0)) throw std::invalid_argument("ma_theta_closed_form: shape has zero energy");
  return std::pow(sup, alpha) / energy;
}

TailLaw ma_tail_law(const Path& shape, double alpha, double skewness_p) {
  if (shape.dim() != 1) throw std::invalid_argument("ma_tail_law: scalar shapes only");
  // piece weights |v|^alpha * length for the anchor-time density
  auto cumulative = std::make_shared<std::vector<double>>(shape.piece_count());
  double tot = 0.0;
  for (std::size_t i = 0; i < shape.piece_count(); ++i) {
    double v = std::abs(shape.piece_value(i).front());
    tot += (v > 0 ? std::pow(v, alpha) : 0.0) * shape.piece_length(i);
    (*cumulative)[i] = tot;
  }
  if (!(tot > 0)) throw std::invalid_argument("ma_tail_law: shape has zero energy");

  auto theta_sampler = [shape, cumulative, tot, skewness_p](std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, tot);
    auto it = std::upper_bound(cumulative->begin(), cumulative->end(), u(gen));
    std::size_t idx = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative->begin()), shape.piece_count() - 1);
    std::uniform_real_distribution<double> pos(shape.piece_start(idx), shape.piece_end(idx));
    double at = pos(gen);  // the shape coordinate landing at time zero
    double v = shape.piece_value(idx).front();
    // values scale by sign/|f(-T)|; dividing by |v|*sign keeps the piece
    // at time zero on exactly +/-1
    return shift(shape, -at).divided(std::abs(v) * sample_sign(skewness_p, gen));
  };

  double sup = pathkit::sup_norm(shape, NormChoice::sup_abs);
  Path anchored = shift(shape, -pathkit::infargmax(shape, NormChoice::sup_abs)).divided(sup);
  auto q_sampler = [anchored, skewness_p](std::mt19937_64& gen) {
    return anchored.scaled(sample_sign(skewness_p, gen));
  };
  double width = shape.window_end() - shape.window_start();
  return tailcore::tail_law_from_theta("functional_ma", alpha, theta_sampler, width, q_sampler,
                                       ma_theta_closed_form(shape, alpha));
}

Path discretize_shape(const std::function<double(double)>& f, double a, double b, double step) {
  if (!(step > 0) || !(a < b)) throw std::invalid_argument("discretize_shape: bad grid");
  std::size_t n = static_cast<std::size_t>(std::ceil((b - a) / step));
  std::vector<double> samples(n);
  for (std::size_t k = 0; k < n; ++k) samples[k] = f(a + static_cast<double>(k) * step);
  return Path::from_samples(a, step, samples);
}

// --- mixed moving maxima -----------------------------------------------------------

ClusterLaw session_cluster_law(const EtaLaw& eta, double skewness_p) {
  ClusterLaw law;
  law.sample = [eta, skewness_p](std::mt19937_64& gen) {
    return Path::indicator(0.0, eta.sample(gen), sample_sign(skewness_p, gen));
  };
  law.theta = 1.0 / eta.mean();
  law.mean_alpha_integral = eta.mean();
  law.support_lo = 0.0;
  law.support_hi = eta.upper_bound();
  law.bounded_support = eta.bounded();
  return law;
}

M3Realization m3_realization(const ClusterLaw& q, double alpha, double T, std::mt19937_64& gen,
                             std::size_t max_atoms) {
  if (!(T > 0) || !(alpha > 0)) throw std::invalid_argument("m3_realization: bad parameters");
  double strip_lo = -q.support_hi, strip_hi = T - q.support_lo;
  double rate = q.theta * (strip_hi - strip_lo);
  std::exponential_distribution<double> e(1.0);
  std::uniform_real_distribution<double> pos(strip_lo, strip_hi);

  M3Realization r{{}, Path::zero(0.0, T), 0.0};
  double gamma = 0.0;
  double window_min = 0.0;
  for (std::size_t k = 0; k < max_atoms; ++k) {
    gamma += e(gen);
    double level = std::pow(gamma / rate, -1.0 / alpha);
    if (level < window_min) {
      r.stop_level = level;
      return r;
    }
    double t = pos(gen);
    Path atom = shift(q.sample(gen), t).scaled(level);
    r.path = pathkit::pointwise_max(r.path, atom);
    r.atoms.push_back(std::move(atom));
    window_min = pathkit::inf_norm(r.path, 0.0, T);
  }
  throw std::runtime_error("m3_realization: atom budget exhausted before domination");
}

SimulatedPath sim_max_stable_m3(const ClusterLaw& q, double alpha, double T,
                                std::mt19937_64& gen) {
  M3Realization r = m3_realization(q, alpha, T, gen);
  SimulatedPath out{restrict(r.path, 0.0, T), "max_stable_m3", {}};
  out.diagnostics["atoms"] = static_cast<double>(r.atoms.size());
  out.diagnostics["stop_level"] = r.stop_level;
  if (!q.bounded_support) out.diagnostics["strip_truncated"] = 1.0;
  return out;
}

double m3_window_mass(const ClusterLaw& q, double T) {
  // indicator-session atoms: a shifted session touches [0, T] on a time
  // set of measure T + L
  return q.theta * (T + q.mean_alpha_integral);
}

// --- Brown-Resnick type max-stable ---------------------------------------------------

namespace {

std::vector<double> br_hat_walk(const BrownResnickSpec& spec, std::size_t n_steps, double t0,
                                std::mt19937_64& gen) {
  // W_t - alpha Var(W_t)/2 sampled on t0 + k*step, starting from W at the
  // grid point nearest zero
  std::vector<double> hat(n_steps);
  double sd = std::sqrt(spec.variogram_scale * spec.grid_step);
  std::normal_distribution<double> z(0.0, sd);
  // index of the grid point at time zero (t0 <= 0 by construction)
  std::size_t zero_idx = static_cast<std::size_t>(std::llround(-t0 / spec.grid_step));
  double w = 0.0;
  for (std::size_t j = zero_idx; j < n_steps; ++j) {
    double t = t0 + static_cast<double>(j) * spec.grid_step;
    hat[j] = w - 0.5 * spec.alpha * spec.variogram_scale * std::abs(t);
    if (j + 1 < n_steps) w += z(gen);
  }
  w = 0.0;
  for (std::size_t j = zero_idx; j-- > 0;) {
    w += z(gen);
    double t = t0 + static_cast<double>(j) * spec.grid_step;
    hat[j] = w - 0.5 * spec.alpha * spec.variogram_scale * std::abs(t);
  }
  return hat;
}

// profile of an atom seen from its root r: by the stationarity of the
// increments, the process tilted by its value at t_r and renormalized to
// one there is again exp(W'(t - t_r) - alpha Var(t - t_r)/2) with a fresh
// two-sided walk W' started at the root
std::vector<double> br_rooted_profile(const BrownResnickSpec& spec, std::size_t n_steps,
                                      std::size_t root, std::mt19937_64& gen) {
  double t0 = -static_cast<double>(root) * spec.grid_step;
  return br_hat_walk(spec, n_steps, t0, gen);
}

}  // namespace

SimulatedPath sim_brown_resnick(const BrownResnickSpec& spec, double T, std::mt19937_64& gen) {
  if (!(T > 0) || !(spec.grid_step > 0))
    throw std::invalid_argument("sim_brown_resnick: bad parameters");
  std::size_t n_steps = static_cast<std::size_t>(std::llround(T / spec.grid_step));
  if (n_steps == 0) n_steps = 1;

  // exact grid simulation through extremal functions: for every site in
  // turn, descend the Poisson levels of the atom peaking there, keep the
  // atoms that are not dominated at an earlier site, and stop once the
  // next level cannot beat the running value at the site
  std::exponential_distribution<double> e(1.0);
  std::vector<double> eta(n_steps, 0.0);
  std::size_t atoms = 0;
  for (std::size_t site = 0; site < n_steps; ++site) {
    double gamma = 0.0;
    for (;;) {
      gamma += e(gen);
      double level = std::pow(gamma, -1.0 / spec.alpha);
      if (level <= eta[site]) break;
      auto hat = br_rooted_profile(spec, n_steps, site, gen);
      bool dominated = false;
      for (std::size_t k = 0; k < site && !dominated; ++k)
        dominated = level * std::exp(hat[k]) >= eta[k];
      if (!dominated) {
        for (std::size_t j = site; j < n_steps; ++j)
          eta[j] = std::max(eta[j], level * std::exp(hat[j]));
        ++atoms;
      }
    }
  }
  SimulatedPath out{Path::from_samples(0.0, spec.grid_step, eta), "max_stable_brown_resnick", {}};
  out.diagnostics["atoms"] = static_cast<double>(atoms);
  out.diagnostics["grid_step"] = spec.grid_step;
  return out;
}

TailLaw brown_resnick_tail_law(const BrownResnickSpec& spec) {
  std::size_t half = static_cast<std::size_t>(std::llround(spec.tail_radius / spec.grid_step));
  std::size_t n_steps = 2 * half + 1;
  double t0 = -static_cast<double>(half) * spec.grid_step;
  BrownResnickSpec local = spec;
  auto theta_sampler = [local, n_steps, t0](std::mt19937_64& gen) {
    auto hat = br_hat_walk(local, n_steps, t0, gen);
    std::vector<double> z(n_steps);
    for (std::size_t j = 0; j < n_steps; ++j) z[j] = std::exp(hat[j]);
    return Path::from_samples(t0, local.grid_step, z);
  };
  return tailcore::tail_law_from_theta("max_stable_brown_resnick", spec.alpha, theta_sampler,
                                       spec.tail_radius);
}

stats::EstimatorReport brown_resnick_candidate_direct(const BrownResnickSpec& spec, std::size_t n,
                                                      std::uint64_t seed, int workers) {
  std::size_t half = static_cast<std::size_t>(std::llround(spec.tail_radius / spec.grid_step));
  std::size_t n_steps = 2 * half + 1;
  double t0 = -static_cast<double>(half) * spec.grid_step;
  auto vals = rng::replicate_doubles(
      n, rng::derive(seed, "br-direct"), workers, [&](std::size_t, std::mt19937_64& gen) {
        auto hat = br_hat_walk(spec, n_steps, t0, gen);
        double sup = -pathkit::time_infinity, sum = 0.0;
        for (double h : hat) {
          double za = std::exp(spec.alpha * h);
          sup = std::max(sup, za);
          sum += za * spec.grid_step;
        }
        return sup / sum;
      });
  auto r = stats::mean_report(vals, seed);
  stats::add_trimmed_diagnostic(r, vals);
  return r;
}

stats::EstimatorReport brown_resnick_boundary_spill(const BrownResnickSpec& spec, std::size_t n,
                                                    std::uint64_t seed, int workers) {
  TailLaw law = brown_resnick_tail_law(spec);
  double R = spec.tail_radius;
  auto sample_y = law.sample_y;
  auto vals = rng::replicate_doubles(
      n, rng::derive(seed, "br-spill"), workers, [&](std::size_t, std::mt19937_64& gen) {
        Path y = sample_y(gen);
        double band = std::max(1.0, 8.0 * spec.grid_step);
        bool spill = pathkit::sup_norm(y, -R, -R + band) > 1.0 ||
                     pathkit::sup_norm(y, R - band, R) > 1.0;
        return spill ? 1.0 : 0.0;
      });
  return stats::mean_report(vals, seed);
}

// --- sum-stable series ------------------------------------------------------------------

namespace {

std::vector<Path> sum_stable_atoms(const ClusterLaw& q, double alpha, bool symmetric, double T,
                                   std::size_t K, std::mt19937_64& gen) {
  if (!(alpha > 0) || !(alpha < 2))
    throw std::invalid_argument("sum_stable: alpha must be in (0, 2)");
  if (alpha >= 1.0 && !symmetric)
    throw std::invalid_argument(
        "sum_stable: unsupported configuration, alpha >= 1 requires a symmetric law");
  double strip_lo = -q.support_hi, strip_hi = T - q.support_lo;
  double rate = q.theta * (strip_hi - strip_lo);
  std::exponential_distribution<double> e(1.0);
  std::uniform_real_distribution<double> pos(strip_lo, strip_hi);
  std::vector<Path> atoms;
  atoms.reserve(K);
  double gamma = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    gamma += e(gen);
    double level = std::pow(gamma / rate, -1.0 / alpha);
    atoms.push_back(shift(q.sample(gen), pos(gen)).scaled(level));
  }
  return atoms;
}

}  // namespace

SimulatedPath sim_sum_stable_series(const ClusterLaw& q, double alpha, bool symmetric, double T,
                                    std::size_t K, std::mt19937_64& gen) {
  auto atoms = sum_stable_atoms(q, alpha, symmetric, T, K, gen);
  SimulatedPath out{pathkit::sum_step_atoms(atoms, 0.0, T), "sum_stable_series", {}};
  out.diagnostics["K"] = static_cast<double>(K);
  out.diagnostics["remainder_tail_exponent"] = static_cast<double>(K) * alpha;
  if (!atoms.empty())
    out.diagnostics["smallest_level"] = pathkit::sup_norm(atoms.back(), NormChoice::sup_abs);
  return out;
}

std::pair<SimulatedPath, SimulatedPath> sim_sum_stable_pair(const ClusterLaw& q, double alpha,
                                                            bool symmetric, double T,
                                                            std::size_t K1, std::size_t K2,
                                                            std::mt19937_64& gen) {
  if (K1 > K2) std::swap(K1, K2);
  auto atoms = sum_stable_atoms(q, alpha, symmetric, T, K2, gen);
  std::vector<Path> head(atoms.begin(), atoms.begin() + static_cast<std::ptrdiff_t>(K1));
  SimulatedPath a{pathkit::sum_step_atoms(head, 0.0, T), "sum_stable_series", {{"K", double(K1)}}};
  SimulatedPath b{pathkit::sum_step_atoms(atoms, 0.0, T), "sum_stable_series", {{"K", double(K2)}}};
  return {std::move(a), std::move(b)};
}

// --- model interface -----------------------------------------------------------------------

double ProcessModel::sample_marginal(std::mt19937_64& gen) const {
  SimulatedPath sp = simulate(1.0, gen);
  return pathkit::vector_norm(sp.path.value(0.5), NormChoice::sup_abs);
}

CoupledPaths ProcessModel::simulate_m_coupled(double, double, std::mt19937_64&) const {
  throw std::invalid_argument(name() + ": no m-dependent kernel truncation for this class");
}

namespace {

class ShotNoiseModel final : public ProcessModel {
 public:
  ShotNoiseModel(EtaLaw eta, JumpLaw jumps) : eta_(eta), jumps_(jumps) {}
  std::string name() const override {
    return "shot_noise(" + eta_.describe() + "," + jumps_.describe() + ")";
  }
  std::string class_tag() const override { return "shot_noise"; }
  double alpha() const override { return jumps_.alpha(); }
  SimulatedPath simulate(double T, std::mt19937_64& gen) const override {
    return sim_shot_noise(eta_, jumps_, T, gen);
  }
  TailLaw tail_law() const override {
    return shot_noise_tail_law(eta_, jumps_.alpha(), jumps_.skewness());
  }
  double scale_for(double T) const override {
    return std::pow(T * eta_.mean() * jumps_.tail_constant(), 1.0 / jumps_.alpha());
  }
  double sample_marginal(std::mt19937_64& gen) const override {
    std::poisson_distribution<long> count(eta_.mean());
    long n = count(gen);
    double x = 0.0;
    for (long i = 0; i < n; ++i) x += jumps_.sample(gen);
    return std::abs(x);
  }
  std::optional<double> theta_closed_form() const override { return 1.0 / eta_.mean(); }
  CoupledPaths simulate_m_coupled(double m, double T, std::mt19937_64& gen) const override {
    if (!(m > 0)) throw std::invalid_argument("simulate_m_coupled: m must be > 0");
    auto sessions = shot_noise_sessions(eta_, jumps_, T, gen);
    CoupledPaths out{
        {assemble_sessions(sessions, T), "shot_noise", {}},
        {assemble_sessions(sessions, T, m), "shot_noise_m", {}},
        m};
    return out;
  }

 private:
  EtaLaw eta_;
  JumpLaw jumps_;
};

class FunctionalMAModel final : public ProcessModel {
 public:
  FunctionalMAModel(Path shape, JumpLaw jumps) : shape_(std::move(shape)), jumps_(jumps) {}
  std::string name() const override { return "functional_ma(" + jumps_.describe() + ")"; }
  std::string class_tag() const override { return "functional_ma"; }
  double alpha() const override { return jumps_.alpha(); }
  SimulatedPath simulate(double T, std::mt19937_64& gen) const override {
    return sim_functional_ma(shape_, jumps_, jumps_.alpha(), T, gen);
  }
  TailLaw tail_law() const override {
    return ma_tail_law(shape_, jumps_.alpha(), jumps_.skewness());
  }
  double scale_for(double T) const override {
    double a = jumps_.alpha();
    double energy = 0.0;
    for (std::size_t i = 0; i < shape_.piece_count(); ++i) {
      double v = std::abs(shape_.piece_value(i).front());
      if (v > 0) energy += std::pow(v, a) * shape_.piece_length(i);
    }
    return std::pow(T * energy * jumps_.tail_constant(), 1.0 / a);
  }
  double sample_marginal(std::mt19937_64& gen) const override {
    double lo = shape_.window_start(), hi = shape_.window_end();
    std::poisson_distribution<long> count(hi - lo);
    long n = count(gen);
    std::uniform_real_distribution<double> pos(lo, hi);
    double x = 0.0;
    for (long i = 0; i < n; ++i) x += shape_.scalar_value(pos(gen)) * jumps_.sample(gen);
    return std::abs(x);
  }
  std::optional<double> theta_closed_form() const override {
    return ma_theta_closed_form(shape_, jumps_.alpha());
  }
  CoupledPaths simulate_m_coupled(double m, double T, std::mt19937_64& gen) const override {
    if (!(m > 0)) throw std::invalid_argument("simulate_m_coupled: m must be > 0");
    double lo = shape_.window_start(), hi = shape_.window_end();
    double strip_lo = -hi, strip_hi = T - lo;
    std::poisson_distribution<long> count(strip_hi - strip_lo);
    long n = count(gen);
    std::uniform_real_distribution<double> pos(strip_lo, strip_hi);
    bool empty_trunc = std::max(lo, -m) >= std::min(hi, m);
    std::vector<Path> full, trunc;
    for (long k = 0; k < n; ++k) {
      double t = pos(gen);
      double v = jumps_.sample(gen);
      full.push_back(shift(shape_, t).scaled(v));
      if (!empty_trunc)
        trunc.push_back(shift(restrict(shape_, std::max(lo, -m), std::min(hi, m)), t).scaled(v));
    }
    CoupledPaths out{{pathkit::sum_step_atoms(full, 0.0, T), "functional_ma", {}},
                     {pathkit::sum_step_atoms(trunc, 0.0, T), "functional_ma_m", {}},
                     m};
    return out;
  }

 private:
  Path shape_;
  JumpLaw jumps_;
};

class MaxStableM3Model final : public ProcessModel {
 public:
  MaxStableM3Model(EtaLaw sessions, double alpha, std::uint64_t tail_seed)
      : sessions_(sessions), alpha_(alpha), tail_seed_(tail_seed),
        q_(session_cluster_law(sessions, 1.0)) {}
  std::string name() const override { return "max_stable_m3(" + sessions_.describe() + ")"; }
  std::string class_tag() const override { return "max_stable_m3"; }
  double alpha() const override { return alpha_; }
  SimulatedPath simulate(double T, std::mt19937_64& gen) const override {
    return sim_max_stable_m3(q_, alpha_, T, gen);
  }
  TailLaw tail_law() const override {
    tailcore::TailFromQOptions opts;
    opts.seed = tail_seed_;
    double radius = sessions_.bounded() ? sessions_.upper_bound() : sessions_.quantile(1 - 1e-9);
    return tailcore::tail_from_q(q_.sample, alpha_, q_.theta, radius, opts);
  }
  double scale_for(double T) const override {
    return std::pow(-std::log1p(-1.0 / T), -1.0 / alpha_);
  }
  double sample_marginal(std::mt19937_64& gen) const override {
    // unit-Frechet marginal by the tail-measure normalization
    return std::pow(-std::log(rng::uniform_pos(gen)), -1.0 / alpha_);
  }
  std::optional<double> theta_closed_form() const override { return q_.theta; }
  CoupledPaths simulate_m_coupled(double m, double T, std::mt19937_64& gen) const override {
    if (!(m > 0)) throw std::invalid_argument("simulate_m_coupled: m must be > 0");
    // joint dominated stopping; the truncated running max is the binding one
    double strip_lo = -q_.support_hi, strip_hi = T - q_.support_lo;
    double rate = q_.theta * (strip_hi - strip_lo);
    std::exponential_distribution<double> e(1.0);
    std::uniform_real_distribution<double> pos(strip_lo, strip_hi);
    Path full = Path::zero(0.0, T), trunc = Path::zero(0.0, T);
    double gamma = 0.0;
    std::size_t atoms = 0;
    for (; atoms < 10'000'000; ++atoms) {
      gamma += e(gen);
      double level = std::pow(gamma / rate, -1.0 / alpha_);
      double binding = std::min(pathkit::inf_norm(full, 0.0, T),
                                pathkit::inf_norm(trunc, 0.0, T));
      if (level < binding) break;
      double t = pos(gen);
      Path qdraw = q_.sample(gen);
      full = pathkit::pointwise_max(full, shift(qdraw, t).scaled(level));
      double qlo = qdraw.window_start(), qhi = qdraw.window_end();
      if (std::max(qlo, -m) < std::min(qhi, m)) {
        Path qm = restrict(qdraw, std::max(qlo, -m), std::min(qhi, m));
        trunc = pathkit::pointwise_max(trunc, shift(qm, t).scaled(level));
      }
    }
    CoupledPaths out{{restrict(full, 0.0, T), "max_stable_m3", {{"atoms", double(atoms)}}},
                     {restrict(trunc, 0.0, T), "max_stable_m3_m", {}},
                     m};
    return out;
  }

 private:
  EtaLaw sessions_;
  double alpha_;
  std::uint64_t tail_seed_;
  ClusterLaw q_;
};

class BrownResnickModel final : public ProcessModel {
 public:
  explicit BrownResnickModel(BrownResnickSpec spec) : spec_(spec) {}
  std::string name() const override { return "max_stable_brown_resnick"; }
  std::string class_tag() const override { return "max_stable_brown_resnick"; }
  double alpha() const override { return spec_.alpha; }
  SimulatedPath simulate(double T, std::mt19937_64& gen) const override {
    return sim_brown_resnick(spec_, T, gen);
  }
  TailLaw tail_law() const override { return brown_resnick_tail_law(spec_); }
  double scale_for(double T) const override {
    return std::pow(-std::log1p(-1.0 / T), -1.0 / spec_.alpha);
  }
  double sample_marginal(std::mt19937_64& gen) const override {
    return std::pow(-std::log(rng::uniform_pos(gen)), -1.0 / spec_.alpha);
  }

 private:
  BrownResnickSpec spec_;
};

class SumStableModel final : public ProcessModel {
 public:
  SumStableModel(EtaLaw sessions, double alpha, bool symmetric, std::size_t K,
                 std::uint64_t tail_seed)
      : sessions_(sessions), alpha_(alpha), symmetric_(symmetric), K_(K), tail_seed_(tail_seed),
        q_(session_cluster_law(sessions, symmetric ? 0.5 : 1.0)) {
    if (alpha_ >= 1.0 && !symmetric_)
      throw std::invalid_argument(
          "sum_stable: unsupported configuration, alpha >= 1 requires a symmetric law");
  }
  std::string name() const override { return "sum_stable_series(" + sessions_.describe() + ")"; }
  std::string class_tag() const override { return "sum_stable_series"; }
  double alpha() const override { return alpha_; }
  SimulatedPath simulate(double T, std::mt19937_64& gen) const override {
    return sim_sum_stable_series(q_, alpha_, symmetric_, T, K_, gen);
  }
  TailLaw tail_law() const override {
    tailcore::TailFromQOptions opts;
    opts.seed = tail_seed_;
    double radius = sessions_.bounded() ? sessions_.upper_bound() : sessions_.quantile(1 - 1e-9);
    return tailcore::tail_from_q(q_.sample, alpha_, q_.theta, radius, opts);
  }
  double scale_for(double T) const override { return std::pow(T, 1.0 / alpha_); }
  std::optional<double> theta_closed_form() const override { return q_.theta; }
  CoupledPaths simulate_m_coupled(double m, double T, std::mt19937_64& gen) const override {
    if (!(m > 0)) throw std::invalid_argument("simulate_m_coupled: m must be > 0");
    auto atoms = sum_stable_atoms(q_, alpha_, symmetric_, T, K_, gen);
    std::vector<Path> trunc;
    for (const Path& atom : atoms) {
      // the atom is P * B^t Q; clip the kernel to [-m, m] around its shift
      double lo = atom.window_start(), hi = atom.window_end();
      double anchor = lo - q_.support_lo;  // the shift t of this atom
      double clo = std::max(lo, anchor - m), chi = std::min(hi, anchor + m);
      if (clo < chi) trunc.push_back(restrict(atom, clo, chi));
    }
    CoupledPaths out{{pathkit::sum_step_atoms(atoms, 0.0, T), "sum_stable_series", {}},
                     {pathkit::sum_step_atoms(trunc, 0.0, T), "sum_stable_series_m", {}},
                     m};
    return out;
  }

 private:
  EtaLaw sessions_;
  double alpha_;
  bool symmetric_;
  std::size_t K_;
  std::uint64_t tail_seed_;
  ClusterLaw q_;
};

}  // namespace

std::unique_ptr<ProcessModel> make_shot_noise_model(const EtaLaw& eta, const JumpLaw& jumps) {
  return std::make_unique<ShotNoiseModel>(eta, jumps);
}
std::unique_ptr<ProcessModel> make_functional_ma_model(const Path& shape, const JumpLaw& jumps) {
  return std::make_unique<FunctionalMAModel>(shape, jumps);
}
std::unique_ptr<ProcessModel> make_max_stable_m3_model(const EtaLaw& sessions, double alpha,
                                                       std::uint64_t tail_seed) {
  return std::make_unique<MaxStableM3Model>(sessions, alpha, tail_seed);
}
std::unique_ptr<ProcessModel> make_brown_resnick_model(const BrownResnickSpec& spec) {
  return std::make_unique<BrownResnickModel>(spec);
}
std::unique_ptr<ProcessModel> make_sum_stable_model(const EtaLaw& sessions, double alpha,
                                                    bool symmetric, std::size_t K,
                                                    std::uint64_t tail_seed) {
  return std::make_unique<SumStableModel>(sessions, alpha, symmetric, K, tail_seed);
}

std::vector<std::string> model_class_tags() {
  return {"shot_noise", "functional_ma", "max_stable_m3", "max_stable_brown_resnick",
          "sum_stable_series"};
}

}  // namespace tailsim::procsim
