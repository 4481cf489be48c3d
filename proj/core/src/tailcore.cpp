#include "tailsim/tailcore.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "tailsim/rng.hpp"

namespace tailsim::tailcore {

using pathkit::exceedance;
using pathkit::infargmax;
using pathkit::lp_power_norm;
using pathkit::restrict;
using pathkit::shift;
using pathkit::sup_norm;

double pareto_sample(double alpha, std::mt19937_64& gen) {
  if (!(alpha > 0)) throw std::invalid_argument("pareto_sample: alpha must be > 0");
  return std::pow(rng::uniform_pos(gen), -1.0 / alpha);
}

double sample_sign(double skewness_p, std::mt19937_64& gen) {
  if (skewness_p >= 1.0) return 1.0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(gen) < skewness_p ? 1.0 : -1.0;
}

TailLaw tail_law_from_theta(std::string name, double alpha, PathSampler theta,
                            double support_radius, PathSampler q,
                            std::optional<double> theta_closed_form) {
  TailLaw law;
  law.alpha = alpha;
  law.name = std::move(name);
  law.support_radius = support_radius;
  law.sample_theta = theta;
  law.sample_y = [alpha, theta](std::mt19937_64& gen) {
    double y0 = pareto_sample(alpha, gen);
    return theta(gen).scaled(y0);
  };
  law.sample_q = std::move(q);
  law.theta_closed_form = theta_closed_form;
  return law;
}

PathFunctional constant_functional(double c) {
  return {"const", [c](const Path&) { return c; }, std::abs(c)};
}

PathFunctional capped_exceedance_functional(double level, double cap) {
  return {"capped_exceedance",
          [level, cap](const Path& p) { return std::min(exceedance(p, level), cap); }, cap};
}

PathFunctional infargmax_indicator(double t0) {
  return {"infargmax_leq",
          [t0](const Path& p) { return infargmax(p) <= t0 ? 1.0 : 0.0; }, 1.0};
}

PathFunctional exceedance_indicator(double level, double s) {
  return {"exceedance_gt",
          [level, s](const Path& p) { return exceedance(p, level) > s ? 1.0 : 0.0; }, 1.0};
}

PathFunctional normalized_value_functional(double t0, double a, double b, double cap) {
  return {"normalized_value",
          [t0, a, b, cap](const Path& p) {
            double s = sup_norm(p, a, b);
            if (s == 0.0) return 0.0;
            return std::min(pathkit::vector_norm(p.value(t0), NormChoice::euclidean) / s, cap);
          },
          cap};
}

// --- weighted resampling pools ----------------------------------------------

namespace {

struct WeightedPool {
  std::vector<Path> paths;
  std::vector<double> cumulative;  // cumulative weights
  double total = 0.0;

  const Path& draw(std::mt19937_64& gen) const {
    std::uniform_real_distribution<double> u(0.0, total);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u(gen));
    std::size_t idx = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative.begin()), paths.size() - 1);
    return paths[idx];
  }
};

}  // namespace

TailLaw tail_from_q(const PathSampler& q_sampler, double alpha, double theta,
                    double support_radius, const TailFromQOptions& opts) {
  if (!(alpha > 0)) throw std::invalid_argument("tail_from_q: alpha must be > 0");
  if (!(theta > 0)) throw std::invalid_argument("tail_from_q: theta must be > 0");

  if (!opts.skip_normalization_check) {
    std::vector<double> vals(opts.check_n);
    for (std::size_t i = 0; i < opts.check_n; ++i) {
      auto gen = rng::substream(rng::derive(opts.seed, "q-norm-check"), i);
      vals[i] = theta * lp_power_norm(q_sampler(gen), alpha);
    }
    auto report = stats::mean_report(vals, opts.seed);
    double se = std::max(report.std_error, 1e-12);
    if (std::abs(report.estimate - 1.0) / se > 3.0)
      throw std::invalid_argument(
          "tail_from_q: theta * integral E||Q||^alpha dt != 1 beyond 3 standard errors");
  }

  auto pool = std::make_shared<WeightedPool>();
  pool->paths.reserve(opts.pool_size);
  pool->cumulative.reserve(opts.pool_size);
  for (std::size_t i = 0; i < opts.pool_size; ++i) {
    auto gen = rng::substream(rng::derive(opts.seed, "q-pool"), i);
    Path q = q_sampler(gen);
    double w = lp_power_norm(q, alpha);
    pool->total += w;
    pool->cumulative.push_back(pool->total);
    pool->paths.push_back(std::move(q));
  }
  if (!(pool->total > 0)) throw std::invalid_argument("tail_from_q: degenerate Q sampler");

  NormChoice norm = NormChoice::sup_abs;
  TailLaw law;
  law.alpha = alpha;
  law.name = "tail_from_q";
  law.support_radius = support_radius;
  law.theta_closed_form = theta;
  law.sample_q = q_sampler;
  auto draw_shifted = [pool, alpha, norm](std::mt19937_64& gen) {
    // Q from the pool, tilted by its alpha-integral; then T | Q from the
    // piecewise-constant density proportional to ||Q(-t)||^alpha
    const Path& q = pool->draw(gen);
    std::vector<double> w(q.piece_count());
    double tot = 0.0;
    for (std::size_t i = 0; i < q.piece_count(); ++i) {
      double nv = pathkit::vector_norm(q.piece_value(i), norm);
      tot += (nv == 0.0 ? 0.0 : std::pow(nv, alpha)) * (q.piece_end(i) - q.piece_start(i));
      w[i] = tot;
    }
    std::uniform_real_distribution<double> u(0.0, tot);
    std::size_t idx = std::min<std::size_t>(
        static_cast<std::size_t>(std::upper_bound(w.begin(), w.end(), u(gen)) - w.begin()),
        q.piece_count() - 1);
    std::uniform_real_distribution<double> pos(q.piece_start(idx), q.piece_end(idx));
    double minus_t = pos(gen);  // -T falls in piece idx
    return shift(q, -minus_t).divided(pathkit::vector_norm(q.piece_value(idx), norm));
  };
  law.sample_theta = draw_shifted;
  law.sample_y = [draw_shifted, alpha](std::mt19937_64& gen) {
    Path th = draw_shifted(gen);
    return th.scaled(pareto_sample(alpha, gen));
  };
  return law;
}

SpectralLaw spectral_from_tail(const TailLaw& tail, double half_width) {
  double R = half_width > 0 ? half_width : tail.support_radius;
  if (!(R > 0)) throw std::invalid_argument("spectral_from_tail: need a positive half width");
  SpectralLaw spec;
  spec.alpha = tail.alpha;
  spec.norm = tail.norm;
  spec.name = tail.name + ":spectral";
  double alpha = tail.alpha;
  auto sample_y = tail.sample_y;
  spec.sample_z = [sample_y, alpha, R](std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-R, R);
    double t = u(gen);
    Path y = shift(sample_y(gen), t);
    double j = lp_power_norm(restrict(y, -R, R), alpha) / (2.0 * R);
    if (!(j > 0))
      throw std::runtime_error("spectral_from_tail: zero alpha-energy draw (internal error)");
    return y.scaled(std::pow(j, -1.0 / alpha));
  };
  return spec;
}

EstimatorReport check_spectral_normalization(const SpectralLaw& spectral, std::size_t n,
                                             std::uint64_t seed, int workers) {
  auto sample_z = spectral.sample_z;
  double alpha = spectral.alpha;
  NormChoice norm = spectral.norm;
  auto vals =
      rng::replicate_doubles(n, rng::derive(seed, "z-norm"), workers,
                             [&](std::size_t, std::mt19937_64& gen) {
                               Path z = sample_z(gen);
                               return std::pow(pathkit::vector_norm(z.value(0.0), norm), alpha);
                             });
  return stats::mean_report(vals, seed);
}

QFromTheta q_from_theta(const PathSampler& theta_sampler, double alpha, std::size_t pool_size,
                        std::uint64_t seed, NormChoice norm) {
  auto pool = std::make_shared<WeightedPool>();
  pool->paths.reserve(pool_size);
  pool->cumulative.reserve(pool_size);
  std::vector<double> weights(pool_size);
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < pool_size; ++i) {
    auto gen = rng::substream(rng::derive(seed, "theta-pool"), i);
    Path th = theta_sampler(gen);
    double sup = sup_norm(th, norm);
    double energy = lp_power_norm(th, alpha, norm);
    if (!(sup > 0) || !(energy > 0))
      throw std::runtime_error("q_from_theta: degenerate Theta draw violates the tail law");
    double w = std::pow(sup, alpha) / energy;
    weights[i] = w;
    sum_sq += w * w;
    pool->total += w;
    pool->cumulative.push_back(pool->total);
    // normalize to sup 1 and anchor the maximum at time zero
    Path q = th.divided(sup);
    pool->paths.push_back(shift(q, -infargmax(q, norm)));
  }
  QFromTheta out;
  out.theta_hat = stats::mean_report(weights, seed);
  stats::add_trimmed_diagnostic(out.theta_hat, weights);
  out.effective_sample_size = pool->total * pool->total / sum_sq;
  out.low_ess_warning = out.effective_sample_size < 0.1 * static_cast<double>(pool_size);
  out.sample_q = [pool](std::mt19937_64& gen) { return pool->draw(gen); };
  return out;
}

// --- candidate extremal index -------------------------------------------------

EstimatorReport candidate_via_exceedance(const TailLaw& tail, std::size_t n, std::uint64_t seed,
                                         int workers) {
  auto sample_y = tail.sample_y;
  NormChoice norm = tail.norm;
  auto vals = rng::replicate_doubles(
      n, rng::derive(seed, "cand-exc"), workers, [&](std::size_t, std::mt19937_64& gen) {
        double e = exceedance(sample_y(gen), 1.0, norm);
        if (!(e > 0.0) || !std::isfinite(e))
          throw std::runtime_error(
              "candidate_via_exceedance: tail draw with zero or infinite exceedance "
              "(tail law invariant violation)");
        return 1.0 / e;
      });
  auto r = stats::mean_report(vals, seed);
  stats::add_trimmed_diagnostic(r, vals);
  return r;
}

EstimatorReport candidate_via_theta(const TailLaw& tail, std::size_t n, std::uint64_t seed,
                                    int workers) {
  auto sample_theta = tail.sample_theta;
  double alpha = tail.alpha;
  NormChoice norm = tail.norm;
  auto vals = rng::replicate_doubles(
      n, rng::derive(seed, "cand-theta"), workers, [&](std::size_t, std::mt19937_64& gen) {
        Path th = sample_theta(gen);
        double sup = sup_norm(th, norm);
        double energy = lp_power_norm(th, alpha, norm);
        if (!(sup > 0) || !(energy > 0))
          throw std::runtime_error("candidate_via_theta: degenerate Theta draw");
        return std::pow(sup, alpha) / energy;
      });
  auto r = stats::mean_report(vals, seed);
  stats::add_trimmed_diagnostic(r, vals);
  return r;
}

EstimatorReport candidate_conditional_shotnoise(
    const std::function<double(std::mt19937_64&)>& eta_sampler, std::size_t n, std::uint64_t seed,
    int workers) {
  auto vals = rng::replicate_doubles(
      n, rng::derive(seed, "cand-cond"), workers,
      [&](std::size_t, std::mt19937_64& gen) { return eta_sampler(gen); });
  auto mean_eta = stats::mean_report(vals, seed);
  if (!(mean_eta.estimate > 0))
    throw std::runtime_error("candidate_conditional_shotnoise: nonpositive mean session length");
  EstimatorReport r;
  r.estimate = 1.0 / mean_eta.estimate;
  // delta method
  r.std_error = mean_eta.std_error / (mean_eta.estimate * mean_eta.estimate);
  r.n = n;
  r.ci_low = r.estimate - 1.96 * r.std_error;
  r.ci_high = r.estimate + 1.96 * r.std_error;
  r.seed = seed;
  r.meta["mean_session_length"] = std::to_string(mean_eta.estimate);
  return r;
}

// --- identity checkers ---------------------------------------------------------

TwoSidedCheck check_time_change(const TailLaw& tail, const PathFunctional& H, double t, double x,
                                std::size_t n, std::uint64_t seed, int workers) {
  if (!(x > 0)) throw std::invalid_argument("check_time_change: x must be > 0");
  auto sample_y = tail.sample_y;
  double alpha = tail.alpha;
  NormChoice norm = tail.norm;
  auto lhs = rng::replicate_doubles(
      n, rng::derive(seed, "tcf-lhs"), workers, [&](std::size_t, std::mt19937_64& gen) {
        Path y = sample_y(gen);
        return pathkit::vector_norm(y.value(t), norm) > x ? H(y) : 0.0;
      });
  double xa = std::pow(x, -alpha);
  auto rhs = rng::replicate_doubles(
      n, rng::derive(seed, "tcf-rhs"), workers, [&](std::size_t, std::mt19937_64& gen) {
        Path y = sample_y(gen);
        if (!(x * pathkit::vector_norm(y.value(-t), norm) > 1.0)) return 0.0;
        return xa * H(shift(y, t).scaled(x));
      });
  TwoSidedCheck c;
  c.lhs = stats::mean_report(lhs, seed);
  c.rhs = stats::mean_report(rhs, seed);
  c.zscore = stats::z_between(c.lhs, c.rhs);
  return c;
}

namespace {

void require_zero_homogeneous(const PathFunctional& H0, const PathSampler& sampler,
                              std::uint64_t seed) {
  auto gen = rng::substream(rng::derive(seed, "homogeneity-spot-check"), 0);
  for (int i = 0; i < 3; ++i) {
    Path p = sampler(gen);
    double base = H0(p);
    for (double c : {0.5, 3.7}) {
      if (std::abs(H0(p.scaled(c)) - base) > 1e-8 * (1.0 + std::abs(base)))
        throw std::invalid_argument("check_tilt_shift: functional failed the 0-homogeneity check");
    }
  }
}

}  // namespace

TwoSidedCheck check_tilt_shift(const SpectralLaw& spectral, const PathFunctional& H0, double t,
                               std::size_t n, std::uint64_t seed, int workers) {
  require_zero_homogeneous(H0, spectral.sample_z, seed);
  auto sample_z = spectral.sample_z;
  double alpha = spectral.alpha;
  NormChoice norm = spectral.norm;
  auto lhs = rng::replicate_doubles(
      n, rng::derive(seed, "tilt-lhs"), workers, [&](std::size_t, std::mt19937_64& gen) {
        Path z = sample_z(gen);
        double nz = pathkit::vector_norm(z.value(t), norm);
        return nz == 0.0 ? 0.0 : std::pow(nz, alpha) * H0(z);
      });
  auto rhs = rng::replicate_doubles(
      n, rng::derive(seed, "tilt-rhs"), workers, [&](std::size_t, std::mt19937_64& gen) {
        Path z = sample_z(gen);
        double nz = pathkit::vector_norm(z.value(0.0), norm);
        return nz == 0.0 ? 0.0 : std::pow(nz, alpha) * H0(shift(z, t));
      });
  TwoSidedCheck c;
  c.lhs = stats::mean_report(lhs, seed);
  c.rhs = stats::mean_report(rhs, seed);
  c.zscore = stats::z_between(c.lhs, c.rhs);
  return c;
}

TwoSidedCheck check_independence_tilted(const TailLaw& tail, const PathFunctional& S, double x,
                                        std::size_t n, std::uint64_t seed, int workers) {
  if (!(x > 1)) throw std::invalid_argument("check_independence_tilted: x must be > 1");
  auto sample_y = tail.sample_y;
  double xa = std::pow(x, -tail.alpha);
  NormChoice norm = tail.norm;
  struct Pair {
    double lhs, rhs;
  };
  auto pairs = rng::replicate<Pair>(
      n, rng::derive(seed, "indep-tilt"), workers, [&](std::size_t, std::mt19937_64& gen) {
        Path y = sample_y(gen);
        double e = exceedance(y, 1.0, norm);
        if (!(e > 0) || !std::isfinite(e))
          throw std::runtime_error("check_independence_tilted: degenerate exceedance");
        double s = S(y);
        return Pair{sup_norm(y, norm) > x ? s / e : 0.0, xa * s / e};
      });
  std::vector<double> lhs(n), rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    lhs[i] = pairs[i].lhs;
    rhs[i] = pairs[i].rhs;
  }
  return stats::paired_check(lhs, rhs, seed);
}

TwoSidedCheck check_forward_identity(const TailLaw& tail, double theta, std::size_t n,
                                     std::uint64_t seed, bool signed_mode, int workers) {
  if (!(tail.alpha > 0)) throw std::invalid_argument("check_forward_identity: alpha must be > 0");
  if (!tail.dissipative())
    throw std::invalid_argument("check_forward_identity: tail law has no cluster sampler");
  double alpha = tail.alpha;
  NormChoice norm = tail.norm;
  auto sample_q = tail.sample_q;
  auto sample_theta = tail.sample_theta;

  auto lhs = rng::replicate_doubles(
      n, rng::derive(seed, "fwd-lhs"), workers, [&](std::size_t, std::mt19937_64& gen) {
        Path q = sample_q(gen);
        if (signed_mode) {
          double s = pathkit::integral(q);
          return s > 0 ? theta * std::pow(s, alpha) : 0.0;
        }
        return theta * std::pow(lp_power_norm(q, 1.0, norm), alpha);
      });
  auto rhs = rng::replicate_doubles(
      n, rng::derive(seed, "fwd-rhs"), workers, [&](std::size_t, std::mt19937_64& gen) {
        Path th = sample_theta(gen);
        double end = th.window_end();
        if (!(end > 0)) return 0.0;
        Path fwd = restrict(th, 0.0, end);
        if (signed_mode) {
          double s = pathkit::integral(fwd);
          double w = s > 0 ? std::pow(s, alpha - 1.0) : 0.0;
          return alpha * th.scalar_value(0.0) * w;
        }
        double s = lp_power_norm(fwd, 1.0, norm);
        if (!(s > 0))
          throw std::runtime_error("check_forward_identity: zero forward integral draw");
        return alpha * std::pow(s, alpha - 1.0);
      });
  TwoSidedCheck c;
  c.lhs = stats::mean_report(lhs, seed);
  c.rhs = stats::mean_report(rhs, seed);
  stats::add_trimmed_diagnostic(c.lhs, lhs);
  stats::add_trimmed_diagnostic(c.rhs, rhs);
  c.zscore = stats::z_between(c.lhs, c.rhs);
  return c;
}

TwoSidedCheck check_q_normalization(const TailLaw& tail, double theta, std::size_t n,
                                    std::uint64_t seed, int workers) {
  if (!tail.dissipative())
    throw std::invalid_argument("check_q_normalization: tail law has no cluster sampler");
  auto sample_q = tail.sample_q;
  double alpha = tail.alpha;
  NormChoice norm = tail.norm;
  auto vals = rng::replicate_doubles(
      n, rng::derive(seed, "q-normalization"), workers,
      [&](std::size_t, std::mt19937_64& gen) { return theta * lp_power_norm(sample_q(gen), alpha, norm); });
  TwoSidedCheck c;
  c.lhs = stats::mean_report(vals, seed);
  c.rhs.estimate = 1.0;
  c.rhs.std_error = 0.0;
  c.rhs.n = 0;
  c.rhs.ci_low = c.rhs.ci_high = 1.0;
  c.rhs.seed = seed;
  c.zscore = stats::z_between(c.lhs, c.rhs);
  return c;
}

// --- anchoring maps --------------------------------------------------------------

DensityTable anchor_density(const TailLaw& tail, AnchorKind anchor, std::vector<double> t_grid,
                            std::size_t n, std::uint64_t seed, int workers) {
  if (!tail.dissipative())
    throw std::invalid_argument("anchor_density: tail law has no cluster sampler");
  if (t_grid.size() < 2) throw std::invalid_argument("anchor_density: need a grid");
  std::sort(t_grid.begin(), t_grid.end());

  double theta = tail.theta_closed_form
                     ? *tail.theta_closed_form
                     : candidate_via_theta(tail, std::min<std::size_t>(n, 20000),
                                           rng::derive(seed, "anchor-theta"), workers)
                           .estimate;

  auto sample_q = tail.sample_q;
  double alpha = tail.alpha;
  NormChoice norm = tail.norm;
  struct Draw {
    Path q;
    double ypar;
    double s;
  };
  auto draws = rng::replicate<Draw>(
      n, rng::derive(seed, "anchor"), workers, [&](std::size_t, std::mt19937_64& gen) {
        Path q = sample_q(gen);
        double ypar = pareto_sample(alpha, gen);
        double s = anchor == AnchorKind::infargmax
                       ? infargmax(q, norm)
                       : pathkit::first_exceedance(q, norm, 1.0 / ypar);
        if (!std::isfinite(s))
          throw std::runtime_error("anchor_density: anchor not finite on a dissipative draw");
        return Draw{std::move(q), ypar, s};
      });

  DensityTable table;
  table.t = t_grid;
  table.density.assign(t_grid.size(), 0.0);
  table.std_error.assign(t_grid.size(), 0.0);
  table.seed = seed;
  table.theta_used = theta;

  auto hit = [&](const Draw& d, double t) {
    return d.ypar * pathkit::vector_norm(d.q.value(d.s - t), norm) > 1.0;
  };
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    double count = 0.0;
    for (const Draw& d : draws)
      if (hit(d, t_grid[j])) count += 1.0;
    double p = count / static_cast<double>(n);
    table.density[j] = theta * p;
    table.std_error[j] = theta * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  }
  for (std::size_t j = 0; j + 1 < t_grid.size(); ++j)
    table.trapezoid_mass +=
        0.5 * (table.density[j] + table.density[j + 1]) * (t_grid[j + 1] - t_grid[j]);

  double zero_minus = 0.0, cont = 0.0;
  for (const Draw& d : draws) {
    if (hit(d, -1e-9)) zero_minus += 1.0;
    if (d.ypar * pathkit::vector_norm(d.q.value(d.s), norm) > 1.0) cont += 1.0;
  }
  table.density_at_zero_minus = theta * zero_minus / static_cast<double>(n);
  table.continuity_probability = cont / static_cast<double>(n);
  return table;
}

// --- structural checks -------------------------------------------------------------

double pareto_ks_pvalue(const TailLaw& tail, std::size_t n, std::uint64_t seed, int workers) {
  auto sample_y = tail.sample_y;
  double alpha = tail.alpha;
  NormChoice norm = tail.norm;
  auto u = rng::replicate_doubles(
      n, rng::derive(seed, "pareto-ks"), workers, [&](std::size_t, std::mt19937_64& gen) {
        double y0 = pathkit::vector_norm(sample_y(gen).value(0.0), norm);
        if (!(y0 > 1.0))
          throw std::runtime_error("pareto_ks: ||Y(0)|| <= 1 (tail law invariant violation)");
        return 1.0 - std::pow(y0, -alpha);
      });
  return stats::ks_pvalue(stats::ks_statistic_uniform(std::move(u)), n);
}

stats::CorrelationReport theta_independence_check(const TailLaw& tail, std::size_t n,
                                                  std::uint64_t seed, int workers) {
  auto sample_y = tail.sample_y;
  NormChoice norm = tail.norm;
  struct Pair {
    double mag, fn;
  };
  auto pairs = rng::replicate<Pair>(
      n, rng::derive(seed, "theta-indep"), workers, [&](std::size_t, std::mt19937_64& gen) {
        Path y = sample_y(gen);
        double mag = pathkit::vector_norm(y.value(0.0), norm);
        Path theta = y.scaled(1.0 / mag);
        // bounded functional of the angular part
        double fn = std::min(exceedance(theta, 0.5, norm), 25.0);
        return Pair{mag, fn};
      });
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    // correlate a bounded transform of the Pareto magnitude
    x[i] = std::min(pairs[i].mag, 50.0);
    y[i] = pairs[i].fn;
  }
  return stats::correlation_report(x, y);
}

}  // namespace tailsim::tailcore
