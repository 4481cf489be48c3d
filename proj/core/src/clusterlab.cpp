#include "tailsim/clusterlab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tailsim/rng.hpp"

namespace tailsim::clusterlab {

using pathkit::exceedance;
using pathkit::restrict;
using pathkit::shift;
using pathkit::sup_norm;

ClusterBlocks extract_blocks(const Path& path, double r_T, double a_T, double phase) {
  double start = path.window_start() + phase;
  double T = path.window_end() - path.window_start();
  if (!(r_T > 0)) throw std::invalid_argument("extract_blocks: r_T must be > 0");
  if (!(a_T > 0)) throw std::invalid_argument("extract_blocks: a_T must be > 0");
  if (r_T > T) throw std::invalid_argument("extract_blocks: r_T exceeds the window length");
  std::size_t n = static_cast<std::size_t>(std::floor((path.window_end() - start) / r_T));
  ClusterBlocks out;
  out.a_T = a_T;
  out.r_T = r_T;
  out.T = T;
  out.blocks.reserve(n);
  out.scaled_times.reserve(n);
  double m_T = T / r_T;
  double inv = 1.0 / a_T;
  for (std::size_t i = 0; i < n; ++i) {
    double lo = start + static_cast<double>(i) * r_T;
    out.blocks.push_back(shift(restrict(path, lo, lo + r_T), -lo).scaled(inv));
    out.scaled_times.push_back(static_cast<double>(i + 1) / m_T);
  }
  out.discarded_fraction = (T - static_cast<double>(n) * r_T) / T;
  return out;
}

ClusterFunctional K_exceedance() {
  return {"K_e", [](const Path& p) { return sup_norm(p, NormChoice::sup_abs) > 1.0 ? 1.0 : 0.0; }};
}

ClusterFunctional K_log() {
  return {"K_log", [](const Path& p) {
            double s = 0.0;
            for (std::size_t i = 0; i < p.piece_count(); ++i) {
              double v = pathkit::vector_norm(p.piece_value(i), NormChoice::sup_abs);
              if (v > 1.0) s += std::log(v) * p.piece_length(i);
            }
            return s;
          }};
}

ClusterFunctional K_exceed_level(double x) {
  return {"K_exceed_" + std::to_string(x),
          [x](const Path& p) { return sup_norm(p, NormChoice::sup_abs) > x ? 1.0 : 0.0; }};
}

void check_shift_invariant(const ClusterFunctional& K, const Path& sample, std::uint64_t seed) {
  auto gen = rng::substream(rng::derive(seed, "shift-invariance"), 0);
  std::uniform_real_distribution<double> u(-7.0, 7.0);
  double base = K(sample);
  for (int i = 0; i < 4; ++i) {
    double shifted = K(shift(sample, u(gen)));
    if (std::abs(shifted - base) > 1e-9 * (1.0 + std::abs(base)))
      throw std::invalid_argument("cluster functional failed the shift-invariance check: " +
                                  K.name);
  }
}

EstimatorReport empirical_cluster_measure(const ClusterBlocks& blocks, const ClusterFunctional& K,
                                          double marginal_tail, std::uint64_t seed,
                                          std::size_t bootstrap) {
  if (!(marginal_tail > 0.0 && marginal_tail < 1.0))
    throw std::invalid_argument("empirical_cluster_measure: marginal_tail must be in (0,1)");
  if (blocks.blocks.empty())
    throw std::invalid_argument("empirical_cluster_measure: no blocks");
  std::vector<double> values(blocks.blocks.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < blocks.blocks.size(); ++i) {
    values[i] = K(blocks.blocks[i]);
    sum += values[i];
  }
  double denom = blocks.T * marginal_tail;
  EstimatorReport r;
  r.estimate = sum / denom;
  r.n = blocks.blocks.size();
  r.seed = seed;

  // block bootstrap: whole blocks resampled with replacement
  auto gen = rng::substream(rng::derive(seed, "block-bootstrap"), 0);
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  std::vector<double> boot(bootstrap);
  for (std::size_t b = 0; b < bootstrap; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[pick(gen)];
    boot[b] = s / denom;
  }
  double mean = 0.0;
  for (double v : boot) mean += v;
  mean /= static_cast<double>(bootstrap);
  double ss = 0.0;
  for (double v : boot) {
    double d = v - mean;
    ss += d * d;
  }
  r.std_error = std::sqrt(ss / static_cast<double>(bootstrap - 1));
  r.ci_low = r.estimate - 1.96 * r.std_error;
  r.ci_high = r.estimate + 1.96 * r.std_error;
  r.meta["functional"] = K.name;
  r.meta["bootstrap"] = std::to_string(bootstrap);
  return r;
}

double empirical_exceedance_fraction(const Path& path, double u, NormChoice norm) {
  double T = path.window_end() - path.window_start();
  return exceedance(path, u, norm) / T;
}

EstimatorReport gamma_variance_functional(const TailLaw& tail, std::size_t n, std::uint64_t seed,
                                          int workers) {
  auto sample_y = tail.sample_y;
  double alpha = tail.alpha;
  NormChoice norm = tail.norm;
  auto vals = rng::replicate_doubles(
      n, rng::derive(seed, "gamma-var"), workers, [&](std::size_t, std::mt19937_64& gen) {
        Path y = sample_y(gen);
        double s = 0.0;
        for (std::size_t i = 0; i < y.piece_count(); ++i) {
          double v = std::min(pathkit::vector_norm(y.piece_value(i), norm), 1.0);
          if (v > 0) s += std::pow(v, alpha) * y.piece_length(i);
        }
        return s;
      });
  auto base = stats::mean_report(vals, seed);
  EstimatorReport r = base;
  r.estimate = base.estimate / alpha;  // gamma = 1/alpha times the integral
  r.std_error = base.std_error / alpha;
  r.ci_low = r.estimate - 1.96 * r.std_error;
  r.ci_high = r.estimate + 1.96 * r.std_error;
  return r;
}

CurveTable anticlustering_diagnostic(const ProcessModel& model, double a_T, double r_T,
                                     const std::vector<double>& t_grid, double x,
                                     std::size_t n_conditioning_events, std::uint64_t seed,
                                     std::size_t max_windows, int workers) {
  if (t_grid.empty()) throw std::invalid_argument("anticlustering_diagnostic: empty grid");
  if (max_windows == 0) max_windows = 400 * std::max<std::size_t>(n_conditioning_events, 1);
  const double margin = 1.0;
  const double W = 2.0 * (r_T + margin);
  const double tau = r_T + margin;

  struct WindowResult {
    bool accepted = false;
    std::vector<char> hits;
  };
  auto results = rng::replicate<WindowResult>(
      max_windows, rng::derive(seed, "anticluster"), workers,
      [&](std::size_t, std::mt19937_64& gen) {
        WindowResult w;
        Path path = model.simulate(W, gen).path;
        if (!(pathkit::vector_norm(path.value(tau), NormChoice::sup_abs) > a_T)) return w;
        w.accepted = true;
        w.hits.resize(t_grid.size());
        for (std::size_t j = 0; j < t_grid.size(); ++j) {
          double t = t_grid[j];
          double level = a_T * x;
          bool hit;
          if (t <= 0.0) {
            hit = sup_norm(path, tau - r_T, tau + r_T) > level;
          } else if (t >= r_T) {
            hit = false;
          } else {
            hit = sup_norm(path, tau - r_T, tau - t) > level ||
                  sup_norm(path, tau + t, tau + r_T) > level;
          }
          w.hits[j] = hit ? 1 : 0;
        }
        return w;
      });

  std::size_t accepted = 0;
  std::vector<double> counts(t_grid.size(), 0.0);
  for (const auto& w : results) {
    if (!w.accepted) continue;
    ++accepted;
    for (std::size_t j = 0; j < t_grid.size(); ++j) counts[j] += w.hits[j];
    if (accepted >= n_conditioning_events) break;
  }
  if (accepted < 100)
    throw std::runtime_error("anticlustering_diagnostic: insufficient data, only " +
                             std::to_string(accepted) + " conditioning events in " +
                             std::to_string(max_windows) + " windows");

  CurveTable table;
  table.x = t_grid;
  table.n = accepted;
  table.estimate.resize(t_grid.size());
  table.std_error.resize(t_grid.size());
  table.lo.resize(t_grid.size());
  table.hi.resize(t_grid.size());
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    double p = counts[j] / static_cast<double>(accepted);
    table.estimate[j] = p;
    table.std_error[j] = std::sqrt(p * (1.0 - p) / static_cast<double>(accepted));
    auto wi = stats::wilson_interval(counts[j], static_cast<double>(accepted));
    table.lo[j] = wi.low;
    table.hi[j] = wi.high;
  }
  table.meta["conditioning_events"] = static_cast<double>(accepted);
  table.meta["a_T"] = a_T;
  table.meta["r_T"] = r_T;
  table.meta["x"] = x;
  return table;
}

std::vector<ConditionalTailReport> conditional_tail_paths(const ProcessModel& model,
                                                          const std::vector<double>& x_levels,
                                                          double half_window, std::size_t n_events,
                                                          std::uint64_t seed, int workers) {
  TailLaw law = model.tail_law();
  struct Panel {
    std::string name;
    std::function<double(const Path&)> fn;
  };
  double L = half_window;
  std::vector<Panel> panel{
      {"capped_exceedance", [](const Path& p) { return std::min(exceedance(p, 1.0), 20.0); }},
      {"capped_inner_sup",
       [L](const Path& p) { return std::min(sup_norm(p, -L / 2, L / 2), 10.0); }},
      {"capped_value_at_0",
       [](const Path& p) {
         return std::min(pathkit::vector_norm(p.value(0.0), NormChoice::sup_abs), 5.0);
       }},
  };

  // reference means under the analytic tail law
  std::size_t n_ref = std::max<std::size_t>(4 * n_events, 20000);
  std::vector<std::vector<double>> ref(panel.size());
  {
    auto sample_y = law.sample_y;
    for (std::size_t k = 0; k < panel.size(); ++k) ref[k].reserve(n_ref);
    for (std::size_t i = 0; i < n_ref; ++i) {
      auto gen = rng::substream(rng::derive(seed, "cond-tail-law"), i);
      Path y = sample_y(gen);
      for (std::size_t k = 0; k < panel.size(); ++k) ref[k].push_back(panel[k].fn(y));
    }
  }

  std::vector<ConditionalTailReport> reports;
  for (std::size_t lev = 0; lev < x_levels.size(); ++lev) {
    double x = x_levels[lev];
    const double W = 2.0 * half_window + 2.0;
    const double tau = half_window + 1.0;
    std::size_t max_attempts = 2'000'000;

    struct Event {
      bool accepted = false;
      std::vector<double> values;
      double u = 0.0;  // Pareto CDF transform of the conditioned magnitude
    };
    std::size_t attempts = 0, accepted = 0;
    std::vector<std::vector<double>> ens(panel.size());
    std::vector<double> pareto_u;
    const std::size_t batch = std::max<std::size_t>(n_events, 256);
    while (accepted < n_events && attempts < max_attempts) {
      auto chunk = rng::replicate<Event>(
          batch, rng::derive(seed ^ (0x51ed1000 + lev), "cond-tail-" + std::to_string(attempts)),
          workers, [&](std::size_t, std::mt19937_64& gen) {
            Event ev;
            Path path = model.simulate(W, gen).path;
            double mag = pathkit::vector_norm(path.value(tau), NormChoice::sup_abs);
            if (!(mag > x)) return ev;
            ev.accepted = true;
            Path y = shift(restrict(path, tau - half_window, tau + half_window), -tau)
                         .scaled(1.0 / x);
            ev.values.resize(panel.size());
            for (std::size_t k = 0; k < panel.size(); ++k) ev.values[k] = panel[k].fn(y);
            ev.u = 1.0 - std::pow(mag / x, -model.alpha());
            return ev;
          });
      attempts += batch;
      for (auto& ev : chunk) {
        if (!ev.accepted) continue;
        ++accepted;
        pareto_u.push_back(ev.u);
        for (std::size_t k = 0; k < panel.size(); ++k) ens[k].push_back(ev.values[k]);
        if (accepted >= n_events) break;
      }
      if (accepted == 0 && attempts >= 1'000'000)
        throw std::runtime_error(
            "conditional_tail_paths: acceptance rate below 1e-6, lower the conditioning level x");
    }
    if (accepted < 50)
      throw std::runtime_error("conditional_tail_paths: only " + std::to_string(accepted) +
                               " events at level " + std::to_string(x));

    ConditionalTailReport rep;
    rep.x_level = x;
    rep.accepted = accepted;
    rep.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(attempts);
    for (std::size_t k = 0; k < panel.size(); ++k) {
      auto a = stats::mean_report(ens[k], seed);
      auto b = stats::mean_report(ref[k], seed);
      FunctionalComparison cmp;
      cmp.name = panel[k].name;
      cmp.ensemble_mean = a.estimate;
      cmp.law_mean = b.estimate;
      cmp.zscore = stats::z_between(a, b);
      rep.max_abs_z = std::max(rep.max_abs_z, std::abs(cmp.zscore));
      rep.panel.push_back(std::move(cmp));
    }
    rep.pareto_ks_pvalue =
        stats::ks_pvalue(stats::ks_statistic_uniform(std::move(pareto_u)), accepted);
    reports.push_back(std::move(rep));
  }
  return reports;
}

PoissonCountReport cluster_count_poisson_test(const ProcessModel& model, double theta, double r_T,
                                              double x, double T, std::size_t n_windows,
                                              std::uint64_t seed, int workers) {
  double a_T = model.scale_for(T);
  double lambda = theta * std::pow(x, -model.alpha());
  if (lambda * static_cast<double>(n_windows) < 2.0)
    throw std::invalid_argument("cluster_count_poisson_test: underpowered, expected total count " +
                                std::to_string(lambda * static_cast<double>(n_windows)));

  struct WindowStats {
    std::size_t count = 0;
    std::vector<double> positions;
  };
  auto results = rng::replicate<WindowStats>(
      n_windows, rng::derive(seed, "ppcluster"), workers, [&](std::size_t, std::mt19937_64& gen) {
        WindowStats w;
        Path path = model.simulate(T, gen).path;
        auto blocks = extract_blocks(path, r_T, a_T);
        for (std::size_t i = 0; i < blocks.blocks.size(); ++i) {
          if (sup_norm(blocks.blocks[i], NormChoice::sup_abs) > x) {
            ++w.count;
            w.positions.push_back(blocks.scaled_times[i]);
          }
        }
        return w;
      });

  PoissonCountReport rep;
  rep.n_windows = n_windows;
  rep.mean_expected = lambda;
  std::size_t max_count = 0;
  for (const auto& w : results) max_count = std::max(max_count, w.count);
  std::vector<double> observed(max_count + 1, 0.0);
  std::vector<double> positions;
  double total = 0.0;
  std::vector<double> counts_by_window(n_windows);
  for (std::size_t i = 0; i < n_windows; ++i) {
    observed[results[i].count] += 1.0;
    total += static_cast<double>(results[i].count);
    counts_by_window[i] = static_cast<double>(results[i].count);
    for (double p : results[i].positions) positions.push_back(p);
  }
  rep.sample_mean = total / static_cast<double>(n_windows);

  // Poisson pmf bins, tail merged so every expectation is >= 5
  std::vector<double> expected;
  std::vector<double> obs_binned;
  double cum_p = 0.0, pk = std::exp(-lambda);
  double pending_exp = 0.0, pending_obs = 0.0;
  for (std::size_t k = 0; k <= max_count; ++k) {
    double e = pk * static_cast<double>(n_windows);
    cum_p += pk;
    pk *= lambda / static_cast<double>(k + 1);
    pending_exp += e;
    pending_obs += observed[k];
    if (pending_exp >= 5.0) {
      expected.push_back(pending_exp);
      obs_binned.push_back(pending_obs);
      pending_exp = pending_obs = 0.0;
    }
  }
  // tail bin: everything above max_count plus any pending mass
  double tail_exp = (1.0 - cum_p) * static_cast<double>(n_windows) + pending_exp;
  if (!expected.empty() && tail_exp < 5.0) {
    expected.back() += tail_exp;
    obs_binned.back() += pending_obs;
  } else {
    expected.push_back(std::max(tail_exp, 1e-9));
    obs_binned.push_back(pending_obs);
  }
  if (expected.size() < 2)
    throw std::invalid_argument("cluster_count_poisson_test: fewer than two usable bins");
  rep.observed = obs_binned;
  rep.expected = expected;
  rep.chi2 = stats::chi_square_gof(obs_binned, expected, 0);

  if (positions.size() >= 8) {
    double d = stats::ks_statistic_uniform(positions);
    rep.times_uniform_ks_pvalue = stats::ks_pvalue(d, positions.size());
  } else {
    rep.times_uniform_ks_pvalue = 1.0;
  }

  if (n_windows >= 4) {
    std::vector<double> a(counts_by_window.begin(), counts_by_window.end() - 1);
    std::vector<double> b(counts_by_window.begin() + 1, counts_by_window.end());
    rep.adjacent_count_corr_z = stats::correlation_report(a, b).zscore;
  }
  return rep;
}

RunningMaxReport running_max_law(const ProcessModel& model, double theta, double T,
                                 const std::vector<double>& x_grid, std::size_t n_windows,
                                 std::uint64_t seed, int workers, double mass_factor) {
  if (x_grid.empty()) throw std::invalid_argument("running_max_law: empty grid");
  double a_T = model.scale_for(T);
  auto sups = rng::replicate_doubles(
      n_windows, rng::derive(seed, "runmax"), workers, [&](std::size_t, std::mt19937_64& gen) {
        return sup_norm(model.simulate(T, gen).path, NormChoice::sup_abs) / a_T;
      });

  RunningMaxReport rep;
  rep.n_windows = n_windows;
  rep.table.x = x_grid;
  rep.table.n = n_windows;
  double alpha = model.alpha();
  for (double x : x_grid) {
    double count = 0.0;
    for (double s : sups)
      if (s <= x) count += 1.0;
    double ecdf = count / static_cast<double>(n_windows);
    double limit = std::exp(-theta * mass_factor * std::pow(x, -alpha));
    rep.table.estimate.push_back(ecdf);
    rep.table.std_error.push_back(
        std::sqrt(ecdf * (1.0 - ecdf) / static_cast<double>(n_windows)));
    auto wi = stats::wilson_interval(count, static_cast<double>(n_windows));
    rep.table.lo.push_back(wi.low);
    rep.table.hi.push_back(wi.high);
    rep.sup_discrepancy = std::max(rep.sup_discrepancy, std::abs(ecdf - limit));
    rep.table.meta["limit_at_" + std::to_string(x)] = limit;
  }
  // point estimate of the extremal index at the grid point nearest 1
  std::size_t j0 = 0;
  for (std::size_t j = 1; j < x_grid.size(); ++j)
    if (std::abs(x_grid[j] - 1.0) < std::abs(x_grid[j0] - 1.0)) j0 = j;
  double x0 = x_grid[j0];
  double p = std::min(std::max(rep.table.estimate[j0], 1e-12), 1.0 - 1e-12);
  rep.theta_hat = -std::log(p) * std::pow(x0, alpha) / mass_factor;
  double se_p = std::sqrt(p * (1.0 - p) / static_cast<double>(n_windows));
  rep.theta_hat_se = se_p / p * std::pow(x0, alpha) / mass_factor;
  rep.table.meta["a_T"] = a_T;
  rep.table.meta["mass_factor"] = mass_factor;
  return rep;
}

CurveTable tightness_diagnostic(const ProcessModel& model, double a, double b,
                                const std::vector<double>& delta_grid, double x, double eps,
                                std::size_t n, std::uint64_t seed, int workers) {
  if (!(a < b)) throw std::invalid_argument("tightness_diagnostic: need a < b");
  for (double d : delta_grid)
    if (!(d > 0.0 && d < b - a))
      throw std::invalid_argument("tightness_diagnostic: delta must lie in (0, b-a)");
  double W = b - a;
  struct WindowStats {
    std::vector<char> num;
    char marg = 0;
  };
  auto results = rng::replicate<WindowStats>(
      n, rng::derive(seed, "tightness"), workers, [&](std::size_t, std::mt19937_64& gen) {
        WindowStats w;
        Path path = model.simulate(W, gen).path;
        w.num.resize(delta_grid.size());
        for (std::size_t j = 0; j < delta_grid.size(); ++j)
          w.num[j] = pathkit::modulus_w_prime(path, 0.0, W, delta_grid[j]) > x * eps ? 1 : 0;
        w.marg = model.sample_marginal(gen) > x ? 1 : 0;
        return w;
      });
  double denom = 0.0;
  std::vector<double> nums(delta_grid.size(), 0.0);
  for (const auto& w : results) {
    denom += w.marg;
    for (std::size_t j = 0; j < delta_grid.size(); ++j) nums[j] += w.num[j];
  }
  if (denom < 20.0)
    throw std::runtime_error("tightness_diagnostic: underpowered, only " +
                             std::to_string(static_cast<long>(denom)) +
                             " marginal exceedances at level x");
  CurveTable table;
  table.x = delta_grid;
  table.n = n;
  for (std::size_t j = 0; j < delta_grid.size(); ++j) {
    double ratio = nums[j] / denom;
    table.estimate.push_back(ratio);
    // ratio of two binomial counts on the same windows; delta-method scale
    double p_num = nums[j] / static_cast<double>(n);
    double se = denom > 0 ? std::sqrt(std::max(p_num * (1.0 - p_num), 1e-12) /
                                      static_cast<double>(n)) /
                                (denom / static_cast<double>(n))
                          : 0.0;
    table.std_error.push_back(se);
    auto wi = stats::wilson_interval(nums[j], static_cast<double>(n));
    table.lo.push_back(wi.low / (denom / static_cast<double>(n)));
    table.hi.push_back(wi.high / (denom / static_cast<double>(n)));
  }
  table.meta["marginal_exceedances"] = denom;
  table.meta["x"] = x;
  table.meta["eps"] = eps;
  return table;
}

}  // namespace tailsim::clusterlab
