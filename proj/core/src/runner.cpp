#include "tailsim/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "tailsim/clusterlab.hpp"
#include "tailsim/pathkit.hpp"
#include "tailsim/procsim.hpp"
#include "tailsim/rng.hpp"
#include "tailsim/stats.hpp"
#include "tailsim/tailcore.hpp"

namespace tailsim::runner {

using json = nlohmann::json;
using pathkit::Path;
using procsim::EtaLaw;
using procsim::JumpLaw;
using procsim::ProcessModel;
using stats::EstimatorReport;
using stats::TwoSidedCheck;
using tailcore::TailLaw;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

std::string hash_hex(const std::string& text) {
  std::uint64_t h = rng::fnv1a(text);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string iso_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json report_json(const EstimatorReport& r) {
  json j;
  j["estimate"] = r.estimate;
  j["std_error"] = r.std_error;
  j["n"] = r.n;
  j["ci95"] = {r.ci_low, r.ci_high};
  j["seed"] = r.seed;
  if (!r.meta.empty()) j["meta"] = r.meta;
  return j;
}

json check_json(const TwoSidedCheck& c) {
  json j;
  j["lhs"] = report_json(c.lhs);
  j["rhs"] = report_json(c.rhs);
  j["zscore"] = c.zscore;
  return j;
}

// time values may carry the +/-infinity sentinel; serialized as strings
json time_json(double t) {
  if (std::isinf(t)) return t > 0 ? json("inf") : json("-inf");
  return json(t);
}

// --- model construction -------------------------------------------------------

EtaLaw eta_from_json(const json& j) {
  std::string law = j.at("law").get<std::string>();
  if (law == "deterministic") return EtaLaw::deterministic(j.at("value").get<double>());
  if (law == "exponential") return EtaLaw::exponential(j.at("rate").get<double>());
  if (law == "uniform") return EtaLaw::uniform(j.at("a").get<double>(), j.at("b").get<double>());
  if (law == "pareto")
    return EtaLaw::pareto(j.at("scale").get<double>(), j.at("shape").get<double>());
  fail("unknown session-length law: " + law);
}

Path shape_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "indicator")
    return Path::indicator(j.at("a").get<double>(), j.at("b").get<double>(),
                           j.value("value", 1.0));
  if (kind == "exp_decay") {
    double rate = j.at("rate").get<double>();
    double cut = j.value("cut", 15.0 / rate);
    double step = j.value("step", 1e-3);
    return procsim::discretize_shape([rate](double t) { return std::exp(-rate * t); }, 0.0, cut,
                                     step);
  }
  if (kind == "samples")
    return Path::from_samples(j.at("start").get<double>(), j.at("step").get<double>(),
                              j.at("values").get<std::vector<double>>());
  fail("unknown shape kind: " + kind);
}

std::unique_ptr<ProcessModel> model_from_json(const json& j, std::uint64_t seed) {
  std::string cls = j.at("class").get<std::string>();
  if (cls == "shot_noise") {
    double alpha = j.at("alpha").get<double>();
    return procsim::make_shot_noise_model(eta_from_json(j.at("eta")),
                                          JumpLaw::pareto(alpha, j.value("skewness", 1.0)));
  }
  if (cls == "functional_ma") {
    double alpha = j.at("alpha").get<double>();
    return procsim::make_functional_ma_model(shape_from_json(j.at("shape")),
                                             JumpLaw::pareto(alpha, j.value("skewness", 1.0)));
  }
  if (cls == "max_stable_m3") {
    return procsim::make_max_stable_m3_model(eta_from_json(j.at("sessions")),
                                             j.at("alpha").get<double>(), seed);
  }
  if (cls == "max_stable_brown_resnick") {
    procsim::BrownResnickSpec spec;
    spec.alpha = j.at("alpha").get<double>();
    spec.variogram_scale = j.value("variogram_scale", 1.0);
    spec.grid_step = j.value("grid_step", 0.01);
    spec.tail_radius = j.value("tail_radius", 40.0);
    return procsim::make_brown_resnick_model(spec);
  }
  if (cls == "sum_stable_series") {
    return procsim::make_sum_stable_model(eta_from_json(j.at("sessions")),
                                          j.at("alpha").get<double>(),
                                          j.value("symmetric", false),
                                          j.value("K", std::size_t{8}), seed);
  }
  fail("unknown model class: " + cls);
}

tailcore::PathFunctional functional_from_json(const json& j) {
  if (j.is_null()) return tailcore::constant_functional(1.0);
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "const") return tailcore::constant_functional(j.value("c", 1.0));
  if (kind == "capped_exceedance")
    return tailcore::capped_exceedance_functional(j.value("level", 1.0), j.value("cap", 10.0));
  if (kind == "infargmax_leq") return tailcore::infargmax_indicator(j.value("t0", 0.0));
  if (kind == "exceedance_gt")
    return tailcore::exceedance_indicator(j.value("level", 1.0), j.value("s", 0.0));
  if (kind == "normalized_value")
    return tailcore::normalized_value_functional(j.value("t0", 0.0), j.value("a", -1.0),
                                                 j.value("b", 1.0), j.value("cap", 10.0));
  fail("unknown functional kind: " + kind);
}

clusterlab::ClusterFunctional cluster_functional_from_json(const json& j) {
  if (j.is_string()) {
    std::string name = j.get<std::string>();
    if (name == "K_e") return clusterlab::K_exceedance();
    if (name == "K_log") return clusterlab::K_log();
    fail("unknown cluster functional: " + name);
  }
  if (j.is_object() && j.contains("K_exceed"))
    return clusterlab::K_exceed_level(j.at("K_exceed").get<double>());
  fail("unknown cluster functional spec");
}

std::vector<double> grid_from_json(const json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  double from = j.at("from").get<double>();
  double to = j.at("to").get<double>();
  std::size_t points = j.at("points").get<std::size_t>();
  if (points < 2 || !(from < to)) fail("grid spec needs from < to and points >= 2");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = from + (to - from) * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

// tolerance spec: {"target": v, "abs": a} | {"target": v, "rel": r} |
// {"zmax": z} | {"pmin": p} | {"max": m}
struct ToleranceOutcome {
  bool applicable = false;
  bool passed = true;
  std::string text;
};

ToleranceOutcome check_tolerance(const json& params, double value, double zscore = 0.0,
                                 double pvalue = 1.0) {
  ToleranceOutcome out;
  if (!params.contains("tolerance")) return out;
  const json& tol = params.at("tolerance");
  out.applicable = true;
  std::ostringstream os;
  if (tol.contains("target")) {
    double target = tol.at("target").get<double>();
    double err = std::abs(value - target);
    if (tol.contains("abs")) {
      double a = tol.at("abs").get<double>();
      out.passed = err <= a;
      os << "|" << value << " - " << target << "| = " << err << (out.passed ? " <= " : " > ") << a;
    } else {
      double r = tol.at("rel").get<double>();
      out.passed = err <= r * std::abs(target);
      os << "relative error " << err / std::abs(target) << (out.passed ? " <= " : " > ") << r;
    }
  } else if (tol.contains("zmax")) {
    double z = tol.at("zmax").get<double>();
    out.passed = std::abs(zscore) <= z;
    os << "|z| = " << std::abs(zscore) << (out.passed ? " <= " : " > ") << z;
  } else if (tol.contains("pmin")) {
    double p = tol.at("pmin").get<double>();
    out.passed = pvalue >= p;
    os << "p = " << pvalue << (out.passed ? " >= " : " < ") << p;
  } else if (tol.contains("max")) {
    double m = tol.at("max").get<double>();
    out.passed = value <= m;
    os << value << (out.passed ? " <= " : " > ") << m;
  } else {
    fail("tolerance spec must contain target/zmax/pmin/max");
  }
  out.text = os.str();
  return out;
}

// --- task registry --------------------------------------------------------------

struct TaskContext {
  const ProcessModel& model;
  const json& model_json;
  json params;
  std::uint64_t seed;
  int workers;
  std::string out_dir;
  std::string file_stem;
  std::string config_hash;

  mutable std::optional<TailLaw> cached_tail;
  const TailLaw& tail() const {
    if (!cached_tail) cached_tail = model.tail_law();
    return *cached_tail;
  }

  std::string write_file(const std::string& suffix, const std::string& content,
                         std::vector<std::string>& files) const {
    if (out_dir.empty()) return "";
    std::filesystem::create_directories(out_dir);
    std::string name = file_stem + suffix;
    std::ofstream os(std::filesystem::path(out_dir) / name, std::ios::binary);
    os << content;
    files.push_back(name);
    return name;
  }
};

struct TaskOutcome {
  json payload;
  std::optional<bool> passed;
  std::string summary;
  std::vector<std::string> files;
};

struct TaskSpec {
  std::string description;
  std::function<void(const json&)> validate;  // cheap, runs before any simulation
  std::function<TaskOutcome(const TaskContext&)> run;
};

void need(const json& j, const char* key) {
  if (!j.contains(key)) fail(std::string("missing task parameter: ") + key);
}

std::string csv_header(const TaskContext& ctx, const std::string& columns) {
  std::ostringstream os;
  os << "# seed=" << ctx.seed << " config_hash=" << ctx.config_hash << "\n" << columns << "\n";
  return os.str();
}

std::string curve_csv(const TaskContext& ctx, const clusterlab::CurveTable& t,
                      const std::string& xname) {
  std::ostringstream os;
  os << csv_header(ctx, xname + ",estimate,se,n");
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%zu\n", t.x[i], t.estimate[i],
                  t.std_error[i], t.n);
    os << buf;
  }
  return os.str();
}

json curve_json(const clusterlab::CurveTable& t) {
  json j;
  j["x"] = t.x;
  j["estimate"] = t.estimate;
  j["std_error"] = t.std_error;
  j["lo"] = t.lo;
  j["hi"] = t.hi;
  j["n"] = t.n;
  j["meta"] = t.meta;
  return j;
}

TaskOutcome estimator_outcome(const TaskContext& ctx, const EstimatorReport& r) {
  TaskOutcome out;
  out.payload = report_json(r);
  out.payload["seed"] = ctx.seed;
  out.payload["config_hash"] = ctx.config_hash;
  auto tol = check_tolerance(ctx.params, r.estimate);
  if (tol.applicable) {
    out.passed = tol.passed;
    out.summary = tol.text;
  } else {
    std::ostringstream os;
    os << "estimate " << r.estimate << " +/- " << r.std_error;
    out.summary = os.str();
  }
  return out;
}

TaskOutcome zcheck_outcome(const TaskContext& ctx, const TwoSidedCheck& c) {
  TaskOutcome out;
  out.payload = check_json(c);
  out.payload["seed"] = ctx.seed;
  out.payload["config_hash"] = ctx.config_hash;
  auto tol = check_tolerance(ctx.params, c.lhs.estimate, c.zscore);
  if (tol.applicable) {
    out.passed = tol.passed;
    out.summary = tol.text;
  } else {
    std::ostringstream os;
    os << "z = " << c.zscore;
    out.summary = os.str();
  }
  return out;
}

const std::map<std::string, TaskSpec>& registry() {
  static const std::map<std::string, TaskSpec> reg = [] {
    std::map<std::string, TaskSpec> r;

    r["simulate"] = {
        "Simulate one stationary window of the model and export the path as JSON and "
        "grid-sampled CSV together with its truncation diagnostics.",
        [](const json& p) { need(p, "T"); },
        [](const TaskContext& ctx) {
          double T = ctx.params.at("T").get<double>();
          auto gen = rng::substream(ctx.seed, 0);
          auto sp = ctx.model.simulate(T, gen);
          TaskOutcome out;
          out.payload["model"] = sp.model;
          out.payload["diagnostics"] = sp.diagnostics;
          out.payload["path"] = json::parse(pathkit::to_json(sp.path));
          out.payload["seed"] = ctx.seed;
          out.payload["config_hash"] = ctx.config_hash;
          double step = ctx.params.value("grid_step", T / 1000.0);
          std::ostringstream csv;
          csv << csv_header(ctx, "");
          pathkit::write_csv(csv, sp.path, step);
          ctx.write_file(".csv", csv.str(), out.files);
          ctx.write_file("_path.json", out.payload["path"].dump(), out.files);
          out.summary = "simulated window of length " + std::to_string(T);
          return out;
        }};

    r["candidate_via_exceedance"] = {
        "Candidate extremal index as the Monte Carlo mean of the inverse exceedance time "
        "of tail-process draws above level one.",
        [](const json& p) { need(p, "n"); },
        [](const TaskContext& ctx) {
          auto rep = tailcore::candidate_via_exceedance(
              ctx.tail(), ctx.params.at("n").get<std::size_t>(), ctx.seed, ctx.workers);
          return estimator_outcome(ctx, rep);
        }};

    r["candidate_via_theta"] = {
        "Candidate extremal index as the mean of (sup Theta)^alpha over the alpha-energy of "
        "the spectral tail process.",
        [](const json& p) { need(p, "n"); },
        [](const TaskContext& ctx) {
          auto rep = tailcore::candidate_via_theta(
              ctx.tail(), ctx.params.at("n").get<std::size_t>(), ctx.seed, ctx.workers);
          return estimator_outcome(ctx, rep);
        }};

    r["candidate_conditional"] = {
        "Shot-noise conditional form of the candidate extremal index: the inverse mean "
        "session length, valid because the tail path given a first exceedance at zero is a "
        "full session.",
        [](const json& p) { need(p, "n"); },
        [](const TaskContext& ctx) {
          if (ctx.model.class_tag() != "shot_noise")
            fail("candidate_conditional: only defined for shot_noise models");
          EtaLaw eta = eta_from_json(ctx.model_json.at("eta"));
          auto rep = tailcore::candidate_conditional_shotnoise(
              [eta](std::mt19937_64& g) { return eta.sample(g); },
              ctx.params.at("n").get<std::size_t>(), ctx.seed, ctx.workers);
          return estimator_outcome(ctx, rep);
        }};

    r["pareto_ks"] = {
        "Kolmogorov-Smirnov test of ||Y(0)|| against the Pareto(alpha) law forced by the "
        "homogeneity of the tail measure.",
        [](const json& p) { need(p, "n"); },
        [](const TaskContext& ctx) {
          double p = tailcore::pareto_ks_pvalue(ctx.tail(), ctx.params.at("n").get<std::size_t>(),
                                                ctx.seed, ctx.workers);
          TaskOutcome out;
          out.payload = {{"pvalue", p},
                         {"n", ctx.params.at("n").get<std::size_t>()},
                         {"seed", ctx.seed},
                         {"config_hash", ctx.config_hash}};
          auto tol = check_tolerance(ctx.params, p, 0.0, p);
          if (tol.applicable) {
            out.passed = tol.passed;
            out.summary = tol.text;
          } else {
            out.summary = "KS p-value " + std::to_string(p);
          }
          return out;
        }};

    r["theta_independence"] = {
        "Correlation z between the Pareto magnitude ||Y(0)|| and a bounded functional of the "
        "angular part Y/||Y(0)||; near zero by the polar factorization.",
        [](const json& p) { need(p, "n"); },
        [](const TaskContext& ctx) {
          auto rep = tailcore::theta_independence_check(
              ctx.tail(), ctx.params.at("n").get<std::size_t>(), ctx.seed, ctx.workers);
          TaskOutcome out;
          out.payload = {{"correlation", rep.correlation},
                         {"zscore", rep.zscore},
                         {"n", rep.n},
                         {"seed", ctx.seed},
                         {"config_hash", ctx.config_hash}};
          auto tol = check_tolerance(ctx.params, rep.correlation, rep.zscore);
          if (tol.applicable) {
            out.passed = tol.passed;
            out.summary = tol.text;
          } else {
            out.summary = "correlation " + std::to_string(rep.correlation);
          }
          return out;
        }};

    r["check_time_change"] = {
        "Two-sided Monte Carlo check of the time change formula: E[H(Y)1{||Y_t||>x}] against "
        "x^{-alpha} E[H(x B^t Y)1{x||Y_{-t}||>1}] on independent streams.",
        [](const json& p) {
          need(p, "n");
          need(p, "t");
          need(p, "x");
        },
        [](const TaskContext& ctx) {
          auto H = functional_from_json(ctx.params.value("functional", json()));
          auto c = tailcore::check_time_change(ctx.tail(), H, ctx.params.at("t").get<double>(),
                                               ctx.params.at("x").get<double>(),
                                               ctx.params.at("n").get<std::size_t>(), ctx.seed,
                                               ctx.workers);
          return zcheck_outcome(ctx, c);
        }};

    r["check_tilt_shift"] = {
        "Two-sided check of the spectral tilt-shift identity E[||Z_t||^alpha H(Z)] = "
        "E[||Z_0||^alpha H(B^t Z)] for bounded 0-homogeneous H.",
        [](const json& p) {
          need(p, "n");
          need(p, "t");
        },
        [](const TaskContext& ctx) {
          auto H = functional_from_json(ctx.params.value("functional", json()));
          auto spec = tailcore::spectral_from_tail(ctx.tail());
          auto c = tailcore::check_tilt_shift(spec, H, ctx.params.at("t").get<double>(),
                                              ctx.params.at("n").get<std::size_t>(), ctx.seed,
                                              ctx.workers);
          return zcheck_outcome(ctx, c);
        }};

    r["check_independence_tilted"] = {
        "Paired check of the tilted-independence identity: E[S(Y)1{Y*>x}/E(Y)] = "
        "x^{-alpha} E[S(Y)/E(Y)] for shift-invariant 0-homogeneous S and x > 1.",
        [](const json& p) {
          need(p, "n");
          need(p, "x");
        },
        [](const TaskContext& ctx) {
          auto S = functional_from_json(ctx.params.value("functional", json()));
          auto c = tailcore::check_independence_tilted(
              ctx.tail(), S, ctx.params.at("x").get<double>(),
              ctx.params.at("n").get<std::size_t>(), ctx.seed, ctx.workers);
          return zcheck_outcome(ctx, c);
        }};

    r["check_forward_identity"] = {
        "Forward identity linking the cluster process and the forward spectral tail process: "
        "theta E[(int ||Q||)^alpha] against alpha E[(int_0^inf ||Theta||)^{alpha-1}].",
        [](const json& p) { need(p, "n"); },
        [](const TaskContext& ctx) {
          double theta = ctx.model.theta_closed_form().value_or(
              ctx.tail().theta_closed_form.value_or(0.0));
          if (!(theta > 0)) fail("check_forward_identity: model has no known theta");
          auto c = tailcore::check_forward_identity(ctx.tail(), theta,
                                                    ctx.params.at("n").get<std::size_t>(),
                                                    ctx.seed, ctx.params.value("signed", false),
                                                    ctx.workers);
          return zcheck_outcome(ctx, c);
        }};

    r["check_q_normalization"] = {
        "Normalization of the cluster process: theta times the mean alpha-integral of Q "
        "equals one.",
        [](const json& p) { need(p, "n"); },
        [](const TaskContext& ctx) {
          double theta = ctx.model.theta_closed_form().value_or(
              ctx.tail().theta_closed_form.value_or(0.0));
          if (!(theta > 0)) fail("check_q_normalization: model has no known theta");
          auto c = tailcore::check_q_normalization(ctx.tail(), theta,
                                                   ctx.params.at("n").get<std::size_t>(), ctx.seed,
                                                   ctx.workers);
          return zcheck_outcome(ctx, c);
        }};

    r["anchor_density"] = {
        "Monte Carlo density of an anchoring time of the tail process (inf-argmax or first "
        "exceedance) computed through the cluster process, with its unit-mass check and the "
        "left limit at zero.",
        [](const json& p) {
          need(p, "n");
          need(p, "grid");
        },
        [](const TaskContext& ctx) {
          auto anchor = ctx.params.value("anchor", std::string("first_exceedance"));
          auto kind = anchor == "infargmax" ? tailcore::AnchorKind::infargmax
                                            : tailcore::AnchorKind::first_exceedance;
          auto table = tailcore::anchor_density(ctx.tail(), kind,
                                                grid_from_json(ctx.params.at("grid")),
                                                ctx.params.at("n").get<std::size_t>(), ctx.seed,
                                                ctx.workers);
          TaskOutcome out;
          out.payload = {{"t", json::array()},
                         {"density", table.density},
                         {"std_error", table.std_error},
                         {"trapezoid_mass", table.trapezoid_mass},
                         {"density_at_zero_minus", table.density_at_zero_minus},
                         {"continuity_probability", table.continuity_probability},
                         {"theta_used", table.theta_used},
                         {"seed", ctx.seed},
                         {"config_hash", ctx.config_hash}};
          for (double t : table.t) out.payload["t"].push_back(time_json(t));
          std::ostringstream csv;
          csv << csv_header(ctx, "t,f_hat,se");
          for (std::size_t i = 0; i < table.t.size(); ++i) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", table.t[i], table.density[i],
                          table.std_error[i]);
            csv << buf;
          }
          ctx.write_file(".csv", csv.str(), out.files);
          double mass_tol = ctx.params.value("mass_tol", 0.02);
          bool mass_ok = std::abs(table.trapezoid_mass - 1.0) <= mass_tol;
          out.passed = mass_ok;
          std::ostringstream os;
          os << "trapezoid mass " << table.trapezoid_mass << ", f(0-) "
             << table.density_at_zero_minus;
          out.summary = os.str();
          return out;
        }};

    r["block_estimator"] = {
        "Empirical cluster measure functional over disjoint blocks, normalized by the "
        "marginal tail (scale mode) or the empirical exceedance fraction at a threshold "
        "(threshold mode), with a block-bootstrap standard error.",
        [](const json& p) {
          need(p, "T");
          need(p, "r_T");
          need(p, "functional");
          double T = p.at("T").get<double>();
          double rT = p.at("r_T").get<double>();
          if (rT > T) fail("block_estimator: r_T exceeds T");
        },
        [](const TaskContext& ctx) {
          double T = ctx.params.at("T").get<double>();
          double rT = ctx.params.at("r_T").get<double>();
          auto K = cluster_functional_from_json(ctx.params.at("functional"));
          auto gen = rng::substream(rng::derive(ctx.seed, "block-path"), 0);
          auto sp = ctx.model.simulate(T, gen);
          std::string mode = ctx.params.value("mode", std::string("threshold"));
          double scale, marginal;
          if (mode == "threshold") {
            double target = ctx.params.value("mean_exceedances", 100.0);
            scale = pathkit::occupation_quantile(sp.path, 1.0 - target / T, 0.0, T,
                                                 pathkit::NormChoice::sup_abs);
            marginal = clusterlab::empirical_exceedance_fraction(sp.path, scale);
            if (!(marginal > 0)) fail("block_estimator: empty threshold exceedance set");
          } else if (mode == "scale") {
            scale = ctx.model.scale_for(T);
            marginal = 1.0 / T;
          } else {
            fail("block_estimator: mode must be threshold or scale");
          }
          auto blocks = clusterlab::extract_blocks(sp.path, rT, scale);
          blocks.u_T = mode == "threshold" ? std::optional<double>(scale) : std::nullopt;
          auto rep = clusterlab::empirical_cluster_measure(blocks, K, marginal, ctx.seed);
          auto out = estimator_outcome(ctx, rep);
          out.payload["mode"] = mode;
          out.payload["scale"] = scale;
          out.payload["marginal_tail"] = marginal;
          out.payload["blocks"] = blocks.blocks.size();
          out.payload["discarded_fraction"] = blocks.discarded_fraction;
          return out;
        }};

    r["gamma_variance"] = {
        "Variance functional of the extreme-value-index block estimator: gamma times the "
        "mean exact integral of (||Y_t|| and 1)^alpha over tail-process draws.",
        [](const json& p) { need(p, "n"); },
        [](const TaskContext& ctx) {
          auto rep = clusterlab::gamma_variance_functional(
              ctx.tail(), ctx.params.at("n").get<std::size_t>(), ctx.seed, ctx.workers);
          return estimator_outcome(ctx, rep);
        }};

    r["anticlustering"] = {
        "Conditional probability of a second extreme at separation t within a block, given "
        "an exceedance at the origin; the vanishing-in-t curve behind the anticlustering "
        "hypothesis.",
        [](const json& p) {
          need(p, "r_T");
          need(p, "x");
          need(p, "grid");
          need(p, "n_events");
        },
        [](const TaskContext& ctx) {
          double aT = ctx.params.contains("a_T")
                          ? ctx.params.at("a_T").get<double>()
                          : ctx.model.scale_for(ctx.params.value("T_ref", 100.0));
          auto table = clusterlab::anticlustering_diagnostic(
              ctx.model, aT, ctx.params.at("r_T").get<double>(),
              grid_from_json(ctx.params.at("grid")), ctx.params.at("x").get<double>(),
              ctx.params.at("n_events").get<std::size_t>(), ctx.seed, 0, ctx.workers);
          TaskOutcome out;
          out.payload = curve_json(table);
          out.payload["seed"] = ctx.seed;
          out.payload["config_hash"] = ctx.config_hash;
          ctx.write_file(".csv", curve_csv(ctx, table, "t"), out.files);
          out.summary = "anticlustering curve over " + std::to_string(table.x.size()) + " points";
          return out;
        }};

    r["conditional_tail"] = {
        "Rejection-conditioned path ensembles above ascending levels compared with the "
        "analytic tail law on a panel of bounded functionals.",
        [](const json& p) {
          need(p, "x_levels");
          need(p, "half_window");
          need(p, "n_events");
        },
        [](const TaskContext& ctx) {
          auto reports = clusterlab::conditional_tail_paths(
              ctx.model, ctx.params.at("x_levels").get<std::vector<double>>(),
              ctx.params.at("half_window").get<double>(),
              ctx.params.at("n_events").get<std::size_t>(), ctx.seed, ctx.workers);
          TaskOutcome out;
          out.payload = json::array();
          double worst = 0.0;
          for (const auto& rep : reports) {
            json jr = {{"x", rep.x_level},
                       {"accepted", rep.accepted},
                       {"acceptance_rate", rep.acceptance_rate},
                       {"max_abs_z", rep.max_abs_z},
                       {"pareto_ks_pvalue", rep.pareto_ks_pvalue},
                       {"panel", json::array()}};
            for (const auto& cmp : rep.panel)
              jr["panel"].push_back({{"name", cmp.name},
                                     {"ensemble", cmp.ensemble_mean},
                                     {"law", cmp.law_mean},
                                     {"z", cmp.zscore}});
            worst = std::max(worst, rep.max_abs_z);
            out.payload.push_back(std::move(jr));
          }
          out.payload = {{"levels", out.payload},
                         {"seed", ctx.seed},
                         {"config_hash", ctx.config_hash}};
          auto tol = check_tolerance(ctx.params, worst, worst);
          if (tol.applicable) {
            out.passed = tol.passed;
            out.summary = tol.text;
          } else {
            out.summary = "max |z| across levels " + std::to_string(worst);
          }
          return out;
        }};

    r["cluster_count_poisson"] = {
        "Chi-square fit of per-window block exceedance counts against the Poisson limit of "
        "the point process of clusters, plus uniformity of the scaled cluster positions.",
        [](const json& p) {
          need(p, "T");
          need(p, "r_T");
          need(p, "x");
          need(p, "n_windows");
          if (p.at("r_T").get<double>() > p.at("T").get<double>())
            fail("cluster_count_poisson: r_T exceeds T");
        },
        [](const TaskContext& ctx) {
          double theta = ctx.model.theta_closed_form().value_or(0.0);
          if (!(theta > 0)) fail("cluster_count_poisson: model has no known theta");
          auto rep = clusterlab::cluster_count_poisson_test(
              ctx.model, theta, ctx.params.at("r_T").get<double>(),
              ctx.params.at("x").get<double>(), ctx.params.at("T").get<double>(),
              ctx.params.at("n_windows").get<std::size_t>(), ctx.seed, ctx.workers);
          TaskOutcome out;
          out.payload = {{"observed", rep.observed},
                         {"expected", rep.expected},
                         {"mean_expected", rep.mean_expected},
                         {"sample_mean", rep.sample_mean},
                         {"chi2", rep.chi2.statistic},
                         {"dof", rep.chi2.dof},
                         {"pvalue", rep.chi2.pvalue},
                         {"times_uniform_ks_pvalue", rep.times_uniform_ks_pvalue},
                         {"adjacent_count_corr_z", rep.adjacent_count_corr_z},
                         {"seed", ctx.seed},
                         {"config_hash", ctx.config_hash}};
          auto tol = check_tolerance(ctx.params, rep.chi2.pvalue, 0.0, rep.chi2.pvalue);
          if (tol.applicable) {
            out.passed = tol.passed;
            out.summary = tol.text;
          } else {
            out.summary = "chi-square p " + std::to_string(rep.chi2.pvalue);
          }
          return out;
        }};

    r["running_max"] = {
        "Empirical law of the scaled window maximum against exp(-theta x^{-alpha}); for the "
        "moving-maxima class the exact finite-window mass is used, making the comparison an "
        "identity rather than a limit.",
        [](const json& p) {
          need(p, "T");
          need(p, "n_windows");
          need(p, "grid");
        },
        [](const TaskContext& ctx) {
          double theta = ctx.model.theta_closed_form().value_or(0.0);
          if (!(theta > 0)) fail("running_max: model has no known theta");
          double mass_factor = 1.0;
          double T = ctx.params.at("T").get<double>();
          if (ctx.params.value("exact_prelimit", false)) {
            if (ctx.model.class_tag() != "max_stable_m3")
              fail("running_max: exact_prelimit is only available for max_stable_m3");
            EtaLaw sessions = eta_from_json(ctx.model_json.at("sessions"));
            mass_factor = (T + sessions.mean()) / T;
          }
          auto rep = clusterlab::running_max_law(ctx.model, theta, T,
                                                 grid_from_json(ctx.params.at("grid")),
                                                 ctx.params.at("n_windows").get<std::size_t>(),
                                                 ctx.seed, ctx.workers, mass_factor);
          TaskOutcome out;
          out.payload = curve_json(rep.table);
          out.payload["sup_discrepancy"] = rep.sup_discrepancy;
          out.payload["theta_hat"] = rep.theta_hat;
          out.payload["theta_hat_se"] = rep.theta_hat_se;
          out.payload["seed"] = ctx.seed;
          out.payload["config_hash"] = ctx.config_hash;
          ctx.write_file(".csv", curve_csv(ctx, rep.table, "x"), out.files);
          auto tol = check_tolerance(ctx.params, rep.sup_discrepancy);
          if (tol.applicable) {
            out.passed = tol.passed;
            out.summary = tol.text;
          } else {
            out.summary = "sup discrepancy " + std::to_string(rep.sup_discrepancy);
          }
          return out;
        }};

    r["tightness"] = {
        "Skorohod-modulus tightness curve: P(w'(X,a,b,delta) > x eps) / P(||X_0|| > x) per "
        "delta, decreasing toward zero for jump-clean models.",
        [](const json& p) {
          need(p, "a");
          need(p, "b");
          need(p, "x");
          need(p, "grid");
          need(p, "n");
        },
        [](const TaskContext& ctx) {
          auto table = clusterlab::tightness_diagnostic(
              ctx.model, ctx.params.at("a").get<double>(), ctx.params.at("b").get<double>(),
              grid_from_json(ctx.params.at("grid")), ctx.params.at("x").get<double>(),
              ctx.params.value("eps", 0.5), ctx.params.at("n").get<std::size_t>(), ctx.seed,
              ctx.workers);
          TaskOutcome out;
          out.payload = curve_json(table);
          out.payload["seed"] = ctx.seed;
          out.payload["config_hash"] = ctx.config_hash;
          ctx.write_file(".csv", curve_csv(ctx, table, "delta"), out.files);
          out.summary = "tightness ratio over " + std::to_string(table.x.size()) + " deltas";
          return out;
        }};

    r["m_coupling"] = {
        "Coupled (X, X^(m)) simulations on shared randomness: frequency of a visible "
        "truncation gap per m, decreasing as the kernel truncation widens.",
        [](const json& p) {
          need(p, "T");
          need(p, "m_values");
          need(p, "n");
        },
        [](const TaskContext& ctx) {
          double T = ctx.params.at("T").get<double>();
          auto ms = ctx.params.at("m_values").get<std::vector<double>>();
          std::size_t n = ctx.params.at("n").get<std::size_t>();
          double gap = ctx.params.value("gap_level", 1.0);
          TaskOutcome out;
          out.payload["m"] = ms;
          json freqs = json::array();
          for (std::size_t k = 0; k < ms.size(); ++k) {
            auto hits = rng::replicate_doubles(
                n, rng::derive(ctx.seed, "m-coupling-" + std::to_string(k)), ctx.workers,
                [&](std::size_t, std::mt19937_64& gen) {
                  auto pair = ctx.model.simulate_m_coupled(ms[k], T, gen);
                  // sup difference between the coupled paths over the window
                  double worst = 0.0;
                  const Path& a = pair.full.path;
                  const Path& b = pair.truncated.path;
                  for (std::size_t i = 0; i < a.piece_count(); ++i) {
                    double t = a.piece_start(i);
                    worst = std::max(worst,
                                     std::abs(a.scalar_value(t) - b.scalar_value(t)));
                  }
                  for (std::size_t i = 0; i < b.piece_count(); ++i) {
                    double t = b.piece_start(i);
                    worst = std::max(worst,
                                     std::abs(a.scalar_value(t) - b.scalar_value(t)));
                  }
                  return worst > gap ? 1.0 : 0.0;
                });
            double f = 0.0;
            for (double h : hits) f += h;
            freqs.push_back(f / static_cast<double>(n));
          }
          out.payload["gap_frequency"] = freqs;
          out.payload["seed"] = ctx.seed;
          out.payload["config_hash"] = ctx.config_hash;
          out.summary = "coupling gap frequencies computed for " + std::to_string(ms.size()) +
                        " truncation levels";
          return out;
        }};

    return r;
  }();
  return reg;
}

}  // namespace

std::vector<std::string> list_model_classes() { return procsim::model_class_tags(); }

std::vector<std::string> list_tasks() {
  std::vector<std::string> out;
  for (const auto& [name, spec] : registry()) out.push_back(name);
  return out;
}

std::string describe_task(const std::string& task) {
  auto it = registry().find(task);
  if (it == registry().end()) throw std::invalid_argument("unknown task: " + task);
  return it->second.description;
}

RunManifest run_config(const std::string& config_json, const RunOptions& opts) {
  json cfg = json::parse(config_json);
  if (opts.seed_override) cfg["seed"] = *opts.seed_override;
  if (!cfg.contains("seed")) fail("config: seed is required (no entropy-seeded runs)");
  if (!cfg.contains("model")) fail("config: model is required");
  if (!cfg.contains("tasks") || !cfg.at("tasks").is_array() || cfg.at("tasks").empty())
    fail("config: a non-empty tasks array is required");

  std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  std::string canonical = cfg.dump();
  std::string config_hash = hash_hex(canonical);

  // full validation pass before any simulation
  auto model = model_from_json(cfg.at("model"), rng::derive(seed, "model"));
  std::vector<std::pair<std::string, json>> tasks;
  for (const auto& tj : cfg.at("tasks")) {
    std::string tag = tj.at("task").get<std::string>();
    auto it = registry().find(tag);
    if (it == registry().end()) fail("unknown task tag: " + tag);
    it->second.validate(tj);
    tasks.emplace_back(tag, tj);
  }

  RunManifest manifest;
  manifest.config_hash = config_hash;
  manifest.toolkit_version = version;
  manifest.started_at = iso_now();

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& [tag, params] = tasks[i];
    TaskContext ctx{*model,
                    cfg.at("model"),
                    params,
                    rng::derive(seed, tag + "#" + std::to_string(i)),
                    opts.workers,
                    opts.out_dir,
                    "task_" + std::to_string(i) + "_" + tag,
                    config_hash,
                    std::nullopt};
    TaskOutcome outcome = registry().at(tag).run(ctx);
    TaskResult result;
    result.task = tag;
    result.passed = outcome.passed;
    result.summary = outcome.summary;
    result.payload = outcome.payload.dump();
    result.files = outcome.files;
    if (!opts.out_dir.empty()) {
      std::filesystem::create_directories(opts.out_dir);
      std::ofstream os(std::filesystem::path(opts.out_dir) / (ctx.file_stem + ".json"),
                       std::ios::binary);
      os << result.payload;
      result.files.push_back(ctx.file_stem + ".json");
    }
    if (outcome.passed && !*outcome.passed) manifest.all_passed = false;
    if (opts.ci)
      std::cout << (outcome.passed ? (*outcome.passed ? "[PASS] " : "[FAIL] ") : "[DONE] ") << tag
                << ": " << result.summary << "\n";
    manifest.tasks.push_back(std::move(result));
  }
  manifest.finished_at = iso_now();

  if (!opts.out_dir.empty()) {
    std::ofstream os(std::filesystem::path(opts.out_dir) / "manifest.json", std::ios::binary);
    os << manifest_to_json(manifest);
  }
  return manifest;
}

RunManifest run_config_file(const std::string& path, const RunOptions& opts) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return run_config(buf.str(), opts);
}

std::string manifest_to_json(const RunManifest& manifest) {
  json j;
  j["config_hash"] = manifest.config_hash;
  j["toolkit_version"] = manifest.toolkit_version;
  j["started_at"] = manifest.started_at;
  j["finished_at"] = manifest.finished_at;
  j["all_passed"] = manifest.all_passed;
  j["tasks"] = json::array();
  for (const auto& t : manifest.tasks) {
    json tj;
    tj["task"] = t.task;
    if (t.passed) tj["passed"] = *t.passed;
    tj["summary"] = t.summary;
    tj["files"] = t.files;
    tj["payload"] = json::parse(t.payload);
    j["tasks"].push_back(std::move(tj));
  }
  return j.dump(2);
}

}  // namespace tailsim::runner
