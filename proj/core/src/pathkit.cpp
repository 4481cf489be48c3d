#include "tailsim/pathkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace tailsim::pathkit {

using json = nlohmann::json;

double vector_norm(View v, NormChoice norm) {
  switch (norm) {
    case NormChoice::sup_abs:
      return std::abs(v.front());
    case NormChoice::euclidean: {
      if (v.size() == 1) return std::abs(v.front());
      double s = 0.0;
      for (double x : v) s += x * x;
      return std::sqrt(s);
    }
    case NormChoice::max_coordinate: {
      double m = 0.0;
      for (double x : v) m = std::max(m, std::abs(x));
      return m;
    }
  }
  return 0.0;
}

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

PiecewiseConstantPath::PiecewiseConstantPath(int dim, double window_start, double window_end,
                                             std::vector<double> breakpoints,
                                             std::vector<Vec> values, Vec outside_value)
    : dim_(dim),
      start_(window_start),
      end_(window_end),
      breakpoints_(std::move(breakpoints)),
      outside_(std::move(outside_value)) {
  require(dim_ >= 1, "path: dim must be >= 1");
  values_.reserve(values.size() * static_cast<std::size_t>(dim_));
  for (const Vec& v : values) {
    require(v.size() == static_cast<std::size_t>(dim_), "path: value has wrong dim");
    values_.insert(values_.end(), v.begin(), v.end());
  }
  validate_and_normalize();
}

PiecewiseConstantPath PiecewiseConstantPath::scalar_steps(double window_start, double window_end,
                                                          std::vector<double> breakpoints,
                                                          std::vector<double> values) {
  PiecewiseConstantPath p;
  p.dim_ = 1;
  p.start_ = window_start;
  p.end_ = window_end;
  p.breakpoints_ = std::move(breakpoints);
  p.values_ = std::move(values);
  p.outside_ = {0.0};
  p.validate_and_normalize();
  return p;
}

void PiecewiseConstantPath::validate_and_normalize() {
  const std::size_t d = static_cast<std::size_t>(dim_);
  require(dim_ >= 1, "path: dim must be >= 1");
  require(std::isfinite(start_) && std::isfinite(end_), "path: window must be finite");
  require(start_ < end_, "path: window_start must be < window_end");
  require(!breakpoints_.empty(), "path: at least one breakpoint required");
  require(breakpoints_.size() * d == values_.size(), "path: values.size() != breakpoints.size()");
  require(breakpoints_.front() == start_, "path: first breakpoint must equal window_start");
  require(all_finite(breakpoints_), "path: breakpoints must be finite");
  for (std::size_t i = 1; i < breakpoints_.size(); ++i)
    require(breakpoints_[i - 1] < breakpoints_[i], "path: breakpoints must be strictly increasing");
  require(breakpoints_.back() < end_, "path: breakpoints must lie in [window_start, window_end)");
  require(outside_.size() == d, "path: outside value has wrong dim");
  require(all_finite(outside_), "path: outside value must be finite");
  require(all_finite(values_), "path: values must be finite");

  // canonical form: merge adjacent intervals with identical values
  std::size_t w = 0;
  auto equal_pieces = [&](std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < d; ++k)
      if (values_[i * d + k] != values_[j * d + k]) return false;
    return true;
  };
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (w > 0 && equal_pieces(i, w - 1)) continue;
    if (w != i) {
      breakpoints_[w] = breakpoints_[i];
      for (std::size_t k = 0; k < d; ++k) values_[w * d + k] = values_[i * d + k];
    }
    ++w;
  }
  breakpoints_.resize(w);
  values_.resize(w * d);
}

PiecewiseConstantPath PiecewiseConstantPath::indicator(double a, double b, double value) {
  return PiecewiseConstantPath(1, a, b, {a}, {{value}}, {0.0});
}

PiecewiseConstantPath PiecewiseConstantPath::constant(double window_start, double window_end,
                                                      double value) {
  return PiecewiseConstantPath(1, window_start, window_end, {window_start}, {{value}}, {0.0});
}

PiecewiseConstantPath PiecewiseConstantPath::zero(double window_start, double window_end, int dim) {
  std::vector<double> z(static_cast<std::size_t>(dim), 0.0);
  return PiecewiseConstantPath(dim, window_start, window_end, {window_start}, {z}, z);
}

PiecewiseConstantPath PiecewiseConstantPath::from_samples(double start, double step,
                                                          const std::vector<double>& samples) {
  require(step > 0 && !samples.empty(), "from_samples: need step > 0 and samples");
  std::vector<double> bps(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k)
    bps[k] = start + static_cast<double>(k) * step;
  double end = start + static_cast<double>(samples.size()) * step;
  return PiecewiseConstantPath::scalar_steps(start, end, std::move(bps), samples);
}

View PiecewiseConstantPath::value(double t) const {
  if (t < window_start() || t >= window_end()) return View(outside_);
  // largest i with piece_start(i) <= t
  std::size_t lo = 0, hi = breakpoints_.size();
  while (hi - lo > 1) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (breakpoints_[mid] + offset_ <= t)
      lo = mid;
    else
      hi = mid;
  }
  return piece_value(lo);
}

bool PiecewiseConstantPath::is_zero() const {
  auto zero = [](double x) { return x == 0.0; };
  return std::all_of(outside_.begin(), outside_.end(), zero) &&
         std::all_of(values_.begin(), values_.end(), zero);
}

PiecewiseConstantPath PiecewiseConstantPath::shifted(double t) const {
  PiecewiseConstantPath out = *this;
  out.offset_ = offset_ + t;
  require(std::isfinite(out.offset_), "shift: offset must be finite");
  return out;
}

PiecewiseConstantPath PiecewiseConstantPath::scaled(double c) const {
  PiecewiseConstantPath out = *this;
  for (double& x : out.values_) x *= c;
  for (double& x : out.outside_) x *= c;
  out.validate_and_normalize();
  return out;
}

PiecewiseConstantPath PiecewiseConstantPath::divided(double d) const {
  if (d == 0.0 || !std::isfinite(d)) throw std::invalid_argument("divided: bad divisor");
  PiecewiseConstantPath out = *this;
  for (double& x : out.values_) x /= d;
  for (double& x : out.outside_) x /= d;
  out.validate_and_normalize();
  return out;
}

bool PiecewiseConstantPath::operator==(const PiecewiseConstantPath& other) const {
  if (dim_ != other.dim_ || outside_ != other.outside_) return false;
  if (values_ != other.values_) return false;
  if (window_start() != other.window_start() || window_end() != other.window_end()) return false;
  for (std::size_t i = 0; i < breakpoints_.size(); ++i)
    if (piece_start(i) != other.piece_start(i)) return false;
  return true;
}

PiecewiseConstantPath shift(const Path& path, double t) { return path.shifted(t); }

namespace {

// Walk the distinct constant segments of `path` covering [a, b): cut points
// are the window edges and breakpoints falling inside (a, b).
struct Segment {
  double start, end;  // [start, end)
  View value;
};

std::vector<Segment> segments_over(const Path& p, double a, double b) {
  std::vector<double> cuts;
  cuts.push_back(a);
  auto maybe = [&](double t) {
    if (t > a && t < b) cuts.push_back(t);
  };
  maybe(p.window_start());
  // binary search the first breakpoint beyond a, walk until b
  std::size_t lo = 1, hi = p.piece_count();
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (p.piece_start(mid) <= a)
      lo = mid + 1;
    else
      hi = mid;
  }
  for (std::size_t i = lo; i < p.piece_count() && p.piece_start(i) < b; ++i)
    maybe(p.piece_start(i));
  maybe(p.window_end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.push_back(b);
  std::vector<Segment> segs;
  segs.reserve(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    segs.push_back({cuts[i], cuts[i + 1], p.value(cuts[i])});
  return segs;
}

}  // namespace

double sup_norm(const Path& path, double a, double b, NormChoice norm) {
  if (a > b) throw std::invalid_argument("sup_norm: need a <= b");
  if (a == b) return vector_norm(path.value(a), norm);
  double m = 0.0;
  for (const Segment& s : segments_over(path, a, b)) m = std::max(m, vector_norm(s.value, norm));
  // the closed right endpoint
  m = std::max(m, vector_norm(path.value(b), norm));
  return m;
}

double sup_norm(const Path& path, NormChoice norm) {
  double m = vector_norm(path.outside_value(), norm);
  for (std::size_t i = 0; i < path.piece_count(); ++i)
    m = std::max(m, vector_norm(path.piece_value(i), norm));
  return m;
}

double inf_norm(const Path& path, double a, double b, NormChoice norm) {
  if (a > b) throw std::invalid_argument("inf_norm: need a <= b");
  if (a == b) return vector_norm(path.value(a), norm);
  double m = vector_norm(path.value(b), norm);
  for (const Segment& s : segments_over(path, a, b)) m = std::min(m, vector_norm(s.value, norm));
  return m;
}

double exceedance(const Path& path, double level, NormChoice norm) {
  if (!(level > 0)) throw std::invalid_argument("exceedance: level must be > 0");
  if (vector_norm(path.outside_value(), norm) > level) return time_infinity;
  double total = 0.0;
  for (std::size_t i = 0; i < path.piece_count(); ++i)
    if (vector_norm(path.piece_value(i), norm) > level) total += path.piece_length(i);
  return total;
}

double lp_power_norm(const Path& path, double p, NormChoice norm) {
  if (!(p > 0)) throw std::invalid_argument("lp_power_norm: p must be > 0");
  if (vector_norm(path.outside_value(), norm) != 0.0)
    throw std::domain_error("lp_power_norm: nonzero outside value, integral diverges");
  double total = 0.0;
  for (std::size_t i = 0; i < path.piece_count(); ++i) {
    double nv = vector_norm(path.piece_value(i), norm);
    if (nv != 0.0) total += std::pow(nv, p) * path.piece_length(i);
  }
  return total;
}

double integral(const Path& path) {
  if (path.dim() != 1) throw std::invalid_argument("integral: scalar paths only");
  if (path.outside_value().front() != 0.0)
    throw std::domain_error("integral: nonzero outside value, integral diverges");
  double total = 0.0;
  for (std::size_t i = 0; i < path.piece_count(); ++i)
    total += path.piece_value(i).front() * path.piece_length(i);
  return total;
}

PiecewiseConstantPath restrict(const Path& path, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("restrict: need a < b");
  auto segs = segments_over(path, a, b);
  std::vector<double> bps;
  std::vector<PiecewiseConstantPath::Vec> vals;
  bps.reserve(segs.size());
  vals.reserve(segs.size());
  for (const Segment& s : segs) {
    bps.push_back(s.start);
    vals.emplace_back(s.value.begin(), s.value.end());
  }
  std::vector<double> zero(static_cast<std::size_t>(path.dim()), 0.0);
  return PiecewiseConstantPath(path.dim(), a, b, std::move(bps), std::move(vals),
                               std::move(zero));
}

double infargmax(const Path& path, NormChoice norm) {
  if (vector_norm(path.outside_value(), norm) != 0.0)
    throw std::invalid_argument("infargmax: requires zero outside value");
  double best = 0.0;
  for (std::size_t i = 0; i < path.piece_count(); ++i)
    best = std::max(best, vector_norm(path.piece_value(i), norm));
  if (best == 0.0) return time_infinity;
  for (std::size_t i = 0; i < path.piece_count(); ++i)
    if (vector_norm(path.piece_value(i), norm) == best) return path.piece_start(i);
  return time_infinity;  // unreachable
}

double first_exceedance(const Path& path, NormChoice norm, double level) {
  if (!(level > 0)) throw std::invalid_argument("first_exceedance: level must be > 0");
  if (vector_norm(path.outside_value(), norm) > level) return -time_infinity;
  for (std::size_t i = 0; i < path.piece_count(); ++i)
    if (vector_norm(path.piece_value(i), norm) > level) return path.piece_start(i);
  return time_infinity;
}

namespace {

// distinct piece values over [a, b] with their jump times; closed at b
struct PieceRun {
  std::vector<View> values;   // m+1 values
  std::vector<double> jumps;  // m jump times in (a, b]
  std::vector<double> left;   // left endpoint of each piece run
  std::vector<double> right;  // right endpoint (piece i ends here)
};

// include_right: the closed endpoint b counts as a one-point piece (used
// by w'', whose triples may sit at b; the w' partition cells are half-open
// and never see it)
PieceRun piece_run(const Path& p, double a, double b, bool include_right) {
  auto segs = segments_over(p, a, b);
  PieceRun r;
  auto views_equal = [](View x, View y) {
    return std::equal(x.begin(), x.end(), y.begin(), y.end());
  };
  for (const Segment& s : segs) {
    if (!r.values.empty() && views_equal(r.values.back(), s.value)) {
      r.right.back() = s.end;
      continue;
    }
    if (!r.values.empty()) r.jumps.push_back(s.start);
    r.values.push_back(s.value);
    r.left.push_back(s.start);
    r.right.push_back(s.end);
  }
  if (include_right) {
    View vb = p.value(b);
    if (!r.values.empty() && !views_equal(r.values.back(), vb)) {
      r.jumps.push_back(b);
      r.values.push_back(vb);
      r.left.push_back(b);
      r.right.push_back(b);
    }
  }
  return r;
}

struct EarliestPos {
  double value;
  bool strict;  // true: separator must be placed strictly after `value`
};

}  // namespace

double modulus_w_prime(const Path& path, double a, double b, double delta, NormChoice norm) {
  if (!(delta > 0) || !(delta < b - a))
    throw std::invalid_argument("modulus_w_prime: need 0 < delta < b - a");
  PieceRun run = piece_run(path, a, b, /*include_right=*/false);
  const std::size_t m = run.jumps.size();
  if (m == 0) return 0.0;

  auto dist = [&](std::size_t i, std::size_t j) {
    View u = run.values[i];
    View v = run.values[j];
    std::vector<double> d(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) d[k] = u[k] - v[k];
    return vector_norm(d, norm);
  };

  // Dynamic program over partition cells [t_{i-1}, t_i). A cell whose left
  // boundary sits inside piece P and whose separator lies inside piece E
  // covers the piece values P..E (piece E is shared with the next cell); a
  // separator placed exactly at a jump consumes it, and the next cell
  // starts at the following piece. The earliest feasible boundary
  // position is tracked as a (value, strict) pair so the gap constraint
  // delta is handled greedily and exactly.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::map<std::pair<std::size_t, std::pair<double, bool>>, double> memo;

  std::function<double(std::size_t, EarliestPos)> solve = [&](std::size_t P,
                                                              EarliestPos e) -> double {
    // P: index of the first piece of the current cell (pieces 0..m)
    auto key = std::make_pair(P, std::make_pair(e.value, e.strict));
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    memo[key] = kInf;  // cycle guard while recursing

    double best = kInf;
    double diam = 0.0;
    for (std::size_t E = P; E <= m; ++E) {
      for (std::size_t i = P; i < E; ++i) diam = std::max(diam, dist(i, E));
      if (diam >= best) break;
      if (E == m) {
        // final cell runs to b; only the gap to the previous point binds
        bool ok = e.strict ? (b - e.value > delta) : (b - e.value >= delta);
        if (ok) best = std::min(best, diam);
        break;
      }
      double next_jump = run.jumps[E];  // s_{E+1} in jump terms
      // separator strictly inside piece E: next cell starts at piece E
      {
        EarliestPos sep{e.value + delta, e.strict};
        if (E > 0) {
          double left_jump = run.jumps[E - 1];
          if (left_jump > sep.value || (left_jump == sep.value && !sep.strict))
            sep = {left_jump, true};
        }
        if (sep.value < next_jump) {
          double rest = solve(E, sep);
          best = std::min(best, std::max(diam, rest));
        }
      }
      // separator exactly at the next jump: the jump is consumed and the
      // next cell starts at piece E+1
      {
        double gap = next_jump - e.value;
        bool ok = e.strict ? (gap > delta) : (gap >= delta);
        if (ok) {
          double rest = solve(E + 1, {next_jump, false});
          best = std::min(best, std::max(diam, rest));
        }
      }
    }
    memo[key] = best;
    return best;
  };

  double result = solve(0, {a, false});
  return std::isfinite(result) ? result : 0.0;
}

double modulus_w_second(const Path& path, double a, double b, double delta, NormChoice norm) {
  if (!(delta > 0) || !(delta < b - a))
    throw std::invalid_argument("modulus_w_second: need 0 < delta < b - a");
  PieceRun run = piece_run(path, a, b, /*include_right=*/true);
  const std::size_t n = run.values.size();
  if (n < 3) return 0.0;
  auto dist = [&](std::size_t i, std::size_t j) {
    View u = run.values[i];
    View v = run.values[j];
    std::vector<double> d(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) d[k] = u[k] - v[k];
    return vector_norm(d, norm);
  };
  double best = 0.0;
  for (std::size_t i = 0; i + 2 < n; ++i) {
    // s ranges over piece i: sup of attainable s is right[i] (not attained
    // unless it equals b), u starts at left[k]
    for (std::size_t k = i + 2; k < n; ++k) {
      double s_sup = run.right[i];
      bool s_sup_attained = (s_sup == b);
      double gap = run.left[k] - s_sup;
      bool feasible = s_sup_attained ? (gap <= delta) : (gap < delta);
      if (!feasible) continue;
      for (std::size_t j = i + 1; j < k; ++j)
        best = std::max(best, std::min(dist(i, j), dist(j, k)));
    }
  }
  return best;
}

PiecewiseConstantPath pointwise_max(const Path& a, const Path& b) {
  if (a.dim() != 1 || b.dim() != 1)
    throw std::invalid_argument("pointwise_max: scalar paths only");
  double lo = std::min(a.window_start(), b.window_start());
  double hi = std::max(a.window_end(), b.window_end());
  std::vector<double> cuts{lo};
  auto add = [&](double t) {
    if (t > lo && t < hi) cuts.push_back(t);
  };
  for (const Path* p : {&a, &b}) {
    add(p->window_start());
    for (std::size_t i = 1; i < p->piece_count(); ++i) add(p->piece_start(i));
    add(p->window_end());
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> vals;
  vals.reserve(cuts.size());
  for (double c : cuts) vals.push_back(std::max(a.scalar_value(c), b.scalar_value(c)));
  double out = std::max(a.outside_value().front(), b.outside_value().front());
  if (out != 0.0)
    return PiecewiseConstantPath(
        1, lo, hi, std::move(cuts),
        [&] {
          std::vector<PiecewiseConstantPath::Vec> vv;
          for (double v : vals) vv.push_back({v});
          return vv;
        }(),
        {out});
  return PiecewiseConstantPath::scalar_steps(lo, hi, std::move(cuts), std::move(vals));
}

PiecewiseConstantPath sum_step_atoms(const std::vector<Path>& atoms, double t0, double t1) {
  if (!(t0 < t1)) throw std::invalid_argument("sum_step_atoms: need t0 < t1");
  std::vector<double> cuts{t0};
  for (const Path& p : atoms) {
    if (p.dim() != 1 || p.outside_value().front() != 0.0)
      throw std::invalid_argument("sum_step_atoms: atoms must be scalar with zero outside value");
    auto add = [&](double t) {
      if (t > t0 && t < t1) cuts.push_back(t);
    };
    add(p.window_start());
    for (std::size_t i = 1; i < p.piece_count(); ++i) add(p.piece_start(i));
    add(p.window_end());
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // sweep with an index-ordered active list so sums are reproducible
  struct Event {
    double t;
    std::size_t atom;
    bool enter;
  };
  std::vector<Event> events;
  std::vector<std::size_t> active;  // sorted by atom index
  auto activate = [&active](std::size_t i) {
    active.insert(std::lower_bound(active.begin(), active.end(), i), i);
  };
  auto deactivate = [&active](std::size_t i) {
    active.erase(std::lower_bound(active.begin(), active.end(), i));
  };
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    double s = atoms[i].window_start(), e = atoms[i].window_end();
    if (e <= t0 || s >= t1) continue;
    if (s <= t0)
      activate(i);
    else
      events.push_back({s, i, true});
    if (e < t1) events.push_back({e, i, false});
  }
  std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) {
    return x.t < y.t || (x.t == y.t && x.atom < y.atom);
  });

  std::vector<double> vals;
  vals.reserve(cuts.size());
  std::size_t ev = 0;
  for (double c : cuts) {
    while (ev < events.size() && events[ev].t <= c) {
      if (events[ev].enter)
        activate(events[ev].atom);
      else
        deactivate(events[ev].atom);
      ++ev;
    }
    double s = 0.0;
    for (std::size_t i : active) s += atoms[i].scalar_value(c);
    vals.push_back(s);
  }
  return PiecewiseConstantPath::scalar_steps(t0, t1, std::move(cuts), std::move(vals));
}

double occupation_quantile(const Path& path, double prob, double a, double b, NormChoice norm) {
  if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("occupation_quantile: prob in [0,1]");
  if (!(a < b)) throw std::invalid_argument("occupation_quantile: need a < b");
  std::vector<std::pair<double, double>> lens;  // (norm value, length)
  for (const Segment& s : segments_over(path, a, b))
    lens.emplace_back(vector_norm(s.value, norm), s.end - s.start);
  std::sort(lens.begin(), lens.end());
  double target = prob * (b - a), acc = 0.0;
  for (const auto& [v, len] : lens) {
    acc += len;
    if (acc >= target) return v;
  }
  return lens.back().first;
}

std::string to_json(const Path& path) {
  json j;
  j["dim"] = path.dim();
  j["window"] = {path.window_start(), path.window_end()};
  json bps = json::array(), vals = json::array();
  for (std::size_t i = 0; i < path.piece_count(); ++i) {
    bps.push_back(path.piece_start(i));
    View v = path.piece_value(i);
    vals.push_back(std::vector<double>(v.begin(), v.end()));
  }
  j["breakpoints"] = std::move(bps);
  j["values"] = std::move(vals);
  View ov = path.outside_value();
  j["outside"] = std::vector<double>(ov.begin(), ov.end());
  return j.dump();
}

PiecewiseConstantPath path_from_json(const std::string& text) {
  json j = json::parse(text);
  int dim = j.at("dim").get<int>();
  auto window = j.at("window").get<std::vector<double>>();
  if (window.size() != 2) throw std::invalid_argument("path json: window must be [start, end]");
  auto bps = j.at("breakpoints").get<std::vector<double>>();
  auto vals = j.at("values").get<std::vector<std::vector<double>>>();
  auto outside = j.at("outside").get<std::vector<double>>();
  return PiecewiseConstantPath(dim, window[0], window[1], std::move(bps), std::move(vals),
                               std::move(outside));
}

void write_csv(std::ostream& os, const Path& path, double grid_step) {
  if (!(grid_step > 0)) throw std::invalid_argument("write_csv: grid_step must be > 0");
  os << "t";
  for (int k = 1; k <= path.dim(); ++k) os << ",v" << k;
  os << "\n";
  char buf[64];
  for (double t = path.window_start(); t < path.window_end(); t += grid_step) {
    std::snprintf(buf, sizeof(buf), "%.12g", t);
    os << buf;
    for (double x : path.value(t)) {
      std::snprintf(buf, sizeof(buf), "%.12g", x);
      os << "," << buf;
    }
    os << "\n";
  }
}

}  // namespace tailsim::pathkit
