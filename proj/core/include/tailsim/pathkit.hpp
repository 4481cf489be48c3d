#pragma once

// Exact algebra of piecewise-constant cadlag paths on bounded windows:
// norms, exceedance time, shifts, restriction, anchoring functionals and
// the Skorohod moduli of continuity. Paths are immutable after
// construction; every operation here is pure and thread-safe.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace tailsim::pathkit {

// Distinguished +/-infinity sentinel for time-valued results
// (inf argmax of the zero path, first exceedance that never happens).
inline constexpr double time_infinity = std::numeric_limits<double>::infinity();

enum class NormChoice {
  sup_abs,        // absolute value, scalar paths
  euclidean,      // l2 on R^d
  max_coordinate  // l-inf on R^d
};

// lightweight view of one R^d value
using View = std::span<const double>;

double vector_norm(View v, NormChoice norm);

// A cadlag step function R -> R^d described by a bounded window
// [window_start, window_end): strictly increasing breakpoints (the first
// one equal to window_start), one value vector per inter-breakpoint
// interval with the right-continuous convention (value held on
// [b_i, b_{i+1})), and a constant value outside the window.
//
// Constructors normalize: adjacent intervals with equal values are
// merged, so the representation is unique and operator== is
// representation equality. Shifts are tracked through a time offset so
// that composing shifts is exact in floating point.
class PiecewiseConstantPath {
 public:
  using Vec = std::vector<double>;

  PiecewiseConstantPath(int dim, double window_start, double window_end,
                        std::vector<double> breakpoints, std::vector<Vec> values,
                        Vec outside_value);

  // scalar fast path: one value per breakpoint, zero outside
  static PiecewiseConstantPath scalar_steps(double window_start, double window_end,
                                            std::vector<double> breakpoints,
                                            std::vector<double> values);

  // scalar path: value on [a,b), zero elsewhere
  static PiecewiseConstantPath indicator(double a, double b, double value = 1.0);
  // scalar path equal to value on the whole window, zero outside
  static PiecewiseConstantPath constant(double window_start, double window_end, double value);
  static PiecewiseConstantPath zero(double window_start = 0.0, double window_end = 1.0, int dim = 1);
  // scalar grid path: samples[k] held on [start + k*step, start + (k+1)*step)
  static PiecewiseConstantPath from_samples(double start, double step,
                                            const std::vector<double>& samples);

  int dim() const { return dim_; }
  double window_start() const { return start_ + offset_; }
  double window_end() const { return end_ + offset_; }

  std::size_t piece_count() const { return breakpoints_.size(); }
  double piece_start(std::size_t i) const { return breakpoints_[i] + offset_; }
  double piece_end(std::size_t i) const {
    return (i + 1 < breakpoints_.size() ? breakpoints_[i + 1] : end_) + offset_;
  }
  // computed offset-free, so lengths are invariant under shifts
  double piece_length(std::size_t i) const {
    return (i + 1 < breakpoints_.size() ? breakpoints_[i + 1] : end_) - breakpoints_[i];
  }
  View piece_value(std::size_t i) const {
    return View(values_.data() + i * static_cast<std::size_t>(dim_),
                static_cast<std::size_t>(dim_));
  }
  View outside_value() const { return View(outside_); }

  // value at time t (outside value off the window)
  View value(double t) const;
  double scalar_value(double t) const { return value(t).front(); }

  bool is_zero() const;

  PiecewiseConstantPath shifted(double t) const;   // backshift: result(s) = this(s - t)
  PiecewiseConstantPath scaled(double c) const;    // pointwise c * path
  // pointwise path / d; a piece whose value matches |d| lands exactly on
  // +/-1, which the sup-normalized constructions rely on
  PiecewiseConstantPath divided(double d) const;

  bool operator==(const PiecewiseConstantPath& other) const;
  bool operator!=(const PiecewiseConstantPath& other) const { return !(*this == other); }

 private:
  int dim_ = 1;
  double start_ = 0.0;
  double end_ = 0.0;
  double offset_ = 0.0;
  std::vector<double> breakpoints_;  // relative to offset_
  std::vector<double> values_;       // piece_count x dim, flat
  Vec outside_;

  PiecewiseConstantPath() = default;  // used by the internal builders only
  void validate_and_normalize();
};

using Path = PiecewiseConstantPath;

// sup of ||path(t)|| over the closed interval [a, b]; for step paths this
// is the max over pieces (and outside regions) meeting [a, b], which also
// accounts for left limits.
double sup_norm(const Path& path, double a, double b, NormChoice norm = NormChoice::euclidean);
// global sup over all of R
double sup_norm(const Path& path, NormChoice norm = NormChoice::euclidean);
// inf of ||path(t)|| over [a, b]
double inf_norm(const Path& path, double a, double b, NormChoice norm = NormChoice::euclidean);

// Lebesgue measure of {t : ||path(t)|| > level}; +infinity if the outside
// value already exceeds the level.
double exceedance(const Path& path, double level = 1.0, NormChoice norm = NormChoice::euclidean);

// integral of ||path(t)||^p over R (the p-th power, not its root);
// requires a zero outside value.
double lp_power_norm(const Path& path, double p, NormChoice norm = NormChoice::euclidean);

// signed integral of a scalar path over R (zero outside value required)
double integral(const Path& path);

PiecewiseConstantPath shift(const Path& path, double t);
PiecewiseConstantPath restrict(const Path& path, double a, double b);

// smallest t with ||path||* attained at t or as a left limit at t;
// +infinity for the identically zero path. Requires zero outside value.
double infargmax(const Path& path, NormChoice norm = NormChoice::euclidean);

// inf{t : ||path(t)|| > level}; +infinity if no exceedance, -infinity if
// the outside value exceeds the level.
double first_exceedance(const Path& path, NormChoice norm = NormChoice::euclidean,
                        double level = 1.0);

// Skorohod moduli of continuity on [a, b] with mesh parameter delta,
// 0 < delta < b-a. w'' <= w' always. Both are exact for step paths
// (w' by dynamic programming over admissible jump groupings).
double modulus_w_prime(const Path& path, double a, double b, double delta,
                       NormChoice norm = NormChoice::euclidean);
double modulus_w_second(const Path& path, double a, double b, double delta,
                        NormChoice norm = NormChoice::euclidean);

// pointwise max of two scalar paths (used by max-stable constructions)
PiecewiseConstantPath pointwise_max(const Path& a, const Path& b);

// exact sum of compactly supported scalar atoms on the window [t0, t1):
// on every inter-event interval the value is the sum of the covering
// atoms' values accumulated in atom order, so a brute-force recount in
// the same order reproduces the path bit for bit.
PiecewiseConstantPath sum_step_atoms(const std::vector<Path>& atoms, double t0, double t1);

// time-weighted quantile of ||path(t)|| over [a, b): smallest level u
// with Leb{t in [a,b) : ||path(t)|| <= u} >= prob * (b - a).
double occupation_quantile(const Path& path, double prob, double a, double b,
                           NormChoice norm = NormChoice::euclidean);

// JSON object {dim, window:[start,end], breakpoints:[...], values:[[..],..],
// outside:[...]}; times are finite by construction.
std::string to_json(const Path& path);
PiecewiseConstantPath path_from_json(const std::string& text);

// CSV rows (t, v_1, ..., v_d) sampled on a regular grid for plotting
void write_csv(std::ostream& os, const Path& path, double grid_step);

}  // namespace tailsim::pathkit
