#pragma once

#include <utility>
#include <vector>

#include "teichlab/big_matrix.hpp"
#include "teichlab/curves.hpp"
#include "teichlab/mapping_class.hpp"

namespace teichlab {

/// How trace arithmetic is carried out. Auto switches to logarithms above
/// LogTrace::kSwitch; the forced modes exist for cross-checking.
enum class TraceMode { Auto, Direct, Log };

/// A trace t > 2, stored as t itself or as log t.
class LogTrace {
 public:
  static constexpr double kSwitch = 1e8;

  LogTrace() = default;
  static LogTrace from_value(double t, TraceMode mode = TraceMode::Auto);
  static LogTrace from_log(double u, TraceMode mode = TraceMode::Auto);

  bool is_log() const { return is_log_; }
  double log() const;
  /// May overflow to infinity for log-represented traces.
  double value() const;
  /// Same trace in the representation the mode asks for.
  LogTrace as(TraceMode mode) const;

 private:
  LogTrace(double v, bool isLog) : v_(v), is_log_(isLog) {}
  double v_ = 3.0;
  bool is_log_ = false;
};

/// t_a * t_b - t_d for a Markov triple (t_a, t_b, t_d), choosing between the
/// sum and the product form of the Vieta root so that nothing cancels.
LogTrace vieta_step(const LogTrace& a, const LogTrace& b, const LogTrace& d, TraceMode mode);

double hyp_length(const LogTrace& t);
double log_hyp_length(const LogTrace& t);

/// Once-punctured torus given by traces of the slopes (0,1), (1,0), (1,1).
/// Construction projects the largest trace onto the Markov surface.
class FrickePoint {
 public:
  FrickePoint(double tx, double ty, double tz);
  FrickePoint(LogTrace tx, LogTrace ty, LogTrace tz);

  /// tz chosen as the larger or smaller Vieta root over (tx, ty).
  static FrickePoint from_pair(double tx, double ty, bool largerRoot = true);

  const LogTrace& tx() const { return t_[0]; }
  const LogTrace& ty() const { return t_[1]; }
  const LogTrace& tz() const { return t_[2]; }

  /// |tx^2 + ty^2 + tz^2 - tx ty tz| / (tx ty tz).
  double markov_residual() const;
  /// Log-relative correction applied by the projection at construction.
  double snap_deviation() const { return snap_; }

 private:
  void snap();
  LogTrace t_[3];
  double snap_ = 0.0;
};

LogTrace trace_of_slope(const FrickePoint& x, const Slope& s, TraceMode mode = TraceMode::Auto);
LogTrace trace_of_slope(const FrickePoint& x, const BigSlope& s, TraceMode mode = TraceMode::Auto);

double hyp_length(const FrickePoint& x, const Slope& s, TraceMode mode = TraceMode::Auto);
double log_hyp_length(const FrickePoint& x, const Slope& s, TraceMode mode = TraceMode::Auto);
double log_hyp_length(const FrickePoint& x, const BigSlope& s);

/// Traces of every slope of height <= maxHeight, in farey_enumerate order.
std::vector<std::pair<Slope, LogTrace>> trace_table(const FrickePoint& x, int maxHeight,
                                                    TraceMode mode = TraceMode::Auto);

FrickePoint apply_mapping_class(const FrickePoint& x, const MappingClass& g);

/// Truncated sup with the doubling diagnostic: value at maxHeight minus the
/// value at maxHeight / 2.
struct TruncatedSup {
  double value = 0.0;
  Slope argmax;
  double gap = 0.0;
  bool converged = true;
};

constexpr double kTruncationTolerance = 1e-3;

TruncatedSup thurston_metric_enumerated(const FrickePoint& x, const FrickePoint& y, int maxHeight);
TruncatedSup horofunction_estimate(const Foliation& mu, const FrickePoint& x, const FrickePoint& x0,
                                   int maxHeight);

/// L(x0, g x0) with lengths of g x0 evaluated lazily as l_{x0}(g^{-1} s).
double orbit_metric(const FrickePoint& x0, const BigMatrix& g, const std::vector<Slope>& panel);

struct AsymmetryWitness {
  FrickePoint x;
  FrickePoint y;
  MappingClass word;  // y = word . x
  double forward = 0.0;   // L(x, y)
  double backward = 0.0;  // L(y, x)
  double forwardDoubled = 0.0;
  double backwardDoubled = 0.0;

  double asymmetry() const { return forward - backward; }
  double asymmetry_doubled() const { return forwardDoubled - backwardDoubled; }
};

/// Scans twist words applied to x for the largest L(x, y) - L(y, x) at
/// maxHeight and re-evaluates the winner at 2 * maxHeight.
AsymmetryWitness find_asymmetry_witness(const FrickePoint& x, int maxHeight);

}  // namespace teichlab
