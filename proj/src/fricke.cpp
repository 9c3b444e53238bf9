#include "teichlab/fricke.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "teichlab/error.hpp"

namespace teichlab {

namespace {

const double kLog2 = std::log(2.0);
const double kLogSwitch = std::log(LogTrace::kSwitch);

double logaddexp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

bool direct_arithmetic(TraceMode mode, std::initializer_list<const LogTrace*> ts) {
  if (mode == TraceMode::Direct) return true;
  if (mode == TraceMode::Log) return false;
  return std::none_of(ts.begin(), ts.end(), [](const LogTrace* t) { return t->is_log(); });
}

void require_valid(const LogTrace& t) {
  const bool ok = t.is_log() ? t.log() > kLog2 : t.value() > 2.0;
  if (!ok || std::isnan(t.log())) {
    throw InvalidPoint("trace recursion produced a trace <= 2; not a valid structure");
  }
}

/// Offsets c with root = u_i + u_j + c for z^2 - xy z + x^2 + y^2 = 0.
struct RootOffsets {
  double big;
  double small;
};

RootOffsets root_offsets(double ui, double uj) {
  const double s2 = 1.0 - 4.0 * std::exp(-2.0 * ui) - 4.0 * std::exp(-2.0 * uj);
  if (!(s2 >= 0.0)) throw InvalidPoint("trace pair admits no real Markov completion");
  const double lp = std::log1p(std::sqrt(s2));
  return {lp - kLog2, kLog2 + logaddexp(-2.0 * ui, -2.0 * uj) - lp};
}

}  // namespace

LogTrace LogTrace::from_value(double t, TraceMode mode) {
  if (mode == TraceMode::Log) return {std::log(t), true};
  if (mode == TraceMode::Auto && t > kSwitch) return {std::log(t), true};
  return {t, false};
}

LogTrace LogTrace::from_log(double u, TraceMode mode) {
  if (mode == TraceMode::Direct) return {std::exp(u), false};
  if (mode == TraceMode::Auto && u <= kLogSwitch) return {std::exp(u), false};
  return {u, true};
}

double LogTrace::log() const { return is_log_ ? v_ : std::log(v_); }
double LogTrace::value() const { return is_log_ ? std::exp(v_) : v_; }

LogTrace LogTrace::as(TraceMode mode) const {
  return is_log_ ? from_log(v_, mode) : from_value(v_, mode);
}

LogTrace vieta_step(const LogTrace& a, const LogTrace& b, const LogTrace& d, TraceMode mode) {
  LogTrace out;
  if (direct_arithmetic(mode, {&a, &b, &d})) {
    const double ta = a.value(), tb = b.value(), td = d.value();
    const double prod = ta * tb;
    const double t = td < 0.5 * prod ? prod - td : (ta * ta + tb * tb) / td;
    out = LogTrace::from_value(t, mode);
  } else {
    const double ua = a.log(), ub = b.log(), ud = d.log();
    const double sum = ua + ub;
    const double u = ud < sum - kLog2 ? sum + std::log1p(-std::exp(ud - sum))
                                      : logaddexp(2.0 * ua, 2.0 * ub) - ud;
    out = LogTrace::from_log(u, mode);
  }
  require_valid(out);
  return out;
}

double hyp_length(const LogTrace& t) {
  if (!t.is_log()) return 2.0 * std::acosh(0.5 * t.value());
  const double u = t.log();
  return 2.0 * (u - kLog2) + 2.0 * std::log1p(std::sqrt(1.0 - 4.0 * std::exp(-2.0 * u)));
}

double log_hyp_length(const LogTrace& t) { return std::log(hyp_length(t)); }

FrickePoint::FrickePoint(double tx, double ty, double tz)
    : FrickePoint(LogTrace::from_value(tx), LogTrace::from_value(ty), LogTrace::from_value(tz)) {
  if (!(tx > 2.0 && ty > 2.0 && tz > 2.0) || !std::isfinite(tx * ty * tz)) {
    throw InvalidPoint("traces must be finite and exceed 2");
  }
}

FrickePoint::FrickePoint(LogTrace tx, LogTrace ty, LogTrace tz) : t_{tx, ty, tz} {
  for (const auto& t : t_) {
    if (std::isnan(t.log()) || !(t.log() > kLog2) || std::isinf(t.log())) {
      throw InvalidPoint("traces must be finite and exceed 2");
    }
  }
  snap();
}

FrickePoint FrickePoint::from_pair(double tx, double ty, bool largerRoot) {
  const double disc = tx * tx * ty * ty - 4.0 * (tx * tx + ty * ty);
  if (!(tx > 2.0 && ty > 2.0) || disc < 0.0) throw InvalidPoint("trace pair admits no Markov completion");
  const double big = 0.5 * (tx * ty + std::sqrt(disc));
  return {tx, ty, largerRoot ? big : (tx * tx + ty * ty) / big};
}

void FrickePoint::snap() {
  int k = 0;
  for (int m = 1; m < 3; ++m) {
    if (t_[m].log() > t_[k].log()) k = m;
  }
  const LogTrace& ti = t_[(k + 1) % 3];
  const LogTrace& tj = t_[(k + 2) % 3];
  const double tol = 1e-9;
  if (!t_[0].is_log() && !t_[1].is_log() && !t_[2].is_log()) {
    const double x = ti.value(), y = tj.value(), z = t_[k].value();
    const double disc = x * x * y * y - 4.0 * (x * x + y * y);
    if (disc < 0.0) throw InvalidPoint("trace pair admits no real Markov completion");
    const double big = 0.5 * (x * y + std::sqrt(disc));
    const double small = (x * x + y * y) / big;
    const double root = std::abs(z - big) <= std::abs(z - small) ? big : small;
    snap_ = std::abs(std::log(z / root)) / std::max(1.0, std::abs(std::log(root)));
    if (!(snap_ <= tol)) throw InvalidPoint("traces violate the Markov identity");
    t_[k] = LogTrace::from_value(root);
    return;
  }
  const double ui = ti.log(), uj = tj.log(), uk = t_[k].log();
  const RootOffsets c = root_offsets(ui, uj);
  const double big = (ui + uj) + c.big;
  const double small = (ui + uj) + c.small;
  const double root = std::abs(uk - big) <= std::abs(uk - small) ? big : small;
  snap_ = std::abs(uk - root) / std::max(1.0, std::abs(root));
  if (!(snap_ <= tol)) throw InvalidPoint("traces violate the Markov identity");
  t_[k] = LogTrace::from_log(root);
}

double FrickePoint::markov_residual() const {
  if (!t_[0].is_log() && !t_[1].is_log() && !t_[2].is_log()) {
    const double x = t_[0].value(), y = t_[1].value(), z = t_[2].value();
    return std::abs(x * x + y * y + z * z - x * y * z) / (x * y * z);
  }
  int k = 0;
  for (int m = 1; m < 3; ++m) {
    if (t_[m].log() > t_[k].log()) k = m;
  }
  const double ui = t_[(k + 1) % 3].log(), uj = t_[(k + 2) % 3].log(), uk = t_[k].log();
  const RootOffsets c = root_offsets(ui, uj);
  const double big = (ui + uj) + c.big;
  const double small = (ui + uj) + c.small;
  const bool nearBig = std::abs(uk - big) <= std::abs(uk - small);
  const double cr = nearBig ? c.big : c.small;
  const double co = nearBig ? c.small : c.big;
  // (z - z_r)(z - z_o) / (xyz) with z = z_r (1 + eta).
  const double eta = std::expm1(uk - (nearBig ? big : small));
  return std::abs(eta) * std::abs(std::exp(cr) * (1.0 + eta) - std::exp(co)) / std::abs(1.0 + eta);
}

namespace {

struct Triple {
  LogTrace left, right, mid;  // slopes (0,1), (1,0), (1,1) of the quadrant
};

Triple quadrant_triple(const FrickePoint& x, bool reflected, TraceMode mode) {
  const LogTrace tx = x.tx().as(mode), ty = x.ty().as(mode), tz = x.tz().as(mode);
  if (!reflected) return {tx, ty, tz};
  return {tx, ty, vieta_step(tx, ty, tz, mode)};
}

/// Runs of the Stern-Brocot path to p/q from 1/1, alternating right (toward
/// 1/0) and left (toward 0/1), starting with a right run that may be empty.
template <class Int>
std::vector<std::int64_t> sb_runs(Int p, Int q) {
  std::vector<std::int64_t> runs;
  while (q != 0) {
    const Int a = p / q;
    if (a > Int(std::int64_t{1} << 40)) throw InvalidArgument("continued fraction term too large");
    runs.push_back(static_cast<std::int64_t>(a));
    Int r = p - a * q;
    p = q;
    q = r;
  }
  runs.back() -= 1;
  return runs;
}

LogTrace descend(Triple t, const std::vector<std::int64_t>& runs, TraceMode mode) {
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const bool right = i % 2 == 0;
    for (std::int64_t k = 0; k < runs[i]; ++k) {
      if (right) {
        LogTrace child = vieta_step(t.mid, t.right, t.left, mode);
        t.left = t.mid;
        t.mid = child;
      } else {
        LogTrace child = vieta_step(t.left, t.mid, t.right, mode);
        t.right = t.mid;
        t.mid = child;
      }
    }
  }
  return t.mid;
}

}  // namespace

LogTrace trace_of_slope(const FrickePoint& x, const Slope& s, TraceMode mode) {
  const Slope c = canonicalize_slope(s.p, s.q);
  if (c.q == 0) return x.ty().as(mode);
  if (c.p == 0) return x.tx().as(mode);
  const bool reflected = c.p < 0;
  return descend(quadrant_triple(x, reflected, mode), sb_runs<std::int64_t>(std::abs(c.p), c.q), mode);
}

LogTrace trace_of_slope(const FrickePoint& x, const BigSlope& s, TraceMode mode) {
  const BigSlope c = canonicalize(s.p, s.q);
  if (c.q == 0) return x.ty().as(mode);
  if (c.p == 0) return x.tx().as(mode);
  const bool reflected = c.p < 0;
  return descend(quadrant_triple(x, reflected, mode), sb_runs<BigInt>(reflected ? BigInt(-c.p) : c.p, c.q),
                 mode);
}

double hyp_length(const FrickePoint& x, const Slope& s, TraceMode mode) {
  return hyp_length(trace_of_slope(x, s, mode));
}

double log_hyp_length(const FrickePoint& x, const Slope& s, TraceMode mode) {
  return log_hyp_length(trace_of_slope(x, s, mode));
}

double log_hyp_length(const FrickePoint& x, const BigSlope& s) { return log_hyp_length(trace_of_slope(x, s)); }

std::vector<std::pair<Slope, LogTrace>> trace_table(const FrickePoint& x, int maxHeight, TraceMode mode) {
  if (maxHeight < 1) throw InvalidArgument("maxHeight must be at least 1");
  std::vector<std::pair<Slope, LogTrace>> out;
  out.push_back({{1, 0}, x.ty().as(mode)});
  out.push_back({{0, 1}, x.tx().as(mode)});
  struct Node {
    Slope left, right, mid;
    Triple t;
  };
  for (const bool reflected : {false, true}) {
    const std::int64_t sign = reflected ? -1 : 1;
    std::vector<Node> stack{{{0, 1}, {1, 0}, {1, 1}, quadrant_triple(x, reflected, mode)}};
    while (!stack.empty()) {
      const Node n = stack.back();
      stack.pop_back();
      out.push_back({{sign * n.mid.p, n.mid.q}, n.t.mid});
      const Slope lc{n.left.p + n.mid.p, n.left.q + n.mid.q};
      if (lc.height() <= maxHeight) {
        stack.push_back({n.left, n.mid, lc, {n.t.left, n.t.mid, vieta_step(n.t.left, n.t.mid, n.t.right, mode)}});
      }
      const Slope rc{n.mid.p + n.right.p, n.mid.q + n.right.q};
      if (rc.height() <= maxHeight) {
        stack.push_back({n.mid, n.right, rc, {n.t.mid, n.t.right, vieta_step(n.t.mid, n.t.right, n.t.left, mode)}});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

FrickePoint apply_mapping_class(const FrickePoint& x, const MappingClass& g) {
  const MappingClass inv = g.inverse();
  return {trace_of_slope(x, apply_mapping_class_to_slope(inv, {0, 1})),
          trace_of_slope(x, apply_mapping_class_to_slope(inv, {1, 0})),
          trace_of_slope(x, apply_mapping_class_to_slope(inv, {1, 1}))};
}

namespace {

TruncatedSup finish(double best, Slope arg, double bestHalf) {
  TruncatedSup out;
  out.value = best;
  out.argmax = arg;
  out.gap = best - bestHalf;
  out.converged = out.gap < kTruncationTolerance;
  return out;
}

}  // namespace

TruncatedSup thurston_metric_enumerated(const FrickePoint& x, const FrickePoint& y, int maxHeight) {
  const auto tx = trace_table(x, maxHeight);
  const auto ty = trace_table(y, maxHeight);
  const int half = std::max(1, maxHeight / 2);
  double best = -std::numeric_limits<double>::infinity(), bestHalf = best;
  Slope arg{1, 0};
  for (std::size_t k = 0; k < tx.size(); ++k) {
    const double r = log_hyp_length(ty[k].second) - log_hyp_length(tx[k].second);
    if (r > best) {
      best = r;
      arg = tx[k].first;
    }
    if (tx[k].first.height() <= half) bestHalf = std::max(bestHalf, r);
  }
  return finish(best, arg, bestHalf);
}

TruncatedSup horofunction_estimate(const Foliation& mu, const FrickePoint& x, const FrickePoint& x0,
                                   int maxHeight) {
  const auto tx = trace_table(x, maxHeight);
  const auto t0 = trace_table(x0, maxHeight);
  const int half = std::max(1, maxHeight / 2);
  const double ninf = -std::numeric_limits<double>::infinity();
  double sx = ninf, s0 = ninf, sxHalf = ninf, s0Half = ninf;
  Slope arg{1, 0};
  for (std::size_t k = 0; k < tx.size(); ++k) {
    const double i = intersection(mu, tx[k].first);
    if (i == 0.0) continue;
    const double li = std::log(i);
    const double rx = li - log_hyp_length(tx[k].second);
    const double r0 = li - log_hyp_length(t0[k].second);
    if (rx > sx) {
      sx = rx;
      arg = tx[k].first;
    }
    s0 = std::max(s0, r0);
    if (tx[k].first.height() <= half) {
      sxHalf = std::max(sxHalf, rx);
      s0Half = std::max(s0Half, r0);
    }
  }
  TruncatedSup out = finish(sx - s0, arg, sxHalf - s0Half);
  out.gap = std::abs(out.gap);
  out.converged = out.gap < kTruncationTolerance;
  return out;
}

double orbit_metric(const FrickePoint& x0, const BigMatrix& g, const std::vector<Slope>& panel) {
  const BigMatrix inv = g.inverse();
  double best = -std::numeric_limits<double>::infinity();
  for (const Slope& s : panel) {
    best = std::max(best, log_hyp_length(x0, inv.apply(s)) - log_hyp_length(x0, s));
  }
  return best;
}

AsymmetryWitness find_asymmetry_witness(const FrickePoint& x, int maxHeight) {
  const MappingClass ta(1, 1, 0, 1), tb(1, 0, -1, 1);
  AsymmetryWitness best{x, x, MappingClass::identity()};
  double bestAbs = -1.0;
  for (int i = -3; i <= 3; ++i) {
    for (int j = -3; j <= 3; ++j) {
      MappingClass w = MappingClass::identity();
      for (int k = 0; k < std::abs(i); ++k) w = w * (i > 0 ? ta : ta.inverse());
      for (int k = 0; k < std::abs(j); ++k) w = w * (j > 0 ? tb : tb.inverse());
      if (w == MappingClass::identity()) continue;
      const FrickePoint y = apply_mapping_class(x, w);
      const double f = thurston_metric_enumerated(x, y, maxHeight).value;
      const double b = thurston_metric_enumerated(y, x, maxHeight).value;
      if (std::abs(f - b) > bestAbs) {
        bestAbs = std::abs(f - b);
        best = f >= b ? AsymmetryWitness{x, y, w, f, b} : AsymmetryWitness{y, x, w.inverse(), b, f};
      }
    }
  }
  best.forwardDoubled = thurston_metric_enumerated(best.x, best.y, 2 * maxHeight).value;
  best.backwardDoubled = thurston_metric_enumerated(best.y, best.x, 2 * maxHeight).value;
  return best;
}

}  // namespace teichlab
