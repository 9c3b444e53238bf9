#include "teichlab/holo.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "teichlab/error.hpp"
#include "teichlab/rng.hpp"

namespace teichlab {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void validate(const Primitive& p) {
  std::visit(
      [](const auto& q) {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, MobiusPrim>) {
          if (!(q.a * q.d - q.b * q.c > 0.0)) throw InvalidArgument("mobius needs ad - bc > 0");
        } else if constexpr (std::is_same_v<T, ShrinkPrim>) {
          if (!(q.s > 0.0 && q.s <= 1.0)) throw InvalidArgument("shrink needs 0 < s <= 1");
          if (!(q.w.imag() >= 0.0)) throw InvalidArgument("shrink offset needs Im >= 0");
        } else {
          if (q.power < 0) throw InvalidArgument("blaschke power must be nonnegative");
          for (const auto& a : q.zeros) {
            if (!(std::abs(a) < 1.0)) throw InvalidArgument("blaschke zeros must lie in the open disk");
          }
        }
      },
      p);
}

std::optional<TorusPoint> step(const SelfMap& f, const TorusPoint& x) {
  try {
    TorusPoint y = f(x);
    return y;
  } catch (const InvalidPoint&) {
    return std::nullopt;
  }
}

}  // namespace

std::complex<double> apply(const Primitive& p, std::complex<double> tau) {
  return std::visit(
      [&](const auto& q) -> std::complex<double> {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, MobiusPrim>) {
          return (q.a * tau + q.b) / (q.c * tau + q.d);
        } else if constexpr (std::is_same_v<T, ShrinkPrim>) {
          return q.s * (tau + q.w);
        } else {
          const std::complex<double> z = (tau - kI) / (tau + kI);
          std::complex<double> b = std::polar(1.0, q.theta) * std::pow(z, q.power);
          for (const auto& a : q.zeros) b *= (z - a) / (1.0 - std::conj(a) * z);
          return kI * (1.0 + b) / (1.0 - b);
        }
      },
      p);
}

SelfMap::SelfMap(std::vector<Primitive> prims, std::uint64_t checkSeed) : prims_(std::move(prims)) {
  if (prims_.empty()) throw InvalidArgument("self-map needs at least one primitive");
  for (const auto& p : prims_) validate(p);
  Rng rng(checkSeed);
  excess_ = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 1000; ++k) {
    const TorusPoint x(rng.uniform(-4.0, 4.0), std::exp(rng.uniform(-2.0, 2.0)));
    const TorusPoint y(rng.uniform(-4.0, 4.0), std::exp(rng.uniform(-2.0, 2.0)));
    const double e = teich_distance((*this)(x), (*this)(y)) - teich_distance(x, y);
    excess_ = std::max(excess_, e);
  }
  if (excess_ > 1e-9) {
    throw InvalidArgument("self-map expands the Teichmueller distance by " + std::to_string(excess_));
  }
}

SelfMap SelfMap::parse(const std::string& text) { return SelfMap(parse_selfmap(text)); }

TorusPoint SelfMap::operator()(const TorusPoint& x) const {
  std::complex<double> t = x.tau();
  for (const auto& p : prims_) t = apply(p, t);
  return {t.real(), t.imag()};
}

DriftReport drift(const SelfMap& f, const TorusPoint& x0, int nMax) {
  if (nMax < 10) throw InvalidArgument("drift needs nMax >= 10");
  DriftReport r;
  r.distances.push_back(0.0);
  TorusPoint x = x0;
  r.fekete = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= nMax; ++n) {
    const auto next = step(f, x);
    if (!next) break;
    x = *next;
    const double d = teich_distance(x, x0);
    if (!std::isfinite(d)) break;
    r.distances.push_back(d);
    r.fekete = std::min(r.fekete, d / n);
    r.n = n;
  }
  if (r.n < 2) throw NonConvergence("orbit left floating-point range immediately", r.distances);
  const int half = r.n / 2;
  r.tailSlope = (r.distances[static_cast<std::size_t>(r.n)] - r.distances[static_cast<std::size_t>(half)]) /
                (r.n - half);
  r.value = std::clamp(r.tailSlope, 0.0, std::max(r.fekete, 0.0));
  return r;
}

BoundaryExtraction extract_boundary_point(const SelfMap& f, const TorusPoint& x0, std::vector<double> eps,
                                          std::int64_t budget) {
  if (eps.empty()) {
    for (int i = 1; i <= 60; ++i) eps.push_back(std::ldexp(1.0, -i));
  }
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || (i > 0 && !(eps[i] < eps[i - 1]))) {
      throw InvalidArgument("eps schedule must be positive and strictly decreasing");
    }
  }
  // Pass 1: drift over the whole usable window, from distances at powers of two.
  double fekete = std::numeric_limits<double>::infinity();
  std::vector<double> atPow2{0.0};  // d at n = 2^k, index k + 1
  std::vector<double> radiusPow2{0.0};
  std::int64_t usable = 0;
  double radius = 0.0;
  {
    TorusPoint x = x0;
    for (std::int64_t n = 1; n <= budget; ++n) {
      const auto next = step(f, x);
      if (!next) break;
      const double d = teich_distance(*next, x0);
      if (!std::isfinite(d)) break;
      x = *next;
      usable = n;
      radius = std::max(radius, d);
      fekete = std::min(fekete, d / static_cast<double>(n));
      if ((n & (n - 1)) == 0) {
        atPow2.push_back(d);
        radiusPow2.push_back(radius);
      }
    }
  }
  if (usable < 4) throw BoundedOrbit("orbit too short to analyse");
  const std::size_t k = atPow2.size() - 1;  // d at N = 2^(k-1)
  const double N = std::ldexp(1.0, static_cast<int>(k) - 1);
  const double tail = (atPow2[k] - atPow2[k - 1]) / (N / 2);
  const double l = std::clamp(tail, 0.0, std::max(fekete, 0.0));
  if (radius < 20.0 && !(radiusPow2[k] > radiusPow2[k - 1] + 1e-3)) {
    throw BoundedOrbit("orbit stays in a ball of radius " + std::to_string(radius));
  }

  // Pass 2: record times, with running maxima of every b_i from m = 0.
  const auto& panel = gm_panel();
  BoundaryExtraction out;
  out.drift = l;
  std::vector<double> runMax(eps.size(), 0.0);  // b_i(0) = 0
  std::vector<double> prevPanel, curPanel(panel.size());
  std::size_t cur = 0;
  std::int64_t lastN = 0;
  TorusPoint x = x0;
  for (std::int64_t n = 1; n <= usable; ++n) {
    x = f(x);
    const double d = teich_distance(x, x0);
    const double nd = static_cast<double>(n);
    const std::int64_t minN = cur == 0 ? 1 : 2 * lastN;
    if (n >= minN) {
      const double b = d - (l - eps[cur]) * nd;
      if (b > runMax[cur]) {
        const double ed = std::exp(-d);
        for (std::size_t j = 0; j < panel.size(); ++j) curPanel[j] = length(x, panel[j]) * ed;
        SubsequenceStep s{eps[cur], n, b, runMax[cur], std::numeric_limits<double>::infinity()};
        if (!prevPanel.empty()) {
          double change = 0.0;
          for (std::size_t j = 0; j < panel.size(); ++j) change = std::max(change, std::abs(curPanel[j] - prevPanel[j]));
          s.panelChange = change;
        }
        out.recordsVerified = out.recordsVerified && s.b > s.priorMax;
        out.subsequence.push_back(s);
        prevPanel = curPanel;
        lastN = n;
        if (s.panelChange < 1e-6) {
          out.point = GMBoundaryPoint::fit(panel, curPanel);
          return out;
        }
        ++cur;
        if (cur == eps.size()) break;
      }
    }
    for (std::size_t i = cur; i < eps.size(); ++i) runMax[i] = std::max(runMax[i], d - (l - eps[i]) * nd);
  }
  std::vector<double> changes;
  for (const auto& s : out.subsequence) changes.push_back(s.panelChange);
  throw NonConvergence("boundary values along the record subsequence did not settle", changes);
}

Thm4Report verify_thm4(const SelfMap& f, const TorusPoint& x0, const GMBoundaryPoint& P, double l,
                       const std::vector<Slope>& betas, int nMax) {
  if (nMax < 2) throw InvalidArgument("nMax must be at least 2");
  Thm4Report rep;
  rep.lambda = std::exp(2.0 * l);
  rep.infRatio = std::numeric_limits<double>::infinity();
  for (const Slope& a : farey_enumerate(200)) {
    const double e = P.E(a);
    if (e > 0.0) rep.infRatio = std::min(rep.infRatio, length(x0, a) / e);
  }
  std::vector<TorusPoint> orbit{x0};
  std::vector<double> dist{0.0};
  for (int n = 1; n <= nMax; ++n) {
    orbit.push_back(f(orbit.back()));
    dist.push_back(teich_distance(orbit.back(), x0));
  }
  const double logLambda = 2.0 * l;
  const double logInf = std::log(rep.infRatio);
  for (const Slope& beta : betas) {
    Thm4Beta b;
    b.beta = beta;
    b.EP = P.E(beta);
    b.positive = b.EP > 1e-9;
    b.minLogMargin = std::numeric_limits<double>::infinity();
    b.liminfRoot = std::numeric_limits<double>::infinity();
    const double logExt0 = 2.0 * std::log(length(x0, beta));
    double prevLogExt = logExt0;
    for (int n = 1; n <= nMax; ++n) {
      const double logExt = 2.0 * std::log(length(orbit[static_cast<std::size_t>(n)], beta));
      if (b.EP > 0.0) {
        const double logBound = 2.0 * logInf + 2.0 * std::log(b.EP) + n * logLambda;
        b.minLogMargin = std::min(b.minLogMargin, logExt - logBound);
        if (logExt - logBound < -1e-9 * std::max(1.0, std::abs(logBound))) b.lowerHolds = false;
      }
      const double logUpper = 2.0 * dist[static_cast<std::size_t>(n)] + logExt0;
      if (logExt > logUpper + 1e-12 * std::max(1.0, std::abs(logUpper))) b.kerckhoffHolds = false;
      const double root = std::exp(logExt / n);
      if (n >= nMax / 2) b.liminfRoot = std::min(b.liminfRoot, root);
      if (n == nMax) {
        b.rootAtN = root;
        b.ratioLimit = std::exp(logExt - prevLogExt);
      }
      prevLogExt = logExt;
    }
    b.converges = b.positive && std::abs(b.ratioLimit - rep.lambda) <= 1e-2;
    rep.allHold = rep.allHold && b.lowerHolds && b.kerckhoffHolds;
    rep.betas.push_back(b);
  }
  return rep;
}

std::string to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::Bounded:
      return "Bounded";
    case OrbitClass::Escaping:
      return "Escaping";
    case OrbitClass::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

OrbitAnalysis classify_orbit(const SelfMap& f, const TorusPoint& x0, const ClassifyOptions& opts) {
  OrbitAnalysis out;
  out.last = x0;
  const std::size_t window = static_cast<std::size_t>(std::max(1, opts.window));
  std::deque<double> radii{0.0}, dists{0.0};
  std::vector<double> all{0.0};
  double fekete = std::numeric_limits<double>::infinity();
  bool escaped = false, bounded = false, overflow = false;
  TorusPoint x = x0;
  for (std::int64_t n = 1; n <= opts.budget; ++n) {
    const auto next = step(f, x);
    const double d = next ? teich_distance(*next, x0) : std::numeric_limits<double>::infinity();
    if (!next || !std::isfinite(d)) {
      overflow = true;
      break;
    }
    x = *next;
    out.steps = n;
    out.last = x;
    out.lastDistance = d;
    out.radius = std::max(out.radius, d);
    fekete = std::min(fekete, d / static_cast<double>(n));
    all.push_back(d);
    radii.push_back(out.radius);
    dists.push_back(d);
    if (radii.size() > window + 1) {
      radii.pop_front();
      dists.pop_front();
    }
    if (d > opts.escapeThreshold && d > dists.front()) {
      escaped = true;
      break;
    }
    if (n >= static_cast<std::int64_t>(10 * window) && radii.back() - radii.front() < opts.boundedTolerance) {
      bounded = true;
      break;
    }
  }
  if (overflow && out.radius > opts.escapeThreshold) escaped = true;
  const std::size_t N = all.size() - 1;
  if (N >= 2) {
    const double tail = (all[N] - all[N / 2]) / static_cast<double>(N - N / 2);
    out.drift = std::clamp(tail, 0.0, std::max(fekete, 0.0));
  }
  if (escaped) {
    // The drift of an escaping orbit is read off the longer extraction run.
    try {
      const DriftReport dr = drift(f, x0, opts.driftSteps);
      out.drift = dr.value;
      BoundaryExtraction ex = extract_boundary_point(f, x0);
      out.boundary = ex.point;
      out.subsequence = ex.subsequence;
      out.QP = ex.point.Q(x0);
      out.classification = OrbitClass::Escaping;
    } catch (const Error& e) {
      out.classification = OrbitClass::Inconclusive;
      out.diagnostics = std::string("escape detected but boundary extraction failed: ") + e.what();
    }
  } else if (bounded) {
    out.classification = OrbitClass::Bounded;
    out.drift = 0.0;  // d_n <= radius for every n, so d_n / n -> 0
  } else {
    out.classification = OrbitClass::Inconclusive;
    out.diagnostics = "radius " + std::to_string(out.radius) + " still changing after " +
                      std::to_string(out.steps) + " steps";
  }
  out.lambdaExt = std::exp(2.0 * out.drift);
  return out;
}

StepReport verify_step_inequality(const SelfMap& f, const TorusPoint& x0, const GMBoundaryPoint& P, double l,
                                  const std::vector<TorusPoint>& testPoints) {
  StepReport r;
  r.l = l;
  const double el = std::exp(l), e2l = std::exp(2.0 * l);
  for (const TorusPoint& y : testPoints) {
    StepPoint s;
    s.y = y;
    s.hy = P.horofunction(y, x0);
    s.hfy = P.horofunction(f(y), x0);
    // inf_alpha Ext_y^{1/2} / E_P = 1 / Q_y(P), so the gain is exp(h(y) - h(f y)).
    s.gain = std::exp(s.hy - s.hfy);
    s.holds = s.hfy <= s.hy - l + 1e-6;
    r.allHold = r.allHold && s.holds;
    r.maxGapToExpL = std::max(r.maxGapToExpL, std::abs(s.gain - el));
    r.maxGapToExp2L = std::max(r.maxGapToExp2L, std::abs(s.gain - e2l));
    r.gainAtLeastExpL = r.gainAtLeastExpL && s.gain >= el * (1.0 - 1e-9);
    r.gainAtLeastExp2L = r.gainAtLeastExp2L && s.gain >= e2l * (1.0 - 1e-9);
    r.points.push_back(s);
  }
  r.supported = r.maxGapToExpL <= r.maxGapToExp2L ? "e^l" : "e^{2l}";
  return r;
}

}  // namespace teichlab
