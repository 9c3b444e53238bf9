#include "teichlab/mcg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "teichlab/error.hpp"

namespace teichlab {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Periodic:
      return "Periodic";
    case Classification::Reducible:
      return "Reducible";
    case Classification::Anosov:
      return "Anosov";
  }
  return "?";
}

Classification classify(const MappingClass& m) {
  const std::int64_t t = std::abs(m.trace());
  if (m.b() == 0 && m.c() == 0) return Classification::Periodic;  // +-identity
  if (t < 2) return Classification::Periodic;
  if (t == 2) return Classification::Reducible;
  return Classification::Anosov;
}

double dilatation(const MappingClass& m) {
  const double t = std::abs(static_cast<double>(m.trace()));
  if (t < 2.0) return 1.0;
  return 0.5 * (t + std::sqrt((t - 2.0) * (t + 2.0)));
}

TorusPoint act_on_point(const MappingClass& m, const TorusPoint& x) {
  // tau -> (a tau - b) / (-c tau + d)
  const std::complex<double> tau = x.tau();
  const double a = static_cast<double>(m.a()), b = static_cast<double>(m.b());
  const double c = static_cast<double>(m.c()), d = static_cast<double>(m.d());
  const std::complex<double> den = -c * tau + d;
  const std::complex<double> w = (a * tau - b) / den;
  return {w.real(), x.im() / std::norm(den)};
}

FrickePoint act_on_point(const MappingClass& m, const FrickePoint& x) { return apply_mapping_class(x, m); }

ModelPoint act_on_point(const MappingClass& m, const ModelPoint& x) {
  return std::visit([&](const auto& p) -> ModelPoint { return act_on_point(m, p); }, x);
}

namespace {

std::vector<double> log_lengths(const TorusPoint& x, const MappingClass& m, const Slope& alpha, int nMax) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(nMax) + 1);
  const Mat2 mm = m.to_mat2();
  Vec2 v = alpha.vec();
  double logScale = 0.0;
  for (int n = 0; n <= nMax; ++n) {
    if (n > 0) {
      v = mm * v;
      const double s = norm(v);
      v = {v.x / s, v.y / s};
      logScale += std::log(s);
    }
    out.push_back(logScale + std::log(length(x, v)));
  }
  return out;
}

std::vector<double> log_lengths(const FrickePoint& x, const MappingClass& m, const Slope& alpha, int nMax) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(nMax) + 1);
  const BigMatrix mm(m);
  BigSlope s = to_big(alpha);
  for (int n = 0; n <= nMax; ++n) {
    if (n > 0) s = mm.apply(s);
    out.push_back(log_hyp_length(x, s));
  }
  return out;
}

}  // namespace

SpectralEntry spectral_limit(const ModelPoint& x, const MappingClass& m, const Slope& alpha, int nMax) {
  if (nMax < 2) throw InvalidArgument("nMax must be at least 2");
  SpectralEntry e;
  e.alpha = canonicalize_slope(alpha.p, alpha.q);
  e.logLengths = std::visit([&](const auto& p) { return log_lengths(p, m, e.alpha, nMax); }, x);
  for (int n = 1; n <= nMax; ++n) e.roots.push_back(std::exp(e.logLengths[n] / n));
  for (int n = 0; n < nMax; ++n) e.ratios.push_back(std::exp(e.logLengths[n + 1] - e.logLengths[n]));
  const int quarter = std::max(1, nMax / 4);
  e.limit = std::exp((e.logLengths[nMax] - e.logLengths[nMax - quarter]) / quarter);
  const auto tail = e.ratios.end() - quarter;
  const auto [lo, hi] = std::minmax_element(tail, e.ratios.end());
  e.cauchySpread = *hi - *lo;
  return e;
}

SpectralReport spectral_report(const ModelPoint& x, const MappingClass& m, const std::vector<Slope>& alphas,
                               int nMax, double tolerance) {
  if (alphas.empty()) throw InvalidArgument("slope panel is empty");
  SpectralReport r;
  r.classification = classify(m);
  r.dilatation = dilatation(m);
  std::vector<double> limits;
  for (const Slope& a : alphas) {
    r.perCurve.push_back(spectral_limit(x, m, a, nMax));
    limits.push_back(r.perCurve.back().limit);
  }
  std::sort(limits.begin(), limits.end());
  for (double v : limits) {
    if (r.spectrum.empty() || v - r.spectrum.back() > tolerance) r.spectrum.push_back(v);
  }
  if (r.classification == Classification::Anosov) {
    r.agreesWithDilatation = std::all_of(limits.begin(), limits.end(),
                                         [&](double v) { return std::abs(v - r.dilatation) <= tolerance; });
  } else {
    r.agreesWithDilatation = std::all_of(limits.begin(), limits.end(),
                                         [&](double v) { return std::abs(v - 1.0) <= tolerance; });
  }
  return r;
}

}  // namespace teichlab
