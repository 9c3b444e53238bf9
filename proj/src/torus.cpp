#include "teichlab/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "teichlab/error.hpp"

namespace teichlab {

TorusPoint::TorusPoint(double re, double im) : re_(re), im_(im) {
  if (!std::isfinite(re) || !std::isfinite(im) || !(im > 0.0)) {
    throw InvalidPoint("torus parameter needs finite re and im > 0");
  }
}

TorusPoint TorusPoint::from_form(const SymForm& q) {
  // Q = (1/Im)[[1, Re], [Re, |tau|^2]] up to the determinant.
  const double det = q.det();
  if (!(q.xx > 0.0) || !(det > 0.0)) throw InvalidPoint("length form is not positive definite");
  const double s = std::sqrt(det);
  const double a = q.xx / s;
  return {q.xy / q.xx, 1.0 / a};
}

SymForm length_form(const TorusPoint& x) {
  const double inv = 1.0 / x.im();
  return {inv, x.re() * inv, (x.re() * x.re() + x.im() * x.im()) * inv};
}

double length(const TorusPoint& x, Vec2 v) {
  return std::hypot(v.x + v.y * x.re(), v.y * x.im()) / std::sqrt(x.im());
}

double length(const TorusPoint& x, const Slope& s) { return length(x, s.vec()); }
double length(const TorusPoint& x, const Foliation& mu) { return length(x, mu.vec()); }

double extremal_length(const TorusPoint& x, const Slope& s) {
  const double l = length(x, s);
  return l * l;
}

double log_pencil_top(const TorusPoint& x, const TorusPoint& y) {
  // tr(Q_y^{-1} Q_x) = 2 + delta, delta = |tau_x - tau_y|^2 / (Im x Im y);
  // the top eigenvalue is the larger root of l^2 - (2 + delta) l + 1.
  const double gap = std::hypot(x.re() - y.re(), x.im() - y.im());
  if (gap == 0.0) return 0.0;
  const double log_delta = 2.0 * std::log(gap) - (std::log(x.im()) + std::log(y.im()));
  if (log_delta <= 0.0) {
    const double delta = std::exp(log_delta);
    return std::log1p(0.5 * delta + std::sqrt(delta * (1.0 + 0.25 * delta)));
  }
  const double inv = std::exp(-log_delta);
  return log_delta + std::log(0.5 * (1.0 + 2.0 * inv + std::sqrt(1.0 + 4.0 * inv)));
}

double teich_distance(const TorusPoint& x, const TorusPoint& y) { return 0.5 * log_pencil_top(x, y); }

double thurston_metric_exact(const TorusPoint& x, const TorusPoint& y) {
  return 0.5 * log_pencil_top(y, x);
}

EnumeratedSup thurston_metric_enumerated(const TorusPoint& x, const TorusPoint& y, int maxHeight) {
  EnumeratedSup best{-std::numeric_limits<double>::infinity(), {1, 0}};
  for (const Slope& s : farey_enumerate(maxHeight)) {
    const double r = std::log(length(y, s)) - std::log(length(x, s));
    if (r > best.value) best = {r, s};
  }
  return best;
}

double log_sup_intersection_ratio(const Foliation& mu, const TorusPoint& x) {
  // sup_v |det(mu, v)| / sqrt(Q(v)) is the dual norm of v -> det(mu, v),
  // which works out to the flat length of mu itself.
  return std::log(length(x, mu));
}

double horofunction(const Foliation& mu, const TorusPoint& x, const TorusPoint& x0) {
  return log_sup_intersection_ratio(mu, x) - log_sup_intersection_ratio(mu, x0);
}

double horofunction_interior(const TorusPoint& z, const TorusPoint& x, const TorusPoint& x0) {
  return thurston_metric_exact(x, z) - thurston_metric_exact(x0, z);
}

double gm_value(const TorusPoint& x, const TorusPoint& x0, const Slope& beta) {
  return length(x, beta) * std::exp(-teich_distance(x0, x));
}

GMBoundaryPoint::GMBoundaryPoint(Foliation direction, double scale, std::vector<Slope> panel,
                                 std::vector<double> panelValues, double residual)
    : direction_(direction),
      scale_(scale),
      panel_(std::move(panel)),
      values_(std::move(panelValues)),
      residual_(residual) {}

GMBoundaryPoint GMBoundaryPoint::fit(const std::vector<Slope>& panel, const std::vector<double>& values) {
  if (panel.size() != values.size()) throw InvalidArgument("panel and values differ in size");
  const auto find = [&](Slope s) {
    const auto it = std::find(panel.begin(), panel.end(), s);
    if (it == panel.end()) throw InvalidArgument("panel must contain the basis slopes");
    return values[static_cast<std::size_t>(it - panel.begin())];
  };
  const double ex = find({1, 0});
  const double ey = find({0, 1});
  if (ex == 0.0 && ey == 0.0) throw InvalidArgument("boundary values vanish on the basis slopes");
  GMBoundaryPoint best;
  double best_res = std::numeric_limits<double>::infinity();
  for (const double sign : {1.0, -1.0}) {
    const double ax = sign * ex;
    double res = 0.0;
    for (std::size_t k = 0; k < panel.size(); ++k) {
      const Vec2 v = panel[k].vec();
      res = std::max(res, std::abs(std::abs(ax * v.x + ey * v.y) - values[k]));
    }
    if (res < best_res) {
      best_res = res;
      best = GMBoundaryPoint(Foliation(ey, -ax), std::hypot(ex, ey), panel, values, res);
    }
  }
  return best;
}

double GMBoundaryPoint::E(const Slope& beta) const { return E(beta.vec()); }
double GMBoundaryPoint::E(Vec2 beta) const { return scale_ * intersection(direction_.vec(), beta); }

double GMBoundaryPoint::Q(const TorusPoint& x) const {
  return scale_ * std::exp(log_sup_intersection_ratio(direction_, x));
}

double GMBoundaryPoint::horofunction(const TorusPoint& y, const TorusPoint& x0) const {
  return teichlab::horofunction(direction_, y, x0);
}

const std::vector<Slope>& gm_panel() {
  static const std::vector<Slope> panel = farey_enumerate(10);
  return panel;
}

TorusPoint ray_point(const Foliation& direction, const TorusPoint& x0, double t) {
  const SymForm q0 = length_form(x0);
  const Vec2 n{-direction.b(), direction.a()};
  // Q0 = w w^T + u u^T with w parallel to n, normalised by w^T Q0^{-1} w = 1.
  const SymForm inv{q0.yy, -q0.xy, q0.xx};
  const double c = 1.0 / std::sqrt(inv(n));
  const Vec2 w{c * n.x, c * n.y};
  const SymForm rest{q0.xx - w.x * w.x, q0.xy - w.x * w.y, q0.yy - w.y * w.y};
  Vec2 u{std::sqrt(std::max(rest.xx, 0.0)), std::sqrt(std::max(rest.yy, 0.0))};
  if (rest.xy < 0.0) u.y = -u.y;
  const double grow = std::exp(2.0 * t), shrink = std::exp(-2.0 * t);
  // det Q_t = cross(w, u)^2 for every t; reading tau off the first row
  // avoids the cancellation in det(Q_t) far out on the ray.
  const double xx = grow * w.x * w.x + shrink * u.x * u.x;
  const double xy = grow * w.x * w.y + shrink * u.x * u.y;
  return {xy / xx, std::abs(cross(w, u)) / xx};
}

GMBoundaryPoint gm_boundary_from_ray(const Foliation& targetDirection, const TorusPoint& x0) {
  constexpr int kBudget = 60;
  constexpr double kTol = 1e-8;
  const auto& panel = gm_panel();
  std::vector<double> prev, cur(panel.size()), diffs;
  for (int k = 1; k <= kBudget; ++k) {
    const TorusPoint xt = ray_point(targetDirection, x0, k * std::log(2.0));
    for (std::size_t j = 0; j < panel.size(); ++j) cur[j] = gm_value(xt, x0, panel[j]);
    if (!prev.empty()) {
      double diff = 0.0;
      for (std::size_t j = 0; j < panel.size(); ++j) diff = std::max(diff, std::abs(cur[j] - prev[j]));
      diffs.push_back(diff);
      if (diff < kTol) return GMBoundaryPoint::fit(panel, cur);
    }
    prev = cur;
  }
  throw NonConvergence("boundary values along the ray did not settle", diffs);
}

}  // namespace teichlab
