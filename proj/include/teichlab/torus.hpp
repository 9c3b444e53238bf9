#pragma once

#include <complex>
#include <vector>

#include "teichlab/curves.hpp"
#include "teichlab/linalg2.hpp"

namespace teichlab {

/// Point tau = re + i*im of the upper half-plane, read as a unit-area flat torus.
class TorusPoint {
 public:
  TorusPoint() = default;
  TorusPoint(double re, double im);

  /// Point whose length form is q (rescaled to determinant 1).
  static TorusPoint from_form(const SymForm& q);

  double re() const { return re_; }
  double im() const { return im_; }
  std::complex<double> tau() const { return {re_, im_}; }

  bool operator==(const TorusPoint&) const = default;

 private:
  double re_ = 0.0;
  double im_ = 1.0;
};

/// Q with Q(v) = l(v)^2 and det Q = 1.
SymForm length_form(const TorusPoint& x);

double length(const TorusPoint& x, Vec2 v);
double length(const TorusPoint& x, const Slope& s);
double length(const TorusPoint& x, const Foliation& mu);
double extremal_length(const TorusPoint& x, const Slope& s);

/// log of the top eigenvalue of the pencil (Q_x, Q_y); symmetric in x and y.
double log_pencil_top(const TorusPoint& x, const TorusPoint& y);

double teich_distance(const TorusPoint& x, const TorusPoint& y);
double thurston_metric_exact(const TorusPoint& x, const TorusPoint& y);

struct EnumeratedSup {
  double value = 0.0;
  Slope argmax;
};

EnumeratedSup thurston_metric_enumerated(const TorusPoint& x, const TorusPoint& y, int maxHeight);

/// log sup_alpha i(mu, alpha) / l_x(alpha), over all real directions.
double log_sup_intersection_ratio(const Foliation& mu, const TorusPoint& x);

double horofunction(const Foliation& mu, const TorusPoint& x, const TorusPoint& x0);
double horofunction_interior(const TorusPoint& z, const TorusPoint& x, const TorusPoint& x0);

/// E_x(beta) = Ext_x(beta)^{1/2} / exp(d(x0, x)).
double gm_value(const TorusPoint& x, const TorusPoint& x0, const Slope& beta);

/// Boundary function E_P(beta) = scale * i(direction, beta), fitted to a
/// panel of limiting values.
class GMBoundaryPoint {
 public:
  GMBoundaryPoint() = default;
  GMBoundaryPoint(Foliation direction, double scale, std::vector<Slope> panel,
                  std::vector<double> panelValues, double residual);

  /// Fit from limit values on a panel containing (1,0) and (0,1).
  static GMBoundaryPoint fit(const std::vector<Slope>& panel, const std::vector<double>& values);

  const Foliation& direction() const { return direction_; }
  double scale() const { return scale_; }
  const std::vector<Slope>& panel() const { return panel_; }
  const std::vector<double>& panel_values() const { return values_; }
  /// Largest panel deviation between the limit values and the fitted form.
  double residual() const { return residual_; }

  double E(const Slope& beta) const;
  double E(Vec2 beta) const;
  /// Q(P) = sup_alpha E_P(alpha) / Ext_x(alpha)^{1/2}.
  double Q(const TorusPoint& x) const;
  /// Liu-Su horofunction log sup E_P / Ext_y^{1/2} minus the same at x0.
  double horofunction(const TorusPoint& y, const TorusPoint& x0) const;

 private:
  Foliation direction_;
  double scale_ = 1.0;
  std::vector<Slope> panel_;
  std::vector<double> values_;
  double residual_ = 0.0;
};

/// Default slope panel for boundary limits: all slopes of height <= 10.
const std::vector<Slope>& gm_panel();

/// Point at Teichmueller distance t from x0 on the ray toward the direction.
TorusPoint ray_point(const Foliation& direction, const TorusPoint& x0, double t);

GMBoundaryPoint gm_boundary_from_ray(const Foliation& targetDirection, const TorusPoint& x0);

}  // namespace teichlab
