#pragma once

#include <string>
#include <variant>
#include <vector>

#include "teichlab/curves.hpp"
#include "teichlab/fricke.hpp"
#include "teichlab/mapping_class.hpp"
#include "teichlab/torus.hpp"

namespace teichlab {

enum class Classification { Periodic, Reducible, Anosov };

std::string to_string(Classification c);

Classification classify(const MappingClass& m);
double dilatation(const MappingClass& m);

/// The action with length(M x, M alpha) = length(x, alpha).
TorusPoint act_on_point(const MappingClass& m, const TorusPoint& x);
FrickePoint act_on_point(const MappingClass& m, const FrickePoint& x);

using ModelPoint = std::variant<TorusPoint, FrickePoint>;

ModelPoint act_on_point(const MappingClass& m, const ModelPoint& x);

struct SpectralEntry {
  Slope alpha;
  std::vector<double> logLengths;  // log l_x(M^n alpha), n = 0..nMax
  std::vector<double> roots;       // l_x(M^n alpha)^{1/n}, n = 1..nMax
  std::vector<double> ratios;      // l(M^{n+1} alpha) / l(M^n alpha), n = 0..nMax-1
  double limit = 1.0;
  /// Largest spread of the successive ratios over the last quarter.
  double cauchySpread = 0.0;
};

/// Lengths of M^n alpha at x, kept in log scale. The limit is the geometric
/// mean of the successive ratios over the last quarter of the run.
SpectralEntry spectral_limit(const ModelPoint& x, const MappingClass& m, const Slope& alpha, int nMax);

struct SpectralReport {
  std::vector<SpectralEntry> perCurve;
  std::vector<double> spectrum;  // sorted distinct limits
  Classification classification = Classification::Periodic;
  double dilatation = 1.0;
  /// For Anosov classes: every limit within tolerance of the dilatation.
  bool agreesWithDilatation = true;
};

SpectralReport spectral_report(const ModelPoint& x, const MappingClass& m, const std::vector<Slope>& alphas,
                               int nMax, double tolerance = 1e-3);

}  // namespace teichlab
