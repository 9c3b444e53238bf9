#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "teichlab/torus.hpp"

namespace teichlab {

struct MobiusPrim {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;  // ad - bc > 0
};

/// tau -> s (tau + w), 0 < s <= 1, Im w >= 0.
struct ShrinkPrim {
  double s = 1.0;
  std::complex<double> w;
};

/// e^{i theta} z^k prod (z - a_j) / (1 - conj(a_j) z) on the disk, read on
/// the half-plane through z = (tau - i) / (tau + i).
struct BlaschkePrim {
  double theta = 0.0;
  int power = 0;
  std::vector<std::complex<double>> zeros;
};

using Primitive = std::variant<MobiusPrim, ShrinkPrim, BlaschkePrim>;

std::complex<double> apply(const Primitive& p, std::complex<double> tau);

/// Composition of primitives, applied left to right. Construction checks
/// nonexpansiveness for the Teichmueller distance on random pairs.
class SelfMap {
 public:
  explicit SelfMap(std::vector<Primitive> prims, std::uint64_t checkSeed = 0x5eed);

  static SelfMap parse(const std::string& text);

  TorusPoint operator()(const TorusPoint& x) const;
  const std::vector<Primitive>& primitives() const { return prims_; }
  /// Largest d(f x, f y) - d(x, y) seen by the construction check.
  double lipschitz_excess() const { return excess_; }

 private:
  std::vector<Primitive> prims_;
  double excess_ = 0.0;
};

/// Parse `prim ('|>' prim)*` with prim := ident '(' group (';' group)* ')'.
std::vector<Primitive> parse_selfmap(const std::string& text);

struct DriftReport {
  double value = 0.0;      // clamp(tailSlope, 0, fekete)
  double fekete = 0.0;     // min_n d_n / n
  double tailSlope = 0.0;  // (d_N - d_{N/2}) / (N - N/2)
  int n = 0;               // steps actually used
  std::vector<double> distances;  // d_n = d(f^n x0, x0), n = 0..N
};

DriftReport drift(const SelfMap& f, const TorusPoint& x0, int nMax);

struct SubsequenceStep {
  double eps = 0.0;
  std::int64_t n = 0;
  double b = 0.0;          // b_i(n_i)
  double priorMax = 0.0;   // max_{m < n_i} b_i(m)
  double panelChange = 0.0;  // max |E - E_prev| on the panel
};

struct BoundaryExtraction {
  GMBoundaryPoint point;
  std::vector<SubsequenceStep> subsequence;
  double drift = 0.0;
  bool recordsVerified = true;
};

constexpr std::int64_t kSubsequenceBudget = std::int64_t{1} << 24;

/// Boundary point from the record-time subsequence. epsSchedule empty means
/// eps_i = 2^-i.
BoundaryExtraction extract_boundary_point(const SelfMap& f, const TorusPoint& x0,
                                          std::vector<double> epsSchedule = {},
                                          std::int64_t budget = kSubsequenceBudget);

struct Thm4Beta {
  Slope beta;
  double EP = 0.0;
  double minLogMargin = 0.0;   // min_n log Ext - log bound
  bool lowerHolds = true;
  bool kerckhoffHolds = true;  // Ext_{f^n x0} <= e^{2 d_n} Ext_{x0}
  double rootAtN = 0.0;        // Ext^{1/n} at n = nMax
  double ratioLimit = 0.0;     // Ext_{n+1} / Ext_n at the end of the run
  double liminfRoot = 0.0;     // min of Ext^{1/n} over the second half
  bool positive = false;       // E_P(beta) > 1e-9
  bool converges = false;      // |ratioLimit - lambda| <= 1e-2 (positive betas)
};

struct Thm4Report {
  double lambda = 1.0;
  double infRatio = 0.0;  // inf_alpha Ext_{x0}^{1/2}(alpha) / E_P(alpha), height 200
  std::vector<Thm4Beta> betas;
  bool allHold = true;
};

Thm4Report verify_thm4(const SelfMap& f, const TorusPoint& x0, const GMBoundaryPoint& P, double l,
                       const std::vector<Slope>& betas, int nMax);

enum class OrbitClass { Bounded, Escaping, Inconclusive };
std::string to_string(OrbitClass c);

struct OrbitAnalysis {
  OrbitClass classification = OrbitClass::Inconclusive;
  double drift = 0.0;
  double lambdaExt = 1.0;
  std::optional<GMBoundaryPoint> boundary;
  double QP = 0.0;
  std::vector<SubsequenceStep> subsequence;
  std::int64_t steps = 0;
  double radius = 0.0;      // max d(x0, f^n x0) seen
  double lastDistance = 0.0;
  TorusPoint last;          // f^steps x0
  std::string diagnostics;
};

struct ClassifyOptions {
  int window = 100;
  std::int64_t budget = 100000;
  double escapeThreshold = 20.0;
  double boundedTolerance = 1e-6;
  int driftSteps = 400;
};

OrbitAnalysis classify_orbit(const SelfMap& f, const TorusPoint& x0, const ClassifyOptions& opts = {});

struct StepPoint {
  TorusPoint y;
  double hy = 0.0;
  double hfy = 0.0;
  double gain = 0.0;  // inf Ext_{f y}^{1/2} / E_P over inf Ext_y^{1/2} / E_P
  bool holds = true;  // h_P(f y) <= h_P(y) - l + 1e-6
};

struct StepReport {
  double l = 0.0;
  std::vector<StepPoint> points;
  bool allHold = true;
  double maxGapToExpL = 0.0;    // max |gain - e^l|
  double maxGapToExp2L = 0.0;   // max |gain - e^{2l}|
  bool gainAtLeastExpL = true;
  bool gainAtLeastExp2L = true;
  std::string supported;  // "e^l" or "e^{2l}"
};

StepReport verify_step_inequality(const SelfMap& f, const TorusPoint& x0, const GMBoundaryPoint& P, double l,
                                  const std::vector<TorusPoint>& testPoints);

}  // namespace teichlab
