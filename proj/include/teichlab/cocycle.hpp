#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "teichlab/big_matrix.hpp"
#include "teichlab/curves.hpp"
#include "teichlab/mcg.hpp"

namespace teichlab {

enum class Model { Torus, Fricke };

std::string to_string(Model m);
Model parse_model(const std::string& s);

struct IidSource {
  std::vector<MappingClass> generators;
  std::vector<double> weights;
};

struct MarkovSource {
  std::vector<std::vector<double>> transition;  // row-stochastic
  std::vector<MappingClass> generators;         // one per state
};

/// Coding of the rotation w -> w + angle (mod 1) by a partition of [0,1).
struct RotationSource {
  double angle = 0.0;
  std::vector<double> breakpoints;        // strictly increasing, inside (0,1)
  std::vector<MappingClass> generators;   // breakpoints.size() + 1 cells
};

/// Golden rotation angle, the default for rotation coding.
double golden_angle();

struct CocycleSpec {
  std::variant<IidSource, MarkovSource, RotationSource> source;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Product e^{logScale} * U. The exact integer product is always kept: in 64
/// bits while it fits, as a big integer matrix beyond that. U and the scale
/// are rounded from it, so cancellations (A^k A^{-1} ...) stay exact.
class ScaledMatrix {
 public:
  ScaledMatrix() = default;
  explicit ScaledMatrix(const MappingClass& m);

  ScaledMatrix operator*(const MappingClass& g) const;

  bool exact() const { return exact_.has_value(); }
  const std::optional<MappingClass>& exact_value() const { return exact_; }
  /// Normalised matrix U, max |entry| = 1 once inexact.
  const Mat2& unit() const { return u_; }
  double log_scale() const { return s_; }

  /// log of the top singular value of the full matrix.
  double log_sigma1() const;

 private:
  std::optional<MappingClass> exact_ = MappingClass::identity();
  std::optional<BigMatrix> big_;  // set when exact_ is not
  Mat2 u_{};
  double s_ = 0.0;
};

/// L(x0, Z x0) for the torus model, exact through the scaled representation.
double torus_orbit_metric(const TorusPoint& x0, const ScaledMatrix& z);
/// L(Z x0, x0) for the torus model, computed as L(x0, Z^{-1} x0).
double torus_orbit_metric_backward(const TorusPoint& x0, const ScaledMatrix& z);
/// Z x0 when it is representable in double precision.
std::optional<TorusPoint> torus_orbit_point(const TorusPoint& x0, const ScaledMatrix& z);

/// Slopes used to truncate sups on the Fricke model along cocycle orbits.
const std::vector<Slope>& fricke_orbit_panel();

struct SampleOptions {
  /// Fill forward/backward metric values every `stride` steps (others NaN).
  int stride = 1;
  bool keepExact = false;  // keep exact big-integer products (Fricke needs them)
};

struct TrajectoryRecord {
  Model model = Model::Torus;
  ModelPoint x0;
  std::vector<MappingClass> increments;          // g_1 .. g_n
  std::vector<ScaledMatrix> products;            // Z_1 .. Z_n, Z_n = Z_{n-1} g_n
  std::vector<BigMatrix> exactProducts;          // filled when requested
  std::vector<std::optional<TorusPoint>> orbit;  // Z_n x0 on the torus model
  std::vector<double> forward;                   // L(x0, Z_n x0)
  std::vector<double> backward;                  // L(Z_n x0, x0)

  std::size_t length() const { return increments.size(); }
};

std::vector<MappingClass> sample_increments(const CocycleSpec& spec, int n, std::uint64_t trajectoryIndex);

TrajectoryRecord sample_trajectory(const CocycleSpec& spec, int n, const ModelPoint& x0,
                                   std::uint64_t trajectoryIndex = 0, const SampleOptions& opts = {});

/// L(x0, W x0) for an arbitrary product of increments on either model.
double orbit_metric(const ModelPoint& x0, const std::vector<MappingClass>& word);

struct DriftEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  int n = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  /// Largest violation of per-trajectory subadditivity seen (<= 0 means none).
  double subadditivityExcess = 0.0;
  std::vector<double> perTrial;
};

DriftEstimate drift_estimate(const CocycleSpec& spec, const ModelPoint& x0, int n, int trials, int threads = 1);

/// Largest L(x0, Z_{n+m} x0) - L(x0, Z_n x0) - L(x0, W x0) over a grid of
/// (n, m), W the shifted block g_{n+1} .. g_{n+m}.
double subadditivity_excess(const TrajectoryRecord& traj, int gridStep);

struct FoliationEstimate {
  Foliation mu;
  double logGap = 0.0;     // log(sigma1 / sigma2) of f_n
  double stability = 0.0;  // angle between the estimates at n and n - 1
};

/// Contracted direction of f_n = Z_n^{-1}: the foliation whose intersection
/// with alpha is proportional to the component of alpha along the top
/// right-singular vector of f_n.
FoliationEstimate estimate_stable_foliation(const TrajectoryRecord& traj);

struct SandwichViolation {
  int n = 0;
  Slope alpha;
  bool lower = false;  // true: lower bound failed; false: upper bound failed
};

struct SandwichReport {
  int N = 0;  // last violating n (0 when none)
  int cap = 0;
  bool withinCap = true;
  bool degenerate = false;  // lambda - eps <= 1: lower bound vacuous
  double logC = 0.0;        // log C(mu, x)
  int lowerViolations = 0;
  int upperViolations = 0;
  std::vector<SandwichViolation> violations;  // those with n > cap
};

SandwichReport sandwich_verify(const TrajectoryRecord& traj, const Foliation& mu, double lambda, double eps,
                               const std::vector<Slope>& alphas, const ModelPoint& x);

/// log C(mu, x)^{-1} = log sup_beta i(mu, beta) / l_x(beta), enumerated.
double log_inverse_c(const Foliation& mu, const ModelPoint& x, int maxHeight = 200);

/// The first `count` slopes in enumeration order with i(mu, alpha) > minI.
std::vector<Slope> sandwich_panel(const Foliation& mu, int count, double minI);

/// Horofunction descriptor: interior point z or boundary direction mu (a
/// measured representative; the value does not depend on its scale).
struct Horofunction {
  std::variant<ModelPoint, Vec2> tag;
  static Horofunction interior(ModelPoint z) { return {std::move(z)}; }
  static Horofunction boundary(Vec2 mu) { return {mu}; }
};

constexpr int kFrickeHoroHeight = 40;

double evaluate(const Horofunction& h, const ModelPoint& x, const ModelPoint& x0);
/// (g.h)(x) = h(g^{-1} x) - h(g^{-1} x0): h_z -> h_{gz}, h_mu -> h_{g mu}.
Horofunction act(const MappingClass& g, const Horofunction& h);

double F_cocycle(const MappingClass& g, const Horofunction& h, const ModelPoint& x0);

struct HoroDrift {
  std::vector<int> n;
  std::vector<double> values;  // -(1/n) h_mu(Z_n x0)
  double tail = 0.0;           // Cesaro mean over the second half
  int resolvableUpTo = 0;
};

/// Largest L(x0, Z_n x0) at which h_mu(Z_n x0) is still resolved in double
/// precision (the contracted component of mu falls below rounding beyond it).
constexpr double kHoroResolvableMetric = 13.8;

HoroDrift horo_drift_verify(const TrajectoryRecord& traj, const Foliation& mu, const ModelPoint& x0);

}  // namespace teichlab
