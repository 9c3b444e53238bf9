#include "teichlab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <thread>

#include "teichlab/error.hpp"
#include "teichlab/rng.hpp"

namespace teichlab {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::int64_t kExactLimit = std::int64_t{1} << 62;

bool fits(__int128 v) { return v <= kExactLimit && v >= -kExactLimit; }

const TorusPoint& torus(const ModelPoint& x) {
  if (const auto* p = std::get_if<TorusPoint>(&x)) return *p;
  throw InvalidArgument("expected a torus-model point");
}

const FrickePoint& fricke(const ModelPoint& x) {
  if (const auto* p = std::get_if<FrickePoint>(&x)) return *p;
  throw InvalidArgument("expected a Fricke-model point");
}

void check_distribution(const std::vector<double>& w, const char* what) {
  if (w.empty()) throw InvalidArgument(std::string(what) + " is empty");
  double s = 0.0;
  for (double v : w) {
    if (!(v >= 0.0)) throw InvalidArgument(std::string(what) + " has a negative entry");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-12) throw InvalidArgument(std::string(what) + " does not sum to 1");
}

std::size_t draw(const std::vector<double>& w, double u) {
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    acc += w[k];
    if (u < acc) return k;
  }
  return w.size() - 1;
}

std::vector<double> stationary(const std::vector<std::vector<double>>& p) {
  // Power iteration on the lazy chain (I + P) / 2, which is aperiodic and
  // shares P's stationary distribution.
  const std::size_t k = p.size();
  std::vector<double> pi(k, 1.0 / static_cast<double>(k)), next(k);
  for (int it = 0; it < 100000; ++it) {
    for (std::size_t j = 0; j < k; ++j) next[j] = 0.5 * pi[j];
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) next[j] += 0.5 * pi[i] * p[i][j];
    }
    double diff = 0.0;
    for (std::size_t j = 0; j < k; ++j) diff = std::max(diff, std::abs(next[j] - pi[j]));
    pi.swap(next);
    if (diff < 1e-15) break;
  }
  const double s = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& v : pi) v /= s;
  return pi;
}

}  // namespace

std::string to_string(Model m) { return m == Model::Torus ? "torus" : "fricke"; }

Model parse_model(const std::string& s) {
  if (s == "torus") return Model::Torus;
  if (s == "fricke") return Model::Fricke;
  throw InvalidArgument("unknown model '" + s + "' (expected torus or fricke)");
}

double golden_angle() { return 0.5 * (std::sqrt(5.0) - 1.0); }

void CocycleSpec::validate() const {
  std::visit(
      [](const auto& src) {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, IidSource>) {
          if (src.generators.size() != src.weights.size()) {
            throw InvalidArgument("iid source needs one weight per generator");
          }
          check_distribution(src.weights, "iid weights");
        } else if constexpr (std::is_same_v<T, MarkovSource>) {
          if (src.transition.size() != src.generators.size() || src.generators.empty()) {
            throw InvalidArgument("markov source needs one generator per state");
          }
          for (const auto& row : src.transition) {
            if (row.size() != src.generators.size()) throw InvalidArgument("transition matrix is not square");
            check_distribution(row, "transition row");
          }
        } else {
          if (!(src.angle > 0.0 && src.angle < 1.0)) throw InvalidArgument("rotation angle must lie in (0,1)");
          if (src.generators.size() != src.breakpoints.size() + 1) {
            throw InvalidArgument("rotation coding needs one generator per cell");
          }
          double prev = 0.0;
          for (double b : src.breakpoints) {
            if (!(b > prev && b < 1.0)) throw InvalidArgument("breakpoints must increase inside (0,1)");
            prev = b;
          }
        }
      },
      source);
}

ScaledMatrix::ScaledMatrix(const MappingClass& m) : exact_(m), u_(m.to_mat2()) {}

namespace {

// x / 2^shift rounded to double; shift chosen by the caller so the result fits.
double scaled_to_double(const BigInt& x, unsigned shift) {
  const BigInt mag = x < 0 ? BigInt(-x) : x;
  const double v = static_cast<double>(BigInt(mag >> shift));
  return x < 0 ? -v : v;
}

unsigned bit_length(const BigInt& x) {
  return x == 0 ? 0u : static_cast<unsigned>(boost::multiprecision::msb(x < 0 ? BigInt(-x) : x)) + 1u;
}

}  // namespace

ScaledMatrix ScaledMatrix::operator*(const MappingClass& g) const {
  ScaledMatrix out;
  if (exact_) {
    const MappingClass& z = *exact_;
    const __int128 a = static_cast<__int128>(z.a()) * g.a() + static_cast<__int128>(z.b()) * g.c();
    const __int128 b = static_cast<__int128>(z.a()) * g.b() + static_cast<__int128>(z.b()) * g.d();
    const __int128 c = static_cast<__int128>(z.c()) * g.a() + static_cast<__int128>(z.d()) * g.c();
    const __int128 d = static_cast<__int128>(z.c()) * g.b() + static_cast<__int128>(z.d()) * g.d();
    if (fits(a) && fits(b) && fits(c) && fits(d)) {
      out.exact_ = MappingClass(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b),
                                static_cast<std::int64_t>(c), static_cast<std::int64_t>(d));
      out.u_ = out.exact_->to_mat2();
      out.s_ = 0.0;
      return out;
    }
    out.big_ = BigMatrix(z) * BigMatrix(g);
  } else {
    out.big_ = *big_ * BigMatrix(g);
  }
  out.exact_.reset();
  const BigMatrix& m = *out.big_;
  const unsigned bits = std::max({bit_length(m.a()), bit_length(m.b()), bit_length(m.c()), bit_length(m.d())});
  if (bits <= 62) {
    out.exact_ = MappingClass(static_cast<std::int64_t>(m.a()), static_cast<std::int64_t>(m.b()),
                              static_cast<std::int64_t>(m.c()), static_cast<std::int64_t>(m.d()));
    out.big_.reset();
    out.u_ = out.exact_->to_mat2();
    out.s_ = 0.0;
    return out;
  }
  const unsigned shift = bits - 62;
  out.u_ = {scaled_to_double(m.a(), shift), scaled_to_double(m.b(), shift), scaled_to_double(m.c(), shift),
            scaled_to_double(m.d(), shift)};
  const double top = out.u_.max_abs();
  out.u_ = {out.u_.a / top, out.u_.b / top, out.u_.c / top, out.u_.d / top};
  out.s_ = std::log(top) + shift * std::numbers::ln2;
  return out;
}

double ScaledMatrix::log_sigma1() const { return s_ + std::log(svd2(u_).sigma1); }

double torus_orbit_metric(const TorusPoint& x0, const ScaledMatrix& z) {
  if (z.exact()) return thurston_metric_exact(x0, act_on_point(*z.exact_value(), x0));
  const SymForm q0 = length_form(x0);
  return z.log_scale() + 0.5 * std::log(max_generalized_eigenvalue(q0.pullback(z.unit().adj()), q0));
}

double torus_orbit_metric_backward(const TorusPoint& x0, const ScaledMatrix& z) {
  if (z.exact()) return thurston_metric_exact(x0, act_on_point(z.exact_value()->inverse(), x0));
  const SymForm q0 = length_form(x0);
  return z.log_scale() + 0.5 * std::log(max_generalized_eigenvalue(q0.pullback(z.unit()), q0));
}

std::optional<TorusPoint> torus_orbit_point(const TorusPoint& x0, const ScaledMatrix& z) {
  if (z.exact()) {
    const TorusPoint p = act_on_point(*z.exact_value(), x0);
    return p.im() > 0.0 ? std::optional<TorusPoint>(p) : std::nullopt;
  }
  const Mat2& u = z.unit();
  const std::complex<double> tau = x0.tau();
  const std::complex<double> den = -u.c * tau + u.d;
  const std::complex<double> num = u.a * tau - u.b;
  const double n2 = std::norm(den);
  const double re = (num * std::conj(den)).real() / n2;
  const double im = x0.im() * std::exp(-2.0 * z.log_scale()) / n2;
  if (!(im > 0.0) || !std::isfinite(im) || !std::isfinite(re)) return std::nullopt;
  return TorusPoint(re, im);
}

const std::vector<Slope>& fricke_orbit_panel() {
  static const std::vector<Slope> panel = farey_enumerate(16);
  return panel;
}

std::vector<MappingClass> sample_increments(const CocycleSpec& spec, int n, std::uint64_t trajectoryIndex) {
  spec.validate();
  if (n < 1) throw InvalidArgument("trajectory length must be at least 1");
  Rng rng(stream_seed(spec.seed, trajectoryIndex));
  std::vector<MappingClass> out;
  out.reserve(static_cast<std::size_t>(n));
  std::visit(
      [&](const auto& src) {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, IidSource>) {
          for (int k = 0; k < n; ++k) out.push_back(src.generators[draw(src.weights, rng.uniform())]);
        } else if constexpr (std::is_same_v<T, MarkovSource>) {
          std::size_t state = draw(stationary(src.transition), rng.uniform());
          for (int k = 0; k < n; ++k) {
            out.push_back(src.generators[state]);
            state = draw(src.transition[state], rng.uniform());
          }
        } else {
          double w = rng.uniform();
          for (int k = 0; k < n; ++k) {
            const auto cell = std::upper_bound(src.breakpoints.begin(), src.breakpoints.end(), w) -
                              src.breakpoints.begin();
            out.push_back(src.generators[static_cast<std::size_t>(cell)]);
            w += src.angle;
            w -= std::floor(w);
          }
        }
      },
      spec.source);
  return out;
}

TrajectoryRecord sample_trajectory(const CocycleSpec& spec, int n, const ModelPoint& x0,
                                   std::uint64_t trajectoryIndex, const SampleOptions& opts) {
  TrajectoryRecord r;
  r.model = std::holds_alternative<TorusPoint>(x0) ? Model::Torus : Model::Fricke;
  r.x0 = x0;
  r.increments = sample_increments(spec, n, trajectoryIndex);
  const int stride = std::max(1, opts.stride);
  const bool keepExact = opts.keepExact || r.model == Model::Fricke;
  ScaledMatrix z;
  BigMatrix big;
  for (int k = 1; k <= n; ++k) {
    const MappingClass& g = r.increments[static_cast<std::size_t>(k - 1)];
    z = z * g;
    r.products.push_back(z);
    if (keepExact) {
      big = big * BigMatrix(g);
      r.exactProducts.push_back(big);
    }
    const bool fill = k % stride == 0 || k == n;
    if (r.model == Model::Torus) {
      const TorusPoint& p = std::get<TorusPoint>(x0);
      r.orbit.push_back(torus_orbit_point(p, z));
      r.forward.push_back(torus_orbit_metric(p, z));
      r.backward.push_back(torus_orbit_metric_backward(p, z));
    } else if (fill) {
      const FrickePoint& p = std::get<FrickePoint>(x0);
      r.forward.push_back(orbit_metric(p, big, fricke_orbit_panel()));
      r.backward.push_back(orbit_metric(p, big.inverse(), fricke_orbit_panel()));
    } else {
      r.forward.push_back(kNaN);
      r.backward.push_back(kNaN);
    }
  }
  return r;
}

double orbit_metric(const ModelPoint& x0, const std::vector<MappingClass>& word) {
  if (const auto* t = std::get_if<TorusPoint>(&x0)) {
    ScaledMatrix z;
    for (const auto& g : word) z = z * g;
    return torus_orbit_metric(*t, z);
  }
  BigMatrix z;
  for (const auto& g : word) z = z * BigMatrix(g);
  return orbit_metric(std::get<FrickePoint>(x0), z, fricke_orbit_panel());
}

double subadditivity_excess(const TrajectoryRecord& traj, int gridStep) {
  const int n = static_cast<int>(traj.length());
  gridStep = std::max(1, gridStep);
  double worst = -std::numeric_limits<double>::infinity();
  const auto* torusX0 = std::get_if<TorusPoint>(&traj.x0);
  for (int a = gridStep; a < n; a += gridStep) {
    const double la = traj.forward[static_cast<std::size_t>(a - 1)];
    if (std::isnan(la)) continue;
    // Block products W = g_{a+1} .. g_{a+m}, extended one step at a time.
    ScaledMatrix w;
    BigMatrix wb;
    for (int m = 1; a + m <= n; ++m) {
      const MappingClass& g = traj.increments[static_cast<std::size_t>(a + m - 1)];
      if (torusX0) {
        w = w * g;
      } else {
        wb = wb * BigMatrix(g);
      }
      if (m % gridStep != 0) continue;
      const double lhs = traj.forward[static_cast<std::size_t>(a + m - 1)];
      if (std::isnan(lhs)) continue;
      const double lw = torusX0 ? torus_orbit_metric(*torusX0, w)
                                : orbit_metric(std::get<FrickePoint>(traj.x0), wb, fricke_orbit_panel());
      worst = std::max(worst, lhs - la - lw);
    }
  }
  return worst;
}

DriftEstimate drift_estimate(const CocycleSpec& spec, const ModelPoint& x0, int n, int trials, int threads) {
  if (n < 1 || trials < 1) throw InvalidArgument("n and trials must be at least 1");
  spec.validate();
  DriftEstimate est;
  est.n = n;
  est.trials = trials;
  est.seed = spec.seed;
  est.perTrial.assign(static_cast<std::size_t>(trials), 0.0);
  std::vector<double> excess(static_cast<std::size_t>(trials), 0.0);
  const bool isTorus = std::holds_alternative<TorusPoint>(x0);
  const int grid = std::max(1, n / (isTorus ? 20 : 4));
  SampleOptions opts;
  opts.stride = isTorus ? 1 : grid;
  auto work = [&](int begin, int end) {
    for (int t = begin; t < end; ++t) {
      const TrajectoryRecord r = sample_trajectory(spec, n, x0, static_cast<std::uint64_t>(t), opts);
      est.perTrial[static_cast<std::size_t>(t)] = r.forward.back() / n;
      excess[static_cast<std::size_t>(t)] = subadditivity_excess(r, grid);
    }
  };
  threads = std::clamp(threads, 1, trials);
  if (threads == 1) {
    work(0, trials);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back(work, trials * w / threads, trials * (w + 1) / threads);
    }
  }
  // Fixed-order Welford reduction.
  double mean = 0.0, m2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double v = est.perTrial[static_cast<std::size_t>(t)];
    const double delta = v - mean;
    mean += delta / (t + 1);
    m2 += delta * (v - mean);
  }
  est.value = mean;
  est.stderr_ = trials > 1 ? std::sqrt(m2 / (trials - 1) / trials) : 0.0;
  est.subadditivityExcess = *std::max_element(excess.begin(), excess.end());
  return est;
}

namespace {

Foliation contracted_direction(const Mat2& f) {
  const Vec2 v = svd2(f).right1;
  return {v.y, -v.x};
}

}  // namespace

FoliationEstimate estimate_stable_foliation(const TrajectoryRecord& traj) {
  const std::size_t n = traj.length();
  if (n < 2) throw InsufficientGap("trajectory too short to estimate a foliation", 0.0);
  const ScaledMatrix& z = traj.products[n - 1];
  FoliationEstimate e;
  // det Z = 1, so sigma1 / sigma2 = sigma1^2.
  e.logGap = 2.0 * z.log_sigma1();
  if (!(e.logGap > std::log(10.0))) {
    throw InsufficientGap("singular gap of f_n is below 10", std::exp(e.logGap));
  }
  e.mu = contracted_direction(z.unit().adj());
  const Foliation prev = contracted_direction(traj.products[n - 2].unit().adj());
  e.stability = projective_angle(e.mu.vec(), prev.vec());
  if (!(e.stability <= 1e-6)) {
    throw InsufficientGap("foliation estimate has not stabilised (angle " + std::to_string(e.stability) + ")",
                          std::exp(e.logGap));
  }
  return e;
}

double log_inverse_c(const Foliation& mu, const ModelPoint& x, int maxHeight) {
  double best = -std::numeric_limits<double>::infinity();
  if (const auto* t = std::get_if<TorusPoint>(&x)) {
    for (const Slope& s : farey_enumerate(maxHeight)) {
      const double i = intersection(mu, s);
      if (i > 0.0) best = std::max(best, std::log(i) - std::log(length(*t, s)));
    }
    return best;
  }
  for (const auto& [s, tr] : trace_table(std::get<FrickePoint>(x), maxHeight)) {
    const double i = intersection(mu, s);
    if (i > 0.0) best = std::max(best, std::log(i) - log_hyp_length(tr));
  }
  return best;
}

std::vector<Slope> sandwich_panel(const Foliation& mu, int count, double minI) {
  std::vector<Slope> out;
  for (int h = 8;; h *= 2) {
    out.clear();
    for (const Slope& s : farey_enumerate(h)) {
      if (intersection(mu, s) > minI) out.push_back(s);
      if (static_cast<int>(out.size()) == count) return out;
    }
    if (h > 4096) throw InvalidArgument("could not fill the sandwich panel");
  }
}

SandwichReport sandwich_verify(const TrajectoryRecord& traj, const Foliation& mu, double lambda, double eps,
                               const std::vector<Slope>& alphas, const ModelPoint& x) {
  if (!(lambda >= 1.0) || !(eps > 0.0)) throw InvalidArgument("sandwich needs lambda >= 1 and eps > 0");
  SandwichReport rep;
  const int n = static_cast<int>(traj.length());
  rep.cap = n / 2;
  rep.logC = -log_inverse_c(mu, x);
  rep.degenerate = lambda - eps <= 1.0;
  const double logLo = lambda - eps > 0.0 ? std::log(lambda - eps) : -std::numeric_limits<double>::infinity();
  const double logHi = std::log(lambda + eps);
  const bool isTorus = std::holds_alternative<TorusPoint>(x);
  if (!isTorus && traj.exactProducts.size() != traj.length()) {
    throw InvalidArgument("Fricke sandwich needs exact products");
  }
  std::vector<double> base, logI;
  for (const Slope& a : alphas) {
    base.push_back(isTorus ? std::log(length(torus(x), a)) : log_hyp_length(fricke(x), a));
    const double i = intersection(mu, a);
    logI.push_back(i > 0.0 ? std::log(i) : -std::numeric_limits<double>::infinity());
  }
  constexpr double kSlack = 1e-12;
  for (int k = 1; k <= n; ++k) {
    const ScaledMatrix& z = traj.products[static_cast<std::size_t>(k - 1)];
    const Mat2 f = z.unit().adj();
    BigMatrix fb;
    if (!isTorus) fb = traj.exactProducts[static_cast<std::size_t>(k - 1)].inverse();
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      // l_x(f_n alpha) = l_{Z_n x}(alpha)
      const double logL = isTorus ? z.log_scale() + std::log(length(torus(x), f * alphas[j].vec()))
                                  : log_hyp_length(fricke(x), fb.apply(alphas[j]));
      const double lower = rep.logC + logI[j] + k * logLo;
      const double upper = base[j] + k * logHi;
      const bool lowerFails = lower > logL + kSlack * std::max(1.0, std::abs(logL));
      const bool upperFails = logL > upper + kSlack * std::max(1.0, std::abs(upper));
      if (lowerFails) ++rep.lowerViolations;
      if (upperFails) ++rep.upperViolations;
      if (lowerFails || upperFails) {
        rep.N = k;
        if (k > rep.cap) {
          if (lowerFails) rep.violations.push_back({k, alphas[j], true});
          if (upperFails) rep.violations.push_back({k, alphas[j], false});
        }
      }
    }
  }
  rep.withinCap = rep.N <= rep.cap;
  return rep;
}

double evaluate(const Horofunction& h, const ModelPoint& x, const ModelPoint& x0) {
  if (x.index() != x0.index()) throw InvalidArgument("points belong to different models");
  if (const auto* z = std::get_if<ModelPoint>(&h.tag)) {
    if (z->index() != x.index()) throw InvalidArgument("horofunction and point belong to different models");
    if (const auto* tz = std::get_if<TorusPoint>(z)) {
      return horofunction_interior(*tz, torus(x), torus(x0));
    }
    const FrickePoint& fz = std::get<FrickePoint>(*z);
    return thurston_metric_enumerated(fricke(x), fz, kFrickeHoroHeight).value -
           thurston_metric_enumerated(fricke(x0), fz, kFrickeHoroHeight).value;
  }
  const Vec2 mu = std::get<Vec2>(h.tag);
  if (const auto* tx = std::get_if<TorusPoint>(&x)) {
    return std::log(length(*tx, mu)) - std::log(length(torus(x0), mu));
  }
  return horofunction_estimate(Foliation(mu.x, mu.y), fricke(x), fricke(x0), kFrickeHoroHeight).value;
}

Horofunction act(const MappingClass& g, const Horofunction& h) {
  if (const auto* z = std::get_if<ModelPoint>(&h.tag)) return Horofunction::interior(act_on_point(g, *z));
  const Vec2 v = g.to_mat2() * std::get<Vec2>(h.tag);
  const double s = norm(v);
  return Horofunction::boundary({v.x / s, v.y / s});
}

double F_cocycle(const MappingClass& g, const Horofunction& h, const ModelPoint& x0) {
  return -evaluate(h, act_on_point(g.inverse(), x0), x0);
}

HoroDrift horo_drift_verify(const TrajectoryRecord& traj, const Foliation& mu, const ModelPoint& x0) {
  HoroDrift out;
  const bool isTorus = std::holds_alternative<TorusPoint>(x0);
  std::vector<std::pair<Slope, LogTrace>> table;
  auto logSup = [&](Vec2 nu) {
    // log sup_beta i(nu, beta) / l_{x0}(beta)
    if (isTorus) return std::log(length(torus(x0), nu));
    if (table.empty()) table = trace_table(fricke(x0), kFrickeHoroHeight);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [s, tr] : table) {
      const double i = intersection(nu, s.vec());
      if (i > 0.0) best = std::max(best, std::log(i) - log_hyp_length(tr));
    }
    return best;
  };
  const double base = logSup(mu.vec());
  for (std::size_t k = 1; k <= traj.length(); ++k) {
    const double Lk = traj.forward[k - 1];
    if (std::isnan(Lk)) continue;
    if (Lk > kHoroResolvableMetric) break;
    const ScaledMatrix& z = traj.products[k - 1];
    // h_mu(Z x0) = log sup i(Z^{-1} mu, beta) / l_{x0}(beta) - (same for mu)
    Vec2 nu = z.unit().adj() * mu.vec();
    const double s = norm(nu);
    nu = {nu.x / s, nu.y / s};
    const double h = z.log_scale() + std::log(s) + logSup(nu) - base;
    out.n.push_back(static_cast<int>(k));
    out.values.push_back(-h / static_cast<double>(k));
    out.resolvableUpTo = static_cast<int>(k);
  }
  if (!out.values.empty()) {
    const std::size_t start = out.values.size() / 2;
    double s = 0.0;
    for (std::size_t k = start; k < out.values.size(); ++k) s += out.values[k];
    out.tail = s / static_cast<double>(out.values.size() - start);
  }
  return out;
}

}  // namespace teichlab
