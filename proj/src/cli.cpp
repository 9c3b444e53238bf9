#include "teichlab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "teichlab/cocycle.hpp"
#include "teichlab/error.hpp"
#include "teichlab/holo.hpp"
#include "teichlab/mcg.hpp"
#include "teichlab/rng.hpp"

namespace teichlab::cli {

using Json = nlohmann::ordered_json;

namespace {

struct Param {
  std::string name;
  std::string fallback;
  std::string help;
};

const std::vector<Param> kGlobal = {
    {"model", "torus", "model surface: torus | fricke"},
    {"seed", "0", "64-bit seed"},
    {"format", "json", "output format: csv | json"},
};

const std::map<std::string, std::vector<Param>> kCommands = {
    {"spectral",
     {{"matrix", "2,1,1,1", "mapping class a,b,c,d"},
      {"alpha", "0,1", "slope panel p,q;p,q;..."},
      {"n", "40", "nMax"},
      {"x", "", "basepoint (torus re,im; fricke tx,ty,tz)"},
      {"tol", "1e-3", "agreement tolerance"}}},
    {"walk",
     {{"source", "iid", "iid | markov | rotation"},
      {"generators", "1,2,0,1;1,0,2,1", "generators a,b,c,d;..."},
      {"weights", "", "iid weights (default uniform)"},
      {"transition", "", "markov rows r0;r1;... (comma separated entries)"},
      {"angle", "", "rotation angle (default golden)"},
      {"breakpoints", "", "rotation partition breakpoints"},
      {"n", "400", "trajectory length"},
      {"trials", "500", "Monte Carlo trials"},
      {"eps", "0.05", "sandwich epsilon"},
      {"x", "", "basepoint"},
      {"panel", "50", "sandwich panel size"},
      {"min-intersection", "0.1", "panel slopes need i(mu, alpha) above this"}}},
    {"dist",
     {{"x", "", "first point"}, {"y", "", "second point"}, {"height", "200", "enumeration height"}}},
    {"horo",
     {{"mu", "1,0", "foliation a,b"},
      {"x", "", "point"},
      {"x0", "", "basepoint"},
      {"height", "200", "enumeration height"}}},
    {"holo",
     {{"map", "mobius(2,0,0,1)", "self-map expression"},
      {"x0", "0,1", "basepoint re,im"},
      {"n", "400", "drift steps"},
      {"budget", "100000", "classification budget"},
      {"window", "100", "bounded-detection window"},
      {"betas", "0,1;1,0", "slopes for the growth bound"},
      {"thm4-n", "40", "steps for the growth bound"}}},
    {"selftest", {}},
};

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("parameter '" + key + "': '" + s + "' is not a number");
  }
  if (used != s.size() || !std::isfinite(v)) throw UsageError("parameter '" + key + "': '" + s + "' is not a number");
  return v;
}

std::int64_t to_int(const std::string& key, const std::string& s) {
  const double v = to_double(key, s);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) throw UsageError("parameter '" + key + "' must be an integer");
  return static_cast<std::int64_t>(v);
}

std::vector<double> to_doubles(const std::string& key, const std::string& s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (const auto& t : split(s, ',')) out.push_back(to_double(key, t));
  return out;
}

class Params {
 public:
  std::map<std::string, std::string> values;

  const std::string& str(const std::string& k) const { return values.at(k); }
  double num(const std::string& k) const { return to_double(k, str(k)); }
  std::int64_t integer(const std::string& k) const { return to_int(k, str(k)); }
  int positive(const std::string& k) const {
    const std::int64_t v = integer(k);
    if (v < 1 || v > 100000000) throw UsageError("parameter '" + k + "' must be a positive integer");
    return static_cast<int>(v);
  }
};

MappingClass parse_matrix(const std::string& key, const std::string& s) {
  const auto v = to_doubles(key, s);
  if (v.size() != 4) throw UsageError("parameter '" + key + "' needs four entries a,b,c,d");
  std::int64_t e[4];
  for (int i = 0; i < 4; ++i) e[i] = to_int(key, split(s, ',')[static_cast<std::size_t>(i)]);
  return {e[0], e[1], e[2], e[3]};
}

std::vector<MappingClass> parse_matrices(const std::string& key, const std::string& s) {
  std::vector<MappingClass> out;
  for (const auto& part : split(s, ';')) out.push_back(parse_matrix(key, part));
  return out;
}

std::vector<Slope> parse_slopes(const std::string& key, const std::string& s) {
  std::vector<Slope> out;
  for (const auto& part : split(s, ';')) {
    const auto v = split(part, ',');
    if (v.size() != 2) throw UsageError("parameter '" + key + "' needs slopes p,q");
    out.push_back(canonicalize_slope(to_int(key, v[0]), to_int(key, v[1])));
  }
  if (out.empty()) throw UsageError("parameter '" + key + "' is empty");
  return out;
}

ModelPoint parse_point(Model model, const std::string& key, const std::string& s) {
  if (model == Model::Torus) {
    const auto v = to_doubles(key, s.empty() ? "0,1" : s);
    if (v.size() != 2) throw UsageError("parameter '" + key + "' needs re,im");
    return TorusPoint(v[0], v[1]);
  }
  const auto v = to_doubles(key, s.empty() ? "3,3,3" : s);
  if (v.size() == 2) return FrickePoint::from_pair(v[0], v[1]);
  if (v.size() != 3) throw UsageError("parameter '" + key + "' needs tx,ty,tz");
  return FrickePoint(v[0], v[1], v[2]);
}

Json point_json(const ModelPoint& p) {
  if (const auto* t = std::get_if<TorusPoint>(&p)) return Json{{"re", t->re()}, {"im", t->im()}};
  const auto& f = std::get<FrickePoint>(p);
  return Json{{"logTx", f.tx().log()}, {"logTy", f.ty().log()}, {"logTz", f.tz().log()},
              {"markovResidual", f.markov_residual()}};
}

Json slope_json(const Slope& s) { return Json::array({s.p, s.q}); }

struct Report {
  std::string status = "ok";
  Json payload = Json::object();
  Json diagnostics = Json::array();
  std::vector<std::string> csvHeader;
  std::vector<std::vector<std::string>> csvRows;
  int code = kOk;
};

// ---------------------------------------------------------------- spectral

Report cmd_spectral(Model model, const Params& p) {
  const MappingClass m = parse_matrix("matrix", p.str("matrix"));
  const auto alphas = parse_slopes("alpha", p.str("alpha"));
  const int n = p.positive("n");
  if (n < 2) throw UsageError("parameter 'n' must be at least 2");
  const ModelPoint x = parse_point(model, "x", p.str("x"));
  const double tol = p.num("tol");
  const SpectralReport rep = spectral_report(x, m, alphas, n, tol);

  Report r;
  r.csvHeader = {"n", "alpha_p", "alpha_q", "length", "nth_root", "ratio"};
  Json per = Json::array();
  for (const auto& e : rep.perCurve) {
    for (int k = 0; k <= n; ++k) {
      r.csvRows.push_back({std::to_string(k), std::to_string(e.alpha.p), std::to_string(e.alpha.q),
                           format_from_log(e.logLengths[static_cast<std::size_t>(k)]),
                           k == 0 ? "" : format_double(e.roots[static_cast<std::size_t>(k - 1)]),
                           k == n ? "" : format_double(e.ratios[static_cast<std::size_t>(k)])});
    }
    per.push_back({{"alpha", slope_json(e.alpha)},
                   {"limit", e.limit},
                   {"cauchySpread", e.cauchySpread},
                   {"lastRoot", e.roots.back()}});
  }
  r.payload["classification"] = to_string(rep.classification);
  r.payload["dilatation"] = rep.dilatation;
  r.payload["spectrum"] = rep.spectrum;
  r.payload["agreesWithDilatation"] = rep.agreesWithDilatation;
  r.payload["perCurve"] = per;
  if (!rep.agreesWithDilatation) {
    r.status = "unconverged";
    r.code = kUnconverged;
    r.diagnostics.push_back("limits differ from the expected spectrum by more than tol; increase n");
  }
  return r;
}

// ---------------------------------------------------------------- walk

CocycleSpec walk_spec(const Params& p, std::uint64_t seed) {
  CocycleSpec spec;
  spec.seed = seed;
  const auto gens = parse_matrices("generators", p.str("generators"));
  const std::string source = p.str("source");
  if (source == "iid") {
    IidSource s;
    s.generators = gens;
    s.weights = to_doubles("weights", p.str("weights"));
    if (s.weights.empty()) s.weights.assign(gens.size(), 1.0 / static_cast<double>(gens.size()));
    spec.source = s;
  } else if (source == "markov") {
    MarkovSource s;
    s.generators = gens;
    for (const auto& row : split(p.str("transition"), ';')) s.transition.push_back(to_doubles("transition", row));
    spec.source = s;
  } else if (source == "rotation") {
    RotationSource s;
    s.generators = gens;
    s.angle = p.str("angle").empty() ? golden_angle() : p.num("angle");
    s.breakpoints = to_doubles("breakpoints", p.str("breakpoints"));
    if (s.breakpoints.empty() && gens.size() > 1) {
      for (std::size_t k = 1; k < gens.size(); ++k) s.breakpoints.push_back(static_cast<double>(k) / gens.size());
    }
    spec.source = s;
  } else {
    throw UsageError("parameter 'source' must be iid, markov or rotation");
  }
  spec.validate();
  return spec;
}

Report cmd_walk(Model model, const Params& p, std::uint64_t seed, int threads) {
  const CocycleSpec spec = walk_spec(p, seed);
  const int n = p.positive("n");
  const int trials = p.positive("trials");
  const double eps = p.num("eps");
  const ModelPoint x0 = parse_point(model, "x", p.str("x"));
  const int panelSize = p.positive("panel");
  const double minI = p.num("min-intersection");

  Report r;
  const DriftEstimate est = drift_estimate(spec, x0, n, trials, threads);
  const double lambda = std::exp(est.value);
  r.payload["drift"] = {{"value", est.value}, {"stderr", est.stderr_}, {"n", est.n},
                        {"trials", est.trials}, {"seed", std::to_string(est.seed)}};
  r.payload["lambda"] = {{"value", lambda}, {"stderr", lambda * est.stderr_}};
  r.payload["subadditivityExcess"] = est.subadditivityExcess;

  const TrajectoryRecord traj = sample_trajectory(spec, n, x0, 0);
  r.csvHeader = {"n", "L_forward", "L_backward"};
  for (std::size_t k = 0; k < traj.length(); ++k) {
    r.csvRows.push_back({std::to_string(k + 1), format_double(traj.forward[k]), format_double(traj.backward[k])});
  }

  std::optional<FoliationEstimate> mu;
  try {
    mu = estimate_stable_foliation(traj);
    r.payload["mu"] = {{"a", mu->mu.a()}, {"b", mu->mu.b()}, {"logGap", mu->logGap}, {"stability", mu->stability}};
  } catch (const InsufficientGap& e) {
    r.payload["mu"] = nullptr;
    r.diagnostics.push_back(std::string("mu: ") + e.what());
  }

  Json sw;
  if (lambda - eps <= 1.0) {
    sw["status"] = "degenerate";
    sw["note"] = "lambda - eps <= 1 makes the lower bound vacuous";
  } else if (!mu) {
    sw["status"] = "unconverged";
    r.status = "unconverged";
    r.code = kUnconverged;
  } else {
    const auto panel = sandwich_panel(mu->mu, panelSize, minI);
    const SandwichReport rep = sandwich_verify(traj, mu->mu, lambda, eps, panel, x0);
    sw["status"] = rep.withinCap ? "ok" : "unconverged";
    sw["N"] = rep.N;
    sw["cap"] = rep.cap;
    sw["lowerViolations"] = rep.lowerViolations;
    sw["upperViolations"] = rep.upperViolations;
    Json viol = Json::array();
    for (std::size_t k = 0; k < std::min<std::size_t>(rep.violations.size(), 20); ++k) {
      const auto& v = rep.violations[k];
      viol.push_back({{"n", v.n}, {"alpha", slope_json(v.alpha)}, {"bound", v.lower ? "lower" : "upper"}});
    }
    sw["violations"] = viol;
    sw["violationCount"] = rep.violations.size();
    sw["logC"] = rep.logC;
    sw["cConvention"] = "C(mu,x) = 1 / sup_beta i(mu,beta) / l_x(beta), sup enumerated at height 200, x = basepoint";
    if (!rep.withinCap) {
      r.status = "unconverged";
      r.code = kUnconverged;
      r.diagnostics.push_back("sandwich: violations beyond the cap n/2");
    }
  }
  r.payload["sandwich"] = sw;
  if (mu) {
    const HoroDrift hd = horo_drift_verify(traj, mu->mu, x0);
    r.payload["horoDriftTail"] = {{"value", hd.tail}, {"resolvableUpTo", hd.resolvableUpTo}};
  } else {
    r.payload["horoDriftTail"] = nullptr;
  }
  return r;
}

// ---------------------------------------------------------------- dist / horo

Report cmd_dist(Model model, const Params& p) {
  const ModelPoint x = parse_point(model, "x", p.str("x"));
  const ModelPoint y = parse_point(model, "y", p.str("y").empty() ? (model == Model::Torus ? "0,2" : "") : p.str("y"));
  const int h = p.positive("height");
  Report r;
  r.csvHeader = {"direction", "value", "argmax_p", "argmax_q", "gap"};
  double fwd = 0.0, bwd = 0.0;
  bool converged = true;
  auto row = [&](const char* name, double v, Slope arg, double gap) {
    r.payload[name] = {{"value", v}, {"argmax", slope_json(arg)}, {"doublingGap", gap}};
    r.csvRows.push_back({name, format_double(v), std::to_string(arg.p), std::to_string(arg.q), format_double(gap)});
  };
  if (model == Model::Torus) {
    const auto& a = std::get<TorusPoint>(x);
    const auto& b = std::get<TorusPoint>(y);
    const auto ef = thurston_metric_enumerated(a, b, h), efh = thurston_metric_enumerated(a, b, std::max(1, h / 2));
    const auto eb = thurston_metric_enumerated(b, a, h), ebh = thurston_metric_enumerated(b, a, std::max(1, h / 2));
    fwd = thurston_metric_exact(a, b);
    bwd = thurston_metric_exact(b, a);
    row("forward", fwd, ef.argmax, ef.value - efh.value);
    row("backward", bwd, eb.argmax, eb.value - ebh.value);
    r.payload["forward"]["enumerated"] = ef.value;
    r.payload["backward"]["enumerated"] = eb.value;
    r.payload["teichDistance"] = teich_distance(a, b);
    converged = ef.value - efh.value < kTruncationTolerance && eb.value - ebh.value < kTruncationTolerance;
  } else {
    const auto& a = std::get<FrickePoint>(x);
    const auto& b = std::get<FrickePoint>(y);
    const auto f = thurston_metric_enumerated(a, b, h);
    const auto g = thurston_metric_enumerated(b, a, h);
    fwd = f.value;
    bwd = g.value;
    row("forward", fwd, f.argmax, f.gap);
    row("backward", bwd, g.argmax, g.gap);
    converged = f.converged && g.converged;
  }
  r.payload["x"] = point_json(x);
  r.payload["y"] = point_json(y);
  r.payload["asymmetry"] = fwd - bwd;
  r.payload["symmetric"] = std::abs(fwd - bwd) <= 1e-9;
  if (!converged) {
    r.status = "unconverged";
    r.code = kUnconverged;
    r.diagnostics.push_back("truncated sup changed by more than 1e-3 when the height doubled");
  }
  return r;
}

Report cmd_horo(Model model, const Params& p) {
  const auto muv = to_doubles("mu", p.str("mu"));
  if (muv.size() != 2) throw UsageError("parameter 'mu' needs a,b");
  const Foliation mu(muv[0], muv[1]);
  const ModelPoint x = parse_point(model, "x", p.str("x"));
  const ModelPoint x0 = parse_point(model, "x0", p.str("x0"));
  const int h = p.positive("height");
  Report r;
  double value = 0.0, gap = 0.0;
  bool converged = true;
  if (model == Model::Torus) {
    value = horofunction(mu, std::get<TorusPoint>(x), std::get<TorusPoint>(x0));
    // Enumerated cross-check of the closed form.
    const double enumerated = log_inverse_c(mu, x, h) - log_inverse_c(mu, x0, h);
    gap = std::abs(enumerated - value);
    r.payload["enumerated"] = enumerated;
  } else {
    const auto est = horofunction_estimate(mu, std::get<FrickePoint>(x), std::get<FrickePoint>(x0), h);
    value = est.value;
    gap = est.gap;
    converged = est.converged;
  }
  r.payload["mu"] = {{"a", mu.a()}, {"b", mu.b()}};
  r.payload["value"] = value;
  r.payload["diagnosticGap"] = gap;
  r.csvHeader = {"value", "gap"};
  r.csvRows.push_back({format_double(value), format_double(gap)});
  if (!converged) {
    r.status = "unconverged";
    r.code = kUnconverged;
  }
  return r;
}

// ---------------------------------------------------------------- holo

Json boundary_json(const GMBoundaryPoint& P) {
  Json vals = Json::array();
  for (std::size_t k = 0; k < P.panel().size(); ++k) {
    vals.push_back({{"slope", slope_json(P.panel()[k])}, {"E", P.panel_values()[k]}});
  }
  return {{"direction", {{"a", P.direction().a()}, {"b", P.direction().b()}}},
          {"scale", P.scale()},
          {"fitResidual", P.residual()},
          {"uniquelyErgodic", std::all_of(P.panel().begin(), P.panel().end(),
                                          [&](const Slope& s) { return P.E(s) > 1e-9; })},
          {"panel", vals}};
}

Report cmd_holo(const Params& p) {
  const SelfMap f = SelfMap::parse(p.str("map"));
  const auto xv = to_doubles("x0", p.str("x0"));
  if (xv.size() != 2) throw UsageError("parameter 'x0' needs re,im");
  const TorusPoint x0(xv[0], xv[1]);
  ClassifyOptions opts;
  opts.driftSteps = p.positive("n");
  opts.budget = p.positive("budget");
  opts.window = p.positive("window");
  const auto betas = parse_slopes("betas", p.str("betas"));
  const int thm4n = p.positive("thm4-n");

  Report r;
  const OrbitAnalysis oa = classify_orbit(f, x0, opts);
  r.payload["classification"] = to_string(oa.classification);
  r.payload["drift"] = oa.drift;
  r.payload["lambdaExt"] = oa.lambdaExt;
  r.payload["steps"] = oa.steps;
  r.payload["radius"] = oa.radius;
  r.payload["lastPoint"] = {{"re", oa.last.re()}, {"im", oa.last.im()}};
  r.payload["lipschitzExcess"] = f.lipschitz_excess();
  Json sub = Json::array();
  r.csvHeader = {"i", "eps", "n", "b", "panel_change"};
  for (std::size_t k = 0; k < oa.subsequence.size(); ++k) {
    const auto& s = oa.subsequence[k];
    sub.push_back({{"eps", s.eps}, {"n", s.n}, {"b", s.b}, {"priorMax", s.priorMax},
                   {"panelChange", std::isfinite(s.panelChange) ? Json(s.panelChange) : Json(nullptr)}});
    r.csvRows.push_back({std::to_string(k + 1), format_double(s.eps), std::to_string(s.n), format_double(s.b),
                         std::isfinite(s.panelChange) ? format_double(s.panelChange) : ""});
  }
  r.payload["subsequence"] = sub;
  if (oa.boundary) {
    const GMBoundaryPoint& P = *oa.boundary;
    r.payload["boundary"] = boundary_json(P);
    r.payload["QP"] = oa.QP;
    const Thm4Report t4 = verify_thm4(f, x0, P, oa.drift, betas, thm4n);
    Json tb = Json::array();
    for (const auto& b : t4.betas) {
      tb.push_back({{"beta", slope_json(b.beta)},
                    {"EP", b.EP},
                    {"lowerHolds", b.lowerHolds},
                    {"minLogMargin", std::isfinite(b.minLogMargin) ? Json(b.minLogMargin) : Json(nullptr)},
                    {"kerckhoffHolds", b.kerckhoffHolds},
                    {"rootAtN", b.rootAtN},
                    {"ratioLimit", b.ratioLimit},
                    {"converges", b.converges},
                    {"claim", b.positive ? "root tends to lambda" : "E_P(beta) = 0: rate recorded only"}});
    }
    r.payload["thm4"] = {{"lambda", t4.lambda}, {"infRatio", t4.infRatio}, {"allHold", t4.allHold}, {"betas", tb}};
    std::vector<TorusPoint> ys;
    for (double v : {0.5, 1.0, 2.0, 4.0, 8.0}) ys.emplace_back(x0.re(), x0.im() * v);
    const StepReport sr = verify_step_inequality(f, x0, P, oa.drift, ys);
    r.payload["stepInequality"] = {{"allHold", sr.allHold},
                                   {"gainVsExpL", sr.maxGapToExpL},
                                   {"gainVsExp2L", sr.maxGapToExp2L},
                                   {"gainAtLeastExpL", sr.gainAtLeastExpL},
                                   {"gainAtLeastExp2L", sr.gainAtLeastExp2L},
                                   {"supported", sr.supported}};
  }
  if (!oa.diagnostics.empty()) r.diagnostics.push_back(oa.diagnostics);
  if (oa.classification == OrbitClass::Inconclusive) {
    r.status = "inconclusive";
    r.code = kUnconverged;
  }
  return r;
}

// ---------------------------------------------------------------- selftest

Report cmd_selftest() {
  Report r;
  Rng rng(12345);
  auto randomClass = [&](int len) {
    const MappingClass gens[] = {{1, 1, 0, 1}, {1, -1, 0, 1}, {1, 0, 1, 1}, {1, 0, -1, 1}};
    MappingClass m = MappingClass::identity();
    for (int k = 0; k < len; ++k) m = m * gens[rng.below(4)];
    return m;
  };
  auto randomTorus = [&] { return TorusPoint(rng.uniform(-2, 2), std::exp(rng.uniform(-1, 1))); };
  std::vector<std::pair<std::string, bool>> checks;

  bool ok = true;
  for (int k = 0; k < 1000; ++k) {
    const MappingClass m = randomClass(6);
    const Slope s = canonicalize_slope(static_cast<std::int64_t>(rng.below(41)) - 20, 1 + rng.below(20));
    const Slope t = canonicalize_slope(static_cast<std::int64_t>(rng.below(41)) - 20, 1 + rng.below(20));
    ok = ok && intersection(apply_mapping_class_to_slope(m, s), apply_mapping_class_to_slope(m, t)) ==
                   intersection(s, t);
  }
  checks.push_back({"curves.equivariance", ok});

  ok = true;
  for (int k = 0; k < 1000; ++k) {
    const TorusPoint x = randomTorus(), y = randomTorus(), z = randomTorus();
    ok = ok && thurston_metric_exact(x, z) <= thurston_metric_exact(x, y) + thurston_metric_exact(y, z) + 1e-12;
    ok = ok && std::abs(thurston_metric_exact(x, y) - thurston_metric_exact(y, x)) <= 1e-12;
  }
  checks.push_back({"torus.triangle_and_symmetry", ok});

  ok = true;
  for (int k = 0; k < 300; ++k) {
    const MappingClass m = randomClass(5);
    const TorusPoint x = randomTorus();
    const Slope s = canonicalize_slope(static_cast<std::int64_t>(rng.below(21)) - 10, 1 + rng.below(10));
    const double a = length(act_on_point(m, x), apply_mapping_class_to_slope(m, s)), b = length(x, s);
    ok = ok && std::abs(a - b) <= 1e-12 * b;
  }
  checks.push_back({"mcg.torus_action_contract", ok});

  ok = true;
  {
    FrickePoint x(3, 3, 3);
    for (int k = 0; k < 200; ++k) {
      x = apply_mapping_class(x, randomClass(1));
      ok = ok && x.markov_residual() <= 1e-9 && x.snap_deviation() <= 1e-9;
    }
  }
  checks.push_back({"fricke.markov_orbit", ok});

  {
    const auto e = spectral_limit(TorusPoint(0, 1), {2, 1, 1, 1}, {0, 1}, 40);
    checks.push_back({"mcg.anosov_limit", std::abs(e.limit - dilatation({2, 1, 1, 1})) <= 1e-3});
  }

  ok = true;
  {
    const ModelPoint x0 = TorusPoint(0, 1);
    for (int k = 0; k < 200; ++k) {
      const MappingClass g1 = randomClass(4), g2 = randomClass(4);
      const Horofunction h = Horofunction::interior(randomTorus());
      const double lhs = F_cocycle(g1, act(g2, h), x0) + F_cocycle(g2, h, x0);
      ok = ok && std::abs(lhs - F_cocycle(g1 * g2, h, x0)) <= 1e-9;
    }
  }
  checks.push_back({"cocycle.F_identity", ok});

  ok = true;
  for (const char* text : {"mobius(2,0,0,1)", "shrink(0.5;0,2)", "blaschke(0.7;2;0.1,0.2)",
                           "mobius(1,1,0,1) |> shrink(0.9;0.5,0.1)"}) {
    try {
      ok = ok && SelfMap::parse(text).lipschitz_excess() <= 1e-9;
    } catch (const Error&) {
      ok = false;
    }
  }
  checks.push_back({"holo.nonexpansive", ok});

  Json arr = Json::array();
  r.csvHeader = {"check", "result"};
  for (const auto& [name, pass] : checks) {
    arr.push_back({{"check", name}, {"pass", pass}});
    r.csvRows.push_back({name, pass ? "PASS" : "FAIL"});
    if (!pass) {
      r.status = "failed";
      r.code = 1;
    }
  }
  r.payload["checks"] = arr;
  return r;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_from_log(double logValue) {
  const double l10 = logValue / std::log(10.0);
  if (std::abs(l10) < 300.0) return format_double(std::exp(logValue));
  double e = std::floor(l10);
  double mant = std::pow(10.0, l10 - e);
  if (mant >= 10.0) {
    mant /= 10.0;
    e += 1.0;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15fe%+.0f", mant, e);
  return buf;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos || trim(t.substr(0, eq)).empty()) {
      throw UsageError("config line " + std::to_string(lineNo) + " is not key=value");
    }
    out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model Teichmueller spaces: spectra, random walks, horofunctions and self-map iteration"};
  app.require_subcommand(1);
  std::map<std::string, std::string> globals;
  std::map<std::string, CLI::Option*> globalOpts;
  for (const auto& g : kGlobal) globalOpts[g.name] = app.add_option("--" + g.name, globals[g.name], g.help);
  std::string outPath, configPath;
  int threads = 1;
  app.add_option("--out", outPath, "output path (default stdout)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--config", configPath, "key=value configuration file");

  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [cmd, params] : kCommands) {
    CLI::App* sub = app.add_subcommand(cmd, "");
    sub->fallthrough();
    subs[cmd] = sub;
    for (const auto& prm : params) opts[cmd][prm.name] = sub->add_option("--" + prm.name, raw[cmd][prm.name], prm.help);
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  std::string cmd;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) cmd = name;
  }

  try {
    std::map<std::string, std::string> config;
    if (!configPath.empty()) {
      std::ifstream in(configPath);
      if (!in) throw UsageError("cannot read config file '" + configPath + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      for (auto& [k, v] : parse_config_text(ss.str())) config[k] = v;
    }
    Params params;
    Json echo = Json::object();
    echo["command"] = cmd;
    auto resolve = [&](const Param& prm, CLI::Option* opt, const std::string& flagValue) {
      std::string v = prm.fallback;
      if (const auto it = config.find(prm.name); it != config.end()) v = it->second;
      if (opt->count() > 0) v = flagValue;
      params.values[prm.name] = v;
      echo[prm.name] = v;
    };
    for (const auto& g : kGlobal) resolve(g, globalOpts[g.name], globals[g.name]);
    for (const auto& prm : kCommands.at(cmd)) resolve(prm, opts[cmd][prm.name], raw[cmd][prm.name]);
    for (const auto& [k, v] : config) {
      const bool known = k == "threads" || k == "out" ||
                         std::any_of(kGlobal.begin(), kGlobal.end(), [&](const Param& q) { return q.name == k; }) ||
                         std::any_of(kCommands.at(cmd).begin(), kCommands.at(cmd).end(),
                                     [&](const Param& q) { return q.name == k; });
      if (!known) throw UsageError("unknown config key '" + k + "' for command " + cmd);
    }
    if (!app.get_option("--threads")->count() && config.count("threads")) {
      threads = static_cast<int>(to_int("threads", config["threads"]));
    }
    if (outPath.empty() && config.count("out")) outPath = config["out"];
    if (threads < 1) throw UsageError("threads must be at least 1");

    const std::string format = params.str("format");
    if (format != "json" && format != "csv") throw UsageError("format must be csv or json");
    const Model model = parse_model(params.str("model"));
    const std::uint64_t seed = static_cast<std::uint64_t>(std::stoull(params.str("seed")));

    Report rep;
    if (cmd == "spectral") rep = cmd_spectral(model, params);
    else if (cmd == "walk") rep = cmd_walk(model, params, seed, threads);
    else if (cmd == "dist") rep = cmd_dist(model, params);
    else if (cmd == "horo") rep = cmd_horo(model, params);
    else if (cmd == "holo") rep = cmd_holo(params);
    else rep = cmd_selftest();

    std::ostringstream text;
    if (format == "json") {
      Json env;
      env["toolVersion"] = kToolVersion;
      env["config"] = echo;
      env["status"] = rep.status;
      env["payload"] = rep.payload;
      env["diagnostics"] = rep.diagnostics;
      text << env.dump(2) << "\n";
    } else {
      text << "# toolVersion=" << kToolVersion << "\n";
      for (const auto& [k, v] : echo.items()) text << "# " << k << "=" << v.get<std::string>() << "\n";
      text << "# status=" << rep.status << "\n";
      for (std::size_t k = 0; k < rep.csvHeader.size(); ++k) text << (k ? "," : "") << rep.csvHeader[k];
      text << "\n";
      for (const auto& row : rep.csvRows) {
        for (std::size_t k = 0; k < row.size(); ++k) text << (k ? "," : "") << csv_escape(row[k]);
        text << "\n";
      }
    }
    if (outPath.empty()) {
      out << text.str();
    } else {
      std::ofstream f(outPath, std::ios::binary);
      if (!f) throw UsageError("cannot write '" + outPath + "'");
      f << text.str();
    }
    return rep.code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: map parse: " << e.what() << "\n";
    return kUsage;
  } catch (const NonConvergence& e) {
    err << "unconverged: " << e.what() << "\n";
    return kUnconverged;
  } catch (const InsufficientGap& e) {
    err << "unconverged: " << e.what() << "\n";
    return kUnconverged;
  } catch (const BoundedOrbit& e) {
    err << "unconverged: " << e.what() << "\n";
    return kUnconverged;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: bad numeric value (" << e.what() << ")\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: numeric value out of range\n";
    return kUsage;
  }
}

}  // namespace teichlab::cli
