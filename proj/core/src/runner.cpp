#include "baryfold/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "baryfold/curvature.hpp"
#include "baryfold/jacobi.hpp"
#include "baryfold/natural_map.hpp"
#include "baryfold/parallel.hpp"
#include "baryfold/straightening.hpp"

namespace baryfold {

namespace {

int default_resolution(const ModelSpace& m) {
  if (m.kind() == ModelKind::Product) return 16;
  switch (m.dim()) {
    case 2:
    case 3:
      return 24;
    case 4:
      return 14;
    case 5:
      return 8;
    default:
      return 6;
  }
}

Vec random_chart_point(const ModelSpace& m, Rng& rng, double radius) {
  Vec x(m.dim());
  if (m.kind() == ModelKind::Product) {
    const int n1 = m.factor_dim(0);
    x.head(n1) = radius * rng.uniform() * rng.unit_vec(n1);
    x.tail(m.dim() - n1) = radius * rng.uniform() * rng.unit_vec(m.dim() - n1);
  } else if (m.kind() == ModelKind::Hyperbolic) {
    x = radius * rng.uniform() * rng.unit_vec(m.dim());
  } else {
    x = rng.normal_vec(m.dim());
  }
  return x;
}

SphericalPoint random_interior_delta(Rng& rng, int kplus1) {
  Vec sq(kplus1);
  for (int i = 0; i < kplus1; ++i) sq[i] = -std::log(std::max(rng.uniform(), 1e-300));
  sq /= sq.sum();
  return spherical_point(sq.cwiseSqrt());
}

std::string vec_csv(const Vec& v) {
  std::string s;
  for (int i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += format_double(v[i]);
  }
  return s;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

struct CommandIo {
  std::ostringstream csv;
  bool has_csv = false;
};

void add_check(Report& rep, const std::string& name, bool passed,
               const std::string& detail = "") {
  rep.checks.push_back(CheckRecord{name, passed, detail});
  if (!passed) ++rep.failures;
}

// ---- command implementations -------------------------------------------

void cmd_check_ricci(const RunConfig& cfg, const ModelSpace& m, Report& rep,
                     CommandIo&) {
  const int k = cfg.k > 0 ? cfg.k : critical_ricci_index(m.dim());
  const int samples = cfg.samples > 0 ? cfg.samples : kDefaultRicciSamples;
  const RicciConditionReport r = check_negative_k_ricci(m, k, samples, cfg.seed);
  rep.summary = {
      {"holds", r.holds},
      {"worst_value", r.worst_value},
      {"worst_direction", std::vector<double>(r.worst_direction.data(),
                                              r.worst_direction.data() +
                                                  r.worst_direction.size())},
      {"C0", r.c0},
      {"delta", r.delta},
      {"samples", r.samples},
      {"seed", r.seed},
      {"k", r.k},
      {"max_null_dim", r.max_null_dim},
  };
  add_check(rep, "negative-k-ricci", r.holds,
            "worst Ric_k = " + format_double(r.worst_value));
}

void cmd_curvature_report(const RunConfig& cfg, const ModelSpace& m, Report& rep,
                          CommandIo& io) {
  const int samples = cfg.samples > 0 ? cfg.samples : 256;
  SphereSampler sampler(m.dim(), cfg.seed);
  const Point p = m.origin();
  double min_eig = std::numeric_limits<double>::infinity();
  double max_sec = -std::numeric_limits<double>::infinity();
  io.has_csv = true;
  io.csv << "direction,eigenvalues,null_dim,tr_k\n";
  for (int i = 0; i < samples; ++i) {
    const TangentVector v = m.tangent_from_frame(p, sampler.next());
    const CurvatureForm form = curvature_form(m, p, v);
    const SpectralSummary spec = spectral_summary(form.matrix);
    min_eig = std::min(min_eig, spec.eigenvalues.minCoeff());
    io.csv << "\"" << vec_csv(v.v) << "\",\"" << vec_csv(spec.eigenvalues) << "\","
           << spec.null_dim << ",\"" << vec_csv(spec.tr_k_table) << "\"\n";
  }
  // worst sampled sectional curvature over random 2-planes
  Rng rng(cfg.seed ^ 0x77);
  for (int i = 0; i < samples; ++i) {
    const TangentVector u = m.tangent_from_frame(p, rng.unit_vec(m.dim()));
    Vec w = rng.unit_vec(m.dim());
    const TangentVector v = m.tangent_from_frame(p, w);
    const double guv = m.metric(p, u, v);
    if (std::abs(guv) > 0.999) continue;
    max_sec = std::max(max_sec, m.sectional_curvature(p, u, v));
  }
  rep.summary = {{"min_form_eigenvalue", min_eig},
                 {"max_sectional", max_sec},
                 {"samples", samples},
                 {"seed", cfg.seed}};
  add_check(rep, "curvature-form-psd", min_eig >= -1e-10,
            "min eigenvalue " + format_double(min_eig));
  add_check(rep, "nonpositive-sectional", max_sec <= 1e-10,
            "max sectional " + format_double(max_sec));
}

void cmd_key_estimate(const RunConfig& cfg, const ModelSpace& m, Report& rep,
                      CommandIo& io) {
  const int samples = cfg.samples > 0 ? cfg.samples : kDefaultRicciSamples;
  const double horizon = cfg.horizon > 0.0 ? cfg.horizon : kDefaultHorizon;
  const KeyEstimateReport r = verify_key_estimate(m, samples, horizon, cfg.seed);
  io.has_csv = true;
  io.csv << "x,theta,y0,ddb,r,ratio,flat\n";
  for (const auto& w : r.witnesses) {
    std::string theta = vec_csv(w.theta.a);
    if (w.theta.b.size() > 0)
      theta += "," + vec_csv(w.theta.b) + "," + format_double(w.theta.slope);
    io.csv << "\"" << vec_csv(w.x.x) << "\",\"" << theta << "\",\"" << vec_csv(w.y0)
           << "\"," << format_double(w.ddb) << "," << format_double(w.r) << ","
           << format_double(w.ratio) << "," << (w.flat ? 1 : 0) << "\n";
  }
  rep.summary = {{"empirical_C", r.empirical_c},
                 {"n_samples", r.n_samples},
                 {"T", r.horizon},
                 {"seed", r.seed},
                 {"flat_count", r.flat_count},
                 {"min_flat_ddb", r.min_flat_ddb}};
  add_check(rep, "key-estimate-positive", r.empirical_c > 0.0,
            "empirical C = " + format_double(r.empirical_c));
  add_check(rep, "flat-directions-psd", r.min_flat_ddb >= -1e-12);
}

void cmd_calculus_lemma(const RunConfig& cfg, const ModelSpace&, Report& rep,
                        CommandIo&) {
  const int trials = cfg.samples > 0 ? cfg.samples : 10000;
  Rng rng(cfg.seed);
  int violations = 0, precondition_rejects = 0;
  for (int i = 0; i < trials; ++i) {
    const SampledFunction f = random_spline_trial(rng);
    const CalculusLemmaResult r = calculus_lemma_check(f.values, f.dt, f.l_bound);
    if (!r.f_nonnegative || !r.second_derivative_ok || !r.support_covered) {
      ++precondition_rejects;
      continue;
    }
    if (!r.holds) ++violations;
  }
  // Analytic equality-case family.
  int equality_violations = 0;
  for (double c : {0.25, 1.0, 4.0})
    for (double l0 : {0.5, 1.0, 2.0}) {
      const SampledFunction f = comparison_equality_case(c, l0);
      const CalculusLemmaResult r = calculus_lemma_check(f.values, f.dt, f.l_bound);
      if (!r.holds) ++equality_violations;
    }
  rep.summary = {{"trials", trials},
                 {"violations", violations},
                 {"precondition_rejects", precondition_rejects},
                 {"equality_family_violations", equality_violations},
                 {"seed", cfg.seed}};
  add_check(rep, "calculus-lemma-splines", violations == 0,
            std::to_string(violations) + " violations");
  add_check(rep, "calculus-lemma-equality-family", equality_violations == 0);
}

void cmd_barycenter(const RunConfig& cfg, const ModelSpace& m, Report& rep,
                    CommandIo& io) {
  const int samples = cfg.samples > 0 ? cfg.samples : 50;
  const int resolution = cfg.resolution > 0 ? cfg.resolution : default_resolution(m);
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-6;
  const BoundaryMeasure reference = sphere_quadrature(m, resolution);
  const VisualFamily family(m);
  Rng rng(cfg.seed);
  double max_err = 0.0;
  io.has_csv = true;
  io.csv << "x,bar,err\n";
  for (int i = 0; i < samples; ++i) {
    const Point x = m.point(random_chart_point(m, rng, 0.6));
    const Point b = barycenter(m, visual_measure(family, x, reference));
    const double err = m.distance(x, b);
    max_err = std::max(max_err, err);
    io.csv << "\"" << vec_csv(x.x) << "\",\"" << vec_csv(b.x) << "\","
           << format_double(err) << "\n";
  }
  rep.summary = {{"samples", samples},
                 {"resolution", resolution},
                 {"max_fixed_point_error", max_err},
                 {"seed", cfg.seed}};
  add_check(rep, "visual-barycenter-fixed-point", max_err <= tol,
            "max error " + format_double(max_err));
}

void cmd_straighten(const RunConfig& cfg, const ModelSpace& m, Report& rep,
                    CommandIo& io) {
  const int resolution = cfg.resolution > 0 ? cfg.resolution : default_resolution(m);
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-6;
  Rng rng(cfg.seed);
  std::vector<Point> vertices;
  for (int i = 0; i <= m.dim(); ++i)
    vertices.push_back(m.point(random_chart_point(m, rng, 0.55)));
  StraighteningContext ctx(m, vertices, resolution);

  io.has_csv = true;
  io.csv << "delta,st\n";
  // Simplex grid in the squared coordinates, boundary faces included.
  const int grid = cfg.samples > 0 ? cfg.samples : 3;
  const int kp1 = m.dim() + 1;
  std::vector<int> comp(static_cast<std::size_t>(kp1), 0);
  double vertex_err = 0.0;
  std::function<void(int, int)> sweep = [&](int pos, int remaining) {
    if (pos == kp1 - 1) {
      comp[static_cast<std::size_t>(pos)] = remaining;
      Vec sq(kp1);
      for (int i = 0; i < kp1; ++i)
        sq[i] = static_cast<double>(comp[static_cast<std::size_t>(i)]) / grid;
      const SphericalPoint delta = spherical_point(sq.cwiseSqrt());
      const Point st = ctx.straighten(delta);
      io.csv << "\"" << vec_csv(delta.a) << "\",\"" << vec_csv(st.x) << "\"\n";
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      comp[static_cast<std::size_t>(pos)] = c;
      sweep(pos + 1, remaining - c);
    }
  };
  sweep(0, grid);
  for (int i = 0; i < kp1; ++i) {
    const Point st = ctx.straighten(spherical_vertex(kp1, i));
    vertex_err = std::max(vertex_err, m.distance(st, vertices[static_cast<std::size_t>(i)]));
  }
  rep.summary = {{"resolution", resolution},
                 {"grid", grid},
                 {"vertex_consistency_error", vertex_err},
                 {"seed", cfg.seed}};
  // The vertex fixed point is exact for the hyperbolic visual family; the
  // product stand-in family reports its deviation without gating.
  if (m.kind() == ModelKind::Hyperbolic)
    add_check(rep, "straighten-vertex-consistency", vertex_err <= tol,
              "max vertex error " + format_double(vertex_err));
  else
    add_check(rep, "straighten-finite", std::isfinite(vertex_err),
              "vertex deviation " + format_double(vertex_err) +
                  " (stand-in family, informational)");
}

void cmd_jacobian_scan(const RunConfig& cfg, const ModelSpace& m, Report& rep,
                       CommandIo& io) {
  const int samples = cfg.samples > 0 ? cfg.samples : 100;
  const int resolution = cfg.resolution > 0 ? cfg.resolution : default_resolution(m);
  const BoundaryMeasure reference = sphere_quadrature(m, resolution);
  const Rng root(cfg.seed);
  struct Record {
    SphericalPoint delta;
    Point st;
    JacobianChainResult r;
  };
  std::vector<Record> records(static_cast<std::size_t>(samples));
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
    Rng rng = root.fork(i);
    std::vector<Point> vertices;
    for (int v = 0; v <= m.dim(); ++v)
      vertices.push_back(m.point(random_chart_point(m, rng, 0.6)));
    StraighteningContext ctx(m, vertices, reference);
    const SphericalPoint delta = random_interior_delta(rng, m.dim() + 1);
    records[i] = Record{delta, ctx.straighten(delta), ctx.jacobian_chain(delta)};
  });

  int violations = 0;
  double max_ratio = 0.0;
  nlohmann::json worst;
  io.has_csv = true;
  io.csv << "delta,st,jac,detH,detK,ratio,holds\n";
  for (const Record& rec : records) {
    const JacobianChainResult& r = rec.r;
    if (!r.holds) ++violations;
    if (r.ratio >= max_ratio || worst.is_null()) {
      max_ratio = std::max(max_ratio, r.ratio);
      worst = {{"delta", std::vector<double>(rec.delta.a.data(),
                                             rec.delta.a.data() + rec.delta.a.size())},
               {"st_point", std::vector<double>(rec.st.x.data(),
                                                rec.st.x.data() + rec.st.x.size())},
               {"jac", r.jac},
               {"detH", r.det_h},
               {"detK", r.det_k},
               {"ratio", r.ratio},
               {"holds", r.holds}};
    }
    io.csv << "\"" << vec_csv(rec.delta.a) << "\",\"" << vec_csv(rec.st.x) << "\","
           << format_double(r.jac) << "," << format_double(r.det_h) << ","
           << format_double(r.det_k) << "," << format_double(r.ratio) << ","
           << (r.holds ? 1 : 0) << "\n";
  }
  rep.summary = {{"samples", samples},
                 {"resolution", resolution},
                 {"violations", violations},
                 {"max_ratio", max_ratio},
                 {"worst_record", worst},
                 {"seed", cfg.seed}};
  add_check(rep, "jacobian-chain-inequality", violations == 0,
            std::to_string(violations) + " violations");
}

void cmd_ratio_bound(const RunConfig& cfg, const ModelSpace& m, Report& rep,
                     CommandIo&) {
  const int samples = cfg.samples > 0 ? cfg.samples : 200;
  const int resolution = cfg.resolution > 0 ? cfg.resolution : default_resolution(m);
  const int k_ric = cfg.k > 0 ? cfg.k : critical_ricci_index(m.dim());
  const RatioBoundReport r = ratio_bound_constant(m, k_ric, samples, cfg.seed, resolution);
  const double envelope =
      (m.kind() == ModelKind::Hyperbolic) ? det_ratio_envelope(m.dim()) : 0.0;
  rep.summary = {{"empirical_sup_ratio", r.empirical_sup_ratio},
                 {"C0_used", r.c0_used},
                 {"C_prime", r.c_prime},
                 {"k", r.k},
                 {"samples", r.samples},
                 {"seed", r.seed},
                 {"eigen_floor_violations", r.eigen_floor_violations},
                 {"chain_violations", r.chain_violations},
                 {"h_eigen_violations", r.h_eigen_violations},
                 {"envelope", envelope}};
  add_check(rep, "eigen-floor", r.eigen_floor_violations == 0);
  add_check(rep, "chain-bound", r.chain_violations == 0);
  add_check(rep, "h-eigenvalues-in-unit-interval", r.h_eigen_violations == 0);
  if (m.kind() == ModelKind::Hyperbolic)
    add_check(rep, "ratio-within-envelope",
              r.empirical_sup_ratio <= envelope * 1.01,
              format_double(r.empirical_sup_ratio) + " vs envelope " +
                  format_double(envelope));
}

void cmd_natural_map(const RunConfig& cfg, const ModelSpace& m, Report& rep,
                     CommandIo& io) {
  if (m.kind() != ModelKind::Hyperbolic)
    throw std::invalid_argument(
        "natural-map: the command sweeps hyperbolic models, where the radial "
        "potential keeps evaluations exact down to the entropy; the product "
        "grid route is exposed through the library for the concentration "
        "regime");
  const double s_min = cfg.s_min > 0.0 ? cfg.s_min : m.entropy() + 0.2;
  const double s_max = cfg.s_max > 0.0 ? cfg.s_max : m.entropy() + 8.0;
  const int s_count = cfg.s_count > 0 ? cfg.s_count : 8;
  NaturalMapOptions opts;
  if (cfg.resolution > 0) {
    opts.boundary_resolution = cfg.resolution;
    opts.source_resolution = std::max(6, cfg.resolution / 2);
  } else if (m.dim() >= 4) {
    opts.boundary_resolution = 10;
    opts.source_resolution = 6;
  }
  const VisualFamily family(m);
  const SmoothMap id = SmoothMap::identity(m);
  // A finite determinant-ratio constant exists only from dimension 3 up.
  const bool have_bound = m.dim() >= 3;
  const double c_ratio = have_bound ? det_ratio_envelope(m.dim()) : 0.0;
  Rng rng(cfg.seed);
  const Point y = m.point(random_chart_point(m, rng, 0.3));
  int violations = 0;
  io.has_csv = true;
  io.csv << "y,s,jac,bound,holds\n";
  for (int i = 0; i < s_count; ++i) {
    const double s = s_min + (s_max - s_min) * i / std::max(1, s_count - 1);
    const NaturalJacobianResult r = jacobian_natural_map(
        id, family, y, s,
        have_bound ? c_ratio : std::numeric_limits<double>::infinity(), opts);
    if (have_bound && !r.holds) ++violations;
    io.csv << "\"" << vec_csv(y.x) << "\"," << format_double(s) << ","
           << format_double(r.jac) << ","
           << (have_bound ? format_double(r.bound) : "unbounded") << ","
           << (r.holds ? 1 : 0) << "\n";
  }
  // Isometry spot check: unit Jacobian and pointwise equivariance.
  const Isometry g = Isometry::random(m, rng, 0.3);
  const double s_iso = cfg.s > 0.0 ? cfg.s : m.entropy() + 2.0;
  const Point fy = natural_map(SmoothMap::isometry(g), family, y, s_iso, opts);
  const double iso_err = m.distance(fy, g.apply(y));
  const NaturalJacobianResult iso_jac = jacobian_natural_map(
      SmoothMap::isometry(g), family, y, s_iso,
      have_bound ? c_ratio : std::numeric_limits<double>::infinity(), opts);
  rep.summary = {{"s_min", s_min},
                 {"s_max", s_max},
                 {"s_count", s_count},
                 {"violations", violations},
                 {"isometry_error", iso_err},
                 {"isometry_jac", iso_jac.jac},
                 {"C", have_bound ? nlohmann::json(c_ratio) : nlohmann::json("unbounded")},
                 {"n", m.dim()},
                 {"seed", cfg.seed},
                 {"boundary_resolution", opts.boundary_resolution},
                 {"source_resolution", opts.source_resolution}};
  add_check(rep, "jacobian-bound-sweep", violations == 0,
            std::to_string(violations) + " violations");
  add_check(rep, "isometry-pointwise", iso_err <= 1e-4,
            "error " + format_double(iso_err));
  add_check(rep, "isometry-unit-jacobian",
            std::abs(std::abs(iso_jac.jac) - 1.0) <= 1e-2,
            "jac " + format_double(iso_jac.jac));
}

void cmd_entropy(const RunConfig& cfg, const ModelSpace& m, Report& rep, CommandIo&) {
  const double r0 = cfg.window_r0 > 0.0 ? cfg.window_r0
                    : m.kind() == ModelKind::Product ? 12.0
                                                     : 10.0;
  const double r1 = cfg.window_r1 > 0.0 ? cfg.window_r1
                    : m.kind() == ModelKind::Product ? 24.0
                                                     : 20.0;
  const double tol = cfg.tol > 0.0 ? cfg.tol : 0.03;
  const double slope = entropy_estimate(m, r0, r1);
  const double h = m.entropy();
  const double rel = std::abs(slope - h) / h;
  rep.summary = {{"estimate", slope},
                 {"closed_form", h},
                 {"relative_error", rel},
                 {"window", {r0, r1}}};
  add_check(rep, "entropy-slope", rel <= tol,
            "slope " + format_double(slope) + " vs " + format_double(h));
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> cmds = {
      "check-ricci", "curvature-report", "key-estimate", "calculus-lemma",
      "barycenter",  "straighten",       "jacobian-scan", "ratio-bound",
      "natural-map", "entropy"};
  return cmds;
}

RunConfig RunConfig::from_json(const nlohmann::json& input) {
  const nlohmann::json j =
      input.is_null() ? nlohmann::json::object() : input;
  if (!j.is_object())
    throw std::invalid_argument("config: expected a JSON object");
  RunConfig c;
  c.command = j.value("command", "");
  if (j.contains("model")) c.model = j.at("model");
  c.seed = j.value("seed", std::uint64_t{1});
  c.samples = j.value("samples", 0);
  c.resolution = j.value("resolution", 0);
  c.tol = j.value("tol", 0.0);
  c.out_dir = j.value("out", "");
  c.k = j.value("k", 0);
  c.horizon = j.value("T", 0.0);
  c.s = j.value("s", 0.0);
  c.s_min = j.value("s_min", 0.0);
  c.s_max = j.value("s_max", 0.0);
  c.s_count = j.value("s_count", 0);
  if (j.contains("window") && j.at("window").is_array() && j.at("window").size() == 2) {
    c.window_r0 = j.at("window")[0].get<double>();
    c.window_r1 = j.at("window")[1].get<double>();
  }
  if (c.tol < 0.0) throw std::invalid_argument("config: tolerance must be positive");
  return c;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["model"] = model.is_null() ? nlohmann::json({{"kind", "hyperbolic"}, {"n", 3}})
                               : model;
  j["seed"] = seed;
  j["samples"] = samples;
  j["resolution"] = resolution;
  j["tol"] = tol;
  j["out"] = out_dir;
  j["k"] = k;
  j["T"] = horizon;
  j["s"] = s;
  j["s_min"] = s_min;
  j["s_max"] = s_max;
  j["s_count"] = s_count;
  j["window"] = {window_r0, window_r1};
  return j;
}

std::uint64_t RunConfig::hash() const { return fnv1a(to_json().dump()); }

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = config_echo;
  j["config_hash"] = config_hash;
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& c : checks)
    recs.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = recs;
  j["summary"] = summary;
  j["failures"] = failures;
  j["checks_run"] = static_cast<int>(checks.size());
  return j;
}

Report run(const RunConfig& config) {
  const auto& cmds = known_commands();
  if (std::find(cmds.begin(), cmds.end(), config.command) == cmds.end())
    throw std::invalid_argument("unknown command: \"" + config.command + "\"");

  Report rep;
  rep.command = config.command;
  rep.config_echo = config.to_json();
  rep.config_hash = hash_hex(config.hash());

  const ModelSpace m = model_from_json(rep.config_echo.at("model"));
  CommandIo io;

  const auto t0 = std::chrono::steady_clock::now();
  if (config.command == "check-ricci") cmd_check_ricci(config, m, rep, io);
  else if (config.command == "curvature-report") cmd_curvature_report(config, m, rep, io);
  else if (config.command == "key-estimate") cmd_key_estimate(config, m, rep, io);
  else if (config.command == "calculus-lemma") cmd_calculus_lemma(config, m, rep, io);
  else if (config.command == "barycenter") cmd_barycenter(config, m, rep, io);
  else if (config.command == "straighten") cmd_straighten(config, m, rep, io);
  else if (config.command == "jacobian-scan") cmd_jacobian_scan(config, m, rep, io);
  else if (config.command == "ratio-bound") cmd_ratio_bound(config, m, rep, io);
  else if (config.command == "natural-map") cmd_natural_map(config, m, rep, io);
  else if (config.command == "entropy") cmd_entropy(config, m, rep, io);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    write_file_atomic(config.out_dir + "/report.json", rep.to_json().dump(2) + "\n");
    if (io.has_csv)
      write_file_atomic(config.out_dir + "/" + config.command + ".csv", io.csv.str());
  }
  return rep;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_file_atomic: cannot open " + tmp);
    out << contents;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace baryfold
