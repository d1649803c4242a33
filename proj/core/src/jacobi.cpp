#include "baryfold/jacobi.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "baryfold/curvature.hpp"
#include "baryfold/parallel.hpp"

namespace baryfold {

namespace {

// Gram-Schmidt completion of the ray direction to an orthonormal frame,
// adapted to the product splitting when the model is a product (so that the
// curvature matrix comes out block-clean).
Mat adapted_frame(const ModelSpace& m, const Point& x, const TangentVector& dir) {
  const int n = m.dim();
  std::vector<Vec> cols;
  cols.push_back(dir.v);
  const Mat onf = m.orthonormal_frame(x);

  std::vector<Vec> candidates;
  if (m.kind() == ModelKind::Product) {
    // Start with the slope-rotation direction, which spans the flat plane
    // with the ray.
    const int n1 = m.factor_dim(0);
    Vec u1 = dir.v.head(n1), u2 = dir.v.tail(n - n1);
    const ModelSpace& m1 = m.factor(0);
    const ModelSpace& m2 = m.factor(1);
    const Point p1 = m1.point(x.x.head(n1));
    const Point p2 = m2.point(x.x.tail(n - n1));
    const double c1 = m1.norm(m1.tangent(p1, u1));
    const double c2 = m2.norm(m2.tangent(p2, u2));
    if (c1 > 1e-10 && c2 > 1e-10) {
      Vec rot(n);
      rot.head(n1) = -(c2 / c1) * u1;
      rot.tail(n - n1) = (c1 / c2) * u2;
      candidates.push_back(rot);
    }
  }
  for (int j = 0; j < n; ++j) candidates.push_back(onf.col(j));

  for (const Vec& cand : candidates) {
    if (static_cast<int>(cols.size()) == n) break;
    Vec w = cand;
    for (const Vec& c : cols) {
      const double proj =
          m.metric(x, TangentVector{x, w}, TangentVector{x, c});
      w -= proj * c;
    }
    const double nw = m.norm(TangentVector{x, w});
    if (nw > 1e-8) cols.push_back(w / nw);
  }
  if (static_cast<int>(cols.size()) != n)
    throw std::logic_error("adapted_frame: frame completion failed");
  Mat f(n, n);
  for (int j = 0; j < n; ++j) f.col(j) = cols[j];
  return f;
}

}  // namespace

RayFrame make_ray_frame(const ModelSpace& m, const Point& x, const IdealPoint& theta) {
  RayFrame ray;
  ray.x = x;
  ray.theta = theta;
  const TangentVector dir = m.ray_direction(x, theta);
  ray.frame = adapted_frame(m, x, dir);

  // Curvature form of the ray direction, re-expressed in the adapted frame.
  const CurvatureForm form = curvature_form(m, x, dir);
  const int n = m.dim();
  Mat coords(n, n);  // orthonormal-frame coordinates of the adapted columns
  for (int j = 0; j < n; ++j)
    coords.col(j) = m.frame_coords(x, TangentVector{x, ray.frame.col(j)});
  ray.curvature = coords.transpose() * form.matrix * coords;
  ray.curvature = 0.5 * (ray.curvature + ray.curvature.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Mat> es(ray.curvature, Eigen::EigenvaluesOnly);
  ray.decay_rates = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return ray;
}

double suggested_horizon(const RayFrame& ray, double base_horizon) {
  double eps = 0.0;
  for (int i = 0; i < ray.decay_rates.size(); ++i)
    if (ray.decay_rates[i] > 1e-6) {
      eps = ray.decay_rates[i];
      break;
    }
  if (eps <= 0.0) return base_horizon;
  return std::max(base_horizon, 2.0 / eps);
}

namespace {

// One RK4 step of the frame Jacobi system Y'' = A Y for a stack of column
// states.  A is the (PSD) curvature form of the ray direction, so stable
// solutions decay at the square roots of its eigenvalues.
void rk4_step(const Mat& a, double h, Mat& y, Mat& v) {
  const Mat k1y = v;
  const Mat k1v = a * y;
  const Mat k2y = v + 0.5 * h * k1v;
  const Mat k2v = a * (y + 0.5 * h * k1y);
  const Mat k3y = v + 0.5 * h * k2v;
  const Mat k3v = a * (y + 0.5 * h * k2y);
  const Mat k4y = v + h * k3v;
  const Mat k4v = a * (y + h * k3y);
  y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
  v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

}  // namespace

JacobiSolution solve_jacobi_bvp(const ModelSpace& m, const RayFrame& ray,
                                const TangentVector& y0, double horizon,
                                double dt) {
  if (!(horizon > 0.0)) throw std::invalid_argument("solve_jacobi_bvp: horizon <= 0");
  const int n = m.dim();
  const Vec metric_c0 = [&] {
    Vec c(n);
    for (int j = 0; j < n; ++j)
      c[j] = m.metric(ray.x, TangentVector{ray.x, ray.frame.col(j)},
                      TangentVector{ray.x, y0.v});
    return c;
  }();
  if (std::abs(metric_c0[0]) > 1e-8)
    throw std::invalid_argument(
        "solve_jacobi_bvp: Y0 must be orthogonal to the ray direction");

  const int steps = std::max(8, static_cast<int>(std::ceil(horizon / dt)));
  const double h = horizon / steps;

  // Fundamental solutions: Phi(0) = I, Phi'(0) = 0; Psi(0) = 0, Psi'(0) = I.
  Mat phi = Mat::Identity(n, n), dphi = Mat::Zero(n, n);
  Mat psi = Mat::Zero(n, n), dpsi = Mat::Identity(n, n);
  for (int s = 0; s < steps; ++s) {
    rk4_step(ray.curvature, h, phi, dphi);
    rk4_step(ray.curvature, h, psi, dpsi);
  }
  // The endpoint matrix mixes e^{+rate T} scales, so rank thresholds are
  // meaningless; solve and check the residual instead.
  const Vec rhs = -(phi * metric_c0);
  const Vec w = psi.partialPivLu().solve(rhs);
  const double resid = (psi * w - rhs).norm();
  if (!w.allFinite() || resid > 1e-8 * (1.0 + rhs.norm()))
    throw solve_error("solve_jacobi_bvp: endpoint system solve failed", resid);

  JacobiSolution sol;
  sol.ray = ray;
  sol.horizon = horizon;
  sol.dt = h;
  sol.times.reserve(steps + 1);
  sol.y.reserve(steps + 1);
  sol.yprime.reserve(steps + 1);
  Mat yv(n, 1), vv(n, 1);
  yv.col(0) = metric_c0;
  vv.col(0) = w;
  sol.times.push_back(0.0);
  sol.y.push_back(yv.col(0));
  sol.yprime.push_back(vv.col(0));
  for (int s = 0; s < steps; ++s) {
    rk4_step(ray.curvature, h, yv, vv);
    sol.times.push_back((s + 1) * h);
    sol.y.push_back(yv.col(0));
    sol.yprime.push_back(vv.col(0));
  }
  return sol;
}

double JacobiSolution::hessian_value() const {
  return -y.front().dot(yprime.front());
}

double JacobiSolution::max_norm_increase() const {
  double worst = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i)
    worst = std::max(worst, y[i].norm() - y[i - 1].norm());
  return worst;
}

double JacobiSolution::ode_residual() const {
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < y.size(); ++i) {
    const Vec ypp = (-y[i - 2] + 16.0 * y[i - 1] - 30.0 * y[i] +
                     16.0 * y[i + 1] - y[i + 2]) /
                    (12.0 * dt * dt);
    worst = std::max(worst, (ypp - ray.curvature * y[i]).norm());
  }
  return worst;
}

double JacobiSolution::max_yprime_norm() const {
  double worst = 0.0;
  for (const Vec& v : yprime) worst = std::max(worst, v.norm());
  return worst;
}

double hess_busemann_numeric(const ModelSpace& m, const Point& x,
                             const IdealPoint& theta, const TangentVector& y0,
                             double horizon, double dt) {
  const RayFrame ray = make_ray_frame(m, x, theta);
  // The Hessian annihilates the ray direction, so only the horocycle part
  // of Y0 is solved for; a pure ray direction gives zero outright.
  Vec c(m.dim());
  for (int j = 0; j < m.dim(); ++j)
    c[j] = m.metric(x, TangentVector{x, ray.frame.col(j)}, y0);
  c[0] = 0.0;
  if (c.norm() < 1e-14) return 0.0;
  const TangentVector perp{x, ray.frame * c};
  return solve_jacobi_bvp(m, ray, perp, horizon, dt).hessian_value();
}

KeyEstimateReport verify_key_estimate(const ModelSpace& m, int samples,
                                      double horizon, std::uint64_t seed,
                                      bool use_numeric_hessian) {
  KeyEstimateReport rep;
  rep.n_samples = samples;
  rep.horizon = horizon;
  rep.seed = seed;
  rep.used_numeric_hessian = use_numeric_hessian;
  rep.empirical_c = std::numeric_limits<double>::infinity();
  rep.min_flat_ddb = std::numeric_limits<double>::infinity();

  const Rng root(seed);
  const int n = m.dim();
  rep.witnesses.resize(static_cast<std::size_t>(samples));
  // Per-sample streams fork deterministically from the root seed, so the
  // sweep partitions across threads without changing its output.
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t s) {
    Rng rng = root.fork(s);
    // Base point.
    Vec xc(n);
    switch (m.kind()) {
      case ModelKind::Hyperbolic:
        xc = 0.5 * rng.uniform() * rng.unit_vec(n);
        break;
      case ModelKind::Product: {
        const int n1 = m.factor_dim(0);
        xc.head(n1) = 0.5 * rng.uniform() * rng.unit_vec(n1);
        xc.tail(n - n1) = 0.5 * rng.uniform() * rng.unit_vec(n - n1);
        break;
      }
      case ModelKind::Horospherical:
        xc = rng.normal_vec(n);
        break;
    }
    const Point x = m.point(xc);

    // Boundary point.
    IdealPoint theta;
    switch (m.kind()) {
      case ModelKind::Hyperbolic:
        theta = m.ideal(rng.unit_vec(n));
        break;
      case ModelKind::Product:
        theta = m.ideal(rng.unit_vec(m.factor_dim(0)), rng.unit_vec(m.factor_dim(1)),
                        rng.uniform(0.0, M_PI_2));
        break;
      case ModelKind::Horospherical:
        theta = m.ideal_end();
        break;
    }

    const RayFrame ray = make_ray_frame(m, x, theta);
    // Unit Y0 in the horocycle directions: random combination of the
    // non-ray frame columns.
    Vec coeffs = rng.unit_vec(n - 1);
    Vec c = Vec::Zero(n);
    c.tail(n - 1) = coeffs;
    const TangentVector y0{x, ray.frame * c};

    const double r = c.dot(ray.curvature * c);
    double ddb;
    if (use_numeric_hessian) {
      ddb = solve_jacobi_bvp(m, ray, y0, horizon).hessian_value();
    } else {
      const Vec onf = m.frame_coords(x, y0);
      ddb = onf.dot(m.hess_busemann(x, theta) * onf);
    }

    KeyEstimateWitness w;
    w.x = x;
    w.theta = theta;
    w.y0 = y0.v;
    w.ddb = ddb;
    w.r = r;
    if (r > kFlatCurvatureCutoff) {
      w.ratio = ddb / std::pow(r, 1.5);
    } else {
      w.flat = true;
    }
    rep.witnesses[s] = std::move(w);
  });
  for (const KeyEstimateWitness& w : rep.witnesses) {
    if (w.flat) {
      ++rep.flat_count;
      rep.min_flat_ddb = std::min(rep.min_flat_ddb, w.ddb);
    } else {
      rep.empirical_c = std::min(rep.empirical_c, w.ratio);
    }
  }
  if (rep.flat_count == 0) rep.min_flat_ddb = 0.0;
  return rep;
}

SampledFunction random_spline_trial(Rng& rng, int knots, double span) {
  if (knots < 4) throw std::invalid_argument("random_spline_trial: too few knots");
  for (int attempt = 0; attempt < 100; ++attempt) {
    // Natural cubic spline through random knot values: solve the standard
    // tridiagonal system for the knot second derivatives.
    std::vector<double> y(static_cast<std::size_t>(knots));
    for (auto& v : y) v = 2.0 * rng.uniform();
    const double hk = span / (knots - 1);
    const int m = knots - 2;
    std::vector<double> diag(static_cast<std::size_t>(m), 4.0),
        rhs(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
      rhs[static_cast<std::size_t>(i)] =
          6.0 / (hk * hk) *
          (y[static_cast<std::size_t>(i)] - 2.0 * y[static_cast<std::size_t>(i + 1)] +
           y[static_cast<std::size_t>(i + 2)]);
    for (int i = 1; i < m; ++i) {
      const double w = 1.0 / diag[static_cast<std::size_t>(i - 1)];
      diag[static_cast<std::size_t>(i)] -= w;
      rhs[static_cast<std::size_t>(i)] -= w * rhs[static_cast<std::size_t>(i - 1)];
    }
    std::vector<double> m2(static_cast<std::size_t>(knots), 0.0);
    for (int i = m - 1; i >= 0; --i)
      m2[static_cast<std::size_t>(i + 1)] =
          (rhs[static_cast<std::size_t>(i)] -
           (i + 1 < m ? m2[static_cast<std::size_t>(i + 2)] : 0.0)) /
          diag[static_cast<std::size_t>(i)];

    auto spline = [&](double t) {
      int seg = std::min(knots - 2, std::max(0, static_cast<int>(t / hk)));
      const double a = t - seg * hk, b = hk - a;
      const std::size_t i = static_cast<std::size_t>(seg);
      return (m2[i] * b * b * b + m2[i + 1] * a * a * a) / (6.0 * hk) +
             (y[i] / hk - m2[i] * hk / 6.0) * b +
             (y[i + 1] / hk - m2[i + 1] * hk / 6.0) * a;
    };

    SampledFunction out;
    out.dt = 1e-3;
    const int n = static_cast<int>(std::ceil(span / out.dt)) + 1;
    out.values.resize(static_cast<std::size_t>(n));
    double minval = 0.0;
    for (int i = 0; i < n; ++i) {
      out.values[static_cast<std::size_t>(i)] = spline(i * out.dt);
      minval = std::min(minval, out.values[static_cast<std::size_t>(i)]);
    }
    // Shift nonnegative; constant shifts do not change the curvature.
    for (auto& v : out.values) v -= minval;
    double lmax = 0.0;
    for (std::size_t i = 1; i + 1 < out.values.size(); ++i)
      lmax = std::max(lmax,
                      (out.values[i + 1] - 2.0 * out.values[i] + out.values[i - 1]) /
                          (out.dt * out.dt));
    out.l_bound = std::max(lmax, 1e-12);

    // The bound argument only looks at [0, sqrt(F(0))/L']; reject draws
    // whose grid does not cover that window.
    const double lprime = std::sqrt(out.l_bound / 2.0) + 1e-6;
    if (std::sqrt(out.values.front()) / lprime <= span * 0.995) return out;
  }
  throw solve_error("random_spline_trial: rejection sampling stalled", 0.0);
}

SampledFunction comparison_equality_case(double c, double l0, double dt) {
  if (!(c > 0.0) || !(l0 > 0.0))
    throw std::invalid_argument("comparison_equality_case: need c, l0 > 0");
  SampledFunction out;
  out.dt = dt;
  out.l_bound = 2.0 * l0 * l0;
  const double support = std::sqrt(c) / l0;
  const int n = static_cast<int>(std::ceil(1.25 * support / dt)) + 2;
  out.values.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = i * dt;
    const double g = std::max(0.0, std::sqrt(c) - l0 * t);
    out.values[static_cast<std::size_t>(i)] = g * g;
  }
  return out;
}

CalculusLemmaResult calculus_lemma_check(const std::vector<double>& f, double dt,
                                         double L) {
  if (f.size() < 3) throw std::invalid_argument("calculus_lemma_check: grid too short");
  if (!(dt > 0.0)) throw std::invalid_argument("calculus_lemma_check: dt <= 0");
  if (L < 0.0) throw std::invalid_argument("calculus_lemma_check: L < 0");

  CalculusLemmaResult out;
  out.lprime = std::sqrt(L / 2.0) + 1e-6;
  for (double v : f)
    if (v < -1e-12) out.f_nonnegative = false;
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    const double fpp = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (dt * dt);
    if (fpp > L + 1e-8) out.second_derivative_ok = false;
  }
  out.lhs = integrate_uniform(f, dt);
  out.rhs = std::pow(std::max(f.front(), 0.0), 1.5) / (3.0 * out.lprime);
  const double support = std::sqrt(std::max(f.front(), 0.0)) / out.lprime;
  out.support_covered = (static_cast<double>(f.size() - 1) * dt >= support);
  out.holds = out.lhs >= out.rhs - 1e-8;
  return out;
}

}  // namespace baryfold
