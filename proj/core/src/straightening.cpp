#include "baryfold/straightening.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "baryfold/curvature.hpp"
#include "baryfold/parallel.hpp"

namespace baryfold {

namespace {

double log1m_sq(const Vec& x) { return std::log(1.0 - x.squaredNorm()); }

}  // namespace

BusemannAverager::BusemannAverager(
    const ModelSpace& m, std::shared_ptr<const std::vector<IdealPoint>> nodes)
    : model_(m), nodes_(std::move(nodes)) {
  if (!nodes_ || nodes_->empty())
    throw std::invalid_argument("BusemannAverager: empty node set");
  if (m.kind() == ModelKind::Horospherical)
    throw std::invalid_argument(
        "BusemannAverager: horospherical boundary measures are not supported");
  const auto n_nodes = static_cast<Eigen::Index>(nodes_->size());
  if (m.kind() == ModelKind::Hyperbolic) {
    theta1_.resize(n_nodes, m.dim());
    for (Eigen::Index i = 0; i < n_nodes; ++i)
      theta1_.row(i) = (*nodes_)[static_cast<std::size_t>(i)].a.transpose();
  } else {
    const int n1 = m.factor_dim(0), n2 = m.factor_dim(1);
    theta1_.resize(n_nodes, n1);
    theta2_.resize(n_nodes, n2);
    cos_slope_.resize(n_nodes);
    sin_slope_.resize(n_nodes);
    for (Eigen::Index i = 0; i < n_nodes; ++i) {
      const IdealPoint& t = (*nodes_)[static_cast<std::size_t>(i)];
      theta1_.row(i) = t.a.transpose();
      theta2_.row(i) = t.b.transpose();
      cos_slope_[i] = std::cos(t.slope);
      sin_slope_[i] = std::sin(t.slope);
    }
  }
}

double BusemannAverager::value(const Point& x, const Vec& w) const {
  if (w.size() != theta1_.rows())
    throw std::invalid_argument("BusemannAverager: weight count mismatch");
  if (model_.kind() == ModelKind::Hyperbolic) {
    const Vec d2 = (theta1_.rowwise() - x.x.transpose()).rowwise().squaredNorm();
    return w.dot(d2.array().log().matrix()) - w.sum() * log1m_sq(x.x);
  }
  const int n1 = model_.factor_dim(0);
  const Vec x1 = x.x.head(n1), x2 = x.x.tail(model_.dim() - n1);
  const Vec d1 = (theta1_.rowwise() - x1.transpose()).rowwise().squaredNorm();
  const Vec d2 = (theta2_.rowwise() - x2.transpose()).rowwise().squaredNorm();
  const Vec wc = w.cwiseProduct(cos_slope_), ws = w.cwiseProduct(sin_slope_);
  return wc.dot(d1.array().log().matrix()) - wc.sum() * log1m_sq(x1) +
         ws.dot(d2.array().log().matrix()) - ws.sum() * log1m_sq(x2);
}

Vec BusemannAverager::busemann_values(const Point& x) const {
  if (model_.kind() == ModelKind::Hyperbolic) {
    const Vec d2 = (theta1_.rowwise() - x.x.transpose()).rowwise().squaredNorm();
    return (d2.array().log() - log1m_sq(x.x)).matrix();
  }
  const int n1 = model_.factor_dim(0);
  const Vec x1 = x.x.head(n1), x2 = x.x.tail(model_.dim() - n1);
  const Vec d1 = (theta1_.rowwise() - x1.transpose()).rowwise().squaredNorm();
  const Vec d2 = (theta2_.rowwise() - x2.transpose()).rowwise().squaredNorm();
  return cos_slope_.cwiseProduct((d1.array().log() - log1m_sq(x1)).matrix()) +
         sin_slope_.cwiseProduct((d2.array().log() - log1m_sq(x2)).matrix());
}

namespace {

// Euclidean gradient sum over ball nodes: sum_i w_i (2(x - t_i)/|x-t_i|^2)
// plus the conformal term, which factors out of the node loop.
Vec ball_grad_sum(const Mat& thetas, const Vec& w, const Vec& x) {
  const Mat diff = (-thetas).rowwise() + x.transpose();  // rows: x - theta_i
  const Vec inv_d2 = diff.rowwise().squaredNorm().cwiseInverse();
  Vec g = 2.0 * diff.transpose() * w.cwiseProduct(inv_d2);
  g += w.sum() * 2.0 * x / (1.0 - x.squaredNorm());
  return g;
}

}  // namespace

Vec BusemannAverager::grad_chart(const Point& x, const Vec& w) const {
  if (model_.kind() == ModelKind::Hyperbolic) {
    const double lam = 2.0 / (1.0 - x.x.squaredNorm());
    return ball_grad_sum(theta1_, w, x.x) / (lam * lam);
  }
  const int n1 = model_.factor_dim(0);
  const int n2 = model_.dim() - n1;
  const Vec x1 = x.x.head(n1), x2 = x.x.tail(n2);
  const double l1 = 2.0 / (1.0 - x1.squaredNorm());
  const double l2 = 2.0 / (1.0 - x2.squaredNorm());
  Vec g(model_.dim());
  g.head(n1) = ball_grad_sum(theta1_, w.cwiseProduct(cos_slope_), x1) / (l1 * l1);
  g.tail(n2) = ball_grad_sum(theta2_, w.cwiseProduct(sin_slope_), x2) / (l2 * l2);
  return g;
}

Vec BusemannAverager::grad_frame(const Point& x, const Vec& w) const {
  if (model_.kind() == ModelKind::Hyperbolic) {
    const double lam = 2.0 / (1.0 - x.x.squaredNorm());
    return ball_grad_sum(theta1_, w, x.x) / lam;
  }
  const int n1 = model_.factor_dim(0);
  const int n2 = model_.dim() - n1;
  const Vec x1 = x.x.head(n1), x2 = x.x.tail(n2);
  const double l1 = 2.0 / (1.0 - x1.squaredNorm());
  const double l2 = 2.0 / (1.0 - x2.squaredNorm());
  Vec g(model_.dim());
  g.head(n1) = ball_grad_sum(theta1_, w.cwiseProduct(cos_slope_), x1) / l1;
  g.tail(n2) = ball_grad_sum(theta2_, w.cwiseProduct(sin_slope_), x2) / l2;
  return g;
}

void BusemannAverager::forms(const Point& x, const Vec& w, Mat* h_out,
                             Mat* k_out) const {
  const int n = model_.dim();
  Mat h = Mat::Zero(n, n);
  Mat k = Mat::Zero(n, n);
  if (model_.kind() == ModelKind::Hyperbolic) {
    const double lam = 2.0 / (1.0 - x.x.squaredNorm());
    const Mat diff = (-theta1_).rowwise() + x.x.transpose();
    const Vec inv_d2 = 2.0 * diff.rowwise().squaredNorm().cwiseInverse();
    const Vec conf = 2.0 * x.x / (1.0 - x.x.squaredNorm());
    // b_i = (2 (x - t_i)/|x-t_i|^2 + conf)/lam, unit in the frame.
    Mat b = (diff.array().colwise() * inv_d2.array()).matrix();
    b.rowwise() += conf.transpose();
    b /= lam;
    h = b.transpose() * w.asDiagonal() * b;
    k = w.sum() * Mat::Identity(n, n) - h;
  } else {
    const int n1 = model_.factor_dim(0);
    const int n2 = n - n1;
    const Vec x1 = x.x.head(n1), x2 = x.x.tail(n2);
    const double l1 = 2.0 / (1.0 - x1.squaredNorm());
    const double l2 = 2.0 / (1.0 - x2.squaredNorm());
    const Mat diff1 = (-theta1_).rowwise() + x1.transpose();
    const Mat diff2 = (-theta2_).rowwise() + x2.transpose();
    const Vec inv1 = 2.0 * diff1.rowwise().squaredNorm().cwiseInverse();
    const Vec inv2 = 2.0 * diff2.rowwise().squaredNorm().cwiseInverse();
    Mat b1 = (diff1.array().colwise() * inv1.array()).matrix();
    b1.rowwise() += (2.0 * x1 / (1.0 - x1.squaredNorm())).transpose();
    b1 /= l1;
    Mat b2 = (diff2.array().colwise() * inv2.array()).matrix();
    b2.rowwise() += (2.0 * x2 / (1.0 - x2.squaredNorm())).transpose();
    b2 /= l2;
    const Vec wc = w.cwiseProduct(cos_slope_);
    const Vec ws = w.cwiseProduct(sin_slope_);
    // H mixes factors through b = [cos(a) b1; sin(a) b2].
    const Vec wcc = w.cwiseProduct(cos_slope_.cwiseAbs2());
    const Vec wss = w.cwiseProduct(sin_slope_.cwiseAbs2());
    const Vec wcs = w.cwiseProduct(cos_slope_.cwiseProduct(sin_slope_));
    h.topLeftCorner(n1, n1) = b1.transpose() * wcc.asDiagonal() * b1;
    h.bottomRightCorner(n2, n2) = b2.transpose() * wss.asDiagonal() * b2;
    h.topRightCorner(n1, n2) = b1.transpose() * wcs.asDiagonal() * b2;
    h.bottomLeftCorner(n2, n1) = h.topRightCorner(n1, n2).transpose();
    k.topLeftCorner(n1, n1) =
        wc.sum() * Mat::Identity(n1, n1) - b1.transpose() * wc.asDiagonal() * b1;
    k.bottomRightCorner(n2, n2) =
        ws.sum() * Mat::Identity(n2, n2) - b2.transpose() * ws.asDiagonal() * b2;
  }
  if (h_out) *h_out = 0.5 * (h + h.transpose()).eval();
  if (k_out) *k_out = 0.5 * (k + k.transpose()).eval();
}

double BusemannAverager::min_node_hessian_trace(const Point& x, int j) const {
  const int n = model_.dim();
  if (j < 1 || j > n)
    throw std::invalid_argument("min_node_hessian_trace: index out of range");
  // Per-node Hessians are I - b b^T blocks, so their spectra are closed
  // form; no eigensolver needed.
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> eig(static_cast<std::size_t>(n));
  if (model_.kind() == ModelKind::Hyperbolic) {
    const double lam = 2.0 / (1.0 - x.x.squaredNorm());
    for (Eigen::Index i = 0; i < theta1_.rows(); ++i) {
      const Vec d = x.x - theta1_.row(i).transpose();
      Vec b = 2.0 * d / d.squaredNorm() + 2.0 * x.x / (1.0 - x.x.squaredNorm());
      b /= lam;
      eig.assign(static_cast<std::size_t>(n), 1.0);
      eig[0] = 1.0 - b.squaredNorm();
      std::sort(eig.begin(), eig.end());
      double s = 0.0;
      for (int t = 0; t < j; ++t) s += eig[static_cast<std::size_t>(t)];
      best = std::min(best, s);
    }
    return best;
  }
  const int n1 = model_.factor_dim(0);
  const int n2 = n - n1;
  const Vec x1 = x.x.head(n1), x2 = x.x.tail(n2);
  const double l1 = 2.0 / (1.0 - x1.squaredNorm());
  const double l2 = 2.0 / (1.0 - x2.squaredNorm());
  for (Eigen::Index i = 0; i < theta1_.rows(); ++i) {
    const Vec d1 = x1 - theta1_.row(i).transpose();
    const Vec d2 = x2 - theta2_.row(i).transpose();
    Vec b1 = 2.0 * d1 / d1.squaredNorm() + 2.0 * x1 / (1.0 - x1.squaredNorm());
    b1 /= l1;
    Vec b2 = 2.0 * d2 / d2.squaredNorm() + 2.0 * x2 / (1.0 - x2.squaredNorm());
    b2 /= l2;
    eig.clear();
    eig.push_back(cos_slope_[i] * (1.0 - b1.squaredNorm()));
    eig.push_back(sin_slope_[i] * (1.0 - b2.squaredNorm()));
    for (int t = 0; t < n1 - 1; ++t) eig.push_back(cos_slope_[i]);
    for (int t = 0; t < n2 - 1; ++t) eig.push_back(sin_slope_[i]);
    std::sort(eig.begin(), eig.end());
    double s = 0.0;
    for (int t = 0; t < j; ++t) s += eig[static_cast<std::size_t>(t)];
    best = std::min(best, s);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Barycenter

BarycenterResult barycenter_solve(const ModelSpace& m, const BoundaryMeasure& measure,
                                  std::optional<Point> hint,
                                  const BarycenterOptions& opts) {
  if (measure.model_id != m.id())
    throw std::invalid_argument("barycenter: measure on a different model");
  if (!measure.full_support)
    throw std::invalid_argument("barycenter: measure does not have full support");
  if (!(measure.total_mass() > 0.0))
    throw std::invalid_argument("barycenter: zero total mass");
  if (measure.weights.minCoeff() < 0.0)
    throw std::invalid_argument("barycenter: negative weight");

  BusemannAverager avg(m, measure.nodes);
  Point x = hint ? *hint : m.origin();

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    const Vec g = avg.grad_frame(x, measure.weights);
    const double gn = g.norm();
    if (gn <= opts.grad_tol) return BarycenterResult{x, iter, gn};

    Mat k;
    avg.forms(x, measure.weights, nullptr, &k);
    Eigen::SelfAdjointEigenSolver<Mat> es(k);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin > opts.condition_limit)
      throw solve_error("barycenter: degenerate measure (ill-conditioned Hessian)",
                        gn);

    Vec step = -es.eigenvectors() *
               (es.eigenvectors().transpose() * g).cwiseQuotient(es.eigenvalues());
    const double dirderiv = g.dot(step);  // negative

    if (step.norm() < 1e-11) return BarycenterResult{x, iter, gn};
    // Inside the quadratic basin take the plain Newton step; otherwise damp
    // with an Armijo backtracking, falling back to steepest descent.
    if (gn < 1e-6) {
      const TangentVector tv = m.tangent_from_frame(x, step);
      x = m.geodesic(x, tv, step.norm());
      continue;
    }
    const double f0 = avg.value(x, measure.weights);
    double damp = 1.0;
    bool moved = false;
    for (; damp > 1e-10; damp *= 0.5) {
      const Vec s = damp * step;
      if (s.norm() < 1e-11) break;
      const TangentVector tv = m.tangent_from_frame(x, s);
      const Point cand = m.geodesic(x, tv, s.norm());
      if (avg.value(cand, measure.weights) <= f0 + 1e-4 * damp * dirderiv) {
        x = cand;
        moved = true;
        break;
      }
    }
    if (!moved) {
      // Gradient descent with line search.
      double t = 1.0 / std::max(1.0, lmax);
      for (; t > 1e-12; t *= 0.5) {
        const Vec s = -t * g;
        if (s.norm() < 1e-11) break;
        const TangentVector tv = m.tangent_from_frame(x, s);
        const Point cand = m.geodesic(x, tv, s.norm());
        if (avg.value(cand, measure.weights) < f0) {
          x = cand;
          moved = true;
          break;
        }
      }
      if (!moved)
        throw solve_error("barycenter: no descent direction made progress", gn);
    }
  }
  const double gn = avg.grad_frame(x, measure.weights).norm();
  if (gn <= opts.grad_tol)
    return BarycenterResult{x, opts.max_iterations, gn};
  throw solve_error("barycenter: did not converge within the iteration budget", gn);
}

Point barycenter(const ModelSpace& m, const BoundaryMeasure& measure,
                 std::optional<Point> hint) {
  return barycenter_solve(m, measure, std::move(hint)).point;
}

// ---------------------------------------------------------------------------
// Straightening

StraighteningContext::StraighteningContext(const ModelSpace& m,
                                           std::vector<Point> vertices,
                                           int resolution)
    : StraighteningContext(m, std::move(vertices), sphere_quadrature(m, resolution)) {}

StraighteningContext::StraighteningContext(const ModelSpace& m,
                                           std::vector<Point> vertices,
                                           const BoundaryMeasure& reference)
    : model_(m), vertices_(std::move(vertices)), reference_(reference) {
  if (vertices_.empty())
    throw std::invalid_argument("StraighteningContext: no vertices");
  if (static_cast<int>(vertices_.size()) > m.dim() + 1)
    throw std::invalid_argument("StraighteningContext: simplex dimension exceeds n");
  averager_ = std::make_shared<BusemannAverager>(m, reference_.nodes);
  const VisualFamily family(m);
  for (const Point& v : vertices_)
    vertex_measures_.push_back(normalize(visual_measure(family, v, reference_)));
}

Vec StraighteningContext::mixed_weights(const SphericalPoint& delta) const {
  if (delta.a.size() != static_cast<Eigen::Index>(vertices_.size()))
    throw std::invalid_argument("straighten: wrong simplex coordinate size");
  Vec w = Vec::Zero(reference_.weights.size());
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const double a = delta.a[static_cast<Eigen::Index>(i)];
    w += a * a * vertex_measures_[i].weights;
  }
  return w;
}

Point StraighteningContext::straighten(const SphericalPoint& delta) const {
  BoundaryMeasure mixture = reference_;
  mixture.weights = mixed_weights(delta);
  // Chart average of the vertices, weighted by the mixing coefficients,
  // as the Newton start.
  Vec avg = Vec::Zero(model_.dim());
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const double a = delta.a[static_cast<Eigen::Index>(i)];
    avg += a * a * vertices_[i].x;
  }
  return barycenter(model_, mixture, model_.point(avg));
}

FormPair StraighteningContext::forms_at(const Point& st,
                                        const SphericalPoint& delta) const {
  FormPair out;
  out.at = st;
  averager_->forms(st, mixed_weights(delta), &out.h, &out.k);
  return out;
}

FormPair StraighteningContext::forms(const SphericalPoint& delta) const {
  return forms_at(straighten(delta), delta);
}

Mat StraighteningContext::tangent_basis(const SphericalPoint& delta) const {
  return orthonormal_complement(delta.a);
}

Mat StraighteningContext::d_straighten(const SphericalPoint& delta) const {
  const Point st = straighten(delta);
  const int n = model_.dim();
  const int kp1 = static_cast<int>(vertices_.size());

  Mat k_form;
  averager_->forms(st, mixed_weights(delta), nullptr, &k_form);
  Eigen::LDLT<Mat> solver(k_form);
  if (solver.info() != Eigen::Success || !solver.isPositive())
    throw solve_error("d_straighten: averaged Hessian is not positive definite", 0.0);

  Mat g(n, kp1);  // column i: int grad B d nu_{x_i} in the frame at st
  for (int i = 0; i < kp1; ++i)
    g.col(i) = averager_->grad_frame(st, vertex_measures_[static_cast<std::size_t>(i)].weights);

  const Mat basis = tangent_basis(delta);
  Mat d(n, basis.cols());
  for (int j = 0; j < basis.cols(); ++j) {
    Vec rhs = Vec::Zero(n);
    for (int i = 0; i < kp1; ++i)
      rhs -= 2.0 * delta.a[i] * basis(i, j) * g.col(i);
    d.col(j) = solver.solve(rhs);
  }
  return d;
}

JacobianChainResult StraighteningContext::jacobian_chain(
    const SphericalPoint& delta) const {
  const int n = model_.dim();
  if (simplex_dim() != n)
    throw std::invalid_argument("jacobian_chain: requires a top-dimensional simplex");
  const Point st = straighten(delta);
  const FormPair fp = forms_at(st, delta);
  const Mat d = d_straighten(delta);

  JacobianChainResult out;
  out.jac = d.determinant();
  out.det_h = std::max(0.0, fp.h.determinant());
  out.det_k = fp.k.determinant();
  out.lhs = std::abs(out.det_k * out.jac);
  out.rhs = std::pow(2.0, n) * std::sqrt(out.det_h);
  out.ratio = std::sqrt(out.det_h) / out.det_k;
  out.holds = out.lhs <= out.rhs + 1e-8;
  return out;
}

// ---------------------------------------------------------------------------
// Determinant-ratio envelope

namespace {

double envelope_objective(const Vec& mu) {
  double num = 1.0, den = 1.0;
  for (int i = 0; i < mu.size(); ++i) {
    if (mu[i] < 0.0) return 0.0;
    num *= std::sqrt(mu[i]);
    den *= (1.0 - mu[i]);
  }
  if (den <= 1e-300) return 0.0;
  return num / den;
}

void grid_search(Vec& mu, int pos, int remaining, int grid, Vec& best_mu,
                 double& best) {
  if (pos == mu.size() - 1) {
    mu[pos] = static_cast<double>(remaining) / grid;
    const double v = envelope_objective(mu);
    if (v > best) {
      best = v;
      best_mu = mu;
    }
    return;
  }
  for (int c = 0; c <= remaining; ++c) {
    mu[pos] = static_cast<double>(c) / grid;
    grid_search(mu, pos + 1, remaining - c, grid, best_mu, best);
  }
}

}  // namespace

double det_ratio_envelope(int n, int grid) {
  // In dimension 2 the ratio 1/sqrt(mu_1 mu_2) diverges as the measure
  // degenerates; no finite envelope exists.
  if (n < 3) throw std::invalid_argument("det_ratio_envelope: unbounded for n < 3");
  Vec mu = Vec::Zero(n), best_mu = Vec::Zero(n);
  double best = 0.0;
  grid_search(mu, 0, grid, grid, best_mu, best);

  // Pairwise mass-transfer refinement (golden section per pair).
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int sweep = 0; sweep < 200; ++sweep) {
    double improved = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double lo = -best_mu[i], hi = best_mu[j];
        auto eval = [&](double t) {
          Vec trial = best_mu;
          trial[i] += t;
          trial[j] -= t;
          return envelope_objective(trial);
        };
        double a = lo, b = hi;
        double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
        double f1 = eval(c1), f2 = eval(c2);
        for (int it = 0; it < 80; ++it) {
          if (f1 < f2) {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + gr * (b - a);
            f2 = eval(c2);
          } else {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - gr * (b - a);
            f1 = eval(c1);
          }
        }
        const double t = 0.5 * (a + b);
        const double v = eval(t);
        if (v > best) {
          improved += v - best;
          best = v;
          best_mu[i] += t;
          best_mu[j] -= t;
        }
      }
    }
    if (improved < 1e-15) break;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Ratio-bound sampling

RatioBoundReport ratio_bound_constant(const ModelSpace& m, int k_ricci,
                                      int samples, std::uint64_t seed,
                                      int resolution) {
  const RicciConditionReport ricci =
      check_negative_k_ricci(m, k_ricci, kDefaultRicciSamples, seed ^ 0xa5a5a5a5ULL);
  if (!ricci.holds)
    throw std::invalid_argument(
        "ratio_bound_constant: model fails the negative k-Ricci precheck");

  const int n = m.dim();
  const int k = n / 4;
  RatioBoundReport rep;
  rep.k = k;
  rep.samples = samples;
  rep.seed = seed;
  rep.c0_used = std::numeric_limits<double>::infinity();

  const BoundaryMeasure reference = sphere_quadrature(m, resolution);
  const BusemannAverager node_traces(m, reference.nodes);
  const Rng root(seed);

  struct SampleSpectra {
    Vec mu;
    Vec lambda;
    double ratio;
    double c0;
  };
  std::vector<SampleSpectra> spectra(static_cast<std::size_t>(samples));

  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t s) {
    Rng rng = root.fork(s);
    // Random vertex tuple and interior simplex coordinate.
    std::vector<Point> vertices;
    for (int i = 0; i <= n; ++i) {
      Vec xc(n);
      if (m.kind() == ModelKind::Hyperbolic) {
        xc = 0.6 * rng.uniform() * rng.unit_vec(n);
      } else {
        const int n1 = m.factor_dim(0);
        xc.head(n1) = 0.6 * rng.uniform() * rng.unit_vec(n1);
        xc.tail(n - n1) = 0.6 * rng.uniform() * rng.unit_vec(n - n1);
      }
      vertices.push_back(m.point(xc));
    }
    Vec sq(n + 1);
    for (int i = 0; i <= n; ++i) sq[i] = -std::log(std::max(rng.uniform(), 1e-300));
    sq /= sq.sum();
    const SphericalPoint delta = spherical_point(sq.cwiseSqrt());

    StraighteningContext ctx(m, vertices, reference);
    const Point st = ctx.straighten(delta);
    const FormPair fp = ctx.forms_at(st, delta);

    Eigen::SelfAdjointEigenSolver<Mat> eh(fp.h, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Mat> ek(fp.k, Eigen::EigenvaluesOnly);
    spectra[s] = SampleSpectra{
        eh.eigenvalues(), ek.eigenvalues(),
        std::sqrt(std::max(0.0, fp.h.determinant())) / fp.k.determinant(),
        node_traces.min_node_hessian_trace(st, k + 1)};
  });
  for (const SampleSpectra& sp : spectra) {
    rep.empirical_sup_ratio = std::max(rep.empirical_sup_ratio, sp.ratio);
    rep.c0_used = std::min(rep.c0_used, sp.c0);
    for (int i = 0; i < n; ++i)
      if (sp.mu[i] > 1.0 + 1e-9) ++rep.h_eigen_violations;
  }

  // Empirical comparison constant of the 2/3-power step, then the chain
  // verification with the global constants.
  for (const auto& sp : spectra) {
    const double l1 = sp.lambda[0];
    if (l1 <= 0.0) continue;
    for (int i = 0; i < n - k; ++i)
      rep.c_prime = std::max(
          rep.c_prime, sp.mu[i] / ((n - k) * std::pow(l1, 2.0 / 3.0)));
  }
  for (const auto& sp : spectra) {
    const double l1 = sp.lambda[0];
    const double lk1 = sp.lambda[k];  // lambda_{k+1}, ascending order
    if (lk1 < rep.c0_used / (k + 1) - 1e-9) ++rep.eigen_floor_violations;
    const double chain_bound =
        std::pow((n - k) * rep.c_prime * std::pow(l1, 2.0 / 3.0),
                 0.5 * (n - k)) /
        (std::pow(l1, k) * std::pow(lk1, n - k));
    if (sp.ratio > chain_bound + 1e-9 * std::max(1.0, chain_bound))
      ++rep.chain_violations;
  }
  return rep;
}

}  // namespace baryfold
