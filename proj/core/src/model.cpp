#include "baryfold/model.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace baryfold {

namespace {

constexpr int kMaxDim = 6;

double conformal_factor(const Vec& x) { return 2.0 / (1.0 - x.squaredNorm()); }

std::uint64_t descriptor_hash(ModelKind kind, int n1, int n2,
                              const std::vector<double>& alphas) {
  std::ostringstream os;
  os << static_cast<int>(kind) << '|' << n1 << '|' << n2;
  for (double a : alphas) os << '|' << format_double(a);
  return fnv1a(os.str());
}

double ball_busemann(const Vec& y, const Vec& theta) {
  return std::log((y - theta).squaredNorm() / (1.0 - y.squaredNorm()));
}

// Euclidean gradient of the ball-model Busemann function; its Euclidean norm
// equals the conformal factor, so the Riemannian gradient is unit.
Vec ball_busemann_grad_euclid(const Vec& y, const Vec& theta) {
  return 2.0 * (y - theta) / (y - theta).squaredNorm() +
         2.0 * y / (1.0 - y.squaredNorm());
}

void integrate_horospherical_geodesic(const std::vector<double>& alphas,
                                      Vec& pos, Vec& vel, double t) {
  const int n = static_cast<int>(pos.size());
  auto deriv = [&](const Vec& p, const Vec& v, Vec& dp, Vec& dv) {
    dp = v;
    dv.resize(n);
    double acc_r = 0.0;
    for (int i = 1; i < n; ++i) {
      const double a = alphas[i - 1];
      acc_r -= a * std::exp(-2.0 * a * p[0]) * v[i] * v[i];
      dv[i] = 2.0 * a * v[0] * v[i];
    }
    dv[0] = acc_r;
  };
  const int steps = std::max(64, static_cast<int>(std::ceil(std::abs(t) / 0.005)));
  const double h = t / steps;
  Vec k1p(n), k1v(n), k2p(n), k2v(n), k3p(n), k3v(n), k4p(n), k4v(n);
  for (int s = 0; s < steps; ++s) {
    deriv(pos, vel, k1p, k1v);
    deriv(pos + 0.5 * h * k1p, vel + 0.5 * h * k1v, k2p, k2v);
    deriv(pos + 0.5 * h * k2p, vel + 0.5 * h * k2v, k3p, k3v);
    deriv(pos + h * k3p, vel + h * k3v, k4p, k4v);
    pos += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    vel += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
}

}  // namespace

ModelSpace ModelSpace::hyperbolic(int n) {
  if (n < 2 || n > kMaxDim)
    throw std::invalid_argument("ModelSpace: hyperbolic dimension must be in [2,6]");
  ModelSpace m;
  m.kind_ = ModelKind::Hyperbolic;
  m.dim_ = n;
  m.entropy_ = n - 1.0;
  m.id_ = descriptor_hash(m.kind_, n, 0, {});
  return m;
}

ModelSpace ModelSpace::product(int n1, int n2) {
  if (n1 < 2 || n2 < 2 || n1 + n2 > kMaxDim)
    throw std::invalid_argument("ModelSpace: product factors must be >= 2 with total <= 6");
  ModelSpace m;
  m.kind_ = ModelKind::Product;
  m.dim_ = n1 + n2;
  m.n1_ = n1;
  m.n2_ = n2;
  m.entropy_ = std::hypot(n1 - 1.0, n2 - 1.0);
  m.id_ = descriptor_hash(m.kind_, n1, n2, {});
  m.factors_.push_back(hyperbolic(n1));
  m.factors_.push_back(hyperbolic(n2));
  return m;
}

ModelSpace ModelSpace::horospherical(std::vector<double> alphas) {
  const int n = static_cast<int>(alphas.size()) + 1;
  if (n < 2 || n > kMaxDim)
    throw std::invalid_argument("ModelSpace: horospherical dimension must be in [2,6]");
  for (double a : alphas)
    if (!(a >= 0.0) || !std::isfinite(a))
      throw std::invalid_argument("ModelSpace: warping exponents must be >= 0");
  ModelSpace m;
  m.kind_ = ModelKind::Horospherical;
  m.dim_ = n;
  m.alphas_ = std::move(alphas);
  m.entropy_ = 0.0;
  for (double a : m.alphas_) m.entropy_ += a;
  m.id_ = descriptor_hash(m.kind_, n, 0, m.alphas_);
  return m;
}

int ModelSpace::factor_dim(int which) const {
  if (kind_ != ModelKind::Product) throw std::invalid_argument("factor_dim: not a product");
  return which == 0 ? n1_ : n2_;
}

const ModelSpace& ModelSpace::factor(int which) const {
  if (kind_ != ModelKind::Product) throw std::invalid_argument("factor: not a product");
  return factors_.at(which);
}

void ModelSpace::require_point(const Point& p) const {
  if (p.model_id != id_) throw std::invalid_argument("point belongs to a different model");
  if (p.x.size() != dim_) throw std::invalid_argument("point has wrong dimension");
}

void ModelSpace::require_ideal(const IdealPoint& t) const {
  if (t.model_id != id_)
    throw std::invalid_argument("ideal point belongs to a different model");
}

Point ModelSpace::origin() const { return point(Vec::Zero(dim_)); }

Point ModelSpace::point(Vec coords) const {
  if (coords.size() != dim_) throw std::invalid_argument("point: wrong dimension");
  if (!coords.allFinite()) throw std::invalid_argument("point: non-finite coordinates");
  switch (kind_) {
    case ModelKind::Hyperbolic:
      if (coords.norm() >= 1.0)
        throw std::invalid_argument("point: ball coordinates must satisfy |x| < 1");
      break;
    case ModelKind::Product:
      if (coords.head(n1_).norm() >= 1.0 || coords.tail(n2_).norm() >= 1.0)
        throw std::invalid_argument("point: each ball component must satisfy |x| < 1");
      break;
    case ModelKind::Horospherical:
      break;
  }
  Point p;
  p.model_id = id_;
  p.x = std::move(coords);
  return p;
}

TangentVector ModelSpace::tangent(const Point& p, Vec components) const {
  require_point(p);
  if (components.size() != dim_) throw std::invalid_argument("tangent: wrong dimension");
  if (!components.allFinite()) throw std::invalid_argument("tangent: non-finite components");
  return TangentVector{p, std::move(components)};
}

IdealPoint ModelSpace::ideal(Vec direction) const {
  if (kind_ != ModelKind::Hyperbolic)
    throw std::invalid_argument(
        kind_ == ModelKind::Horospherical
            ? "ideal: horospherical boundary exposes only the distinguished end"
            : "ideal: product boundary points need two directions and a slope");
  if (direction.size() != dim_ || direction.norm() < 1e-12)
    throw std::invalid_argument("ideal: need a nonzero direction of dimension n");
  IdealPoint t;
  t.model_id = id_;
  t.a = direction / direction.norm();
  return t;
}

IdealPoint ModelSpace::ideal(Vec dir1, Vec dir2, double slope) const {
  if (kind_ != ModelKind::Product)
    throw std::invalid_argument("ideal: join coordinates only apply to products");
  if (dir1.size() != n1_ || dir2.size() != n2_)
    throw std::invalid_argument("ideal: factor direction dimensions mismatch");
  if (dir1.norm() < 1e-12 || dir2.norm() < 1e-12)
    throw std::invalid_argument("ideal: factor directions must be nonzero");
  if (!(slope >= 0.0 && slope <= M_PI_2))
    throw std::invalid_argument("ideal: slope must lie in [0, pi/2]");
  IdealPoint t;
  t.model_id = id_;
  t.a = dir1 / dir1.norm();
  t.b = dir2 / dir2.norm();
  t.slope = slope;
  return t;
}

IdealPoint ModelSpace::ideal_end() const {
  if (kind_ != ModelKind::Horospherical)
    throw std::invalid_argument("ideal_end: only the horospherical family has a distinguished end");
  IdealPoint t;
  t.model_id = id_;
  return t;
}

// Frame vectors are chart-axis aligned in every model here (the metrics are
// diagonal in their charts), so the frame is stored as its diagonal.
static Vec frame_diagonal(ModelKind kind, int n1, int n2,
                          const std::vector<double>& alphas, const Vec& x) {
  const int n = static_cast<int>(x.size());
  Vec d(n);
  switch (kind) {
    case ModelKind::Hyperbolic:
      d.setConstant(1.0 / conformal_factor(x));
      break;
    case ModelKind::Product: {
      const double l1 = conformal_factor(x.head(n1));
      const double l2 = conformal_factor(x.tail(n2));
      d.head(n1).setConstant(1.0 / l1);
      d.tail(n2).setConstant(1.0 / l2);
      break;
    }
    case ModelKind::Horospherical:
      d[0] = 1.0;
      for (int i = 1; i < n; ++i) d[i] = std::exp(alphas[i - 1] * x[0]);
      break;
  }
  return d;
}

double ModelSpace::metric(const Point& p, const TangentVector& u,
                          const TangentVector& v) const {
  require_point(p);
  if (!same_point(p, u.base) || !same_point(p, v.base))
    throw std::invalid_argument("metric: tangent vectors based at a different point");
  const Vec d = frame_diagonal(kind_, n1_, n2_, alphas_, p.x);
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += u.v[i] * v.v[i] / (d[i] * d[i]);
  return s;
}

Mat ModelSpace::metric_matrix(const Point& p) const {
  require_point(p);
  const Vec d = frame_diagonal(kind_, n1_, n2_, alphas_, p.x);
  return d.cwiseAbs2().cwiseInverse().asDiagonal();
}

double ModelSpace::norm(const TangentVector& u) const {
  return std::sqrt(std::max(0.0, metric(u.base, u, u)));
}

double ModelSpace::distance(const Point& p, const Point& q) const {
  require_point(p);
  require_point(q);
  switch (kind_) {
    case ModelKind::Hyperbolic: {
      const double num = 2.0 * (p.x - q.x).squaredNorm();
      const double den = (1.0 - p.x.squaredNorm()) * (1.0 - q.x.squaredNorm());
      return std::acosh(1.0 + num / den);
    }
    case ModelKind::Product: {
      const double d1 = factor(0).distance(factor(0).point(p.x.head(n1_)),
                                           factor(0).point(q.x.head(n1_)));
      const double d2 = factor(1).distance(factor(1).point(p.x.tail(n2_)),
                                           factor(1).point(q.x.tail(n2_)));
      return std::hypot(d1, d2);
    }
    case ModelKind::Horospherical: {
      const TangentVector w = log_map(p, q);
      return norm(w);
    }
  }
  return 0.0;
}

Point ModelSpace::geodesic(const Point& p, const TangentVector& direction,
                           double t) const {
  require_point(p);
  if (!same_point(p, direction.base))
    throw std::invalid_argument("geodesic: direction based at a different point");
  const double speed = norm(direction);
  if (speed < 1e-12) throw std::invalid_argument("geodesic: zero direction");
  switch (kind_) {
    case ModelKind::Hyperbolic: {
      // Push the radial geodesic from the origin by the Mobius translation
      // taking 0 to p; its differential at 0 is scalar, so directions pull
      // back unchanged up to scale.
      const Vec w = direction.v / direction.v.norm();
      return point(mobius_add(p.x, std::tanh(0.5 * t) * w));
    }
    case ModelKind::Product: {
      const ModelSpace& m1 = factor(0);
      const ModelSpace& m2 = factor(1);
      const Point p1 = m1.point(p.x.head(n1_));
      const Point p2 = m2.point(p.x.tail(n2_));
      // Normalize first so the factor speeds live on an absolute scale;
      // a negligible factor component leaves that factor constant.
      const Vec u1 = direction.v.head(n1_) / speed;
      const Vec u2 = direction.v.tail(n2_) / speed;
      const double c1 = m1.norm(m1.tangent(p1, u1));
      const double c2 = m2.norm(m2.tangent(p2, u2));
      Vec out(dim_);
      out.head(n1_) =
          (c1 < 1e-11) ? p1.x : m1.geodesic(p1, m1.tangent(p1, u1), t * c1).x;
      out.tail(n2_) =
          (c2 < 1e-11) ? p2.x : m2.geodesic(p2, m2.tangent(p2, u2), t * c2).x;
      return point(out);
    }
    case ModelKind::Horospherical: {
      Vec pos = p.x;
      Vec vel = direction.v / speed;
      integrate_horospherical_geodesic(alphas_, pos, vel, t);
      return point(pos);
    }
  }
  throw std::logic_error("unreachable");
}

TangentVector ModelSpace::log_map(const Point& p, const Point& q) const {
  require_point(p);
  require_point(q);
  switch (kind_) {
    case ModelKind::Hyperbolic: {
      const Vec z = mobius_add(-p.x, q.x);
      const double r = z.norm();
      if (r < 1e-300) return tangent(p, Vec::Zero(dim_));
      return tangent(p, (1.0 - p.x.squaredNorm()) * std::atanh(r) * (z / r));
    }
    case ModelKind::Product: {
      const ModelSpace& m1 = factor(0);
      const ModelSpace& m2 = factor(1);
      Vec w(dim_);
      w.head(n1_) =
          m1.log_map(m1.point(p.x.head(n1_)), m1.point(q.x.head(n1_))).v;
      w.tail(n2_) =
          m2.log_map(m2.point(p.x.tail(n2_)), m2.point(q.x.tail(n2_))).v;
      return tangent(p, w);
    }
    case ModelKind::Horospherical: {
      // Shooting: damped Gauss-Newton on w |-> exp_p(w) - target in the
      // global chart.  Shots that dive into the expanding region overflow,
      // so non-finite endpoints are treated as huge residuals, and hard
      // targets are reached by a homotopy along the chart segment with
      // warm starts.
      auto shoot = [&](const Vec& wv, const Vec& target) -> Vec {
        const double len = std::sqrt(
            metric(p, TangentVector{p, wv}, TangentVector{p, wv}));
        if (len < 1e-14) return p.x - target;
        Vec pos = p.x, vel = wv / len;
        integrate_horospherical_geodesic(alphas_, pos, vel, len);
        if (!pos.allFinite()) return Vec::Constant(dim_, 1e60);
        return pos - target;
      };
      auto solve_to = [&](Vec w, const Vec& target, double tol) -> std::pair<Vec, double> {
        Vec f = shoot(w, target);
        for (int iter = 0; iter < 80 && f.norm() > tol; ++iter) {
          Mat jac(dim_, dim_);
          const double eps = std::max(1e-7, 1e-7 * w.norm());
          for (int j = 0; j < dim_; ++j) {
            Vec wp = w;
            wp[j] += eps;
            jac.col(j) = (shoot(wp, target) - f) / eps;
          }
          const Vec step = jac.fullPivLu().solve(-f);
          double damp = 1.0;
          Vec w_new = w + step;
          Vec f_new = shoot(w_new, target);
          while (f_new.norm() > f.norm() && damp > 1e-8) {
            damp *= 0.5;
            w_new = w + damp * step;
            f_new = shoot(w_new, target);
          }
          if (f_new.norm() >= f.norm()) break;
          w = w_new;
          f = f_new;
        }
        return {w, f.norm()};
      };

      Vec w = q.x - p.x;
      auto [w_direct, resid] = solve_to(w, q.x, 1e-11);
      if (resid <= 1e-8) return tangent(p, w_direct);

      // Homotopy along the chart segment toward q, halving the step on
      // stage failures.
      w = Vec::Zero(dim_);
      double lambda = 0.0, step_size = 0.25;
      int stages = 0;
      while (lambda < 1.0 && stages < 200) {
        const double next = std::min(1.0, lambda + step_size);
        const Vec target = p.x + next * (q.x - p.x);
        Vec init = (lambda > 0.0) ? Vec((next / lambda) * w) : Vec(target - p.x);
        auto [w_stage, r_stage] = solve_to(init, target, 1e-11);
        if (r_stage <= 1e-8) {
          w = w_stage;
          lambda = next;
          step_size = std::min(0.25, step_size * 2.0);
          ++stages;
        } else {
          step_size *= 0.5;
          ++stages;
          if (step_size < 1e-4)
            throw solve_error("log_map: horospherical shooting did not converge",
                              r_stage);
        }
      }
      if (lambda < 1.0)
        throw solve_error("log_map: horospherical homotopy stalled", lambda);
      return tangent(p, w);
    }
  }
  throw std::logic_error("unreachable");
}

Mat ModelSpace::curvature_table() const {
  Mat k = Mat::Zero(dim_, dim_);
  switch (kind_) {
    case ModelKind::Hyperbolic:
      k.setOnes();
      k.diagonal().setZero();
      break;
    case ModelKind::Product:
      k.topLeftCorner(n1_, n1_).setOnes();
      k.bottomRightCorner(n2_, n2_).setOnes();
      k.diagonal().setZero();
      break;
    case ModelKind::Horospherical:
      for (int i = 1; i < dim_; ++i) {
        k(0, i) = k(i, 0) = alphas_[i - 1] * alphas_[i - 1];
        for (int j = i + 1; j < dim_; ++j)
          k(i, j) = k(j, i) = alphas_[i - 1] * alphas_[j - 1];
      }
      break;
  }
  return k;
}

TangentVector ModelSpace::curvature_tensor(const Point& p, const TangentVector& u,
                                           const TangentVector& v,
                                           const TangentVector& w) const {
  require_point(p);
  if (!same_point(p, u.base) || !same_point(p, v.base) || !same_point(p, w.base))
    throw std::invalid_argument("curvature_tensor: mismatched base points");
  const Vec d = frame_diagonal(kind_, n1_, n2_, alphas_, p.x);
  const Vec uf = u.v.cwiseQuotient(d);
  const Vec vf = v.v.cwiseQuotient(d);
  const Vec wf = w.v.cwiseQuotient(d);
  const Mat k = curvature_table();
  // Frame-diagonal curvature: R_{abcd} = K_{ab} (d_ac d_bd - d_ad d_bc).
  Vec rf(dim_);
  for (int idx = 0; idx < dim_; ++idx) {
    double s1 = 0.0, s2 = 0.0;
    for (int a = 0; a < dim_; ++a) {
      s1 += k(a, idx) * uf[a] * wf[a];
      s2 += k(idx, a) * vf[a] * wf[a];
    }
    rf[idx] = vf[idx] * s1 - uf[idx] * s2;
  }
  return tangent(p, rf.cwiseProduct(d));
}

double ModelSpace::sectional_curvature(const Point& p, const TangentVector& u,
                                       const TangentVector& v) const {
  const double guu = metric(p, u, u);
  const double gvv = metric(p, v, v);
  const double guv = metric(p, u, v);
  const double area2 = guu * gvv - guv * guv;
  if (area2 < 1e-14)
    throw std::invalid_argument("sectional_curvature: degenerate 2-plane");
  const TangentVector rvv = curvature_tensor(p, u, v, v);
  return metric(p, rvv, u) / area2;
}

double ModelSpace::busemann(const Point& x, const IdealPoint& theta) const {
  require_point(x);
  require_ideal(theta);
  switch (kind_) {
    case ModelKind::Hyperbolic:
      return ball_busemann(x.x, theta.a);
    case ModelKind::Product:
      return std::cos(theta.slope) * ball_busemann(x.x.head(n1_), theta.a) +
             std::sin(theta.slope) * ball_busemann(x.x.tail(n2_), theta.b);
    case ModelKind::Horospherical:
      return -x.x[0];
  }
  throw std::logic_error("unreachable");
}

TangentVector ModelSpace::grad_busemann(const Point& x, const IdealPoint& theta) const {
  require_point(x);
  require_ideal(theta);
  const Vec d = frame_diagonal(kind_, n1_, n2_, alphas_, x.x);
  Vec g(dim_);
  switch (kind_) {
    case ModelKind::Hyperbolic:
      // chart components: Euclidean gradient over the conformal factor^2
      g = ball_busemann_grad_euclid(x.x, theta.a).cwiseProduct(d.cwiseAbs2());
      break;
    case ModelKind::Product: {
      const Vec g1 = ball_busemann_grad_euclid(x.x.head(n1_), theta.a);
      const Vec g2 = ball_busemann_grad_euclid(x.x.tail(n2_), theta.b);
      g.head(n1_) = std::cos(theta.slope) * g1;
      g.tail(n2_) = std::sin(theta.slope) * g2;
      g = g.cwiseProduct(d.cwiseAbs2());
      break;
    }
    case ModelKind::Horospherical:
      g.setZero();
      g[0] = -1.0;
      break;
  }
  return tangent(x, g);
}

Mat ModelSpace::hess_busemann(const Point& x, const IdealPoint& theta) const {
  require_point(x);
  require_ideal(theta);
  switch (kind_) {
    case ModelKind::Hyperbolic: {
      // DdB = g - dB (x) dB; in the orthonormal frame this is I - b b^T.
      const Vec d = frame_diagonal(kind_, n1_, n2_, alphas_, x.x);
      const Vec b = ball_busemann_grad_euclid(x.x, theta.a).cwiseProduct(d);
      return Mat::Identity(dim_, dim_) - b * b.transpose();
    }
    case ModelKind::Product: {
      const Vec d1 = frame_diagonal(ModelKind::Hyperbolic, 0, 0, {}, x.x.head(n1_));
      const Vec d2 = frame_diagonal(ModelKind::Hyperbolic, 0, 0, {}, x.x.tail(n2_));
      const Vec b1 = ball_busemann_grad_euclid(x.x.head(n1_), theta.a).cwiseProduct(d1);
      const Vec b2 = ball_busemann_grad_euclid(x.x.tail(n2_), theta.b).cwiseProduct(d2);
      Mat h = Mat::Zero(dim_, dim_);
      h.topLeftCorner(n1_, n1_) =
          std::cos(theta.slope) * (Mat::Identity(n1_, n1_) - b1 * b1.transpose());
      h.bottomRightCorner(n2_, n2_) =
          std::sin(theta.slope) * (Mat::Identity(n2_, n2_) - b2 * b2.transpose());
      return h;
    }
    case ModelKind::Horospherical: {
      Mat h = Mat::Zero(dim_, dim_);
      for (int i = 1; i < dim_; ++i) h(i, i) = alphas_[i - 1];
      return h;
    }
  }
  throw std::logic_error("unreachable");
}

TangentVector ModelSpace::ray_direction(const Point& x, const IdealPoint& theta) const {
  TangentVector g = grad_busemann(x, theta);
  g.v = -g.v;
  return g;
}

Point ModelSpace::geodesic_ray(const Point& x, const IdealPoint& theta, double t) const {
  return geodesic(x, ray_direction(x, theta), t);
}

Mat ModelSpace::orthonormal_frame(const Point& p) const {
  require_point(p);
  return Mat(frame_diagonal(kind_, n1_, n2_, alphas_, p.x).asDiagonal());
}

Vec ModelSpace::frame_coords(const Point& p, const TangentVector& u) const {
  require_point(p);
  if (!same_point(p, u.base))
    throw std::invalid_argument("frame_coords: tangent based at a different point");
  return u.v.cwiseQuotient(frame_diagonal(kind_, n1_, n2_, alphas_, p.x));
}

TangentVector ModelSpace::tangent_from_frame(const Point& p, const Vec& coords) const {
  require_point(p);
  if (coords.size() != dim_)
    throw std::invalid_argument("tangent_from_frame: wrong dimension");
  return TangentVector{
      p, coords.cwiseProduct(frame_diagonal(kind_, n1_, n2_, alphas_, p.x))};
}

bool ModelSpace::same_point(const Point& p, const Point& q, double tol) const {
  return p.model_id == q.model_id && p.x.size() == q.x.size() &&
         (p.x - q.x).lpNorm<Eigen::Infinity>() <= tol;
}

// ---------------------------------------------------------------------------
// Mobius machinery

Vec mobius_add(const Vec& a, const Vec& x) {
  const double ax = a.dot(x);
  const double a2 = a.squaredNorm();
  const double x2 = x.squaredNorm();
  const double den = 1.0 + 2.0 * ax + a2 * x2;
  return ((1.0 + 2.0 * ax + x2) * a + (1.0 - a2) * x) / den;
}

Mat mobius_add_jacobian(const Vec& a, const Vec& y) {
  const int n = static_cast<int>(a.size());
  const double ay = a.dot(y);
  const double a2 = a.squaredNorm();
  const double y2 = y.squaredNorm();
  const double den = 1.0 + 2.0 * ay + a2 * y2;
  const Vec num = (1.0 + 2.0 * ay + y2) * a + (1.0 - a2) * y;
  const Vec grad_den = 2.0 * a + 2.0 * a2 * y;
  Mat jn = a * (2.0 * a + 2.0 * y).transpose() + (1.0 - a2) * Mat::Identity(n, n);
  return jn / den - num * grad_den.transpose() / (den * den);
}

Mat random_rotation(Rng& rng, int n) {
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Isometry Isometry::mobius(const ModelSpace& m, Vec p, Mat rotation) {
  if (m.kind() != ModelKind::Hyperbolic)
    throw std::invalid_argument("Isometry::mobius: wrong model kind");
  if (p.size() != m.dim() || p.norm() >= 1.0)
    throw std::invalid_argument("Isometry::mobius: translation must lie in the ball");
  Isometry g;
  g.model_ = std::make_shared<ModelSpace>(m);
  g.p_.push_back(std::move(p));
  g.q_.push_back(std::move(rotation));
  return g;
}

Isometry Isometry::product_pair(const ModelSpace& m, const Isometry& g1,
                                const Isometry& g2) {
  if (m.kind() != ModelKind::Product)
    throw std::invalid_argument("Isometry::product_pair: wrong model kind");
  Isometry g;
  g.model_ = std::make_shared<ModelSpace>(m);
  g.p_ = {g1.p_.at(0), g2.p_.at(0)};
  g.q_ = {g1.q_.at(0), g2.q_.at(0)};
  return g;
}

Isometry Isometry::horospherical(const ModelSpace& m, double shift, Vec translate) {
  if (m.kind() != ModelKind::Horospherical)
    throw std::invalid_argument("Isometry::horospherical: wrong model kind");
  if (translate.size() != m.dim() - 1)
    throw std::invalid_argument("Isometry::horospherical: wrong translation dimension");
  Isometry g;
  g.model_ = std::make_shared<ModelSpace>(m);
  g.shift_ = shift;
  g.translate_ = std::move(translate);
  return g;
}

Isometry Isometry::random(const ModelSpace& m, Rng& rng, double scale) {
  switch (m.kind()) {
    case ModelKind::Hyperbolic: {
      const Vec p = scale * rng.uniform() * rng.unit_vec(m.dim());
      return mobius(m, p, random_rotation(rng, m.dim()));
    }
    case ModelKind::Product: {
      const Isometry g1 = random(m.factor(0), rng, scale);
      const Isometry g2 = random(m.factor(1), rng, scale);
      return product_pair(m, g1, g2);
    }
    case ModelKind::Horospherical:
      return horospherical(m, scale * (2.0 * rng.uniform() - 1.0),
                           scale * rng.normal_vec(m.dim() - 1));
  }
  throw std::logic_error("unreachable");
}

Point Isometry::apply(const Point& p) const {
  const ModelSpace& m = *model_;
  switch (m.kind()) {
    case ModelKind::Hyperbolic:
      return m.point(mobius_add(p_[0], q_[0] * p.x));
    case ModelKind::Product: {
      const int n1 = m.factor_dim(0);
      Vec out(m.dim());
      out.head(n1) = mobius_add(p_[0], q_[0] * p.x.head(n1));
      out.tail(m.dim() - n1) = mobius_add(p_[1], q_[1] * p.x.tail(m.dim() - n1));
      return m.point(out);
    }
    case ModelKind::Horospherical: {
      Vec out(m.dim());
      out[0] = p.x[0] + shift_;
      for (int i = 1; i < m.dim(); ++i)
        out[i] = std::exp(m.alphas()[i - 1] * shift_) * p.x[i] + translate_[i - 1];
      return m.point(out);
    }
  }
  throw std::logic_error("unreachable");
}

IdealPoint Isometry::apply(const IdealPoint& t) const {
  const ModelSpace& m = *model_;
  switch (m.kind()) {
    case ModelKind::Hyperbolic: {
      Vec img = mobius_add(p_[0], q_[0] * t.a);
      return m.ideal(img);
    }
    case ModelKind::Product: {
      Vec i1 = mobius_add(p_[0], q_[0] * t.a);
      Vec i2 = mobius_add(p_[1], q_[1] * t.b);
      return m.ideal(i1, i2, t.slope);
    }
    case ModelKind::Horospherical:
      return m.ideal_end();
  }
  throw std::logic_error("unreachable");
}

Mat Isometry::differential(const Point& p) const {
  const ModelSpace& m = *model_;
  switch (m.kind()) {
    case ModelKind::Hyperbolic:
      return mobius_add_jacobian(p_[0], q_[0] * p.x) * q_[0];
    case ModelKind::Product: {
      const int n1 = m.factor_dim(0);
      const int n2 = m.dim() - n1;
      Mat j = Mat::Zero(m.dim(), m.dim());
      j.topLeftCorner(n1, n1) =
          mobius_add_jacobian(p_[0], q_[0] * p.x.head(n1)) * q_[0];
      j.bottomRightCorner(n2, n2) =
          mobius_add_jacobian(p_[1], q_[1] * p.x.tail(n2)) * q_[1];
      return j;
    }
    case ModelKind::Horospherical: {
      Mat j = Mat::Zero(m.dim(), m.dim());
      j(0, 0) = 1.0;
      for (int i = 1; i < m.dim(); ++i)
        j(i, i) = std::exp(m.alphas()[i - 1] * shift_);
      return j;
    }
  }
  throw std::logic_error("unreachable");
}

TangentVector Isometry::apply(const TangentVector& u) const {
  const Point image = apply(u.base);
  return TangentVector{image, differential(u.base) * u.v};
}

Isometry Isometry::inverse() const {
  const ModelSpace& m = *model_;
  Isometry g;
  g.model_ = model_;
  switch (m.kind()) {
    case ModelKind::Hyperbolic:
      // (p (+) Qx)^{-1} = (-Q^T p) (+) (Q^T x): rotations distribute over
      // Mobius addition.
      g.p_.push_back(-(q_[0].transpose() * p_[0]));
      g.q_.push_back(q_[0].transpose());
      return g;
    case ModelKind::Product:
      g.p_ = {-(q_[0].transpose() * p_[0]), -(q_[1].transpose() * p_[1])};
      g.q_ = {q_[0].transpose(), q_[1].transpose()};
      return g;
    case ModelKind::Horospherical: {
      g.shift_ = -shift_;
      g.translate_.resize(m.dim() - 1);
      for (int i = 1; i < m.dim(); ++i)
        g.translate_[i - 1] =
            -std::exp(-m.alphas()[i - 1] * shift_) * translate_[i - 1];
      return g;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace baryfold
