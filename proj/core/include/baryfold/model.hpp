#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "baryfold/numeric.hpp"

namespace baryfold {

enum class ModelKind { Hyperbolic, Product, Horospherical };

/// A point of a model space, in chart coordinates.
///   Hyperbolic(n):        Poincare ball coordinates, |x| < 1.
///   Product(n1,n2):       concatenated ball coordinates [x1; x2].
///   Horospherical(alpha): (r, x) chart of dr^2 + sum_i e^{-2 a_i r} dx_i^2.
struct Point {
  std::uint64_t model_id = 0;
  Vec x;
};

/// Tangent vector in chart components, attached to its base point.
struct TangentVector {
  Point base;
  Vec v;
};

/// Point of the ideal boundary.
///   Hyperbolic:     unit vector `a` on S^{n-1}.
///   Product:        factor directions `a`, `b` plus a slope in [0, pi/2];
///                   slope 0 points into the first factor, pi/2 the second.
///   Horospherical:  only the distinguished end r -> +infinity (no data).
struct IdealPoint {
  std::uint64_t model_id = 0;
  Vec a;
  Vec b;
  double slope = 0.0;
};

class Isometry;

/// One of the explicit simply connected nonpositively curved model spaces.
/// Immutable after construction; all operations are pure and safe to call
/// concurrently.
class ModelSpace {
 public:
  static ModelSpace hyperbolic(int n);
  static ModelSpace product(int n1, int n2);
  static ModelSpace horospherical(std::vector<double> alphas);

  ModelKind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// Closed-form volume growth entropy: n-1, sqrt((n1-1)^2+(n2-1)^2), or
  /// sum of the warping exponents.
  double entropy() const { return entropy_; }
  std::uint64_t id() const { return id_; }
  int factor_dim(int which) const;
  const std::vector<double>& alphas() const { return alphas_; }
  /// Factor model of a product space (which = 0 or 1).
  const ModelSpace& factor(int which) const;

  // -- points and tangent vectors --------------------------------------

  Point origin() const;
  Point point(Vec coords) const;  // validates chart invariants
  TangentVector tangent(const Point& p, Vec components) const;

  IdealPoint ideal(Vec direction) const;                     // hyperbolic
  IdealPoint ideal(Vec dir1, Vec dir2, double slope) const;  // product
  IdealPoint ideal_end() const;                              // horospherical

  // -- metric structure -------------------------------------------------

  /// Riemannian inner product of two tangent vectors at p.
  double metric(const Point& p, const TangentVector& u,
                const TangentVector& v) const;
  /// Gram matrix of the chart basis at p.
  Mat metric_matrix(const Point& p) const;
  double norm(const TangentVector& u) const;

  double distance(const Point& p, const Point& q) const;

  /// Unit-speed geodesic through p; the direction is normalized internally
  /// and must be nonzero.
  Point geodesic(const Point& p, const TangentVector& direction,
                 double t) const;
  /// Inverse of the exponential map: tangent w at p with exp_p(w) = q and
  /// |w| = d(p, q).
  TangentVector log_map(const Point& p, const Point& q) const;

  // -- curvature ---------------------------------------------------------

  /// Curvature tensor R(u,v)w, with the convention that constant curvature
  /// -1 gives R(u,v)w = -(<v,w>u - <u,w>v).
  TangentVector curvature_tensor(const Point& p, const TangentVector& u,
                                 const TangentVector& v,
                                 const TangentVector& w) const;
  double sectional_curvature(const Point& p, const TangentVector& u,
                             const TangentVector& v) const;
  /// Table K(a,b) = -sec(e_a, e_b) of pairwise plane curvatures of the
  /// orthonormal frame; the curvature tensor of every model here is
  /// frame-diagonal with respect to orthonormal_frame().
  Mat curvature_table() const;

  // -- Busemann data -----------------------------------------------------

  /// Basepoint-normalized Busemann function B(O, x, theta).
  double busemann(const Point& x, const IdealPoint& theta) const;
  /// Riemannian gradient of B(., theta) at x; unit norm everywhere.
  TangentVector grad_busemann(const Point& x, const IdealPoint& theta) const;
  /// Hessian Dd B(., theta) at x as a symmetric matrix in the orthonormal
  /// frame; positive semidefinite, annihilating the direction toward theta.
  Mat hess_busemann(const Point& x, const IdealPoint& theta) const;
  /// Unit tangent at x pointing toward theta (equals -grad_busemann).
  TangentVector ray_direction(const Point& x, const IdealPoint& theta) const;
  Point geodesic_ray(const Point& x, const IdealPoint& theta, double t) const;

  // -- frames ------------------------------------------------------------

  /// Orthonormal frame at p: columns are chart components of the frame
  /// vectors, built by Gram-Schmidt on the chart basis in index order.
  Mat orthonormal_frame(const Point& p) const;
  Vec frame_coords(const Point& p, const TangentVector& u) const;
  TangentVector tangent_from_frame(const Point& p, const Vec& coords) const;

  bool same_point(const Point& p, const Point& q, double tol = 1e-12) const;

 private:
  ModelSpace() = default;
  void require_point(const Point& p) const;
  void require_ideal(const IdealPoint& t) const;

  ModelKind kind_ = ModelKind::Hyperbolic;
  int dim_ = 0;
  int n1_ = 0, n2_ = 0;
  std::vector<double> alphas_;
  double entropy_ = 0.0;
  std::uint64_t id_ = 0;
  std::vector<ModelSpace> factors_;
};

// -- Mobius machinery of the Poincare ball --------------------------------

/// Mobius addition a (+) x on the unit ball; x |-> a (+) x is the standard
/// isometry taking the origin to a.
Vec mobius_add(const Vec& a, const Vec& x);

/// Chart Jacobian of y |-> a (+) y at y.
Mat mobius_add_jacobian(const Vec& a, const Vec& y);

/// Isometry of a model space.  Ball models use x |-> p (+) (Q x); products
/// act factorwise; the horospherical family combines the vertical shift
/// (r, x) |-> (r + c, e^{a_i c} x_i) with horizontal translations.
class Isometry {
 public:
  static Isometry mobius(const ModelSpace& m, Vec p, Mat rotation);
  static Isometry product_pair(const ModelSpace& m, const Isometry& g1,
                               const Isometry& g2);
  static Isometry horospherical(const ModelSpace& m, double shift,
                                Vec translate);
  /// Seeded random isometry with translation scale `scale` (chart radius of
  /// the Mobius part, or shift/translation magnitude).
  static Isometry random(const ModelSpace& m, Rng& rng, double scale);

  Point apply(const Point& p) const;
  IdealPoint apply(const IdealPoint& t) const;
  TangentVector apply(const TangentVector& u) const;
  /// Chart Jacobian of the map at p.
  Mat differential(const Point& p) const;
  Isometry inverse() const;
  const ModelSpace& space() const { return *model_; }

 private:
  Isometry() = default;
  std::shared_ptr<const ModelSpace> model_;
  // Ball part (hyperbolic, or one entry per product factor):
  std::vector<Vec> p_;
  std::vector<Mat> q_;
  // Horospherical part:
  double shift_ = 0.0;
  Vec translate_;
};

/// Deterministic random rotation matrix (QR of a Gaussian sample with sign
/// normalization).
Mat random_rotation(Rng& rng, int n);

}  // namespace baryfold
