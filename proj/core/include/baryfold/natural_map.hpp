#pragma once

#include <cstdint>
#include <memory>

#include "baryfold/straightening.hpp"

namespace baryfold {

/// Smooth map between model spaces, from a catalog that keeps
/// differentiability under control: isometries, chart perturbations of the
/// identity, and compositions.
class SmoothMap {
 public:
  static SmoothMap identity(const ModelSpace& m);
  static SmoothMap isometry(const Isometry& g);
  /// phi(x) = x + amplitude (1-|x|^2) sin(frequency pi x) per ball block;
  /// the amplitude is capped so the map stays a diffeomorphism onto its
  /// image inside the ball.
  static SmoothMap perturbed_identity(const ModelSpace& m, double amplitude,
                                      double frequency);
  static SmoothMap composition(const SmoothMap& outer, const SmoothMap& inner);

  Point apply(const Point& p) const;
  const ModelSpace& domain() const { return *domain_; }
  const ModelSpace& codomain() const { return *codomain_; }

 private:
  SmoothMap() = default;
  enum class Kind { Identity, IsometryMap, Perturbed, Composed };
  Kind kind_ = Kind::Identity;
  std::shared_ptr<const ModelSpace> domain_, codomain_;
  std::shared_ptr<const Isometry> isometry_;
  double amplitude_ = 0.0, frequency_ = 0.0;
  std::shared_ptr<const SmoothMap> outer_, inner_;
};

/// Heat-like source measure: density e^{-s d(y, .)} against the Riemannian
/// volume, discretized in geodesic polar coordinates around y and
/// normalized.  Defined for s above the volume entropy of the model.
struct SourceMeasure {
  Point center;
  double s = 0.0;
  double r_trunc = 0.0;
  double tail_bound = 0.0;  // e^{(h - s) r_trunc}, the targeted tail mass
  std::vector<Point> nodes;
  Vec weights;

  /// Weighted mean of d(center, z); concentrates like n/s for large s.
  double mean_displacement(const ModelSpace& m) const;
};

/// Margin required above the entropy.
constexpr double kEntropyMargin = 0.05;
/// Chart range cap on the truncation radius (ball coordinates saturate
/// in double precision near r = 35).
constexpr double kMaxTruncationRadius = 30.0;

/// r_trunc <= 0 selects the tail-bound formula radius (targeting 1e-8 of
/// the retained mass, capped at the chart range).
SourceMeasure source_measure(const ModelSpace& m, const Point& y, double s,
                             double r_trunc, int resolution);

/// Convolution of the pushforward of a source measure with the visual
/// family: node weights sum_z w_z times the visual density of mu_{phi(z)}.
/// Not a probability measure in general; the barycenter is scale invariant.
/// normalized_family selects the nu_z = mu_z/|mu_z| convention instead of
/// the unnormalized family.
BoundaryMeasure convolve(const SourceMeasure& src, const SmoothMap& map,
                         const VisualFamily& family,
                         const BoundaryMeasure& reference,
                         bool normalized_family = false);

/// Rotationally symmetric potential of the visual family on H^n: by
/// symmetry the averaged Busemann of a visual measure is a function of
/// distance alone, int B(x, theta) d mu_z(theta) = q(d(x, z)) + c(z).
/// Tabulated once per dimension from a split 1-d quadrature; this reduces
/// convolved barycenters to a profile problem that is exact in the
/// boundary variable (the boundary density of a far-away visual measure is
/// a spike no fixed grid resolves).
class VisualPotential {
 public:
  explicit VisualPotential(int n);
  int dim() const { return n_; }
  double value(double t) const;        // q(t), normalized to q(0) = 0
  double derivative(double t) const;   // q'(t), increasing to 1
  double second_derivative(double t) const;
  /// Shared per-dimension instance.
  static const VisualPotential& get(int n);

 private:
  int n_ = 0;
  double dt_ = 0.0, tmax_ = 0.0;
  std::vector<double> q_, qp_, qpp_;
};

struct NaturalMapOptions {
  int source_resolution = 12;
  int boundary_resolution = 16;
  double r_trunc = 0.0;  // <= 0: automatic
  bool normalized_family = false;
  /// Route hyperbolic-model evaluations through the radial potential
  /// (exact in the boundary variable); products always use the boundary
  /// grid.
  bool use_potential = true;
};

/// The natural map F_s(y): barycenter of the convolved measure.
Point natural_map(const SmoothMap& map, const VisualFamily& family,
                  const Point& y, double s, const NaturalMapOptions& opts = {});

struct NaturalJacobianResult {
  double jac = 0.0;    // signed determinant of the finite-difference DF_s
  double bound = 0.0;  // (s/sqrt(n))^n times the determinant-ratio constant
  double c_ratio = 0.0;
  bool holds = false;
};

constexpr double kJacobianFdStep = 1e-3;

/// Jacobian of the natural map by central finite differences in the
/// orthonormal frame, checked against the (s/sqrt n)^n bound.  c_ratio <= 0
/// selects the constant-curvature determinant-ratio envelope of the
/// codomain dimension.
NaturalJacobianResult jacobian_natural_map(const SmoothMap& map,
                                           const VisualFamily& family,
                                           const Point& y, double s,
                                           double c_ratio = 0.0,
                                           const NaturalMapOptions& opts = {});

/// Volume growth entropy by least-squares slope of log vol B(y, r) over
/// [r0, r1].  Supported on hyperbolic and product models, where ball
/// volumes reduce to explicit quadratures.
double entropy_estimate(const ModelSpace& m, double r0, double r1,
                        int npoints = 16);

}  // namespace baryfold
