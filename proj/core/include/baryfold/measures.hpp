#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "baryfold/model.hpp"

namespace baryfold {

/// Point of the spherical simplex: a_i >= 0 with sum a_i^2 = 1.  Used as
/// mixing coefficients (the squares form a probability vector).
struct SphericalPoint {
  Vec a;
};

SphericalPoint spherical_point(Vec a);
/// Vertex e_i of the spherical simplex in R^{k+1}.
SphericalPoint spherical_vertex(int kplus1, int i);

/// Finite measure on the ideal boundary, represented by quadrature nodes and
/// nonnegative weights.  Node sets are shared between measures derived from
/// the same quadrature, which is what makes mixing well defined.
struct BoundaryMeasure {
  std::uint64_t model_id = 0;
  std::shared_ptr<const std::vector<IdealPoint>> nodes;
  Vec weights;
  /// True when the nodes form a net of the whole boundary at the generating
  /// resolution and every weight is strictly positive.
  bool full_support = false;
  /// Polynomial exactness degree of the generating quadrature (-1 when the
  /// measure was not quadrature generated).
  int exactness_degree = -1;
  int resolution = 0;

  double total_mass() const { return weights.sum(); }
  std::size_t size() const { return nodes ? nodes->size() : 0; }
};

/// Uniform reference measure nu_O on the ideal boundary, normalized to unit
/// mass.  Circle: equally spaced angles.  Higher spheres: tensor rules that
/// are exact for polynomials (Gauss-Legendre / Gauss-Chebyshev in the polar
/// angles with the sin-power weights folded in, trapezoid in azimuth).
/// Products: tensor of the factor spheres with a Gauss-Legendre slope grid,
/// uniformly weighted on [0, pi/2].  The horospherical boundary is not a
/// sphere and is not supported.
BoundaryMeasure sphere_quadrature(const ModelSpace& m, int resolution);

/// The visual measure family nu_x with density cocycle e^{-h (B(x,.) - B(y,.))}.
struct VisualFamily {
  ModelSpace model;
  double entropy = 0.0;

  explicit VisualFamily(const ModelSpace& m) : model(m), entropy(m.entropy()) {}
};

/// Densities e^{-h B(x, theta_i)} of the visual measure at x relative to the
/// reference measure, evaluated on a node set.
Vec visual_density(const VisualFamily& family, const Point& x,
                   const std::vector<IdealPoint>& nodes);

/// Visual measure mu_x: the reference reweighted by the visual density.
/// Unnormalized; the total mass is 1 only at the basepoint (exactly 1 on
/// hyperbolic space up to quadrature error, where the density is the
/// Poisson kernel to the power n-1).
BoundaryMeasure visual_measure(const VisualFamily& family, const Point& x,
                               const BoundaryMeasure& reference);

/// Rescale to unit total mass; rejects zero-mass input.
BoundaryMeasure normalize(const BoundaryMeasure& m);

/// Weighted mix sum_i a_i^2 m_i of normalized measures on a common node set.
BoundaryMeasure mix(const std::vector<BoundaryMeasure>& measures,
                    const SphericalPoint& coefficients);

/// Weighted sum of f over the measure's nodes.
double integrate(const BoundaryMeasure& m,
                 const std::function<double(const IdealPoint&)>& f);

/// CSV dump: one row per node (coordinates, then weight).
void measure_to_csv(const BoundaryMeasure& m, std::ostream& out);

}  // namespace baryfold
