#include <cmath>

#include "doctest.h"

#include "baryfold/natural_map.hpp"
#include "oracles.hpp"

using namespace baryfold;

TEST_CASE("smooth map catalog") {
  const ModelSpace m = ModelSpace::hyperbolic(2);
  CHECK_THROWS_AS(SmoothMap::perturbed_identity(m, 0.5, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(
      SmoothMap::perturbed_identity(ModelSpace::horospherical({1.0}), 0.01, 1.0),
      std::invalid_argument);
  const SmoothMap f = SmoothMap::perturbed_identity(m, 0.02, 1.0);
  const SmoothMap id3 = SmoothMap::identity(ModelSpace::hyperbolic(3));
  CHECK_THROWS_AS(SmoothMap::composition(id3, f), std::invalid_argument);

  // Zero amplitude is the identity.
  const SmoothMap f0 = SmoothMap::perturbed_identity(m, 0.0, 2.0);
  Rng rng(1);
  const Point p = m.point(0.6 * rng.unit_vec(2));
  CHECK((f0.apply(p).x - p.x).norm() == 0.0);

  const SmoothMap comp = SmoothMap::composition(f, f0);
  CHECK((comp.apply(p).x - f.apply(p).x).norm() == 0.0);
}

TEST_CASE("source measure radial profile against a 1-d oracle") {
  const ModelSpace m = ModelSpace::hyperbolic(2);
  const SourceMeasure src = source_measure(m, m.origin(), 2.0, 0.0, 12);
  CHECK(src.weights.minCoeff() > 0.0);
  CHECK(src.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));

  // Mean displacement against the 1-d quadrature oracle for the density
  // e^{-2r} sinh(r) on the truncated window.
  const GaussRule g = gauss_legendre(400, 0.0, src.r_trunc);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double w = std::exp(-2.0 * g.nodes[i]) * std::sinh(g.nodes[i]);
    num += g.weights[i] * g.nodes[i] * w;
    den += g.weights[i] * w;
  }
  CHECK(src.mean_displacement(m) == doctest::Approx(num / den).epsilon(1e-8));

  // s must exceed the entropy.
  CHECK_THROWS_AS(source_measure(m, m.origin(), 1.01, 0.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(source_measure(ModelSpace::horospherical({1.0}),
                                 ModelSpace::horospherical({1.0}).origin(), 3.0,
                                 0.0, 8),
                  std::invalid_argument);

  // Large s concentrates the measure: mean displacement about 2/s.
  const SourceMeasure tight = source_measure(m, m.origin(), 50.0, 0.0, 12);
  CHECK(tight.mean_displacement(m) <= 2.02 / 50.0);
  CHECK(tight.mean_displacement(m) >= 1.9 / 50.0);
  CHECK(tight.tail_bound <= 1e-8);
}

TEST_CASE("convolution limits") {
  const ModelSpace m = ModelSpace::hyperbolic(2);
  const VisualFamily family(m);
  const BoundaryMeasure ref = sphere_quadrature(m, 24);
  Rng rng(3);
  const Point y = m.point(0.3 * rng.unit_vec(2));

  // Single-atom source reproduces the visual measure exactly.
  SourceMeasure atom;
  atom.center = y;
  atom.s = 3.0;
  atom.r_trunc = 0.0;
  atom.nodes = {y};
  atom.weights = Vec::Ones(1);
  const SmoothMap id = SmoothMap::identity(m);
  const BoundaryMeasure sigma = convolve(atom, id, family, ref);
  const BoundaryMeasure mu = visual_measure(family, y, ref);
  CHECK((sigma.weights - mu.weights).lpNorm<Eigen::Infinity>() < 1e-14);

  // Concentration: at s = 50 the convolution is close to mu_y in total
  // variation on the node set.
  const SourceMeasure src = source_measure(m, y, 50.0, 0.0, 16);
  const BoundaryMeasure conv = convolve(src, id, family, ref);
  const Vec p = conv.weights / conv.total_mass();
  const Vec q = mu.weights / mu.total_mass();
  CHECK(0.5 * (p - q).lpNorm<1>() < 1e-3);

  // Scale invariance of the barycenter.
  BoundaryMeasure scaled = conv;
  scaled.weights *= 7.5;
  CHECK((barycenter(m, conv).x - barycenter(m, scaled).x).norm() < 1e-12);

  // Total mass of the convolution is the weighted sum of the pushforward
  // visual masses.
  double expected_mass = 0.0;
  for (std::size_t i = 0; i < src.nodes.size(); ++i)
    expected_mass += src.weights[static_cast<Eigen::Index>(i)] *
                     visual_measure(family, src.nodes[i], ref).total_mass();
  CHECK(conv.total_mass() == doctest::Approx(expected_mass).epsilon(1e-10));
}

TEST_CASE("visual potential closed forms") {
  // H^2: q(t) = 2 log cosh(t/2).
  const VisualPotential& q2 = VisualPotential::get(2);
  for (double t : {0.1, 0.7, 1.9, 4.0, 11.0, 25.0}) {
    CHECK(std::abs(q2.value(t) - 2.0 * std::log(std::cosh(0.5 * t))) < 1e-7);
    CHECK(std::abs(q2.derivative(t) - std::tanh(0.5 * t)) < 1e-8);
  }
  // H^3: from the elementary sphere average of log |x - theta|,
  //   f(rho) = ((1+rho)^2 log(1+rho) - (1-rho)^2 log(1-rho))/(4 rho) - 1/2,
  //   q(t) = 2 f(rho) - log(1 - rho^2) at rho = tanh(t/2).
  const VisualPotential& q3 = VisualPotential::get(3);
  auto closed3 = [](double t) {
    const double rho = std::tanh(0.5 * t);
    if (rho < 1e-12) return 0.0;
    const double f = ((1.0 + rho) * (1.0 + rho) * std::log1p(rho) -
                      (1.0 - rho) * (1.0 - rho) * std::log1p(-rho)) /
                         (4.0 * rho) -
                     0.5;
    return 2.0 * f - std::log(1.0 - rho * rho);
  };
  for (double t : {0.2, 1.0, 2.2, 5.0, 12.0})
    CHECK(std::abs(q3.value(t) - closed3(t)) < 1e-7);

  // Monotone, unit asymptotic slope, curvature (n-1)/n at the center.
  for (int n = 2; n <= 6; ++n) {
    const VisualPotential& q = VisualPotential::get(n);
    CHECK(q.value(0.0) == doctest::Approx(0.0));
    CHECK(q.derivative(0.0) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(q.derivative(30.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(q.second_derivative(0.0) ==
          doctest::Approx((n - 1.0) / n).epsilon(1e-4));
    double prev = -1.0;
    for (double t = 0.0; t < 20.0; t += 0.37) {
      CHECK(q.derivative(t) >= prev - 1e-12);
      prev = q.derivative(t);
    }
  }
}

TEST_CASE("natural map of an isometry is the isometry") {
  const ModelSpace m = ModelSpace::hyperbolic(2);
  const VisualFamily family(m);
  Rng rng(5);
  const Isometry g = Isometry::random(m, rng, 0.35);
  const Point y = m.point(0.4 * rng.unit_vec(2));
  NaturalMapOptions opts;
  const Point fy = natural_map(SmoothMap::isometry(g), family, y, 3.0, opts);
  CHECK(m.distance(fy, g.apply(y)) < 1e-5);

  // The boundary-grid route agrees within its quadrature accuracy.
  NaturalMapOptions grid = opts;
  grid.use_potential = false;
  grid.boundary_resolution = 24;
  const Point fy_grid = natural_map(SmoothMap::isometry(g), family, y, 3.0, grid);
  CHECK(m.distance(fy_grid, g.apply(y)) < 1e-4);
  CHECK(m.distance(fy_grid, fy) < 1e-4);
}

TEST_CASE("identity natural map converges to the identity in s") {
  const ModelSpace m = ModelSpace::hyperbolic(2);
  const VisualFamily family(m);
  Rng rng(7);
  const Point y = m.point(0.35 * rng.unit_vec(2));
  const SmoothMap id = SmoothMap::identity(m);
  NaturalMapOptions grid;
  grid.use_potential = false;
  grid.boundary_resolution = 24;
  CHECK(m.distance(natural_map(id, family, y, 10.0, grid), y) < 1e-2);
  // The potential route sees the exact rotational symmetry.
  CHECK(m.distance(natural_map(id, family, y, 10.0), y) < 1e-9);

  // PerturbedIdentity(0) coincides with the identity.
  const SmoothMap p0 = SmoothMap::perturbed_identity(m, 0.0, 1.0);
  CHECK(m.distance(natural_map(p0, family, y, 4.0), natural_map(id, family, y, 4.0)) <
        1e-10);
}

TEST_CASE("equivariance under precomposition with an isometry") {
  const ModelSpace m = ModelSpace::hyperbolic(2);
  const VisualFamily family(m);
  Rng rng(9);
  const Isometry g = Isometry::random(m, rng, 0.3);
  const SmoothMap phi = SmoothMap::perturbed_identity(m, 0.02, 1.0);
  const Point y = m.point(0.3 * rng.unit_vec(2));
  const SmoothMap shifted = SmoothMap::composition(phi, SmoothMap::isometry(g.inverse()));
  const Point lhs = natural_map(shifted, family, g.apply(y), 3.0);
  const Point rhs = natural_map(phi, family, y, 3.0);
  CHECK(m.distance(lhs, rhs) < 1e-5);
}

TEST_CASE("continuity of the natural map in s") {
  const ModelSpace m = ModelSpace::hyperbolic(2);
  const VisualFamily family(m);
  Rng rng(11);
  const Point y = m.point(0.3 * rng.unit_vec(2));
  const SmoothMap phi = SmoothMap::perturbed_identity(m, 0.03, 1.5);
  const double s = 3.0;
  const Point base = natural_map(phi, family, y, s);
  const double e2 = m.distance(base, natural_map(phi, family, y, s + 0.2));
  const double e1 = m.distance(base, natural_map(phi, family, y, s + 0.1));
  CHECK(e1 > 0.0);
  CHECK(e2 / e1 == doctest::Approx(2.0).epsilon(0.35));  // linear to first order
}

TEST_CASE("jacobian of the natural map") {
  const ModelSpace m = ModelSpace::hyperbolic(3);
  const VisualFamily family(m);
  Rng rng(13);
  const Point y = m.point(0.25 * rng.unit_vec(3));

  // Isometries have unit Jacobian.
  const Isometry g = Isometry::random(m, rng, 0.25);
  const NaturalJacobianResult iso =
      jacobian_natural_map(SmoothMap::isometry(g), family, y, 4.0);
  CHECK(std::abs(std::abs(iso.jac) - 1.0) < 1e-3);
  CHECK(iso.holds);

  // Identity sweep: the (s/sqrt(n))^n bound holds with margin, and the
  // bound is monotone in s.
  const SmoothMap id = SmoothMap::identity(m);
  double prev_bound = 0.0;
  for (double s : {2.5, 4.0, 8.0}) {
    const NaturalJacobianResult r = jacobian_natural_map(id, family, y, s);
    CHECK(r.holds);
    CHECK(std::abs(r.jac - 1.0) < 1e-6);
    CHECK(r.bound > prev_bound);
    prev_bound = r.bound;
  }

  // Dimension 2 has no finite ratio constant: the bound is vacuous unless
  // the caller provides one.
  const ModelSpace h2 = ModelSpace::hyperbolic(2);
  const VisualFamily fam2(h2);
  const NaturalJacobianResult r2 = jacobian_natural_map(
      SmoothMap::identity(h2), fam2, h2.origin(), 3.0);
  CHECK(std::isinf(r2.bound));
  CHECK(r2.holds);
}

TEST_CASE("product natural map in the concentration regime") {
  // Products have no radial collapse, so the boundary-grid route is only
  // reliable once the source concentrates (spike widths below the grid
  // spacing); this pins its honest accuracy scale.
  const ModelSpace m = ModelSpace::product(2, 2);
  const VisualFamily family(m);
  Rng rng(17);
  Vec yc(4);
  yc << 0.2, -0.1, 0.15, 0.05;
  const Point y = m.point(yc);
  NaturalMapOptions opts;
  opts.boundary_resolution = 8;
  opts.source_resolution = 6;
  const Point fy = natural_map(SmoothMap::identity(m), family, y, 10.0, opts);
  // The s -> infinity limit is bar(mu_y), which the stand-in family does
  // not place at y; compare against that limit point.
  const BoundaryMeasure ref = sphere_quadrature(m, opts.boundary_resolution);
  const Point limit = barycenter(m, visual_measure(family, y, ref));
  CHECK(m.distance(fy, limit) < 2e-2);
  CHECK(m.distance(fy, y) < 0.1);
}

TEST_CASE("entropy estimates match the closed forms") {
  CHECK(entropy_estimate(ModelSpace::hyperbolic(2), 10.0, 20.0) ==
        doctest::Approx(1.0).epsilon(0.02));
  CHECK(entropy_estimate(ModelSpace::hyperbolic(3), 10.0, 20.0) ==
        doctest::Approx(2.0).epsilon(0.02));
  CHECK(entropy_estimate(ModelSpace::product(2, 2), 12.0, 24.0) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(0.03));
  CHECK_THROWS_AS(entropy_estimate(ModelSpace::horospherical({1.0}), 10.0, 20.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(entropy_estimate(ModelSpace::hyperbolic(2), 20.0, 10.0),
                  std::invalid_argument);
}
