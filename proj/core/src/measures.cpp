#include "baryfold/measures.hpp"

#include <cmath>
#include <ostream>

namespace baryfold {

SphericalPoint spherical_point(Vec a) {
  if (a.size() < 1) throw std::invalid_argument("spherical_point: empty");
  for (int i = 0; i < a.size(); ++i)
    if (a[i] < -1e-12)
      throw std::invalid_argument("spherical_point: coefficients must be >= 0");
  const double s = a.squaredNorm();
  if (std::abs(s - 1.0) > 1e-9)
    throw std::invalid_argument("spherical_point: coefficients must satisfy sum a_i^2 = 1");
  for (int i = 0; i < a.size(); ++i) a[i] = std::max(a[i], 0.0);
  return SphericalPoint{std::move(a)};
}

SphericalPoint spherical_vertex(int kplus1, int i) {
  Vec a = Vec::Zero(kplus1);
  a[i] = 1.0;
  return SphericalPoint{std::move(a)};
}

namespace {

struct AngleRule {
  std::vector<double> nodes;    // angle values in [0, pi]
  std::vector<double> weights;  // include the sin-power density
};

// Rule for integrating f(phi) sin^k(phi) dphi over [0, pi], exact for f a
// polynomial in cos(phi).  Odd k folds the polynomial (1-u^2)^((k-1)/2) into
// Gauss-Legendre; even k uses Gauss-Chebyshev of the second kind.
AngleRule polar_rule(int k, int m) {
  AngleRule rule;
  if (k % 2 == 1) {
    const GaussRule gl = gauss_legendre(m, -1.0, 1.0);
    for (int i = 0; i < m; ++i) {
      const double u = gl.nodes[i];
      rule.nodes.push_back(std::acos(u));
      rule.weights.push_back(gl.weights[i] * std::pow(1.0 - u * u, (k - 1) / 2));
    }
  } else {
    for (int i = 1; i <= m; ++i) {
      const double phi = M_PI * i / (m + 1.0);
      const double s = std::sin(phi);
      double w = M_PI / (m + 1.0) * s * s;
      if (k > 2) w *= std::pow(s, k - 2);
      rule.nodes.push_back(phi);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

// Quadrature of the round sphere S^{n-1} in R^n, weights normalized to 1.
void sphere_nodes(int n, int resolution, std::vector<Vec>& nodes,
                  std::vector<double>& weights, int& exactness) {
  nodes.clear();
  weights.clear();
  if (n == 2) {
    const int m = std::max(16, 8 * resolution);
    for (int j = 0; j < m; ++j) {
      const double psi = 2.0 * M_PI * j / m;
      Vec v(2);
      v << std::cos(psi), std::sin(psi);
      nodes.push_back(v);
      weights.push_back(1.0 / m);
    }
    exactness = m - 1;
    return;
  }
  const int d = n - 1;  // sphere dimension
  std::vector<AngleRule> polar;
  for (int j = 0; j < d - 1; ++j) polar.push_back(polar_rule(d - 1 - j, resolution));
  const int m_az = std::max(8, 2 * resolution);

  std::vector<int> idx(d - 1, 0);
  for (;;) {
    double wpolar = 1.0;
    for (int j = 0; j < d - 1; ++j) wpolar *= polar[j].weights[idx[j]];
    for (int l = 0; l < m_az; ++l) {
      const double psi = 2.0 * M_PI * l / m_az;
      Vec v(n);
      double sprod = 1.0;
      for (int j = 0; j < d - 1; ++j) {
        const double phi = polar[j].nodes[idx[j]];
        v[j] = sprod * std::cos(phi);
        sprod *= std::sin(phi);
      }
      v[d - 1] = sprod * std::cos(psi);
      v[d] = sprod * std::sin(psi);
      nodes.push_back(v);
      weights.push_back(wpolar * (2.0 * M_PI / m_az));
    }
    int j = d - 2;
    for (; j >= 0; --j) {
      if (++idx[j] < static_cast<int>(polar[j].nodes.size())) break;
      idx[j] = 0;
    }
    if (j < 0) break;
  }
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;
  exactness = 2 * resolution - 1 - std::max(0, d - 2);
}

}  // namespace

BoundaryMeasure sphere_quadrature(const ModelSpace& m, int resolution) {
  if (m.kind() == ModelKind::Horospherical)
    throw std::invalid_argument(
        "sphere_quadrature: the horospherical boundary is not supported");
  if (resolution < 2)
    throw std::invalid_argument("sphere_quadrature: resolution must be >= 2");

  auto nodes = std::make_shared<std::vector<IdealPoint>>();
  BoundaryMeasure out;
  out.model_id = m.id();
  out.resolution = resolution;
  out.full_support = true;

  if (m.kind() == ModelKind::Hyperbolic) {
    std::vector<Vec> dirs;
    std::vector<double> w;
    sphere_nodes(m.dim(), resolution, dirs, w, out.exactness_degree);
    out.weights.resize(static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      nodes->push_back(m.ideal(dirs[i]));
      out.weights[static_cast<Eigen::Index>(i)] = w[i];
    }
    out.nodes = nodes;
    return out;
  }

  // Product: tensor grid over (theta_1, theta_2, slope), the slope carrying
  // the uniform density on [0, pi/2].
  const int n1 = m.factor_dim(0), n2 = m.factor_dim(1);
  std::vector<Vec> d1, d2;
  std::vector<double> w1, w2;
  int e1 = 0, e2 = 0;
  sphere_nodes(n1, resolution, d1, w1, e1);
  sphere_nodes(n2, resolution, d2, w2, e2);
  const GaussRule slope = gauss_legendre(std::max(4, resolution / 2), 0.0, M_PI_2);

  std::vector<double> weights;
  for (std::size_t i = 0; i < d1.size(); ++i)
    for (std::size_t j = 0; j < d2.size(); ++j)
      for (std::size_t l = 0; l < slope.nodes.size(); ++l) {
        nodes->push_back(m.ideal(d1[i], d2[j], slope.nodes[l]));
        weights.push_back(w1[i] * w2[j] * slope.weights[l] / M_PI_2);
      }
  out.weights = Eigen::Map<const Vec>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  out.exactness_degree = std::min({e1, e2, 2 * static_cast<int>(slope.nodes.size()) - 1});
  out.nodes = nodes;
  return out;
}

Vec visual_density(const VisualFamily& family, const Point& x,
                   const std::vector<IdealPoint>& nodes) {
  Vec d(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    d[static_cast<Eigen::Index>(i)] =
        std::exp(-family.entropy * family.model.busemann(x, nodes[i]));
  return d;
}

BoundaryMeasure visual_measure(const VisualFamily& family, const Point& x,
                               const BoundaryMeasure& reference) {
  if (reference.model_id != family.model.id())
    throw std::invalid_argument("visual_measure: reference on a different model");
  BoundaryMeasure out = reference;
  out.weights =
      reference.weights.cwiseProduct(visual_density(family, x, *reference.nodes));
  return out;
}

BoundaryMeasure normalize(const BoundaryMeasure& m) {
  const double mass = m.total_mass();
  if (!(mass > 0.0))
    throw std::invalid_argument("normalize: measure has zero mass");
  BoundaryMeasure out = m;
  out.weights /= mass;
  return out;
}

BoundaryMeasure mix(const std::vector<BoundaryMeasure>& measures,
                    const SphericalPoint& coefficients) {
  if (measures.empty() ||
      coefficients.a.size() != static_cast<Eigen::Index>(measures.size()))
    throw std::invalid_argument("mix: coefficient/measure count mismatch");
  const auto& base = measures.front();
  BoundaryMeasure out = base;
  out.weights = Vec::Zero(base.weights.size());
  bool support = true;
  for (std::size_t i = 0; i < measures.size(); ++i) {
    const auto& mi = measures[i];
    if (mi.nodes != base.nodes)
      throw std::invalid_argument("mix: measures live on different node sets");
    if (std::abs(mi.total_mass() - 1.0) > 1e-8)
      throw std::invalid_argument("mix: measures must be normalized");
    const double c = coefficients.a[static_cast<Eigen::Index>(i)];
    out.weights += c * c * mi.weights;
    support = support && mi.full_support;
  }
  out.full_support = support;
  return out;
}

double integrate(const BoundaryMeasure& m,
                 const std::function<double(const IdealPoint&)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    s += m.weights[static_cast<Eigen::Index>(i)] * f((*m.nodes)[i]);
  return s;
}

void measure_to_csv(const BoundaryMeasure& m, std::ostream& out) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    const IdealPoint& t = (*m.nodes)[i];
    bool first = true;
    for (int j = 0; j < t.a.size(); ++j) {
      out << (first ? "" : ",") << format_double(t.a[j]);
      first = false;
    }
    for (int j = 0; j < t.b.size(); ++j) {
      out << (first ? "" : ",") << format_double(t.b[j]);
      first = false;
    }
    if (t.b.size() > 0) out << "," << format_double(t.slope);
    out << (first ? "" : ",") << format_double(m.weights[static_cast<Eigen::Index>(i)])
        << "\n";
  }
}

}  // namespace baryfold
