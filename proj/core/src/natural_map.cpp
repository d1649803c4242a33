#include "baryfold/natural_map.hpp"

#include <cmath>

namespace baryfold {

namespace {

Vec perturb_block(const Vec& x, double amplitude, double frequency) {
  const double envelope = 1.0 - x.squaredNorm();
  Vec out = x;
  for (int i = 0; i < x.size(); ++i)
    out[i] += amplitude * envelope * std::sin(frequency * M_PI * x[i]);
  return out;
}

}  // namespace

SmoothMap SmoothMap::identity(const ModelSpace& m) {
  SmoothMap f;
  f.kind_ = Kind::Identity;
  f.domain_ = f.codomain_ = std::make_shared<ModelSpace>(m);
  return f;
}

SmoothMap SmoothMap::isometry(const Isometry& g) {
  SmoothMap f;
  f.kind_ = Kind::IsometryMap;
  f.domain_ = f.codomain_ = std::make_shared<ModelSpace>(g.space());
  f.isometry_ = std::make_shared<Isometry>(g);
  return f;
}

SmoothMap SmoothMap::perturbed_identity(const ModelSpace& m, double amplitude,
                                        double frequency) {
  if (m.kind() == ModelKind::Horospherical)
    throw std::invalid_argument("perturbed_identity: ball models only");
  // Keep the chart differential diagonally dominant so the map stays a
  // local diffeomorphism on the whole ball.
  const double slope = amplitude * (2.0 + frequency * M_PI) * m.dim();
  if (!(amplitude >= 0.0) || slope >= 0.9)
    throw std::invalid_argument("perturbed_identity: amplitude too large");
  SmoothMap f;
  f.kind_ = Kind::Perturbed;
  f.domain_ = f.codomain_ = std::make_shared<ModelSpace>(m);
  f.amplitude_ = amplitude;
  f.frequency_ = frequency;
  return f;
}

SmoothMap SmoothMap::composition(const SmoothMap& outer, const SmoothMap& inner) {
  if (outer.domain().id() != inner.codomain().id())
    throw std::invalid_argument("composition: middle models mismatch");
  SmoothMap f;
  f.kind_ = Kind::Composed;
  f.domain_ = inner.domain_;
  f.codomain_ = outer.codomain_;
  f.outer_ = std::make_shared<SmoothMap>(outer);
  f.inner_ = std::make_shared<SmoothMap>(inner);
  return f;
}

Point SmoothMap::apply(const Point& p) const {
  switch (kind_) {
    case Kind::Identity:
      return p;
    case Kind::IsometryMap:
      return isometry_->apply(p);
    case Kind::Perturbed: {
      const ModelSpace& m = *domain_;
      if (m.kind() == ModelKind::Hyperbolic)
        return m.point(perturb_block(p.x, amplitude_, frequency_));
      const int n1 = m.factor_dim(0);
      Vec out(m.dim());
      out.head(n1) = perturb_block(p.x.head(n1), amplitude_, frequency_);
      out.tail(m.dim() - n1) =
          perturb_block(p.x.tail(m.dim() - n1), amplitude_, frequency_);
      return m.point(out);
    }
    case Kind::Composed:
      return outer_->apply(inner_->apply(p));
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Source measure

double SourceMeasure::mean_displacement(const ModelSpace& m) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    s += weights[static_cast<Eigen::Index>(i)] * m.distance(center, nodes[i]);
  return s / weights.sum();
}

SourceMeasure source_measure(const ModelSpace& m, const Point& y, double s,
                             double r_trunc, int resolution) {
  if (m.kind() == ModelKind::Horospherical)
    throw std::invalid_argument("source_measure: ball models only");
  const double h = m.entropy();
  if (!(s > h + kEntropyMargin))
    throw std::invalid_argument("source_measure: s must exceed the volume entropy");
  if (r_trunc <= 0.0)
    r_trunc = std::min(kMaxTruncationRadius, (18.42 + 4.0) / (s - h));

  SourceMeasure out;
  out.center = y;
  out.s = s;
  out.r_trunc = r_trunc;
  out.tail_bound = std::exp((h - s) * r_trunc);

  const GaussRule radial = gauss_legendre(std::max(8, 4 * resolution), 0.0, r_trunc);
  const Mat frame = m.orthonormal_frame(y);
  std::vector<double> weights;

  auto emit = [&](const Vec& dir_frame, double dir_weight) {
    for (std::size_t ri = 0; ri < radial.nodes.size(); ++ri) {
      const double r = radial.nodes[ri];
      const TangentVector dir{y, frame * dir_frame};
      out.nodes.push_back(m.geodesic(y, dir, r));
      double density = std::exp(-s * r);
      if (m.kind() == ModelKind::Hyperbolic) {
        density *= std::pow(std::sinh(r), m.dim() - 1);
      } else {
        const int n1 = m.factor_dim(0), n2 = m.factor_dim(1);
        const double c1 = dir_frame.head(n1).norm();
        const double c2 = dir_frame.tail(n2).norm();
        density *= std::pow(std::sinh(r * c1), n1 - 1) *
                   std::pow(std::sinh(r * c2), n2 - 1) * r;
      }
      weights.push_back(density * radial.weights[ri] * dir_weight);
    }
  };

  if (m.kind() == ModelKind::Hyperbolic) {
    const BoundaryMeasure dirs = sphere_quadrature(m, resolution);
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      Vec df = (*dirs.nodes)[d].a;  // frame coordinates of the direction
      emit(df, dirs.weights[static_cast<Eigen::Index>(d)]);
    }
  } else {
    // Directions (cos b u1, sin b u2) with the geodesic polar density
    // sinh^{n1-1}(r cos b) sinh^{n2-1}(r sin b) r.  The tensor grid grows
    // fast, so the factor spheres run at a reduced resolution.
    const int n1 = m.factor_dim(0), n2 = m.factor_dim(1);
    const int factor_res = std::max(2, resolution / 3);
    const BoundaryMeasure d1 = sphere_quadrature(m.factor(0), factor_res);
    const BoundaryMeasure d2 = sphere_quadrature(m.factor(1), factor_res);
    const GaussRule beta = gauss_legendre(std::max(6, resolution / 2), 0.0, M_PI_2);
    for (std::size_t i = 0; i < d1.size(); ++i)
      for (std::size_t j = 0; j < d2.size(); ++j)
        for (std::size_t l = 0; l < beta.nodes.size(); ++l) {
          Vec df(m.dim());
          df.head(n1) = std::cos(beta.nodes[l]) * (*d1.nodes)[i].a;
          df.tail(n2) = std::sin(beta.nodes[l]) * (*d2.nodes)[j].a;
          emit(df, d1.weights[static_cast<Eigen::Index>(i)] *
                       d2.weights[static_cast<Eigen::Index>(j)] *
                       beta.weights[l]);
        }
  }

  out.weights = Eigen::Map<const Vec>(weights.data(),
                                      static_cast<Eigen::Index>(weights.size()));
  const double mass = out.weights.sum();
  if (!(mass > 0.0)) throw solve_error("source_measure: vanishing mass", mass);
  out.weights /= mass;
  return out;
}

// ---------------------------------------------------------------------------
// Radial potential of the visual family

namespace {

// Angular integral of the radial Busemann gradient component against the
// round boundary measure, for a point at chart radius rho.  The integrand
// develops a width-(1-rho) transition at phi = 0, so the domain is split
// there and each piece gets its own Gauss rule.
double potential_derivative(int n, double rho) {
  if (rho < 1e-14) return 0.0;
  if (rho > 1.0 - 1e-13) return 1.0;  // asymptote, error O(1 - rho)
  // |x - theta|^2 = (1-rho)^2 + 4 rho sin^2(phi/2) and
  // 2(rho - cos phi) = 2(rho - 1) + 4 sin^2(phi/2), both cancellation-free.
  const double one_minus = 1.0 - rho;
  auto integrand = [&](double phi) {
    const double sh = std::sin(0.5 * phi);
    const double dist2 = one_minus * one_minus + 4.0 * rho * sh * sh;
    return (2.0 * (rho - 1.0) + 4.0 * sh * sh) / dist2 *
           std::pow(std::sin(phi), n - 2);
  };
  const double split = std::min(M_PI_2, 60.0 * (1.0 - rho));
  static const GaussRule base = gauss_legendre(96, 0.0, 1.0);
  double num = 0.0, den = 0.0;
  for (const auto& [lo, hi] : {std::pair{0.0, split}, std::pair{split, M_PI}}) {
    const double len = hi - lo;
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      const double phi = lo + len * base.nodes[i];
      const double w = len * base.weights[i];
      num += w * integrand(phi);
      den += w * std::pow(std::sin(phi), n - 2);
    }
  }
  return rho + 0.5 * (1.0 - rho * rho) * num / den;
}

}  // namespace

VisualPotential::VisualPotential(int n) : n_(n) {
  if (n < 2 || n > 6) throw std::invalid_argument("VisualPotential: n in [2,6]");
  dt_ = 1e-2;
  tmax_ = 34.0;  // chart radius tanh(t/2) saturates in double near t = 37
  const int count = static_cast<int>(tmax_ / dt_) + 1;
  qp_.resize(static_cast<std::size_t>(count));
  q_.resize(static_cast<std::size_t>(count));
  qpp_.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    qp_[static_cast<std::size_t>(i)] = potential_derivative(n, std::tanh(0.5 * i * dt_));
  q_[0] = 0.0;
  for (int i = 1; i < count; ++i) {
    // Simpson on the half step via Hermite midpoint of q'.
    const double a = qp_[static_cast<std::size_t>(i - 1)];
    const double b = qp_[static_cast<std::size_t>(i)];
    const double mid = potential_derivative(n, std::tanh(0.5 * ((i - 0.5) * dt_)));
    q_[static_cast<std::size_t>(i)] =
        q_[static_cast<std::size_t>(i - 1)] + dt_ / 6.0 * (a + 4.0 * mid + b);
  }
  for (int i = 0; i < count; ++i) {
    if (i == 0)
      qpp_[0] = (qp_[1] - qp_[0]) / dt_ * 2.0 - (qp_[2] - qp_[1]) / dt_;
    else if (i + 1 == count)
      qpp_[static_cast<std::size_t>(i)] = qpp_[static_cast<std::size_t>(i - 1)];
    else
      qpp_[static_cast<std::size_t>(i)] =
          (qp_[static_cast<std::size_t>(i + 1)] - qp_[static_cast<std::size_t>(i - 1)]) /
          (2.0 * dt_);
  }
}

namespace {

double hermite(double t, double dt, const std::vector<double>& vals,
               const std::vector<double>& ders) {
  const double pos = t / dt;
  const int i = std::min(static_cast<int>(vals.size()) - 2,
                         std::max(0, static_cast<int>(pos)));
  const double u = pos - i;
  const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
  const double h10 = u * (1.0 - u) * (1.0 - u);
  const double h01 = u * u * (3.0 - 2.0 * u);
  const double h11 = u * u * (u - 1.0);
  const std::size_t k = static_cast<std::size_t>(i);
  return h00 * vals[k] + h01 * vals[k + 1] + dt * (h10 * ders[k] + h11 * ders[k + 1]);
}

}  // namespace

double VisualPotential::value(double t) const {
  t = std::abs(t);
  if (t >= tmax_) return q_.back() + (t - tmax_) * qp_.back();
  return hermite(t, dt_, q_, qp_);
}

double VisualPotential::derivative(double t) const {
  t = std::abs(t);
  if (t >= tmax_) return qp_.back();
  return hermite(t, dt_, qp_, qpp_);
}

double VisualPotential::second_derivative(double t) const {
  t = std::abs(t);
  if (t >= tmax_) return 0.0;
  const double pos = t / dt_;
  const int i = std::min(static_cast<int>(qpp_.size()) - 2,
                         std::max(0, static_cast<int>(pos)));
  const double u = pos - i;
  const std::size_t k = static_cast<std::size_t>(i);
  return (1.0 - u) * qpp_[k] + u * qpp_[k + 1];
}

const VisualPotential& VisualPotential::get(int n) {
  static const VisualPotential tables[] = {
      VisualPotential(2), VisualPotential(3), VisualPotential(4),
      VisualPotential(5), VisualPotential(6)};
  if (n < 2 || n > 6) throw std::invalid_argument("VisualPotential: n in [2,6]");
  return tables[n - 2];
}

BoundaryMeasure convolve(const SourceMeasure& src, const SmoothMap& map,
                         const VisualFamily& family,
                         const BoundaryMeasure& reference,
                         bool normalized_family) {
  if (reference.model_id != family.model.id())
    throw std::invalid_argument("convolve: reference on a different model");
  BusemannAverager avg(family.model, reference.nodes);
  Vec acc = Vec::Zero(reference.weights.size());
  for (std::size_t zi = 0; zi < src.nodes.size(); ++zi) {
    const Point image = map.apply(src.nodes[zi]);
    Vec dens =
        (-family.entropy * avg.busemann_values(image)).array().exp().matrix();
    if (normalized_family) dens /= dens.dot(reference.weights);
    acc += src.weights[static_cast<Eigen::Index>(zi)] * dens;
  }
  BoundaryMeasure out = reference;
  out.weights = reference.weights.cwiseProduct(acc);
  return out;
}

namespace {

// Minimizer of sum_z w_z q(d(x, image_z)) by damped Newton; gradient and
// Hessian come from the radial potential and the closed-form Hessian of
// the distance function, coth(d) (I - u u^T), on H^n.
Point minimize_potential(const ModelSpace& m, const std::vector<Point>& images,
                         const Vec& w, const VisualPotential& q, Point x) {
  const int n = m.dim();
  auto assemble = [&](const Point& at, Vec* grad, Mat* hess) {
    Vec g = Vec::Zero(n);
    Mat k = Mat::Zero(n, n);
    for (std::size_t zi = 0; zi < images.size(); ++zi) {
      const double wz = w[static_cast<Eigen::Index>(zi)];
      const TangentVector lg = m.log_map(at, images[zi]);
      const Vec lf = m.frame_coords(at, lg);
      const double d = lf.norm();
      if (d < 1e-9) {
        if (hess) k += wz * q.second_derivative(0.0) * Mat::Identity(n, n);
        continue;
      }
      const Vec u = lf / d;
      if (grad) g -= wz * q.derivative(d) * u;
      if (hess)
        k += wz * (q.second_derivative(d) * u * u.transpose() +
                   q.derivative(d) / std::tanh(d) *
                       (Mat::Identity(n, n) - u * u.transpose()));
    }
    if (grad) *grad = g;
    if (hess) *hess = k;
  };
  auto objective = [&](const Point& at) {
    double v = 0.0;
    for (std::size_t zi = 0; zi < images.size(); ++zi)
      v += w[static_cast<Eigen::Index>(zi)] * q.value(m.distance(at, images[zi]));
    return v;
  };

  for (int iter = 0; iter < 100; ++iter) {
    Vec g;
    Mat k;
    assemble(x, &g, &k);
    if (g.norm() <= 1e-10) return x;
    const Vec step = k.ldlt().solve(-g);
    if (step.norm() < 1e-11) return x;
    if (g.norm() < 1e-6) {
      x = m.geodesic(x, m.tangent_from_frame(x, step), step.norm());
      continue;
    }
    const double f0 = objective(x);
    const double dirderiv = g.dot(step);
    bool moved = false;
    for (double damp = 1.0; damp > 1e-10; damp *= 0.5) {
      const Vec sdamp = damp * step;
      if (sdamp.norm() < 1e-11) break;
      const Point cand = m.geodesic(x, m.tangent_from_frame(x, sdamp), sdamp.norm());
      if (objective(cand) <= f0 + 1e-4 * damp * dirderiv) {
        x = cand;
        moved = true;
        break;
      }
    }
    if (!moved) throw solve_error("natural_map: potential descent stalled", g.norm());
  }
  Vec g;
  assemble(x, &g, nullptr);
  if (g.norm() <= 1e-10) return x;
  throw solve_error("natural_map: potential solve did not converge", g.norm());
}

}  // namespace

Point natural_map(const SmoothMap& map, const VisualFamily& family,
                  const Point& y, double s, const NaturalMapOptions& opts) {
  const SourceMeasure src =
      source_measure(map.domain(), y, s, opts.r_trunc, opts.source_resolution);
  if (opts.use_potential && family.model.kind() == ModelKind::Hyperbolic &&
      map.domain().kind() == ModelKind::Hyperbolic) {
    std::vector<Point> images;
    images.reserve(src.nodes.size());
    for (const Point& z : src.nodes) images.push_back(map.apply(z));
    return minimize_potential(family.model, images, src.weights,
                              VisualPotential::get(family.model.dim()),
                              map.apply(y));
  }
  const BoundaryMeasure reference =
      sphere_quadrature(family.model, opts.boundary_resolution);
  const BoundaryMeasure sigma =
      convolve(src, map, family, reference, opts.normalized_family);
  return barycenter(family.model, sigma, map.apply(y));
}

NaturalJacobianResult jacobian_natural_map(const SmoothMap& map,
                                           const VisualFamily& family,
                                           const Point& y, double s,
                                           double c_ratio,
                                           const NaturalMapOptions& opts) {
  const ModelSpace& dom = map.domain();
  const ModelSpace& cod = map.codomain();
  const int n = dom.dim();
  if (cod.dim() != n)
    throw std::invalid_argument("jacobian_natural_map: dimension mismatch");

  const Point fy = natural_map(map, family, y, s, opts);
  const Mat frame_dom = dom.orthonormal_frame(y);
  const double h = kJacobianFdStep;

  Mat d(n, n);
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    const TangentVector dir{y, frame_dom * e};
    const Point yp = dom.geodesic(y, dir, h);
    const Point ym = dom.geodesic(y, dir, -h);
    const Point fp = natural_map(map, family, yp, s, opts);
    const Point fm = natural_map(map, family, ym, s, opts);
    const Vec col = (cod.frame_coords(fy, cod.log_map(fy, fp)) -
                     cod.frame_coords(fy, cod.log_map(fy, fm))) /
                    (2.0 * h);
    d.col(i) = col;
  }

  NaturalJacobianResult out;
  out.jac = d.determinant();
  if (c_ratio > 0.0) {
    out.c_ratio = c_ratio;
  } else if (cod.dim() >= 3) {
    out.c_ratio = det_ratio_envelope(cod.dim());
  } else {
    // No finite determinant-ratio constant exists in dimension 2; the
    // bound check is vacuous there unless the caller supplies one.
    out.c_ratio = std::numeric_limits<double>::infinity();
  }
  out.bound = std::pow(s / std::sqrt(static_cast<double>(n)), n) * out.c_ratio;
  out.holds = std::abs(out.jac) <= out.bound * (1.0 + 1e-2);
  return out;
}

double entropy_estimate(const ModelSpace& m, double r0, double r1, int npoints) {
  if (!(r1 > r0) || r0 <= 0.0)
    throw std::invalid_argument("entropy_estimate: bad radius window");
  if (npoints < 4) throw std::invalid_argument("entropy_estimate: window too small");

  auto ball_volume = [&](double r) -> double {
    if (m.kind() == ModelKind::Hyperbolic) {
      const GaussRule g = gauss_legendre(200, 0.0, r);
      double v = 0.0;
      for (std::size_t i = 0; i < g.nodes.size(); ++i)
        v += g.weights[i] * std::pow(std::sinh(g.nodes[i]), m.dim() - 1);
      return v;
    }
    if (m.kind() == ModelKind::Product) {
      const int n1 = m.factor_dim(0), n2 = m.factor_dim(1);
      const GaussRule rad = gauss_legendre(240, 0.0, r);
      const GaussRule ang = gauss_legendre(64, 0.0, M_PI_2);
      double v = 0.0;
      for (std::size_t i = 0; i < rad.nodes.size(); ++i) {
        const double rho = rad.nodes[i];
        double inner = 0.0;
        for (std::size_t j = 0; j < ang.nodes.size(); ++j) {
          const double c = std::cos(ang.nodes[j]), s2 = std::sin(ang.nodes[j]);
          inner += ang.weights[j] * std::pow(std::sinh(rho * c), n1 - 1) *
                   std::pow(std::sinh(rho * s2), n2 - 1);
        }
        v += rad.weights[i] * rho * inner;
      }
      return v;
    }
    throw std::invalid_argument(
        "entropy_estimate: horospherical ball volumes have no quadrature here; "
        "the closed-form entropy is ModelSpace::entropy()");
  };

  // Least-squares slope of log V against r.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < npoints; ++i) {
    const double r = r0 + (r1 - r0) * i / (npoints - 1);
    const double lv = std::log(ball_volume(r));
    sx += r;
    sy += lv;
    sxx += r * r;
    sxy += r * lv;
  }
  const double denom = npoints * sxx - sx * sx;
  return (npoints * sxy - sx * sy) / denom;
}

}  // namespace baryfold
