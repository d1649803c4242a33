// Test-side oracles, independent of the library's implementation paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "baryfold/model.hpp"

namespace oracles {

using baryfold::Mat;
using baryfold::Vec;

// Cyclic Jacobi eigenvalue iteration for symmetric matrices; independent of
// the Eigen solver used by the library.
inline std::vector<double> jacobi_eigenvalues(Mat a, double tol = 1e-14) {
  const int n = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < tol * tol) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = 0.5 * (a(q, q) - a(p, p)) / a(p, q);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> eig(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

inline double jacobi_trace_k(const Mat& a, int k) {
  const auto eig = jacobi_eigenvalues(a);
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += eig[static_cast<std::size_t>(i)];
  return s;
}

// Trace of the restriction of a to a random k-dimensional subspace
// (orthonormalized Gaussian frame); always an upper bound for Tr_k.
inline double random_subspace_trace(const Mat& a, int k, baryfold::Rng& rng) {
  const int n = static_cast<int>(a.rows());
  Mat g(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) g(i, j) = rng.normal();
  const Mat q = Eigen::HouseholderQR<Mat>(g).householderQ() * Mat::Identity(n, k);
  return (q.transpose() * a * q).trace();
}

// Stable evaluation of d(y, gamma_theta(t)) - t on hyperbolic space, where
// gamma_theta is the unit ray from the origin to theta: hyperbolic law of
// cosines arranged so nothing saturates near the boundary.
//   cosh d = cosh a cosh t - sinh a sinh t cos(omega)
//   d - t  = log(A + sqrt(A^2 - sech^2 t)) + log((1 + e^{-2t}) / 2)
// with A = cosh a - tanh t sinh a cos(omega).
inline double ray_limit_offset(double a, double cos_omega, double t) {
  const double A = std::cosh(a) - std::tanh(t) * std::sinh(a) * cos_omega;
  const double sech_t = 1.0 / std::cosh(t);
  const double inner = A + std::sqrt(std::max(0.0, A * A - sech_t * sech_t));
  return std::log(inner) + std::log1p(std::exp(-2.0 * t)) - std::log(2.0);
}

// The same quantity expressed through a model point and boundary direction.
inline double hyperbolic_busemann_limit(const baryfold::ModelSpace& m,
                                        const baryfold::Point& y,
                                        const baryfold::IdealPoint& theta,
                                        double t) {
  const double a = m.distance(m.origin(), y);
  if (a < 1e-15) return 0.0;
  const double cos_omega = y.x.dot(theta.a) / y.x.norm();
  return ray_limit_offset(a, cos_omega, t);
}

// Parallel transport along a chart path on the Poincare ball by integrating
// the connection ODE with the conformal Christoffel symbols.
inline Vec ball_transport(const Vec& from, const Vec& to, Vec v, int steps = 200) {
  const int n = static_cast<int>(from.size());
  auto christoffel_apply = [&](const Vec& x, const Vec& dx, const Vec& w) {
    // Gamma^k_{ij} dx^i w^j for g = lambda^2 delta, d log lambda = 2x/(1-|x|^2).
    const Vec dlog = 2.0 * x / (1.0 - x.squaredNorm());
    Vec out(n);
    for (int k = 0; k < n; ++k)
      out[k] = dlog.dot(dx) * w[k] + dlog.dot(w) * dx[k] - dlog[k] * dx.dot(w);
    return out;
  };
  for (int s = 0; s < steps; ++s) {
    const double u0 = static_cast<double>(s) / steps;
    const Vec x0 = from + u0 * (to - from);
    const Vec dx = (to - from) / steps;
    // RK2 midpoint for the transport equation v' = -Gamma(x)(dx, v).
    const Vec k1 = -christoffel_apply(x0, dx, v);
    const Vec xm = from + (u0 + 0.5 / steps) * (to - from);
    const Vec k2 = -christoffel_apply(xm, dx, v + 0.5 * k1);
    v += k2;
  }
  return v;
}

// Curvature from holonomy: transport w around the chart parallelogram
// spanned by h*u and h*v at p and compare with h^2 R(u,v)w.
inline Vec holonomy_curvature(const Vec& p, const Vec& u, const Vec& v,
                              const Vec& w, double h) {
  const Vec a = p, b = p + h * u, c = p + h * u + h * v, d = p + h * v;
  Vec t = ball_transport(a, b, w);
  t = ball_transport(b, c, t);
  t = ball_transport(c, d, t);
  t = ball_transport(d, a, t);
  return (t - w) / (h * h);
}

// Dense grid + local mesh refinement for the maximum of
// prod mu_i^{1/2} / prod (1 - mu_i) over the probability simplex; written
// independently of the library's envelope search.
inline double envelope_max_independent(int n, int grid = 32) {
  auto value = [&](const std::vector<double>& mu) {
    double num = 1.0, den = 1.0;
    for (double m : mu) {
      num *= std::sqrt(std::max(0.0, m));
      den *= (1.0 - m);
    }
    return den <= 1e-300 ? 0.0 : num / den;
  };
  std::vector<double> best;
  double best_val = 0.0;
  std::vector<int> comp(static_cast<std::size_t>(n), 0);
  // enumerate compositions of `grid`
  std::function<void(int, int)> rec = [&](int pos, int rem) {
    if (pos == n - 1) {
      comp[static_cast<std::size_t>(pos)] = rem;
      std::vector<double> mu(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        mu[static_cast<std::size_t>(i)] = static_cast<double>(comp[static_cast<std::size_t>(i)]) / grid;
      const double v = value(mu);
      if (v > best_val) {
        best_val = v;
        best = mu;
      }
      return;
    }
    for (int c = 0; c <= rem; ++c) {
      comp[static_cast<std::size_t>(pos)] = c;
      rec(pos + 1, rem - c);
    }
  };
  rec(0, grid);
  // shrinking-mesh coordinate refinement preserving the simplex constraint
  double step = 1.0 / grid;
  for (int round = 0; round < 60; ++round) {
    bool improved = false;
    for (int i = 0; i < n && !best.empty(); ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        std::vector<double> trial = best;
        const double t = std::min(step, trial[static_cast<std::size_t>(j)]);
        trial[static_cast<std::size_t>(i)] += t;
        trial[static_cast<std::size_t>(j)] -= t;
        const double v = value(trial);
        if (v > best_val) {
          best_val = v;
          best = trial;
          improved = true;
        }
      }
    if (!improved) step *= 0.5;
    if (step < 1e-12) break;
  }
  return best_val;
}

}  // namespace oracles
