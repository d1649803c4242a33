#include "baryfold/numeric.hpp"

#include <cmath>
#include <cstdio>

namespace baryfold {

GaussRule gauss_legendre(int npoints, double a, double b) {
  if (npoints < 1) throw std::invalid_argument("gauss_legendre: npoints < 1");
  GaussRule rule;
  rule.nodes.resize(npoints);
  rule.weights.resize(npoints);
  const int m = (npoints + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-style initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (npoints + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < npoints; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = npoints * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.nodes[i] = x;
    rule.nodes[npoints - 1 - i] = -x;
    rule.weights[i] = w;
    rule.weights[npoints - 1 - i] = w;
  }
  // Map [-1,1] -> [a,b]; emit in increasing order.
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  GaussRule out;
  out.nodes.resize(npoints);
  out.weights.resize(npoints);
  for (int i = 0; i < npoints; ++i) {
    out.nodes[i] = mid - half * rule.nodes[i];
    out.weights[i] = half * rule.weights[i];
  }
  return out;
}

double integrate_uniform(const std::vector<double>& values, double dt) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  std::size_t i = 0;
  for (; i + 2 < n; i += 2)
    sum += dt / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
  if (i + 1 < n) sum += 0.5 * dt * (values[i] + values[i + 1]);
  return sum;
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("inverse_normal_cdf: p outside (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > phigh) {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

LowDiscrepancySequence::LowDiscrepancySequence(int dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("LowDiscrepancySequence: dim < 1");
  // Generalized golden ratio: unique positive root of x^{d+1} = x + 1.
  double g = 1.5;
  for (int i = 0; i < 64; ++i) g = std::pow(1.0 + g, 1.0 / (dim + 1));
  alpha_.resize(dim);
  state_.resize(dim);
  Rng rng(seed);
  for (int k = 0; k < dim; ++k) {
    alpha_[k] = std::fmod(std::pow(1.0 / g, k + 1), 1.0);
    state_[k] = rng.uniform();  // seeded offset
  }
}

Vec LowDiscrepancySequence::next() {
  for (int k = 0; k < state_.size(); ++k) {
    state_[k] += alpha_[k];
    if (state_[k] >= 1.0) state_[k] -= 1.0;
  }
  return state_;
}

SphereSampler::SphereSampler(int dim, std::uint64_t seed) : seq_(dim, seed) {
  if (dim < 1) throw std::invalid_argument("SphereSampler: dim < 1");
}

Vec SphereSampler::next() {
  for (;;) {
    Vec u = seq_.next();
    Vec z(u.size());
    for (int k = 0; k < u.size(); ++k) {
      double p = std::min(std::max(u[k], 1e-12), 1.0 - 1e-12);
      z[k] = inverse_normal_cdf(p);
    }
    const double nrm = z.norm();
    if (nrm > 1e-8) return z / nrm;
  }
}

std::uint64_t Rng::next_u64() {
  // splitmix64 step
  s_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = s_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  have_spare_ = true;
  return u * f;
}

Vec Rng::normal_vec(int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = normal();
  return v;
}

Vec Rng::unit_vec(int n) {
  for (;;) {
    Vec v = normal_vec(n);
    const double nrm = v.norm();
    if (nrm > 1e-12) return v / nrm;
  }
}

Rng Rng::fork(std::uint64_t index) const {
  Rng child(s_ ^ (0xd1342543de82ef95ULL * (index + 1)));
  child.next_u64();
  return child;
}

Mat random_psd(Rng& rng, int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.normal();
  Mat a = m.transpose() * m / static_cast<double>(n);
  return 0.5 * (a + a.transpose());
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Mat orthonormal_complement(const Vec& a) {
  const int n = static_cast<int>(a.size());
  if (n < 2) throw std::invalid_argument("orthonormal_complement: dim < 2");
  Vec u = a / a.norm();
  // Householder H = I - 2 v v^T mapping e_s -> +-u; remaining columns of H
  // form an orthonormal basis of u^perp.
  int s = 0;
  u.cwiseAbs().maxCoeff(&s);
  Vec v = u;
  v[s] += (u[s] >= 0.0 ? 1.0 : -1.0);
  v /= v.norm();
  Mat h = Mat::Identity(n, n) - 2.0 * v * v.transpose();
  Mat basis(n, n - 1);
  int col = 0;
  for (int j = 0; j < n; ++j) {
    if (j == s) continue;
    basis.col(col++) = h.col(j);
  }
  return basis;
}

}  // namespace baryfold
