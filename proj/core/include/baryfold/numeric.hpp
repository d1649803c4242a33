#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace baryfold {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Thrown when an iterative solve fails to reach its target; carries the
/// residual that was achieved so callers can report it.
class solve_error : public std::runtime_error {
 public:
  solve_error(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

/// Gauss-Legendre nodes and weights on [a, b].  Nodes are computed by Newton
/// iteration on the Legendre polynomial and are deterministic to ~1e-15.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int npoints, double a = -1.0, double b = 1.0);

/// Composite integral of samples on a uniform grid (Simpson where possible,
/// trapezoid fallback on the last interval for even sample counts).
double integrate_uniform(const std::vector<double>& values, double dt);

/// Inverse of the standard normal CDF (Acklam's rational approximation,
/// accurate to ~1.15e-9; adequate for mapping low-discrepancy points).
double inverse_normal_cdf(double p);

/// Additive-recurrence (Kronecker/R_d) low-discrepancy sequence in [0,1)^dim,
/// seeded by an offset so independent sweeps draw distinct streams.
class LowDiscrepancySequence {
 public:
  LowDiscrepancySequence(int dim, std::uint64_t seed);
  /// Next point of the sequence.
  Vec next();

 private:
  Vec state_;
  Vec alpha_;
};

/// Deterministic unit-sphere sampler in R^dim: low-discrepancy points mapped
/// through the inverse normal CDF and normalized.
class SphereSampler {
 public:
  SphereSampler(int dim, std::uint64_t seed);
  Vec next();

 private:
  LowDiscrepancySequence seq_;
};

/// Small deterministic PRNG helpers (xoshiro-free; std::mt19937_64 with
/// explicit transforms so streams are reproducible across runs).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64();
  double uniform();                       // [0,1)
  double uniform(double a, double b);     // [a,b)
  double normal();                        // N(0,1), polar method
  Vec normal_vec(int n);
  Vec unit_vec(int n);
  /// Derive an independent child stream; deterministic in (seed, index).
  Rng fork(std::uint64_t index) const;
  std::uint64_t state() const { return s_; }

 private:
  std::uint64_t s_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Random symmetric PSD matrix A = M^T M scaled to unit spectral radius-ish.
Mat random_psd(Rng& rng, int n);

/// Format a double so equal values always produce identical bytes.
std::string format_double(double x);

/// FNV-1a hash of a byte string; used for config hashes in reports.
std::uint64_t fnv1a(const std::string& bytes);

/// Orthonormal basis of the hyperplane orthogonal to a unit vector a in
/// R^{k+1}, as columns (Householder construction, deterministic).
Mat orthonormal_complement(const Vec& a);

}  // namespace baryfold
