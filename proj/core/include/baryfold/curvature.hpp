#pragma once

#include <cstdint>
#include <optional>

#include "baryfold/model.hpp"

namespace baryfold {

/// Directional curvature form R_v at a point: the symmetric matrix with
/// entries g(R(v, e_i) v, e_j) in the orthonormal frame.  Positive
/// semidefinite on nonpositively curved models, with v in its null space.
struct CurvatureForm {
  Point base;
  TangentVector direction;
  Mat matrix;
};

/// Eigenvalue summary of a PSD form: eigenvalues ascending, count of
/// numerically null directions, and the table of k-th traces.
struct SpectralSummary {
  Vec eigenvalues;
  int null_dim = 0;
  Vec tr_k_table;  // tr_k_table[k-1] = sum of k smallest eigenvalues
};

/// Eigenvalue below this threshold counts as a null direction.
constexpr double kNullEigenvalueTol = 1e-8;

CurvatureForm curvature_form(const ModelSpace& m, const Point& p,
                             const TangentVector& v);

/// k-th trace of a PSD symmetric matrix: the sum of its k smallest
/// eigenvalues, equivalently the minimal trace of the restriction to a
/// k-dimensional subspace.  Computed by full eigendecomposition.
double tr_k(const Mat& psd, int k);

SpectralSummary spectral_summary(const Mat& psd);

/// k-th Ricci curvature in direction v: -tr_k of the curvature form.
double ric_k(const ModelSpace& m, const Point& p, const TangentVector& v, int k);

/// Outcome of sampling the negative k-Ricci condition over unit directions.
/// The check evaluates Ric_k < 0 over a seeded low-discrepancy sweep of
/// directions and cross-validates the equivalent formulations: the null
/// dimension bound, the eigenvalue floor C0 at index k, and the trace
/// floor delta.  Constants are empirical (sampled infima), not certified.
struct RicciConditionReport {
  bool holds = false;
  double worst_value = 0.0;  // sup over sampled v of Ric_k(v)
  Vec worst_direction;       // chart components at the base point
  double c0 = 0.0;           // min over samples of lambda_k(R_v)
  double delta = 0.0;        // min over samples of Tr_k(R_v)
  int max_null_dim = 0;
  bool null_dim_bound_holds = false;  // max_null_dim <= n/4
  int k = 0;
  int samples = 0;
  std::uint64_t seed = 0;
};

/// Default direction count for condition sweeps.
constexpr int kDefaultRicciSamples = 4096;

/// Checks the negative k-Ricci condition on a model by direction sampling.
/// Homogeneity makes a single base point sufficient; a handful of extra
/// base points are swept as a cross-check.
RicciConditionReport check_negative_k_ricci(const ModelSpace& m, int k,
                                            int samples, std::uint64_t seed);

/// floor(n/4) + 1, the trace index of the headline curvature condition.
int critical_ricci_index(int n);

struct AveragedTraceBound {
  double lhs = 0.0;  // Tr_k of the weighted average
  double rhs = 0.0;  // infimum of Tr_k over the samples
  bool holds = false;
};

/// Averaging bound for the k-th trace: Tr_k(sum w_i A_i) >= min_i Tr_k(A_i)
/// for a probability vector w over PSD matrices.
AveragedTraceBound averaged_tr_k_bound(const std::vector<Mat>& field,
                                       const Vec& weights, int k);

}  // namespace baryfold
