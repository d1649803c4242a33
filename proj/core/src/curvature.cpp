#include "baryfold/curvature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace baryfold {

CurvatureForm curvature_form(const ModelSpace& m, const Point& p,
                             const TangentVector& v) {
  const double nv = m.norm(v);
  if (nv < 1e-12) throw std::invalid_argument("curvature_form: zero direction");
  TangentVector unit{p, v.v / nv};

  const int n = m.dim();
  const Mat frame = m.orthonormal_frame(p);
  Mat form(n, n);
  for (int i = 0; i < n; ++i) {
    const TangentVector ei{p, frame.col(i)};
    const TangentVector rv = m.curvature_tensor(p, unit, ei, unit);
    for (int j = 0; j < n; ++j) {
      const TangentVector ej{p, frame.col(j)};
      form(i, j) = m.metric(p, rv, ej);
    }
  }
  form = 0.5 * (form + form.transpose()).eval();
  return CurvatureForm{p, unit, form};
}

double tr_k(const Mat& psd, int k) {
  const int n = static_cast<int>(psd.rows());
  if (k < 1 || k > n) throw std::invalid_argument("tr_k: k out of range");
  Eigen::SelfAdjointEigenSolver<Mat> es(psd, Eigen::EigenvaluesOnly);
  return es.eigenvalues().head(k).sum();
}

SpectralSummary spectral_summary(const Mat& psd) {
  Eigen::SelfAdjointEigenSolver<Mat> es(psd, Eigen::EigenvaluesOnly);
  SpectralSummary s;
  s.eigenvalues = es.eigenvalues();
  s.null_dim = 0;
  for (int i = 0; i < s.eigenvalues.size(); ++i)
    if (s.eigenvalues[i] < kNullEigenvalueTol) ++s.null_dim;
  s.tr_k_table.resize(s.eigenvalues.size());
  double run = 0.0;
  for (int i = 0; i < s.eigenvalues.size(); ++i) {
    run += s.eigenvalues[i];
    s.tr_k_table[i] = run;
  }
  return s;
}

double ric_k(const ModelSpace& m, const Point& p, const TangentVector& v, int k) {
  return -tr_k(curvature_form(m, p, v).matrix, k);
}

int critical_ricci_index(int n) { return n / 4 + 1; }

RicciConditionReport check_negative_k_ricci(const ModelSpace& m, int k,
                                            int samples, std::uint64_t seed) {
  if (k < 1 || k > m.dim())
    throw std::invalid_argument("check_negative_k_ricci: k out of range");
  if (samples < 1) samples = kDefaultRicciSamples;

  RicciConditionReport rep;
  rep.k = k;
  rep.samples = samples;
  rep.seed = seed;
  rep.worst_value = -std::numeric_limits<double>::infinity();
  rep.c0 = std::numeric_limits<double>::infinity();
  rep.delta = std::numeric_limits<double>::infinity();

  // The models are homogeneous, so one base point suffices; a few extra
  // base points are swept anyway as a cross-check on that assumption.
  std::vector<Point> bases;
  bases.push_back(m.origin());
  Rng rng(seed ^ 0x5bd1e995u);
  for (int extra = 0; extra < 3; ++extra) {
    Vec x(m.dim());
    switch (m.kind()) {
      case ModelKind::Hyperbolic:
        x = 0.4 * rng.uniform() * rng.unit_vec(m.dim());
        break;
      case ModelKind::Product: {
        const int n1 = m.factor_dim(0);
        x.head(n1) = 0.4 * rng.uniform() * rng.unit_vec(n1);
        x.tail(m.dim() - n1) = 0.4 * rng.uniform() * rng.unit_vec(m.dim() - n1);
        break;
      }
      case ModelKind::Horospherical:
        x = rng.normal_vec(m.dim());
        break;
    }
    bases.push_back(m.point(x));
  }

  SphereSampler sampler(m.dim(), seed);
  const int per_base = samples / static_cast<int>(bases.size());
  for (std::size_t bi = 0; bi < bases.size(); ++bi) {
    const Point& p = bases[bi];
    const int count = (bi == 0) ? samples - per_base * (static_cast<int>(bases.size()) - 1)
                                : per_base;
    for (int s = 0; s < count; ++s) {
      const Vec dir_frame = sampler.next();
      const TangentVector v = m.tangent_from_frame(p, dir_frame);
      const CurvatureForm form = curvature_form(m, p, v);
      const SpectralSummary spec = spectral_summary(form.matrix);
      const double trk = spec.tr_k_table[k - 1];
      const double ric = -trk;
      if (ric > rep.worst_value) {
        rep.worst_value = ric;
        rep.worst_direction = v.v;
      }
      rep.c0 = std::min(rep.c0, spec.eigenvalues[k - 1]);
      rep.delta = std::min(rep.delta, trk);
      rep.max_null_dim = std::max(rep.max_null_dim, spec.null_dim);
    }
  }

  rep.holds = rep.worst_value < -1e-10;
  rep.null_dim_bound_holds = 4 * rep.max_null_dim <= m.dim();
  return rep;
}

AveragedTraceBound averaged_tr_k_bound(const std::vector<Mat>& field,
                                       const Vec& weights, int k) {
  if (field.empty() || weights.size() != static_cast<Eigen::Index>(field.size()))
    throw std::invalid_argument("averaged_tr_k_bound: field/weights mismatch");
  if (std::abs(weights.sum() - 1.0) > 1e-10)
    throw std::invalid_argument("averaged_tr_k_bound: weights must sum to 1");
  Mat avg = Mat::Zero(field[0].rows(), field[0].cols());
  double rhs = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < field.size(); ++i) {
    avg += weights[static_cast<Eigen::Index>(i)] * field[i];
    rhs = std::min(rhs, tr_k(field[i], k));
  }
  AveragedTraceBound out;
  out.lhs = tr_k(avg, k);
  out.rhs = rhs;
  out.holds = out.lhs >= out.rhs - 1e-10;
  return out;
}

}  // namespace baryfold
