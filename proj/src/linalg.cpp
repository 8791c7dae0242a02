#include "femda/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>

#include "femda/errors.hpp"

namespace femda {

SPDMatrix::SPDMatrix(Matrix entries) {
  if (entries.rows() != entries.cols() || entries.rows() < 1) {
    throw DimensionMismatch("SPDMatrix: input must be square, m >= 1");
  }
  entries_ = 0.5 * (entries + entries.transpose());
  Eigen::LLT<Matrix> llt(entries_);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("SPDMatrix: Cholesky pivot not strictly positive");
  }
  lower_ = llt.matrixL();
  log_det_ = 2.0 * lower_.diagonal().array().log().sum();
  if (!std::isfinite(log_det_)) {
    throw NotPositiveDefinite("SPDMatrix: non-finite log-determinant");
  }
}

double SPDMatrix::mahalanobis_sq(const Vector& x, const Vector& mean) const {
  if (x.size() != dim() || mean.size() != dim()) {
    throw DimensionMismatch("mahalanobis_sq: dimension mismatch");
  }
  Vector y = lower_.triangularView<Eigen::Lower>().solve(x - mean);
  return y.squaredNorm();
}

Vector SPDMatrix::mahalanobis_sq_rows(const Matrix& points,
                                      const Vector& mean) const {
  if (points.cols() != dim() || mean.size() != dim()) {
    throw DimensionMismatch("mahalanobis_sq_rows: dimension mismatch");
  }
  Matrix centered = (points.rowwise() - mean.transpose()).transpose();
  lower_.triangularView<Eigen::Lower>().solveInPlace(centered);
  return centered.colwise().squaredNorm().transpose();
}

SPDMatrix SPDMatrix::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw InvalidRange("SPDMatrix::scaled: factor must be positive");
  }
  SPDMatrix out;
  out.entries_ = entries_ * factor;
  out.lower_ = lower_ * std::sqrt(factor);
  out.log_det_ = log_det_ + static_cast<double>(dim()) * std::log(factor);
  return out;
}

SPDMatrix SPDMatrix::unit_determinant() const {
  const double m = static_cast<double>(dim());
  SPDMatrix out = scaled(std::exp(-log_det_ / m));
  out.log_det_ = 0.0;
  return out;
}

Vector sample_unit_sphere(Index m, Rng& rng) {
  if (m < 1) throw InvalidRange("sample_unit_sphere: m >= 1 required");
  Vector z(m);
  double norm = 0.0;
  do {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index i = 0; i < m; ++i) z(i) = normal(rng);
    norm = z.norm();
  } while (norm == 0.0);
  return z / norm;
}

Matrix random_orthogonal(Index m, Rng& rng) {
  if (m < 1) throw InvalidRange("random_orthogonal: m >= 1 required");
  Matrix a(m, m);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(m, m);
  // Fixing the signs of R's diagonal makes the distribution Haar.
  for (Index j = 0; j < m; ++j) {
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

SPDMatrix random_spd(Index m, double eig_lo, double eig_hi, Rng& rng) {
  if (!(eig_lo > 0.0) || !(eig_lo <= eig_hi)) {
    throw InvalidRange("random_spd: need 0 < eig_lo <= eig_hi");
  }
  Vector eigs(m);
  std::uniform_real_distribution<double> uni(eig_lo, eig_hi);
  for (Index i = 0; i < m; ++i) eigs(i) = uni(rng);
  Matrix q = random_orthogonal(m, rng);
  Matrix s = q * eigs.asDiagonal() * q.transpose();
  return SPDMatrix(std::move(s));
}

}  // namespace femda
