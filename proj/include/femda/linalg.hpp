#pragma once

#include "femda/rng.hpp"
#include "femda/types.hpp"

namespace femda {

// Symmetric positive-definite matrix with its lower Cholesky factor cached
// at construction. Immutable afterwards, safe to share across threads.
// Inverse quadratic forms are always evaluated through triangular solves
// against the cached factor, never by explicit inversion.
class SPDMatrix {
 public:
  // Re-symmetrizes the input as (M + M^T)/2 before factorizing.
  // Throws NotPositiveDefinite if any Cholesky pivot is non-positive.
  explicit SPDMatrix(Matrix entries);

  Index dim() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }
  // Lower-triangular L with L L^T = entries().
  const Matrix& cholesky_factor() const { return lower_; }
  double log_det() const { return log_det_; }

  // (x - mean)^T S^{-1} (x - mean) via triangular solve.
  double mahalanobis_sq(const Vector& x, const Vector& mean) const;
  // Row-wise squared Mahalanobis distances for a batch of observations.
  Vector mahalanobis_sq_rows(const Matrix& points, const Vector& mean) const;

  // The same matrix scaled by factor > 0 (entries * factor), with the
  // cached factor and log-determinant updated without re-factorization.
  SPDMatrix scaled(double factor) const;
  // Rescaled so that det = 1 (the gauge used by scale-free estimators).
  SPDMatrix unit_determinant() const;

 private:
  SPDMatrix() = default;
  Matrix entries_;
  Matrix lower_;
  double log_det_ = 0.0;
};

// Uniform draw on the unit (m-1)-sphere: normalized standard Gaussian.
Vector sample_unit_sphere(Index m, Rng& rng);

// Haar-distributed orthogonal matrix: QR of an i.i.d. standard-normal
// matrix with the R diagonal sign-corrected to be positive.
Matrix random_orthogonal(Index m, Rng& rng);

// Q diag(lambda) Q^T with lambda_i ~ Uniform[eig_lo, eig_hi] and Q Haar.
// Throws InvalidRange unless 0 < eig_lo <= eig_hi.
SPDMatrix random_spd(Index m, double eig_lo, double eig_hi, Rng& rng);

// Per-class location/dispersion pair.
struct ClusterParams {
  Vector mean;
  SPDMatrix dispersion;
};

}  // namespace femda
