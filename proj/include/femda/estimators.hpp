#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "femda/linalg.hpp"
#include "femda/types.hpp"

namespace femda {

struct FixedPointDiagnostics {
  int iterations = 0;
  double final_delta = 0.0;
  bool converged = false;
};

struct StudentParams {
  Vector mean;
  SPDMatrix scatter;
  double nu = 1.0;
};

inline constexpr double kDefaultTol = 1e-6;
inline constexpr int kFemdaMaxIter = 200;
inline constexpr int kStudentMaxIter = 500;

// Builds an SPD matrix from a symmetric candidate, adding a ridge of
// 1e-8 * (trace/m) * I once if the Cholesky fails (delta * I when the trace
// is zero). A second failure raises NumericalBreakdown.
SPDMatrix spd_with_ridge(Matrix candidate);

// Sample mean and 1/n covariance. Throws TooFewPoints for n < 2.
ClusterParams estimate_gaussian(const Matrix& points);

// One mean update of the coupled fixed point: the w = 1/t weighted average,
// with t evaluated at (mean, dispersion). Insensitive to the scale of the
// dispersion argument.
Vector femda_mean_step(const Matrix& points, const Vector& mean,
                       const SPDMatrix& dispersion);

// One scatter update, pre-normalization: (m/n) sum_i w_i d_i d_i^T with
// w_i = 1/t_i evaluated at (mean, dispersion). Degree-1 homogeneous in the
// dispersion argument.
Matrix femda_scatter_step(const Matrix& points, const Vector& mean,
                          const SPDMatrix& dispersion);

// Robust starting point: coordinatewise median and ridge-protected sample
// covariance scaled to unit determinant.
ClusterParams femda_default_init(const Matrix& points);

// Alternates mean and scatter updates; after every scatter update the
// dispersion is re-symmetrized and pinned to det = 1. Stops when the larger
// of the relative mean change and relative Frobenius dispersion change
// drops below tol, or after max_iter iterations (converged=false then).
std::pair<ClusterParams, FixedPointDiagnostics> femda_fixed_point(
    const Matrix& points, const ClusterParams& init, double tol = kDefaultTol,
    int max_iter = kFemdaMaxIter);

// femda_fixed_point from the default init.
std::pair<ClusterParams, FixedPointDiagnostics> femda_fit(
    const Matrix& points, double tol = kDefaultTol,
    int max_iter = kFemdaMaxIter);

// EM for the multivariate t distribution. E-step weights (nu+m)/(nu+t_i);
// M-step weighted mean and 1/n scatter; the degrees of freedom solve the
// one-dimensional digamma stationarity equation by bisection on
// [0.1, 1e6] unless fixed_nu pins them. If loglik_trace is given, the
// observed log-likelihood after every iteration is appended to it.
std::pair<StudentParams, FixedPointDiagnostics> student_em(
    const Matrix& points, double tol = kDefaultTol,
    int max_iter = kStudentMaxIter, std::optional<double> fixed_nu = {},
    std::vector<double>* loglik_trace = nullptr);

// Student M-estimator with nu fixed at 3, scatter rescaled to det = 1.
ClusterParams robust_plugin(const Matrix& points, double tol = kDefaultTol,
                            int max_iter = kStudentMaxIter);

// Observed log-likelihood of points under a multivariate t model.
double student_log_likelihood(const Matrix& points, const Vector& mean,
                              const SPDMatrix& scatter, double nu);

}  // namespace femda
