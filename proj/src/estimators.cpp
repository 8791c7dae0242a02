#include "femda/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "femda/errors.hpp"

namespace femda {

namespace {

constexpr double kRidgeDelta = 1e-8;
constexpr double kWeightClampFactor = 1e-12;
constexpr double kNuLo = 0.1;
constexpr double kNuHi = 1e6;

double digamma(double x) {
  // Recurrence up to x >= 6, then the asymptotic expansion.
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0)));
  return result;
}

Vector column_medians(const Matrix& points) {
  const Index n = points.rows();
  Vector med(points.cols());
  std::vector<double> buf(static_cast<std::size_t>(n));
  for (Index j = 0; j < points.cols(); ++j) {
    for (Index i = 0; i < n; ++i) buf[static_cast<std::size_t>(i)] = points(i, j);
    const auto mid = buf.begin() + n / 2;
    std::nth_element(buf.begin(), mid, buf.end());
    if (n % 2 == 1) {
      med(j) = *mid;
    } else {
      const double upper = *mid;
      med(j) = 0.5 * (*std::max_element(buf.begin(), mid) + upper);
    }
  }
  return med;
}

// t_i clamped away from zero before inversion; the floor scales with the
// dispersion so the weights stay scale-consistent.
Vector inverse_t_weights(const Matrix& points, const Vector& mean,
                         const SPDMatrix& dispersion) {
  Vector t = dispersion.mahalanobis_sq_rows(points, mean);
  const double eps_t =
      kWeightClampFactor * dispersion.entries().trace() /
      static_cast<double>(dispersion.dim());
  return t.cwiseMax(eps_t).cwiseInverse();
}

double relative_change(const Vector& next, const Vector& prev) {
  return (next - prev).norm() / std::max(prev.norm(), 1e-12);
}

double relative_change(const Matrix& next, const Matrix& prev) {
  return (next - prev).norm() / std::max(prev.norm(), 1e-12);
}

// Solves -psi(nu/2) + log(nu/2) + 1 + avg + psi((nu_old+m)/2)
//        - log((nu_old+m)/2) = 0 for nu; the left side is strictly
// decreasing, so out-of-bracket signs clamp to the search bounds.
double solve_nu_equation(double avg_logu_minus_u, double nu_old, Index m) {
  const double rhs_const = digamma((nu_old + static_cast<double>(m)) / 2.0) -
                           std::log((nu_old + static_cast<double>(m)) / 2.0);
  const auto objective = [&](double nu) {
    return -digamma(nu / 2.0) + std::log(nu / 2.0) + 1.0 + avg_logu_minus_u +
           rhs_const;
  };
  double lo = kNuLo, hi = kNuHi;
  if (objective(lo) <= 0.0) return lo;
  if (objective(hi) >= 0.0) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (objective(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SPDMatrix spd_with_ridge(Matrix candidate) {
  candidate = 0.5 * (candidate + candidate.transpose()).eval();
  try {
    return SPDMatrix(candidate);
  } catch (const NotPositiveDefinite&) {
  }
  double scale = candidate.trace() / static_cast<double>(candidate.rows());
  if (!(scale > 0.0)) scale = 1.0;
  candidate.diagonal().array() += kRidgeDelta * scale;
  try {
    return SPDMatrix(std::move(candidate));
  } catch (const NotPositiveDefinite&) {
    throw NumericalBreakdown("spd_with_ridge: matrix not positive definite after ridge");
  }
}

ClusterParams estimate_gaussian(const Matrix& points) {
  const Index n = points.rows();
  if (n < 2) throw TooFewPoints("estimate_gaussian: need n >= 2");
  Vector mean = points.colwise().mean();
  Matrix centered = points.rowwise() - mean.transpose();
  Matrix cov = centered.transpose() * centered / static_cast<double>(n);
  return ClusterParams{std::move(mean), spd_with_ridge(std::move(cov))};
}

Vector femda_mean_step(const Matrix& points, const Vector& mean,
                       const SPDMatrix& dispersion) {
  const Vector w = inverse_t_weights(points, mean, dispersion);
  return points.transpose() * w / w.sum();
}

Matrix femda_scatter_step(const Matrix& points, const Vector& mean,
                          const SPDMatrix& dispersion) {
  const Index n = points.rows();
  const Vector w = inverse_t_weights(points, mean, dispersion);
  Matrix centered = points.rowwise() - mean.transpose();
  Matrix s = centered.transpose() * w.asDiagonal() * centered;
  return s * (static_cast<double>(points.cols()) / static_cast<double>(n));
}

ClusterParams femda_default_init(const Matrix& points) {
  Vector mean = column_medians(points);
  Matrix centered = points.rowwise() - points.colwise().mean();
  Matrix cov =
      centered.transpose() * centered / static_cast<double>(points.rows());
  return ClusterParams{std::move(mean),
                       spd_with_ridge(std::move(cov)).unit_determinant()};
}

std::pair<ClusterParams, FixedPointDiagnostics> femda_fixed_point(
    const Matrix& points, const ClusterParams& init, double tol,
    int max_iter) {
  const Index n = points.rows();
  const Index m = points.cols();
  if (n < m + 1) throw TooFewPoints("femda_fixed_point: need n >= m+1");
  if (init.mean.size() != m || init.dispersion.dim() != m) {
    throw DimensionMismatch("femda_fixed_point: init dimensions");
  }

  Vector mean = init.mean;
  SPDMatrix dispersion = init.dispersion.unit_determinant();
  FixedPointDiagnostics diag;
  for (int it = 0; it < max_iter; ++it) {
    Vector next_mean = femda_mean_step(points, mean, dispersion);
    SPDMatrix next_dispersion =
        spd_with_ridge(femda_scatter_step(points, next_mean, dispersion))
            .unit_determinant();
    diag.iterations = it + 1;
    diag.final_delta =
        std::max(relative_change(next_mean, mean),
                 relative_change(next_dispersion.entries(), dispersion.entries()));
    mean = std::move(next_mean);
    dispersion = std::move(next_dispersion);
    if (diag.final_delta < tol) {
      diag.converged = true;
      break;
    }
  }
  return {ClusterParams{std::move(mean), std::move(dispersion)}, diag};
}

std::pair<ClusterParams, FixedPointDiagnostics> femda_fit(const Matrix& points,
                                                          double tol,
                                                          int max_iter) {
  return femda_fixed_point(points, femda_default_init(points), tol, max_iter);
}

double student_log_likelihood(const Matrix& points, const Vector& mean,
                              const SPDMatrix& scatter, double nu) {
  const auto m = static_cast<double>(points.cols());
  const Vector t = scatter.mahalanobis_sq_rows(points, mean);
  const double constant = std::lgamma((nu + m) / 2.0) - std::lgamma(nu / 2.0) -
                          (m / 2.0) * std::log(nu * M_PI) -
                          0.5 * scatter.log_det();
  double ll = 0.0;
  for (Index i = 0; i < t.size(); ++i) {
    ll += constant - ((nu + m) / 2.0) * std::log1p(t(i) / nu);
  }
  return ll;
}

std::pair<StudentParams, FixedPointDiagnostics> student_em(
    const Matrix& points, double tol, int max_iter,
    std::optional<double> fixed_nu, std::vector<double>* loglik_trace) {
  const Index n = points.rows();
  const Index m = points.cols();
  if (n < m + 2) throw TooFewPoints("student_em: need n >= m+2");

  Vector mean = points.colwise().mean();
  Matrix centered = points.rowwise() - mean.transpose();
  SPDMatrix scatter =
      spd_with_ridge(centered.transpose() * centered / static_cast<double>(n));
  double nu = fixed_nu.value_or(10.0);

  FixedPointDiagnostics diag;
  for (int it = 0; it < max_iter; ++it) {
    const Vector t = scatter.mahalanobis_sq_rows(points, mean);
    const Vector u =
        (nu + static_cast<double>(m)) / (t.array() + nu);

    Vector next_mean = points.transpose() * u / u.sum();
    centered = points.rowwise() - next_mean.transpose();
    SPDMatrix next_scatter = spd_with_ridge(
        centered.transpose() * u.asDiagonal() * centered / static_cast<double>(n));

    double next_nu = nu;
    if (!fixed_nu) {
      const double avg = (u.array().log() - u.array()).mean();
      next_nu = solve_nu_equation(avg, nu, m);
    }

    diag.iterations = it + 1;
    diag.final_delta = std::max(
        {relative_change(next_mean, mean),
         relative_change(next_scatter.entries(), scatter.entries()),
         std::abs(next_nu - nu) / std::max(1.0, nu)});
    mean = std::move(next_mean);
    scatter = std::move(next_scatter);
    nu = next_nu;
    if (loglik_trace) {
      loglik_trace->push_back(student_log_likelihood(points, mean, scatter, nu));
    }
    if (diag.final_delta < tol) {
      diag.converged = true;
      break;
    }
  }
  return {StudentParams{std::move(mean), std::move(scatter), nu}, diag};
}

ClusterParams robust_plugin(const Matrix& points, double tol, int max_iter) {
  auto [params, diag] = student_em(points, tol, max_iter, 3.0);
  (void)diag;
  return ClusterParams{std::move(params.mean),
                       params.scatter.unit_determinant()};
}

}  // namespace femda
