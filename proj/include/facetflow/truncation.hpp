#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace facetflow {

// Dead-zone truncation: shift the modulus down by delta, keep the direction.
// The z/|z| factor is taken as 0 at the origin (the prefactor vanishes there).
template <typename Derived>
typename Derived::PlainObject truncate(const Eigen::MatrixBase<Derived>& z, double delta) {
  double m = z.norm();
  if (m < 1e-300) return Derived::PlainObject::Zero(z.rows(), z.cols());
  double f = std::max(m - delta, 0.0);
  return (f / m) * z.derived();
}

// Relaxed truncation: modulus measured as sqrt(eps^2+|z|^2). eps = 0 reduces
// exactly to truncate. Vanishes iff eps^2+|z|^2 <= delta^2.
template <typename Derived>
typename Derived::PlainObject truncate_relaxed(const Eigen::MatrixBase<Derived>& z,
                                               double delta, double eps) {
  double m = z.norm();
  if (m < 1e-300) return Derived::PlainObject::Zero(z.rows(), z.cols());
  double f = std::max(std::sqrt(eps * eps + m * m) - delta, 0.0);
  return (f / m) * z.derived();
}

// Lipschitz constant of the relaxed truncation with 2*delta shift under
// eps < h*delta: 1 + 8/sqrt(4-h^2), increasing in h.
inline double lipschitz_constant(double h) {
  if (!(h > 0.0 && h < 2.0)) throw std::domain_error("lipschitz_constant: h must lie in (0,2)");
  return 1.0 + 8.0 / std::sqrt(4.0 - h * h);
}

// Regularized gradient modulus and its shifted square.
template <typename Derived>
double v_eps(const Eigen::MatrixBase<Derived>& grad, double eps) {
  return std::sqrt(eps * eps + grad.squaredNorm());
}

template <typename Derived>
double u_delta_eps(const Eigen::MatrixBase<Derived>& grad, double delta, double eps) {
  double t = std::max(v_eps(grad, eps) - delta, 0.0);
  return t * t;
}

// Bijective growth map (eps^2+|z|^2)^{(p-1)/2} z.
template <typename Derived>
typename Derived::PlainObject map_gp_eps(const Eigen::MatrixBase<Derived>& z, double p,
                                         double eps) {
  if (!(p > 1.0)) throw std::domain_error("map_gp_eps: p must exceed 1");
  return std::pow(eps * eps + z.squaredNorm(), 0.5 * (p - 1.0)) * z.derived();
}

struct TruncationParams {
  double delta = 0.05;
  double eps = 0.0;

  // The solver-facing relaxed maps require eps < delta/8.
  void validate_relaxed() const {
    if (!(delta > 0.0 && delta < 1.0))
      throw std::invalid_argument("TruncationParams: delta must lie in (0,1)");
    if (!(eps >= 0.0 && eps < delta / 8.0))
      throw std::invalid_argument("TruncationParams: need 0 <= eps < delta/8");
  }
};

}  // namespace facetflow
