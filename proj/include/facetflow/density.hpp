#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

#include "facetflow/mollifier.hpp"

namespace facetflow {

// Structural constants of the split density E = E1 + Ep with E1(z) = b|z| and
// Ep(z) = |z|^p / p in the model case. lambda/Lambda bound the Ep Hessian,
// K bounds the one-homogeneous Hessian scale, beta0 is the Hoelder exponent
// of the Hessians away from the origin.
struct DensityParams {
  double b = 1.0;
  double p = 2.0;
  double lambda = 1.0;
  double Lambda = 1.0;
  double K = 1.0;
  double beta0 = 1.0;

  static DensityParams model(double b, double p) {
    DensityParams d;
    d.b = b;
    d.p = p;
    d.lambda = std::min(1.0, p - 1.0);
    d.Lambda = std::max(1.0, p - 1.0);
    d.K = b;
    d.beta0 = 1.0;
    d.validate();
    return d;
  }

  void validate() const {
    if (!(b >= 0.0)) throw std::invalid_argument("DensityParams: b must be nonnegative");
    if (!(p > 1.0)) throw std::invalid_argument("DensityParams: p must exceed 1");
    if (!(lambda > 0.0 && lambda <= Lambda))
      throw std::invalid_argument("DensityParams: need 0 < lambda <= Lambda");
    if (!(K >= b)) throw std::invalid_argument("DensityParams: K must dominate b");
    if (!(beta0 > 0.0 && beta0 <= 1.0))
      throw std::invalid_argument("DensityParams: beta0 must lie in (0,1]");
  }
};

enum class RelaxMode { closed_form, mollified };

struct RelaxedDensity {
  DensityParams params;
  double eps = 0.1;
  RelaxMode mode = RelaxMode::closed_form;
  MollifierSpec kernel;  // mollified mode only

  static RelaxedDensity closed_form(const DensityParams& params, double eps);
  static RelaxedDensity mollified(const DensityParams& params, double eps,
                                  KernelShape shape = KernelShape::quartic_bump);
  void validate() const;
};

namespace detail {
inline void require_finite(const Eigen::Vector2d& z, const char* where) {
  if (!z.allFinite()) throw std::domain_error(std::string(where) + ": non-finite input");
}
}  // namespace detail

// ---- exact model density -------------------------------------------------

inline double exact_value(const DensityParams& d, const Eigen::Vector2d& z) {
  detail::require_finite(z, "exact_value");
  double m = z.norm();
  return d.b * m + std::pow(m, d.p) / d.p;
}

// One-homogeneous gradient b*z/|z| plus |z|^{p-2} z. Undefined at the origin
// when b > 0; callers must fall back to the subdifferential there.
inline Eigen::Vector2d exact_gradient(const DensityParams& d, const Eigen::Vector2d& z) {
  detail::require_finite(z, "exact_gradient");
  double m = z.norm();
  if (m < 1e-300) {
    if (d.b > 0.0)
      throw std::domain_error("exact_gradient: E1 gradient is singular at z = 0");
    return Eigen::Vector2d::Zero();
  }
  return (d.b / m + std::pow(m, d.p - 2.0)) * z;
}

inline Eigen::Matrix2d exact_hessian(const DensityParams& d, const Eigen::Vector2d& z) {
  detail::require_finite(z, "exact_hessian");
  double m = z.norm();
  if (m < 1e-300) throw std::domain_error("exact_hessian: singular at z = 0");
  double mp2 = std::pow(m, d.p - 2.0);
  double a = d.b / m + mp2;
  double c = -d.b / (m * m * m) + (d.p - 2.0) * mp2 / (m * m);
  return a * Eigen::Matrix2d::Identity() + c * (z * z.transpose());
}

// Support gauge of E1 = b|.|: the dual norm |w|/b. The subdifferential of E1
// at the origin is exactly its unit sublevel set.
inline double support_gauge(const DensityParams& d, const Eigen::Vector2d& w) {
  detail::require_finite(w, "support_gauge");
  if (d.b <= 0.0) throw std::domain_error("support_gauge: undefined for b = 0");
  return w.norm() / d.b;
}

// ---- closed-form relaxation ----------------------------------------------
// E1_eps(z) = b sqrt(eps^2+|z|^2), Ep_eps(z) = (eps^2+|z|^2)^{p/2} / p.

inline double e1_relaxed_value(double b, double eps, const Eigen::Vector2d& z) {
  return b * std::sqrt(eps * eps + z.squaredNorm());
}

inline Eigen::Vector2d e1_relaxed_gradient(double b, double eps, const Eigen::Vector2d& z) {
  return (b / std::sqrt(eps * eps + z.squaredNorm())) * z;
}

inline Eigen::Matrix2d e1_relaxed_hessian(double b, double eps, const Eigen::Vector2d& z) {
  double w2 = eps * eps + z.squaredNorm();
  double w = std::sqrt(w2);
  return (b / w) * Eigen::Matrix2d::Identity() - (b / (w2 * w)) * (z * z.transpose());
}

inline double ep_relaxed_value(double p, double eps, const Eigen::Vector2d& z) {
  return std::pow(eps * eps + z.squaredNorm(), 0.5 * p) / p;
}

inline Eigen::Vector2d ep_relaxed_gradient(double p, double eps, const Eigen::Vector2d& z) {
  return std::pow(eps * eps + z.squaredNorm(), 0.5 * p - 1.0) * z;
}

inline Eigen::Matrix2d ep_relaxed_hessian(double p, double eps, const Eigen::Vector2d& z) {
  double w2 = eps * eps + z.squaredNorm();
  double a = std::pow(w2, 0.5 * p - 1.0);
  double c = (p - 2.0) * std::pow(w2, 0.5 * p - 2.0);
  return a * Eigen::Matrix2d::Identity() + c * (z * z.transpose());
}

// ---- relaxed density interface --------------------------------------------

double value(const RelaxedDensity& d, const Eigen::Vector2d& z);
Eigen::Vector2d gradient(const RelaxedDensity& d, const Eigen::Vector2d& z);
Eigen::Matrix2d hessian(const RelaxedDensity& d, const Eigen::Vector2d& z);

struct EllipticityBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// lower = lambda (eps^2+|z|^2)^{p/2-1},
// upper = Lambda (eps^2+|z|^2)^{p/2-1} + K (eps^2+|z|^2)^{-1/2};
// every eigenvalue of the relaxed Hessian lies between the two.
EllipticityBounds ellipticity_bounds(const DensityParams& d, double eps,
                                     const Eigen::Vector2d& z);

struct MollifiedEval {
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
};

// Kernel-convolved model density: value and gradient of j_eps * (E1 + Ep).
MollifiedEval mollify_density(const DensityParams& d, const MollifierSpec& spec,
                              const Eigen::Vector2d& z);

}  // namespace facetflow
