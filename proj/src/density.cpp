#include "facetflow/density.hpp"

namespace facetflow {
namespace {

double mollified_value(const RelaxedDensity& d, const Eigen::Vector2d& z) {
  const DensityParams& pr = d.params;
  return convolve(
      d.kernel,
      [&pr](const Eigen::Vector2d& v) {
        double m = v.norm();
        return pr.b * m + std::pow(m, pr.p) / pr.p;
      },
      z, /*singular_at_origin=*/true);
}

Eigen::Vector2d mollified_gradient(const RelaxedDensity& d, const Eigen::Vector2d& z) {
  const DensityParams& pr = d.params;
  return convolve2(
      d.kernel,
      [&pr](const Eigen::Vector2d& v) -> Eigen::Vector2d {
        double m = v.norm();
        if (m < 1e-300) return Eigen::Vector2d::Zero();
        return (pr.b / m + std::pow(m, pr.p - 2.0)) * v;
      },
      z, /*singular_at_origin=*/true);
}

Eigen::Matrix2d mollified_hessian(const RelaxedDensity& d, const Eigen::Vector2d& z) {
  const DensityParams& pr = d.params;
  double eps = d.kernel.eps;
  if (z.norm() > 8.0 * eps) {
    // Differentiate under the convolution; the integrand never meets the
    // origin here.
    double hxx = convolve(
        d.kernel,
        [&pr](const Eigen::Vector2d& v) { return exact_hessian(pr, v)(0, 0); }, z, false);
    double hxy = convolve(
        d.kernel,
        [&pr](const Eigen::Vector2d& v) { return exact_hessian(pr, v)(0, 1); }, z, false);
    double hyy = convolve(
        d.kernel,
        [&pr](const Eigen::Vector2d& v) { return exact_hessian(pr, v)(1, 1); }, z, false);
    Eigen::Matrix2d H;
    H << hxx, hxy, hxy, hyy;
    return H;
  }
  // Near the origin the identity hess(j*E) = j*hess(E) is unavailable; fall
  // back to central differences of the convolved gradient.
  double step = std::max(1e-6, 1e-4 * eps);
  Eigen::Matrix2d H;
  for (int k = 0; k < 2; ++k) {
    Eigen::Vector2d e = Eigen::Vector2d::Zero();
    e[k] = step;
    Eigen::Vector2d gp = mollified_gradient(d, z + e);
    Eigen::Vector2d gm = mollified_gradient(d, z - e);
    H.col(k) = (gp - gm) / (2.0 * step);
  }
  return 0.5 * (H + H.transpose());
}

}  // namespace

RelaxedDensity RelaxedDensity::closed_form(const DensityParams& params, double eps) {
  RelaxedDensity d;
  d.params = params;
  d.eps = eps;
  d.mode = RelaxMode::closed_form;
  d.validate();
  return d;
}

RelaxedDensity RelaxedDensity::mollified(const DensityParams& params, double eps,
                                         KernelShape shape) {
  RelaxedDensity d;
  d.params = params;
  d.eps = eps;
  d.mode = RelaxMode::mollified;
  d.kernel = MollifierSpec::make(eps, shape);
  d.validate();
  return d;
}

void RelaxedDensity::validate() const {
  params.validate();
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("RelaxedDensity: eps must lie in (0,1)");
  if (mode == RelaxMode::mollified) kernel.validate();
}

double value(const RelaxedDensity& d, const Eigen::Vector2d& z) {
  detail::require_finite(z, "value");
  if (d.mode == RelaxMode::closed_form)
    return e1_relaxed_value(d.params.b, d.eps, z) + ep_relaxed_value(d.params.p, d.eps, z);
  return mollified_value(d, z);
}

Eigen::Vector2d gradient(const RelaxedDensity& d, const Eigen::Vector2d& z) {
  detail::require_finite(z, "gradient");
  if (d.mode == RelaxMode::closed_form)
    return e1_relaxed_gradient(d.params.b, d.eps, z) + ep_relaxed_gradient(d.params.p, d.eps, z);
  return mollified_gradient(d, z);
}

Eigen::Matrix2d hessian(const RelaxedDensity& d, const Eigen::Vector2d& z) {
  detail::require_finite(z, "hessian");
  if (d.mode == RelaxMode::closed_form)
    return e1_relaxed_hessian(d.params.b, d.eps, z) + ep_relaxed_hessian(d.params.p, d.eps, z);
  return mollified_hessian(d, z);
}

EllipticityBounds ellipticity_bounds(const DensityParams& d, double eps,
                                     const Eigen::Vector2d& z) {
  detail::require_finite(z, "ellipticity_bounds");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("ellipticity_bounds: eps must lie in (0,1)");
  double w2 = eps * eps + z.squaredNorm();
  EllipticityBounds eb;
  eb.lower = d.lambda * std::pow(w2, 0.5 * d.p - 1.0);
  eb.upper = d.Lambda * std::pow(w2, 0.5 * d.p - 1.0) + d.K / std::sqrt(w2);
  return eb;
}

MollifiedEval mollify_density(const DensityParams& d, const MollifierSpec& spec,
                              const Eigen::Vector2d& z) {
  detail::require_finite(z, "mollify_density");
  RelaxedDensity rd;
  rd.params = d;
  rd.eps = spec.eps;
  rd.mode = RelaxMode::mollified;
  rd.kernel = spec;
  MollifiedEval out;
  out.value = mollified_value(rd, z);
  out.gradient = mollified_gradient(rd, z);
  if (!std::isfinite(out.value) || !out.gradient.allFinite())
    throw std::runtime_error("mollify_density: quadrature failure");
  return out;
}

}  // namespace facetflow
