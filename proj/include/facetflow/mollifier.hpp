#pragma once

#include <Eigen/Core>
#include <functional>

namespace facetflow {

enum class KernelShape { smooth_bump, quartic_bump };

// Compactly supported radial unit-mass kernel j, scaled as
// j_eps(x) = eps^{-n} j(x/eps). supp j is the closed unit ball.
struct MollifierSpec {
  int n = 2;
  KernelShape shape = KernelShape::quartic_bump;
  double eps = 0.1;
  double normalization = 0.0;  // makes the unit kernel integrate to one

  static MollifierSpec make(double eps, KernelShape shape = KernelShape::quartic_bump);
  void validate() const;
};

// Unnormalized radial profile as a function of s = |x|^2; zero for s >= 1.
double kernel_profile(KernelShape shape, double s);

// j_eps(x); zero outside the closed ball of radius eps.
double kernel_value(const MollifierSpec& spec, const Eigen::Vector2d& x);

// h_{sigma,eps}(z) = (j_eps * |.|^sigma)(z). Requires sigma >= -1 (integrable
// in dimension two).
double radial_power_convolution(const MollifierSpec& spec, double sigma,
                                const Eigen::Vector2d& z);

// (j_eps * g)(z). `singular_at_origin` marks integrands g that are singular or
// non-smooth at the origin; the quadrature then switches to polar coordinates
// centred at the singular point whenever it lies inside the kernel support.
double convolve(const MollifierSpec& spec,
                const std::function<double(const Eigen::Vector2d&)>& g,
                const Eigen::Vector2d& z, bool singular_at_origin);

Eigen::Vector2d convolve2(const MollifierSpec& spec,
                          const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& g,
                          const Eigen::Vector2d& z, bool singular_at_origin);

}  // namespace facetflow
