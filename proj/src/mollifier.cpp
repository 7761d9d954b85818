#include "facetflow/mollifier.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace facetflow {
namespace {

// Gauss-Legendre nodes/weights on [-1,1].
struct GaussRule {
  std::vector<double> x, w;
};

GaussRule legendre_rule(int order) {
  GaussRule r;
  r.x.resize(order);
  r.w.resize(order);
  for (int i = 0; i < order; ++i) {
    // Newton on P_n with the Tricomi initial guess.
    double t = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = order * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= order; ++k) {
      double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = order * (t * p1 - p0) / (t * t - 1.0);
    r.x[i] = t;
    r.w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return r;
}

const GaussRule& gl24() {
  static const GaussRule r = legendre_rule(24);
  return r;
}

const GaussRule& gl32() {
  static const GaussRule r = legendre_rule(32);
  return r;
}

constexpr int kCartesianPanels = 4;
constexpr int kPolarAngles = 128;

// Generic accumulation over the two quadrature layouts. T is double or
// Eigen::Vector2d.
template <typename T, typename F>
T convolve_impl(const MollifierSpec& spec, const F& g, const Eigen::Vector2d& z,
                bool singular_at_origin, const T& zero) {
  const double eps = spec.eps;
  const double inv_e2 = 1.0 / (eps * eps);
  const double norm = spec.normalization * inv_e2;  // eps^{-n} scaling, n = 2
  const double za = z.norm();

  T acc = zero;
  if (singular_at_origin && za < eps) {
    // Polar around the singular point of the integrand: y = z + r*omega, the
    // argument of g becomes -r*omega and rays stay inside supp j_eps up to
    // R(theta), the exit radius of the ray from z.
    const GaussRule& rad = gl24();
    for (int a = 0; a < kPolarAngles; ++a) {
      double th = 2.0 * M_PI * (a + 0.5) / kPolarAngles;
      Eigen::Vector2d omega(std::cos(th), std::sin(th));
      double zo = z.dot(omega);
      double R = -zo + std::sqrt(std::max(eps * eps - za * za + zo * zo, 0.0));
      if (R <= 0) continue;
      T ray = zero;
      for (size_t q = 0; q < rad.x.size(); ++q) {
        double r = 0.5 * R * (rad.x[q] + 1.0);
        double wq = 0.5 * R * rad.w[q];
        Eigen::Vector2d y = z + r * omega;
        double ker = norm * kernel_profile(spec.shape, y.squaredNorm() * inv_e2);
        ray += (wq * ker * r) * g(Eigen::Vector2d(-r * omega));
      }
      acc += ray;
    }
    acc *= 2.0 * M_PI / kPolarAngles;
    return acc;
  }

  // Smooth case: composite tensor Gauss-Legendre over the bounding box.
  const GaussRule& gr = gl24();
  const int P = kCartesianPanels;
  const double hw = 2.0 * eps / P;
  for (int pi = 0; pi < P; ++pi) {
    double ax = -eps + hw * pi;
    for (int pj = 0; pj < P; ++pj) {
      double ay = -eps + hw * pj;
      for (size_t qi = 0; qi < gr.x.size(); ++qi) {
        double yx = ax + 0.5 * hw * (gr.x[qi] + 1.0);
        double wx = 0.5 * hw * gr.w[qi];
        for (size_t qj = 0; qj < gr.x.size(); ++qj) {
          double yy = ay + 0.5 * hw * (gr.x[qj] + 1.0);
          double wy = 0.5 * hw * gr.w[qj];
          double s = (yx * yx + yy * yy) * inv_e2;
          if (s >= 1.0) continue;
          double ker = norm * kernel_profile(spec.shape, s);
          acc += (wx * wy * ker) * g(Eigen::Vector2d(z.x() - yx, z.y() - yy));
        }
      }
    }
  }
  return acc;
}

}  // namespace

double kernel_profile(KernelShape shape, double s) {
  if (s >= 1.0) return 0.0;
  switch (shape) {
    case KernelShape::quartic_bump: {
      double t = 1.0 - s;
      return t * t * t * t;
    }
    case KernelShape::smooth_bump:
      return std::exp(-1.0 / (1.0 - s));
  }
  return 0.0;
}

MollifierSpec MollifierSpec::make(double eps, KernelShape shape) {
  MollifierSpec spec;
  spec.shape = shape;
  spec.eps = eps;
  spec.validate();
  // Unit-kernel mass in polar coordinates: 2*pi * int_0^1 profile(r^2) r dr,
  // composite so the flat smooth_bump tail is resolved as well.
  const GaussRule& gr = gl32();
  const int panels = 8;
  double mass = 0.0;
  for (int p = 0; p < panels; ++p) {
    double a = static_cast<double>(p) / panels;
    double h = 1.0 / panels;
    for (size_t q = 0; q < gr.x.size(); ++q) {
      double r = a + 0.5 * h * (gr.x[q] + 1.0);
      mass += 0.5 * h * gr.w[q] * kernel_profile(shape, r * r) * r;
    }
  }
  mass *= 2.0 * M_PI;
  spec.normalization = 1.0 / mass;
  return spec;
}

void MollifierSpec::validate() const {
  if (n != 2) throw std::invalid_argument("MollifierSpec: only dimension 2 is supported");
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("MollifierSpec: eps must be in (0,1]");
}

double kernel_value(const MollifierSpec& spec, const Eigen::Vector2d& x) {
  double s = x.squaredNorm() / (spec.eps * spec.eps);
  return spec.normalization / (spec.eps * spec.eps) * kernel_profile(spec.shape, s);
}

double radial_power_convolution(const MollifierSpec& spec, double sigma,
                                const Eigen::Vector2d& z) {
  if (sigma < -1.0) throw std::domain_error("radial_power_convolution: sigma must be >= -1");
  if (!z.allFinite()) throw std::domain_error("radial_power_convolution: non-finite input");
  // |.|^sigma is smooth at the origin only for even sigma >= 0; the polar
  // branch integrates r^{1+sigma} along rays, which is fine for any sigma.
  bool singular = !(sigma >= 0.0 && sigma == 2.0 * std::floor(sigma / 2.0));
  double val = convolve_impl<double>(
      spec,
      [sigma](const Eigen::Vector2d& v) {
        double r = v.norm();
        if (r == 0.0) return sigma > 0.0 ? 0.0 : 1.0;  // measure-zero guard
        return std::pow(r, sigma);
      },
      z, singular, 0.0);
  if (!std::isfinite(val)) throw std::runtime_error("radial_power_convolution: quadrature failure");
  return val;
}

double convolve(const MollifierSpec& spec,
                const std::function<double(const Eigen::Vector2d&)>& g,
                const Eigen::Vector2d& z, bool singular_at_origin) {
  return convolve_impl<double>(spec, g, z, singular_at_origin, 0.0);
}

Eigen::Vector2d convolve2(const MollifierSpec& spec,
                          const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& g,
                          const Eigen::Vector2d& z, bool singular_at_origin) {
  return convolve_impl<Eigen::Vector2d>(spec, g, z, singular_at_origin,
                                        Eigen::Vector2d::Zero().eval());
}

}  // namespace facetflow
