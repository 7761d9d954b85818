#include <doctest.h>

#include <random>

#include "facetflow/density.hpp"
#include "facetflow/mollifier.hpp"

using namespace facetflow;
using Eigen::Vector2d;

namespace {

double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// test-side tensor Gauss-Legendre mass oracle (composite panels)
double tensor_mass(const MollifierSpec& spec, int order, int panels) {
  std::vector<double> x(order), w(order);
  // Newton iteration for the Legendre nodes, independent of the library path
  for (int i = 0; i < order; ++i) {
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
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  double eps = spec.eps, acc = 0.0, hw = 2.0 * eps / panels;
  for (int pi = 0; pi < panels; ++pi)
    for (int pj = 0; pj < panels; ++pj)
      for (int qi = 0; qi < order; ++qi)
        for (int qj = 0; qj < order; ++qj) {
          double yx = -eps + hw * pi + 0.5 * hw * (x[qi] + 1.0);
          double yy = -eps + hw * pj + 0.5 * hw * (x[qj] + 1.0);
          acc += 0.25 * hw * hw * w[qi] * w[qj] * kernel_value(spec, {yx, yy});
        }
  return acc;
}

}  // namespace

TEST_SUITE_BEGIN("mollifier");

TEST_CASE("kernel vanishes outside its support") {
  for (auto shape : {KernelShape::quartic_bump, KernelShape::smooth_bump}) {
    MollifierSpec spec = MollifierSpec::make(0.2, shape);
    CHECK(kernel_value(spec, {0.4, 0.0}) == 0.0);
    CHECK(kernel_value(spec, {0.15, 0.15}) == 0.0);  // |x| = 0.212 > eps
  }
}

TEST_CASE("kernel mass is one") {
  for (auto shape : {KernelShape::quartic_bump, KernelShape::smooth_bump}) {
    MollifierSpec spec = MollifierSpec::make(0.3, shape);
    CHECK(std::abs(tensor_mass(spec, 16, 6) - 1.0) < 1e-8);
  }
}

TEST_CASE("kernel symmetry is exact") {
  MollifierSpec spec = MollifierSpec::make(0.25);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 1000; ++k) {
    Vector2d x(0.5 * (u01(rng) - 0.5), 0.5 * (u01(rng) - 0.5));
    CHECK(kernel_value(spec, x) == kernel_value(spec, -x));
  }
}

TEST_CASE("radial power convolution: unit mass at sigma = 0") {
  MollifierSpec spec = MollifierSpec::make(0.2);
  for (const Vector2d& z : {Vector2d(0.0, 0.0), Vector2d(0.05, 0.1), Vector2d(1.5, -0.3)})
    CHECK(std::abs(radial_power_convolution(spec, 0.0, z) - 1.0) < 1e-8);
}

TEST_CASE("radial power convolution: sigma = 2 expansion") {
  MollifierSpec spec = MollifierSpec::make(0.35);
  // h_{2,eps}(z) = |z|^2 + m2 with m2 the kernel's second moment
  double m2 = radial_power_convolution(spec, 2.0, Vector2d::Zero());
  for (const Vector2d& z : {Vector2d(0.2, -0.1), Vector2d(1.0, 2.0), Vector2d(0.0, 0.3)}) {
    double h = radial_power_convolution(spec, 2.0, z);
    CHECK(h == doctest::Approx(z.squaredNorm() + m2).epsilon(1e-8));
  }
}

TEST_CASE("radial power convolution: sigma = -1 is finite at the origin") {
  MollifierSpec spec = MollifierSpec::make(0.1);
  double h = radial_power_convolution(spec, -1.0, Vector2d::Zero());
  CHECK(std::isfinite(h));
  CHECK(h > 0.0);
  CHECK_THROWS_AS(radial_power_convolution(spec, -1.5, Vector2d::Zero()), std::domain_error);
}

TEST_CASE("scaling identity h_{sigma,eps}(z) = eps^sigma h_{sigma,1}(z/eps)") {
  MollifierSpec quarter = MollifierSpec::make(0.25);
  MollifierSpec unit = MollifierSpec::make(1.0);
  std::mt19937_64 rng(7);
  for (double sigma : {-1.0, -0.5, 0.5, 1.0, 2.5}) {
    for (int k = 0; k < 10; ++k) {
      Vector2d z(0.6 * (u01(rng) - 0.5), 0.6 * (u01(rng) - 0.5));
      double lhs = radial_power_convolution(quarter, sigma, z);
      double rhs = std::pow(0.25, sigma) * radial_power_convolution(unit, sigma, z / 0.25);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
  }
}

TEST_CASE("h_sigma bound: one finite stable constant per sigma") {
  MollifierSpec spec = MollifierSpec::make(0.2);
  auto fit = [&](double sigma, int n) {
    double c = 0.0;
    std::mt19937_64 r2(11);
    for (int k = 0; k < n; ++k) {
      double rr = spec.eps * std::exp(std::log(1e-3) + std::log(1e6) * u01(r2));
      double th = 2.0 * M_PI * u01(r2);
      Vector2d z(rr * std::cos(th), rr * std::sin(th));
      double eps_k = 0.02 + 0.9 * u01(r2);
      MollifierSpec sk = spec;
      sk.eps = eps_k;
      double h = radial_power_convolution(sk, sigma, z);
      c = std::max(c, h / std::pow(eps_k * eps_k + z.squaredNorm(), 0.5 * sigma));
    }
    return c;
  };
  for (double sigma : {-1.0, 0.5, 1.5}) {
    double c1 = fit(sigma, 400), c2 = fit(sigma, 800);
    CHECK(std::isfinite(c2));
    CHECK(c2 > 0.0);
    CHECK(std::abs(c2 - c1) <= 0.2 * std::max(c1, c2));
  }
}

TEST_CASE("mollified one-homogeneous gradient vanishes at the origin") {
  DensityParams d = DensityParams::model(1.0, 2.0);
  for (double eps : {0.1, 0.05}) {
    MollifierSpec spec = MollifierSpec::make(eps);
    Vector2d g = convolve2(
        spec, [&](const Vector2d& v) -> Vector2d { return d.b * v.normalized(); },
        Vector2d::Zero(), true);
    CHECK(g.norm() < 1e-12);
  }
}

TEST_CASE("gradient of the mollified E1 at zero is eps-independent") {
  DensityParams d = DensityParams::model(1.0, 2.0);
  MollifierSpec s1 = MollifierSpec::make(0.1);
  MollifierSpec s2 = MollifierSpec::make(0.05);
  double n1 = mollify_density(d, s1, Vector2d::Zero()).gradient.norm();
  double n2 = mollify_density(d, s2, Vector2d::Zero()).gradient.norm();
  CHECK(std::abs(n1 - n2) < 1e-8);
}

TEST_CASE("mollified gradient converges to the exact gradient away from zero") {
  DensityParams d = DensityParams::model(1.0, 2.0);
  Vector2d z(1.3, -0.4);
  Vector2d exact = exact_gradient(d, z);
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    MollifierSpec spec = MollifierSpec::make(eps);
    double err = (mollify_density(d, spec, z).gradient - exact).norm();
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-4);
}

TEST_SUITE_END();
