#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "facetflow/density.hpp"

using namespace facetflow;
using Eigen::Vector2d;

namespace {
double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
Vector2d rand_vec(std::mt19937_64& rng, double rlo = 1e-6, double rhi = 1e3) {
  double r = std::exp(std::log(rlo) + (std::log(rhi) - std::log(rlo)) * u01(rng));
  double th = 2.0 * M_PI * u01(rng);
  return {r * std::cos(th), r * std::sin(th)};
}
}  // namespace

TEST_SUITE_BEGIN("density");

TEST_CASE("exact value at the model density") {
  DensityParams d = DensityParams::model(1.0, 2.0);
  CHECK(exact_value(d, {3.0, 4.0}) == doctest::Approx(17.5).epsilon(1e-14));
  CHECK_THROWS_AS(exact_value(d, {std::nan(""), 0.0}), std::domain_error);
}

TEST_CASE("closed-form value at the origin") {
  RelaxedDensity d = RelaxedDensity::closed_form(DensityParams::model(1.0, 2.0), 0.1);
  CHECK(value(d, Vector2d::Zero()) == doctest::Approx(0.105).epsilon(1e-14));
}

TEST_CASE("exact gradient of the one-homogeneous part") {
  DensityParams d = DensityParams::model(2.0, 2.0);
  Vector2d g = exact_gradient(d, {3.0, 4.0});
  // subtract the p-part to isolate b z/|z|
  Vector2d g1 = g - ep_relaxed_gradient(2.0, 0.0, Vector2d(3.0, 4.0));
  CHECK(g1.x() == doctest::Approx(1.2).epsilon(1e-14));
  CHECK(g1.y() == doctest::Approx(1.6).epsilon(1e-14));
  CHECK_THROWS_AS(exact_gradient(d, Vector2d::Zero()), std::domain_error);
}

TEST_CASE("closed-form gradient vanishes at the origin") {
  RelaxedDensity d = RelaxedDensity::closed_form(DensityParams::model(1.0, 2.0), 0.37);
  CHECK(gradient(d, Vector2d::Zero()).norm() == 0.0);
}

TEST_CASE("relaxed one-homogeneous gradient") {
  Vector2d g = e1_relaxed_gradient(1.0, 0.3, {0.4, 0.0});
  CHECK(g.x() == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(g.y() == 0.0);
}

TEST_CASE("closed-form hessian at the origin") {
  RelaxedDensity d = RelaxedDensity::closed_form(DensityParams::model(1.0, 2.0), 0.1);
  Eigen::Matrix2d H = hessian(d, Vector2d::Zero());
  CHECK((H - 11.0 * Eigen::Matrix2d::Identity()).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("pure p=2 density has identity hessian") {
  RelaxedDensity d = RelaxedDensity::closed_form(DensityParams::model(0.0, 2.0), 0.42);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    Eigen::Matrix2d H = hessian(d, rand_vec(rng));
    CHECK((H - Eigen::Matrix2d::Identity()).norm() < 1e-13);
  }
}

TEST_CASE("closed-form hessian matches finite differences of the gradient") {
  RelaxedDensity d = RelaxedDensity::closed_form(DensityParams::model(1.0, 3.0), 0.1);
  Vector2d z(1.0, 0.0);
  Eigen::Matrix2d H = hessian(d, z);
  double step = 1e-6;
  for (int k = 0; k < 2; ++k) {
    Vector2d e = Vector2d::Zero();
    e[k] = step;
    Vector2d col = (gradient(d, z + e) - gradient(d, z - e)) / (2.0 * step);
    CHECK((H.col(k) - col).norm() < 1e-6);
  }
}

TEST_CASE("ellipticity bounds") {
  DensityParams d = DensityParams::model(1.0, 2.0);
  EllipticityBounds eb = ellipticity_bounds(d, 0.1, Vector2d::Zero());
  CHECK(eb.lower == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eb.upper == doctest::Approx(11.0).epsilon(1e-14));
  eb = ellipticity_bounds(d, 0.1, {1.0, 0.0});
  CHECK(eb.lower == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eb.upper == doctest::Approx(1.0 + 1.0 / std::sqrt(1.01)).epsilon(1e-12));
}

TEST_CASE("hessian eigenvalues stay inside the ellipticity bounds") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 1000; ++k) {
    DensityParams d = DensityParams::model(0.1 + 10.0 * u01(rng), 1.1 + 2.9 * u01(rng));
    double eps = 1e-4 + 0.999 * u01(rng);
    RelaxedDensity rd = RelaxedDensity::closed_form(d, eps);
    Vector2d z = rand_vec(rng);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(hessian(rd, z));
    EllipticityBounds eb = ellipticity_bounds(d, eps, z);
    CHECK(eig.eigenvalues()(0) >= eb.lower * (1.0 - 1e-10) - 1e-14 * eb.upper);
    CHECK(eig.eigenvalues()(1) <= eb.upper * (1.0 + 1e-10) + 1e-14 * eb.upper);
  }
}

TEST_CASE("support gauge") {
  DensityParams d = DensityParams::model(2.0, 2.0);
  CHECK(support_gauge(d, {0.0, 2.0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(support_gauge(DensityParams::model(1.0, 2.0), Vector2d::Zero()) == 0.0);
  CHECK_THROWS_AS(support_gauge(DensityParams::model(0.0, 2.0), {1.0, 0.0}),
                  std::domain_error);
}

TEST_CASE("Cauchy-Schwarz pairing against the gauge") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 10000; ++k) {
    double b = 0.1 + 10.0 * u01(rng);
    DensityParams d = DensityParams::model(b, 2.0);
    Vector2d z = rand_vec(rng), w = rand_vec(rng);
    double lhs = z.dot(w);
    double rhs = b * z.norm() * support_gauge(d, w);
    CHECK(lhs <= rhs * (1.0 + 1e-12) + 1e-300);
  }
}

TEST_CASE("Euler identity for the one-homogeneous part") {
  std::mt19937_64 rng(29);
  for (int k = 0; k < 10000; ++k) {
    double b = 0.1 + 10.0 * u01(rng);
    Vector2d z = rand_vec(rng);
    Vector2d g1 = b * z.normalized();
    CHECK(std::abs(z.dot(g1) - b * z.norm()) <= 1e-12 * (1.0 + b * z.norm()) + 1e-12);
  }
}

TEST_CASE("gradient homogeneity and hessian scaling") {
  std::mt19937_64 rng(31);
  DensityParams d = DensityParams::model(1.7, 2.0);
  for (int k = 0; k < 1000; ++k) {
    Vector2d z = rand_vec(rng);
    Eigen::Matrix2d H1 = exact_hessian(d, z) - ep_relaxed_hessian(d.p, 0.0, z);
    for (double lam : {0.1, 1.0, 10.0}) {
      Vector2d zl = lam * z;
      CHECK((d.b * zl.normalized() - d.b * z.normalized()).norm() < 1e-12 * (1.0 + d.b));
      Eigen::Matrix2d Hl = exact_hessian(d, zl) - ep_relaxed_hessian(d.p, 0.0, zl);
      CHECK((Hl - H1 / lam).norm() <= 1e-12 * (1.0 + H1.norm() / lam));
    }
  }
}

TEST_CASE("relaxed gradient matches finite differences of the value at O(step^2)") {
  RelaxedDensity d = RelaxedDensity::closed_form(DensityParams::model(1.3, 2.6), 0.2);
  Vector2d z(0.7, -0.4);
  Vector2d g = gradient(d, z);
  auto fd_err = [&](double step) {
    double worst = 0.0;
    for (int k = 0; k < 2; ++k) {
      Vector2d e = Vector2d::Zero();
      e[k] = step;
      double fd = (value(d, z + e) - value(d, z - e)) / (2.0 * step);
      worst = std::max(worst, std::abs(fd - g[k]));
    }
    return worst;
  };
  double e1 = fd_err(1e-3), e2 = fd_err(5e-4);
  CHECK(e1 < 1e-5);
  CHECK(e2 < e1 / 3.0);  // second-order decay
}

TEST_CASE("mollified value against an independent quadrature oracle") {
  DensityParams d = DensityParams::model(1.0, 2.0);
  MollifierSpec spec = MollifierSpec::make(0.1);
  Vector2d z(1.0, 0.0);
  double got = mollify_density(d, spec, z).value;

  // independent oracle: polar around the kernel centre, fine midpoint-free
  // composite Gauss radial x trapezoid angular
  static const double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                               0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  double ref = 0.0;
  const int nth = 128, panels = 6;
  for (int a = 0; a < nth; ++a) {
    double phi = 2.0 * M_PI * (a + 0.5) / nth;
    Vector2d omega(std::cos(phi), std::sin(phi));
    for (int pan = 0; pan < panels; ++pan) {
      double r0 = spec.eps * pan / panels, r1 = spec.eps * (pan + 1) / panels;
      for (int q = 0; q < 8; ++q) {
        double rr = 0.5 * (r1 - r0) * gx[q] + 0.5 * (r0 + r1);
        double ww = 0.5 * (r1 - r0) * gw[q];
        Vector2d v = z - rr * omega;
        ref += ww * kernel_value(spec, rr * omega) * rr * exact_value(d, v);
      }
    }
  }
  ref *= 2.0 * M_PI / nth;
  CHECK(std::abs(got - ref) < 1e-6);
}

TEST_CASE("mollified hessian: convolved away from zero, differences near zero") {
  RelaxedDensity d = RelaxedDensity::mollified(DensityParams::model(1.0, 2.0), 0.05);
  // far branch: j_eps * hess(E) approaches hess(E) quadratically in eps
  Vector2d z(1.0, 0.5);
  Eigen::Matrix2d H = hessian(d, z);
  CHECK((H - H.transpose()).norm() < 1e-12);
  CHECK((H - exact_hessian(d.params, z)).norm() < 5e-3);
  // near branch: finite differences of the convolved gradient
  Vector2d z0(0.02, 0.01);
  Eigen::Matrix2d H0 = hessian(d, z0);
  CHECK((H0 - H0.transpose()).norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(H0);
  CHECK(eig.eigenvalues()(0) > 0.0);
}

TEST_CASE("mollified gradient bound |grad E1_eps| <= b") {
  DensityParams d = DensityParams::model(1.0, 2.0);
  MollifierSpec spec = MollifierSpec::make(0.15);
  std::mt19937_64 rng(37);
  for (int k = 0; k < 200; ++k) {
    Vector2d z = rand_vec(rng, 1e-4, 10.0);
    Vector2d g1 = mollify_density(d, spec, z).gradient -
                  convolve2(
                      spec,
                      [&](const Vector2d& v) -> Vector2d {
                        return ep_relaxed_gradient(d.p, 0.0, v);
                      },
                      z, true);
    CHECK(g1.norm() <= d.b * (1.0 + 1e-8));
  }
}

TEST_SUITE_END();
