#include "facetflow/propcheck.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "facetflow/density.hpp"
#include "facetflow/parallel.hpp"
#include "facetflow/truncation.hpp"

namespace facetflow {
namespace {

using Eigen::Vector2d;

// Explicit bit-to-double conversion keeps every suite reproducible across
// platforms (mt19937_64 output is fully specified; the standard library
// distributions are not).
struct Sampler {
  std::mt19937_64 rng;
  explicit Sampler(std::uint64_t seed) : rng(seed) {}
  double u01() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * u01(); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  Vector2d direction() {
    double th = 2.0 * M_PI * u01();
    return {std::cos(th), std::sin(th)};
  }
  Vector2d vec(double rlo, double rhi) { return log_uniform(rlo, rhi) * direction(); }
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fmt_vec(const Vector2d& z) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << z.x() << "," << z.y() << ")";
  return os.str();
}

struct Violations {
  long count = 0;
  double worst = 0.0;
  std::string witness;
  // excess > 0 means lhs exceeded rhs (asserting suites).
  void record(double excess, const std::string& w) {
    if (excess <= 0.0) return;
    ++count;
    if (excess > worst) {
      worst = excess;
      witness = w;
    }
  }
};

struct FitAcc {
  bool is_min = true;
  double value = 0.0;
  bool started = false;
  void feed(double v) {
    if (!started) {
      value = v;
      started = true;
    } else {
      value = is_min ? std::min(value, v) : std::max(value, v);
    }
  }
};

// ---- individual suites -----------------------------------------------------

void suite_euler(const SuiteSpec& s, Sampler& rng, long n, Violations& vio) {
  for (long k = 0; k < n; ++k) {
    double b = rng.log_uniform(s.b_lo, s.b_hi);
    Vector2d z = rng.vec(s.radius_lo, s.radius_hi);
    Vector2d g = (b / z.norm()) * z;
    double lhs = std::abs(z.dot(g) - b * z.norm());
    double rhs = 1e-12 * (1.0 + b * z.norm());
    vio.record(lhs - rhs, "b=" + std::to_string(b) + " z=" + fmt_vec(z));
  }
}

void suite_homogeneity(const SuiteSpec& s, Sampler& rng, long n, Violations& vio) {
  const double lambdas[3] = {0.1, 1.0, 10.0};
  auto e1_hess = [](double b, const Vector2d& z) -> Eigen::Matrix2d {
    double m = z.norm();
    return (b / m) * Eigen::Matrix2d::Identity() -
           (b / (m * m * m)) * (z * z.transpose());
  };
  for (long k = 0; k < n; ++k) {
    double b = rng.log_uniform(s.b_lo, s.b_hi);
    Vector2d z = rng.vec(s.radius_lo, s.radius_hi);
    Vector2d g = b * z.normalized();
    Eigen::Matrix2d H = e1_hess(b, z);
    for (double lam : lambdas) {
      Vector2d zl = lam * z;
      Vector2d gl = b * zl.normalized();
      double ge = (gl - g).norm() - 1e-12 * (1.0 + g.norm());
      Eigen::Matrix2d Hl = e1_hess(b, zl);
      double he = (Hl - H / lam).norm() - 1e-12 * (1.0 + H.norm() / lam);
      vio.record(std::max(ge, he), "b=" + std::to_string(b) + " lambda=" +
                                       std::to_string(lam) + " z=" + fmt_vec(z));
    }
  }
}

void suite_truncation_lipschitz(const SuiteSpec& s, Sampler& rng, long n, Violations& vio) {
  const double h = 0.125;
  const double cdag = lipschitz_constant(h);  // 1 + 64/sqrt(255)
  for (long k = 0; k < n; ++k) {
    double delta = rng.uniform(0.01, 0.99);
    double eps = h * delta * rng.uniform(0.0, 1.0 - 1e-9);
    Vector2d z1, z2;
    if (k % 2 == 0) {
      z1 = rng.vec(s.radius_lo, s.radius_hi);
      z2 = rng.vec(s.radius_lo, s.radius_hi);
    } else {
      // stress the dead-zone boundary
      z1 = rng.log_uniform(0.1 * delta, 10.0 * delta) * rng.direction();
      z2 = z1 + rng.vec(1e-9 * delta, 4.0 * delta);
    }
    double lhs = (truncate_relaxed(z1, 2.0 * delta, eps) - truncate_relaxed(z2, 2.0 * delta, eps))
                     .norm();
    double rhs = cdag * (z1 - z2).norm() * (1.0 + s.tol) + 1e-300;
    vio.record(lhs - rhs, "delta=" + std::to_string(delta) + " eps=" + std::to_string(eps) +
                              " z1=" + fmt_vec(z1) + " z2=" + fmt_vec(z2));
  }
}

void suite_relaxed_hessian_bounds(const SuiteSpec& s, Sampler& rng, long n, Violations& vio) {
  for (long k = 0; k < n; ++k) {
    DensityParams d = DensityParams::model(rng.log_uniform(s.b_lo, s.b_hi),
                                           rng.uniform(s.p_lo, s.p_hi));
    double eps = rng.uniform(1e-6, 1.0 - 1e-6);
    Vector2d z = rng.vec(s.radius_lo, s.radius_hi);
    Eigen::Matrix2d H =
        e1_relaxed_hessian(d.b, eps, z) + ep_relaxed_hessian(d.p, eps, z);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(H);
    EllipticityBounds eb = ellipticity_bounds(d, eps, z);
    double lo_violation = (eb.lower * (1.0 - s.tol) - 1e-14 * eb.upper) - eig.eigenvalues()(0);
    double hi_violation = eig.eigenvalues()(1) - (eb.upper * (1.0 + s.tol) + 1e-14 * eb.upper);
    vio.record(std::max(lo_violation, hi_violation),
               "b=" + std::to_string(d.b) + " p=" + std::to_string(d.p) +
                   " eps=" + std::to_string(eps) + " z=" + fmt_vec(z));
  }
}

void suite_growth_p_lt_2(const SuiteSpec& s, Sampler& rng, long n, Violations& vio) {
  for (long k = 0; k < n; ++k) {
    double p = rng.uniform(s.p_lo, 1.999);
    double eps = rng.uniform(1e-6, 1.0 - 1e-6);
    Vector2d z1 = rng.vec(s.radius_lo, s.radius_hi);
    Vector2d z2 = (k % 2 == 0) ? rng.vec(s.radius_lo, s.radius_hi)
                               : (z1 + rng.vec(s.radius_lo, s.radius_hi)).eval();
    double lhs = (ep_relaxed_gradient(p, eps, z1) - ep_relaxed_gradient(p, eps, z2)).norm();
    double growth_const = std::pow(2.0, 2.0 - p) / (p - 1.0);
    double rhs = growth_const * std::pow(std::max(z1.norm(), z2.norm()), p - 2.0) *
                 (z1 - z2).norm() * (1.0 + s.tol);
    vio.record(lhs - rhs, "p=" + std::to_string(p) + " eps=" + std::to_string(eps) +
                              " z1=" + fmt_vec(z1) + " z2=" + fmt_vec(z2));
  }
}

double fit_monotonicity_ge2(const SuiteSpec& s, Sampler& rng, long n, Violations& vio) {
  FitAcc fit;
  for (long k = 0; k < n; ++k) {
    double p = rng.uniform(2.0, s.p_hi);
    double eps = rng.uniform(1e-6, 1.0 - 1e-6);
    Vector2d z1 = rng.vec(s.radius_lo, s.radius_hi);
    Vector2d z2 = rng.vec(s.radius_lo, s.radius_hi);
    double dz = (z1 - z2).norm();
    if (dz < 1e-12 * std::max(z1.norm(), z2.norm())) continue;
    double num = (ep_relaxed_gradient(p, eps, z1) - ep_relaxed_gradient(p, eps, z2))
                     .dot(z1 - z2);
    vio.record(-num - 1e-300, "p=" + std::to_string(p) + " z1=" + fmt_vec(z1) +
                                  " z2=" + fmt_vec(z2));
    fit.feed(num / std::pow(dz, p));
  }
  return fit.value;
}

double fit_monotonicity_lt2(const SuiteSpec& s, Sampler& rng, long n, Violations& vio) {
  FitAcc fit;
  for (long k = 0; k < n; ++k) {
    double p = rng.uniform(s.p_lo, 1.999);
    double eps = rng.uniform(1e-6, 1.0 - 1e-6);
    Vector2d z1 = rng.vec(s.radius_lo, s.radius_hi);
    Vector2d z2 = rng.vec(s.radius_lo, s.radius_hi);
    double dz2 = (z1 - z2).squaredNorm();
    if (dz2 < 1e-24 * std::max(z1.squaredNorm(), z2.squaredNorm())) continue;
    double num = (ep_relaxed_gradient(p, eps, z1) - ep_relaxed_gradient(p, eps, z2))
                     .dot(z1 - z2);
    vio.record(-num - 1e-300, "p=" + std::to_string(p) + " z1=" + fmt_vec(z1) +
                                  " z2=" + fmt_vec(z2));
    double scale = std::pow(eps * eps + z1.squaredNorm() + z2.squaredNorm(), 0.5 * p - 1.0);
    fit.feed(num / (scale * dz2));
  }
  return fit.value;
}

double fit_hessian_error_outside(const SuiteSpec& s, Sampler& rng, long n, Violations&) {
  FitAcc fit;
  fit.is_min = false;
  const double beta0 = 1.0;  // model case
  for (long k = 0; k < n; ++k) {
    DensityParams d = DensityParams::model(rng.log_uniform(s.b_lo, s.b_hi),
                                           rng.uniform(s.p_lo, s.p_hi));
    double delta = rng.uniform(0.01, 0.5);
    double eps = rng.uniform(1e-9, delta / 8.0 * (1.0 - 1e-9));
    double mu = delta * (1.0 + rng.log_uniform(1e-2, 1e2));
    double r1 = rng.uniform(delta + mu / 4.0, delta + mu);
    double r2 = rng.uniform(0.0, delta + mu);
    Vector2d z1 = r1 * rng.direction();
    Vector2d z2 = r2 * rng.direction();
    double dz = (z1 - z2).norm();
    if (dz < 1e-14 * r1) continue;
    Eigen::Matrix2d H = e1_relaxed_hessian(d.b, eps, z1) + ep_relaxed_hessian(d.p, eps, z1);
    Vector2d g1 = e1_relaxed_gradient(d.b, eps, z1) + ep_relaxed_gradient(d.p, eps, z1);
    Vector2d g2 = e1_relaxed_gradient(d.b, eps, z2) + ep_relaxed_gradient(d.p, eps, z2);
    double err = (H * (z2 - z1) - (g2 - g1)).norm();
    fit.feed(err / (std::pow(mu, d.p - 2.0 - beta0) * std::pow(dz, 1.0 + beta0)));
  }
  return fit.value;
}

double fit_h_sigma_bound(const SuiteSpec&, Sampler& rng, long n, Violations&) {
  FitAcc fit;
  fit.is_min = false;
  MollifierSpec quartic = MollifierSpec::make(0.5);
  for (long k = 0; k < n; ++k) {
    double sigma = rng.uniform(-1.0, 3.0);
    double eps = rng.uniform(0.02, 1.0);
    MollifierSpec spec = quartic;
    spec.eps = eps;
    Vector2d z = eps * rng.log_uniform(1e-3, 1e3) * rng.direction();
    double h = radial_power_convolution(spec, sigma, z);
    fit.feed(h / std::pow(eps * eps + z.squaredNorm(), 0.5 * sigma));
  }
  return fit.value;
}

double fit_gp_monotone(const SuiteSpec& s, Sampler& rng, long n, Violations& vio) {
  FitAcc fit;
  for (long k = 0; k < n; ++k) {
    double p = rng.uniform(s.p_lo, s.p_hi);
    double eps = rng.uniform(0.0, 1.0 - 1e-6);
    Vector2d z1 = rng.vec(s.radius_lo, s.radius_hi);
    Vector2d z2 = rng.vec(s.radius_lo, s.radius_hi);
    double dz = (z1 - z2).norm();
    if (dz < 1e-12 * std::max(z1.norm(), z2.norm())) continue;
    double num = (map_gp_eps(z1, p, eps) - map_gp_eps(z2, p, eps)).dot(z1 - z2);
    vio.record(-num - 1e-300, "p=" + std::to_string(p) + " z1=" + fmt_vec(z1) +
                                  " z2=" + fmt_vec(z2));
    fit.feed(num / std::pow(dz, p + 1.0));
  }
  return fit.value;
}

}  // namespace

const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids = {
      "euler_identity",      "homogeneity",          "truncation_lipschitz",
      "relaxed_hessian_bounds", "monotonicity_p_ge_2", "monotonicity_p_lt_2",
      "growth_p_lt_2",       "hessian_error_outside", "h_sigma_bound",
      "g_p_eps_monotone"};
  return ids;
}

SuiteReport run_suite(const SuiteSpec& spec) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteReport rep;
  rep.id = spec.id;

  const bool quad_heavy = spec.id == "h_sigma_bound";
  long n = quad_heavy ? std::min<long>(spec.samples, 2000) : spec.samples;
  rep.samples = n;

  auto run_fit = [&](auto&& fn) {
    Violations vio;
    Sampler rng(spec.seed);
    rep.fitted = true;
    rep.fitted_constant = fn(spec, rng, n, vio);
    Sampler rng2(spec.seed);
    Violations vio2;
    rep.refit_constant = fn(spec, rng2, 2 * n, vio2);
    double hi = std::max(std::abs(rep.fitted_constant), std::abs(rep.refit_constant));
    rep.fitted_stable = hi > 0.0 &&
                        std::abs(rep.fitted_constant - rep.refit_constant) <= 0.2 * hi;
    vio.count += vio2.count;
    if (vio2.worst > vio.worst) {
      vio.worst = vio2.worst;
      vio.witness = vio2.witness;
    }
    return vio;
  };

  Violations vio;
  if (spec.id == "euler_identity") {
    rep.asserting = true;
    Sampler rng(spec.seed);
    suite_euler(spec, rng, n, vio);
  } else if (spec.id == "homogeneity") {
    rep.asserting = true;
    Sampler rng(spec.seed);
    suite_homogeneity(spec, rng, n, vio);
  } else if (spec.id == "truncation_lipschitz") {
    rep.asserting = true;
    Sampler rng(spec.seed);
    suite_truncation_lipschitz(spec, rng, n, vio);
  } else if (spec.id == "relaxed_hessian_bounds") {
    rep.asserting = true;
    Sampler rng(spec.seed);
    suite_relaxed_hessian_bounds(spec, rng, n, vio);
  } else if (spec.id == "growth_p_lt_2") {
    rep.asserting = true;
    Sampler rng(spec.seed);
    suite_growth_p_lt_2(spec, rng, n, vio);
  } else if (spec.id == "monotonicity_p_ge_2") {
    vio = run_fit([](const SuiteSpec& s, Sampler& r, long m, Violations& v) {
      return fit_monotonicity_ge2(s, r, m, v);
    });
  } else if (spec.id == "monotonicity_p_lt_2") {
    vio = run_fit([](const SuiteSpec& s, Sampler& r, long m, Violations& v) {
      return fit_monotonicity_lt2(s, r, m, v);
    });
  } else if (spec.id == "hessian_error_outside") {
    vio = run_fit([](const SuiteSpec& s, Sampler& r, long m, Violations& v) {
      return fit_hessian_error_outside(s, r, m, v);
    });
  } else if (spec.id == "h_sigma_bound") {
    vio = run_fit([](const SuiteSpec& s, Sampler& r, long m, Violations& v) {
      return fit_h_sigma_bound(s, r, m, v);
    });
  } else if (spec.id == "g_p_eps_monotone") {
    vio = run_fit([](const SuiteSpec& s, Sampler& r, long m, Violations& v) {
      return fit_gp_monotone(s, r, m, v);
    });
  } else {
    throw std::invalid_argument("run_suite: unknown suite id '" + spec.id + "'");
  }

  rep.violations = vio.count;
  rep.worst_excess = vio.worst;
  rep.worst_witness = vio.witness;
  rep.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::vector<SuiteReport> run_battery(std::uint64_t seed, long samples) {
  const auto& ids = suite_ids();
  std::vector<SuiteReport> reports(ids.size());
  parallel_chunks(static_cast<std::ptrdiff_t>(ids.size()), static_cast<int>(ids.size()),
                  [&](int, std::ptrdiff_t lo, std::ptrdiff_t hi) {
                    for (std::ptrdiff_t i = lo; i < hi; ++i) {
                      SuiteSpec spec;
                      spec.id = ids[i];
                      spec.samples = samples;
                      spec.seed = seed ^ fnv1a(ids[i]);
                      reports[i] = run_suite(spec);
                    }
                  });
  return reports;
}

std::string format_report(const SuiteReport& r) {
  std::ostringstream os;
  os << (r.passed() ? "[ ok ] " : "[FAIL] ") << r.id
     << (r.asserting ? " (asserting)" : " (fitting)") << " samples=" << r.samples;
  if (r.asserting) {
    os << " violations=" << r.violations;
    if (r.violations > 0) os << " worst_excess=" << r.worst_excess << " witness: " << r.worst_witness;
  }
  if (r.fitted) {
    os.precision(6);
    os << " fitted=" << r.fitted_constant << " refit(2N)=" << r.refit_constant
       << " stable=" << (r.fitted_stable ? "yes" : "NO");
    if (r.violations > 0) os << " sign_violations=" << r.violations;
  }
  os.precision(3);
  os << " [" << r.elapsed_s << "s]";
  return os.str();
}

}  // namespace facetflow
