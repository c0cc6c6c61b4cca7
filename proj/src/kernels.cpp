/*
 * Copyright 2026 The kpath Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "kpath/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "kpath/bessel.hpp"
#include "kpath/errors.hpp"

namespace kpath {

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Matern:
      return "matern";
    case KernelFamily::GeneralizedWendland:
      return "generalized_wendland";
    case KernelFamily::Askey:
      return "askey";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "matern") return KernelFamily::Matern;
  if (name == "generalized_wendland" || name == "wendland")
    return KernelFamily::GeneralizedWendland;
  if (name == "askey") return KernelFamily::Askey;
  throw DomainError("unknown kernel family '" + name + "'");
}

KernelSpec KernelSpec::matern(double nu, double alpha, int dim, double variance) {
  KernelSpec s;
  s.family = KernelFamily::Matern;
  s.nu = nu;
  s.alpha = alpha;
  s.dim = dim;
  s.variance = variance;
  s.validate();
  return s;
}

KernelSpec KernelSpec::generalized_wendland(double mu, double kappa, double beta, int dim,
                                            double variance) {
  KernelSpec s;
  s.family = kappa == 0.0 ? KernelFamily::Askey : KernelFamily::GeneralizedWendland;
  s.mu = mu;
  s.kappa = kappa;
  s.beta = beta;
  s.dim = dim;
  s.variance = variance;
  s.validate();
  return s;
}

KernelSpec KernelSpec::askey(double mu, double beta, int dim, double variance) {
  KernelSpec s;
  s.family = KernelFamily::Askey;
  s.mu = mu;
  s.kappa = 0.0;
  s.beta = beta;
  s.dim = dim;
  s.variance = variance;
  s.validate();
  return s;
}

void KernelSpec::validate() const {
  if (dim < 1) throw DomainError("kernel: dimension must be positive");
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw DomainError("kernel: variance must be positive");
  const double half = (dim + 1) / 2.0;
  switch (family) {
    case KernelFamily::Matern:
      if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("matern: nu must be positive");
      if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw DomainError("matern: alpha must be positive");
      break;
    case KernelFamily::GeneralizedWendland:
      if (!(kappa > 0.0)) throw DomainError("generalized wendland: kappa must be positive");
      if (!(beta > 0.0)) throw DomainError("generalized wendland: beta must be positive");
      if (!(mu >= half + kappa))
        throw DomainError("generalized wendland: need mu >= (d+1)/2 + kappa = " +
                          std::to_string(half + kappa));
      break;
    case KernelFamily::Askey:
      if (!(beta > 0.0)) throw DomainError("askey: beta must be positive");
      if (!(mu >= half))
        throw DomainError("askey: need mu >= (d+1)/2 = " + std::to_string(half));
      break;
  }
}

double KernelSpec::smoothness() const {
  switch (family) {
    case KernelFamily::Matern:
      return nu;
    case KernelFamily::GeneralizedWendland:
      return kappa + 0.5;
    case KernelFamily::Askey:
      return 0.5;
  }
  return 0.0;
}

namespace {

// e^{-z} * sum_j a_j z^j with a_0 = 1, a_{j+1} = a_j * 2(n-j) / ((2n-j)(j+1)).
double matern_half_integer(int n, double z) {
  std::vector<double> a(static_cast<std::size_t>(n) + 1);
  a[0] = 1.0;
  for (int j = 0; j < n; ++j)
    a[j + 1] = a[j] * 2.0 * (n - j) / (static_cast<double>(2 * n - j) * (j + 1));
  double poly = 0.0;
  for (int j = n; j >= 0; --j) poly = poly * z + a[j];
  return std::exp(-z) * poly;
}

double radial_unchecked(const KernelSpec& spec, double r) {
  switch (spec.family) {
    case KernelFamily::Matern:
      if (r == 0.0) return spec.variance;
      return spec.variance * matern_correlation(spec.nu, r / spec.alpha);
    case KernelFamily::GeneralizedWendland:
      return spec.variance * generalized_wendland(spec.mu, spec.kappa, spec.beta, r);
    case KernelFamily::Askey:
      return spec.variance * askey(spec.mu, spec.beta, r);
  }
  return 0.0;
}

}  // namespace

double matern_correlation(double nu, double z, BesselRoute route) {
  if (!(nu > 0.0)) throw DomainError("matern: nu must be positive");
  if (z < 0.0) throw DomainError("matern: negative distance");
  if (z == 0.0) return 1.0;
  if (route == BesselRoute::Auto) {
    const double shifted = nu - 0.5;
    if (shifted >= 0.0 && shifted <= 20.0 && std::floor(shifted) == shifted)
      return matern_half_integer(static_cast<int>(shifted), z);
  }
  const double log_phi = (1.0 - nu) * std::numbers::ln2 - std::lgamma(nu) + nu * std::log(z) +
                         log_bessel_k(nu, z);
  return std::exp(log_phi);
}

double askey(double mu, double beta, double r) {
  if (r < 0.0) throw DomainError("askey: negative distance");
  const double t = r / beta;
  if (t >= 1.0) return 0.0;
  return std::pow(1.0 - t, mu);
}

double generalized_wendland(double mu, double kappa, double beta, double r) {
  if (r < 0.0) throw DomainError("generalized wendland: negative distance");
  if (kappa < 0.0) throw DomainError("generalized wendland: negative kappa");
  if (kappa == 0.0) return askey(mu, beta, r);
  const double t = r / beta;
  if (t >= 1.0) return 0.0;
  if (t == 0.0) return 1.0;

  // The integrand behaves like (u-t)^{kappa-1} at the lower end and (1-u)^mu
  // at the upper end. Split at the midpoint and map each half with an integer
  // power s^q so that both endpoint factors become at least C^3 in s.
  const double half = 0.5 * (1.0 - t);
  const double q_lo = std::max(1.0, std::ceil(4.0 / kappa));
  const double q_hi = std::max(1.0, std::ceil(4.0 / mu));
  auto lower = [&](double s) {
    // u = t + half s^q, so u - t = half s^q.
    const double sq = std::pow(s, q_lo);
    const double u = t + half * sq;
    return u * std::pow(2.0 * t + half * sq, kappa - 1.0) * std::pow(1.0 - u, mu) *
           std::pow(half, kappa) * q_lo * std::pow(s, q_lo * kappa - 1.0);
  };
  auto upper = [&](double s) {
    // u = 1 - half s^q, so 1 - u = half s^q.
    const double sq = std::pow(s, q_hi);
    const double u = 1.0 - half * sq;
    return u * std::pow((u - t) * (u + t), kappa - 1.0) * std::pow(half, mu + 1.0) * q_hi *
           std::pow(s, q_hi * mu + q_hi - 1.0);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err_lo = 0.0, err_hi = 0.0;
  const double integral = GK::integrate(lower, 0.0, 1.0, 15, 1e-12, &err_lo) +
                          GK::integrate(upper, 0.0, 1.0, 15, 1e-12, &err_hi);
  const double err = err_lo + err_hi;
  const double norm = std::beta(2.0 * kappa, mu + 1.0);
  const double abs_err = err / norm;
  if (!(abs_err <= 1e-10)) throw QuadratureError(abs_err);
  return integral / norm;
}

double kernel_eval(const KernelSpec& spec, double r) {
  spec.validate();
  if (r < 0.0 || std::isnan(r)) throw DomainError("kernel_eval: negative distance");
  return radial_unchecked(spec, r);
}

double matern_spectral_density(const KernelSpec& spec, double z) {
  spec.validate();
  if (spec.family != KernelFamily::Matern)
    throw DomainError("spectral density is only available in closed form for Matern kernels");
  if (z < 0.0) throw DomainError("spectral density: negative frequency");
  const double half_d = spec.dim / 2.0;
  const double expo = spec.nu + half_d;
  const double log_const = std::lgamma(expo) - half_d * std::log(std::numbers::pi) -
                           std::lgamma(spec.nu) + spec.dim * std::log(spec.alpha);
  const double az = spec.alpha * z;
  return spec.variance * std::exp(log_const - expo * std::log1p(az * az));
}

namespace {

struct StencilTerm {
  Eigen::RowVectorXd offset;  // in units of the step
  double weight;              // without the h^-|order| factor
};

// Tensor product of one-dimensional central differences of order k with
// nodes (k/2 - j) h and weights (-1)^j binom(k, j).
std::vector<StencilTerm> central_stencil(const std::vector<int>& order) {
  std::vector<StencilTerm> terms{{Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(order.size())), 1.0}};
  for (std::size_t axis = 0; axis < order.size(); ++axis) {
    const int k = order[axis];
    if (k == 0) continue;
    std::vector<StencilTerm> next;
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
      const double w = (j % 2 == 0 ? 1.0 : -1.0) * binom;
      for (const auto& t : terms) {
        StencilTerm nt = t;
        nt.offset[static_cast<Eigen::Index>(axis)] = 0.5 * k - j;
        nt.weight *= w;
        next.push_back(std::move(nt));
      }
      binom = binom * (k - j) / (j + 1);
    }
    terms = std::move(next);
  }
  return terms;
}

}  // namespace

double twin_derivative_variance(const KernelSpec& spec, const std::vector<int>& order,
                                PointRef x) {
  spec.validate();
  if (static_cast<int>(order.size()) != spec.dim || x.size() != spec.dim)
    throw DomainError("twin_derivative_variance: order/point dimension mismatch");
  int total = 0;
  for (int k : order) {
    if (k < 0) throw DomainError("twin_derivative_variance: negative derivative order");
    total += k;
  }
  if (total == 0) return spec.variance;
  if (!(total < spec.smoothness()))
    throw AdmissibilityError("derivative order " + std::to_string(total) +
                             " is not admissible: need |order| < " +
                             std::to_string(spec.smoothness()));

  const auto stencil = central_stencil(order);
  constexpr int kLevels = 5;
  std::array<double, kLevels> steps{};
  std::array<double, kLevels> values{};
  for (int level = 0; level < kLevels; ++level) {
    const double h = 1e-2 * std::ldexp(1.0, -level);
    double acc = 0.0;
    for (const auto& a : stencil) {
      for (const auto& b : stencil) {
        const double r = ((a.offset - b.offset) * h).norm();
        acc += a.weight * b.weight * radial_unchecked(spec, r);
      }
    }
    steps[level] = h;
    values[level] = acc / std::pow(h, 2 * total);
  }

  // Neville's scheme for the interpolating polynomial in h evaluated at 0.
  std::array<double, kLevels> prev = values;
  double last = values[kLevels - 1], before_last = values[kLevels - 1];
  for (int m = 1; m < kLevels; ++m) {
    std::array<double, kLevels> cur{};
    for (int i = m; i < kLevels; ++i) {
      const double ratio = steps[i - m] / steps[i];
      cur[i] = prev[i] + (prev[i] - prev[i - 1]) / (ratio - 1.0);
    }
    before_last = prev[kLevels - 1];
    last = cur[kLevels - 1];
    prev = cur;
  }
  const double scale = std::max(std::abs(last), 1e-300);
  if (std::abs(last - before_last) > 1e-5 * scale)
    throw InstabilityError("twin_derivative_variance: extrapolation disagreement " +
                           std::to_string(std::abs(last - before_last) / scale));
  return std::max(last, 0.0);
}

Covariance::Covariance(KernelSpec spec) : spec_(spec), dim_(spec.dim), name_(to_string(spec.family)) {
  spec.validate();
  fn_ = [s = spec](PointRef x, PointRef y) { return radial_unchecked(s, (x - y).norm()); };
}

Covariance::Covariance(Function fn, int dim, std::string name)
    : fn_(std::move(fn)), dim_(dim), name_(std::move(name)) {
  if (dim < 1) throw DomainError("covariance: dimension must be positive");
}

double Covariance::operator()(PointRef x, PointRef y) const { return fn_(x, y); }

double Covariance::diagonal(PointRef x) const {
  if (spec_) return spec_->variance;
  return fn_(x, x);
}

Eigen::MatrixXd Covariance::matrix(const PointMatrix& a, const PointMatrix& b) const {
  if (a.cols() != dim_ || b.cols() != dim_)
    throw DomainError("covariance: point dimension does not match the kernel");
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) out(i, j) = fn_(a.row(i), b.row(j));
  return out;
}

Eigen::MatrixXd Covariance::gram(const PointMatrix& a) const {
  if (a.cols() != dim_) throw DomainError("covariance: point dimension does not match the kernel");
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out(j, j) = diagonal(a.row(j));
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = fn_(a.row(i), a.row(j));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

}  // namespace kpath
