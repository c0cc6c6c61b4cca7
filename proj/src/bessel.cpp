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

#include "kpath/bessel.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "kpath/errors.hpp"

namespace kpath {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;
constexpr int kMaxClosedFormOrder = 20;
constexpr double kRescale = 1e200;

// Taylor coefficients of 1/Gamma(1+x) (Abramowitz & Stegun 6.1.34, shifted).
constexpr std::array<double, 26> kRecipGamma = {
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
};

// Temme's auxiliary gamma quantities for |mu| <= 1/2:
//   gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu),  gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2,
//   gampl = 1/G(1+mu),  gammi = 1/G(1-mu).
// Splitting the series into even/odd parts gives gam1 without cancellation.
struct TemmeGammas {
  double gam1, gam2, gampl, gammi;
};

TemmeGammas temme_gammas(double mu) {
  double even = 0.0, odd = 0.0;
  const double mu2 = mu * mu;
  double p = 1.0;
  for (std::size_t k = 0; k < kRecipGamma.size(); k += 2) {
    even += kRecipGamma[k] * p;
    if (k + 1 < kRecipGamma.size()) odd += kRecipGamma[k + 1] * p;
    p *= mu2;
  }
  // 1/G(1+mu) = even + mu*odd, 1/G(1-mu) = even - mu*odd
  return {-odd, even, even + mu * odd, even - mu * odd};
}

void check_args(double nu, double z) {
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw DomainError("bessel_k: order must be positive and finite");
  if (!(z > 0.0) || !std::isfinite(z))
    throw DomainError("bessel_k: argument must be positive and finite");
}

bool half_integer_order(double nu, int& n) {
  const double shifted = nu - 0.5;
  if (shifted < 0.0 || shifted > kMaxClosedFormOrder) return false;
  if (std::floor(shifted) != shifted) return false;
  n = static_cast<int>(shifted);
  return true;
}

}  // namespace

double log_bessel_k(double nu, double z) {
  check_args(nu, z);
  using std::numbers::pi;
  const int nl = static_cast<int>(nu + 0.5);
  const double xmu = nu - nl;
  const double xmu2 = xmu * xmu;
  const double xi = 1.0 / z;
  const double xi2 = 2.0 * xi;

  double rkmu = 0.0, rk1 = 0.0;
  double log_scale = 0.0;
  if (z <= 2.0) {
    const double x2 = 0.5 * z;
    const double pimu = pi * xmu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = xmu * d;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    const auto g = temme_gammas(xmu);
    double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / g.gampl;
    double q = 0.5 / (e * g.gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxIter; ++i) {
      ff = (i * ff + p + q) / (i * static_cast<double>(i) - xmu2);
      c *= d / i;
      p /= (i - xmu);
      q /= (i + xmu);
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxIter) throw NumericalError("bessel_k: series failed to converge");
    rkmu = sum;
    rk1 = sum1 * xi2;
  } else {
    double b = 2.0 * (1.0 + z);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - xmu2;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    int i = 2;
    for (; i <= kMaxIter; ++i) {
      a -= 2 * (i - 1);
      c = -a * c / i;
      const double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      const double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < kEps) break;
    }
    if (i > kMaxIter)
      throw NumericalError("bessel_k: continued fraction failed to converge");
    h = a1 * h;
    // e^{-z} is carried in log_scale so large z cannot underflow.
    rkmu = std::sqrt(pi / (2.0 * z)) / s;
    rk1 = rkmu * (xmu + z + 0.5 - h) * xi;
    log_scale = -z;
  }
  for (int i = 1; i <= nl; ++i) {
    const double next = (xmu + i) * xi2 * rk1 + rkmu;
    rkmu = rk1;
    rk1 = next;
    if (std::abs(rk1) > kRescale) {
      rkmu /= kRescale;
      rk1 /= kRescale;
      log_scale += std::log(kRescale);
    }
  }
  return std::log(rkmu) + log_scale;
}

double bessel_k_numeric(double nu, double z) {
  const double v = std::exp(log_bessel_k(nu, z));
  if (std::isinf(v))
    throw OverflowError("bessel_k: K_nu(z) overflows for nu=" + std::to_string(nu) +
                        ", z=" + std::to_string(z));
  return v;
}

double bessel_k_half_integer(int n, double z) {
  if (n < 0) throw DomainError("bessel_k_half_integer: negative index");
  check_args(n + 0.5, z);
  double term = 1.0;
  double sum = 1.0;
  const double inv2z = 0.5 / z;
  for (int k = 0; k < n; ++k) {
    term *= static_cast<double>(n + k + 1) * (n - k) / (k + 1) * inv2z;
    sum += term;
  }
  const double v = std::sqrt(std::numbers::pi * inv2z) * std::exp(-z) * sum;
  if (std::isinf(v))
    throw OverflowError("bessel_k: K_nu(z) overflows for nu=" + std::to_string(n + 0.5) +
                        ", z=" + std::to_string(z));
  return v;
}

double bessel_k(double nu, double z) {
  check_args(nu, z);
  int n = 0;
  if (half_integer_order(nu, n)) return bessel_k_half_integer(n, z);
  return bessel_k_numeric(nu, z);
}

}  // namespace kpath
