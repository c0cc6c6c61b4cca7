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

#ifndef KPATH_KERNELS_HPP_
#define KPATH_KERNELS_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kpath/types.hpp"

namespace kpath {

enum class KernelFamily { Matern, GeneralizedWendland, Askey };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Parameters of an isotropic positive-definite kernel C(x,y) = variance * phi(|x-y|).
///
/// Matern uses (nu, alpha); Generalized Wendland uses (mu, kappa, beta) and
/// Askey uses (mu, beta). Fields unused by a family are ignored.
struct KernelSpec {
  KernelFamily family = KernelFamily::Matern;
  double nu = 0.5;
  double alpha = 1.0;
  double mu = 1.0;
  double kappa = 0.0;
  double beta = 1.0;
  double variance = 1.0;
  int dim = 1;

  static KernelSpec matern(double nu, double alpha, int dim = 1, double variance = 1.0);
  static KernelSpec generalized_wendland(double mu, double kappa, double beta, int dim = 1,
                                         double variance = 1.0);
  static KernelSpec askey(double mu, double beta, int dim = 1, double variance = 1.0);

  // Throws DomainError when the parameters do not give a positive definite
  // kernel on R^dim.
  void validate() const;

  // Largest derivative order s such that multi-indices with |order| < s give
  // bounded twin derivatives: nu for Matern, kappa + 1/2 for the Wendland
  // families.
  double smoothness() const;

  bool operator==(const KernelSpec&) const = default;
};

/// Which route Matern evaluation takes for half-integer nu.
enum class BesselRoute { Auto, Numeric };

/// Matern correlation 2^{1-nu}/Gamma(nu) z^nu K_nu(z) at z = r / alpha.
double matern_correlation(double nu, double z, BesselRoute route = BesselRoute::Auto);

/// Askey function (1 - r/beta)^mu for r < beta, else 0.
double askey(double mu, double beta, double r);

/// Generalized Wendland function, normalised to 1 at r = 0, by adaptive
/// Gauss-Kronrod quadrature of its defining integral. kappa == 0 is Askey.
/// Throws QuadratureError if the error estimate exceeds 1e-10.
double generalized_wendland(double mu, double kappa, double beta, double r);

/// variance * phi(r). Validates the spec.
double kernel_eval(const KernelSpec& spec, double r);

/// Radial spectral density of the Matern kernel times the variance.
/// Throws DomainError for the compactly supported families.
double matern_spectral_density(const KernelSpec& spec, double z);

/// Variance of the derivative functional of the given multi-index at x,
/// i.e. D^order_u D^order_v C(u,v) at u = v = x, from nested central
/// differences with steps 1e-2 * 2^-k (k = 0..4) and polynomial
/// extrapolation to zero step.
///
/// Throws AdmissibilityError when |order| >= spec.smoothness() and
/// InstabilityError when the last two extrapolants differ by more than 1e-5
/// relative.
double twin_derivative_variance(const KernelSpec& spec, const std::vector<int>& order,
                                PointRef x);

/// A covariance function on R^d. Wraps either a KernelSpec (isotropic,
/// serializable) or an arbitrary symmetric callable used for test oracles.
class Covariance {
 public:
  using Function = std::function<double(PointRef, PointRef)>;

  explicit Covariance(KernelSpec spec);
  Covariance(Function fn, int dim, std::string name);

  double operator()(PointRef x, PointRef y) const;
  double diagonal(PointRef x) const;

  int dim() const { return dim_; }
  const std::optional<KernelSpec>& spec() const { return spec_; }
  const std::string& name() const { return name_; }

  // Matrix [C(a_i, b_j)].
  Eigen::MatrixXd matrix(const PointMatrix& a, const PointMatrix& b) const;
  // Symmetric matrix [C(a_i, a_j)], assembled from the lower triangle.
  Eigen::MatrixXd gram(const PointMatrix& a) const;

 private:
  std::optional<KernelSpec> spec_;
  Function fn_;
  int dim_ = 1;
  std::string name_;
};

}  // namespace kpath

#endif  // KPATH_KERNELS_HPP_
