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

#ifndef KPATH_MERCER_HPP_
#define KPATH_MERCER_HPP_

#include <cstddef>
#include <string>

#include "kpath/expansion.hpp"
#include "kpath/kernels.hpp"
#include "kpath/types.hpp"

namespace kpath {

enum class QuadratureRule { Midpoint, GaussLegendre };

QuadratureRule quadrature_rule_from_string(const std::string& name);

/// Positive-weight quadrature over a box.
struct Quadrature {
  Box box;
  PointMatrix points;
  Eigen::VectorXd weights;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
};

/// Tensor-product rule with `per_dim` nodes per axis.
Quadrature make_quadrature(const Box& box, int per_dim,
                           QuadratureRule rule = QuadratureRule::Midpoint);

/// Discrete Mercer eigensystem: lambdas are decreasing and positive,
/// vectors(i, n) = v_n(t_i) with sum_i weight_i v_n(t_i) v_m(t_i) = delta_nm.
struct EigenSystem {
  Eigen::VectorXd lambdas;
  Eigen::MatrixXd vectors;
  Quadrature grid;

  std::size_t size() const { return static_cast<std::size_t>(lambdas.size()); }
};

/// Top-N eigenpairs of the Nystrom discretisation of the kernel integral
/// operator, solved through the symmetric matrix sqrt(w_i) C(t_i, t_j) sqrt(w_j).
/// Eigenpairs with lambda < 1e-12 lambda_1 are dropped, so the result may hold
/// fewer than N pairs. Each eigenvector is signed so that its largest-magnitude
/// entry is positive.
EigenSystem nystrom_eigs(const Covariance& cov, const Quadrature& grid, std::size_t N);

/// KL basis w_n = sqrt(lambda_n) v_n with the Nystrom extension off the grid.
ExpansionBasis kl_basis(const EigenSystem& eigs, const Covariance& cov);

/// Least-squares slope s of log(lambda_n) against log(n) over the one-based
/// index range [first, last]; returns the smoothness estimate -s * d / 2.
/// Throws DomainError for fewer than four points or nonpositive eigenvalues.
double eig_decay_fit(const Eigen::VectorXd& lambdas, int d, std::size_t first, std::size_t last);

}  // namespace kpath

#endif  // KPATH_MERCER_HPP_
