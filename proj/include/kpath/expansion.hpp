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

#ifndef KPATH_EXPANSION_HPP_
#define KPATH_EXPANSION_HPP_

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "kpath/kernels.hpp"
#include "kpath/types.hpp"

namespace kpath {

enum class BasisKind { Newton, KL };

std::string to_string(BasisKind kind);
BasisKind basis_kind_from_string(const std::string& name);

/// An orthonormal system w_0, w_1, ... of the native space of a covariance.
///
/// Newton bases store the node-value matrix L with L(j, n) = w_n(x_j); it is
/// lower triangular with C_{X,X} = L L^T. Evaluation off the nodes solves
/// L w(x) = [C(x_j, x)]_j by forward substitution, which is the stepwise
/// recursion w_n(x) = (C(x_n, x) - sum_{m<n} w_m(x_n) w_m(x)) / w_n(x_n).
///
/// KL bases store quadrature points t_i, weights, eigenvalues lambda_n and
/// eigenvector values v_n(t_i), and evaluate the Nystrom extension
/// w_n(x) = lambda_n^{-1/2} sum_i weight_i C(x, t_i) v_n(t_i).
///
/// Indices are zero-based: the spec-level w_1 is eval(0, x).
class ExpansionBasis {
 public:
  static ExpansionBasis newton(Covariance cov, NodeSet nodes, Eigen::MatrixXd node_values);
  static ExpansionBasis kl(Covariance cov, Box box, PointMatrix grid, Eigen::VectorXd weights,
                           Eigen::VectorXd lambdas, Eigen::MatrixXd vectors);

  BasisKind kind() const { return kind_; }
  std::size_t size() const { return size_; }
  int dim() const { return cov_.dim(); }
  const Covariance& covariance() const { return cov_; }

  // Newton data.
  const NodeSet& nodes() const { return nodes_; }
  const Eigen::MatrixXd& node_values() const { return node_values_; }
  // Diagonal sigma_n = w_n(x_n).
  Eigen::VectorXd sigma() const;
  // Coefficients c with w_n = sum_j c(n, j) C(x_j, .): the inverse of L.
  Eigen::MatrixXd coefficients() const;

  // KL data.
  const Box& box() const { return box_; }
  const PointMatrix& grid() const { return grid_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& lambdas() const { return lambdas_; }
  const Eigen::MatrixXd& vectors() const { return vectors_; }

  /// w_n(x). Throws DomainError if n >= size().
  double eval(std::size_t n, PointRef x) const;

  /// (w_0(x), ..., w_{count-1}(x)). count defaults to size().
  Eigen::VectorXd eval_all(PointRef x, std::size_t count = npos) const;

  /// Matrix with entry (i, n) = w_n(points_i), n < count.
  Eigen::MatrixXd values(const PointMatrix& points, std::size_t count = npos) const;

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

 private:
  ExpansionBasis(BasisKind kind, Covariance cov) : kind_(kind), cov_(std::move(cov)) {}
  std::size_t resolve(std::size_t count) const;

  BasisKind kind_;
  Covariance cov_;
  std::size_t size_ = 0;

  NodeSet nodes_;
  Eigen::MatrixXd node_values_;

  Box box_;
  PointMatrix grid_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd lambdas_;
  Eigen::MatrixXd vectors_;
};

/// Newton basis on the nodes by stepwise Cholesky factorisation of C_{X,X}.
/// Throws PivotError when a squared pivot drops below 1e-12 C(x_n, x_n);
/// no jitter is added.
ExpansionBasis newton_basis(const Covariance& cov, const NodeSet& nodes);

/// C(x,x) - sum_{n<N} w_n(x)^2, with values in [-1e-10, 0) clamped to 0.
double residual_variance(const ExpansionBasis& basis, std::size_t N, PointRef x);

/// Residual variance at every row of `points`.
Eigen::VectorXd residual_variances(const ExpansionBasis& basis, std::size_t N,
                                   const PointMatrix& points);

/// Truncated reconstruction sum_{n<N} w_n(x) w_n(y) of the kernel.
double truncated_kernel(const ExpansionBasis& basis, std::size_t N, PointRef x, PointRef y);

struct GreedyStop {
  std::size_t max_nodes = 0;
  double tol = 0.0;
};

struct GreedyResult {
  NodeSet nodes;
  std::vector<std::size_t> candidate_indices;
  // sup over the candidates of the residual variance after n nodes,
  // n = 0 .. nodes.size().
  std::vector<double> sup_residual;
};

/// P-greedy node selection: repeatedly adds the candidate with the largest
/// residual variance, lowest index on ties, until max_nodes nodes are chosen
/// or the largest residual is <= tol.
GreedyResult p_greedy_select(const Covariance& cov, const NodeSet& candidates,
                             const GreedyStop& stop);

}  // namespace kpath

#endif  // KPATH_EXPANSION_HPP_
