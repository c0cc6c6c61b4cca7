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

#include "kpath/expansion.hpp"

#include <algorithm>
#include <cmath>

#include "kpath/errors.hpp"

namespace kpath {

std::string to_string(BasisKind kind) { return kind == BasisKind::Newton ? "newton" : "kl"; }

BasisKind basis_kind_from_string(const std::string& name) {
  if (name == "newton") return BasisKind::Newton;
  if (name == "kl") return BasisKind::KL;
  throw DomainError("unknown basis kind '" + name + "'");
}

ExpansionBasis ExpansionBasis::newton(Covariance cov, NodeSet nodes,
                                      Eigen::MatrixXd node_values) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  if (node_values.rows() != n || node_values.cols() != n)
    throw DomainError("newton basis: node-value matrix must be square of node count");
  if (nodes.dim() != cov.dim() && n > 0)
    throw DomainError("newton basis: node dimension does not match the kernel");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(node_values(j, j) > 0.0))
      throw DomainError("newton basis: diagonal entries must be positive");
  }
  ExpansionBasis b(BasisKind::Newton, std::move(cov));
  b.size_ = nodes.size();
  b.nodes_ = std::move(nodes);
  b.node_values_ = node_values.triangularView<Eigen::Lower>();
  return b;
}

ExpansionBasis ExpansionBasis::kl(Covariance cov, Box box, PointMatrix grid,
                                  Eigen::VectorXd weights, Eigen::VectorXd lambdas,
                                  Eigen::MatrixXd vectors) {
  if (grid.cols() != cov.dim()) throw DomainError("kl basis: grid dimension mismatch");
  if (weights.size() != grid.rows() || vectors.rows() != grid.rows() ||
      vectors.cols() != lambdas.size())
    throw DomainError("kl basis: inconsistent grid, weight and eigenvector sizes");
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw DomainError("kl basis: eigenvalues must be positive");
  }
  ExpansionBasis b(BasisKind::KL, std::move(cov));
  b.size_ = static_cast<std::size_t>(lambdas.size());
  b.box_ = std::move(box);
  b.grid_ = std::move(grid);
  b.weights_ = std::move(weights);
  b.lambdas_ = std::move(lambdas);
  b.vectors_ = std::move(vectors);
  return b;
}

Eigen::VectorXd ExpansionBasis::sigma() const {
  if (kind_ != BasisKind::Newton) throw DomainError("sigma: only defined for Newton bases");
  return node_values_.diagonal();
}

Eigen::MatrixXd ExpansionBasis::coefficients() const {
  if (kind_ != BasisKind::Newton)
    throw DomainError("coefficients: only defined for Newton bases");
  const auto n = node_values_.rows();
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(n, n);
  node_values_.triangularView<Eigen::Lower>().solveInPlace(inv);
  return inv;
}

std::size_t ExpansionBasis::resolve(std::size_t count) const {
  if (count == npos) return size_;
  if (count > size_)
    throw DomainError("basis: truncation " + std::to_string(count) + " exceeds basis size " +
                      std::to_string(size_));
  return count;
}

double ExpansionBasis::eval(std::size_t n, PointRef x) const {
  if (n >= size_)
    throw DomainError("basis: index " + std::to_string(n) + " out of range for size " +
                      std::to_string(size_));
  if (kind_ == BasisKind::Newton) return eval_all(x, n + 1)[static_cast<Eigen::Index>(n)];
  const auto ni = static_cast<Eigen::Index>(n);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < grid_.rows(); ++i)
    acc += weights_[i] * cov_(x, grid_.row(i)) * vectors_(i, ni);
  return acc / std::sqrt(lambdas_[ni]);
}

Eigen::VectorXd ExpansionBasis::eval_all(PointRef x, std::size_t count) const {
  const auto n = static_cast<Eigen::Index>(resolve(count));
  if (x.size() != dim()) throw DomainError("basis: point dimension mismatch");
  if (kind_ == BasisKind::Newton) {
    Eigen::VectorXd w(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      double acc = cov_(nodes_.point(static_cast<std::size_t>(j)), x);
      for (Eigen::Index m = 0; m < j; ++m) acc -= node_values_(j, m) * w[m];
      w[j] = acc / node_values_(j, j);
    }
    return w;
  }
  Eigen::VectorXd k(grid_.rows());
  for (Eigen::Index i = 0; i < grid_.rows(); ++i) k[i] = weights_[i] * cov_(x, grid_.row(i));
  Eigen::VectorXd w = vectors_.leftCols(n).transpose() * k;
  return w.cwiseQuotient(lambdas_.head(n).cwiseSqrt());
}

Eigen::MatrixXd ExpansionBasis::values(const PointMatrix& points, std::size_t count) const {
  const auto n = static_cast<Eigen::Index>(resolve(count));
  Eigen::MatrixXd out(points.rows(), n);
  for (Eigen::Index i = 0; i < points.rows(); ++i) out.row(i) = eval_all(points.row(i), resolve(count)).transpose();
  return out;
}

ExpansionBasis newton_basis(const Covariance& cov, const NodeSet& nodes) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  const Eigen::MatrixXd k = cov.gram(nodes.points());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = k(j, j);
    for (Eigen::Index m = 0; m < j; ++m) pivot -= l(j, m) * l(j, m);
    if (!(pivot >= 1e-12 * k(j, j))) throw PivotError(static_cast<std::size_t>(j), pivot, k(j, j));
    const double sigma = std::sqrt(pivot);
    l(j, j) = sigma;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double acc = k(i, j);
      for (Eigen::Index m = 0; m < j; ++m) acc -= l(i, m) * l(j, m);
      l(i, j) = acc / sigma;
    }
  }
  return ExpansionBasis::newton(cov, nodes, std::move(l));
}

double residual_variance(const ExpansionBasis& basis, std::size_t N, PointRef x) {
  const double c = basis.covariance().diagonal(x);
  if (N == 0) return c;
  const double res = c - basis.eval_all(x, N).squaredNorm();
  return (res < 0.0 && res >= -1e-10) ? 0.0 : res;
}

Eigen::VectorXd residual_variances(const ExpansionBasis& basis, std::size_t N,
                                   const PointMatrix& points) {
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    out[i] = residual_variance(basis, N, points.row(i));
  return out;
}

double truncated_kernel(const ExpansionBasis& basis, std::size_t N, PointRef x, PointRef y) {
  if (N == 0) return 0.0;
  return basis.eval_all(x, N).dot(basis.eval_all(y, N));
}

GreedyResult p_greedy_select(const Covariance& cov, const NodeSet& candidates,
                             const GreedyStop& stop) {
  if (candidates.empty()) throw DomainError("p_greedy_select: no candidates");
  if (stop.max_nodes > candidates.size())
    throw DomainError("p_greedy_select: max_nodes exceeds the candidate count");
  if (candidates.dim() != cov.dim())
    throw DomainError("p_greedy_select: candidate dimension does not match the kernel");

  const auto m = static_cast<Eigen::Index>(candidates.size());
  const auto& pts = candidates.points();
  Eigen::VectorXd diag(m);
  for (Eigen::Index i = 0; i < m; ++i) diag[i] = cov.diagonal(pts.row(i));
  Eigen::VectorXd residual = diag;

  // Column n holds w_n at every candidate.
  std::vector<Eigen::VectorXd> columns;
  GreedyResult result;

  auto argmax = [&] {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < m; ++i) {
      if (residual[i] > residual[best]) best = i;
    }
    return best;
  };

  Eigen::Index best = argmax();
  result.sup_residual.push_back(residual[best]);
  while (result.candidate_indices.size() < stop.max_nodes && residual[best] > stop.tol) {
    const double pivot = residual[best];
    if (!(pivot >= 1e-12 * diag[best]))
      throw PivotError(result.candidate_indices.size(), pivot, diag[best]);
    const double sigma = std::sqrt(pivot);
    Eigen::VectorXd w(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      double acc = cov(pts.row(best), pts.row(i));
      for (const auto& col : columns) acc -= col[best] * col[i];
      w[i] = acc / sigma;
    }
    w[best] = sigma;
    residual -= w.cwiseAbs2();
    residual[best] = 0.0;
    columns.push_back(std::move(w));
    result.candidate_indices.push_back(static_cast<std::size_t>(best));
    best = argmax();
    result.sup_residual.push_back(std::max(residual[best], 0.0));
  }
  result.nodes = candidates.subset(result.candidate_indices);
  return result;
}

}  // namespace kpath
