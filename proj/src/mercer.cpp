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

#include "kpath/mercer.hpp"

#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include <cmath>
#include <string>
#include <vector>

#include "kpath/errors.hpp"

namespace kpath {

QuadratureRule quadrature_rule_from_string(const std::string& name) {
  if (name == "midpoint") return QuadratureRule::Midpoint;
  if (name == "gauss_legendre" || name == "gauss-legendre") return QuadratureRule::GaussLegendre;
  throw DomainError("unknown quadrature rule '" + name + "'");
}

namespace {

// Golub-Welsch: nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre_1d(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  if (es.info() != Eigen::Success) throw EigenSolverError("gauss-legendre: eigensolver failed");
  nodes = es.eigenvalues();
  weights = 2.0 * es.eigenvectors().row(0).transpose().cwiseAbs2();
}

}  // namespace

Quadrature make_quadrature(const Box& box, int per_dim, QuadratureRule rule) {
  if (per_dim < 1) throw DomainError("quadrature: need at least one node per axis");
  const int d = box.dim();
  Eigen::VectorXd ref_nodes(per_dim), ref_weights(per_dim);
  if (rule == QuadratureRule::Midpoint) {
    for (int i = 0; i < per_dim; ++i) ref_nodes[i] = -1.0 + (2.0 * i + 1.0) / per_dim;
    ref_weights.setConstant(2.0 / per_dim);
  } else {
    gauss_legendre_1d(per_dim, ref_nodes, ref_weights);
  }
  Eigen::Index total = 1;
  for (int k = 0; k < d; ++k) total *= per_dim;
  Quadrature q;
  q.box = box;
  q.points.resize(total, d);
  q.weights.resize(total);
  for (Eigen::Index i = 0; i < total; ++i) {
    Eigen::Index rem = i;
    double w = 1.0;
    for (int k = d - 1; k >= 0; --k) {
      const auto idx = rem % per_dim;
      rem /= per_dim;
      const double half = 0.5 * (box.upper[k] - box.lower[k]);
      q.points(i, k) = box.lower[k] + half * (ref_nodes[idx] + 1.0);
      w *= half * ref_weights[idx];
    }
    q.weights[i] = w;
  }
  return q;
}

EigenSystem nystrom_eigs(const Covariance& cov, const Quadrature& grid, std::size_t N) {
  if (grid.points.rows() == 0) throw DomainError("nystrom_eigs: empty quadrature grid");
  if (grid.weights.size() != grid.points.rows())
    throw DomainError("nystrom_eigs: weight count does not match the grid");
  if (N > grid.size()) throw DomainError("nystrom_eigs: N exceeds the grid size");
  for (Eigen::Index i = 0; i < grid.weights.size(); ++i) {
    if (!(grid.weights[i] > 0.0)) throw DomainError("nystrom_eigs: weights must be positive");
    if (!grid.box.contains(grid.points.row(i)))
      throw DomainError("nystrom_eigs: quadrature point outside the domain");
  }

  EigenSystem out;
  out.grid = grid;
  if (N == 0) return out;

  const Eigen::VectorXd sw = grid.weights.cwiseSqrt();
  // gram() fills both triangles from one evaluation, so the matrix is
  // symmetric bit for bit.
  Eigen::MatrixXd a = sw.asDiagonal() * cov.gram(grid.points) * sw.asDiagonal();

  // Only the N largest eigenpairs, by index range (ascending order).
  const auto g = static_cast<lapack_int>(a.rows());
  const auto want = static_cast<lapack_int>(N);
  lapack_int found = 0;
  Eigen::VectorXd w(g);
  Eigen::MatrixXd z(g, want);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(want));
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', g, a.data(), g, 0.0, 0.0, g - want + 1, g,
                     0.0, &found, w.data(), z.data(), g, support.data());
  if (info != 0 || found != want)
    throw EigenSolverError("nystrom_eigs: eigensolver failed (info " + std::to_string(info) + ")");

  const double top = w[found - 1];
  if (!(top > 0.0)) throw EigenSolverError("nystrom_eigs: no positive eigenvalue");
  Eigen::Index keep = 0;
  while (keep < found && w[found - 1 - keep] >= 1e-12 * top) ++keep;

  out.lambdas.resize(keep);
  out.vectors.resize(g, keep);
  for (Eigen::Index n = 0; n < keep; ++n) {
    out.lambdas[n] = w[found - 1 - n];
    Eigen::VectorXd u = z.col(found - 1 - n);
    Eigen::Index imax = 0;
    u.cwiseAbs().maxCoeff(&imax);
    if (u[imax] < 0.0) u = -u;
    out.vectors.col(n) = u.cwiseQuotient(sw);
  }
  return out;
}

ExpansionBasis kl_basis(const EigenSystem& eigs, const Covariance& cov) {
  return ExpansionBasis::kl(cov, eigs.grid.box, eigs.grid.points, eigs.grid.weights,
                            eigs.lambdas, eigs.vectors);
}

double eig_decay_fit(const Eigen::VectorXd& lambdas, int d, std::size_t first, std::size_t last) {
  if (d < 1) throw DomainError("eig_decay_fit: dimension must be positive");
  if (first < 1 || last < first || last > static_cast<std::size_t>(lambdas.size()))
    throw DomainError("eig_decay_fit: fit range outside the eigenvalue sequence");
  const std::size_t count = last - first + 1;
  if (count < 4) throw DomainError("eig_decay_fit: degenerate fit, need at least 4 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t n = first; n <= last; ++n) {
    const double lam = lambdas[static_cast<Eigen::Index>(n - 1)];
    if (!(lam > 0.0)) throw DomainError("eig_decay_fit: eigenvalues must be positive");
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(lam);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double c = static_cast<double>(count);
  const double slope = (c * sxy - sx * sy) / (c * sxx - sx * sx);
  return -slope * d / 2.0;
}

}  // namespace kpath
