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

#include "kpath/sampler.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>

#include "kpath/errors.hpp"
#include "kpath/rng.hpp"

namespace kpath {

std::string to_string(InnovationDist dist) {
  switch (dist) {
    case InnovationDist::Gaussian:
      return "gaussian";
    case InnovationDist::Rademacher:
      return "rademacher";
    case InnovationDist::UniformScaled:
      return "uniform";
  }
  return "unknown";
}

InnovationDist innovation_dist_from_string(const std::string& name) {
  if (name == "gaussian") return InnovationDist::Gaussian;
  if (name == "rademacher") return InnovationDist::Rademacher;
  if (name == "uniform" || name == "uniform_scaled") return InnovationDist::UniformScaled;
  throw DomainError("unknown innovation distribution '" + name + "'");
}

double square_variance(InnovationDist dist) {
  switch (dist) {
    case InnovationDist::Gaussian:
      return 2.0;
    case InnovationDist::Rademacher:
      return 0.0;
    case InnovationDist::UniformScaled:
      return 0.8;
  }
  return 0.0;
}

namespace {

double standardise(InnovationDist dist, std::uint64_t bits) {
  switch (dist) {
    case InnovationDist::Gaussian: {
      const double u = to_open_unit(bits);
      return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
    }
    case InnovationDist::Rademacher:
      return (bits >> 63) ? 1.0 : -1.0;
    case InnovationDist::UniformScaled:
      return std::sqrt(3.0) * (2.0 * to_open_unit(bits) - 1.0);
  }
  return 0.0;
}

// Fixed left-to-right order so that batch and per-point evaluation agree
// bit for bit.
double ordered_dot(const double* a, const double* b, std::size_t n, std::size_t stride_b = 1) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i * stride_b];
  return acc;
}

}  // namespace

Eigen::VectorXd draw_innovations(const InnovationSpec& spec, std::size_t N) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(N));
  for (std::size_t block = 0; 4 * block < N; ++block) {
    const auto bits = Philox4x64::block({block, 0, 0, 0}, {spec.seed, spec.stream});
    for (std::size_t w = 0; w < 4 && 4 * block + w < N; ++w)
      out[static_cast<Eigen::Index>(4 * block + w)] = standardise(spec.dist, bits[w]);
  }
  return out;
}

PathSample::PathSample(std::shared_ptr<const ExpansionBasis> basis, std::size_t N,
                       Eigen::VectorXd innovations, InnovationSpec spec)
    : basis_(std::move(basis)), n_(N), innovations_(std::move(innovations)), spec_(spec) {
  if (!basis_) throw DomainError("path: missing basis");
  if (n_ > basis_->size())
    throw DomainError("path: truncation " + std::to_string(n_) + " exceeds basis size " +
                      std::to_string(basis_->size()));
  if (static_cast<std::size_t>(innovations_.size()) != n_)
    throw DomainError("path: innovation count must equal the truncation");
}

double PathSample::operator()(PointRef x) const {
  if (n_ == 0) return 0.0;
  const Eigen::VectorXd w = basis_->eval_all(x, n_);
  return ordered_dot(innovations_.data(), w.data(), n_);
}

PathSample sample_path(std::shared_ptr<const ExpansionBasis> basis, std::size_t N,
                       const InnovationSpec& spec) {
  if (!basis) throw DomainError("sample_path: missing basis");
  if (N > basis->size())
    throw DomainError("sample_path: truncation " + std::to_string(N) + " exceeds basis size " +
                      std::to_string(basis->size()));
  return PathSample(std::move(basis), N, draw_innovations(spec, N), spec);
}

std::vector<double> eval_path(const PathSample& path, const PointMatrix& xs) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(xs.rows()));
  for (Eigen::Index i = 0; i < xs.rows(); ++i) out.push_back(path(xs.row(i)));
  return out;
}

Eigen::MatrixXd path_ensemble(const Eigen::MatrixXd& basis_values, std::size_t N,
                              const InnovationSpec& spec, std::size_t M) {
  if (M < 1) throw DomainError("path_ensemble: need at least one path");
  if (static_cast<std::size_t>(basis_values.cols()) < N)
    throw DomainError("path_ensemble: basis table has fewer than N columns");
  const Eigen::Index p = basis_values.rows();
  // Row-major copy so each grid point's basis values are contiguous.
  const PointMatrix table = basis_values.leftCols(static_cast<Eigen::Index>(N));
  Eigen::MatrixXd out(static_cast<Eigen::Index>(M), p);
  for (std::size_t m = 0; m < M; ++m) {
    const Eigen::VectorXd s = draw_innovations(spec.with_stream(spec.stream + m), N);
    for (Eigen::Index i = 0; i < p; ++i)
      out(static_cast<Eigen::Index>(m), i) =
          N == 0 ? 0.0 : ordered_dot(s.data(), table.row(i).data(), N);
  }
  return out;
}

Eigen::MatrixXd path_ensemble(const ExpansionBasis& basis, std::size_t N,
                              const InnovationSpec& spec, std::size_t M,
                              const PointMatrix& grid) {
  if (N > basis.size())
    throw DomainError("path_ensemble: truncation " + std::to_string(N) +
                      " exceeds basis size " + std::to_string(basis.size()));
  return path_ensemble(basis.values(grid, N), N, spec, M);
}

}  // namespace kpath
