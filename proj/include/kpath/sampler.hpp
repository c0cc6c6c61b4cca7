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

#ifndef KPATH_SAMPLER_HPP_
#define KPATH_SAMPLER_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kpath/expansion.hpp"

namespace kpath {

enum class InnovationDist { Gaussian, Rademacher, UniformScaled };

std::string to_string(InnovationDist dist);
InnovationDist innovation_dist_from_string(const std::string& name);

/// Var(s^2) for a standardised draw s: 2, 0 and 4/5.
double square_variance(InnovationDist dist);

struct InnovationSpec {
  InnovationDist dist = InnovationDist::Gaussian;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  InnovationSpec with_stream(std::uint64_t s) const { return {dist, seed, s}; }
};

/// N independent zero-mean, unit-variance draws keyed by (seed, stream, n).
/// Gaussian draws use the inverse normal CDF, so draw n never depends on
/// draws before it.
Eigen::VectorXd draw_innovations(const InnovationSpec& spec, std::size_t N);

/// A truncated expansion path p_N(x) = sum_{n<N} s_n w_n(x).
class PathSample {
 public:
  PathSample(std::shared_ptr<const ExpansionBasis> basis, std::size_t N,
             Eigen::VectorXd innovations, InnovationSpec spec);

  const ExpansionBasis& basis() const { return *basis_; }
  std::shared_ptr<const ExpansionBasis> basis_ptr() const { return basis_; }
  std::size_t truncation() const { return n_; }
  const Eigen::VectorXd& innovations() const { return innovations_; }
  const InnovationSpec& innovation_spec() const { return spec_; }

  double operator()(PointRef x) const;

  /// Variance of p(x) - p_N(x) for the untruncated path p.
  double certificate(PointRef x) const { return residual_variance(*basis_, n_, x); }

 private:
  std::shared_ptr<const ExpansionBasis> basis_;
  std::size_t n_;
  Eigen::VectorXd innovations_;
  InnovationSpec spec_;
};

/// Throws DomainError if N exceeds the basis size.
PathSample sample_path(std::shared_ptr<const ExpansionBasis> basis, std::size_t N,
                       const InnovationSpec& spec);

/// Pointwise values at the rows of xs; identical to calling the path per point.
std::vector<double> eval_path(const PathSample& path, const PointMatrix& xs);

/// M paths on the grid, path m using stream spec.stream + m. Row m holds path m.
Eigen::MatrixXd path_ensemble(const ExpansionBasis& basis, std::size_t N,
                              const InnovationSpec& spec, std::size_t M,
                              const PointMatrix& grid);

/// Same as path_ensemble with basis values already tabulated:
/// basis_values(i, n) = w_n(grid_i), n < N.
Eigen::MatrixXd path_ensemble(const Eigen::MatrixXd& basis_values, std::size_t N,
                              const InnovationSpec& spec, std::size_t M);

}  // namespace kpath

#endif  // KPATH_SAMPLER_HPP_
