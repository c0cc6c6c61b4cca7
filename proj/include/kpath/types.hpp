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

#ifndef KPATH_TYPES_HPP_
#define KPATH_TYPES_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace kpath {

// Points are stored as rows of a row-major matrix so that a single point is a
// contiguous row vector.
using PointMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Point = Eigen::RowVectorXd;
using PointRef = Eigen::Ref<const Eigen::RowVectorXd>;

struct Box {
  Point lower;
  Point upper;

  Box() = default;
  Box(Point lo, Point hi);
  static Box unit(int dim);

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(PointRef x, double slack = 1e-12) const;
  double volume() const;
};

// Ordered, pairwise-distinct points inside a box.
class NodeSet {
 public:
  NodeSet() = default;
  // Throws DomainError if points coincide or leave the box.
  NodeSet(PointMatrix points, Box box);

  int dim() const { return box_.dim(); }
  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  bool empty() const { return points_.rows() == 0; }
  const PointMatrix& points() const { return points_; }
  auto point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)); }
  const Box& box() const { return box_; }

  // New node set made of the given rows, in the given order.
  NodeSet subset(const std::vector<std::size_t>& indices) const;

 private:
  PointMatrix points_;
  Box box_;
};

// Tensor grid with `per_dim` equispaced points per axis, endpoints included.
NodeSet uniform_grid(const Box& box, int per_dim);

// Cell midpoints of a tensor grid with `per_dim` cells per axis.
PointMatrix midpoint_grid(const Box& box, int per_dim);

}  // namespace kpath

#endif  // KPATH_TYPES_HPP_
