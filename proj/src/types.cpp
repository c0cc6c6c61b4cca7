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

#include "kpath/types.hpp"

#include <cmath>
#include <string>

#include "kpath/errors.hpp"

namespace kpath {

Box::Box(Point lo, Point hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw DomainError("Box: corner dimensions differ or are empty");
  for (Eigen::Index k = 0; k < lower.size(); ++k) {
    if (!(lower[k] < upper[k]))
      throw DomainError("Box: lower corner must be below upper corner");
  }
}

Box Box::unit(int dim) {
  return Box(Point::Zero(dim), Point::Ones(dim));
}

bool Box::contains(PointRef x, double slack) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (x[k] < lower[k] - slack || x[k] > upper[k] + slack) return false;
  }
  return true;
}

double Box::volume() const { return (upper - lower).prod(); }

NodeSet::NodeSet(PointMatrix points, Box box)
    : points_(std::move(points)), box_(std::move(box)) {
  if (points_.rows() > 0 && points_.cols() != box_.dim())
    throw DomainError("NodeSet: point dimension does not match the box");
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    if (!box_.contains(points_.row(i)))
      throw DomainError("NodeSet: point " + std::to_string(i) +
                        " lies outside the domain box");
  }
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if ((points_.row(i) - points_.row(j)).squaredNorm() == 0.0)
        throw DomainError("NodeSet: points " + std::to_string(j) + " and " +
                          std::to_string(i) + " coincide");
    }
  }
}

NodeSet NodeSet::subset(const std::vector<std::size_t>& indices) const {
  PointMatrix sub(static_cast<Eigen::Index>(indices.size()), points_.cols());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= size()) throw DomainError("NodeSet::subset: index out of range");
    sub.row(static_cast<Eigen::Index>(k)) = point(indices[k]);
  }
  return NodeSet(std::move(sub), box_);
}

namespace {

template <class AxisValue>
PointMatrix tensor_grid(const Box& box, int per_dim, AxisValue axis_value) {
  const int d = box.dim();
  Eigen::Index total = 1;
  for (int k = 0; k < d; ++k) total *= per_dim;
  PointMatrix pts(total, d);
  for (Eigen::Index i = 0; i < total; ++i) {
    Eigen::Index rem = i;
    // last axis varies fastest
    for (int k = d - 1; k >= 0; --k) {
      const int idx = static_cast<int>(rem % per_dim);
      rem /= per_dim;
      pts(i, k) = axis_value(k, idx);
    }
  }
  return pts;
}

}  // namespace

NodeSet uniform_grid(const Box& box, int per_dim) {
  if (per_dim < 1) throw DomainError("uniform_grid: need at least one point per axis");
  auto pts = tensor_grid(box, per_dim, [&](int k, int idx) {
    if (per_dim == 1) return 0.5 * (box.lower[k] + box.upper[k]);
    if (idx == per_dim - 1) return box.upper[k];
    const double t = static_cast<double>(idx) / (per_dim - 1);
    return box.lower[k] + t * (box.upper[k] - box.lower[k]);
  });
  return NodeSet(std::move(pts), box);
}

PointMatrix midpoint_grid(const Box& box, int per_dim) {
  if (per_dim < 1) throw DomainError("midpoint_grid: need at least one cell per axis");
  return tensor_grid(box, per_dim, [&](int k, int idx) {
    const double h = (box.upper[k] - box.lower[k]) / per_dim;
    return box.lower[k] + (idx + 0.5) * h;
  });
}

}  // namespace kpath
