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

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <memory>

#include "kpath/errors.hpp"
#include "kpath/expansion.hpp"
#include "kpath/mercer.hpp"
#include "kpath/rng.hpp"
#include "kpath/sampler.hpp"
#include "test_util.hpp"

using kpath::Covariance;
using kpath::InnovationDist;
using kpath::InnovationSpec;
using kpath::KernelSpec;
using kpath::testing::pt;

namespace {

std::shared_ptr<const kpath::ExpansionBasis> greedy_basis(double nu, double alpha, std::size_t n) {
  const Covariance cov(KernelSpec::matern(nu, alpha));
  const auto res = kpath::p_greedy_select(cov, kpath::uniform_grid(kpath::Box::unit(1), 501), {n, 0.0});
  return std::make_shared<const kpath::ExpansionBasis>(kpath::newton_basis(cov, res.nodes));
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST_CASE("innovation names and square variances") {
  for (auto d : {InnovationDist::Gaussian, InnovationDist::Rademacher, InnovationDist::UniformScaled})
    CHECK(kpath::innovation_dist_from_string(kpath::to_string(d)) == d);
  CHECK_THROWS_AS(kpath::innovation_dist_from_string("cauchy"), kpath::DomainError);
  CHECK(kpath::square_variance(InnovationDist::Gaussian) == 2.0);
  CHECK(kpath::square_variance(InnovationDist::Rademacher) == 0.0);
  CHECK(kpath::square_variance(InnovationDist::UniformScaled) == doctest::Approx(0.8));
}

TEST_CASE("Gaussian innovations are the normal quantile of the uniform stream") {
  const InnovationSpec spec{InnovationDist::Gaussian, 17, 4};
  const Eigen::VectorXd s = kpath::draw_innovations(spec, 103);
  for (Eigen::Index i = 0; i < 103; ++i) {
    const double u = kpath::to_open_unit(kpath::random_bits(17, 4, static_cast<std::uint64_t>(i)));
    const double phi = 0.5 * std::erfc(-s[i] / std::sqrt(2.0));
    CHECK(phi == doctest::Approx(u).epsilon(1e-13));
  }
}

TEST_CASE("innovation laws are standardized") {
  const std::size_t n = 400000;
  for (auto d : {InnovationDist::Gaussian, InnovationDist::Rademacher, InnovationDist::UniformScaled}) {
    const Eigen::VectorXd s = kpath::draw_innovations({d, 5, 0}, n);
    const double mean = s.mean();
    const double var = s.squaredNorm() / n;
    const double m4 = s.array().pow(4).mean();
    CAPTURE(kpath::to_string(d));
    CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt((kpath::square_variance(d) + 1e-300) / n) + 1e-15);
    CHECK(std::abs(m4 - 1.0 - kpath::square_variance(d)) < 0.05);
  }
  const Eigen::VectorXd r = kpath::draw_innovations({InnovationDist::Rademacher, 1, 2}, 1000);
  CHECK((r.array().abs() == 1.0).all());
  const Eigen::VectorXd u = kpath::draw_innovations({InnovationDist::UniformScaled, 1, 2}, 1000);
  CHECK(u.cwiseAbs().maxCoeff() < std::sqrt(3.0));
}

TEST_CASE("innovations are a pure function of (seed, stream, index)") {
  const InnovationSpec spec{InnovationDist::Gaussian, 99, 3};
  const Eigen::VectorXd a = kpath::draw_innovations(spec, 50);
  const Eigen::VectorXd b = kpath::draw_innovations(spec, 50);
  const Eigen::VectorXd prefix = kpath::draw_innovations(spec, 13);
  CHECK(a == b);
  CHECK(a.head(13) == prefix);
  CHECK(a != kpath::draw_innovations(spec.with_stream(4), 50));
  CHECK(a != kpath::draw_innovations({InnovationDist::Gaussian, 100, 3}, 50));
}

TEST_CASE("paths: evaluation, zero innovations, certificates") {
  const auto basis = greedy_basis(2.5, 0.2, 30);
  const auto path = kpath::sample_path(basis, 30, {InnovationDist::Gaussian, 1, 0});
  const Eigen::VectorXd s = path.innovations();
  for (double x : {0.0, 0.31, 0.9}) {
    CHECK(path(pt(x)) == doctest::Approx(s.dot(basis->eval_all(pt(x)))).epsilon(1e-13));
  }
  const kpath::PathSample zero(basis, 30, Eigen::VectorXd::Zero(30), {});
  CHECK(zero(pt(0.4)) == 0.0);
  for (std::size_t i = 0; i < 30; ++i) CHECK(std::abs(path.certificate(basis->nodes().point(i))) <= 1e-10);
  CHECK(path.certificate(pt(0.5)) >= 0.0);

  CHECK_THROWS_AS(kpath::sample_path(basis, 31, {}), kpath::DomainError);
  CHECK_THROWS_AS(kpath::PathSample(basis, 5, Eigen::VectorXd::Zero(4), {}), kpath::DomainError);
}

TEST_CASE("ensembles agree bit for bit with per-path evaluation") {
  const auto basis = greedy_basis(1.5, 0.3, 25);
  const auto grid = kpath::uniform_grid(kpath::Box::unit(1), 37);
  const InnovationSpec spec{InnovationDist::UniformScaled, 8, 100};
  const Eigen::MatrixXd ens = kpath::path_ensemble(*basis, 20, spec, 6, grid.points());
  for (std::size_t m = 0; m < 6; ++m) {
    const auto path = kpath::sample_path(basis, 20, spec.with_stream(100 + m));
    const auto row = kpath::eval_path(path, grid.points());
    for (std::size_t i = 0; i < row.size(); ++i)
      CHECK(bit_equal(ens(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)), row[i]));
  }
  CHECK(ens == kpath::path_ensemble(*basis, 20, spec, 6, grid.points()));
}

TEST_CASE("ensemble covariance reproduces the truncated kernel") {
  const auto basis = greedy_basis(2.5, 0.2, 30);
  kpath::PointMatrix pts(3, 1);
  pts << 0.1, 0.45, 0.8;
  const std::size_t M = 20000;
  const Eigen::MatrixXd ens = kpath::path_ensemble(*basis, 30, {InnovationDist::Gaussian, 2, 0}, M, pts);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = i; j < 3; ++j) {
      const Eigen::ArrayXd prod = ens.col(i).array() * ens.col(j).array();
      const double est = prod.mean();
      const double se = std::sqrt((prod - est).square().mean() / M);
      const double want = kpath::truncated_kernel(*basis, 30, pts.row(i), pts.row(j));
      CHECK(std::abs(est - want) <= 5.0 * se);
    }
  }
}

TEST_CASE("zero truncation gives zero paths") {
  const auto basis = greedy_basis(1.5, 0.3, 5);
  const auto path = kpath::sample_path(basis, 0, {});
  CHECK(path(pt(0.2)) == 0.0);
  CHECK(path.certificate(pt(0.2)) == 1.0);
}
