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

// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "kpath/basis_io.hpp"
#include "kpath/cli.hpp"
#include "kpath/diagnostics.hpp"
#include "kpath/kernels.hpp"
#include "kpath/mercer.hpp"
#include "kpath/rng.hpp"
#include "kpath/sampler.hpp"

namespace {

using namespace kpath;

struct Outcome {
  bool passed;
  std::string detail;
};

Point pt1(double x) {
  Point p(1);
  p << x;
  return p;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Shared by several criteria: P-greedy Newton basis for Matern 5/2 on [0,1].
constexpr double kAlpha52 = 0.2;

ExpansionBasis greedy_matern52(std::size_t n) {
  const Covariance cov(KernelSpec::matern(2.5, kAlpha52));
  const auto res = p_greedy_select(cov, uniform_grid(Box::unit(1), 1001), {n, 0.0});
  return newton_basis(cov, res.nodes);
}

Outcome half_integer_matern() {
  double worst = 0.0;
  for (double nu : {0.5, 1.5, 2.5}) {
    for (double alpha : {0.5, 1.0, 2.0}) {
      for (int i = 0; i < 200; ++i) {
        const double r = 1e-6 * std::pow(20.0 / 1e-6, i / 199.0);
        const double closed = matern_correlation(nu, r / alpha);
        const double numeric = matern_correlation(nu, r / alpha, BesselRoute::Numeric);
        worst = std::max(worst, std::abs(numeric - closed) / std::abs(closed));
      }
    }
  }
  return {worst <= 1e-9, "max rel err " + num(worst) + " <= 1e-9"};
}

Outcome newton_cholesky() {
  PointMatrix p(30, 2);
  for (Eigen::Index i = 0; i < 30; ++i)
    for (Eigen::Index k = 0; k < 2; ++k)
      p(i, k) = to_open_unit(random_bits(2024, 0, static_cast<std::uint64_t>(2 * i + k)));
  const Covariance cov(KernelSpec::matern(1.5, 0.5, 2));
  const NodeSet nodes(p, Box::unit(2));
  const auto b = newton_basis(cov, nodes);
  const Eigen::MatrixXd k = cov.gram(p);
  const Eigen::MatrixXd l = k.llt().matrixL();
  const double factor = (b.node_values() - l).cwiseAbs().maxCoeff();
  const double recon = (b.node_values() * b.node_values().transpose() - k).cwiseAbs().maxCoeff();
  return {factor <= 1e-10 && recon <= 1e-10,
          "|L - chol(K)| " + num(factor) + ", |L L^T - K| " + num(recon) + " <= 1e-10"};
}

Outcome pointwise_bound() {
  const auto b = greedy_matern52(50);
  const auto grid = uniform_grid(Box::unit(1), 1001);
  double lo = 1e300, hi = -1e300;
  const Eigen::VectorXd full = residual_variances(b, 50, grid.points());
  lo = full.minCoeff();
  hi = full.maxCoeff();
  double at_nodes = 0.0;
  for (std::size_t j = 0; j < 50; ++j)
    at_nodes = std::max(at_nodes, std::abs(residual_variance(b, 50, b.nodes().point(j))));
  std::vector<double> sups;
  for (std::size_t n : {10, 20, 30, 40, 50}) sups.push_back(residual_variances(b, n, grid.points()).maxCoeff());
  bool decreasing = true;
  for (std::size_t k = 1; k < sups.size(); ++k) decreasing = decreasing && sups[k] < sups[k - 1];
  std::string s;
  for (double v : sups) s += (s.empty() ? "" : ", ") + num(v);
  return {lo >= -1e-10 && hi <= 1.0 && at_nodes <= 1e-10 && decreasing,
          "defect in [" + num(lo) + ", " + num(hi) + "], nodes " + num(at_nodes) + ", sup@{10..50} " + s};
}

Outcome brownian_nystrom() {
  const Covariance bm([](PointRef x, PointRef y) { return std::min(x[0], y[0]); }, 1, "brownian");
  const auto e = nystrom_eigs(bm, make_quadrature(Box::unit(1), 2000), 5);
  double worst = 0.0;
  for (int n = 1; n <= 5; ++n) {
    const double d = (2.0 * n - 1.0) * std::numbers::pi;
    worst = std::max(worst, std::abs(e.lambdas[n - 1] / (4.0 / (d * d)) - 1.0));
  }
  return {e.size() == 5 && worst <= 0.01, "max rel dev " + num(worst) + " <= 0.01"};
}

Outcome eigen_decay() {
  const Covariance cov(KernelSpec::matern(1.5, 1.0));
  const auto e = nystrom_eigs(cov, make_quadrature(Box::unit(1), 1000), 40);
  if (e.size() < 40) return {false, "only " + std::to_string(e.size()) + " eigenpairs"};
  const double m = eig_decay_fit(e.lambdas, 1, 5, 40);
  return {std::abs(m - 2.0) <= 0.3, "m_hat " + num(m) + " vs 2.0 +- 0.3"};
}

Outcome covariance_reproduction() {
  const auto b = greedy_matern52(60);
  const std::size_t M = 100000;
  PointMatrix pts(10, 1);
  for (Eigen::Index i = 0; i < 10; ++i) pts(i, 0) = 0.05 + 0.1 * static_cast<double>(i);
  const Eigen::MatrixXd ens = path_ensemble(b, 60, {InnovationDist::Gaussian, 6, 0}, M, pts);
  const std::vector<std::pair<int, int>> pairs = {{0, 0}, {0, 1}, {1, 3}, {2, 2}, {2, 7},
                                                  {3, 4}, {4, 9}, {5, 6}, {6, 8}, {9, 9}};
  double worst = 0.0;
  for (auto [i, j] : pairs) {
    const Eigen::ArrayXd prod = ens.col(i).array() * ens.col(j).array();
    const double est = prod.mean();
    const double se = std::sqrt((prod - est).square().mean() / static_cast<double>(M));
    const double want = b.covariance()(pts.row(i), pts.row(j));
    worst = std::max(worst, std::abs(est - want) / se);
  }
  return {worst <= 5.0, "max |cov - C| / SE " + num(worst) + " <= 5"};
}

Outcome truncation_certificate() {
  const auto b = greedy_matern52(60);
  const std::size_t N = 10, M = 100000;
  PointMatrix pts(5, 1);
  // Off the candidate grid, so no point is a node.
  pts << 0.1234, 0.2917, 0.5071, 0.7743, 0.9138;
  const Eigen::MatrixXd full = path_ensemble(b, 60, {InnovationDist::Gaussian, 7, 0}, M, pts);
  // Same innovations, first N terms only.
  const Eigen::MatrixXd head = path_ensemble(b, N, {InnovationDist::Gaussian, 7, 0}, M, pts);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < 5; ++i) {
    const Eigen::ArrayXd d2 = (full.col(i) - head.col(i)).array().square();
    const double m2 = d2.mean();
    const double se = std::sqrt(std::max((d2.square().mean() - m2 * m2) / static_cast<double>(M), 0.0));
    const double want = residual_variance(b, N, pts.row(i)) - residual_variance(b, 60, pts.row(i));
    worst = std::max(worst, std::abs(m2 - want) / se);
  }
  return {worst <= 5.0, "max |Var - res(N) + res(full)| / SE " + num(worst) + " <= 5"};
}

Outcome native_norm() {
  auto ratio = [](InnovationDist d) {
    const Eigen::VectorXd s = draw_innovations({d, 0, 0}, 10000);
    return s.squaredNorm() / 10000.0;
  };
  const double g = ratio(InnovationDist::Gaussian);
  const double r = ratio(InnovationDist::Rademacher);
  const bool growth = native_norm_growth({InnovationDist::Gaussian, 0, 0}, 10000).all_passed();
  return {g >= 0.929 && g <= 1.071 && r == 1.0 && growth,
          "Gaussian Q_N/N " + num(g) + " in [0.929, 1.071], Rademacher " + num(r)};
}

Outcome smoothness_gap() {
  std::size_t probes = 0, wrong = 0;
  for (auto [m, d] : {std::pair{1.0, 1}, {1.5, 1}, {2.0, 2}}) {
    for (int k = 0; k <= static_cast<int>(std::round(10 * m)); ++k) {
      SobolevScaleSpec s;
      s.m = m;
      s.d = d;
      s.p = k / 10.0;
      const bool converges = sobolev_membership_series(s, 100000).verdict == SeriesVerdict::Converges;
      ++probes;
      if (converges != (s.p < m - d / 2.0)) ++wrong;
    }
  }
  return {wrong == 0, std::to_string(probes) + " probes, " + std::to_string(wrong) + " misclassified"};
}

Outcome statistical_equivalence() {
  const auto newton = greedy_matern52(50);
  const Covariance cov(KernelSpec::matern(2.5, kAlpha52));
  const auto kl = kl_basis(nystrom_eigs(cov, make_quadrature(Box::unit(1), 400), 50), cov);
  PointMatrix pts(5, 1);
  pts << 0.1, 0.3, 0.5, 0.7, 0.9;
  const auto r = cylinder_equivalence_test(newton, kl, pts, 10000, {InnovationDist::Gaussian, 10, 0});
  double worst = 0.0, crit = 0.0;
  for (const auto& c : r.checks) {
    if (c.name.rfind("KS", 0) == 0) {
      worst = std::max(worst, c.measured);
      crit = c.threshold;
    }
  }
  return {r.all_passed(), "max KS " + num(worst) + " < " + num(crit) + ", " +
                              std::to_string(r.failures()) + " failed checks"};
}

Outcome derivative_variance() {
  double worst = 0.0;
  for (double alpha : {1.0, 2.0}) {
    const double v = twin_derivative_variance(KernelSpec::matern(1.5, alpha), {1}, pt1(0.5));
    worst = std::max(worst, std::abs(v * alpha * alpha - 1.0));
  }
  return {worst <= 1e-5, "max rel err " + num(worst) + " <= 1e-5"};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "kpath_acceptance_determinism";
  fs::remove_all(dir);
  RunConfig cfg;
  cfg.kernel = KernelSpec::matern(2.5, kAlpha52);
  cfg.domain = Box::unit(1);
  cfg.innovations = {InnovationDist::Gaussian, 123456789, 0};
  cfg.paths = 500;
  std::ostringstream log;
  cfg.out_dir = dir / "a";
  const int ca = cmd_sample(cfg, log);
  cfg.out_dir = dir / "b";
  const int cb = cmd_sample(cfg, log);
  bool same = ca == 0 && cb == 0;
  for (const char* f : {"ensemble.bin", "ensemble.json", "certificate.csv"})
    same = same && read_file(dir / "a" / f) == read_file(dir / "b" / f);
  const std::string hash = file_sha256(dir / "a" / "ensemble.bin");
  fs::remove_all(dir);
  return {same, "ensemble sha256 " + hash.substr(0, 16) + "..., sidecar and certificate identical"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "half-integer Matern consistency", 1.0, half_integer_matern},
      {2, "Newton/Cholesky equivalence", 1.0, newton_cholesky},
      {3, "pointwise bound and monotonicity", 5.0, pointwise_bound},
      {4, "Nystrom Brownian oracle", 10.0, brownian_nystrom},
      {5, "eigen-decay exponent", 10.0, eigen_decay},
      {6, "covariance reproduction", 60.0, covariance_reproduction},
      {7, "truncation certificate", 60.0, truncation_certificate},
      {8, "native-norm divergence", 1.0, native_norm},
      {9, "smoothness-gap boundary", 1.0, smoothness_gap},
      {10, "statistical equivalence (Gaussian)", 60.0, statistical_equivalence},
      {11, "derivative variance", 1.0, derivative_variance},
      {12, "determinism of sample", 5.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool ok = o.passed && in_time;
    failures += ok ? 0 : 1;
    std::printf("%s %2d %-36s %s [%.2f s < %.0f s%s]\n", ok ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : " EXCEEDED");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
