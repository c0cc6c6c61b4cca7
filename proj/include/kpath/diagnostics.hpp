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

#ifndef KPATH_DIAGNOSTICS_HPP_
#define KPATH_DIAGNOSTICS_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kpath/expansion.hpp"
#include "kpath/kernels.hpp"
#include "kpath/sampler.hpp"

namespace kpath {

enum class Comparison { LessEqual, GreaterEqual, Less, Greater };

struct Check {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  Comparison comparison = Comparison::LessEqual;
  bool passed = false;
  // Informational checks are reported but never affect the verdict.
  bool informational = false;
  std::string details;
};

struct DiagnosticsReport {
  std::string title;
  std::vector<Check> checks;
  std::optional<InnovationSpec> innovations;
  std::map<std::string, std::string> metadata;
  double runtime_seconds = 0.0;

  // Adds a check whose verdict is `measured <cmp> threshold`.
  Check& add(std::string name, double measured, Comparison cmp, double threshold,
             std::string details = {}, bool informational = false);

  bool all_passed() const;
  std::size_t failures() const;
  void append(const DiagnosticsReport& other);

  std::string to_text() const;
  nlohmann::ordered_json to_json() const;
};

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// c(alpha) = sqrt(-ln(alpha / 2) / 2): reject equality when
/// D > c(alpha) sqrt((n + m) / (n m)).
double ks_critical_value(double alpha);

/// Pointwise bound 0 <= C(x,x) - sum_{n<N} w_n(x)^2 <= C(x,x) on xs; for a
/// full Newton basis also checks the defect vanishes at the nodes.
DiagnosticsReport parseval_check(const ExpansionBasis& basis, const PointMatrix& xs,
                                 std::size_t N = ExpansionBasis::npos);

/// Q_N = sum_{n<=N} s_n^2 must satisfy |Q_N / N - 1| <= 5 sqrt(Var(s^2) / N)
/// and be nondecreasing: the squared native norm of the partial sums grows
/// linearly.
DiagnosticsReport native_norm_growth(const InnovationSpec& spec, std::size_t N);

enum class SeriesVerdict { Converges, Diverges, Indeterminate };
std::string to_string(SeriesVerdict v);

/// Weighted-expansion Sobolev scale: native weights lambda_n, probe weights
/// rho_n = n^{-2p/d}. With synthetic eigenvalues lambda_n = n^{-2m/d}; when
/// measured_lambdas is set, m is replaced by the eig_decay_fit estimate over
/// the one-based range [fit_first, fit_last].
struct SobolevScaleSpec {
  double m = 1.0;
  double p = 0.0;
  int d = 1;
  std::optional<Eigen::VectorXd> measured_lambdas;
  std::size_t fit_first = 5;
  std::size_t fit_last = 40;
};

struct MembershipResult {
  SeriesVerdict verdict = SeriesVerdict::Indeterminate;
  double exponent = 0.0;            // 2 (m - p) / d
  double empirical_exponent = 0.0;  // from partial-sum increments
  double partial_sum = 0.0;         // sum up to N_max
  double m_used = 0.0;
};

/// Classifies sum_n lambda_n / rho_n by the p-series test on its exponent
/// (converges iff exponent > 1) and cross-checks the exponent from the
/// growth of partial sums between N_max/4, N_max/2 and N_max. Exponents
/// within 0.05 of 1 are indeterminate for measured eigenvalues.
MembershipResult sobolev_membership_series(const SobolevScaleSpec& scale, std::size_t N_max);

struct CylinderOptions {
  std::size_t truncation_a = ExpansionBasis::npos;
  std::size_t truncation_b = ExpansionBasis::npos;
  double alpha = 1e-3;
};

/// Compares M paths from each basis through their empirical marginals at the
/// points and at differences of consecutive points, by two-sample KS tests
/// with Bonferroni-corrected level alpha. Basis A uses streams
/// spec.stream + [0, M), basis B spec.stream + [M, 2M). Marginal variances
/// are checked against sum_n w_n(x)^2 within 5 standard errors. Runs with
/// non-Gaussian innovations are informational only.
DiagnosticsReport cylinder_equivalence_test(const ExpansionBasis& a, const ExpansionBasis& b,
                                            const PointMatrix& points, std::size_t M,
                                            const InnovationSpec& spec,
                                            const CylinderOptions& options = {});

/// For each pair (x, y): |K_A(x,y) - K_B(x,y)| <= sqrt(rA(x) rA(y)) + sqrt(rB(x) rB(y)) + 1e-8,
/// with K the truncated reconstructions and r the residual variances.
DiagnosticsReport w_independence_check(const ExpansionBasis& a, std::size_t truncation_a,
                                       const ExpansionBasis& b, std::size_t truncation_b,
                                       const std::vector<std::pair<Point, Point>>& pairs);

/// E(R(x+h) - R(x))^2 = C(x+h,x+h) + C(x,x) - 2 C(x+h,x) with h along the
/// first axis; zero at h = 0.
double mean_square_increment(const KernelSpec& spec, PointRef x, double h);

/// Mean-square increments along a decreasing step sequence: checks they
/// decrease, estimates the decay order from the two smallest steps and
/// compares it with min(2 s, 2) - 0.1, s the kernel smoothness.
DiagnosticsReport continuity_probe(const KernelSpec& spec, PointRef x,
                                   const std::vector<double>& h_seq);

}  // namespace kpath

#endif  // KPATH_DIAGNOSTICS_HPP_
