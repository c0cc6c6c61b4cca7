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

#include "kpath/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "kpath/errors.hpp"
#include "kpath/mercer.hpp"

namespace kpath {

namespace {

const char* symbol(Comparison c) {
  switch (c) {
    case Comparison::LessEqual:
      return "<=";
    case Comparison::GreaterEqual:
      return ">=";
    case Comparison::Less:
      return "<";
    case Comparison::Greater:
      return ">";
  }
  return "?";
}

bool holds(double measured, Comparison c, double threshold) {
  switch (c) {
    case Comparison::LessEqual:
      return measured <= threshold;
    case Comparison::GreaterEqual:
      return measured >= threshold;
    case Comparison::Less:
      return measured < threshold;
    case Comparison::Greater:
      return measured > threshold;
  }
  return false;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << std::scientific << v;
  return os.str();
}

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index j) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, j);
  return out;
}

struct Moments {
  double variance;  // unbiased sample variance
  double variance_se;
};

// Sample variance and its standard error sqrt((m4 - m2^2) / M).
Moments sample_variance(const Eigen::VectorXd& v) {
  const double n = static_cast<double>(v.size());
  const double mean = v.mean();
  const Eigen::ArrayXd c = v.array() - mean;
  const double m2 = c.square().sum() / n;
  const double m4 = c.square().square().sum() / n;
  return {m2 * n / (n - 1.0), std::sqrt(std::max(m4 - m2 * m2, 0.0) / n)};
}

}  // namespace

Check& DiagnosticsReport::add(std::string name, double measured, Comparison cmp,
                              double threshold, std::string details, bool informational) {
  Check c;
  c.name = std::move(name);
  c.measured = measured;
  c.threshold = threshold;
  c.comparison = cmp;
  c.passed = holds(measured, cmp, threshold);
  c.informational = informational;
  c.details = std::move(details);
  checks.push_back(std::move(c));
  return checks.back();
}

bool DiagnosticsReport::all_passed() const { return failures() == 0; }

std::size_t DiagnosticsReport::failures() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const Check& c) {
    return !c.informational && !c.passed;
  }));
}

void DiagnosticsReport::append(const DiagnosticsReport& other) {
  for (const auto& c : other.checks) {
    Check copy = c;
    if (!other.title.empty()) copy.name = other.title + "/" + c.name;
    checks.push_back(std::move(copy));
  }
  for (const auto& [k, v] : other.metadata) metadata[other.title + "." + k] = v;
  runtime_seconds += other.runtime_seconds;
  if (!innovations && other.innovations) innovations = other.innovations;
}

std::string DiagnosticsReport::to_text() const {
  std::ostringstream os;
  os << "== " << (title.empty() ? "diagnostics" : title) << " ==\n";
  if (innovations)
    os << "innovations: " << to_string(innovations->dist) << " seed=" << innovations->seed
       << " stream=" << innovations->stream << "\n";
  for (const auto& [k, v] : metadata) os << k << ": " << v << "\n";
  std::size_t width = 4;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  for (const auto& c : checks) {
    const char* status = c.informational ? "INFO" : (c.passed ? "PASS" : "FAIL");
    os << std::left << std::setw(5) << status << std::setw(static_cast<int>(width) + 2) << c.name
       << fmt(c.measured) << ' ' << std::setw(2) << symbol(c.comparison) << ' '
       << fmt(c.threshold);
    if (!c.details.empty()) os << "  " << c.details;
    os << "\n";
  }
  os << (all_passed() ? "ALL PASSED" : std::to_string(failures()) + " FAILED") << " ("
     << checks.size() << " checks, " << std::fixed << std::setprecision(2) << runtime_seconds
     << " s)\n";
  return os.str();
}

nlohmann::ordered_json DiagnosticsReport::to_json() const {
  nlohmann::ordered_json j;
  j["title"] = title;
  j["passed"] = all_passed();
  j["failures"] = failures();
  j["runtime_seconds"] = runtime_seconds;
  if (innovations) {
    j["innovations"] = {{"dist", to_string(innovations->dist)},
                        {"seed", innovations->seed},
                        {"stream", innovations->stream}};
  }
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : metadata) j["metadata"][k] = v;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name},
                           {"measured", c.measured},
                           {"comparison", symbol(c.comparison)},
                           {"threshold", c.threshold},
                           {"passed", c.passed},
                           {"informational", c.informational},
                           {"details", c.details}});
  }
  return j;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ks_critical_value: alpha must be in (0,1)");
  return std::sqrt(-0.5 * std::log(alpha / 2.0));
}

DiagnosticsReport parseval_check(const ExpansionBasis& basis, const PointMatrix& xs,
                                 std::size_t N) {
  const std::size_t n = N == ExpansionBasis::npos ? basis.size() : N;
  if (n > basis.size()) throw DomainError("parseval_check: truncation exceeds basis size");
  DiagnosticsReport r;
  r.title = "parseval";
  r.metadata["basis"] = to_string(basis.kind());
  r.metadata["truncation"] = std::to_string(n);
  r.metadata["points"] = std::to_string(xs.rows());

  double min_defect = std::numeric_limits<double>::infinity();
  double excess = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const double c = basis.covariance().diagonal(xs.row(i));
    const double s = n == 0 ? 0.0 : basis.eval_all(xs.row(i), n).squaredNorm();
    const double defect = c - s;
    min_defect = std::min(min_defect, defect);
    excess = std::max(excess, defect - c);
  }
  if (xs.rows() > 0) {
    r.add("min defect", min_defect, Comparison::GreaterEqual, -1e-10,
          "C(x,x) - sum w_n(x)^2 is nonnegative");
    r.add("defect above C(x,x)", excess, Comparison::LessEqual, 0.0);
  }
  if (basis.kind() == BasisKind::Newton && n == basis.size() && n > 0) {
    double node_defect = 0.0;
    for (std::size_t j = 0; j < basis.nodes().size(); ++j) {
      const auto x = basis.nodes().point(j);
      const double d = basis.covariance().diagonal(x) - basis.eval_all(x, n).squaredNorm();
      node_defect = std::max(node_defect, std::abs(d));
    }
    r.add("node defect", node_defect, Comparison::LessEqual, 1e-10, "full Newton basis");
  }
  return r;
}

DiagnosticsReport native_norm_growth(const InnovationSpec& spec, std::size_t N) {
  if (N < 100) throw DomainError("native_norm_growth: need N >= 100");
  DiagnosticsReport r;
  r.title = "native norm growth";
  r.innovations = spec;
  const Eigen::VectorXd s = draw_innovations(spec, N);
  double q = 0.0;
  std::size_t decreases = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double next = q + s[i] * s[i];
    if (next < q) ++decreases;
    q = next;
  }
  const double n = static_cast<double>(N);
  const double band = 5.0 * std::sqrt(square_variance(spec.dist) / n);
  r.metadata["N"] = std::to_string(N);
  r.metadata["Q_N"] = fmt(q);
  r.add("|Q_N/N - 1|", std::abs(q / n - 1.0), Comparison::LessEqual, band,
        "Q_N/N = " + fmt(q / n));
  r.add("Q_N decreases", static_cast<double>(decreases), Comparison::LessEqual, 0.0);
  return r;
}

std::string to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::Converges:
      return "converges";
    case SeriesVerdict::Diverges:
      return "diverges";
    case SeriesVerdict::Indeterminate:
      return "indeterminate";
  }
  return "unknown";
}

MembershipResult sobolev_membership_series(const SobolevScaleSpec& scale, std::size_t N_max) {
  if (N_max < 1000) throw DomainError("sobolev_membership_series: need N_max >= 1000");
  if (scale.d < 1) throw DomainError("sobolev_membership_series: dimension must be positive");
  if (!(scale.p >= 0.0)) throw DomainError("sobolev_membership_series: need p >= 0");

  MembershipResult out;
  out.m_used = scale.m;
  if (scale.measured_lambdas)
    out.m_used = eig_decay_fit(*scale.measured_lambdas, scale.d, scale.fit_first, scale.fit_last);
  else if (!(scale.m > scale.d / 2.0))
    throw DomainError("sobolev_membership_series: need m > d/2");

  const double d = scale.d;
  out.exponent = 2.0 * (out.m_used - scale.p) / d;

  auto term = [&](std::size_t n) {
    const double x = static_cast<double>(n);
    return std::pow(x, -2.0 * out.m_used / d) / std::pow(x, -2.0 * scale.p / d);
  };
  const std::size_t q1 = N_max / 4, q2 = N_max / 2;
  double head = 0.0, inc1 = 0.0, inc2 = 0.0;
  for (std::size_t n = 1; n <= q1; ++n) head += term(n);
  for (std::size_t n = q1 + 1; n <= q2; ++n) inc1 += term(n);
  for (std::size_t n = q2 + 1; n <= 2 * q2; ++n) inc2 += term(n);
  double tail = 0.0;
  for (std::size_t n = 2 * q2 + 1; n <= N_max; ++n) tail += term(n);
  out.partial_sum = head + inc1 + inc2 + tail;
  // Doubling the range scales the increment of a p-series by 2^{1-e}.
  out.empirical_exponent = 1.0 - std::log2(inc2 / inc1);

  if (scale.measured_lambdas && std::abs(out.exponent - 1.0) <= 0.05)
    out.verdict = SeriesVerdict::Indeterminate;
  else
    out.verdict = out.exponent > 1.0 + 1e-12 ? SeriesVerdict::Converges : SeriesVerdict::Diverges;
  return out;
}

DiagnosticsReport cylinder_equivalence_test(const ExpansionBasis& a, const ExpansionBasis& b,
                                            const PointMatrix& points, std::size_t M,
                                            const InnovationSpec& spec,
                                            const CylinderOptions& options) {
  if (M < 2) throw DomainError("cylinder_equivalence_test: need M >= 2");
  if (a.covariance().spec() != b.covariance().spec())
    throw DomainError("cylinder_equivalence_test: bases come from different kernels");
  const std::size_t na = options.truncation_a == ExpansionBasis::npos ? a.size() : options.truncation_a;
  const std::size_t nb = options.truncation_b == ExpansionBasis::npos ? b.size() : options.truncation_b;
  const bool info = spec.dist != InnovationDist::Gaussian;

  DiagnosticsReport r;
  r.title = "cylinder equivalence";
  r.innovations = spec;
  r.metadata["M"] = std::to_string(M);
  r.metadata["basis A"] = to_string(a.kind()) + " N=" + std::to_string(na);
  r.metadata["basis B"] = to_string(b.kind()) + " N=" + std::to_string(nb);
  if (info) r.metadata["note"] = "non-Gaussian innovations: equivalence is reported, not asserted";

  const Eigen::MatrixXd va = a.values(points, na);
  const Eigen::MatrixXd vb = b.values(points, nb);
  const Eigen::MatrixXd ea = path_ensemble(va, na, spec, M);
  const Eigen::MatrixXd eb = path_ensemble(vb, nb, spec.with_stream(spec.stream + M), M);

  const Eigen::Index p = points.rows();
  const std::size_t tests = static_cast<std::size_t>(p + std::max<Eigen::Index>(p - 1, 0));
  const double alpha_each = options.alpha / static_cast<double>(std::max<std::size_t>(tests, 1));
  const double m = static_cast<double>(M);
  const double crit = ks_critical_value(alpha_each) * std::sqrt(2.0 / m);
  r.metadata["ks alpha per test"] = fmt(alpha_each);

  for (Eigen::Index i = 0; i < p; ++i) {
    const double ks = ks_statistic(column(ea, i), column(eb, i));
    r.add("KS R(x_" + std::to_string(i) + ")", ks, Comparison::Less, crit, {}, info);
  }
  for (Eigen::Index i = 0; i + 1 < p; ++i) {
    const Eigen::MatrixXd da = ea.col(i + 1) - ea.col(i);
    const Eigen::MatrixXd db = eb.col(i + 1) - eb.col(i);
    const double ks = ks_statistic(column(da, 0), column(db, 0));
    r.add("KS R(x_" + std::to_string(i + 1) + ")-R(x_" + std::to_string(i) + ")", ks,
          Comparison::Less, crit, {}, info);
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    for (int which = 0; which < 2; ++which) {
      const Eigen::MatrixXd& e = which == 0 ? ea : eb;
      const Eigen::MatrixXd& v = which == 0 ? va : vb;
      const auto mom = sample_variance(e.col(i));
      const double expected = v.row(i).squaredNorm();
      const double z = std::abs(mom.variance - expected) / mom.variance_se;
      r.add(std::string("Var ") + (which == 0 ? "A" : "B") + "(x_" + std::to_string(i) + ") [SE]",
            z, Comparison::LessEqual, 5.0,
            "empirical " + fmt(mom.variance) + " vs sum w^2 " + fmt(expected));
    }
  }
  return r;
}

DiagnosticsReport w_independence_check(const ExpansionBasis& a, std::size_t truncation_a,
                                       const ExpansionBasis& b, std::size_t truncation_b,
                                       const std::vector<std::pair<Point, Point>>& pairs) {
  if (a.covariance().spec() != b.covariance().spec())
    throw DomainError("w_independence_check: bases come from different kernels");
  DiagnosticsReport r;
  r.title = "expansion independence";
  r.metadata["basis A"] = to_string(a.kind()) + " N=" + std::to_string(truncation_a);
  r.metadata["basis B"] = to_string(b.kind()) + " N=" + std::to_string(truncation_b);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& [x, y] = pairs[k];
    const double ka = truncated_kernel(a, truncation_a, x, y);
    const double kb = truncated_kernel(b, truncation_b, x, y);
    const double ra = std::sqrt(std::max(residual_variance(a, truncation_a, x), 0.0) *
                                std::max(residual_variance(a, truncation_a, y), 0.0));
    const double rb = std::sqrt(std::max(residual_variance(b, truncation_b, x), 0.0) *
                                std::max(residual_variance(b, truncation_b, y), 0.0));
    r.add("pair " + std::to_string(k), std::abs(ka - kb), Comparison::LessEqual, ra + rb + 1e-8,
          "K_A=" + fmt(ka) + " K_B=" + fmt(kb));
  }
  return r;
}

double mean_square_increment(const KernelSpec& spec, PointRef x, double h) {
  Point xh = x;
  xh[0] += h;
  const Covariance cov(spec);
  return cov(xh, xh) + cov(x, x) - 2.0 * cov(xh, x);
}

DiagnosticsReport continuity_probe(const KernelSpec& spec, PointRef x,
                                   const std::vector<double>& h_seq) {
  if (h_seq.size() < 2) throw DomainError("continuity_probe: need at least two steps");
  for (std::size_t k = 0; k < h_seq.size(); ++k) {
    if (!(h_seq[k] > 0.0) || (k > 0 && !(h_seq[k] < h_seq[k - 1])))
      throw DomainError("continuity_probe: steps must be positive and decreasing");
  }
  DiagnosticsReport r;
  r.title = "continuity";
  r.metadata["kernel"] = to_string(spec.family);
  std::vector<double> e;
  for (double h : h_seq) e.push_back(mean_square_increment(spec, x, h));
  std::size_t increases = 0;
  for (std::size_t k = 1; k < e.size(); ++k) {
    if (!(e[k] < e[k - 1])) ++increases;
  }
  const std::size_t last = e.size() - 1;
  const double order =
      std::log(e[last - 1] / e[last]) / std::log(h_seq[last - 1] / h_seq[last]);
  const double expected = std::min(2.0 * spec.smoothness(), 2.0);
  r.metadata["E(h_min)"] = fmt(e[last]);
  r.add("non-decreasing steps", static_cast<double>(increases), Comparison::LessEqual, 0.0);
  r.add("E at h=0", mean_square_increment(spec, x, 0.0), Comparison::LessEqual, 0.0);
  r.add("decay order", order, Comparison::GreaterEqual, expected - 0.1,
        "expected min(2s, 2) = " + fmt(expected));
  return r;
}

}  // namespace kpath
