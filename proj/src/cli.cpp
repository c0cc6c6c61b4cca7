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

#include "kpath/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "kpath/basis_io.hpp"
#include "kpath/errors.hpp"
#include "kpath/mercer.hpp"

namespace kpath {
namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

NodeSet candidate_set(const RunConfig& cfg) {
  if (cfg.candidate_points) return NodeSet(*cfg.candidate_points, cfg.domain);
  return uniform_grid(cfg.domain, cfg.candidate_resolution);
}

std::vector<std::string> coordinate_header(int dim) {
  std::vector<std::string> h;
  for (int k = 0; k < dim; ++k) h.push_back("x" + std::to_string(k));
  return h;
}

GreedyResult run_greedy(const RunConfig& cfg) {
  const NodeSet candidates = candidate_set(cfg);
  if (cfg.basis_size > candidates.size())
    throw ConfigError("expansion.size exceeds the number of candidates");
  return p_greedy_select(Covariance(cfg.kernel), candidates, {cfg.basis_size, cfg.greedy_tol});
}

ExpansionBasis build_kl(const RunConfig& cfg) {
  const Quadrature q = make_quadrature(cfg.domain, cfg.quadrature_resolution, cfg.quadrature);
  if (cfg.basis_size > q.size()) throw ConfigError("expansion.size exceeds the quadrature grid");
  const Covariance cov(cfg.kernel);
  return kl_basis(nystrom_eigs(cov, q, cfg.basis_size), cov);
}

ExpansionBasis build_newton(const RunConfig& cfg) {
  return newton_basis(Covariance(cfg.kernel), run_greedy(cfg).nodes);
}

std::string now_seconds(std::chrono::steady_clock::time_point start) {
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << s;
  return os.str();
}

std::vector<double> default_probes(double m) {
  std::vector<double> probes;
  for (int k = 0; k <= static_cast<int>(std::floor(m * 10.0 + 1e-9)); ++k) probes.push_back(k / 10.0);
  return probes;
}

DiagnosticsReport gap_suite(const RunConfig& cfg) {
  DiagnosticsReport r;
  r.title = "gap";
  const auto probes = cfg.gap_probes.empty() ? default_probes(cfg.gap_m) : cfg.gap_probes;
  const double boundary = cfg.gap_m - cfg.gap_d / 2.0;
  r.metadata["m"] = std::to_string(cfg.gap_m);
  r.metadata["d"] = std::to_string(cfg.gap_d);
  r.metadata["boundary p = m - d/2"] = std::to_string(boundary);
  for (double p : probes) {
    SobolevScaleSpec scale;
    scale.m = cfg.gap_m;
    scale.d = cfg.gap_d;
    scale.p = p;
    const auto res = sobolev_membership_series(scale, cfg.gap_terms);
    std::ostringstream name;
    name << "p=" << p << " " << to_string(res.verdict);
    const bool expect_converge = p < boundary;
    r.add(name.str(), res.exponent, expect_converge ? Comparison::Greater : Comparison::LessEqual,
          1.0, "series exponent 2(m-p)/d");
    std::ostringstream e;
    e << "p=" << p << " partial-sum exponent";
    r.add(e.str(), std::abs(res.empirical_exponent - res.exponent), Comparison::LessEqual, 0.02,
          "empirical " + std::to_string(res.empirical_exponent));
  }
  return r;
}

DiagnosticsReport default_suite(const RunConfig& cfg) {
  DiagnosticsReport r;
  r.title = "default";
  r.innovations = cfg.innovations;
  const Covariance cov(cfg.kernel);
  const ExpansionBasis newton = build_newton(cfg);
  const ExpansionBasis kl = build_kl(cfg);
  const NodeSet grid = uniform_grid(cfg.domain, cfg.grid_resolution);
  r.metadata["kernel"] = kernel_to_json(cfg.kernel).dump();
  r.metadata["newton size"] = std::to_string(newton.size());
  r.metadata["kl size"] = std::to_string(kl.size());

  r.append(parseval_check(newton, grid.points()));
  auto kl_parseval = parseval_check(kl, grid.points());
  kl_parseval.title = "parseval kl";
  r.append(kl_parseval);

  // Residual variance never increases with the truncation.
  {
    const Eigen::MatrixXd w = newton.values(grid.points());
    double worst = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      double prev = cov.diagonal(grid.point(static_cast<std::size_t>(i)));
      double acc = 0.0;
      for (Eigen::Index n = 0; n < w.cols(); ++n) {
        acc += w(i, n) * w(i, n);
        const double cur = cov.diagonal(grid.point(static_cast<std::size_t>(i))) - acc;
        worst = std::max(worst, cur - prev);
        prev = cur;
      }
    }
    r.add("residual monotone in N", worst, Comparison::LessEqual, 1e-12);
  }

  {
    std::vector<std::pair<Point, Point>> pairs;
    const auto g = static_cast<std::size_t>(grid.size());
    for (std::size_t k = 0; k < 5; ++k) {
      const std::size_t i = (k * 7 + 3) * g / 41 % g;
      const std::size_t j = (k * 13 + 11) * g / 53 % g;
      pairs.emplace_back(grid.point(i), grid.point(j));
    }
    pairs.emplace_back(newton.nodes().point(0), newton.nodes().point(0));
    r.append(w_independence_check(newton, newton.size(), kl, kl.size(), pairs));
  }

  const Point centre = 0.5 * (cfg.domain.lower + cfg.domain.upper);
  {
    std::vector<double> steps;
    for (int k = 0; k <= 12; ++k) steps.push_back(0.1 * std::ldexp(1.0, -k));
    r.append(continuity_probe(cfg.kernel, centre, steps));
  }

  if (cfg.kernel.smoothness() > 1.0) {
    std::vector<int> order(static_cast<std::size_t>(cfg.kernel.dim), 0);
    order[0] = 1;
    const double v = twin_derivative_variance(cfg.kernel, order, centre);
    if (cfg.kernel.family == KernelFamily::Matern) {
      const double exact =
          cfg.kernel.variance / (2.0 * cfg.kernel.alpha * cfg.kernel.alpha * (cfg.kernel.nu - 1.0));
      r.add("derivative variance rel. error", std::abs(v - exact) / exact, Comparison::LessEqual,
            1e-5, "1/(2 alpha^2 (nu-1)) = " + std::to_string(exact));
    } else {
      r.add("derivative variance", v, Comparison::GreaterEqual, 0.0);
    }
  }

  r.append(native_norm_growth(cfg.innovations, 10000));

  {
    PointMatrix pts(5, cfg.kernel.dim);
    for (Eigen::Index k = 0; k < 5; ++k)
      pts.row(k) = cfg.domain.lower + (0.1 + 0.2 * static_cast<double>(k)) * (cfg.domain.upper - cfg.domain.lower);
    r.append(cylinder_equivalence_test(newton, kl, pts, cfg.verify_paths, cfg.innovations));
  }
  return r;
}

DiagnosticsReport basis_suite(const RunConfig& cfg) {
  DiagnosticsReport r;
  r.title = "basis";
  if (!cfg.basis_file) throw ConfigError("suite 'basis' needs a basis file (--basis)");
  try {
    const ExpansionBasis b = import_basis(*cfg.basis_file);
    r.add("basis integrity", 0.0, Comparison::LessEqual, 0.0, "sha256 " + file_sha256(*cfg.basis_file));
    const Box& box = b.kind() == BasisKind::Newton ? b.nodes().box() : b.box();
    r.append(parseval_check(b, uniform_grid(box, cfg.grid_resolution).points()));
  } catch (const IntegrityError& e) {
    r.add("basis integrity", 1.0, Comparison::LessEqual, 0.0, e.what());
  }
  return r;
}

void write_report(const RunConfig& cfg, const DiagnosticsReport& report, const std::string& stem) {
  write_text(cfg.out_dir / (stem + ".txt"), report.to_text());
  write_text(cfg.out_dir / (stem + ".json"), report.to_json().dump(2) + "\n");
}

}  // namespace

ExpansionBasis obtain_basis(const RunConfig& cfg) {
  if (cfg.basis_file) return import_basis(*cfg.basis_file);
  return cfg.kind == BasisKind::Newton ? build_newton(cfg) : build_kl(cfg);
}

int cmd_greedy(const RunConfig& cfg, std::ostream& log) {
  const GreedyResult res = run_greedy(cfg);
  write_text(cfg.out_dir / "nodes.csv",
             matrix_to_csv(res.nodes.points(), coordinate_header(cfg.kernel.dim)));
  Eigen::MatrixXd table(static_cast<Eigen::Index>(res.sup_residual.size()), 2);
  for (std::size_t n = 0; n < res.sup_residual.size(); ++n) {
    table(static_cast<Eigen::Index>(n), 0) = static_cast<double>(n);
    table(static_cast<Eigen::Index>(n), 1) = res.sup_residual[n];
  }
  write_text(cfg.out_dir / "greedy_residuals.csv", matrix_to_csv(table, {"n", "sup_residual"}));
  log << "selected " << res.nodes.size() << " nodes; sup residual " << res.sup_residual.front()
      << " -> " << res.sup_residual.back() << "\n";
  return kExitOk;
}

int cmd_basis(const RunConfig& cfg, std::ostream& log) {
  const ExpansionBasis basis = obtain_basis(cfg);
  const auto bytes = serialize_basis(basis);
  const fs::path path = cfg.out_dir / "basis.bin";
  write_file(path, bytes);
  nlohmann::ordered_json side;
  side["file"] = "basis.bin";
  side["format_version"] = kBasisFormatVersion;
  side["kind"] = to_string(basis.kind());
  side["size"] = basis.size();
  side["kernel"] = kernel_to_json(cfg.kernel);
  side["sha256"] = sha256_hex(bytes);
  write_text(cfg.out_dir / "basis.json", side.dump(2) + "\n");
  log << "wrote " << to_string(basis.kind()) << " basis of size " << basis.size() << " to "
      << path.string() << " (sha256 " << side["sha256"].get<std::string>() << ")\n";
  return kExitOk;
}

int cmd_sample(const RunConfig& cfg, std::ostream& log) {
  const auto basis = std::make_shared<const ExpansionBasis>(obtain_basis(cfg));
  const std::size_t n = cfg.truncation.value_or(basis->size());
  if (n > basis->size())
    throw ConfigError("truncation " + std::to_string(n) + " exceeds basis size " +
                      std::to_string(basis->size()));
  const Box& box = basis->kind() == BasisKind::Newton ? basis->nodes().box() : basis->box();
  const NodeSet grid = uniform_grid(box, cfg.grid_resolution);

  Eigen::MatrixXd ensemble;
  if (cfg.zero_innovations) {
    ensemble.resize(static_cast<Eigen::Index>(cfg.paths), grid.points().rows());
    for (std::size_t m = 0; m < cfg.paths; ++m) {
      const PathSample path(basis, n, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)),
                            cfg.innovations.with_stream(cfg.innovations.stream + m));
      const auto row = eval_path(path, grid.points());
      for (std::size_t i = 0; i < row.size(); ++i)
        ensemble(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)) = row[i];
    }
  } else {
    ensemble = path_ensemble(*basis, n, cfg.innovations, cfg.paths, grid.points());
  }

  std::vector<std::uint8_t> payload;
  std::string file;
  if (cfg.format == OutputFormat::Bin) {
    payload = matrix_to_bytes(ensemble);
    file = "ensemble.bin";
  } else {
    const std::string csv = matrix_to_csv(ensemble);
    payload.assign(csv.begin(), csv.end());
    file = "ensemble.csv";
  }
  write_file(cfg.out_dir / file, payload);

  const Eigen::VectorXd cert = residual_variances(*basis, n, grid.points());
  Eigen::MatrixXd cert_table(grid.points().rows(), basis->dim() + 1);
  cert_table.leftCols(basis->dim()) = grid.points();
  cert_table.col(basis->dim()) = cert;
  auto header = coordinate_header(basis->dim());
  header.push_back("residual_variance");
  write_text(cfg.out_dir / "certificate.csv", matrix_to_csv(cert_table, header));

  nlohmann::ordered_json side;
  side["format_version"] = 1;
  side["file"] = file;
  side["format"] = cfg.format == OutputFormat::Bin ? "f64le-row-major" : "csv";
  side["shape"] = {ensemble.rows(), ensemble.cols()};
  side["sha256"] = sha256_hex(payload);
  side["kernel"] = kernel_to_json(basis->covariance().spec().value());
  side["basis"] = {{"kind", to_string(basis->kind())},
                   {"size", basis->size()},
                   {"sha256", sha256_hex(serialize_basis(*basis))}};
  side["innovations"] = {{"dist", to_string(cfg.innovations.dist)},
                         {"seed", cfg.innovations.seed},
                         {"stream_first", cfg.innovations.stream},
                         {"stream_last", cfg.innovations.stream + cfg.paths - 1},
                         {"zero_injected", cfg.zero_innovations}};
  side["truncation"] = n;
  side["paths"] = cfg.paths;
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < grid.points().rows(); ++i) {
    nlohmann::ordered_json p = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < grid.points().cols(); ++k) p.push_back(grid.points()(i, k));
    pts.push_back(std::move(p));
  }
  side["grid"] = std::move(pts);
  write_text(cfg.out_dir / "ensemble.json", side.dump(2) + "\n");

  log << "wrote " << cfg.paths << " paths x " << grid.size() << " points (N=" << n << ") to "
      << (cfg.out_dir / file).string() << "; max certificate " << cert.maxCoeff() << "\n";
  return kExitOk;
}

DiagnosticsReport run_suite(const RunConfig& cfg, const std::string& suite) {
  const auto start = std::chrono::steady_clock::now();
  DiagnosticsReport r;
  if (suite == "default") {
    r = default_suite(cfg);
  } else if (suite == "gap") {
    r = gap_suite(cfg);
  } else if (suite == "basis") {
    r = basis_suite(cfg);
  } else if (suite == "all") {
    r.title = "all";
    r.innovations = cfg.innovations;
    r.append(default_suite(cfg));
    r.append(gap_suite(cfg));
  } else {
    throw ConfigError("unknown suite '" + suite + "' (default, gap, basis, all)");
  }
  r.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.metadata["runtime_s"] = now_seconds(start);
  return r;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  const DiagnosticsReport r = run_suite(cfg, cfg.suite);
  write_report(cfg, r, "report");
  log << r.to_text();
  return r.all_passed() ? kExitOk : kExitCheckFailed;
}

int cmd_gap(const RunConfig& cfg, std::ostream& log) {
  const auto probes = cfg.gap_probes.empty() ? default_probes(cfg.gap_m) : cfg.gap_probes;
  std::ostringstream csv;
  csv << std::setprecision(17) << "p,exponent,empirical_exponent,verdict\n";
  log << "m=" << cfg.gap_m << " d=" << cfg.gap_d << " boundary p=" << cfg.gap_m - cfg.gap_d / 2.0
      << "\n";
  for (double p : probes) {
    SobolevScaleSpec scale;
    scale.m = cfg.gap_m;
    scale.d = cfg.gap_d;
    scale.p = p;
    const auto res = sobolev_membership_series(scale, cfg.gap_terms);
    csv << p << "," << res.exponent << "," << res.empirical_exponent << ","
        << to_string(res.verdict) << "\n";
    log << "p=" << p << ": " << to_string(res.verdict) << " (exponent " << res.exponent << ")\n";
  }
  write_text(cfg.out_dir / "gap.csv", csv.str());
  return kExitOk;
}

int cmd_mercer(const RunConfig& cfg, std::ostream& log) {
  const Quadrature q = make_quadrature(cfg.domain, cfg.quadrature_resolution, cfg.quadrature);
  if (cfg.basis_size > q.size()) throw ConfigError("expansion.size exceeds the quadrature grid");
  const EigenSystem eigs = nystrom_eigs(Covariance(cfg.kernel), q, cfg.basis_size);
  Eigen::MatrixXd table(eigs.lambdas.size(), 2);
  for (Eigen::Index n = 0; n < eigs.lambdas.size(); ++n) {
    table(n, 0) = static_cast<double>(n + 1);
    table(n, 1) = eigs.lambdas[n];
  }
  write_text(cfg.out_dir / "eigenvalues.csv", matrix_to_csv(table, {"n", "lambda"}));
  nlohmann::ordered_json out;
  out["kernel"] = kernel_to_json(cfg.kernel);
  out["eigenpairs"] = eigs.size();
  out["trace"] = eigs.lambdas.sum();
  if (cfg.fit_last <= eigs.size()) {
    const double m_hat = eig_decay_fit(eigs.lambdas, cfg.kernel.dim, cfg.fit_first, cfg.fit_last);
    out["fit_range"] = {cfg.fit_first, cfg.fit_last};
    out["m_hat"] = m_hat;
    log << "fitted smoothness m = " << m_hat;
    if (cfg.kernel.family == KernelFamily::Matern) {
      out["m_expected"] = cfg.kernel.nu + cfg.kernel.dim / 2.0;
      log << " (nu + d/2 = " << cfg.kernel.nu + cfg.kernel.dim / 2.0 << ")";
    }
    log << "\n";
  } else {
    log << "only " << eigs.size() << " eigenpairs above threshold; no decay fit\n";
  }
  write_text(cfg.out_dir / "mercer.json", out.dump(2) + "\n");
  return kExitOk;
}

int run_command(const std::string& name, const RunConfig& cfg, std::ostream& log,
                std::ostream& err) {
  try {
    if (name == "greedy") return cmd_greedy(cfg, log);
    if (name == "basis") return cmd_basis(cfg, log);
    if (name == "sample") return cmd_sample(cfg, log);
    if (name == "verify") return cmd_verify(cfg, log);
    if (name == "gap") return cmd_gap(cfg, log);
    if (name == "mercer") return cmd_mercer(cfg, log);
    err << "unknown command '" << name << "'\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

namespace {

nlohmann::json default_config_doc() {
  return {{"schema_version", kConfigSchemaVersion},
          {"kernel", {{"family", "matern"}, {"nu", 2.5}, {"alpha", 0.2}}},
          {"domain", {{"lower", {0.0}}, {"upper", {1.0}}}}};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random-field paths from orthonormal kernel expansions"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir, format, suite, basis_path;
  bool zero = false;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"greedy", "select nodes by P-greedy and write the residual decay table"},
      {"basis", "build and export a Newton or KL basis"},
      {"sample", "write a path ensemble and its truncation-variance certificate"},
      {"verify", "run a diagnostics suite; exit status reflects pass/fail"},
      {"gap", "classify Sobolev-scale membership of expansion paths"},
      {"mercer", "Nystrom eigenvalues and decay-exponent fit"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--seed", seed, "innovation seed (overrides config)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--format", format, "ensemble format: csv or bin")
        ->check(CLI::IsMember({"csv", "bin"}));
    sub->add_option("--suite", suite, "verify suite: default, gap, basis, all");
    sub->add_option("--basis", basis_path, "existing basis file");
    sub->add_flag("--zero-innovations", zero, "inject all-zero innovations (testing)");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  RunConfig cfg;
  try {
    cfg = config_path.empty() ? parse_config(default_config_doc()) : load_config(config_path);
    if (seed) cfg.innovations.seed = *seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!format.empty()) cfg.format = output_format_from_string(format);
    if (!suite.empty()) cfg.suite = suite;
    if (!basis_path.empty()) cfg.basis_file = basis_path;
    if (zero) cfg.zero_innovations = true;
    validate_config(cfg);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  return run_command(command, cfg, out, err);
}

}  // namespace kpath
