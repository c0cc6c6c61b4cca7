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

#include "kpath/config.hpp"

#include <fstream>
#include <set>

#include "kpath/basis_io.hpp"
#include "kpath/errors.hpp"

namespace kpath {

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "bin") return OutputFormat::Bin;
  throw ConfigError("unknown output format '" + name + "' (expected csv or bin)");
}

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

Point point_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ConfigError(what + ": expected a nonempty array");
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) p[static_cast<Eigen::Index>(k)] = j[k].get<double>();
  return p;
}

std::size_t positive_count(const json& j, const char* key, std::size_t fallback,
                           const std::string& where) {
  if (!j.contains(key)) return fallback;
  const auto v = j.at(key).get<long long>();
  if (v < 1) throw ConfigError(where + "." + key + " must be positive");
  return static_cast<std::size_t>(v);
}

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown(doc,
                 {"schema_version", "kernel", "domain", "candidates", "expansion", "innovations",
                  "ensemble", "basis_file", "output", "verify", "gap", "mercer"},
                 "config");
  RunConfig cfg;
  try {
    const int version = doc.value("schema_version", -1);
    if (version != kConfigSchemaVersion)
      throw ConfigError("config: schema_version must be " + std::to_string(kConfigSchemaVersion));

    if (!doc.contains("kernel")) throw ConfigError("config: missing 'kernel'");
    json kernel = doc.at("kernel");
    if (doc.contains("domain") && !kernel.contains("dim"))
      kernel["dim"] = doc.at("domain").at("lower").size();
    cfg.kernel = kernel_from_json(kernel);

    if (doc.contains("domain")) {
      const auto& d = doc.at("domain");
      reject_unknown(d, {"lower", "upper"}, "domain");
      try {
        cfg.domain = Box(point_from_json(d.at("lower"), "domain.lower"),
                         point_from_json(d.at("upper"), "domain.upper"));
      } catch (const DomainError& e) {
        throw ConfigError(e.what());
      }
    } else {
      cfg.domain = Box::unit(cfg.kernel.dim);
    }
    if (cfg.domain.dim() != cfg.kernel.dim)
      throw ConfigError("config: domain dimension differs from kernel dim");

    if (doc.contains("candidates")) {
      const auto& c = doc.at("candidates");
      reject_unknown(c, {"resolution", "points"}, "candidates");
      cfg.candidate_resolution =
          static_cast<int>(positive_count(c, "resolution", 101, "candidates"));
      if (c.contains("points")) {
        const auto& pts = c.at("points");
        if (!pts.is_array() || pts.empty()) throw ConfigError("candidates.points: expected points");
        PointMatrix m(static_cast<Eigen::Index>(pts.size()), cfg.kernel.dim);
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const Point p = point_from_json(pts[i], "candidates.points");
          if (p.size() != cfg.kernel.dim) throw ConfigError("candidates.points: wrong dimension");
          m.row(static_cast<Eigen::Index>(i)) = p;
        }
        cfg.candidate_points = std::move(m);
      }
    }

    if (doc.contains("expansion")) {
      const auto& e = doc.at("expansion");
      reject_unknown(e, {"kind", "size", "truncation", "tol", "quadrature", "quadrature_resolution"},
                     "expansion");
      if (e.contains("kind")) cfg.kind = basis_kind_from_string(e.at("kind").get<std::string>());
      cfg.basis_size = positive_count(e, "size", cfg.basis_size, "expansion");
      if (e.contains("truncation")) {
        const auto t = e.at("truncation").get<long long>();
        if (t < 0) throw ConfigError("expansion.truncation must be nonnegative");
        cfg.truncation = static_cast<std::size_t>(t);
      }
      cfg.greedy_tol = e.value("tol", 0.0);
      if (e.contains("quadrature"))
        cfg.quadrature = quadrature_rule_from_string(e.at("quadrature").get<std::string>());
      cfg.quadrature_resolution = static_cast<int>(
          positive_count(e, "quadrature_resolution", 400, "expansion"));
    }

    if (doc.contains("innovations")) {
      const auto& i = doc.at("innovations");
      reject_unknown(i, {"dist", "seed", "stream"}, "innovations");
      if (i.contains("dist"))
        cfg.innovations.dist = innovation_dist_from_string(i.at("dist").get<std::string>());
      cfg.innovations.seed = i.value("seed", std::uint64_t{0});
      cfg.innovations.stream = i.value("stream", std::uint64_t{0});
    }

    if (doc.contains("ensemble")) {
      const auto& e = doc.at("ensemble");
      reject_unknown(e, {"paths", "grid_resolution", "zero_innovations"}, "ensemble");
      cfg.paths = positive_count(e, "paths", cfg.paths, "ensemble");
      cfg.grid_resolution =
          static_cast<int>(positive_count(e, "grid_resolution", 101, "ensemble"));
      cfg.zero_innovations = e.value("zero_innovations", false);
    }

    if (doc.contains("basis_file")) cfg.basis_file = doc.at("basis_file").get<std::string>();

    if (doc.contains("output")) {
      const auto& o = doc.at("output");
      reject_unknown(o, {"dir", "format"}, "output");
      if (o.contains("dir")) cfg.out_dir = o.at("dir").get<std::string>();
      if (o.contains("format"))
        cfg.format = output_format_from_string(o.at("format").get<std::string>());
    }

    if (doc.contains("verify")) {
      const auto& v = doc.at("verify");
      reject_unknown(v, {"suite", "paths"}, "verify");
      cfg.suite = v.value("suite", cfg.suite);
      cfg.verify_paths = positive_count(v, "paths", cfg.verify_paths, "verify");
    }

    if (doc.contains("gap")) {
      const auto& g = doc.at("gap");
      reject_unknown(g, {"m", "d", "probes", "terms"}, "gap");
      cfg.gap_m = g.value("m", cfg.gap_m);
      cfg.gap_d = g.value("d", cfg.gap_d);
      if (g.contains("probes")) cfg.gap_probes = g.at("probes").get<std::vector<double>>();
      cfg.gap_terms = positive_count(g, "terms", cfg.gap_terms, "gap");
    }

    if (doc.contains("mercer")) {
      const auto& m = doc.at("mercer");
      reject_unknown(m, {"fit_first", "fit_last"}, "mercer");
      cfg.fit_first = positive_count(m, "fit_first", cfg.fit_first, "mercer");
      cfg.fit_last = positive_count(m, "fit_last", cfg.fit_last, "mercer");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  try {
    cfg.kernel.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (cfg.domain.dim() != cfg.kernel.dim)
    throw ConfigError("config: domain dimension differs from kernel dim");
  if (cfg.candidate_points) {
    try {
      NodeSet check(*cfg.candidate_points, cfg.domain);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("candidates.points: ") + e.what());
    }
  }
  if (cfg.truncation && *cfg.truncation > cfg.basis_size && !cfg.basis_file)
    throw ConfigError("expansion.truncation exceeds expansion.size");
  if (!(cfg.greedy_tol >= 0.0)) throw ConfigError("expansion.tol must be nonnegative");
  if (cfg.gap_d < 1) throw ConfigError("gap.d must be positive");
  if (!(cfg.gap_m > cfg.gap_d / 2.0)) throw ConfigError("gap.m must exceed d/2");
  for (double p : cfg.gap_probes) {
    if (!(p >= 0.0)) throw ConfigError("gap.probes must be nonnegative");
  }
  if (cfg.gap_terms < 1000) throw ConfigError("gap.terms must be at least 1000");
  if (cfg.fit_last < cfg.fit_first + 3) throw ConfigError("mercer fit range needs 4 points");
  if (cfg.verify_paths < 2) throw ConfigError("verify.paths must be at least 2");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return parse_config(doc);
}

}  // namespace kpath
