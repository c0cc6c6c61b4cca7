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

#ifndef KPATH_CONFIG_HPP_
#define KPATH_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kpath/expansion.hpp"
#include "kpath/kernels.hpp"
#include "kpath/mercer.hpp"
#include "kpath/sampler.hpp"

namespace kpath {

inline constexpr int kConfigSchemaVersion = 1;

enum class OutputFormat { Csv, Bin };

/// Everything a CLI run needs. Parsed from a JSON document whose keys mirror
/// the fields below; see README.md for the layout.
struct RunConfig {
  KernelSpec kernel;
  Box domain;

  // Candidate nodes for greedy selection: a per-axis resolution or explicit points.
  int candidate_resolution = 101;
  std::optional<PointMatrix> candidate_points;

  BasisKind kind = BasisKind::Newton;
  std::size_t basis_size = 50;              // nodes (Newton) or eigenpairs (KL)
  std::optional<std::size_t> truncation;    // path truncation, defaults to basis_size
  double greedy_tol = 0.0;
  int quadrature_resolution = 400;          // KL grid nodes per axis
  QuadratureRule quadrature = QuadratureRule::Midpoint;

  InnovationSpec innovations;
  std::size_t paths = 100;
  int grid_resolution = 101;                // evaluation grid per axis
  bool zero_innovations = false;            // test hook

  std::optional<std::filesystem::path> basis_file;
  std::filesystem::path out_dir = "out";
  OutputFormat format = OutputFormat::Bin;

  std::string suite = "default";
  std::size_t verify_paths = 2000;

  // gap suite
  double gap_m = 1.0;
  int gap_d = 1;
  std::vector<double> gap_probes;
  std::size_t gap_terms = 100000;

  // mercer command
  std::size_t fit_first = 5;
  std::size_t fit_last = 40;
};

/// Throws ConfigError on schema or value problems. Validation covers the
/// kernel spec, the box and every count before any computation starts.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);
void validate_config(const RunConfig& cfg);

OutputFormat output_format_from_string(const std::string& name);

}  // namespace kpath

#endif  // KPATH_CONFIG_HPP_
