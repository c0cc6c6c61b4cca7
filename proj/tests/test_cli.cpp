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

#include <fstream>
#include <sstream>

#include "kpath/basis_io.hpp"
#include "kpath/cli.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run kpath_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = kpath::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

json base_config() {
  return {{"schema_version", 1},
          {"kernel", {{"family", "matern"}, {"nu", 2.5}, {"alpha", 0.2}}},
          {"domain", {{"lower", {0.0}}, {"upper", {1.0}}}}};
}

fs::path write_config(const fs::path& dir, const json& doc) {
  const auto path = dir / "config.json";
  std::ofstream(path) << doc.dump(2);
  return path;
}

std::vector<std::vector<double>> read_csv(const fs::path& path, bool header = true) {
  std::ifstream in(path);
  std::string line;
  if (header) std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string slurp(const fs::path& path) {
  const auto bytes = kpath::read_file(path);
  return {bytes.begin(), bytes.end()};
}

}  // namespace

TEST_CASE("usage errors exit with status 2") {
  CHECK(kpath_run({}).code == 2);
  CHECK(kpath_run({"frobnicate"}).code == 2);
  CHECK(kpath_run({"sample", "--format", "xml"}).code == 2);
  CHECK(kpath_run({"sample", "--config", "/nonexistent/kpath.json"}).code == 2);
  CHECK(kpath_run({"--help"}).code == 0);
}

TEST_CASE("greedy: 1001 candidates, 50 nodes, strictly decreasing residual table") {
  const auto dir = kpath::testing::scratch_dir("cli_greedy");
  json doc = base_config();
  doc["candidates"] = {{"resolution", 1001}};
  const auto r = kpath_run({"greedy", "--config", write_config(dir, doc).string(), "--out", (dir / "o").string()});
  REQUIRE(r.code == 0);
  CHECK(read_csv(dir / "o" / "nodes.csv").size() == 50);
  const auto table = read_csv(dir / "o" / "greedy_residuals.csv");
  REQUIRE(table.size() == 51);
  for (std::size_t n = 1; n < table.size(); ++n) CHECK(table[n][1] < table[n - 1][1]);
}

TEST_CASE("greedy: single node and tolerance stop") {
  const auto dir = kpath::testing::scratch_dir("cli_greedy_stop");
  json doc = base_config();
  doc["expansion"] = {{"size", 1}};
  REQUIRE(kpath_run({"greedy", "--config", write_config(dir, doc).string(), "--out", (dir / "a").string()}).code == 0);
  const auto one = read_csv(dir / "a" / "greedy_residuals.csv");
  REQUIRE(one.size() == 2);
  CHECK(one[0][1] == 1.0);
  CHECK(one[1][1] < 1.0);

  doc["expansion"] = {{"size", 80}, {"tol", 1e-4}};
  REQUIRE(kpath_run({"greedy", "--config", write_config(dir, doc).string(), "--out", (dir / "b").string()}).code == 0);
  const auto tol = read_csv(dir / "b" / "greedy_residuals.csv");
  CHECK(tol.size() < 81);
  CHECK(tol.back()[1] <= 1e-4);
}

TEST_CASE("greedy pivot failure exits with status 3") {
  const auto dir = kpath::testing::scratch_dir("cli_pivot");
  json doc = base_config();
  doc["kernel"] = {{"family", "matern"}, {"nu", 0.5}, {"alpha", 1e4}};
  doc["candidates"] = {{"points", {{0.3}, {0.3 + 1e-9}}}};
  doc["expansion"] = {{"size", 2}};
  const auto r = kpath_run({"greedy", "--config", write_config(dir, doc).string(), "--out", (dir / "o").string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("pivot") != std::string::npos);
}

TEST_CASE("sample: zero innovations give a zero row") {
  const auto dir = kpath::testing::scratch_dir("cli_zero");
  json doc = base_config();
  doc["ensemble"] = {{"paths", 1}};
  doc["output"] = {{"format", "csv"}};
  const auto r = kpath_run({"sample", "--config", write_config(dir, doc).string(), "--out",
                            (dir / "o").string(), "--zero-innovations"});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(dir / "o" / "ensemble.csv", false);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].size() == 101);
  for (double v : rows[0]) CHECK(v == 0.0);
}

TEST_CASE("sample: same seed gives byte-identical files, another seed does not") {
  const auto dir = kpath::testing::scratch_dir("cli_determinism");
  const auto cfg = write_config(dir, base_config()).string();
  REQUIRE(kpath_run({"sample", "--config", cfg, "--out", (dir / "a").string(), "--seed", "42"}).code == 0);
  REQUIRE(kpath_run({"sample", "--config", cfg, "--out", (dir / "b").string(), "--seed", "42"}).code == 0);
  REQUIRE(kpath_run({"sample", "--config", cfg, "--out", (dir / "c").string(), "--seed", "43"}).code == 0);
  for (const char* f : {"ensemble.bin", "ensemble.json", "certificate.csv"})
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  CHECK(slurp(dir / "a" / "ensemble.bin") != slurp(dir / "c" / "ensemble.bin"));

  const auto side = json::parse(slurp(dir / "a" / "ensemble.json"));
  CHECK(side["sha256"] == kpath::file_sha256(dir / "a" / "ensemble.bin"));
  CHECK(side["shape"] == json::array({100, 101}));
  CHECK(side["innovations"]["seed"] == 42);
  CHECK(fs::file_size(dir / "a" / "ensemble.bin") == 100 * 101 * 8);
}

TEST_CASE("sample: certificate vanishes at the Newton nodes") {
  const auto dir = kpath::testing::scratch_dir("cli_certificate");
  const auto cfg = write_config(dir, base_config()).string();
  REQUIRE(kpath_run({"greedy", "--config", cfg, "--out", (dir / "o").string()}).code == 0);
  REQUIRE(kpath_run({"sample", "--config", cfg, "--out", (dir / "o").string()}).code == 0);
  const auto nodes = read_csv(dir / "o" / "nodes.csv");
  const auto cert = read_csv(dir / "o" / "certificate.csv");
  std::size_t hits = 0;
  for (const auto& node : nodes) {
    for (const auto& row : cert) {
      if (std::abs(row[0] - node[0]) < 1e-12) {
        CHECK(std::abs(row[1]) <= 1e-10);
        ++hits;
      }
    }
  }
  CHECK(hits == nodes.size());
  for (const auto& row : cert) CHECK(row[1] >= -1e-10);
}

TEST_CASE("sample: truncation beyond the basis size exits with status 2") {
  const auto dir = kpath::testing::scratch_dir("cli_mismatch");
  json doc = base_config();
  doc["expansion"] = {{"size", 10}};
  const auto cfg = write_config(dir, doc).string();
  REQUIRE(kpath_run({"basis", "--config", cfg, "--out", (dir / "o").string()}).code == 0);
  doc["expansion"] = {{"size", 20}, {"truncation", 20}};
  doc["basis_file"] = (dir / "o" / "basis.bin").string();
  const auto r = kpath_run({"sample", "--config", write_config(dir, doc).string(), "--out", (dir / "o").string()});
  CHECK(r.code == 2);
}

TEST_CASE("basis export, reuse and integrity check") {
  const auto dir = kpath::testing::scratch_dir("cli_basis");
  json doc = base_config();
  doc["expansion"] = {{"kind", "kl"}, {"size", 30}};
  const auto cfg = write_config(dir, doc).string();
  REQUIRE(kpath_run({"basis", "--config", cfg, "--out", (dir / "o").string()}).code == 0);
  const auto bin = dir / "o" / "basis.bin";
  const auto side = json::parse(slurp(dir / "o" / "basis.json"));
  CHECK(side["sha256"] == kpath::file_sha256(bin));
  CHECK(side["kind"] == "kl");

  CHECK(kpath_run({"verify", "--config", cfg, "--suite", "basis", "--basis", bin.string(), "--out",
                   (dir / "v").string()})
            .code == 0);

  auto bytes = kpath::read_file(bin);
  bytes[bytes.size() / 3] ^= 0x01;
  kpath::write_file(dir / "bad.bin", bytes);
  const auto bad = kpath_run({"verify", "--config", cfg, "--suite", "basis", "--basis",
                              (dir / "bad.bin").string(), "--out", (dir / "v2").string()});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("checksum mismatch") != std::string::npos);
  CHECK(kpath_run({"sample", "--config", cfg, "--basis", (dir / "bad.bin").string(), "--out",
                   (dir / "s").string()})
            .code == 2);
}

TEST_CASE("verify: default suite passes on Matern 5/2") {
  const auto dir = kpath::testing::scratch_dir("cli_verify");
  const auto r = kpath_run({"verify", "--config", write_config(dir, base_config()).string(), "--out",
                            (dir / "o").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("ALL PASSED") != std::string::npos);
  const auto report = json::parse(slurp(dir / "o" / "report.json"));
  CHECK(report["passed"] == true);
  CHECK(report["checks"].size() > 20);
  CHECK(fs::exists(dir / "o" / "report.txt"));
}

TEST_CASE("verify: gap suite classifies the probes at the d/2 boundary") {
  const auto dir = kpath::testing::scratch_dir("cli_gap");
  json doc = base_config();
  doc["gap"] = {{"m", 1.0}, {"d", 1}, {"probes", {0.3, 0.4, 0.5, 0.6}}};
  const auto cfg = write_config(dir, doc).string();
  const auto r = kpath_run({"verify", "--config", cfg, "--suite", "gap", "--out", (dir / "o").string()});
  CHECK(r.code == 0);
  for (const char* s : {"p=0.3 converges", "p=0.4 converges", "p=0.5 diverges", "p=0.6 diverges"})
    CHECK(r.out.find(s) != std::string::npos);

  REQUIRE(kpath_run({"gap", "--config", cfg, "--out", (dir / "g").string()}).code == 0);
  std::ifstream in(dir / "g" / "gap.csv");
  std::string line;
  std::getline(in, line);
  std::vector<std::string> verdicts;
  while (std::getline(in, line)) verdicts.push_back(line.substr(line.rfind(',') + 1));
  CHECK(verdicts == std::vector<std::string>{"converges", "converges", "diverges", "diverges"});
}

TEST_CASE("mercer: eigenvalue table and decay fit") {
  const auto dir = kpath::testing::scratch_dir("cli_mercer");
  json doc = base_config();
  doc["kernel"] = {{"family", "matern"}, {"nu", 1.5}, {"alpha", 1.0}};
  doc["expansion"] = {{"size", 60}, {"quadrature_resolution", 1000}};
  REQUIRE(kpath_run({"mercer", "--config", write_config(dir, doc).string(), "--out", (dir / "o").string()}).code == 0);
  const auto lam = read_csv(dir / "o" / "eigenvalues.csv");
  CHECK(lam.size() == 60);
  const auto out = json::parse(slurp(dir / "o" / "mercer.json"));
  CHECK(std::abs(out["m_hat"].get<double>() - 2.0) <= 0.3);
}
