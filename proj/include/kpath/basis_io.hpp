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

#ifndef KPATH_BASIS_IO_HPP_
#define KPATH_BASIS_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "kpath/expansion.hpp"

namespace kpath {

// Basis file layout, all integers and floats little-endian:
//
//   "KPBASIS\0"            8-byte magic
//   u32 version            kBasisFormatVersion
//   u64 header length, then a JSON header (kind, kernel, size, dim, counts)
//   f64 payload            box lower, box upper, then
//                            Newton: nodes (N x dim), node-value matrix (N x N)
//                            KL:     grid (G x dim), weights (G), lambdas (N),
//                                    eigenvector values (G x N)
//                          matrices row-major
//   32-byte SHA-256 of every preceding byte
inline constexpr std::uint32_t kBasisFormatVersion = 1;

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string file_sha256(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

nlohmann::ordered_json kernel_to_json(const KernelSpec& spec);
KernelSpec kernel_from_json(const nlohmann::json& j);

/// Throws DomainError if the basis was built from a custom covariance.
std::vector<std::uint8_t> serialize_basis(const ExpansionBasis& basis);

/// Throws IntegrityError on a bad magic, version, truncation or hash mismatch.
ExpansionBasis deserialize_basis(std::span<const std::uint8_t> bytes);

void export_basis(const ExpansionBasis& basis, const std::filesystem::path& path);
ExpansionBasis import_basis(const std::filesystem::path& path);

/// Row-major little-endian f64 matrix, no header.
std::vector<std::uint8_t> matrix_to_bytes(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_bytes(std::span<const std::uint8_t> bytes, Eigen::Index rows,
                                  Eigen::Index cols);

/// CSV with one matrix row per line, values printed with 17 significant digits.
std::string matrix_to_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& header = {});

}  // namespace kpath

#endif  // KPATH_BASIS_IO_HPP_
