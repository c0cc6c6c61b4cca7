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

#include "kpath/basis_io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "kpath/errors.hpp"

namespace kpath {
namespace {

constexpr char kMagic[8] = {'K', 'P', 'B', 'A', 'S', 'I', 'S', '\0'};
constexpr std::size_t kDigestSize = 32;

class ByteWriter {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  template <class Derived>
  void matrix(const Eigen::DenseBase<Derived>& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) f64(m(i, j));
  }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}
  std::span<const std::uint8_t> raw(std::size_t n) {
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  template <class M>
  void matrix(M& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = f64();
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw IntegrityError("basis file: truncated payload");
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::array<std::uint8_t, kDigestSize> sha256(std::span<const std::uint8_t> bytes) {
  std::array<std::uint8_t, kDigestSize> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != kDigestSize)
    throw Error("sha256: digest computation failed");
  return md;
}

std::string hex(std::span<const std::uint8_t> bytes) {
  std::ostringstream os;
  for (auto b : bytes) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(b);
  return os.str();
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) { return hex(sha256(bytes)); }

std::string file_sha256(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

nlohmann::ordered_json kernel_to_json(const KernelSpec& spec) {
  nlohmann::ordered_json j;
  j["family"] = to_string(spec.family);
  switch (spec.family) {
    case KernelFamily::Matern:
      j["nu"] = spec.nu;
      j["alpha"] = spec.alpha;
      break;
    case KernelFamily::GeneralizedWendland:
      j["mu"] = spec.mu;
      j["kappa"] = spec.kappa;
      j["beta"] = spec.beta;
      break;
    case KernelFamily::Askey:
      j["mu"] = spec.mu;
      j["beta"] = spec.beta;
      break;
  }
  j["variance"] = spec.variance;
  j["dim"] = spec.dim;
  return j;
}

KernelSpec kernel_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("kernel: expected an object");
  KernelSpec s;
  try {
    s.family = kernel_family_from_string(j.at("family").get<std::string>());
    s.nu = j.value("nu", s.nu);
    s.alpha = j.value("alpha", s.alpha);
    s.mu = j.value("mu", s.mu);
    s.kappa = j.value("kappa", s.family == KernelFamily::Askey ? 0.0 : s.kappa);
    s.beta = j.value("beta", s.beta);
    s.variance = j.value("variance", 1.0);
    s.dim = j.value("dim", 1);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }
  try {
    s.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return s;
}

std::vector<std::uint8_t> serialize_basis(const ExpansionBasis& basis) {
  const auto& spec = basis.covariance().spec();
  if (!spec) throw DomainError("serialize_basis: only bases of named kernels can be exported");
  const bool newton = basis.kind() == BasisKind::Newton;
  const Box& box = newton ? basis.nodes().box() : basis.box();

  nlohmann::ordered_json header;
  header["kind"] = to_string(basis.kind());
  header["kernel"] = kernel_to_json(*spec);
  header["size"] = basis.size();
  header["dim"] = basis.dim();
  if (newton)
    header["nodes"] = basis.nodes().size();
  else
    header["grid"] = basis.grid().rows();
  const std::string text = header.dump();

  ByteWriter w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kBasisFormatVersion);
  w.u64(text.size());
  w.raw(text.data(), text.size());
  w.matrix(box.lower);
  w.matrix(box.upper);
  if (newton) {
    w.matrix(basis.nodes().points());
    w.matrix(basis.node_values());
  } else {
    w.matrix(basis.grid());
    w.matrix(basis.weights());
    w.matrix(basis.lambdas());
    w.matrix(basis.vectors());
  }
  const auto digest = sha256(w.bytes());
  w.raw(digest.data(), digest.size());
  return std::move(w.bytes());
}

ExpansionBasis deserialize_basis(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof kMagic + 4 + 8 + kDigestSize)
    throw IntegrityError("basis file: too short");
  const auto body = bytes.first(bytes.size() - kDigestSize);
  const auto stored = bytes.last(kDigestSize);
  const auto digest = sha256(body);
  if (!std::equal(digest.begin(), digest.end(), stored.begin()))
    throw IntegrityError("basis file: checksum mismatch (expected " + hex(stored) + ", got " +
                         hex(digest) + ")");

  ByteReader r(body);
  const auto magic = r.raw(sizeof kMagic);
  if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0)
    throw IntegrityError("basis file: bad magic");
  const auto version = r.u32();
  if (version != kBasisFormatVersion)
    throw IntegrityError("basis file: unsupported format version " + std::to_string(version));
  const auto header_len = r.u64();
  if (header_len > r.remaining()) throw IntegrityError("basis file: truncated header");
  const auto text = r.raw(static_cast<std::size_t>(header_len));

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw IntegrityError(std::string("basis file: bad header: ") + e.what());
  }
  try {
    const auto kind = basis_kind_from_string(header.at("kind").get<std::string>());
    const KernelSpec spec = kernel_from_json(header.at("kernel"));
    const auto size = header.at("size").get<Eigen::Index>();
    const auto dim = header.at("dim").get<int>();
    if (dim != spec.dim || size < 0) throw IntegrityError("basis file: inconsistent header");
    Point lower(dim), upper(dim);
    r.matrix(lower);
    r.matrix(upper);
    Box box(lower, upper);
    ExpansionBasis out = [&] {
      if (kind == BasisKind::Newton) {
        PointMatrix nodes(size, dim);
        r.matrix(nodes);
        Eigen::MatrixXd l(size, size);
        r.matrix(l);
        return ExpansionBasis::newton(Covariance(spec), NodeSet(std::move(nodes), box), std::move(l));
      }
      const auto g = header.at("grid").get<Eigen::Index>();
      PointMatrix grid(g, dim);
      r.matrix(grid);
      Eigen::VectorXd weights(g), lambdas(size);
      r.matrix(weights);
      r.matrix(lambdas);
      Eigen::MatrixXd vectors(g, size);
      r.matrix(vectors);
      return ExpansionBasis::kl(Covariance(spec), box, std::move(grid), std::move(weights),
                                std::move(lambdas), std::move(vectors));
    }();
    if (r.remaining() != 0) throw IntegrityError("basis file: trailing bytes after payload");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw IntegrityError(std::string("basis file: bad header: ") + e.what());
  } catch (const ConfigError& e) {
    throw IntegrityError(std::string("basis file: ") + e.what());
  } catch (const DomainError& e) {
    throw IntegrityError(std::string("basis file: ") + e.what());
  }
}

void export_basis(const ExpansionBasis& basis, const std::filesystem::path& path) {
  write_file(path, serialize_basis(basis));
}

ExpansionBasis import_basis(const std::filesystem::path& path) {
  return deserialize_basis(read_file(path));
}

std::vector<std::uint8_t> matrix_to_bytes(const Eigen::MatrixXd& m) {
  ByteWriter w;
  w.matrix(m);
  return std::move(w.bytes());
}

Eigen::MatrixXd matrix_from_bytes(std::span<const std::uint8_t> bytes, Eigen::Index rows,
                                  Eigen::Index cols) {
  if (bytes.size() != static_cast<std::size_t>(rows * cols) * 8)
    throw IntegrityError("matrix payload size does not match its shape");
  ByteReader r(bytes);
  Eigen::MatrixXd m(rows, cols);
  r.matrix(m);
  return m;
}

std::string matrix_to_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& header) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  if (!header.empty()) os << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
    os << "\n";
  }
  return os.str();
}

}  // namespace kpath
