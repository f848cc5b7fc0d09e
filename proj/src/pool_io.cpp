// Copyright 2026 The otcoreset Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "otcoreset/pool_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace otcoreset {

namespace {

constexpr char kEmbeddingMagic[4] = {'G', 'E', 'M', 'B'};
constexpr char kGradMagic[4] = {'G', 'N', 'R', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
T FromLittleEndian(const unsigned char* bytes) {
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* p = reinterpret_cast<unsigned char*>(&value);
    std::reverse(p, p + sizeof(T));
  }
  return value;
}

template <typename T>
void AppendLittleEndian(std::string& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

std::string ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteAll(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("failed writing " + path.string());
}

[[noreturn]] void Fail(const std::filesystem::path& path, std::size_t row,
                       const std::string& what) {
  std::ostringstream os;
  os << path.string() << ": row " << row << ": " << what;
  throw InputError(os.str());
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

// Splits into lines, dropping blank lines but keeping 1-based line numbers.
std::vector<std::pair<std::size_t, std::string_view>> Lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t number = 0;
  while (!text.empty()) {
    const std::size_t end = text.find('\n');
    std::string_view line = text.substr(0, end);
    ++number;
    line = Trim(line);
    if (!line.empty()) lines.emplace_back(number, line);
    if (end == std::string_view::npos) break;
    text.remove_prefix(end + 1);
  }
  return lines;
}

double ParseDouble(std::string_view field, const std::filesystem::path& path,
                   std::size_t row) {
  field = Trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    Fail(path, row, "cannot parse '" + std::string(field) + "' as a number");
  return value;
}

void CheckEmbeddings(std::span<const float> values, std::size_t dim,
                     const std::string& source) {
  for (std::size_t k = 0; k < values.size(); ++k)
    if (!std::isfinite(values[k])) {
      std::ostringstream os;
      os << source << ": row " << k / dim << ": embedding component " << k % dim
         << " is not finite";
      throw InputError(os.str());
    }
}

}  // namespace

Pool::Pool(PoolRole role, std::size_t dim, std::vector<float> embeddings,
           std::vector<float> grad_norms,
           std::optional<std::vector<std::int64_t>> labels)
    : role_(role),
      dim_(dim),
      embeddings_(std::move(embeddings)),
      grad_norms_(std::move(grad_norms)),
      labels_(std::move(labels)) {
  if (dim_ == 0) throw InputError("pool dimension must be positive");
  if (embeddings_.size() % dim_ != 0)
    throw InputError("embedding buffer is not a whole number of rows");
  const std::size_t n = embeddings_.size() / dim_;
  CheckEmbeddings(embeddings_, dim_, "pool");
  if (grad_norms_.empty()) grad_norms_.assign(n, 0.0f);
  if (grad_norms_.size() != n) {
    std::ostringstream os;
    os << "pool has " << n << " points but " << grad_norms_.size() << " gradient norms";
    throw InputError(os.str());
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(grad_norms_[i]) || grad_norms_[i] < 0.0f) {
      std::ostringstream os;
      os << "row " << i << ": gradient norm " << grad_norms_[i]
         << " is not finite and nonnegative";
      throw InputError(os.str());
    }
  if (labels_ && labels_->size() != n) {
    std::ostringstream os;
    os << "labels present on " << labels_->size() << " of " << n
       << " points; either all points carry a label or none does";
    throw InputError(os.str());
  }
}

std::span<const std::int64_t> Pool::labels() const {
  if (!labels_) return {};
  return *labels_;
}

std::vector<double> Pool::GradNormsAsDouble() const {
  return {grad_norms_.begin(), grad_norms_.end()};
}

Pool Pool::Subset(std::span<const Index> rows) const {
  ValidateIndexSet(rows, size(), "pool subset");
  std::vector<float> emb;
  emb.reserve(rows.size() * dim_);
  std::vector<float> grads;
  std::optional<std::vector<std::int64_t>> labels;
  if (labels_) labels.emplace();
  for (Index r : rows) {
    const auto e = embedding(static_cast<std::size_t>(r));
    emb.insert(emb.end(), e.begin(), e.end());
    grads.push_back(grad_norms_[r]);
    if (labels_) labels->push_back((*labels_)[r]);
  }
  return Pool(role_, dim_, std::move(emb), std::move(grads), std::move(labels));
}

FileFormat FormatFromExtension(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  return (ext == ".csv" || ext == ".txt") ? FileFormat::kCsv : FileFormat::kBinary;
}

EmbeddingTable ReadEmbeddingsBinary(const std::filesystem::path& path) {
  const std::string bytes = ReadAll(path);
  constexpr std::size_t kHeader = 4 + 4 + 8 + 8;
  if (bytes.size() < kHeader || std::memcmp(bytes.data(), kEmbeddingMagic, 4) != 0)
    throw InputError(path.string() + ": not a GEMB embedding file");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const auto version = FromLittleEndian<std::uint32_t>(p + 4);
  if (version != kFormatVersion)
    throw InputError(path.string() + ": unsupported GEMB version " +
                     std::to_string(version));
  EmbeddingTable t;
  t.rows = FromLittleEndian<std::uint64_t>(p + 8);
  t.dim = FromLittleEndian<std::uint64_t>(p + 16);
  if (t.dim == 0) throw InputError(path.string() + ": dimension is zero");
  const std::size_t payload = bytes.size() - kHeader;
  if (t.rows > payload / 4 / t.dim || payload != t.rows * t.dim * 4) {
    std::ostringstream os;
    os << path.string() << ": header declares " << t.rows << "x" << t.dim
       << " floats but payload has " << payload << " bytes";
    throw InputError(os.str());
  }
  t.values.resize(t.rows * t.dim);
  for (std::size_t k = 0; k < t.values.size(); ++k)
    t.values[k] = FromLittleEndian<float>(p + kHeader + 4 * k);
  CheckEmbeddings(t.values, t.dim, path.string());
  return t;
}

EmbeddingTable ReadEmbeddingsCsv(const std::filesystem::path& path) {
  const std::string text = ReadAll(path);
  EmbeddingTable t;
  for (const auto& [row, line] : Lines(text)) {
    std::size_t fields = 0;
    std::string_view rest = line;
    while (true) {
      const std::size_t comma = rest.find(',');
      const double v = ParseDouble(rest.substr(0, comma), path, row);
      if (!std::isfinite(v)) Fail(path, row, "value is not finite");
      const float f = static_cast<float>(v);
      if (!std::isfinite(f)) Fail(path, row, "value overflows 32-bit float");
      t.values.push_back(f);
      ++fields;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (t.rows == 0) {
      t.dim = fields;
    } else if (fields != t.dim) {
      std::ostringstream os;
      os << "has " << fields << " columns, expected " << t.dim;
      Fail(path, row, os.str());
    }
    ++t.rows;
  }
  if (t.rows == 0) throw InputError(path.string() + ": no rows");
  return t;
}

std::vector<float> ReadGradNormsBinary(const std::filesystem::path& path) {
  const std::string bytes = ReadAll(path);
  constexpr std::size_t kHeader = 4 + 4 + 8;
  if (bytes.size() < kHeader || std::memcmp(bytes.data(), kGradMagic, 4) != 0)
    throw InputError(path.string() + ": not a GNRM gradient-norm file");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const auto version = FromLittleEndian<std::uint32_t>(p + 4);
  if (version != kFormatVersion)
    throw InputError(path.string() + ": unsupported GNRM version " +
                     std::to_string(version));
  const auto count = FromLittleEndian<std::uint64_t>(p + 8);
  if (bytes.size() - kHeader != count * 4)
    throw InputError(path.string() + ": count does not match payload size");
  std::vector<float> out(count);
  for (std::size_t k = 0; k < count; ++k)
    out[k] = FromLittleEndian<float>(p + kHeader + 4 * k);
  for (std::size_t k = 0; k < count; ++k)
    if (!std::isfinite(out[k]) || out[k] < 0.0f)
      Fail(path, k, "gradient norm is not finite and nonnegative");
  return out;
}

std::vector<float> ReadGradNormsCsv(const std::filesystem::path& path) {
  const std::string text = ReadAll(path);
  std::vector<float> out;
  for (const auto& [row, line] : Lines(text)) {
    const double v = ParseDouble(line, path, row);
    if (!std::isfinite(v) || v < 0.0)
      Fail(path, row, "gradient norm is not finite and nonnegative");
    out.push_back(static_cast<float>(v));
  }
  return out;
}

std::vector<std::int64_t> ReadLabelsCsv(const std::filesystem::path& path) {
  const std::string text = ReadAll(path);
  std::vector<std::int64_t> out;
  for (const auto& [row, line] : Lines(text)) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size())
      Fail(path, row, "cannot parse '" + std::string(line) + "' as an integer label");
    out.push_back(v);
  }
  return out;
}

IndexList ReadIndexFile(const std::filesystem::path& path) {
  const std::string text = ReadAll(path);
  IndexList out;
  for (const auto& [row, line] : Lines(text)) {
    Index v = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size())
      Fail(path, row, "cannot parse '" + std::string(line) + "' as an index");
    out.push_back(v);
  }
  return out;
}

void WriteEmbeddingsBinary(const std::filesystem::path& path,
                           const EmbeddingTable& table) {
  std::string bytes(kEmbeddingMagic, 4);
  AppendLittleEndian<std::uint32_t>(bytes, kFormatVersion);
  AppendLittleEndian<std::uint64_t>(bytes, table.rows);
  AppendLittleEndian<std::uint64_t>(bytes, table.dim);
  for (float v : table.values) AppendLittleEndian<float>(bytes, v);
  WriteAll(path, bytes);
}

void WriteGradNormsBinary(const std::filesystem::path& path,
                          std::span<const float> values) {
  std::string bytes(kGradMagic, 4);
  AppendLittleEndian<std::uint32_t>(bytes, kFormatVersion);
  AppendLittleEndian<std::uint64_t>(bytes, values.size());
  for (float v : values) AppendLittleEndian<float>(bytes, v);
  WriteAll(path, bytes);
}

void WriteLabelsCsv(const std::filesystem::path& path,
                    std::span<const std::int64_t> labels) {
  std::string text;
  for (std::int64_t l : labels) text += std::to_string(l) + "\n";
  WriteAll(path, text);
}

void WriteIndexFile(const std::filesystem::path& path, IndexList indices) {
  std::sort(indices.begin(), indices.end());
  std::string text;
  for (Index i : indices) text += std::to_string(i) + "\n";
  WriteAll(path, text);
}

Pool LoadPool(const PoolFiles& files, PoolRole role, FileFormat format) {
  EmbeddingTable table = format == FileFormat::kBinary
                             ? ReadEmbeddingsBinary(files.embeddings)
                             : ReadEmbeddingsCsv(files.embeddings);
  std::vector<float> grads;
  if (files.grad_norms) {
    grads = FormatFromExtension(*files.grad_norms) == FileFormat::kCsv
                ? ReadGradNormsCsv(*files.grad_norms)
                : ReadGradNormsBinary(*files.grad_norms);
    if (grads.size() != table.rows) {
      std::ostringstream os;
      os << files.grad_norms->string() << ": " << grads.size()
         << " gradient norms for " << table.rows << " points";
      throw InputError(os.str());
    }
  }
  std::optional<std::vector<std::int64_t>> labels;
  if (files.labels) {
    labels = ReadLabelsCsv(*files.labels);
    if (labels->size() != table.rows) {
      std::ostringstream os;
      os << files.labels->string() << ": labels present on " << labels->size()
         << " of " << table.rows << " points";
      throw InputError(os.str());
    }
  }
  return Pool(role, table.dim, std::move(table.values), std::move(grads),
              std::move(labels));
}

Pool LoadPool(const std::filesystem::path& embeddings, PoolRole role,
              FileFormat format) {
  return LoadPool(PoolFiles{embeddings, std::nullopt, std::nullopt}, role, format);
}

PoolFiles SavePool(const Pool& pool, const std::filesystem::path& embeddings) {
  PoolFiles files{embeddings, std::nullopt, std::nullopt};
  const auto emb = pool.embeddings();
  WriteEmbeddingsBinary(embeddings, {pool.size(), pool.dim(), {emb.begin(), emb.end()}});
  auto sibling = [&](const std::string& suffix) {
    auto p = embeddings;
    p.replace_extension();
    p += suffix;
    return p;
  };
  files.grad_norms = sibling(".gnrm");
  WriteGradNormsBinary(*files.grad_norms, pool.grad_norms());
  if (pool.labeled()) {
    files.labels = sibling(".labels.csv");
    WriteLabelsCsv(*files.labels, pool.labels());
  }
  return files;
}

}  // namespace otcoreset
