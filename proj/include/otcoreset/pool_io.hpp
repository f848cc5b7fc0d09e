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

#ifndef OTCORESET_POOL_IO_HPP_
#define OTCORESET_POOL_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otcoreset/common.hpp"

namespace otcoreset {

enum class PoolRole { kTraining, kValidation };
enum class FileFormat { kBinary, kCsv };

// An ordered set of embedded points. Point i owns row i of `embeddings`,
// `grad_norms[i]` and, when the pool is labeled, `labels[i]`.
//
// Values are stored at the precision of the on-disk format (32-bit floats) so
// that load/save is bit-exact. All arithmetic widens to double.
class Pool {
 public:
  Pool() = default;
  // Validates every invariant; throws InputError naming the offending row.
  Pool(PoolRole role, std::size_t dim, std::vector<float> embeddings,
       std::vector<float> grad_norms = {},
       std::optional<std::vector<std::int64_t>> labels = std::nullopt);

  PoolRole role() const { return role_; }
  std::size_t size() const { return dim_ == 0 ? 0 : embeddings_.size() / dim_; }
  std::size_t dim() const { return dim_; }

  std::span<const float> embedding(std::size_t i) const {
    return {embeddings_.data() + i * dim_, dim_};
  }
  std::span<const float> embeddings() const { return embeddings_; }
  std::span<const float> grad_norms() const { return grad_norms_; }
  bool labeled() const { return labels_.has_value(); }
  std::span<const std::int64_t> labels() const;

  std::vector<double> GradNormsAsDouble() const;

  // Pool of the listed points, re-indexed 0..|rows|-1 in the given order.
  Pool Subset(std::span<const Index> rows) const;

  friend bool operator==(const Pool&, const Pool&) = default;

 private:
  PoolRole role_ = PoolRole::kTraining;
  std::size_t dim_ = 0;
  std::vector<float> embeddings_;
  std::vector<float> grad_norms_;
  std::optional<std::vector<std::int64_t>> labels_;
};

// Sources for one pool. The gradient-norm and label files are optional
// sidecars; a missing gradient file means g = 0 for every point.
struct PoolFiles {
  std::filesystem::path embeddings;
  std::optional<std::filesystem::path> grad_norms;
  std::optional<std::filesystem::path> labels;
};

// Infers kCsv for ".csv"/".txt" extensions and kBinary otherwise.
FileFormat FormatFromExtension(const std::filesystem::path& path);

Pool LoadPool(const PoolFiles& files, PoolRole role, FileFormat format);
Pool LoadPool(const std::filesystem::path& embeddings, PoolRole role,
              FileFormat format);

// Embedding matrix as (rows, dim, row-major values).
struct EmbeddingTable {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<float> values;
};

EmbeddingTable ReadEmbeddingsBinary(const std::filesystem::path& path);
EmbeddingTable ReadEmbeddingsCsv(const std::filesystem::path& path);
std::vector<float> ReadGradNormsBinary(const std::filesystem::path& path);
std::vector<float> ReadGradNormsCsv(const std::filesystem::path& path);
std::vector<std::int64_t> ReadLabelsCsv(const std::filesystem::path& path);
IndexList ReadIndexFile(const std::filesystem::path& path);

void WriteEmbeddingsBinary(const std::filesystem::path& path,
                           const EmbeddingTable& table);
void WriteGradNormsBinary(const std::filesystem::path& path,
                          std::span<const float> values);
void WriteLabelsCsv(const std::filesystem::path& path,
                    std::span<const std::int64_t> labels);
// Sorted, newline-terminated decimal indices.
void WriteIndexFile(const std::filesystem::path& path, IndexList indices);

// Writes embeddings (binary), and the gradient and label sidecars next to it
// as "<stem>.gnrm" and "<stem>.labels.csv" when present. Returns the paths.
PoolFiles SavePool(const Pool& pool, const std::filesystem::path& embeddings);

}  // namespace otcoreset

#endif  // OTCORESET_POOL_IO_HPP_
