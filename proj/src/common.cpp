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

#include "otcoreset/common.hpp"

#include <algorithm>
#include <sstream>

namespace otcoreset {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols)
    throw InputError("matrix data does not match its shape");
}

Matrix Matrix::FromRows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix out(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw InputError("ragged matrix rows");
    std::copy(rows[i].begin(), rows[i].end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::SelectRows(std::span<const Index> rows) const {
  Matrix out(rows.size(), cols_);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto src = row(static_cast<std::size_t>(rows[k]));
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  return out;
}

void ValidateIndexSet(std::span<const Index> set, std::size_t universe,
                      const std::string& what) {
  std::vector<char> seen(universe, 0);
  for (std::size_t k = 0; k < set.size(); ++k) {
    const Index i = set[k];
    if (i < 0 || static_cast<std::size_t>(i) >= universe) {
      std::ostringstream os;
      os << what << " index " << i << " at position " << k << " is outside [0, "
         << universe << ")";
      throw InputError(os.str());
    }
    if (seen[i]) {
      std::ostringstream os;
      os << what << " index " << i << " at position " << k << " is repeated";
      throw InputError(os.str());
    }
    seen[i] = 1;
  }
}

IndexList Sorted(IndexList v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace otcoreset
