// Copyright 2026-present the spanns project
//
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace spanns {

using DimId = uint32_t;
using RecordId = uint32_t;

/// A non-negative sparse vector stored as parallel (dim, value) arrays.
///
/// Dimensions are strictly ascending and every stored value is finite and
/// strictly positive. Explicit zeros are dropped on construction; negative or
/// non-finite values are rejected. Records, queries and cluster silhouettes all
/// use this type.
class SparseVector {
 public:
    SparseVector() = default;

    /// Validating constructor. Throws spanns::Error on unsorted or duplicate
    /// dims, length mismatch, or a negative / non-finite value.
    SparseVector(std::vector<DimId> dims, std::vector<float> vals);

    SparseVector(std::initializer_list<std::pair<DimId, float>> pairs);

    /// Builds from unordered pairs; duplicates are an error.
    static SparseVector from_pairs(std::vector<std::pair<DimId, float>> pairs);

    std::size_t nnz() const noexcept { return dims_.size(); }
    bool empty() const noexcept { return dims_.empty(); }

    std::span<const DimId> dims() const noexcept { return dims_; }
    std::span<const float> vals() const noexcept { return vals_; }

    DimId dim(std::size_t i) const noexcept { return dims_[i]; }
    float val(std::size_t i) const noexcept { return vals_[i]; }

    /// Value at `dim`, or 0 when absent.
    float value_at(DimId dim) const noexcept;

    /// L1 norm, accumulated in ascending dimension order.
    double l1() const noexcept;

    /// One past the largest stored dimension, 0 for an empty vector.
    DimId dim_bound() const noexcept { return dims_.empty() ? 0 : dims_.back() + 1; }

    bool operator==(const SparseVector&) const = default;

 private:
    std::vector<DimId> dims_;
    std::vector<float> vals_;
};

}  // namespace spanns
