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

#include <cstdint>
#include <vector>

#include "spanns/sparse_vector.h"

namespace spanns {

// All inner products accumulate in float, in ascending dimension order, so the
// merge kernel and the dual-mode kernel give bit-identical results.

/// Merge-join inner product over shared dimensions.
float dot(const SparseVector& a, const SparseVector& b) noexcept;

/// Walks the dims of `iterate_side` and looks each one up in `lookup_side`.
/// Cheapest when `iterate_side` is the shorter vector.
float dot_dual(const SparseVector& iterate_side, const SparseVector& lookup_side) noexcept;

/// The operand with the smaller L0 norm; `a` on ties.
inline const SparseVector& choose_iterate_side(const SparseVector& a,
                                               const SparseVector& b) noexcept {
    return b.nnz() < a.nnz() ? b : a;
}

/// dot_dual with the shorter side chosen automatically.
inline float dot_shorter_side(const SparseVector& a, const SparseVector& b) noexcept {
    const SparseVector& it = choose_iterate_side(a, b);
    return dot_dual(it, &it == &a ? b : a);
}

/// A query in 16-bit signed fixed point: real value ~= qvals[i] * scale.
struct QuantizedQuery {
    std::vector<DimId> dims;
    std::vector<int16_t> qvals;
    float scale = 0.0f;

    float dequantize(std::size_t i) const noexcept { return static_cast<float>(qvals[i]) * scale; }

    /// Inner product against a float vector, returned in real units.
    float dot(const SparseVector& other) const noexcept;
};

/// scale = max(vals) / 32767, qvals[i] = round(vals[i] / scale).
/// Throws Error(kEmptyInput) for an empty query.
QuantizedQuery quantize_query(const SparseVector& q);

}  // namespace spanns
