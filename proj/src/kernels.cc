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

#include "spanns/kernels.h"

#include <algorithm>
#include <cmath>

#include "spanns/error.h"

namespace spanns {

float dot(const SparseVector& a, const SparseVector& b) noexcept {
    const auto ad = a.dims();
    const auto bd = b.dims();
    const auto av = a.vals();
    const auto bv = b.vals();
    std::size_t i = 0;
    std::size_t j = 0;
    float sum = 0.0f;
    while (i < ad.size() && j < bd.size()) {
        if (ad[i] < bd[j]) {
            ++i;
        } else if (bd[j] < ad[i]) {
            ++j;
        } else {
            sum += av[i] * bv[j];
            ++i;
            ++j;
        }
    }
    return sum;
}

float dot_dual(const SparseVector& iterate_side, const SparseVector& lookup_side) noexcept {
    const auto id = iterate_side.dims();
    const auto iv = iterate_side.vals();
    const auto ld = lookup_side.dims();
    const auto lv = lookup_side.vals();
    float sum = 0.0f;
    auto cursor = ld.begin();
    for (std::size_t i = 0; i < id.size() && cursor != ld.end(); ++i) {
        // lookups move forward only, so each search starts where the last ended
        cursor = std::lower_bound(cursor, ld.end(), id[i]);
        if (cursor != ld.end() && *cursor == id[i]) {
            sum += iv[i] * lv[static_cast<std::size_t>(cursor - ld.begin())];
            ++cursor;
        }
    }
    return sum;
}

float QuantizedQuery::dot(const SparseVector& other) const noexcept {
    const auto od = other.dims();
    const auto ov = other.vals();
    std::size_t i = 0;
    std::size_t j = 0;
    float sum = 0.0f;
    while (i < dims.size() && j < od.size()) {
        if (dims[i] < od[j]) {
            ++i;
        } else if (od[j] < dims[i]) {
            ++j;
        } else {
            sum += static_cast<float>(qvals[i]) * ov[j];
            ++i;
            ++j;
        }
    }
    return sum * scale;
}

QuantizedQuery quantize_query(const SparseVector& q) {
    if (q.empty()) {
        throw Error(ErrorCode::kEmptyInput, "cannot quantize an empty query");
    }
    const auto vals = q.vals();
    const float max_val = *std::max_element(vals.begin(), vals.end());
    QuantizedQuery out;
    out.dims.assign(q.dims().begin(), q.dims().end());
    out.scale = max_val / 32767.0f;
    out.qvals.reserve(vals.size());
    for (float v : vals) {
        // v * 32767 / max in double keeps exact halves exact before rounding
        const double scaled = static_cast<double>(v) * 32767.0 / static_cast<double>(max_val);
        out.qvals.push_back(static_cast<int16_t>(std::lround(scaled)));
    }
    return out;
}

}  // namespace spanns
