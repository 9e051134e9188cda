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

#include "spanns/sparse_vector.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "spanns/error.h"

namespace spanns {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::kInvalidArgument: return "invalid argument";
        case ErrorCode::kEmptyInput: return "empty input";
        case ErrorCode::kOutOfRange: return "out of range";
        case ErrorCode::kIo: return "io error";
        case ErrorCode::kBadMagic: return "bad magic";
        case ErrorCode::kTruncated: return "truncated payload";
        case ErrorCode::kNonAscending: return "non-ascending dims";
        case ErrorCode::kInvalidValue: return "invalid value";
        case ErrorCode::kVersionMismatch: return "version mismatch";
        case ErrorCode::kDanglingId: return "dangling id";
    }
    return "unknown";
}

SparseVector::SparseVector(std::vector<DimId> dims, std::vector<float> vals) {
    if (dims.size() != vals.size()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "dims/vals length mismatch (" + std::to_string(dims.size()) + " vs " +
                        std::to_string(vals.size()) + ")");
    }
    std::size_t out = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i > 0 && dims[i] <= dims[i - 1]) {
            throw Error(ErrorCode::kNonAscending,
                        "dim " + std::to_string(dims[i]) + " follows " + std::to_string(dims[i - 1]));
        }
        if (!std::isfinite(vals[i]) || vals[i] < 0.0f) {
            throw Error(ErrorCode::kInvalidValue, "value at dim " + std::to_string(dims[i]) +
                                                      " must be finite and non-negative");
        }
        if (vals[i] == 0.0f) {
            continue;
        }
        dims[out] = dims[i];
        vals[out] = vals[i];
        ++out;
    }
    dims.resize(out);
    vals.resize(out);
    dims_ = std::move(dims);
    vals_ = std::move(vals);
}

SparseVector::SparseVector(std::initializer_list<std::pair<DimId, float>> pairs)
    : SparseVector(from_pairs(std::vector<std::pair<DimId, float>>(pairs))) {}

SparseVector SparseVector::from_pairs(std::vector<std::pair<DimId, float>> pairs) {
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<DimId> dims;
    std::vector<float> vals;
    dims.reserve(pairs.size());
    vals.reserve(pairs.size());
    for (const auto& [d, v] : pairs) {
        dims.push_back(d);
        vals.push_back(v);
    }
    return SparseVector(std::move(dims), std::move(vals));
}

float SparseVector::value_at(DimId dim) const noexcept {
    auto it = std::lower_bound(dims_.begin(), dims_.end(), dim);
    if (it == dims_.end() || *it != dim) {
        return 0.0f;
    }
    return vals_[static_cast<std::size_t>(it - dims_.begin())];
}

double SparseVector::l1() const noexcept {
    double sum = 0.0;
    for (float v : vals_) {
        sum += v;
    }
    return sum;
}

}  // namespace spanns
