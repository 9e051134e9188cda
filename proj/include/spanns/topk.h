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
#include <vector>

#include "spanns/sparse_vector.h"

namespace spanns {

struct Scored {
    float score = 0.0f;
    RecordId id = 0;

    bool operator==(const Scored&) const = default;
};

/// Global result order: higher score first, then lower id.
inline bool ranks_before(const Scored& a, const Scored& b) noexcept {
    return a.score > b.score || (a.score == b.score && a.id < b.id);
}

/// M independent bounded heaps ("lanes") of capacity k each. Lanes can be read
/// on their own or merged into a top-(n*k) list.
///
/// Admission uses the full result order, so an entry tied on score with the
/// lane minimum displaces it when its id is lower. This keeps the retained set
/// equal to the exact top-k of everything pushed into the lane.
class SegmentedTopK {
 public:
    SegmentedTopK(std::size_t lanes, std::size_t k);

    /// Inserts when the lane has room or the entry ranks before the lane's
    /// current worst. Throws Error(kOutOfRange) for a bad lane.
    bool push(std::size_t lane, float score, RecordId id);

    /// k-th best score of lane 0, or 0 while that lane holds fewer than k.
    float threshold() const noexcept { return lane_threshold(0); }

    float lane_threshold(std::size_t lane) const noexcept;

    /// k-th best score across all lanes, or 0 while fewer than k entries are
    /// held in total.
    float global_threshold() const;

    /// Top n*k entries of the first n lanes in result order.
    /// Throws Error(kOutOfRange) when n exceeds the lane count.
    std::vector<Scored> merge(std::size_t n) const;

    std::size_t lanes() const noexcept { return lanes_.size(); }
    std::size_t k() const noexcept { return k_; }
    std::size_t lane_size(std::size_t lane) const { return lanes_.at(lane).size(); }
    std::size_t size() const noexcept;

 private:
    std::size_t k_;
    // each lane is a heap whose front is its worst entry
    std::vector<std::vector<Scored>> lanes_;
};

}  // namespace spanns
