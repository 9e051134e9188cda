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

#include "spanns/topk.h"

#include <algorithm>
#include <string>

#include "spanns/error.h"

namespace spanns {

SegmentedTopK::SegmentedTopK(std::size_t lanes, std::size_t k) : k_(k), lanes_(lanes) {
    if (lanes == 0 || k == 0) {
        throw Error(ErrorCode::kInvalidArgument, "top-k needs at least one lane of capacity >= 1");
    }
    for (auto& lane : lanes_) {
        lane.reserve(k);
    }
}

bool SegmentedTopK::push(std::size_t lane, float score, RecordId id) {
    if (lane >= lanes_.size()) {
        throw Error(ErrorCode::kOutOfRange,
                    "lane " + std::to_string(lane) + " of " + std::to_string(lanes_.size()));
    }
    auto& heap = lanes_[lane];
    const Scored entry{score, id};
    if (heap.size() < k_) {
        heap.push_back(entry);
        std::push_heap(heap.begin(), heap.end(), ranks_before);
        return true;
    }
    if (!ranks_before(entry, heap.front())) {
        return false;
    }
    std::pop_heap(heap.begin(), heap.end(), ranks_before);
    heap.back() = entry;
    std::push_heap(heap.begin(), heap.end(), ranks_before);
    return true;
}

float SegmentedTopK::lane_threshold(std::size_t lane) const noexcept {
    if (lane >= lanes_.size() || lanes_[lane].size() < k_) {
        return 0.0f;
    }
    return lanes_[lane].front().score;
}

float SegmentedTopK::global_threshold() const {
    if (lanes_.size() == 1) {
        return lane_threshold(0);
    }
    if (size() < k_) {
        return 0.0f;
    }
    std::vector<float> scores;
    scores.reserve(size());
    for (const auto& lane : lanes_) {
        for (const auto& e : lane) {
            scores.push_back(e.score);
        }
    }
    std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(k_ - 1),
                     scores.end(), std::greater<>());
    return scores[k_ - 1];
}

std::vector<Scored> SegmentedTopK::merge(std::size_t n) const {
    if (n > lanes_.size()) {
        throw Error(ErrorCode::kOutOfRange, "cannot merge " + std::to_string(n) + " of " +
                                                std::to_string(lanes_.size()) + " lanes");
    }
    std::vector<Scored> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.insert(out.end(), lanes_[i].begin(), lanes_[i].end());
    }
    std::sort(out.begin(), out.end(), ranks_before);
    if (out.size() > n * k_) {
        out.resize(n * k_);
    }
    return out;
}

std::size_t SegmentedTopK::size() const noexcept {
    std::size_t total = 0;
    for (const auto& lane : lanes_) {
        total += lane.size();
    }
    return total;
}

}  // namespace spanns
