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

#include "spanns/visited.h"

#include <algorithm>
#include <bit>
#include <string>

#include "spanns/error.h"

namespace spanns {

BloomVisited::BloomVisited(std::size_t num_bits, uint32_t num_hashes)
    : words_((num_bits + 63) / 64, 0), mask_(num_bits - 1), num_hashes_(num_hashes) {
    if (num_bits == 0 || !std::has_single_bit(num_bits)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "bloom filter size must be a power of two, got " + std::to_string(num_bits));
    }
    if (num_hashes == 0) {
        throw Error(ErrorCode::kInvalidArgument, "bloom filter needs at least one hash");
    }
}

void BloomVisited::insert(uint64_t key) noexcept {
    const uint64_t h1 = mix_a(key);
    const uint64_t h2 = mix_b(key) | 1ULL;
    for (uint32_t i = 0; i < num_hashes_; ++i) {
        const uint64_t pos = (h1 + i * h2) & mask_;
        words_[pos >> 6] |= 1ULL << (pos & 63);
    }
}

bool BloomVisited::maybe_contains(uint64_t key) const noexcept {
    const uint64_t h1 = mix_a(key);
    const uint64_t h2 = mix_b(key) | 1ULL;
    for (uint32_t i = 0; i < num_hashes_; ++i) {
        const uint64_t pos = (h1 + i * h2) & mask_;
        if (((words_[pos >> 6] >> (pos & 63)) & 1ULL) == 0) {
            return false;
        }
    }
    return true;
}

void BloomVisited::clear() noexcept { std::fill(words_.begin(), words_.end(), 0); }

}  // namespace spanns
