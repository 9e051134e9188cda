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
#include <utility>
#include <variant>
#include <vector>

namespace spanns {

/// Integer mixers used by the Bloom filter. Both are xor/shift/multiply
/// finalizers; the second uses different constants so the two are
/// independent enough for double hashing.
inline uint64_t mix_a(uint64_t x) noexcept {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
}

inline uint64_t mix_b(uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Bloom-filter visited list with probe positions h1 + i*h2 (mod bits).
class BloomVisited {
 public:
    /// `num_bits` must be a power of two; throws Error(kInvalidArgument) otherwise.
    BloomVisited(std::size_t num_bits, uint32_t num_hashes);

    void insert(uint64_t key) noexcept;
    bool maybe_contains(uint64_t key) const noexcept;
    void clear() noexcept;

    std::size_t num_bits() const noexcept { return mask_ + 1; }
    uint32_t num_hashes() const noexcept { return num_hashes_; }

 private:
    std::vector<uint64_t> words_;
    uint64_t mask_;
    uint32_t num_hashes_;
};

/// Exact visited set over a dense key range [0, capacity).
class ExactVisited {
 public:
    explicit ExactVisited(std::size_t capacity) : words_((capacity + 63) / 64, 0) {}

    bool contains(uint64_t key) const noexcept {
        return (words_[key >> 6] >> (key & 63)) & 1ULL;
    }
    void insert(uint64_t key) noexcept { words_[key >> 6] |= 1ULL << (key & 63); }

    /// Inserts and reports whether the key was new.
    bool test_and_insert(uint64_t key) noexcept {
        const uint64_t bit = 1ULL << (key & 63);
        uint64_t& w = words_[key >> 6];
        const bool fresh = (w & bit) == 0;
        w |= bit;
        return fresh;
    }

    std::size_t capacity() const noexcept { return words_.size() * 64; }

 private:
    std::vector<uint64_t> words_;
};

/// Cluster visited list: exact bit set by default, Bloom filter on request.
class ClusterVisited {
 public:
    static ClusterVisited exact(std::size_t num_clusters) {
        return ClusterVisited(ExactVisited(num_clusters));
    }
    static ClusterVisited bloom(std::size_t num_bits, uint32_t num_hashes) {
        return ClusterVisited(BloomVisited(num_bits, num_hashes));
    }

    bool contains(uint64_t cluster_id) const noexcept {
        if (const auto* b = std::get_if<BloomVisited>(&impl_)) {
            return b->maybe_contains(cluster_id);
        }
        return std::get<ExactVisited>(impl_).contains(cluster_id);
    }

    void insert(uint64_t cluster_id) noexcept {
        if (auto* b = std::get_if<BloomVisited>(&impl_)) {
            b->insert(cluster_id);
        } else {
            std::get<ExactVisited>(impl_).insert(cluster_id);
        }
    }

    bool is_bloom() const noexcept { return std::holds_alternative<BloomVisited>(impl_); }

 private:
    explicit ClusterVisited(std::variant<ExactVisited, BloomVisited> impl) : impl_(std::move(impl)) {}

    std::variant<ExactVisited, BloomVisited> impl_;
};

}  // namespace spanns
