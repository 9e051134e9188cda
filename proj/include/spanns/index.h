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
#include <vector>

#include "spanns/sparse_vector.h"

namespace spanns {

using ClusterId = uint64_t;

struct BuildParams {
    /// Fraction of each dimension's posting kept, by value at that dimension.
    double posting_keep_frac = 1.0;
    /// Fraction of each record's nonzeros kept before clustering.
    double record_keep_frac = 1.0;
    /// Fraction of the summary's L1 mass a silhouette must retain.
    double alpha = 1.0;
    uint32_t target_cluster_size = 64;
    uint32_t kmeans_iters = 10;
    uint64_t seed = 0;

    /// Throws Error(kInvalidArgument) when a fraction is outside (0, 1] or the
    /// cluster size is zero.
    void validate() const;

    bool operator==(const BuildParams&) const = default;
};

struct Cluster {
    ClusterId id = 0;
    SparseVector silhouette;
    std::vector<RecordId> members;  // ascending

    bool operator==(const Cluster&) const = default;
};

struct Posting {
    DimId dim = 0;
    std::vector<Cluster> clusters;

    bool operator==(const Posting&) const = default;
};

/// Two-level inverted index: dimension -> posting -> clusters -> record ids,
/// plus the forward index of original records.
///
/// Cluster ids are dense, assigned 0..num_clusters()-1 in posting order.
class HybridIndex {
 public:
    HybridIndex() = default;

    /// Postings must be sorted by dim. Throws Error(kDanglingId) if any member
    /// id is not a valid forward index and Error(kInvalidArgument) on other
    /// structural violations.
    HybridIndex(std::vector<Posting> postings, std::vector<SparseVector> forward, BuildParams params);

    const std::vector<Posting>& postings() const noexcept { return postings_; }
    const std::vector<SparseVector>& forward() const noexcept { return forward_; }
    const BuildParams& params() const noexcept { return params_; }

    /// Posting for `dim`, or nullptr.
    const Posting* find(DimId dim) const noexcept {
        if (dim >= slot_of_dim_.size() || slot_of_dim_[dim] == kNoSlot) {
            return nullptr;
        }
        return &postings_[slot_of_dim_[dim]];
    }

    std::size_t num_clusters() const noexcept { return num_clusters_; }
    std::size_t num_records() const noexcept { return forward_.size(); }

    /// Sum of cluster sizes over all postings.
    std::size_t total_memberships() const noexcept;

    bool operator==(const HybridIndex& o) const {
        return params_ == o.params_ && forward_ == o.forward_ && postings_ == o.postings_;
    }

 private:
    static constexpr uint32_t kNoSlot = UINT32_MAX;

    std::vector<Posting> postings_;
    std::vector<SparseVector> forward_;
    BuildParams params_;
    std::vector<uint32_t> slot_of_dim_;
    std::size_t num_clusters_ = 0;
};

}  // namespace spanns
