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
#include <span>
#include <vector>

#include "spanns/index.h"
#include "spanns/sparse_vector.h"

namespace spanns {

struct PostingEntry {
    RecordId id;
    float value;

    bool operator==(const PostingEntry&) const = default;
};

/// Level-1 content postings before clustering.
struct PostingList {
    DimId dim;
    std::vector<PostingEntry> entries;  // ascending id
};

/// Number of items kept when retaining `frac` of `n`: ceil(frac * n), at least
/// one when n > 0.
std::size_t keep_count(double frac, std::size_t n) noexcept;

/// Inverted lists for every dimension that occurs in `dataset`, each pruned to
/// its ceil(keep_frac * len) highest values (ties to the lower id). Sorted by
/// dim; entries sorted by id.
std::vector<PostingList> build_postings(std::span<const SparseVector> dataset, double keep_frac);

/// Keeps the ceil(keep_frac * nnz) largest entries (ties to the lower dim).
SparseVector truncate_record(const SparseVector& x, double keep_frac);

/// 1 - |A n B| / |A u B| over sorted dim sets; 0 when both are empty.
double jaccard_distance(std::span<const DimId> a, std::span<const DimId> b) noexcept;

/// One clustering input: a record id and the dims of its truncated vector.
struct ClusterMember {
    RecordId id;
    std::span<const DimId> dims;
};

/// K-means under Jaccard distance with set-valued centroids.
///
/// The cluster count is ceil(n / target_cluster_size). Seeds are members at
/// evenly spaced positions of the id-sorted input. A centroid update keeps the
/// r most frequent dims of its members (ties to the lower dim), r being the
/// rounded mean member size. Clusters that end up empty take the member
/// farthest from its own centroid. Returns member ids per cluster, ascending.
std::vector<std::vector<RecordId>> cluster_posting(std::span<const ClusterMember> members,
                                                   const BuildParams& params);

/// Round-robin alpha-massive silhouette of `members` (given in ascending
/// record order). Values are taken from the element-wise max summary.
SparseVector build_silhouette(std::span<const SparseVector* const> members, double alpha);

/// Element-wise max over `members`.
SparseVector elementwise_max(std::span<const SparseVector* const> members);

/// Builds the full index. Postings are processed in parallel with OpenMP; the
/// result is identical to build_index_serial.
HybridIndex build_index(std::vector<SparseVector> dataset, const BuildParams& params);

/// Single-threaded reference build.
HybridIndex build_index_serial(std::vector<SparseVector> dataset, const BuildParams& params);

}  // namespace spanns
