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
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "spanns/index.h"
#include "spanns/kernels.h"
#include "spanns/topk.h"
#include "spanns/visited.h"

namespace spanns {

/// When the pruning threshold is re-read from the top-k queue.
enum class ThresholdRefresh {
    kPerPosting,  // once before each posting's silhouette pass
    kPerCluster,  // before every cluster; strict in-order execution
};

struct QueryParams {
    uint32_t k = 10;
    /// Clusters whose silhouette score is below beta * threshold are skipped.
    float beta = 1.0f;
    /// Number of highest-valued query dims to process; 0 processes all.
    uint32_t max_query_dims = 0;
    /// Score silhouettes with a 16-bit fixed-point copy of the query.
    bool use_fixed_point = false;
    bool use_bloom_visited = false;
    uint32_t bloom_bits = 1u << 16;
    uint32_t bloom_hashes = 3;
    /// Lane count of the top-k queue; record r goes to lane r % lanes.
    uint32_t lanes = 4;
    ThresholdRefresh refresh = ThresholdRefresh::kPerPosting;

    /// Throws Error(kInvalidArgument) when k < 1, beta < 0 or lanes < 1.
    void validate() const;
};

struct SearchStats {
    uint64_t dims_probed = 0;
    uint64_t clusters_seen = 0;
    uint64_t clusters_pruned = 0;
    uint64_t clusters_skipped_visited = 0;
    uint64_t clusters_evaluated = 0;
    uint64_t records_scored = 0;
    uint64_t records_deduped = 0;

    SearchStats& operator+=(const SearchStats& o);
    bool operator==(const SearchStats&) const = default;
};

struct SearchResult {
    std::vector<Scored> hits;  // result order, at most k
    SearchStats stats;
};

struct DimValue {
    DimId dim;
    float value;

    bool operator==(const DimValue&) const = default;
};

/// Query entries by descending value, ties to the lower dim.
std::vector<DimValue> sort_query_dims(const SparseVector& q);

/// The query as seen by the silhouette check: float or fixed point.
class SilhouetteScorer {
 public:
    explicit SilhouetteScorer(const SparseVector& q, bool fixed_point = false);

    float score(const SparseVector& silhouette) const noexcept {
        return quantized_ ? quantized_->dot(silhouette) : dot(*query_, silhouette);
    }

 private:
    const SparseVector* query_;
    std::optional<QuantizedQuery> quantized_;
};

struct ClusterCandidate {
    const Cluster* cluster;
    float silhouette_score;
};

/// Scores the posting's unvisited clusters against the query, keeps those
/// scoring at least beta * threshold, marks them visited and returns them by
/// descending silhouette score (ties by position in the posting).
std::vector<ClusterCandidate> silhouette_pass(const SilhouetteScorer& scorer, const Posting& posting,
                                              float threshold, float beta, ClusterVisited& visited,
                                              SearchStats* stats = nullptr);

/// Exact scores of the not-yet-seen records among `member_ids`, against full
/// forward records. Each scored id is marked seen. Throws Error(kOutOfRange)
/// for an id outside the forward index.
std::vector<Scored> score_candidates(const SparseVector& q, std::span<const RecordId> member_ids,
                                     std::span<const SparseVector> forward, ExactVisited& seen_records,
                                     SearchStats* stats = nullptr);

/// One cluster decision, reported in processing order.
struct ClusterVisit {
    const Cluster* cluster;
    DimId dim;
    float silhouette_score;
    float threshold;  // threshold the admission test used
    bool admitted;
};

using ClusterVisitor = std::function<void(const ClusterVisit&)>;

/// Top-k search. Throws Error(kInvalidArgument) for invalid params.
SearchResult search(const HybridIndex& index, const SparseVector& q, const QueryParams& params,
                    const ClusterVisitor& visitor = {});

/// Batch search, one OpenMP task per query.
std::vector<SearchResult> search_batch(const HybridIndex& index, std::span<const SparseVector> queries,
                                       const QueryParams& params);

std::vector<SearchResult> search_batch_serial(const HybridIndex& index,
                                              std::span<const SparseVector> queries,
                                              const QueryParams& params);

}  // namespace spanns
