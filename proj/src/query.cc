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

#include "spanns/query.h"

#include <algorithm>
#include <string>

#include "spanns/error.h"

namespace spanns {

void QueryParams::validate() const {
    if (k < 1) {
        throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
    }
    if (!(beta >= 0.0f)) {
        throw Error(ErrorCode::kInvalidArgument, "beta must be >= 0");
    }
    if (lanes < 1) {
        throw Error(ErrorCode::kInvalidArgument, "top-k queue needs at least one lane");
    }
}

SearchStats& SearchStats::operator+=(const SearchStats& o) {
    dims_probed += o.dims_probed;
    clusters_seen += o.clusters_seen;
    clusters_pruned += o.clusters_pruned;
    clusters_skipped_visited += o.clusters_skipped_visited;
    clusters_evaluated += o.clusters_evaluated;
    records_scored += o.records_scored;
    records_deduped += o.records_deduped;
    return *this;
}

std::vector<DimValue> sort_query_dims(const SparseVector& q) {
    std::vector<DimValue> out;
    out.reserve(q.nnz());
    for (std::size_t i = 0; i < q.nnz(); ++i) {
        out.push_back(DimValue{q.dim(i), q.val(i)});
    }
    // input is dim-ascending, so a stable sort keeps the lower dim first on ties
    std::stable_sort(out.begin(), out.end(),
                     [](const DimValue& a, const DimValue& b) { return a.value > b.value; });
    return out;
}

SilhouetteScorer::SilhouetteScorer(const SparseVector& q, bool fixed_point) : query_(&q) {
    if (fixed_point && !q.empty()) {
        quantized_ = quantize_query(q);
    }
}

namespace {

// Unvisited clusters of `posting` with their silhouette scores, best first.
std::vector<ClusterCandidate> rank_unvisited(const SilhouetteScorer& scorer, const Posting& posting,
                                             const ClusterVisited& visited, SearchStats* stats) {
    std::vector<ClusterCandidate> ranked;
    ranked.reserve(posting.clusters.size());
    for (const Cluster& c : posting.clusters) {
        if (stats) {
            ++stats->clusters_seen;
        }
        if (visited.contains(c.id)) {
            if (stats) {
                ++stats->clusters_skipped_visited;
            }
            continue;
        }
        ranked.push_back(ClusterCandidate{&c, scorer.score(c.silhouette)});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const ClusterCandidate& a, const ClusterCandidate& b) {
        return a.silhouette_score > b.silhouette_score;
    });
    return ranked;
}

}  // namespace

std::vector<ClusterCandidate> silhouette_pass(const SilhouetteScorer& scorer, const Posting& posting,
                                              float threshold, float beta, ClusterVisited& visited,
                                              SearchStats* stats) {
    auto ranked = rank_unvisited(scorer, posting, visited, stats);
    const float bar = beta * threshold;
    std::vector<ClusterCandidate> survivors;
    survivors.reserve(ranked.size());
    for (const auto& cand : ranked) {
        if (cand.silhouette_score >= bar) {
            survivors.push_back(cand);
        } else if (stats) {
            ++stats->clusters_pruned;
        }
    }
    for (const auto& cand : survivors) {
        visited.insert(cand.cluster->id);
    }
    if (stats) {
        stats->clusters_evaluated += survivors.size();
    }
    return survivors;
}

std::vector<Scored> score_candidates(const SparseVector& q, std::span<const RecordId> member_ids,
                                     std::span<const SparseVector> forward, ExactVisited& seen_records,
                                     SearchStats* stats) {
    std::vector<Scored> out;
    out.reserve(member_ids.size());
    for (RecordId id : member_ids) {
        if (id >= forward.size()) {
            throw Error(ErrorCode::kOutOfRange,
                        "record " + std::to_string(id) + " outside forward index of " +
                            std::to_string(forward.size()));
        }
        if (!seen_records.test_and_insert(id)) {
            if (stats) {
                ++stats->records_deduped;
            }
            continue;
        }
        out.push_back(Scored{dot_shorter_side(q, forward[id]), id});
    }
    if (stats) {
        stats->records_scored += out.size();
    }
    return out;
}

SearchResult search(const HybridIndex& index, const SparseVector& q, const QueryParams& params,
                    const ClusterVisitor& visitor) {
    params.validate();
    SearchResult result;
    if (q.empty()) {
        return result;
    }
    auto order = sort_query_dims(q);
    if (params.max_query_dims > 0 && params.max_query_dims < order.size()) {
        order.resize(params.max_query_dims);
    }

    const SilhouetteScorer scorer(q, params.use_fixed_point);
    SegmentedTopK topk(params.lanes, params.k);
    ClusterVisited visited = params.use_bloom_visited
                                 ? ClusterVisited::bloom(params.bloom_bits, params.bloom_hashes)
                                 : ClusterVisited::exact(index.num_clusters());
    ExactVisited seen(index.num_records());
    SearchStats& stats = result.stats;
    const auto forward = std::span<const SparseVector>(index.forward());

    for (const DimValue& dv : order) {
        const Posting* posting = index.find(dv.dim);
        if (posting == nullptr) {
            continue;
        }
        ++stats.dims_probed;
        const auto ranked = rank_unvisited(scorer, *posting, visited, &stats);
        float threshold = topk.global_threshold();
        for (const auto& cand : ranked) {
            if (params.refresh == ThresholdRefresh::kPerCluster) {
                threshold = topk.global_threshold();
            }
            const bool admitted = cand.silhouette_score >= params.beta * threshold;
            if (visitor) {
                visitor(ClusterVisit{cand.cluster, dv.dim, cand.silhouette_score, threshold, admitted});
            }
            if (!admitted) {
                ++stats.clusters_pruned;
                continue;
            }
            visited.insert(cand.cluster->id);
            ++stats.clusters_evaluated;
            for (const Scored& s : score_candidates(q, cand.cluster->members, forward, seen, &stats)) {
                topk.push(s.id % params.lanes, s.score, s.id);
            }
        }
    }

    result.hits = topk.merge(topk.lanes());
    if (result.hits.size() > params.k) {
        result.hits.resize(params.k);
    }
    return result;
}

std::vector<SearchResult> search_batch(const HybridIndex& index, std::span<const SparseVector> queries,
                                       const QueryParams& params) {
    params.validate();
    std::vector<SearchResult> out(queries.size());
    const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[i] = search(index, queries[i], params);
    }
    return out;
}

std::vector<SearchResult> search_batch_serial(const HybridIndex& index,
                                              std::span<const SparseVector> queries,
                                              const QueryParams& params) {
    std::vector<SearchResult> out;
    out.reserve(queries.size());
    for (const auto& q : queries) {
        out.push_back(search(index, q, params));
    }
    return out;
}

}  // namespace spanns
