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


#include <random>

#include <gtest/gtest.h>

#include "spanns/builder.h"
#include "spanns/error.h"
#include "spanns/eval.h"
#include "spanns/query.h"
#include "spanns/synth.h"
#include "test_util.h"

namespace spanns {
namespace {

using testing::code_of;
using testing::x4;

HybridIndex x4_index() {
    BuildParams p;
    p.target_cluster_size = 4;
    return build_index(x4(), p);
}

std::vector<RecordId> ids_of(const std::vector<Scored>& hits) {
    std::vector<RecordId> out;
    for (const auto& h : hits) out.push_back(h.id);
    return out;
}

TEST(SortQueryDims, Examples) {
    EXPECT_EQ(sort_query_dims(SparseVector{{2, 1.0f}, {3, 2.0f}}),
              (std::vector<DimValue>{{3, 2.0f}, {2, 1.0f}}));
    EXPECT_TRUE(sort_query_dims(SparseVector{}).empty());
    EXPECT_EQ(sort_query_dims(SparseVector{{1, 2.0f}, {7, 2.0f}}),
              (std::vector<DimValue>{{1, 2.0f}, {7, 2.0f}}));
}

TEST(SilhouettePass, ZeroThresholdKeepsEverything) {
    const HybridIndex index = x4_index();
    const SparseVector q{{2, 1.0f}, {3, 2.0f}};
    const SilhouetteScorer scorer(q);
    auto visited = ClusterVisited::exact(index.num_clusters());
    const auto out = silhouette_pass(scorer, *index.find(0), 0.0f, 1.0f, visited);
    EXPECT_EQ(out.size(), 1u);  // score 0 still passes a zero threshold
}

TEST(SilhouettePass, PrunesBelowThresholdAndSkipsVisited) {
    Posting posting;
    posting.dim = 3;
    posting.clusters.push_back(Cluster{0, SparseVector{{2, 3.0f}, {3, 4.0f}}, {0}});
    const SparseVector q{{2, 1.0f}, {3, 2.0f}};
    const SilhouetteScorer scorer(q);
    auto visited = ClusterVisited::exact(1);
    SearchStats stats;
    EXPECT_TRUE(silhouette_pass(scorer, posting, 12.0f, 1.0f, visited, &stats).empty());
    EXPECT_EQ(stats.clusters_pruned, 1u);
    // 11 >= 1.0 * 11
    const auto first = silhouette_pass(scorer, posting, 11.0f, 1.0f, visited, &stats);
    ASSERT_EQ(first.size(), 1u);
    EXPECT_EQ(first[0].silhouette_score, 11.0f);
    EXPECT_TRUE(silhouette_pass(scorer, posting, 0.0f, 1.0f, visited, &stats).empty());
    EXPECT_EQ(stats.clusters_skipped_visited, 1u);
}

TEST(SilhouettePass, OrdersByScore) {
    Posting posting;
    posting.clusters.push_back(Cluster{0, SparseVector{{1, 1.0f}}, {0}});
    posting.clusters.push_back(Cluster{1, SparseVector{{1, 3.0f}}, {1}});
    posting.clusters.push_back(Cluster{2, SparseVector{{1, 3.0f}}, {2}});
    const SparseVector q{{1, 1.0f}};
    auto visited = ClusterVisited::exact(3);
    const auto out = silhouette_pass(SilhouetteScorer(q), posting, 0.0f, 1.0f, visited);
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[0].cluster->id, 1u);
    EXPECT_EQ(out[1].cluster->id, 2u);
    EXPECT_EQ(out[2].cluster->id, 0u);
}

TEST(ScoreCandidates, X4Examples) {
    const auto data = x4();
    const SparseVector q{{2, 1.0f}, {3, 2.0f}};
    ExactVisited seen(data.size());
    const std::vector<RecordId> ids{0, 2};
    EXPECT_EQ(score_candidates(q, ids, data, seen), (std::vector<Scored>{{3.0f, 0}, {10.0f, 2}}));
    const std::vector<RecordId> again{2};
    EXPECT_TRUE(score_candidates(q, again, data, seen).empty());
    const std::vector<RecordId> bad{9};
    EXPECT_EQ(code_of([&] { score_candidates(q, bad, data, seen); }), ErrorCode::kOutOfRange);
}

TEST(Search, X4Examples) {
    const HybridIndex index = x4_index();
    QueryParams p;
    p.k = 2;
    const auto r = search(index, SparseVector{{2, 1.0f}, {3, 2.0f}}, p);
    EXPECT_EQ(r.hits, (std::vector<Scored>{{10.0f, 2}, {3.0f, 0}}));
    EXPECT_TRUE(search(index, SparseVector{}, p).hits.empty());
    p.k = 1;
    EXPECT_EQ(search(index, SparseVector{{1, 1.0f}}, p).hits, (std::vector<Scored>{{5.0f, 3}}));
}

TEST(Search, VisitorSeesPostingsInQueryValueOrder) {
    const HybridIndex index = x4_index();
    std::vector<DimId> dims;
    search(index, SparseVector{{2, 1.0f}, {3, 2.0f}}, QueryParams{},
           [&](const ClusterVisit& v) { dims.push_back(v.dim); });
    EXPECT_EQ(dims, (std::vector<DimId>{3, 2}));
}

TEST(Search, InvalidParams) {
    const HybridIndex index = x4_index();
    QueryParams p;
    p.k = 0;
    EXPECT_EQ(code_of([&] { search(index, SparseVector{{1, 1.0f}}, p); }), ErrorCode::kInvalidArgument);
    p = QueryParams{};
    p.lanes = 0;
    EXPECT_EQ(code_of([&] { search(index, SparseVector{{1, 1.0f}}, p); }), ErrorCode::kInvalidArgument);
}

struct Corpus {
    SynthData data;
    std::vector<GroundTruthRow> truth;
};

const Corpus& corpus() {
    static const Corpus c = [] {
        SynthParams sp;
        sp.num_records = 1500;
        sp.num_dims = 3000;
        sp.nnz_mean = 40;
        sp.nnz_std = 10;
        sp.num_topics = 40;
        sp.topic_vocab = 60;
        sp.num_queries = 40;
        sp.seed = 99;
        Corpus out;
        out.data = generate_synthetic(sp);
        out.truth = exact_topk_batch(out.data.records, out.data.queries, 50);
        return out;
    }();
    return c;
}

TEST(Search, PropertyExactModeMatchesOracle) {
    const auto& c = corpus();
    BuildParams bp;
    bp.target_cluster_size = 16;
    const HybridIndex index = build_index(c.data.records, bp);
    for (uint32_t k : {1u, 10u, 50u}) {
        for (auto refresh : {ThresholdRefresh::kPerPosting, ThresholdRefresh::kPerCluster}) {
            QueryParams qp;
            qp.k = k;
            qp.refresh = refresh;
            for (std::size_t i = 0; i < c.data.queries.size(); ++i) {
                const auto r = search(index, c.data.queries[i], qp);
                const GroundTruthRow want(c.truth[i].begin(), c.truth[i].begin() + k);
                ASSERT_EQ(r.hits, want) << "query " << i << " k " << k;
            }
        }
    }
}

TEST(Search, LaneCountDoesNotChangeResults) {
    const auto& c = corpus();
    BuildParams bp;
    bp.posting_keep_frac = 0.3;
    bp.record_keep_frac = 0.5;
    bp.alpha = 0.7;
    const HybridIndex index = build_index(c.data.records, bp);
    QueryParams one;
    one.lanes = 1;
    const auto base = search_batch_serial(index, c.data.queries, one);
    for (uint32_t lanes : {2u, 3u, 8u}) {
        QueryParams qp;
        qp.lanes = lanes;
        const auto r = search_batch_serial(index, c.data.queries, qp);
        for (std::size_t i = 0; i < r.size(); ++i) {
            ASSERT_EQ(r[i].hits, base[i].hits);
            ASSERT_EQ(r[i].stats, base[i].stats);
        }
    }
}

TEST(Search, PropertyRecallNondecreasingInQueryDims) {
    const auto& c = corpus();
    BuildParams bp;
    bp.posting_keep_frac = 0.3;
    bp.record_keep_frac = 0.4;
    bp.alpha = 0.6;
    const HybridIndex index = build_index(c.data.records, bp);
    for (std::size_t i = 0; i < c.data.queries.size(); ++i) {
        double prev = -1.0;
        for (uint32_t q = 1; q <= c.data.queries[i].nnz(); ++q) {
            QueryParams qp;
            qp.max_query_dims = q;
            const double rec = recall_at_k(search(index, c.data.queries[i], qp).hits, c.truth[i], qp.k);
            ASSERT_GE(rec, prev) << "query " << i << " Q " << q;
            prev = rec;
        }
    }
}

TEST(Search, LargerBetaScoresFewerRecords) {
    const auto& c = corpus();
    const HybridIndex index = build_index(c.data.records, BuildParams{});
    QueryParams exact;
    QueryParams strict;
    strict.beta = 3.0f;
    const auto a = run_benchmark(index, c.data.queries, c.truth, exact);
    const auto b = run_benchmark(index, c.data.queries, c.truth, strict);
    EXPECT_EQ(a.recall, 1.0);
    EXPECT_LE(b.recall, a.recall);
    EXPECT_LT(b.mean_records_scored, a.mean_records_scored);
}

TEST(Search, BloomVisitedNeverBeatsExact) {
    const auto& c = corpus();
    BuildParams bp;
    bp.target_cluster_size = 8;
    const HybridIndex index = build_index(c.data.records, bp);
    QueryParams exact;
    QueryParams bloom;
    bloom.use_bloom_visited = true;
    bloom.bloom_bits = 256;  // small on purpose: plenty of false positives
    bloom.bloom_hashes = 2;
    const auto a = run_benchmark(index, c.data.queries, c.truth, exact);
    const auto b = run_benchmark(index, c.data.queries, c.truth, bloom);
    EXPECT_LE(b.recall, a.recall);
}

TEST(Search, FixedPointStaysCloseToFloat) {
    const auto& c = corpus();
    BuildParams bp;
    bp.posting_keep_frac = 0.4;
    bp.alpha = 0.8;
    const HybridIndex index = build_index(c.data.records, bp);
    QueryParams fp;
    fp.use_fixed_point = true;
    const auto a = run_benchmark(index, c.data.queries, c.truth, QueryParams{});
    const auto b = run_benchmark(index, c.data.queries, c.truth, fp);
    EXPECT_NEAR(a.recall, b.recall, 0.05);
}

}  // namespace
}  // namespace spanns
