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


#include <bit>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "spanns/error.h"
#include "spanns/kernels.h"
#include "spanns/sparse_vector.h"
#include "spanns/topk.h"
#include "spanns/visited.h"
#include "test_util.h"

namespace spanns {
namespace {

using testing::code_of;

TEST(SparseVector, RejectsUnsortedAndBadValues) {
    EXPECT_EQ(code_of([] { SparseVector({3, 1}, {1.0f, 1.0f}); }), ErrorCode::kNonAscending);
    EXPECT_EQ(code_of([] { SparseVector({1, 1}, {1.0f, 1.0f}); }), ErrorCode::kNonAscending);
    EXPECT_EQ(code_of([] { SparseVector({1}, {-1.0f}); }), ErrorCode::kInvalidValue);
    EXPECT_EQ(code_of([] { SparseVector({1}, {NAN}); }), ErrorCode::kInvalidValue);
    EXPECT_EQ(code_of([] { SparseVector({1, 2}, {1.0f}); }), ErrorCode::kInvalidArgument);
}

TEST(SparseVector, DropsExplicitZeros) {
    const SparseVector x({1, 4, 9}, {1.0f, 0.0f, 2.0f});
    EXPECT_EQ(x.nnz(), 2u);
    EXPECT_EQ(x.dim(1), 9u);
    EXPECT_EQ(x.value_at(4), 0.0f);
    EXPECT_EQ(x.dim_bound(), 10u);
}

TEST(SparseVector, FromPairsSortsAndRejectsDuplicates) {
    const auto x = SparseVector::from_pairs({{7, 1.0f}, {2, 3.0f}});
    EXPECT_EQ(x, (SparseVector{{2, 3.0f}, {7, 1.0f}}));
    EXPECT_THROW(SparseVector::from_pairs({{2, 1.0f}, {2, 3.0f}}), Error);
}

TEST(Dot, Examples) {
    const SparseVector a{{2, 1.0f}, {3, 2.0f}};
    const SparseVector b{{2, 2.0f}, {3, 4.0f}};
    EXPECT_EQ(dot(a, b), 10.0f);
    EXPECT_EQ(dot(SparseVector{{0, 1.0f}}, SparseVector{{1, 5.0f}}), 0.0f);
    EXPECT_EQ(dot(SparseVector{}, SparseVector{{3, 1.0f}}), 0.0f);
}

TEST(DotDual, Examples) {
    const SparseVector it{{3, 2.0f}};
    const SparseVector lookup{{0, 1.0f}, {2, 3.0f}, {3, 4.0f}};
    EXPECT_EQ(dot_dual(it, lookup), 8.0f);
    const SparseVector a{{2, 1.0f}, {3, 2.0f}};
    const SparseVector b{{2, 2.0f}, {3, 4.0f}};
    EXPECT_EQ(dot_dual(a, b), 10.0f);
    EXPECT_EQ(dot_dual(b, a), 10.0f);
}

TEST(DotDual, SelectorPicksShorterSide) {
    std::mt19937_64 rng(3);
    const auto q = testing::random_vector(rng, 1000, 50, 50);
    const auto r = testing::random_vector(rng, 1000, 10, 10);
    EXPECT_EQ(&choose_iterate_side(q, r), &r);
    EXPECT_EQ(&choose_iterate_side(r, q), &r);
    // ties go to the first argument
    const auto r2 = testing::random_vector(rng, 1000, 10, 10);
    EXPECT_EQ(&choose_iterate_side(r, r2), &r);
}

TEST(DotDual, PropertyBitEqualToMerge) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        const auto a = testing::random_vector(rng, 300, 60);
        const auto b = testing::random_vector(rng, 300, 60);
        const float ref = dot(a, b);
        ASSERT_EQ(std::bit_cast<uint32_t>(dot_dual(a, b)), std::bit_cast<uint32_t>(ref));
        ASSERT_EQ(std::bit_cast<uint32_t>(dot_dual(b, a)), std::bit_cast<uint32_t>(ref));
        ASSERT_EQ(std::bit_cast<uint32_t>(dot_shorter_side(a, b)), std::bit_cast<uint32_t>(ref));
    }
}

TEST(Quantize, Examples) {
    const auto full = quantize_query(SparseVector{{5, 32767.0f}});
    ASSERT_EQ(full.qvals.size(), 1u);
    EXPECT_EQ(full.qvals[0], 32767);
    EXPECT_EQ(full.scale, 1.0f);

    const auto half = quantize_query(SparseVector{{1, 1.0f}, {2, 0.5f}});
    EXPECT_EQ(half.dims, (std::vector<DimId>{1, 2}));
    EXPECT_EQ(half.qvals, (std::vector<int16_t>{32767, 16384}));
    EXPECT_FLOAT_EQ(half.scale, 1.0f / 32767.0f);
}

TEST(Quantize, EmptyQueryThrows) {
    EXPECT_EQ(code_of([] { quantize_query(SparseVector{}); }), ErrorCode::kEmptyInput);
}

TEST(Quantize, PropertyErrorBoundedByHalfStep) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        const auto q = testing::random_vector(rng, 500, 40, 1);
        const auto qq = quantize_query(q);
        for (std::size_t j = 0; j < q.nnz(); ++j) {
            ASSERT_LE(std::fabs(qq.dequantize(j) - q.val(j)), 0.5f * qq.scale * 1.001f + 1e-7f);
        }
    }
}

TEST(SegmentedTopK, PushExamples) {
    SegmentedTopK t(1, 2);
    EXPECT_TRUE(t.push(0, 5.0f, 1));
    EXPECT_EQ(t.threshold(), 0.0f);
    EXPECT_TRUE(t.push(0, 3.0f, 2));
    EXPECT_EQ(t.threshold(), 3.0f);
    EXPECT_FALSE(t.push(0, 1.0f, 3));
    EXPECT_TRUE(t.push(0, 4.0f, 4));
    const auto merged = t.merge(1);
    ASSERT_EQ(merged.size(), 2u);
    EXPECT_EQ(merged[0], (Scored{5.0f, 1}));
    EXPECT_EQ(merged[1], (Scored{4.0f, 4}));
}

TEST(SegmentedTopK, MergeDisjointSingletons) {
    SegmentedTopK t(2, 1);
    t.push(0, 9.0f, 10);
    t.push(1, 7.0f, 11);
    const auto merged = t.merge(2);
    ASSERT_EQ(merged.size(), 2u);
    EXPECT_EQ(merged[0], (Scored{9.0f, 10}));
    EXPECT_EQ(merged[1], (Scored{7.0f, 11}));
}

TEST(SegmentedTopK, Errors) {
    SegmentedTopK t(2, 3);
    EXPECT_EQ(code_of([&] { t.push(2, 1.0f, 0); }), ErrorCode::kOutOfRange);
    EXPECT_EQ(code_of([&] { t.merge(3); }), ErrorCode::kOutOfRange);
}

TEST(SegmentedTopK, TieOnScoreKeepsLowerId) {
    SegmentedTopK t(1, 1);
    t.push(0, 2.0f, 9);
    EXPECT_TRUE(t.push(0, 2.0f, 3));
    EXPECT_FALSE(t.push(0, 2.0f, 5));
    EXPECT_EQ(t.merge(1)[0].id, 3u);
}

TEST(SegmentedTopK, PropertyMatchesSortedReference) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> score(0, 40);  // coarse, to force ties
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t lanes = 1 + trial % 5;
        const std::size_t k = 1 + trial % 7;
        SegmentedTopK t(lanes, k);
        std::vector<std::vector<Scored>> per_lane(lanes);
        for (RecordId id = 0; id < 100; ++id) {
            const Scored s{static_cast<float>(score(rng)), id};
            t.push(id % lanes, s.score, s.id);
            per_lane[id % lanes].push_back(s);
        }
        std::vector<Scored> all;
        for (auto& lane : per_lane) {
            std::sort(lane.begin(), lane.end(), ranks_before);
            lane.resize(std::min(lane.size(), k));
            all.insert(all.end(), lane.begin(), lane.end());
        }
        std::sort(all.begin(), all.end(), ranks_before);
        ASSERT_EQ(t.merge(lanes), all);
        // merged k-th across lanes equals the k-th of everything pushed
        ASSERT_EQ(t.global_threshold(), all[k - 1].score);
    }
}

TEST(Bloom, Examples) {
    BloomVisited b(1024, 3);
    EXPECT_FALSE(b.maybe_contains(42));
    b.insert(42);
    EXPECT_TRUE(b.maybe_contains(42));
    EXPECT_THROW(BloomVisited(1000, 3), Error);
}

TEST(Bloom, FalsePositiveRateMatchesAnalyticFormula) {
    BloomVisited b(1024, 3);
    for (uint64_t key = 0; key < 100; ++key) {
        b.insert(key * 7919 + 13);
    }
    int fp = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        fp += b.maybe_contains(1'000'000 + static_cast<uint64_t>(i));
    }
    const double expected = std::pow(1.0 - std::exp(-300.0 / 1024.0), 3.0);
    EXPECT_NEAR(static_cast<double>(fp) / trials, expected, 0.03);
}

TEST(Bloom, PropertyNoFalseNegatives) {
    std::mt19937_64 rng(23);
    BloomVisited b(1 << 12, 4);
    std::vector<uint64_t> keys;
    for (int i = 0; i < 5000; ++i) {
        keys.push_back(rng());
        b.insert(keys.back());
        ASSERT_TRUE(b.maybe_contains(keys[rng() % keys.size()]));
    }
    for (uint64_t k : keys) {
        ASSERT_TRUE(b.maybe_contains(k));
    }
    b.clear();
    EXPECT_FALSE(b.maybe_contains(keys[0]));
}

TEST(ExactVisited, TestAndInsert) {
    ExactVisited v(130);
    EXPECT_FALSE(v.contains(129));
    EXPECT_TRUE(v.test_and_insert(129));
    EXPECT_FALSE(v.test_and_insert(129));
    EXPECT_TRUE(v.contains(129));
    EXPECT_FALSE(v.contains(128));
}

TEST(ClusterVisited, BothModes) {
    auto exact = ClusterVisited::exact(10);
    auto bloom = ClusterVisited::bloom(64, 2);
    EXPECT_FALSE(exact.is_bloom());
    EXPECT_TRUE(bloom.is_bloom());
    exact.insert(3);
    bloom.insert(3);
    EXPECT_TRUE(exact.contains(3));
    EXPECT_TRUE(bloom.contains(3));
    EXPECT_FALSE(exact.contains(4));
}

}  // namespace
}  // namespace spanns
