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


// OpenMP paths against their serial references.

#include <omp.h>

#include <gtest/gtest.h>

#include "spanns/builder.h"
#include "spanns/eval.h"
#include "spanns/query.h"
#include "spanns/sim.h"
#include "spanns/synth.h"

namespace spanns {
namespace {

SynthData small_corpus() {
    SynthParams sp;
    sp.num_records = 1500;
    sp.num_dims = 4000;
    sp.nnz_mean = 50;
    sp.nnz_std = 10;
    sp.num_topics = 40;
    sp.topic_vocab = 80;
    sp.num_queries = 30;
    sp.seed = 3;
    return generate_synthetic(sp);
}

class Parallel : public ::testing::TestWithParam<int> {
 protected:
    void SetUp() override { omp_set_num_threads(GetParam()); }
};

TEST_P(Parallel, BuildMatchesSerial) {
    const auto d = small_corpus();
    for (double frac : {1.0, 0.4}) {
        BuildParams p;
        p.posting_keep_frac = frac;
        p.record_keep_frac = frac;
        p.alpha = frac == 1.0 ? 1.0 : 0.7;
        p.target_cluster_size = 12;
        EXPECT_EQ(build_index(d.records, p), build_index_serial(d.records, p));
    }
}

TEST_P(Parallel, SearchAndOracleMatchSerial) {
    const auto d = small_corpus();
    BuildParams p;
    p.posting_keep_frac = 0.5;
    p.alpha = 0.8;
    const HybridIndex index = build_index(d.records, p);
    QueryParams qp;
    qp.k = 20;
    const auto a = search_batch(index, d.queries, qp);
    const auto b = search_batch_serial(index, d.queries, qp);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].hits, b[i].hits);
        EXPECT_EQ(a[i].stats, b[i].stats);
    }
    EXPECT_EQ(exact_topk_batch(d.records, d.queries, 20), exact_topk_batch_serial(d.records, d.queries, 20));
}

TEST_P(Parallel, SweepMatchesSerial) {
    const SimTrace t = synthetic_trace(SyntheticTraceParams{});
    const uint32_t w[] = {1, 2, 5, 8};
    EXPECT_EQ(sweep_window(t, w, SimConfig{}), sweep_window_serial(t, w, SimConfig{}));
}

INSTANTIATE_TEST_SUITE_P(Threads, Parallel, ::testing::Values(1, 2, 4));

}  // namespace
}  // namespace spanns
