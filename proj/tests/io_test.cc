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


#include <cstring>
#include <filesystem>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "spanns/builder.h"
#include "spanns/error.h"
#include "spanns/io.h"
#include "spanns/sim.h"
#include "test_util.h"

namespace spanns {
namespace {

using testing::code_of;
using testing::x4;

std::string bytes_of(auto&& write) {
    std::ostringstream out(std::ios::binary);
    write(out);
    return out.str();
}

TEST(Svecs, X4RoundTrip) {
    const auto data = x4();
    const std::string bytes = bytes_of([&](std::ostream& o) { write_svecs(o, data); });
    std::istringstream in(bytes, std::ios::binary);
    EXPECT_EQ(read_svecs(in), data);
}

TEST(Svecs, HeaderLayout) {
    const auto data = x4();
    const std::string b = bytes_of([&](std::ostream& o) { write_svecs(o, data); });
    EXPECT_EQ(b.substr(0, 4), "SVEC");
    uint32_t version;
    uint64_t count;
    uint32_t max_dim;
    std::memcpy(&version, b.data() + 4, 4);
    std::memcpy(&count, b.data() + 8, 8);
    std::memcpy(&max_dim, b.data() + 16, 4);
    EXPECT_EQ(version, 1u);
    EXPECT_EQ(count, 4u);
    EXPECT_EQ(max_dim, 4u);
    // header + 4 nnz words + 7 (dim, val) pairs
    EXPECT_EQ(b.size(), 20u + 4 * 4 + 7 * 8);
}

TEST(Svecs, Errors) {
    const auto data = x4();
    std::string b = bytes_of([&](std::ostream& o) { write_svecs(o, data); });

    std::string bad = b;
    bad.replace(0, 4, "XXXX");
    std::istringstream bad_in(bad);
    EXPECT_EQ(code_of([&] { read_svecs(bad_in); }), ErrorCode::kBadMagic);

    std::istringstream short_in(b.substr(0, b.size() - 3));
    EXPECT_EQ(code_of([&] { read_svecs(short_in); }), ErrorCode::kTruncated);

    // first vector's dims [0,2] -> [3,1]
    std::string swapped = b;
    const uint32_t three = 3, one = 1;
    std::memcpy(swapped.data() + 24, &three, 4);
    std::memcpy(swapped.data() + 28, &one, 4);
    std::istringstream swapped_in(swapped);
    EXPECT_EQ(code_of([&] { read_svecs(swapped_in); }), ErrorCode::kNonAscending);

    std::string version2 = b;
    const uint32_t two = 2;
    std::memcpy(version2.data() + 4, &two, 4);
    std::istringstream v2_in(version2);
    EXPECT_EQ(code_of([&] { read_svecs(v2_in); }), ErrorCode::kVersionMismatch);

    std::string zero = b;
    const float z = 0.0f;
    std::memcpy(zero.data() + 32, &z, 4);
    std::istringstream zero_in(zero);
    EXPECT_EQ(code_of([&] { read_svecs(zero_in); }), ErrorCode::kInvalidValue);

    EXPECT_EQ(code_of([] { read_svecs(std::string("/nonexistent/dir/x.svecs")); }), ErrorCode::kIo);
}

TEST(Svecs, StreamingReader) {
    const auto data = x4();
    std::istringstream in(bytes_of([&](std::ostream& o) { write_svecs(o, data); }));
    SvecsReader reader(in);
    EXPECT_EQ(reader.count(), 4u);
    SparseVector x;
    std::size_t i = 0;
    while (reader.next(x)) {
        ASSERT_EQ(x, data[i++]);
    }
    EXPECT_EQ(i, 4u);
}

TEST(Svecs, PropertyRoundTripBitExact) {
    std::mt19937_64 rng(21);
    std::vector<SparseVector> data;
    data.push_back(SparseVector{});
    data.push_back(SparseVector{{0, std::numeric_limits<float>::denorm_min()}});
    for (int i = 0; i < 2000; ++i) {
        data.push_back(testing::random_vector(rng, 100000, 30));
    }
    const std::string b = bytes_of([&](std::ostream& o) { write_svecs(o, data); });
    std::istringstream in(b);
    const auto back = read_svecs(in);
    ASSERT_EQ(back, data);
    EXPECT_EQ(bytes_of([&](std::ostream& o) { write_svecs(o, back); }), b);
}

TEST(Svecs, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "spanns_io_test.svecs";
    write_svecs(path.string(), x4());
    EXPECT_EQ(read_svecs(path.string()), x4());
    std::filesystem::remove(path);
}

HybridIndex x4_index() {
    BuildParams p;
    p.target_cluster_size = 4;
    p.seed = 12345;
    return build_index(x4(), p);
}

TEST(Index, X4RoundTrip) {
    const HybridIndex index = x4_index();
    const std::string b = bytes_of([&](std::ostream& o) { save_index(o, index); });
    std::istringstream in(b);
    const HybridIndex back = load_index(in);
    EXPECT_EQ(back, index);
    EXPECT_EQ(back.params().seed, 12345u);
    EXPECT_NE(back.find(1), nullptr);
}

TEST(Index, DanglingMemberAndVersion) {
    std::vector<Posting> postings(1);
    postings[0].dim = 1;
    postings[0].clusters.push_back(Cluster{0, SparseVector{{1, 5.0f}}, {3}});
    const HybridIndex ok(postings, x4(), BuildParams{});
    std::string b = bytes_of([&](std::ostream& o) { save_index(o, ok); });
    // the last u32 is the only member id
    const uint32_t dangling = 99;
    std::memcpy(b.data() + b.size() - 4, &dangling, 4);
    std::istringstream in(b);
    EXPECT_EQ(code_of([&] { load_index(in); }), ErrorCode::kDanglingId);

    std::string v2 = bytes_of([&](std::ostream& o) { save_index(o, ok); });
    const uint32_t two = 2;
    std::memcpy(v2.data() + 4, &two, 4);
    std::istringstream v2_in(v2);
    EXPECT_EQ(code_of([&] { load_index(v2_in); }), ErrorCode::kVersionMismatch);

    std::istringstream svecs_in(bytes_of([&](std::ostream& o) { write_svecs(o, x4()); }));
    EXPECT_EQ(code_of([&] { load_index(svecs_in); }), ErrorCode::kBadMagic);
}

TEST(Index, SaveIsDeterministic) {
    std::mt19937_64 rng(8);
    const auto data = testing::random_dataset(rng, 300, 100, 25);
    BuildParams p;
    p.posting_keep_frac = 0.6;
    p.record_keep_frac = 0.5;
    p.alpha = 0.7;
    p.target_cluster_size = 6;
    const auto a = bytes_of([&](std::ostream& o) { save_index(o, build_index(data, p)); });
    const auto b = bytes_of([&](std::ostream& o) { save_index(o, build_index(data, p)); });
    EXPECT_EQ(a, b);
}

TEST(GroundTruth, RoundTripWithPadding) {
    const std::vector<GroundTruthRow> rows{{{3.0f, 7}, {2.0f, 1}}, {{1.5f, 4}}, {}};
    const std::string b = bytes_of([&](std::ostream& o) { write_ground_truth(o, rows, 2); });
    EXPECT_EQ(b.size(), 8u + 3 * 2 * 8);
    std::istringstream in(b);
    const auto gt = read_ground_truth(in);
    EXPECT_EQ(gt.k, 2u);
    EXPECT_EQ(gt.rows, rows);
}

TEST(GroundTruth, Errors) {
    const std::vector<GroundTruthRow> rows{{{3.0f, 7}, {2.0f, 1}}};
    EXPECT_EQ(code_of([&] { bytes_of([&](std::ostream& o) { write_ground_truth(o, rows, 1); }); }),
              ErrorCode::kInvalidValue);
    const std::string b = bytes_of([&](std::ostream& o) { write_ground_truth(o, rows, 2); });
    std::istringstream short_in(b.substr(0, b.size() - 4));
    EXPECT_EQ(code_of([&] { read_ground_truth(short_in); }), ErrorCode::kTruncated);
}

TEST(Trace, RoundTrip) {
    SyntheticTraceParams p;
    p.num_clusters = 50;
    SimTrace t = synthetic_trace(p);
    const std::string b = bytes_of([&](std::ostream& o) { write_trace(o, t); });
    EXPECT_EQ(b.substr(0, 4), "SPTR");
    std::istringstream in(b);
    const SimTrace back = read_trace(in);
    EXPECT_EQ(back.k, t.k);
    EXPECT_EQ(back.clusters, t.clusters);
    EXPECT_TRUE(back.strict_thresholds.empty());
}

}  // namespace
}  // namespace spanns
