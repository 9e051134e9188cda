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
#include <vector>

#include "spanns/sparse_vector.h"

namespace spanns {

/// Parameters of the synthetic learned-sparse corpus.
///
/// Every record and query belongs to one latent topic. A topic owns a small
/// vocabulary of dims drawn from the global Zipf popularity; a `topic_frac`
/// share of each vector's nonzeros comes from its topic vocabulary (with
/// larger weights), the rest from the global Zipf background. This gives
/// long postings for popular dims and neighbours that share heavy dims, as
/// in SPLADE-style corpora.
struct SynthParams {
    uint32_t num_records = 10000;
    uint32_t num_dims = 30522;
    double nnz_mean = 150.0;
    double nnz_std = 30.0;
    /// Upper clip of the record nnz; 0 derives mean + 4 std.
    uint32_t nnz_max = 0;
    /// Zipf exponent of global dim popularity.
    double zipf = 1.0;
    uint32_t num_topics = 500;
    uint32_t topic_vocab = 200;
    double topic_frac = 0.6;
    /// Log-normal weight parameters; topic dims get `topic_boost` added to mu.
    double value_mu = -1.0;
    double value_sigma = 0.6;
    double topic_boost = 1.0;
    uint32_t num_queries = 0;
    uint32_t query_nnz_min = 10;
    uint32_t query_nnz_max = 50;
    uint64_t seed = 42;

    uint32_t effective_nnz_max() const;

    /// Throws Error(kInvalidArgument) on inconsistent settings, including a
    /// dimensionality smaller than the largest possible nnz.
    void validate() const;
};

struct SynthData {
    std::vector<SparseVector> records;
    std::vector<SparseVector> queries;
};

/// Deterministic in `p` (including the seed).
SynthData generate_synthetic(const SynthParams& p);

}  // namespace spanns
