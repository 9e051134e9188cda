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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spanns/builder.h"
#include "spanns/index.h"
#include "spanns/query.h"
#include "spanns/topk.h"

namespace spanns {

using GroundTruthRow = std::vector<Scored>;

/// Exhaustive top-k: scores every record with dot() and returns the best
/// min(k, |dataset|) in result order.
GroundTruthRow exact_topk(std::span<const SparseVector> dataset, const SparseVector& q, uint32_t k);

/// exact_topk for every query, parallel over queries.
std::vector<GroundTruthRow> exact_topk_batch(std::span<const SparseVector> dataset,
                                             std::span<const SparseVector> queries, uint32_t k);

std::vector<GroundTruthRow> exact_topk_batch_serial(std::span<const SparseVector> dataset,
                                                    std::span<const SparseVector> queries, uint32_t k);

/// |ids(approx[:k]) n ids(truth[:k])| / k.
double recall_at_k(std::span<const Scored> approx, std::span<const Scored> truth, uint32_t k);

struct BenchConfig {
    BuildParams build;
    QueryParams query;
};

struct BenchReport {
    BenchConfig config;
    std::size_t num_queries = 0;
    double recall = 0.0;  // mean of per-query recall@k
    double qps = 0.0;     // wall clock, informational only
    double mean_records_scored = 0.0;
    double mean_clusters_pruned = 0.0;
    double mean_clusters_evaluated = 0.0;
    double frac_forward_touched = 0.0;
    bool feasible = true;
};

/// Runs every query and aggregates recall and work counters. Throws
/// Error(kInvalidArgument) when truth and queries differ in length.
BenchReport run_benchmark(const HybridIndex& index, std::span<const SparseVector> queries,
                          std::span<const GroundTruthRow> truth, const QueryParams& params);

/// Candidate values per tunable. An empty build list means "the value the
/// index was built with"; an empty beta / qdims list means the base query's.
struct GridSpec {
    std::vector<double> posting_keep;
    std::vector<double> record_keep;
    std::vector<double> alpha;
    std::vector<uint32_t> cluster_size;
    std::vector<float> beta;
    std::vector<uint32_t> qdims;
    QueryParams base_query;

    /// Parses the JSON grid file format, e.g.
    /// {"k": 10, "posting_keep": [0.2, 0.4], "beta": [1.0], "qdims": [5, 0]}
    static GridSpec from_json(const std::string& text);
};

struct GridResult {
    BenchReport best;
    bool feasible = false;
    std::vector<BenchReport> rows;  // grid order
};

/// Among configs with recall >= recall_floor, picks the one scoring the
/// fewest records (ties: lower beta, then more query dims). Without a
/// feasible config, returns the highest-recall one with feasible = false.
/// Build configs that differ from the index's are rebuilt from its forward
/// index.
GridResult grid_search(const HybridIndex& index, std::span<const SparseVector> queries,
                       std::span<const GroundTruthRow> truth, const GridSpec& grid, double recall_floor);

/// CSV header plus one row per report.
void write_report_csv(std::ostream& out, std::span<const BenchReport> rows);

}  // namespace spanns
