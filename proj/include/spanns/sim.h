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
#include <span>
#include <vector>

#include "spanns/index.h"
#include "spanns/query.h"

namespace spanns {

struct TraceRecord {
    RecordId id = 0;
    uint32_t cost_cycles = 0;
    float true_score = 0.0f;

    bool operator==(const TraceRecord&) const = default;
};

struct ClusterJob {
    ClusterId cluster_id = 0;
    float silhouette_score = 0.0f;
    std::vector<TraceRecord> records;

    bool operator==(const ClusterJob&) const = default;
};

/// Clusters in probe order with the per-record work they carry.
struct SimTrace {
    uint32_t k = 10;
    std::vector<ClusterJob> clusters;
    /// Threshold each cluster saw under strict in-order execution. Filled by
    /// build_trace only; not part of the file format.
    std::vector<float> strict_thresholds;
};

enum class CostMode {
    kFromTrace,  // per-record cost_cycles as recorded
    kFixed,      // fixed_cycles + act_cost for every record
};

struct SimConfig {
    uint32_t num_ranks = 24;
    uint32_t window = 1;
    uint32_t act_cost = 1;
    CostMode cost_mode = CostMode::kFromTrace;
    uint32_t fixed_cycles = 1;
    float beta = 1.0f;

    /// Throws Error(kInvalidArgument) when num_ranks or window is 0, or beta < 0.
    void validate() const;
};

struct SimReport {
    uint32_t window = 0;
    uint64_t total_cycles = 0;
    uint64_t busy_cycles = 0;
    double utilization = 0.0;
    uint64_t clusters_evaluated = 0;
    uint64_t clusters_pruned = 0;
    uint64_t records_dispatched = 0;
    /// clusters_evaluated minus the W = 1 count on the same trace.
    int64_t extra_clusters = 0;
    /// Admitted here but pruned under strict order.
    uint64_t wrongly_admitted = 0;

    bool operator==(const SimReport&) const = default;
};

/// Replays search() with per-cluster threshold refresh and records every
/// cluster decision in order. Each member record costs
/// min(nnz(q), nnz(r)) + act_cost cycles. params.refresh is ignored.
SimTrace build_trace(const HybridIndex& index, const SparseVector& q, const QueryParams& params,
                     uint32_t act_cost = 1);

/// Event-driven run: at most cfg.window clusters are active at once. A cluster
/// is admitted when its silhouette score is at least beta times the top-k
/// threshold at its activation time. Admitted records go to rank
/// id % num_ranks, each rank serving one record at a time in FIFO order.
SimReport simulate(const SimTrace& trace, const SimConfig& cfg);

/// One simulate() per window. Throws Error(kInvalidArgument) for an empty list.
std::vector<SimReport> sweep_window(const SimTrace& trace, std::span<const uint32_t> windows,
                                    const SimConfig& base);

std::vector<SimReport> sweep_window_serial(const SimTrace& trace, std::span<const uint32_t> windows,
                                           const SimConfig& base);

struct SyntheticTraceParams {
    uint32_t num_clusters = 1000;
    uint32_t clusters_per_posting = 20;
    uint32_t min_records = 4;
    uint32_t max_records = 48;
    uint32_t num_records = 100000;  // id space
    uint32_t k = 10;
    uint32_t min_cost = 10;
    uint32_t max_cost = 50;
    uint64_t seed = 7;
};

/// Posting-shaped trace whose silhouette scores bound their members' scores,
/// as alpha = 1 silhouettes do.
SimTrace synthetic_trace(const SyntheticTraceParams& p);

}  // namespace spanns
