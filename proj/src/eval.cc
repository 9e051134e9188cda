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

#include "spanns/eval.h"

#include <algorithm>
#include <chrono>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "spanns/error.h"
#include "spanns/kernels.h"

namespace spanns {

GroundTruthRow exact_topk(std::span<const SparseVector> dataset, const SparseVector& q, uint32_t k) {
    GroundTruthRow all;
    all.reserve(dataset.size());
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        all.push_back(Scored{dot(q, dataset[r]), static_cast<RecordId>(r)});
    }
    const std::size_t keep = std::min<std::size_t>(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), ranks_before);
    all.resize(keep);
    return all;
}

std::vector<GroundTruthRow> exact_topk_batch(std::span<const SparseVector> dataset,
                                             std::span<const SparseVector> queries, uint32_t k) {
    std::vector<GroundTruthRow> out(queries.size());
    const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[i] = exact_topk(dataset, queries[i], k);
    }
    return out;
}

std::vector<GroundTruthRow> exact_topk_batch_serial(std::span<const SparseVector> dataset,
                                                    std::span<const SparseVector> queries, uint32_t k) {
    std::vector<GroundTruthRow> out;
    out.reserve(queries.size());
    for (const auto& q : queries) {
        out.push_back(exact_topk(dataset, q, k));
    }
    return out;
}

double recall_at_k(std::span<const Scored> approx, std::span<const Scored> truth, uint32_t k) {
    if (k == 0) {
        throw Error(ErrorCode::kInvalidArgument, "recall needs k >= 1");
    }
    std::unordered_set<RecordId> want;
    for (std::size_t i = 0; i < truth.size() && i < k; ++i) {
        want.insert(truth[i].id);
    }
    std::size_t hit = 0;
    for (std::size_t i = 0; i < approx.size() && i < k; ++i) {
        hit += want.count(approx[i].id);
    }
    return static_cast<double>(hit) / static_cast<double>(k);
}

BenchReport run_benchmark(const HybridIndex& index, std::span<const SparseVector> queries,
                          std::span<const GroundTruthRow> truth, const QueryParams& params) {
    if (truth.size() != queries.size()) {
        throw Error(ErrorCode::kInvalidArgument, "ground truth has " + std::to_string(truth.size()) +
                                                     " rows for " + std::to_string(queries.size()) +
                                                     " queries");
    }
    BenchReport report;
    report.config = BenchConfig{index.params(), params};
    report.num_queries = queries.size();
    if (queries.empty()) {
        return report;
    }
    const auto start = std::chrono::steady_clock::now();
    const auto results = search_batch(index, queries, params);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    double recall = 0.0;
    SearchStats total;
    for (std::size_t i = 0; i < results.size(); ++i) {
        recall += recall_at_k(results[i].hits, truth[i], params.k);
        total += results[i].stats;
    }
    const auto n = static_cast<double>(queries.size());
    report.recall = recall / n;
    report.qps = secs > 0.0 ? n / secs : 0.0;
    report.mean_records_scored = static_cast<double>(total.records_scored) / n;
    report.mean_clusters_pruned = static_cast<double>(total.clusters_pruned) / n;
    report.mean_clusters_evaluated = static_cast<double>(total.clusters_evaluated) / n;
    report.frac_forward_touched =
        index.num_records() == 0 ? 0.0 : report.mean_records_scored / static_cast<double>(index.num_records());
    return report;
}

GridSpec GridSpec::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kInvalidArgument, std::string("grid file: ") + e.what());
    }
    GridSpec g;
    try {
        auto list = [&](const char* key, auto& dst) {
            if (j.contains(key)) {
                j.at(key).get_to(dst);
            }
        };
        list("posting_keep", g.posting_keep);
        list("record_keep", g.record_keep);
        list("alpha", g.alpha);
        list("cluster_size", g.cluster_size);
        list("beta", g.beta);
        list("qdims", g.qdims);
        if (j.contains("k")) g.base_query.k = j.at("k").get<uint32_t>();
        if (j.contains("lanes")) g.base_query.lanes = j.at("lanes").get<uint32_t>();
        if (j.contains("fixed_point")) g.base_query.use_fixed_point = j.at("fixed_point").get<bool>();
        if (j.contains("bloom_visited")) g.base_query.use_bloom_visited = j.at("bloom_visited").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kInvalidArgument, std::string("grid file: ") + e.what());
    }
    return g;
}

namespace {

template <typename T>
std::vector<T> or_default(const std::vector<T>& values, T fallback) {
    return values.empty() ? std::vector<T>{fallback} : values;
}

// Q = 0 processes every dim, so it orders above any explicit cutoff.
uint64_t effective_qdims(uint32_t q) {
    return q == 0 ? std::numeric_limits<uint64_t>::max() : q;
}

bool cheaper(const BenchReport& a, const BenchReport& b) {
    if (a.mean_records_scored != b.mean_records_scored) {
        return a.mean_records_scored < b.mean_records_scored;
    }
    if (a.config.query.beta != b.config.query.beta) {
        return a.config.query.beta < b.config.query.beta;
    }
    return effective_qdims(a.config.query.max_query_dims) > effective_qdims(b.config.query.max_query_dims);
}

}  // namespace

GridResult grid_search(const HybridIndex& index, std::span<const SparseVector> queries,
                       std::span<const GroundTruthRow> truth, const GridSpec& grid, double recall_floor) {
    const BuildParams& base = index.params();
    GridResult result;
    for (double pk : or_default(grid.posting_keep, base.posting_keep_frac)) {
        for (double rk : or_default(grid.record_keep, base.record_keep_frac)) {
            for (double a : or_default(grid.alpha, base.alpha)) {
                for (uint32_t cs : or_default(grid.cluster_size, base.target_cluster_size)) {
                    BuildParams bp = base;
                    bp.posting_keep_frac = pk;
                    bp.record_keep_frac = rk;
                    bp.alpha = a;
                    bp.target_cluster_size = cs;
                    std::optional<HybridIndex> rebuilt;
                    if (!(bp == base)) {
                        rebuilt = build_index(index.forward(), bp);
                    }
                    const HybridIndex& target = rebuilt ? *rebuilt : index;
                    for (float beta : or_default(grid.beta, grid.base_query.beta)) {
                        for (uint32_t q : or_default(grid.qdims, grid.base_query.max_query_dims)) {
                            QueryParams qp = grid.base_query;
                            qp.beta = beta;
                            qp.max_query_dims = q;
                            BenchReport row = run_benchmark(target, queries, truth, qp);
                            row.feasible = row.recall >= recall_floor;
                            result.rows.push_back(row);
                        }
                    }
                }
            }
        }
    }

    const BenchReport* best = nullptr;
    for (const auto& row : result.rows) {
        if (row.feasible && (best == nullptr || cheaper(row, *best))) {
            best = &row;
        }
    }
    result.feasible = best != nullptr;
    if (best == nullptr) {
        for (const auto& row : result.rows) {
            if (best == nullptr || row.recall > best->recall ||
                (row.recall == best->recall && cheaper(row, *best))) {
                best = &row;
            }
        }
    }
    result.best = *best;
    return result;
}

void write_report_csv(std::ostream& out, std::span<const BenchReport> rows) {
    out << "posting_keep,record_keep,alpha,cluster_size,beta,qdims,k,fixed_point,bloom_visited,"
           "num_queries,recall,qps,mean_records_scored,mean_clusters_pruned,mean_clusters_evaluated,"
           "frac_forward_touched,feasible\n";
    for (const auto& r : rows) {
        const auto& b = r.config.build;
        const auto& q = r.config.query;
        out << b.posting_keep_frac << ',' << b.record_keep_frac << ',' << b.alpha << ','
            << b.target_cluster_size << ',' << q.beta << ',' << q.max_query_dims << ',' << q.k << ','
            << (q.use_fixed_point ? 1 : 0) << ',' << (q.use_bloom_visited ? 1 : 0) << ',' << r.num_queries
            << ',' << r.recall << ',' << r.qps << ',' << r.mean_records_scored << ','
            << r.mean_clusters_pruned << ',' << r.mean_clusters_evaluated << ',' << r.frac_forward_touched
            << ',' << (r.feasible ? 1 : 0) << '\n';
    }
}

}  // namespace spanns
