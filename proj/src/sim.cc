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


#include "spanns/sim.h"

#include <algorithm>
#include <deque>
#include <queue>
#include <random>
#include <string>
#include <unordered_set>

#include "spanns/error.h"
#include "spanns/kernels.h"
#include "spanns/topk.h"

namespace spanns {

void SimConfig::validate() const {
    if (num_ranks == 0) {
        throw Error(ErrorCode::kInvalidArgument, "num_ranks must be >= 1");
    }
    if (window == 0) {
        throw Error(ErrorCode::kInvalidArgument, "window must be >= 1");
    }
    if (!(beta >= 0.0f)) {
        throw Error(ErrorCode::kInvalidArgument, "beta must be >= 0");
    }
}

SimTrace build_trace(const HybridIndex& index, const SparseVector& q, const QueryParams& params,
                     uint32_t act_cost) {
    QueryParams strict = params;
    strict.refresh = ThresholdRefresh::kPerCluster;
    SimTrace trace;
    trace.k = params.k;
    const auto& forward = index.forward();
    search(index, q, strict, [&](const ClusterVisit& v) {
        ClusterJob job;
        job.cluster_id = v.cluster->id;
        job.silhouette_score = v.silhouette_score;
        job.records.reserve(v.cluster->members.size());
        for (RecordId id : v.cluster->members) {
            const SparseVector& r = forward[id];
            const auto work = static_cast<uint32_t>(std::min(q.nnz(), r.nnz()));
            job.records.push_back(TraceRecord{id, work + act_cost, dot_shorter_side(q, r)});
        }
        trace.clusters.push_back(std::move(job));
        trace.strict_thresholds.push_back(v.threshold);
    });
    return trace;
}

namespace {

// Top-k of folded scores; threshold follows the query engine: the k-th best
// score, or 0 while fewer than k are held.
class ScoreTopK {
 public:
    explicit ScoreTopK(uint32_t k) : k_(k) {}

    void push(float score, RecordId id) {
        const Scored s{score, id};
        if (heap_.size() < k_) {
            heap_.push_back(s);
            std::push_heap(heap_.begin(), heap_.end(), ranks_before);
        } else if (k_ > 0 && ranks_before(s, heap_.front())) {
            std::pop_heap(heap_.begin(), heap_.end(), ranks_before);
            heap_.back() = s;
            std::push_heap(heap_.begin(), heap_.end(), ranks_before);
        }
    }

    float threshold() const { return heap_.size() < k_ || k_ == 0 ? 0.0f : heap_.front().score; }

 private:
    uint32_t k_;
    std::vector<Scored> heap_;  // front is the worst kept entry
};

struct Work {
    std::size_t cluster;
    RecordId id;
    uint64_t cost;
    float score;
};

struct Completion {
    uint64_t time;
    uint32_t rank;

    bool operator>(const Completion& o) const { return time != o.time ? time > o.time : rank > o.rank; }
};

struct RunResult {
    SimReport report;
    std::vector<uint8_t> admitted;
};

RunResult run(const SimTrace& trace, const SimConfig& cfg) {
    const std::size_t n = trace.clusters.size();
    RunResult out;
    out.admitted.assign(n, 0);
    SimReport& rep = out.report;
    rep.window = cfg.window;

    ScoreTopK topk(trace.k);
    std::unordered_set<RecordId> dispatched;
    std::vector<std::deque<Work>> queues(cfg.num_ranks);
    std::vector<uint8_t> busy(cfg.num_ranks, 0);
    std::vector<Work> running(cfg.num_ranks);
    std::vector<std::size_t> outstanding(n, 0);
    std::priority_queue<Completion, std::vector<Completion>, std::greater<>> events;
    std::size_t next = 0;
    std::size_t active = 0;
    uint64_t now = 0;

    auto start_idle = [&]() {
        for (uint32_t r = 0; r < cfg.num_ranks; ++r) {
            if (!busy[r] && !queues[r].empty()) {
                running[r] = queues[r].front();
                queues[r].pop_front();
                busy[r] = 1;
                events.push(Completion{now + running[r].cost, r});
            }
        }
    };

    auto activate = [&]() {
        while (active < cfg.window && next < n) {
            const std::size_t c = next++;
            const ClusterJob& job = trace.clusters[c];
            if (!(job.silhouette_score >= cfg.beta * topk.threshold())) {
                ++rep.clusters_pruned;
                continue;
            }
            out.admitted[c] = 1;
            ++rep.clusters_evaluated;
            for (const TraceRecord& r : job.records) {
                if (!dispatched.insert(r.id).second) {
                    continue;
                }
                const uint64_t cost =
                    cfg.cost_mode == CostMode::kFixed ? uint64_t{cfg.fixed_cycles} + cfg.act_cost : r.cost_cycles;
                queues[r.id % cfg.num_ranks].push_back(Work{c, r.id, cost, r.true_score});
                ++outstanding[c];
                ++rep.records_dispatched;
                rep.busy_cycles += cost;
            }
            if (outstanding[c] > 0) {
                ++active;
            }
        }
        start_idle();
    };

    activate();
    while (!events.empty()) {
        now = events.top().time;
        while (!events.empty() && events.top().time == now) {
            const uint32_t r = events.top().rank;
            events.pop();
            const Work& w = running[r];
            busy[r] = 0;
            topk.push(w.score, w.id);
            if (--outstanding[w.cluster] == 0) {
                --active;
            }
        }
        activate();
    }
    rep.total_cycles = now;
    rep.utilization = rep.total_cycles == 0
                          ? 0.0
                          : static_cast<double>(rep.busy_cycles) /
                                (static_cast<double>(rep.total_cycles) * cfg.num_ranks);
    return out;
}

}  // namespace

SimReport simulate(const SimTrace& trace, const SimConfig& cfg) {
    cfg.validate();
    RunResult result = run(trace, cfg);
    if (cfg.window == 1) {
        return result.report;
    }
    SimConfig strict_cfg = cfg;
    strict_cfg.window = 1;
    const RunResult strict = run(trace, strict_cfg);
    SimReport& rep = result.report;
    rep.extra_clusters =
        static_cast<int64_t>(rep.clusters_evaluated) - static_cast<int64_t>(strict.report.clusters_evaluated);
    for (std::size_t c = 0; c < trace.clusters.size(); ++c) {
        rep.wrongly_admitted += result.admitted[c] && !strict.admitted[c];
    }
    return rep;
}

std::vector<SimReport> sweep_window(const SimTrace& trace, std::span<const uint32_t> windows,
                                    const SimConfig& base) {
    if (windows.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "window list is empty");
    }
    std::vector<SimReport> out(windows.size());
    const auto n = static_cast<std::ptrdiff_t>(windows.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        SimConfig cfg = base;
        cfg.window = windows[i];
        out[i] = simulate(trace, cfg);
    }
    return out;
}

std::vector<SimReport> sweep_window_serial(const SimTrace& trace, std::span<const uint32_t> windows,
                                           const SimConfig& base) {
    if (windows.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "window list is empty");
    }
    std::vector<SimReport> out;
    out.reserve(windows.size());
    for (uint32_t w : windows) {
        SimConfig cfg = base;
        cfg.window = w;
        out.push_back(simulate(trace, cfg));
    }
    return out;
}

SimTrace synthetic_trace(const SyntheticTraceParams& p) {
    if (p.num_clusters == 0 || p.clusters_per_posting == 0 || p.min_records == 0 ||
        p.min_records > p.max_records || p.num_records == 0 || p.min_cost > p.max_cost) {
        throw Error(ErrorCode::kInvalidArgument, "invalid synthetic trace parameters");
    }
    std::mt19937_64 rng(p.seed);
    std::uniform_int_distribution<uint32_t> size_dist(p.min_records, p.max_records);
    std::uniform_int_distribution<uint32_t> id_dist(0, p.num_records - 1);
    std::uniform_int_distribution<uint32_t> cost_dist(p.min_cost, p.max_cost);
    std::uniform_real_distribution<double> member_frac(0.2, 1.0);
    std::uniform_real_distribution<double> slack(1.0, 1.3);
    std::lognormal_distribution<double> quality(0.0, 0.5);

    SimTrace trace;
    trace.k = p.k;
    double posting_scale = 1.0;
    ClusterId next_id = 0;
    while (trace.clusters.size() < p.num_clusters) {
        // later postings come from smaller query values
        posting_scale *= 0.99;
        const std::size_t count =
            std::min<std::size_t>(p.clusters_per_posting, p.num_clusters - trace.clusters.size());
        std::vector<ClusterJob> posting(count);
        for (auto& job : posting) {
            job.cluster_id = next_id++;
            const double top = posting_scale * quality(rng);
            float best = 0.0f;
            const uint32_t size = size_dist(rng);
            for (uint32_t i = 0; i < size; ++i) {
                const auto score = static_cast<float>(top * member_frac(rng));
                best = std::max(best, score);
                job.records.push_back(TraceRecord{id_dist(rng), cost_dist(rng), score});
            }
            job.silhouette_score = static_cast<float>(best * slack(rng));
        }
        std::stable_sort(posting.begin(), posting.end(), [](const ClusterJob& a, const ClusterJob& b) {
            return a.silhouette_score > b.silhouette_score;
        });
        for (auto& job : posting) {
            trace.clusters.push_back(std::move(job));
        }
    }
    return trace;
}

}  // namespace spanns
