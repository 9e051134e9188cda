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


// Command-line front end: synth, build, query, gt, eval and sim.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spanns/builder.h"
#include "spanns/error.h"
#include "spanns/eval.h"
#include "spanns/io.h"
#include "spanns/query.h"
#include "spanns/sim.h"
#include "spanns/synth.h"

namespace {

using namespace spanns;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFormat = 2;
constexpr int kExitInfeasible = 3;

std::ofstream open_text(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
    }
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::kIo, "cannot open " + path);
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct SynthArgs {
    SynthParams p;
    std::string out;
    std::string qout;
};

int run_synth(const SynthArgs& a) {
    if (a.p.num_queries > 0 && a.qout.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "--queries needs --qout");
    }
    const SynthData data = generate_synthetic(a.p);
    write_svecs(a.out, data.records);
    if (!a.qout.empty()) {
        write_svecs(a.qout, data.queries);
    }
    std::printf("wrote %zu records, %zu queries\n", data.records.size(), data.queries.size());
    return kExitOk;
}

struct BuildArgs {
    std::string input;
    std::string output;
    BuildParams p;
};

int run_build(const BuildArgs& a) {
    auto records = read_svecs(a.input);
    const HybridIndex index = build_index(std::move(records), a.p);
    save_index(a.output, index);
    std::printf("postings %zu clusters %zu memberships %zu\n", index.postings().size(), index.num_clusters(),
                index.total_memberships());
    return kExitOk;
}

struct QueryArgs {
    std::string index;
    std::string queries;
    std::string out;
    QueryParams p;
};

int run_query(const QueryArgs& a) {
    const HybridIndex index = load_index(a.index);
    const auto queries = read_svecs(a.queries);
    const auto results = search_batch(index, queries, a.p);
    auto out = open_text(a.out);
    out << "query,rank,id,score\n";
    SearchStats total;
    for (std::size_t qi = 0; qi < results.size(); ++qi) {
        const auto& hits = results[qi].hits;
        for (std::size_t r = 0; r < hits.size(); ++r) {
            out << qi << ',' << r << ',' << hits[r].id << ',' << hits[r].score << '\n';
        }
        total += results[qi].stats;
    }
    std::printf("queries %zu records_scored %llu clusters_evaluated %llu clusters_pruned %llu\n",
                results.size(), static_cast<unsigned long long>(total.records_scored),
                static_cast<unsigned long long>(total.clusters_evaluated),
                static_cast<unsigned long long>(total.clusters_pruned));
    return kExitOk;
}

struct GtArgs {
    std::string input;
    std::string queries;
    std::string out;
    uint32_t k = 10;
};

int run_gt(const GtArgs& a) {
    if (a.k == 0) {
        throw Error(ErrorCode::kInvalidArgument, "--k must be >= 1");
    }
    const auto records = read_svecs(a.input);
    const auto queries = read_svecs(a.queries);
    const auto rows = exact_topk_batch(records, queries, a.k);
    write_ground_truth(a.out, rows, a.k);
    return kExitOk;
}

struct EvalArgs {
    std::string index;
    std::string queries;
    std::string gt;
    std::string grid;
    std::string out;
    double recall_floor = 0.9;
};

int run_eval(const EvalArgs& a) {
    const HybridIndex index = load_index(a.index);
    const auto queries = read_svecs(a.queries);
    const GroundTruthFile gt = read_ground_truth(a.gt);
    const GridSpec grid = GridSpec::from_json(slurp(a.grid));
    if (gt.k < grid.base_query.k) {
        throw Error(ErrorCode::kInvalidArgument, "ground truth holds " + std::to_string(gt.k) +
                                                     " neighbours, grid asks for k=" +
                                                     std::to_string(grid.base_query.k));
    }
    const GridResult result = grid_search(index, queries, gt.rows, grid, a.recall_floor);
    auto out = open_text(a.out);
    write_report_csv(out, result.rows);
    const auto& b = result.best;
    std::printf("%s: recall %.4f mean_records_scored %.1f (pk %g rk %g alpha %g cs %u beta %g qdims %u)\n",
                result.feasible ? "best" : "infeasible, highest recall", b.recall, b.mean_records_scored,
                b.config.build.posting_keep_frac, b.config.build.record_keep_frac, b.config.build.alpha,
                b.config.build.target_cluster_size, b.config.query.beta, b.config.query.max_query_dims);
    return result.feasible ? kExitOk : kExitInfeasible;
}

struct TraceArgs {
    std::string index;
    std::string queries;
    std::string out;
    uint32_t query_id = 0;
    uint32_t act_cost = 1;
    QueryParams p;
};

int run_sim_trace(const TraceArgs& a) {
    const HybridIndex index = load_index(a.index);
    const auto queries = read_svecs(a.queries);
    if (a.query_id >= queries.size()) {
        throw Error(ErrorCode::kInvalidArgument, "--query-id " + std::to_string(a.query_id) + " but file has " +
                                                     std::to_string(queries.size()) + " queries");
    }
    const SimTrace trace = build_trace(index, queries[a.query_id], a.p, a.act_cost);
    write_trace(a.out, trace);
    std::printf("trace: %zu clusters\n", trace.clusters.size());
    return kExitOk;
}

struct RunArgs {
    std::string trace;
    std::string out;
    std::vector<uint32_t> windows{1, 2, 3, 4, 5, 8};
    uint32_t fixed_cycles = 0;
    SimConfig cfg;
};

int run_sim_run(const RunArgs& a) {
    const SimTrace trace = read_trace(a.trace);
    SimConfig cfg = a.cfg;
    if (a.fixed_cycles > 0) {
        cfg.cost_mode = CostMode::kFixed;
        cfg.fixed_cycles = a.fixed_cycles;
    }
    const auto reports = sweep_window(trace, a.windows, cfg);
    auto out = open_text(a.out);
    out << "W,total_cycles,utilization,clusters_evaluated,extra_clusters\n";
    for (const auto& r : reports) {
        out << r.window << ',' << r.total_cycles << ',' << r.utilization << ',' << r.clusters_evaluated << ','
            << r.extra_clusters << '\n';
    }
    return kExitOk;
}

struct SynthTraceArgs {
    std::string out;
    SyntheticTraceParams p;
};

int run_sim_synth(const SynthTraceArgs& a) {
    const SimTrace trace = synthetic_trace(a.p);
    write_trace(a.out, trace);
    std::printf("trace: %zu clusters\n", trace.clusters.size());
    return kExitOk;
}

void add_query_flags(CLI::App* cmd, QueryParams& p) {
    cmd->add_option("--k", p.k, "Neighbours to return")->check(CLI::PositiveNumber);
    cmd->add_option("--beta", p.beta, "Cluster pruning factor");
    cmd->add_option("--qdims", p.max_query_dims, "Query dims to process, 0 = all");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse approximate nearest-neighbour search with clustered postings"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
    synth_cmd->add_option("--records", synth.p.num_records)->required();
    synth_cmd->add_option("--dims", synth.p.num_dims);
    synth_cmd->add_option("--nnz-mean", synth.p.nnz_mean);
    synth_cmd->add_option("--nnz-std", synth.p.nnz_std);
    synth_cmd->add_option("--zipf", synth.p.zipf);
    synth_cmd->add_option("--seed", synth.p.seed);
    synth_cmd->add_option("--out", synth.out)->required();
    synth_cmd->add_option("--queries", synth.p.num_queries);
    synth_cmd->add_option("--qout", synth.qout);

    BuildArgs build;
    auto* build_cmd = app.add_subcommand("build", "Build an index from an svecs file");
    build_cmd->add_option("--input", build.input)->required();
    build_cmd->add_option("--output", build.output)->required();
    build_cmd->add_option("--posting-keep", build.p.posting_keep_frac);
    build_cmd->add_option("--record-keep", build.p.record_keep_frac);
    build_cmd->add_option("--alpha", build.p.alpha);
    build_cmd->add_option("--cluster-size", build.p.target_cluster_size);
    build_cmd->add_option("--kmeans-iters", build.p.kmeans_iters);
    build_cmd->add_option("--seed", build.p.seed);

    QueryArgs query;
    auto* query_cmd = app.add_subcommand("query", "Search an index");
    query_cmd->add_option("--index", query.index)->required();
    query_cmd->add_option("--queries", query.queries)->required();
    query_cmd->add_option("--out", query.out)->required();
    add_query_flags(query_cmd, query.p);
    query_cmd->add_flag("--fixed-point", query.p.use_fixed_point);
    query_cmd->add_flag("--bloom-visited", query.p.use_bloom_visited);

    GtArgs gt;
    auto* gt_cmd = app.add_subcommand("gt", "Exhaustive ground truth");
    gt_cmd->add_option("--input", gt.input)->required();
    gt_cmd->add_option("--queries", gt.queries)->required();
    gt_cmd->add_option("--k", gt.k);
    gt_cmd->add_option("--out", gt.out)->required();

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Grid search against ground truth");
    eval_cmd->add_option("--index", eval.index)->required();
    eval_cmd->add_option("--queries", eval.queries)->required();
    eval_cmd->add_option("--gt", eval.gt)->required();
    eval_cmd->add_option("--grid", eval.grid, "JSON grid file")->required();
    eval_cmd->add_option("--recall-floor", eval.recall_floor);
    eval_cmd->add_option("--out", eval.out)->required();

    auto* sim_cmd = app.add_subcommand("sim", "Forward-index dataflow simulator");
    sim_cmd->require_subcommand(1);
    TraceArgs trace;
    auto* trace_cmd = sim_cmd->add_subcommand("trace", "Record one query's cluster stream");
    trace_cmd->add_option("--index", trace.index)->required();
    trace_cmd->add_option("--query-file", trace.queries)->required();
    trace_cmd->add_option("--query-id", trace.query_id);
    trace_cmd->add_option("--act-cost", trace.act_cost);
    trace_cmd->add_option("--out", trace.out)->required();
    add_query_flags(trace_cmd, trace.p);

    RunArgs run;
    auto* run_cmd = sim_cmd->add_subcommand("run", "Simulate a trace over window sizes");
    run_cmd->add_option("--trace", run.trace)->required();
    run_cmd->add_option("--ranks", run.cfg.num_ranks);
    run_cmd->add_option("--windows", run.windows)->delimiter(',');
    run_cmd->add_option("--beta", run.cfg.beta);
    run_cmd->add_option("--fixed-cycles", run.fixed_cycles, "Use this per-record cost instead of the trace's");
    run_cmd->add_option("--act-cost", run.cfg.act_cost, "Added to --fixed-cycles");
    run_cmd->add_option("--out", run.out)->required();

    SynthTraceArgs strace;
    auto* strace_cmd = sim_cmd->add_subcommand("synth", "Write the synthetic posting-shaped trace");
    strace_cmd->add_option("--clusters", strace.p.num_clusters)->check(CLI::PositiveNumber);
    strace_cmd->add_option("--k", strace.p.k)->check(CLI::PositiveNumber);
    strace_cmd->add_option("--seed", strace.p.seed);
    strace_cmd->add_option("--out", strace.out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*synth_cmd) return run_synth(synth);
        if (*build_cmd) return run_build(build);
        if (*query_cmd) return run_query(query);
        if (*gt_cmd) return run_gt(gt);
        if (*eval_cmd) return run_eval(eval);
        if (*trace_cmd) return run_sim_trace(trace);
        if (*run_cmd) return run_sim_run(run);
        if (*strace_cmd) return run_sim_synth(strace);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.is_format_error() ? kExitFormat : kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
