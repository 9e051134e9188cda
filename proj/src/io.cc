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


#include "spanns/io.h"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "spanns/error.h"

namespace spanns {

namespace {

using Magic = std::array<char, 4>;

constexpr Magic kSvecMagic{'S', 'V', 'E', 'C'};
constexpr Magic kIndexMagic{'S', 'P', 'I', 'X'};
constexpr Magic kGtMagic{'S', 'P', 'G', 'T'};
constexpr Magic kTraceMagic{'S', 'P', 'T', 'R'};

class Writer {
 public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void magic(const Magic& m) { out_.write(m.data(), m.size()); }

    void u32(uint32_t v) {
        std::array<char, 4> b;
        for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out_.write(b.data(), b.size());
    }

    void u64(uint64_t v) {
        std::array<char, 8> b;
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out_.write(b.data(), b.size());
    }

    void f32(float v) { u32(std::bit_cast<uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }

    void vector_body(const SparseVector& x) {
        u32(static_cast<uint32_t>(x.nnz()));
        for (DimId d : x.dims()) u32(d);
        for (float v : x.vals()) f32(v);
    }

    void done() {
        if (!out_) {
            throw Error(ErrorCode::kIo, "write failed");
        }
    }

 private:
    std::ostream& out_;
};

class Reader {
 public:
    explicit Reader(std::istream& in) : in_(in) {}

    void expect_magic(const Magic& m, const char* what) {
        Magic got{};
        bytes(got.data(), got.size(), what);
        if (got != m) {
            throw Error(ErrorCode::kBadMagic, std::string("expected ") + what + " file magic");
        }
    }

    void expect_version(const char* what) {
        const uint32_t v = u32(what);
        if (v != kFormatVersion) {
            throw Error(ErrorCode::kVersionMismatch, std::string(what) + " version " + std::to_string(v) +
                                                         ", reader supports " +
                                                         std::to_string(kFormatVersion));
        }
    }

    uint32_t u32(const char* what) {
        std::array<unsigned char, 4> b;
        bytes(reinterpret_cast<char*>(b.data()), b.size(), what);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t{b[i]} << (8 * i);
        return v;
    }

    uint64_t u64(const char* what) {
        std::array<unsigned char, 8> b;
        bytes(reinterpret_cast<char*>(b.data()), b.size(), what);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t{b[i]} << (8 * i);
        return v;
    }

    float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
    double f64(const char* what) { return std::bit_cast<double>(u64(what)); }

    // Vector body with the checks the constructor would otherwise paper
    // over: zeros are rejected rather than dropped.
    SparseVector vector_body(const char* what, uint32_t max_dim) {
        const uint32_t nnz = u32(what);
        std::vector<DimId> dims(nnz);
        std::vector<float> vals(nnz);
        for (uint32_t i = 0; i < nnz; ++i) {
            dims[i] = u32(what);
            if (i > 0 && dims[i] <= dims[i - 1]) {
                throw Error(ErrorCode::kNonAscending, std::string(what) + ": dims not strictly ascending");
            }
            if (dims[i] >= max_dim) {
                throw Error(ErrorCode::kInvalidValue, std::string(what) + ": dim " + std::to_string(dims[i]) +
                                                          " >= max_dim " + std::to_string(max_dim));
            }
        }
        for (uint32_t i = 0; i < nnz; ++i) {
            vals[i] = f32(what);
            if (!(vals[i] > 0.0f) || !std::isfinite(vals[i])) {
                throw Error(ErrorCode::kInvalidValue, std::string(what) + ": value must be finite and > 0");
            }
        }
        return SparseVector(std::move(dims), std::move(vals));
    }

    bool at_eof() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
    void bytes(char* dst, std::size_t n, const char* what) {
        in_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            throw Error(ErrorCode::kTruncated, std::string(what) + ": unexpected end of file");
        }
    }

    std::istream& in_;
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
    }
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::kIo, "cannot open " + path);
    }
    return in;
}

void write_svecs_body(Writer& w, std::span<const SparseVector> vectors) {
    DimId max_dim = 0;
    for (const auto& x : vectors) {
        max_dim = std::max(max_dim, x.dim_bound());
    }
    w.u64(vectors.size());
    w.u32(max_dim);
    for (const auto& x : vectors) {
        w.vector_body(x);
    }
}

std::vector<SparseVector> read_svecs_body(Reader& r, const char* what) {
    const uint64_t count = r.u64(what);
    const uint32_t max_dim = r.u32(what);
    std::vector<SparseVector> out;
    out.reserve(static_cast<std::size_t>(std::min<uint64_t>(count, 1u << 20)));
    for (uint64_t i = 0; i < count; ++i) {
        out.push_back(r.vector_body(what, max_dim));
    }
    return out;
}

}  // namespace

SvecsReader::SvecsReader(std::istream& in) : in_(in) {
    Reader r(in_);
    r.expect_magic(kSvecMagic, "svecs");
    r.expect_version("svecs");
    count_ = r.u64("svecs");
    max_dim_ = r.u32("svecs");
}

bool SvecsReader::next(SparseVector& out) {
    if (read_ == count_) {
        return false;
    }
    Reader r(in_);
    out = r.vector_body("svecs", max_dim_);
    ++read_;
    return true;
}

void write_svecs(std::ostream& out, std::span<const SparseVector> vectors) {
    Writer w(out);
    w.magic(kSvecMagic);
    w.u32(kFormatVersion);
    write_svecs_body(w, vectors);
    w.done();
}

void write_svecs(const std::string& path, std::span<const SparseVector> vectors) {
    auto out = open_out(path);
    write_svecs(out, vectors);
}

std::vector<SparseVector> read_svecs(std::istream& in) {
    SvecsReader reader(in);
    std::vector<SparseVector> out;
    out.reserve(static_cast<std::size_t>(std::min<uint64_t>(reader.count(), 1u << 20)));
    SparseVector x;
    while (reader.next(x)) {
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<SparseVector> read_svecs(const std::string& path) {
    auto in = open_in(path);
    return read_svecs(in);
}

void save_index(std::ostream& out, const HybridIndex& index) {
    Writer w(out);
    w.magic(kIndexMagic);
    w.u32(kFormatVersion);
    const BuildParams& p = index.params();
    w.f64(p.posting_keep_frac);
    w.f64(p.record_keep_frac);
    w.f64(p.alpha);
    w.u32(p.target_cluster_size);
    w.u32(p.kmeans_iters);
    w.u64(p.seed);
    write_svecs_body(w, index.forward());
    w.u32(static_cast<uint32_t>(index.postings().size()));
    for (const Posting& posting : index.postings()) {
        w.u32(posting.dim);
        w.u32(static_cast<uint32_t>(posting.clusters.size()));
        for (const Cluster& c : posting.clusters) {
            w.u64(c.id);
            w.vector_body(c.silhouette);
            w.u32(static_cast<uint32_t>(c.members.size()));
            for (RecordId id : c.members) {
                w.u32(id);
            }
        }
    }
    w.done();
}

void save_index(const std::string& path, const HybridIndex& index) {
    auto out = open_out(path);
    save_index(out, index);
}

HybridIndex load_index(std::istream& in) {
    Reader r(in);
    const char* what = "index";
    r.expect_magic(kIndexMagic, what);
    r.expect_version(what);
    BuildParams p;
    p.posting_keep_frac = r.f64(what);
    p.record_keep_frac = r.f64(what);
    p.alpha = r.f64(what);
    p.target_cluster_size = r.u32(what);
    p.kmeans_iters = r.u32(what);
    p.seed = r.u64(what);
    try {
        p.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::kInvalidValue, std::string("index params: ") + e.what());
    }
    auto forward = read_svecs_body(r, what);
    const uint32_t num_postings = r.u32(what);
    std::vector<Posting> postings;
    postings.reserve(std::min<uint32_t>(num_postings, 1u << 20));
    for (uint32_t i = 0; i < num_postings; ++i) {
        Posting posting;
        posting.dim = r.u32(what);
        const uint32_t num_clusters = r.u32(what);
        for (uint32_t c = 0; c < num_clusters; ++c) {
            Cluster cluster;
            cluster.id = r.u64(what);
            cluster.silhouette = r.vector_body(what, UINT32_MAX);
            const uint32_t members = r.u32(what);
            cluster.members.resize(members);
            for (uint32_t m = 0; m < members; ++m) {
                cluster.members[m] = r.u32(what);
            }
            posting.clusters.push_back(std::move(cluster));
        }
        postings.push_back(std::move(posting));
    }
    return HybridIndex(std::move(postings), std::move(forward), p);
}

HybridIndex load_index(const std::string& path) {
    auto in = open_in(path);
    return load_index(in);
}

void write_ground_truth(std::ostream& out, std::span<const GroundTruthRow> rows, uint32_t k) {
    if (k == 0) {
        throw Error(ErrorCode::kInvalidValue, "ground truth k must be >= 1");
    }
    Writer w(out);
    w.magic(kGtMagic);
    w.u32(k);
    for (const auto& row : rows) {
        if (row.size() > k) {
            throw Error(ErrorCode::kInvalidValue, "ground truth row longer than k");
        }
        for (uint32_t i = 0; i < k; ++i) {
            if (i < row.size()) {
                w.u32(row[i].id);
                w.f32(row[i].score);
            } else {
                w.u32(kPadId);
                w.f32(0.0f);
            }
        }
    }
    w.done();
}

void write_ground_truth(const std::string& path, std::span<const GroundTruthRow> rows, uint32_t k) {
    auto out = open_out(path);
    write_ground_truth(out, rows, k);
}

GroundTruthFile read_ground_truth(std::istream& in) {
    Reader r(in);
    const char* what = "ground truth";
    r.expect_magic(kGtMagic, what);
    GroundTruthFile gt;
    gt.k = r.u32(what);
    if (gt.k == 0) {
        throw Error(ErrorCode::kInvalidValue, "ground truth k must be >= 1");
    }
    while (!r.at_eof()) {
        GroundTruthRow row;
        for (uint32_t i = 0; i < gt.k; ++i) {
            const uint32_t id = r.u32(what);
            const float score = r.f32(what);
            if (id != kPadId) {
                row.push_back(Scored{score, id});
            }
        }
        gt.rows.push_back(std::move(row));
    }
    return gt;
}

GroundTruthFile read_ground_truth(const std::string& path) {
    auto in = open_in(path);
    return read_ground_truth(in);
}

void write_trace(std::ostream& out, const SimTrace& trace) {
    Writer w(out);
    w.magic(kTraceMagic);
    w.u32(kFormatVersion);
    w.u32(trace.k);
    w.u32(static_cast<uint32_t>(trace.clusters.size()));
    for (const ClusterJob& job : trace.clusters) {
        w.u64(job.cluster_id);
        w.f32(job.silhouette_score);
        w.u32(static_cast<uint32_t>(job.records.size()));
        for (const TraceRecord& rec : job.records) {
            w.u64(rec.id);
            w.u32(rec.cost_cycles);
            w.f32(rec.true_score);
        }
    }
    w.done();
}

void write_trace(const std::string& path, const SimTrace& trace) {
    auto out = open_out(path);
    write_trace(out, trace);
}

SimTrace read_trace(std::istream& in) {
    Reader r(in);
    const char* what = "trace";
    r.expect_magic(kTraceMagic, what);
    r.expect_version(what);
    SimTrace trace;
    trace.k = r.u32(what);
    const uint32_t num_clusters = r.u32(what);
    trace.clusters.reserve(std::min<uint32_t>(num_clusters, 1u << 20));
    for (uint32_t c = 0; c < num_clusters; ++c) {
        ClusterJob job;
        job.cluster_id = r.u64(what);
        job.silhouette_score = r.f32(what);
        const uint32_t num_records = r.u32(what);
        job.records.reserve(std::min<uint32_t>(num_records, 1u << 20));
        for (uint32_t i = 0; i < num_records; ++i) {
            const uint64_t id = r.u64(what);
            if (id > UINT32_MAX) {
                throw Error(ErrorCode::kInvalidValue, "trace record id out of range");
            }
            TraceRecord rec;
            rec.id = static_cast<RecordId>(id);
            rec.cost_cycles = r.u32(what);
            rec.true_score = r.f32(what);
            job.records.push_back(rec);
        }
        trace.clusters.push_back(std::move(job));
    }
    return trace;
}

SimTrace read_trace(const std::string& path) {
    auto in = open_in(path);
    return read_trace(in);
}

}  // namespace spanns
