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

#include "spanns/builder.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spanns/error.h"

namespace spanns {

namespace {

bool in_unit_interval(double f) { return f > 0.0 && f <= 1.0; }

}  // namespace

void BuildParams::validate() const {
    if (!in_unit_interval(posting_keep_frac)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "posting_keep_frac must be in (0,1], got " + std::to_string(posting_keep_frac));
    }
    if (!in_unit_interval(record_keep_frac)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "record_keep_frac must be in (0,1], got " + std::to_string(record_keep_frac));
    }
    if (!in_unit_interval(alpha)) {
        throw Error(ErrorCode::kInvalidArgument, "alpha must be in (0,1], got " + std::to_string(alpha));
    }
    if (target_cluster_size == 0) {
        throw Error(ErrorCode::kInvalidArgument, "target_cluster_size must be >= 1");
    }
}

HybridIndex::HybridIndex(std::vector<Posting> postings, std::vector<SparseVector> forward,
                         BuildParams params)
    : postings_(std::move(postings)), forward_(std::move(forward)), params_(params) {
    DimId bound = 0;
    ClusterId next_id = 0;
    for (std::size_t p = 0; p < postings_.size(); ++p) {
        const Posting& posting = postings_[p];
        if (p > 0 && posting.dim <= postings_[p - 1].dim) {
            throw Error(ErrorCode::kNonAscending, "postings must be sorted by dim");
        }
        for (const Cluster& c : posting.clusters) {
            if (c.id != next_id) {
                throw Error(ErrorCode::kInvalidArgument,
                            "cluster ids must be dense; expected " + std::to_string(next_id) +
                                ", found " + std::to_string(c.id));
            }
            ++next_id;
            for (std::size_t i = 0; i < c.members.size(); ++i) {
                if (c.members[i] >= forward_.size()) {
                    throw Error(ErrorCode::kDanglingId,
                                "member " + std::to_string(c.members[i]) + " with " +
                                    std::to_string(forward_.size()) + " forward records");
                }
                if (i > 0 && c.members[i] <= c.members[i - 1]) {
                    throw Error(ErrorCode::kNonAscending, "cluster members must be ascending");
                }
            }
        }
        bound = posting.dim + 1;
    }
    num_clusters_ = next_id;
    slot_of_dim_.assign(bound, kNoSlot);
    for (std::size_t p = 0; p < postings_.size(); ++p) {
        slot_of_dim_[postings_[p].dim] = static_cast<uint32_t>(p);
    }
}

std::size_t HybridIndex::total_memberships() const noexcept {
    std::size_t total = 0;
    for (const auto& p : postings_) {
        for (const auto& c : p.clusters) {
            total += c.members.size();
        }
    }
    return total;
}

std::size_t keep_count(double frac, std::size_t n) noexcept {
    if (n == 0) {
        return 0;
    }
    // the small bias stops products like 0.2 * 5 from rounding up past 1.0
    const double raw = std::ceil(frac * static_cast<double>(n) - 1e-9);
    const auto kept = static_cast<std::size_t>(std::max(raw, 1.0));
    return std::min(kept, n);
}

std::vector<PostingList> build_postings(std::span<const SparseVector> dataset, double keep_frac) {
    if (!in_unit_interval(keep_frac)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "posting keep fraction must be in (0,1], got " + std::to_string(keep_frac));
    }
    DimId bound = 0;
    for (const auto& x : dataset) {
        bound = std::max(bound, x.dim_bound());
    }
    std::vector<std::size_t> offsets(static_cast<std::size_t>(bound) + 1, 0);
    for (const auto& x : dataset) {
        for (DimId d : x.dims()) {
            ++offsets[d + 1];
        }
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    std::vector<PostingEntry> flat(offsets.back());
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        const auto& x = dataset[r];
        for (std::size_t i = 0; i < x.nnz(); ++i) {
            flat[cursor[x.dim(i)]++] = PostingEntry{static_cast<RecordId>(r), x.val(i)};
        }
    }

    std::vector<PostingList> out;
    for (DimId d = 0; d < bound; ++d) {
        const std::size_t begin = offsets[d];
        const std::size_t end = offsets[d + 1];
        if (begin == end) {
            continue;
        }
        PostingList list{d, std::vector<PostingEntry>(flat.begin() + static_cast<std::ptrdiff_t>(begin),
                                                      flat.begin() + static_cast<std::ptrdiff_t>(end))};
        const std::size_t keep = keep_count(keep_frac, list.entries.size());
        if (keep < list.entries.size()) {
            auto by_value = [](const PostingEntry& a, const PostingEntry& b) {
                return a.value > b.value || (a.value == b.value && a.id < b.id);
            };
            std::nth_element(list.entries.begin(), list.entries.begin() + static_cast<std::ptrdiff_t>(keep),
                             list.entries.end(), by_value);
            list.entries.resize(keep);
            std::sort(list.entries.begin(), list.entries.end(),
                      [](const PostingEntry& a, const PostingEntry& b) { return a.id < b.id; });
        }
        out.push_back(std::move(list));
    }
    return out;
}

SparseVector truncate_record(const SparseVector& x, double keep_frac) {
    const std::size_t keep = keep_count(keep_frac, x.nnz());
    if (keep >= x.nnz()) {
        return x;
    }
    std::vector<std::size_t> order(x.nnz());
    std::iota(order.begin(), order.end(), 0);
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return x.val(a) > x.val(b) || (x.val(a) == x.val(b) && a < b);
                     });
    order.resize(keep);
    std::sort(order.begin(), order.end());
    std::vector<DimId> dims;
    std::vector<float> vals;
    dims.reserve(keep);
    vals.reserve(keep);
    for (std::size_t i : order) {
        dims.push_back(x.dim(i));
        vals.push_back(x.val(i));
    }
    return SparseVector(std::move(dims), std::move(vals));
}

double jaccard_distance(std::span<const DimId> a, std::span<const DimId> b) noexcept {
    if (a.empty() && b.empty()) {
        return 0.0;
    }
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t inter = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++inter;
            ++i;
            ++j;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

// Dense per-thread scratch indexed by global dim. Every user restores the
// arrays to all-zero before returning.
struct DimScratch {
    std::vector<float> value;
    std::vector<uint8_t> selected;
    std::vector<DimId> touched;

    void reserve_dim(DimId d) {
        if (d >= value.size()) {
            value.resize(static_cast<std::size_t>(d) + 1, 0.0f);
            selected.resize(static_cast<std::size_t>(d) + 1, 0);
        }
    }
};

DimScratch& scratch() {
    thread_local DimScratch s;
    return s;
}

// Fills scratch.value with the element-wise max and scratch.touched with the
// sorted support. Caller must clear.
void accumulate_max(std::span<const SparseVector* const> members, DimScratch& s) {
    for (const SparseVector* m : members) {
        for (std::size_t i = 0; i < m->nnz(); ++i) {
            const DimId d = m->dim(i);
            s.reserve_dim(d);
            float& slot = s.value[d];
            if (slot == 0.0f) {
                s.touched.push_back(d);
            }
            slot = std::max(slot, m->val(i));
        }
    }
    std::sort(s.touched.begin(), s.touched.end());
}

void clear_scratch(DimScratch& s) {
    for (DimId d : s.touched) {
        s.value[d] = 0.0f;
        s.selected[d] = 0;
    }
    s.touched.clear();
}

SparseVector summary_from_scratch(const DimScratch& s) {
    std::vector<DimId> dims(s.touched.begin(), s.touched.end());
    std::vector<float> vals;
    vals.reserve(dims.size());
    for (DimId d : dims) {
        vals.push_back(s.value[d]);
    }
    return SparseVector(std::move(dims), std::move(vals));
}

std::vector<DimId> rank_by_value(const SparseVector& x) {
    std::vector<std::size_t> order(x.nnz());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x.val(a) > x.val(b) || (x.val(a) == x.val(b) && a < b);
    });
    std::vector<DimId> ranked;
    ranked.reserve(order.size());
    for (std::size_t i : order) {
        ranked.push_back(x.dim(i));
    }
    return ranked;
}

// Round-robin selection over members whose dims are pre-ranked by value.
template <typename RankedOf>
SparseVector silhouette_impl(std::span<const SparseVector* const> members, RankedOf ranked_of, double alpha) {
    DimScratch& s = scratch();
    accumulate_max(members, s);
    if (alpha >= 1.0 || s.touched.size() <= 1) {
        SparseVector out = summary_from_scratch(s);
        clear_scratch(s);
        return out;
    }
    double total = 0.0;
    for (DimId d : s.touched) {
        total += s.value[d];
    }
    const double target = alpha * total;
    const std::size_t support = s.touched.size();

    std::vector<std::size_t> cursor(members.size(), 0);
    std::vector<DimId> picked;
    double mass = 0.0;
    bool progressed = true;
    while (mass < target && picked.size() < support && progressed) {
        progressed = false;
        for (std::size_t m = 0; m < members.size(); ++m) {
            const std::span<const DimId> ranked = ranked_of(m);
            auto& c = cursor[m];
            while (c < ranked.size()) {
                const DimId d = ranked[c++];
                if (!s.selected[d]) {
                    s.selected[d] = 1;
                    picked.push_back(d);
                    mass += s.value[d];
                    progressed = true;
                    break;
                }
            }
            if (mass >= target || picked.size() == support) {
                break;
            }
        }
    }

    std::sort(picked.begin(), picked.end());
    std::vector<float> vals;
    vals.reserve(picked.size());
    for (DimId d : picked) {
        vals.push_back(s.value[d]);
    }
    clear_scratch(s);
    return SparseVector(std::move(picked), std::move(vals));
}

}  // namespace

SparseVector elementwise_max(std::span<const SparseVector* const> members) {
    DimScratch& s = scratch();
    accumulate_max(members, s);
    SparseVector out = summary_from_scratch(s);
    clear_scratch(s);
    return out;
}

SparseVector build_silhouette(std::span<const SparseVector* const> members, double alpha) {
    std::vector<std::vector<DimId>> ranked;
    if (alpha < 1.0) {
        ranked.reserve(members.size());
        for (const SparseVector* m : members) {
            ranked.push_back(rank_by_value(*m));
        }
    }
    return silhouette_impl(
        members, [&](std::size_t m) { return std::span<const DimId>(ranked[m]); }, alpha);
}

namespace {

// Truncated records plus, when alpha < 1, each record's dims ranked by value.
struct TruncatedSet {
    std::vector<SparseVector> records;
    std::vector<std::vector<DimId>> ranked;
};

Posting build_one_posting(const PostingList& list, const TruncatedSet& truncated_set,
                          const BuildParams& params) {
    const auto& truncated = truncated_set.records;
    std::vector<ClusterMember> members;
    members.reserve(list.entries.size());
    for (const auto& e : list.entries) {
        members.push_back(ClusterMember{e.id, truncated[e.id].dims()});
    }
    Posting posting;
    posting.dim = list.dim;
    auto groups = cluster_posting(members, params);
    posting.clusters.reserve(groups.size());
    std::vector<const SparseVector*> ptrs;
    for (auto& group : groups) {
        ptrs.clear();
        for (RecordId id : group) {
            ptrs.push_back(&truncated[id]);
        }
        Cluster c;
        c.silhouette = silhouette_impl(
            ptrs,
            [&](std::size_t m) { return std::span<const DimId>(truncated_set.ranked[group[m]]); },
            params.alpha);
        c.members = std::move(group);
        posting.clusters.push_back(std::move(c));
    }
    return posting;
}

void check_build_inputs(const std::vector<SparseVector>& dataset, const BuildParams& params) {
    params.validate();
    if (dataset.empty()) {
        throw Error(ErrorCode::kEmptyInput, "cannot build an index over an empty dataset");
    }
}

HybridIndex assemble(std::vector<Posting> postings, std::vector<SparseVector> dataset,
                     const BuildParams& params) {
    ClusterId next = 0;
    for (auto& p : postings) {
        for (auto& c : p.clusters) {
            c.id = next++;
        }
    }
    return HybridIndex(std::move(postings), std::move(dataset), params);
}

}  // namespace

HybridIndex build_index(std::vector<SparseVector> dataset, const BuildParams& params) {
    check_build_inputs(dataset, params);
    const auto lists = build_postings(dataset, params.posting_keep_frac);

    TruncatedSet truncated;
    truncated.records.resize(dataset.size());
    if (params.alpha < 1.0) {
        truncated.ranked.resize(dataset.size());
    }
    const auto n = static_cast<std::ptrdiff_t>(dataset.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
        truncated.records[r] = truncate_record(dataset[r], params.record_keep_frac);
        if (params.alpha < 1.0) {
            truncated.ranked[r] = rank_by_value(truncated.records[r]);
        }
    }

    std::vector<Posting> postings(lists.size());
    const auto num_lists = static_cast<std::ptrdiff_t>(lists.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t p = 0; p < num_lists; ++p) {
        postings[p] = build_one_posting(lists[p], truncated, params);
    }
    return assemble(std::move(postings), std::move(dataset), params);
}

HybridIndex build_index_serial(std::vector<SparseVector> dataset, const BuildParams& params) {
    check_build_inputs(dataset, params);
    const auto lists = build_postings(dataset, params.posting_keep_frac);
    TruncatedSet truncated;
    truncated.records.reserve(dataset.size());
    for (const auto& x : dataset) {
        truncated.records.push_back(truncate_record(x, params.record_keep_frac));
        if (params.alpha < 1.0) {
            truncated.ranked.push_back(rank_by_value(truncated.records.back()));
        }
    }
    std::vector<Posting> postings;
    postings.reserve(lists.size());
    for (const auto& list : lists) {
        postings.push_back(build_one_posting(list, truncated, params));
    }
    return assemble(std::move(postings), std::move(dataset), params);
}

}  // namespace spanns
