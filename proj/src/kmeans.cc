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

// Jaccard k-means over the members of one posting.
//
// Member dim sets are remapped to a compact local id space so that centroid
// membership counts can live in flat arrays. Assignment walks an inverted
// index from local dim to centroids, so a member only touches the centroids
// whose intersection with it differs from the common baseline.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "spanns/builder.h"
#include "spanns/error.h"

namespace spanns {

namespace {

constexpr uint32_t kUnmapped = UINT32_MAX;

// Jaccard similarity as an exact fraction inter / uni.
struct Similarity {
    uint64_t inter = 0;
    uint64_t uni = 1;

    bool closer_than(const Similarity& o) const noexcept { return inter * o.uni > o.inter * uni; }
    bool farther_than(const Similarity& o) const noexcept { return inter * o.uni < o.inter * uni; }
};

struct LocalSets {
    std::vector<std::size_t> offsets;  // CSR over members
    std::vector<uint32_t> dims;        // local dim ids
    std::vector<DimId> global;         // local -> global dim

    std::span<const uint32_t> member(std::size_t m) const {
        return {dims.data() + offsets[m], offsets[m + 1] - offsets[m]};
    }
};

LocalSets remap_members(std::span<const ClusterMember> members, std::span<const std::size_t> order) {
    // grows to the largest dim seen on this thread; entries are reset before return
    thread_local std::vector<uint32_t> remap;
    LocalSets sets;
    sets.offsets.reserve(members.size() + 1);
    sets.offsets.push_back(0);
    for (std::size_t idx : order) {
        for (DimId d : members[idx].dims) {
            if (d >= remap.size()) {
                remap.resize(static_cast<std::size_t>(d) + 1, kUnmapped);
            }
            if (remap[d] == kUnmapped) {
                remap[d] = static_cast<uint32_t>(sets.global.size());
                sets.global.push_back(d);
            }
            sets.dims.push_back(remap[d]);
        }
        sets.offsets.push_back(sets.dims.size());
    }
    for (DimId d : sets.global) {
        remap[d] = kUnmapped;
    }
    return sets;
}

class JaccardKMeans {
 public:
    JaccardKMeans(const LocalSets& sets, std::size_t num_clusters)
        : sets_(sets),
          n_(sets.offsets.size() - 1),
          k_(num_clusters),
          centroids_(num_clusters),
          assign_(n_, 0),
          sim_(n_),
          delta_(num_clusters, 0),
          mark_(num_clusters, 0),
          freq_(sets.global.size(), 0) {
        for (std::size_t c = 0; c < k_; ++c) {
            const auto seed = sets_.member(c * n_ / k_);
            centroids_[c].assign(seed.begin(), seed.end());
        }
    }

    void run(uint32_t max_iters) {
        std::vector<uint32_t> prev;
        const uint32_t iters = std::max<uint32_t>(max_iters, 1);
        for (uint32_t it = 0; it < iters; ++it) {
            assign_all();
            reseed_empty();
            if (assign_ == prev) {
                break;
            }
            prev = assign_;
            if (it + 1 < iters) {
                update_centroids();
            }
        }
    }

    const std::vector<uint32_t>& assignment() const { return assign_; }

 private:
    // Inverted lists from local dim to centroids. A dim held by more than half
    // of the centroids is stored by its complement (the centroids lacking it),
    // which keeps per-member work proportional to the rarer side.
    void build_inverted() {
        const std::size_t u = sets_.global.size();
        std::vector<uint32_t> occ(u, 0);
        for (const auto& c : centroids_) {
            for (uint32_t d : c) {
                ++occ[d];
            }
        }
        dense_.assign(u, 0);
        inv_offsets_.assign(u + 1, 0);
        for (std::size_t d = 0; d < u; ++d) {
            dense_[d] = 2 * occ[d] > k_ ? 1 : 0;
            inv_offsets_[d + 1] = inv_offsets_[d] + (dense_[d] ? k_ - occ[d] : occ[d]);
        }
        inv_.resize(inv_offsets_.back());
        std::vector<std::size_t> cursor(inv_offsets_.begin(), inv_offsets_.end() - 1);
        std::vector<uint32_t> dense_dims;
        for (uint32_t d = 0; d < u; ++d) {
            if (dense_[d]) {
                dense_dims.push_back(d);
            }
        }
        std::vector<uint32_t> dims;
        for (uint32_t c = 0; c < k_; ++c) {
            dims.assign(centroids_[c].begin(), centroids_[c].end());
            std::sort(dims.begin(), dims.end());
            for (uint32_t d : dims) {
                if (!dense_[d]) {
                    inv_[cursor[d]++] = c;
                }
            }
            std::size_t j = 0;
            for (uint32_t d : dense_dims) {
                while (j < dims.size() && dims[j] < d) {
                    ++j;
                }
                if (j == dims.size() || dims[j] != d) {
                    inv_[cursor[d]++] = c;
                }
            }
        }
        by_size_.resize(k_);
        for (uint32_t c = 0; c < k_; ++c) {
            by_size_[c] = c;
        }
        std::stable_sort(by_size_.begin(), by_size_.end(), [&](uint32_t a, uint32_t b) {
            return centroids_[a].size() < centroids_[b].size();
        });
    }

    void assign_all() {
        build_inverted();
        std::vector<uint32_t> touched;
        touched.reserve(k_);
        for (std::size_t m = 0; m < n_; ++m) {
            const auto dims = sets_.member(m);
            int64_t base = 0;
            for (uint32_t d : dims) {
                const int32_t step = dense_[d] ? -1 : 1;
                base += dense_[d];
                for (std::size_t p = inv_offsets_[d]; p < inv_offsets_[d + 1]; ++p) {
                    const uint32_t c = inv_[p];
                    if (!mark_[c]) {
                        mark_[c] = 1;
                        touched.push_back(c);
                    }
                    delta_[c] += step;
                }
            }
            const uint64_t a = dims.size();
            auto sim_of = [&](uint32_t c, uint64_t inter) {
                return Similarity{inter, a + centroids_[c].size() - inter};
            };
            // best centroid that no inverted list touched: all share inter == base
            uint32_t best = UINT32_MAX;
            Similarity best_sim;
            if (touched.size() < k_) {
                if (base == 0) {
                    for (uint32_t c = 0; c < k_; ++c) {
                        if (!mark_[c]) {
                            best = c;
                            break;
                        }
                    }
                } else {
                    for (uint32_t c : by_size_) {
                        if (!mark_[c]) {
                            best = c;
                            break;
                        }
                    }
                }
                best_sim = sim_of(best, static_cast<uint64_t>(base));
            }
            for (uint32_t c : touched) {
                const Similarity s = sim_of(c, static_cast<uint64_t>(base + delta_[c]));
                if (best == UINT32_MAX || s.closer_than(best_sim) || (!best_sim.closer_than(s) && c < best)) {
                    best = c;
                    best_sim = s;
                }
                mark_[c] = 0;
                delta_[c] = 0;
            }
            touched.clear();
            assign_[m] = best;
            sim_[m] = best_sim;
        }
    }

    // Empty clusters take the members farthest from their centroids. A donor
    // cluster never drops below one member.
    void reseed_empty() {
        std::vector<std::size_t> sizes(k_, 0);
        for (uint32_t c : assign_) {
            ++sizes[c];
        }
        if (std::find(sizes.begin(), sizes.end(), 0) == sizes.end()) {
            return;
        }
        std::vector<std::size_t> far_first(n_);
        for (std::size_t m = 0; m < n_; ++m) {
            far_first[m] = m;
        }
        std::stable_sort(far_first.begin(), far_first.end(),
                         [&](std::size_t x, std::size_t y) { return sim_[x].farther_than(sim_[y]); });
        std::size_t next = 0;
        for (uint32_t c = 0; c < k_; ++c) {
            if (sizes[c] != 0) {
                continue;
            }
            while (next < n_ && sizes[assign_[far_first[next]]] <= 1) {
                ++next;
            }
            if (next == n_) {
                break;
            }
            const std::size_t pick = far_first[next++];
            --sizes[assign_[pick]];
            ++sizes[c];
            assign_[pick] = c;
            const auto dims = sets_.member(pick);
            centroids_[c].assign(dims.begin(), dims.end());
            sim_[pick] = Similarity{dims.size(), dims.size()};
        }
    }

    void update_centroids() {
        std::vector<std::vector<std::size_t>> by_cluster(k_);
        for (std::size_t m = 0; m < n_; ++m) {
            by_cluster[assign_[m]].push_back(m);
        }
        std::vector<uint32_t> touched;
        for (std::size_t c = 0; c < k_; ++c) {
            const auto& ms = by_cluster[c];
            if (ms.empty()) {
                continue;
            }
            std::size_t total = 0;
            for (std::size_t m : ms) {
                const auto dims = sets_.member(m);
                total += dims.size();
                for (uint32_t d : dims) {
                    if (freq_[d]++ == 0) {
                        touched.push_back(d);
                    }
                }
            }
            const auto r = static_cast<std::size_t>(
                std::lround(static_cast<double>(total) / static_cast<double>(ms.size())));
            const std::size_t keep = std::min(std::max<std::size_t>(r, 1), touched.size());
            auto more_frequent = [&](uint32_t a, uint32_t b) {
                return freq_[a] > freq_[b] || (freq_[a] == freq_[b] && sets_.global[a] < sets_.global[b]);
            };
            std::nth_element(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(keep - 1),
                             touched.end(), more_frequent);
            centroids_[c].assign(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(keep));
            for (uint32_t d : touched) {
                freq_[d] = 0;
            }
            touched.clear();
        }
    }

    const LocalSets& sets_;
    std::size_t n_;
    std::size_t k_;
    std::vector<std::vector<uint32_t>> centroids_;
    std::vector<uint32_t> assign_;
    std::vector<Similarity> sim_;
    std::vector<int32_t> delta_;
    std::vector<uint8_t> mark_;
    std::vector<uint8_t> dense_;
    std::vector<uint32_t> by_size_;
    std::vector<uint32_t> freq_;
    std::vector<std::size_t> inv_offsets_;
    std::vector<uint32_t> inv_;
};

}  // namespace

std::vector<std::vector<RecordId>> cluster_posting(std::span<const ClusterMember> members,
                                                   const BuildParams& params) {
    if (members.empty()) {
        throw Error(ErrorCode::kEmptyInput, "cannot cluster an empty posting");
    }
    if (params.target_cluster_size == 0) {
        throw Error(ErrorCode::kInvalidArgument, "target_cluster_size must be >= 1");
    }
    std::vector<std::size_t> order(members.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return members[a].id < members[b].id; });

    const std::size_t n = members.size();
    const std::size_t num_clusters = (n + params.target_cluster_size - 1) / params.target_cluster_size;
    if (num_clusters <= 1) {
        std::vector<RecordId> all;
        all.reserve(n);
        for (std::size_t idx : order) {
            all.push_back(members[idx].id);
        }
        return {std::move(all)};
    }

    const LocalSets sets = remap_members(members, order);
    JaccardKMeans km(sets, num_clusters);
    km.run(params.kmeans_iters);

    std::vector<std::vector<RecordId>> groups(num_clusters);
    const auto& assign = km.assignment();
    for (std::size_t m = 0; m < n; ++m) {
        groups[assign[m]].push_back(members[order[m]].id);
    }
    std::erase_if(groups, [](const auto& g) { return g.empty(); });
    return groups;
}

}  // namespace spanns
