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

#include "spanns/synth.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "spanns/error.h"

namespace spanns {

namespace {

// Inverse-CDF sampler over ranks 0..n-1 with weight (r+1)^-s.
class ZipfSampler {
 public:
    ZipfSampler(std::size_t n, double s) : cdf_(n) {
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            acc += std::pow(static_cast<double>(r + 1), -s);
            cdf_[r] = acc;
        }
    }

    template <typename Rng>
    std::size_t operator()(Rng& rng) const {
        std::uniform_real_distribution<double> u(0.0, cdf_.back());
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u(rng));
        return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
    }

 private:
    std::vector<double> cdf_;
};

struct Topic {
    std::vector<DimId> vocab;  // ranked: earlier entries are drawn more often
};

class Generator {
 public:
    explicit Generator(const SynthParams& p)
        : p_(p),
          rng_(p.seed),
          popularity_(p.num_dims, p.zipf),
          within_topic_(p.topic_vocab, 0.7),
          rank_to_dim_(p.num_dims),
          taken_(p.num_dims, 0) {
        std::iota(rank_to_dim_.begin(), rank_to_dim_.end(), 0);
        std::shuffle(rank_to_dim_.begin(), rank_to_dim_.end(), rng_);
        std::uniform_int_distribution<DimId> any_dim(0, p.num_dims - 1);
        topics_.resize(p.num_topics);
        for (auto& t : topics_) {
            while (t.vocab.size() < p.topic_vocab) {
                const DimId d = any_dim(rng_);
                if (!taken_[d]) {
                    taken_[d] = 1;
                    t.vocab.push_back(d);
                }
            }
            for (DimId d : t.vocab) {
                taken_[d] = 0;
            }
        }
    }

    SparseVector record() {
        std::normal_distribution<double> nnz_dist(p_.nnz_mean, p_.nnz_std);
        const double raw = std::round(nnz_dist(rng_));
        const auto nnz = static_cast<std::size_t>(
            std::clamp(raw, 1.0, static_cast<double>(p_.effective_nnz_max())));
        return vector_of(nnz);
    }

    SparseVector query() {
        std::uniform_int_distribution<uint32_t> nnz_dist(p_.query_nnz_min, p_.query_nnz_max);
        return vector_of(nnz_dist(rng_));
    }

 private:
    SparseVector vector_of(std::size_t nnz) {
        std::uniform_int_distribution<uint32_t> pick_topic(0, p_.num_topics - 1);
        const Topic& topic = topics_[pick_topic(rng_)];
        const std::size_t from_topic = std::min<std::size_t>(
            static_cast<std::size_t>(std::lround(p_.topic_frac * static_cast<double>(nnz))),
            topic.vocab.size());
        std::lognormal_distribution<double> topic_val(p_.value_mu + p_.topic_boost, p_.value_sigma);
        std::lognormal_distribution<double> background_val(p_.value_mu, p_.value_sigma);

        std::vector<std::pair<DimId, float>> entries;
        entries.reserve(nnz);
        while (entries.size() < from_topic) {
            const DimId d = topic.vocab[within_topic_(rng_)];
            if (!taken_[d]) {
                taken_[d] = 1;
                entries.emplace_back(d, positive(topic_val(rng_)));
            }
        }
        while (entries.size() < nnz) {
            const DimId d = rank_to_dim_[popularity_(rng_)];
            if (!taken_[d]) {
                taken_[d] = 1;
                entries.emplace_back(d, positive(background_val(rng_)));
            }
        }
        for (const auto& e : entries) {
            taken_[e.first] = 0;
        }
        return SparseVector::from_pairs(std::move(entries));
    }

    static float positive(double v) {
        return std::max(static_cast<float>(v), std::numeric_limits<float>::min());
    }

    const SynthParams& p_;
    std::mt19937_64 rng_;
    ZipfSampler popularity_;
    ZipfSampler within_topic_;
    std::vector<DimId> rank_to_dim_;
    std::vector<uint8_t> taken_;
    std::vector<Topic> topics_;
};

}  // namespace

uint32_t SynthParams::effective_nnz_max() const {
    if (nnz_max != 0) {
        return nnz_max;
    }
    return static_cast<uint32_t>(std::ceil(nnz_mean + 4.0 * nnz_std));
}

void SynthParams::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
    if (num_records == 0) fail("num_records must be >= 1");
    if (num_dims == 0) fail("num_dims must be >= 1");
    if (!(nnz_mean >= 1.0) || !(nnz_std >= 0.0)) fail("nnz mean must be >= 1 and std >= 0");
    if (num_dims < effective_nnz_max()) {
        fail("num_dims (" + std::to_string(num_dims) + ") is smaller than the max record nnz (" +
             std::to_string(effective_nnz_max()) + ")");
    }
    if (num_queries > 0 && (query_nnz_min < 1 || query_nnz_min > query_nnz_max)) {
        fail("query nnz range must satisfy 1 <= min <= max");
    }
    if (num_queries > 0 && num_dims < query_nnz_max) {
        fail("num_dims is smaller than the max query nnz");
    }
    if (num_topics == 0 || topic_vocab == 0 || topic_vocab > num_dims) {
        fail("need at least one topic with a vocabulary no larger than num_dims");
    }
    if (!(topic_frac >= 0.0 && topic_frac <= 1.0)) fail("topic_frac must be in [0,1]");
    if (!(zipf >= 0.0)) fail("zipf exponent must be >= 0");
    if (!(value_sigma >= 0.0)) fail("value_sigma must be >= 0");
}

SynthData generate_synthetic(const SynthParams& p) {
    p.validate();
    Generator gen(p);
    SynthData data;
    data.records.reserve(p.num_records);
    for (uint32_t i = 0; i < p.num_records; ++i) {
        data.records.push_back(gen.record());
    }
    data.queries.reserve(p.num_queries);
    for (uint32_t i = 0; i < p.num_queries; ++i) {
        data.queries.push_back(gen.query());
    }
    return data;
}

}  // namespace spanns
