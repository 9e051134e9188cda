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

#include "spanns/eval.h"
#include "spanns/index.h"
#include "spanns/sim.h"
#include "spanns/sparse_vector.h"

// Binary formats, all little-endian:
//   svecs  "SVEC" u32 version, u64 count, u32 max_dim, then per vector
//          u32 nnz, nnz x u32 dims, nnz x f32 vals
//   index  "SPIX" u32 version, build params, svecs body, postings
//   gt     "SPGT" u32 k, then per query k x (u32 id, f32 score)
//   trace  "SPTR" u32 version, u32 k, u32 clusters, then per cluster
//          u64 id, f32 silhouette score, u32 records, per record
//          u64 id, u32 cost, f32 score
//
// Readers throw Error with kIo, kBadMagic, kVersionMismatch, kTruncated,
// kNonAscending, kInvalidValue or kDanglingId.

namespace spanns {

inline constexpr uint32_t kFormatVersion = 1;

/// Ground-truth id used to pad rows shorter than k.
inline constexpr uint32_t kPadId = UINT32_MAX;

/// Reads an svecs stream one vector at a time.
class SvecsReader {
 public:
    explicit SvecsReader(std::istream& in);

    uint64_t count() const noexcept { return count_; }
    uint32_t max_dim() const noexcept { return max_dim_; }

    /// False once all count() vectors were read.
    bool next(SparseVector& out);

 private:
    std::istream& in_;
    uint64_t count_ = 0;
    uint32_t max_dim_ = 0;
    uint64_t read_ = 0;
};

void write_svecs(std::ostream& out, std::span<const SparseVector> vectors);
void write_svecs(const std::string& path, std::span<const SparseVector> vectors);
std::vector<SparseVector> read_svecs(std::istream& in);
std::vector<SparseVector> read_svecs(const std::string& path);

void save_index(std::ostream& out, const HybridIndex& index);
void save_index(const std::string& path, const HybridIndex& index);
HybridIndex load_index(std::istream& in);
HybridIndex load_index(const std::string& path);

/// Throws Error(kInvalidValue) for k == 0 or a row longer than k.
void write_ground_truth(std::ostream& out, std::span<const GroundTruthRow> rows, uint32_t k);
void write_ground_truth(const std::string& path, std::span<const GroundTruthRow> rows, uint32_t k);

struct GroundTruthFile {
    uint32_t k = 0;
    std::vector<GroundTruthRow> rows;  // padding stripped
};

GroundTruthFile read_ground_truth(std::istream& in);
GroundTruthFile read_ground_truth(const std::string& path);

void write_trace(std::ostream& out, const SimTrace& trace);
void write_trace(const std::string& path, const SimTrace& trace);
/// strict_thresholds stays empty.
SimTrace read_trace(std::istream& in);
SimTrace read_trace(const std::string& path);

}  // namespace spanns
