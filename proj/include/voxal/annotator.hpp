// Copyright 2026 the voxal authors
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
#include <vector>

#include "voxal/supervoxel.hpp"
#include "voxal/volume.hpp"

namespace voxal {

/// Labels acquired so far plus the effort ledger. A single-supervoxel query
/// costs 1 effort unit, a plane patch costs 2 regardless of its size; seed
/// labels are free.
class LabelStore {
public:
    explicit LabelStore(std::uint32_t count);

    std::uint32_t size() const { return static_cast<std::uint32_t>(mask_.size()); }
    bool is_labeled(std::uint32_t id) const;
    /// Throws std::invalid_argument when the supervoxel is unlabeled.
    int label(std::uint32_t id) const;
    const std::vector<std::uint8_t>& labeled_mask() const { return mask_; }
    std::uint32_t labeled_count() const { return labeled_count_; }

    int effort_spent() const { return effort_; }
    int single_queries() const { return single_queries_; }
    int patch_queries() const { return patch_queries_; }

    /// Free initial label (no effort); throws when already labeled.
    void seed(std::uint32_t id, int label);

private:
    friend void label_supervoxel(LabelStore&, std::uint32_t, const std::vector<int>&);
    friend int label_patch(LabelStore&, const std::vector<std::uint32_t>&,
                           const std::vector<int>&);

    void set_label(std::uint32_t id, int label);

    std::vector<std::uint8_t> mask_;
    std::vector<int> labels_;
    std::uint32_t labeled_count_ = 0;
    int effort_ = 0;
    int single_queries_ = 0;
    int patch_queries_ = 0;
};

/// Majority vote of the ground truth voxels inside one supervoxel; an exact
/// tie counts as foreground. Returns -1 or +1.
int majority_label(const LabelVolume& ground_truth, const SupervoxelPartition& partition,
                   std::uint32_t id);

/// Majority labels for every supervoxel in one pass.
std::vector<int> majority_labels(const LabelVolume& ground_truth,
                                 const SupervoxelPartition& partition);

/// Simulated annotator answering a single-supervoxel query: records the
/// majority label and charges 1 effort; throws when the target is already
/// labeled.
void label_supervoxel(LabelStore& store, std::uint32_t id,
                      const std::vector<int>& supervoxel_labels);

/// Simulated annotator answering a plane-patch query: labels every member
/// not labeled yet and charges a flat 2 effort. Returns how many new labels
/// were recorded.
int label_patch(LabelStore& store, const std::vector<std::uint32_t>& members,
                const std::vector<int>& supervoxel_labels);

}  // namespace voxal
