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

#include "voxal/annotator.hpp"

#include <stdexcept>

namespace voxal {

LabelStore::LabelStore(std::uint32_t count)
    : mask_(count, 0), labels_(count, 0) {
    if (count == 0) throw std::invalid_argument("label store needs at least one supervoxel");
}

bool LabelStore::is_labeled(std::uint32_t id) const {
    if (id >= mask_.size()) throw std::invalid_argument("supervoxel id out of range");
    return mask_[id] != 0;
}

int LabelStore::label(std::uint32_t id) const {
    if (!is_labeled(id)) throw std::invalid_argument("supervoxel is not labeled");
    return labels_[id];
}

void LabelStore::set_label(std::uint32_t id, int label) {
    if (label != -1 && label != 1) throw std::invalid_argument("label must be -1 or +1");
    mask_[id] = 1;
    labels_[id] = label;
    ++labeled_count_;
}

void LabelStore::seed(std::uint32_t id, int label) {
    if (is_labeled(id)) throw std::invalid_argument("seed target is already labeled");
    set_label(id, label);
}

int majority_label(const LabelVolume& ground_truth, const SupervoxelPartition& partition,
                   std::uint32_t id) {
    if (id >= partition.count) throw std::invalid_argument("supervoxel id out of range");
    if (ground_truth.labels.size() != partition.assignment.size())
        throw std::invalid_argument("ground truth does not match partition");
    std::uint64_t fg = 0, total = 0;
    for (std::size_t v = 0; v < partition.assignment.size(); ++v)
        if (partition.assignment[v] == id) {
            ++total;
            fg += ground_truth.labels[v];
        }
    return 2 * fg >= total ? 1 : -1;
}

std::vector<int> majority_labels(const LabelVolume& ground_truth,
                                 const SupervoxelPartition& partition) {
    if (ground_truth.labels.size() != partition.assignment.size())
        throw std::invalid_argument("ground truth does not match partition");
    std::vector<std::uint64_t> fg(partition.count, 0);
    for (std::size_t v = 0; v < partition.assignment.size(); ++v)
        fg[partition.assignment[v]] += ground_truth.labels[v];
    std::vector<int> labels(partition.count);
    for (std::uint32_t i = 0; i < partition.count; ++i)
        labels[i] = 2 * fg[i] >= partition.sizes[i] ? 1 : -1;
    return labels;
}

void label_supervoxel(LabelStore& store, std::uint32_t id,
                      const std::vector<int>& supervoxel_labels) {
    if (id >= supervoxel_labels.size())
        throw std::invalid_argument("supervoxel id out of range");
    if (store.is_labeled(id))
        throw std::invalid_argument("single query targets an already labeled supervoxel");
    store.set_label(id, supervoxel_labels[id]);
    store.effort_ += 1;
    store.single_queries_ += 1;
}

int label_patch(LabelStore& store, const std::vector<std::uint32_t>& members,
                const std::vector<int>& supervoxel_labels) {
    if (members.empty()) throw std::invalid_argument("patch has no members");
    int fresh = 0;
    for (std::uint32_t id : members) {
        if (id >= supervoxel_labels.size())
            throw std::invalid_argument("supervoxel id out of range");
        if (store.is_labeled(id)) continue;  // already answered, no extra cost
        store.set_label(id, supervoxel_labels[id]);
        ++fresh;
    }
    store.effort_ += 2;
    store.patch_queries_ += 1;
    return fresh;
}

}  // namespace voxal
