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

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "voxal/vec3.hpp"
#include "voxal/volume.hpp"

namespace voxal {

/// Voxel-to-supervoxel assignment with per-supervoxel centers (mean voxel
/// coordinate), equivalent-sphere radii and voxel counts. Ids form the
/// contiguous range [0, count) and every supervoxel is 6-connected.
struct SupervoxelPartition {
    std::array<int, 3> dims{0, 0, 0};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};
    std::vector<std::uint32_t> assignment;
    std::vector<Vec3> centers;
    std::vector<double> radii;
    std::vector<std::uint32_t> sizes;
    std::uint32_t count = 0;

    bool is_2d() const { return dims[2] == 1; }
    std::size_t voxel_index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims[1]) * z);
    }
};

/// k-nearest-neighbor graph over supervoxel centers. Row i lists A_k(i)
/// ordered by (distance, id); transition[i] holds the matching inverse-
/// distance weights normalized to sum 1.
struct SupervoxelGraph {
    std::vector<std::vector<std::uint32_t>> neighbors;
    std::vector<std::vector<double>> transition;
    int k = 0;
};

/// 3D SLIC with grid-seeded cluster centers (deterministic, 10 iterations)
/// in (intensity, x, y, z) space, followed by connectivity enforcement that
/// merges orphan fragments into the largest adjacent supervoxel. Works on 2D
/// inputs (depth one) as plain SLIC superpixels.
SupervoxelPartition slic_oversegment(const Volume& volume, int target_supervoxels,
                                     double compactness);

/// Per node: the k nearest centers by (spacing-scaled) Euclidean distance,
/// weighted 1/distance and normalized per row. Ties broken by lower id.
SupervoxelGraph build_graph(const SupervoxelPartition& partition, int k);

/// Mean number of face-adjacent supervoxels, rounded and clamped to [7, 15]
/// (and to count-1). Used as the default graph degree.
int default_neighbor_count(const SupervoxelPartition& partition);

/// Same text-header + raw container as datasets; ids stored as little-endian
/// u32. Centers/radii/sizes are recomputed from the assignment on load.
void save_partition(const SupervoxelPartition& partition, const std::filesystem::path& header_path);
SupervoxelPartition load_partition(const std::filesystem::path& header_path);

}  // namespace voxal
