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

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "voxal/supervoxel.hpp"
#include "voxal/volume.hpp"

namespace voxal {

/// Controls the per-supervoxel descriptor layout. Defaults give the layout
/// used throughout: mean, std, a 10-bin intensity histogram, Gaussian means
/// at sigma 1/2/4, gradient-magnitude mean, LoG means at sigma 1/2, and the
/// equivalent-sphere radius (19 columns total).
struct FeatureConfig {
    int histogram_bins = 10;
    std::vector<double> gaussian_sigmas{1.0, 2.0, 4.0};
    std::vector<double> log_sigmas{1.0, 2.0};

    void validate() const;
    std::size_t dimension() const;
};

/// Dense row-major matrix, one row per supervoxel.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    std::vector<std::string> names;

    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    const double* row(std::size_t r) const { return values.data() + r * cols; }
    double* row(std::size_t r) { return values.data() + r * cols; }
};

/// Separable Gaussian smoothing, kernel radius ceil(3*sigma), reflected
/// borders. The z axis is skipped for single-slice volumes.
Volume gaussian_smooth(const Volume& volume, double sigma);

/// Central-difference gradient magnitude with reflected borders.
Volume gradient_magnitude(const Volume& volume);

/// Discrete Laplacian of the Gaussian-smoothed volume.
Volume laplacian_of_gaussian(const Volume& volume, double sigma);

/// Computes the full descriptor matrix for every supervoxel.
FeatureMatrix compute_features(const Volume& volume, const SupervoxelPartition& partition,
                               const FeatureConfig& config = {});

/// Writes `id,<name>,...` rows; numbers use shortest round-trip formatting.
void save_features_csv(const FeatureMatrix& features, const std::filesystem::path& path);

}  // namespace voxal
