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
#include <optional>
#include <utility>
#include <vector>

namespace voxal {

/// Dense 3D scalar volume, x-fastest layout. A 2D image is a volume of depth
/// one (dims[2] == 1).
struct Volume {
    std::array<int, 3> dims{0, 0, 0};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};
    std::vector<float> data;

    std::int64_t voxel_count() const {
        return static_cast<std::int64_t>(dims[0]) * dims[1] * dims[2];
    }
    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims[1]) * z);
    }
    float at(int x, int y, int z) const { return data[index(x, y, z)]; }
    float& at(int x, int y, int z) { return data[index(x, y, z)]; }

    /// Throws std::invalid_argument on any invariant breach (size mismatch,
    /// non-finite intensity, non-positive dims or spacing).
    void validate() const;
};

/// Binary ground truth on the same grid as its paired Volume (0 background,
/// 1 foreground).
struct LabelVolume {
    std::array<int, 3> dims{0, 0, 0};
    std::vector<std::uint8_t> labels;

    std::int64_t voxel_count() const {
        return static_cast<std::int64_t>(dims[0]) * dims[1] * dims[2];
    }
    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims[1]) * z);
    }
    std::uint8_t at(int x, int y, int z) const { return labels[index(x, y, z)]; }

    void validate(const std::array<int, 3>& volume_dims) const;
};

/// Parameters for the ellipsoidal-blob phantom generator.
struct SyntheticConfig {
    std::array<int, 3> dims{64, 64, 64};
    int blob_count = 6;
    double blob_radius_min = 6.0;
    double blob_radius_max = 10.0;
    double noise_sigma = 0.05;
    double fg_intensity = 0.75;
    double bg_intensity = 0.25;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct Dataset {
    Volume volume;
    std::optional<LabelVolume> labels;
};

/// Reads a `key: value` header plus raw little-endian data file(s). Supported
/// dtypes: u8 (normalized to [0,1] on load) and f32. Raw paths in the header
/// are resolved relative to the header's directory.
Dataset load_dataset(const std::filesystem::path& header_path);

/// Writes header + raw f32 data (and u8 labels when given) next to
/// `header_path`; the result round-trips bit-exactly through load_dataset.
void save_dataset(const Volume& volume, const LabelVolume* labels,
                  const std::filesystem::path& header_path);

/// Union of solid ellipsoidal blobs at seeded random centers/axes, constant
/// class intensities plus additive Gaussian noise. Deterministic per seed.
std::pair<Volume, LabelVolume> generate_synthetic(const SyntheticConfig& config);

}  // namespace voxal
