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
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "voxal/annotator.hpp"
#include "voxal/classifier.hpp"
#include "voxal/features.hpp"
#include "voxal/supervoxel.hpp"
#include "voxal/volume.hpp"

namespace voxal {

/// Query strategies compared by the experiment engine:
///  - Rs:   random single supervoxel
///  - FUs:  most feature-uncertain single supervoxel
///  - CUs:  most combined-uncertain single supervoxel
///  - pFUs: plane patch seeded by feature uncertainty
///  - pCUs: plane patch seeded by combined uncertainty
enum class Strategy {
    random_single,
    feature_single,
    combined_single,
    feature_plane,
    combined_plane,
};

Strategy strategy_from_string(const std::string& name);
std::string strategy_name(Strategy strategy);
bool strategy_uses_planes(Strategy strategy);
bool strategy_uses_geometry(Strategy strategy);

/// Full protocol configuration for one strategy run.
struct RunConfig {
    Strategy strategy = Strategy::random_single;
    int effort_budget = 100;
    int seed_pos = 5;
    int seed_neg = 5;
    int repetitions = 10;
    int k = 0;                    // 0 = default_neighbor_count of the partition
    int tau_max = 20;
    double r = 12.0;              // patch radius in voxels
    int t = 5;                    // candidate origins per plane selection
    double angle_tolerance = 0.0; // 0 = geometry-derived default
    TrainConfig train;
    std::uint64_t rng_seed = 0;
    int threads = 1;

    void validate() const;
};

struct CurvePoint {
    int effort = 0;
    double voc = 0.0;
    double dice = 0.0;
};

struct RepetitionResult {
    std::vector<CurvePoint> points;
    int single_queries = 0;
    int patch_queries = 0;
    int final_effort = 0;
};

struct LearningCurve {
    std::vector<RepetitionResult> repetitions;
};

/// Everything derived once per dataset and shared across repetitions.
struct PreparedDataset {
    Volume volume;
    LabelVolume labels;
    SupervoxelPartition partition;
    SupervoxelGraph graph;
    FeatureMatrix features;
    std::vector<int> supervoxel_labels;
};

PreparedDataset prepare_dataset(Volume volume, LabelVolume labels, int target_supervoxels,
                                double compactness, int k);

/// Intersection over union of two voxel masks; empty vs empty scores 1.
double voc_score(const std::vector<std::uint8_t>& predicted,
                 const std::vector<std::uint8_t>& truth);

/// Dice overlap of two voxel masks; empty vs empty scores 1.
double dice_score(const std::vector<std::uint8_t>& predicted,
                  const std::vector<std::uint8_t>& truth);

/// Voxel mask from thresholding the model's supervoxel scores at h.
std::vector<std::uint8_t> predict_voxel_mask(const PreparedDataset& dataset,
                                             const BoostedModel& model, double threshold);

/// Runs the labeling protocol: free seed labels, then queries until the
/// effort budget is spent, retraining and scoring the test dataset after
/// every annotation round. Repetitions differ only in derived seeds and can
/// run on multiple threads with identical results.
LearningCurve run_strategy(const PreparedDataset& train_data, const PreparedDataset& test_data,
                           const RunConfig& config);

/// 10th-to-90th percentile spread (linear interpolation between order
/// statistics).
double variability_interval(std::vector<double> values);

/// Final-point summary of one strategy's curve.
struct StrategySummary {
    std::string name;
    double mean_voc = 0.0;
    double mean_dice = 0.0;
    double variability_voc = 0.0;
};

StrategySummary summarize(const std::string& name, const LearningCurve& curve);

/// Writes curve_<name>.csv per strategy, summary.csv, and a self-contained
/// learning_curves.svg into out_dir. Output is byte-stable for identical
/// inputs.
void write_report(const std::vector<std::pair<std::string, LearningCurve>>& curves,
                  const std::filesystem::path& out_dir);

/// Parses a curve_<name>.csv written by write_report back into a
/// LearningCurve. Only the recorded points survive the round trip; the
/// query counters are not stored in the CSV and stay zero.
LearningCurve read_curve_csv(const std::filesystem::path& path);

}  // namespace voxal
