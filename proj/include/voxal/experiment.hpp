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

#include <filesystem>
#include <string>
#include <vector>

#include "voxal/engine.hpp"
#include "voxal/volume.hpp"

namespace voxal {

/// Declarative description of a full experiment: where the train and test
/// volumes come from, how they are preprocessed, and which strategies run
/// under which protocol parameters.
struct ExperimentSpec {
    /// When true, the train/test volumes are seeded phantoms generated in
    /// memory; otherwise they are loaded from the two dataset headers below.
    bool synthetic = true;
    std::filesystem::path base_dir;  ///< spec file directory; anchors relative paths
    std::string train_dataset;
    std::string test_dataset;
    SyntheticConfig train_synth;
    SyntheticConfig test_synth;

    int target_supervoxels = 400;
    double compactness = 0.2;

    std::vector<Strategy> strategies;
    RunConfig run;  ///< `strategy` is overridden per entry of `strategies`
    std::filesystem::path out_dir = "out";

    /// Throws std::invalid_argument on any out-of-range parameter.
    void validate() const;
};

/// Splits a comma- or whitespace-separated strategy list such as
/// "Rs,FUs pCUs". Throws std::invalid_argument on unknown names,
/// duplicates, or an empty list.
std::vector<Strategy> parse_strategy_list(const std::string& text);

/// Loads and validates a `key: value` experiment file. Unknown keys are
/// rejected so typos fail loudly rather than silently using a default.
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

/// Runs every strategy in the spec against the same pair of prepared
/// datasets and writes curve CSVs, summary.csv and learning_curves.svg into
/// spec.out_dir. Returns the per-strategy summaries in run order.
std::vector<StrategySummary> run_experiment(const ExperimentSpec& spec);

/// Runs the pCUs strategy once per patch radius (everything else taken from
/// the spec) and writes a report whose curves are named pCUs_r<radius>.
/// Returns the per-radius summaries.
std::vector<StrategySummary> run_radius_sweep(const ExperimentSpec& spec,
                                              const std::vector<double>& radii);

}  // namespace voxal
