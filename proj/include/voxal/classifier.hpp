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

#include "voxal/features.hpp"

namespace voxal {

/// Gradient-boosting hyperparameters. Subsample fraction and feature-subset
/// size are redrawn per tree from the given closed intervals, which keeps
/// individual trees shallow and decorrelated.
struct TrainConfig {
    int rounds = 50;
    double shrinkage = 0.1;
    std::array<double, 2> subsample_fraction{0.4, 0.6};
    std::array<int, 2> features_per_split{10, 40};
    int max_depth = 2;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

/// One node of a flattened binary regression tree. Interior nodes route on
/// `feature < threshold`; leaves carry the fitted value and feature == -1.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    double value = 0.0;
    int left = -1;
    int right = -1;
};

struct Tree {
    std::vector<TreeNode> nodes;

    double eval(const double* row) const;
};

/// Additive logistic model over {-1,+1}: F(x) = F0 + shrinkage * sum trees,
/// p(y=1|x) = 1 / (1 + exp(-2 (F(x) - h))) for a decision threshold h.
struct BoostedModel {
    double initial_score = 0.0;
    double shrinkage = 0.1;
    std::size_t feature_count = 0;
    std::vector<Tree> trees;

    double raw_score(const double* row) const;
    double probability(const double* row, double threshold) const;
};

/// Trains on the selected rows of `features`; labels are -1/+1 and both
/// classes must be present. When `round_losses` is given it receives the mean
/// logistic loss over the training rows after every boosting round.
BoostedModel train_boosted(const FeatureMatrix& features,
                           const std::vector<std::uint32_t>& row_ids,
                           const std::vector<int>& labels, const TrainConfig& config,
                           std::vector<double>* round_losses = nullptr);

/// Per-class Gaussian fit of classifier scores plus the prior-weighted
/// density crossing used as the adaptive decision threshold.
struct ScoreDistributionFit {
    double mu_pos = 0.0;
    double sigma_pos = 0.0;
    double mu_neg = 0.0;
    double sigma_neg = 0.0;
    double prior_pos = 0.0;
    double prior_neg = 0.0;
    double h_star = 0.0;
};

/// Fits N(mu,sigma) per class and solves w- N(h; mu-, sigma-) =
/// w+ N(h; mu+, sigma+) for h between the class means; falls back to the
/// midpoint when no crossing lies between them.
ScoreDistributionFit fit_adaptive_threshold(const std::vector<double>& scores,
                                            const std::vector<int>& labels);

/// Plain-text model serialization; load(save(m)) reproduces bit-identical
/// predictions.
void save_model(const BoostedModel& model, const std::filesystem::path& path);
BoostedModel load_model(const std::filesystem::path& path);

}  // namespace voxal
