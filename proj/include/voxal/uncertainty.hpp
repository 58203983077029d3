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

#include <vector>

#include "voxal/classifier.hpp"
#include "voxal/supervoxel.hpp"

namespace voxal {

/// Shannon entropy of a Bernoulli(p) in nats; H(0) = H(1) = 0, maximal ln 2
/// at p = 1/2. Throws std::invalid_argument outside [0,1].
double binary_entropy(double p);

/// Per-node posterior p(y=1|x) from the boosted model at decision
/// threshold h.
std::vector<double> classifier_probabilities(const BoostedModel& model, double threshold,
                                             const FeatureMatrix& features);

/// Entropy of each classifier posterior (feature uncertainty).
std::vector<double> feature_uncertainty(const std::vector<double>& p_theta);

/// Applies the row-stochastic transition operator tau_max times to the
/// posterior field: the first application mixes each node with its
/// neighbors, the remaining tau_max - 1 iterate the random walk. Row sums
/// must equal one within 1e-9.
std::vector<double> propagate_geometric(const SupervoxelGraph& graph,
                                        const std::vector<double>& p_theta, int tau_max);

/// Entropy of each propagated posterior (geometric uncertainty).
std::vector<double> geometric_uncertainty(const std::vector<double>& p_geom);

/// Sum of feature and geometric entropies; both inputs must be nonnegative.
std::vector<double> combined_uncertainty(const std::vector<double>& h_feature,
                                         const std::vector<double>& h_geometric);

/// All per-node uncertainty fields for one classifier state.
struct UncertaintyMap {
    std::vector<double> p_theta;
    std::vector<double> p_geom;
    std::vector<double> h_feature;
    std::vector<double> h_geometric;
    std::vector<double> h_combined;
    int tau_max = 0;
};

UncertaintyMap compute_uncertainty(const SupervoxelGraph& graph,
                                   const std::vector<double>& p_theta, int tau_max);
UncertaintyMap compute_uncertainty(const SupervoxelGraph& graph, const BoostedModel& model,
                                   double threshold, const FeatureMatrix& features,
                                   int tau_max);

}  // namespace voxal
