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

#include "voxal/uncertainty.hpp"

#include <cmath>
#include <stdexcept>

namespace voxal {

double binary_entropy(double p) {
    // Absorb harmless floating-point drift before enforcing the domain.
    if (p < 0.0 && p >= -1e-9) p = 0.0;
    if (p > 1.0 && p <= 1.0 + 1e-9) p = 1.0;
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("probability outside [0,1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

std::vector<double> classifier_probabilities(const BoostedModel& model, double threshold,
                                             const FeatureMatrix& features) {
    std::vector<double> p(features.rows);
    for (std::size_t i = 0; i < features.rows; ++i)
        p[i] = model.probability(features.row(i), threshold);
    return p;
}

std::vector<double> feature_uncertainty(const std::vector<double>& p_theta) {
    std::vector<double> h(p_theta.size());
    for (std::size_t i = 0; i < p_theta.size(); ++i) h[i] = binary_entropy(p_theta[i]);
    return h;
}

std::vector<double> propagate_geometric(const SupervoxelGraph& graph,
                                        const std::vector<double>& p_theta, int tau_max) {
    const std::size_t n = graph.neighbors.size();
    if (p_theta.size() != n)
        throw std::invalid_argument("posterior length does not match graph");
    if (tau_max < 1) throw std::invalid_argument("tau_max must be positive");
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (double w : graph.transition[i]) sum += w;
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("transition row is not normalized");
    }

    std::vector<double> cur = p_theta;
    std::vector<double> next(n);
    for (int step = 0; step < tau_max; ++step) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            const auto& nb = graph.neighbors[i];
            const auto& tr = graph.transition[i];
            for (std::size_t k = 0; k < nb.size(); ++k) acc += tr[k] * cur[nb[k]];
            next[i] = acc;
        }
        std::swap(cur, next);
    }
    return cur;
}

std::vector<double> geometric_uncertainty(const std::vector<double>& p_geom) {
    return feature_uncertainty(p_geom);
}

std::vector<double> combined_uncertainty(const std::vector<double>& h_feature,
                                         const std::vector<double>& h_geometric) {
    if (h_feature.size() != h_geometric.size())
        throw std::invalid_argument("uncertainty length mismatch");
    std::vector<double> h(h_feature.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h_feature[i] < 0.0 || h_geometric[i] < 0.0)
            throw std::invalid_argument("entropies must be nonnegative");
        h[i] = h_feature[i] + h_geometric[i];
    }
    return h;
}

UncertaintyMap compute_uncertainty(const SupervoxelGraph& graph,
                                   const std::vector<double>& p_theta, int tau_max) {
    UncertaintyMap map;
    map.tau_max = tau_max;
    map.p_theta = p_theta;
    map.p_geom = propagate_geometric(graph, p_theta, tau_max);
    map.h_feature = feature_uncertainty(map.p_theta);
    map.h_geometric = geometric_uncertainty(map.p_geom);
    map.h_combined = combined_uncertainty(map.h_feature, map.h_geometric);
    return map;
}

UncertaintyMap compute_uncertainty(const SupervoxelGraph& graph, const BoostedModel& model,
                                   double threshold, const FeatureMatrix& features,
                                   int tau_max) {
    return compute_uncertainty(graph, classifier_probabilities(model, threshold, features),
                               tau_max);
}

}  // namespace voxal
