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

#include "voxal/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "voxal/kvfile.hpp"
#include "voxal/rng.hpp"

namespace voxal {

namespace {

constexpr double kLeafClip = 4.0;
constexpr double kGainEpsilon = 1e-12;

double logistic_loss(double margin) {
    // margin = -2 y F; log1p(exp(x)) ~= x for large x.
    return margin > 30.0 ? margin : std::log1p(std::exp(margin));
}

struct TreeBuilder {
    const FeatureMatrix& features;
    const std::vector<std::uint32_t>& rows;   // training row ids
    const std::vector<double>& residuals;     // per training position
    int features_per_split;
    int max_depth;
    Rng& rng;

    std::vector<TreeNode> nodes;
    std::vector<std::size_t> order;           // positions into rows/residuals
    std::vector<int> feature_pool;

    int build(std::size_t begin, std::size_t end, int depth) {
        const int node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();

        double sum = 0.0, abs_sum = 0.0;
        for (std::size_t p = begin; p < end; ++p) {
            const double r = residuals[order[p]];
            sum += r;
            abs_sum += std::abs(r) * (2.0 - std::abs(r));
        }

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_gain = 0.0;
        const std::size_t n = end - begin;

        if (depth < max_depth && n >= 2) {
            // Distinct random feature subset, examined in ascending order so
            // that equal gains resolve toward the lowest feature id.
            const int q = std::min<int>(features_per_split, static_cast<int>(features.cols));
            feature_pool.resize(features.cols);
            std::iota(feature_pool.begin(), feature_pool.end(), 0);
            for (int j = 0; j < q; ++j) {
                const std::size_t pick =
                    static_cast<std::size_t>(j) +
                    static_cast<std::size_t>(rng.below(feature_pool.size() - j));
                std::swap(feature_pool[static_cast<std::size_t>(j)], feature_pool[pick]);
            }
            std::sort(feature_pool.begin(), feature_pool.begin() + q);

            const double parent = sum * sum / static_cast<double>(n);
            for (int fi = 0; fi < q; ++fi) {
                const int f = feature_pool[static_cast<std::size_t>(fi)];
                std::sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
                          order.begin() + static_cast<std::ptrdiff_t>(end),
                          [&](std::size_t a, std::size_t b) {
                              return features.at(rows[a], static_cast<std::size_t>(f)) <
                                     features.at(rows[b], static_cast<std::size_t>(f));
                          });
                double left_sum = 0.0;
                for (std::size_t p = begin; p + 1 < end; ++p) {
                    left_sum += residuals[order[p]];
                    const double xa = features.at(rows[order[p]], static_cast<std::size_t>(f));
                    const double xb = features.at(rows[order[p + 1]], static_cast<std::size_t>(f));
                    if (xa == xb) continue;
                    const double nl = static_cast<double>(p - begin + 1);
                    const double nr = static_cast<double>(end - p - 1);
                    const double right_sum = sum - left_sum;
                    const double gain =
                        left_sum * left_sum / nl + right_sum * right_sum / nr - parent;
                    if (gain > best_gain + kGainEpsilon) {
                        best_gain = gain;
                        best_feature = f;
                        best_threshold = 0.5 * (xa + xb);
                    }
                }
            }
        }

        if (best_feature < 0 || best_gain <= kGainEpsilon) {
            const double denom = std::max(abs_sum, kGainEpsilon);
            nodes[static_cast<std::size_t>(node_id)].value =
                std::clamp(sum / denom, -kLeafClip, kLeafClip);
            return node_id;
        }

        const auto mid = std::partition(
            order.begin() + static_cast<std::ptrdiff_t>(begin),
            order.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t p) {
                return features.at(rows[p], static_cast<std::size_t>(best_feature)) <
                       best_threshold;
            });
        const std::size_t split = static_cast<std::size_t>(mid - order.begin());

        nodes[static_cast<std::size_t>(node_id)].feature = best_feature;
        nodes[static_cast<std::size_t>(node_id)].threshold = best_threshold;
        const int left = build(begin, split, depth + 1);
        const int right = build(split, end, depth + 1);
        nodes[static_cast<std::size_t>(node_id)].left = left;
        nodes[static_cast<std::size_t>(node_id)].right = right;
        return node_id;
    }
};

}  // namespace

void TrainConfig::validate() const {
    if (rounds < 1) throw std::invalid_argument("rounds must be positive");
    if (!(shrinkage > 0.0) || shrinkage > 1.0)
        throw std::invalid_argument("shrinkage must lie in (0,1]");
    if (!(subsample_fraction[0] > 0.0) || subsample_fraction[1] > 1.0 ||
        subsample_fraction[0] > subsample_fraction[1])
        throw std::invalid_argument("subsample_fraction interval must satisfy 0 < lo <= hi <= 1");
    if (features_per_split[0] < 1 || features_per_split[0] > features_per_split[1])
        throw std::invalid_argument("features_per_split interval must satisfy 1 <= lo <= hi");
    if (max_depth < 1 || max_depth > 8)
        throw std::invalid_argument("max_depth must lie in [1,8]");
}

double Tree::eval(const double* row) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<std::size_t>(i)];
        i = row[n.feature] < n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
}

double BoostedModel::raw_score(const double* row) const {
    double f = initial_score;
    for (const Tree& t : trees) f += shrinkage * t.eval(row);
    return f;
}

double BoostedModel::probability(const double* row, double threshold) const {
    return 1.0 / (1.0 + std::exp(-2.0 * (raw_score(row) - threshold)));
}

BoostedModel train_boosted(const FeatureMatrix& features,
                           const std::vector<std::uint32_t>& row_ids,
                           const std::vector<int>& labels, const TrainConfig& config,
                           std::vector<double>* round_losses) {
    config.validate();
    if (row_ids.empty()) throw std::invalid_argument("no training rows");
    if (row_ids.size() != labels.size())
        throw std::invalid_argument("row/label count mismatch");
    std::size_t positives = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != -1 && labels[i] != 1)
            throw std::invalid_argument("labels must be -1 or +1");
        if (row_ids[i] >= features.rows)
            throw std::invalid_argument("training row id out of range");
        if (labels[i] == 1) ++positives;
    }
    if (positives == 0 || positives == labels.size())
        throw std::invalid_argument("training requires both classes");

    const std::size_t n = row_ids.size();
    const double p_bar = static_cast<double>(positives) / static_cast<double>(n);

    BoostedModel model;
    model.shrinkage = config.shrinkage;
    model.feature_count = features.cols;
    model.initial_score = 0.5 * std::log(p_bar / (1.0 - p_bar));
    model.trees.reserve(static_cast<std::size_t>(config.rounds));

    Rng rng(config.rng_seed);
    std::vector<double> score(n, model.initial_score);
    std::vector<double> residuals(n, 0.0);
    std::vector<std::size_t> pool(n);
    if (round_losses) round_losses->clear();

    for (int m = 0; m < config.rounds; ++m) {
        for (std::size_t i = 0; i < n; ++i)
            residuals[i] = 2.0 * labels[i] / (1.0 + std::exp(2.0 * labels[i] * score[i]));

        const double frac =
            rng.uniform(config.subsample_fraction[0], config.subsample_fraction[1]);
        const std::size_t n_sub = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::lround(frac * static_cast<double>(n))));
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t j = 0; j < n_sub; ++j) {
            const std::size_t pick = j + static_cast<std::size_t>(rng.below(n - j));
            std::swap(pool[j], pool[pick]);
        }

        const int q_lo = config.features_per_split[0];
        const int q_hi = config.features_per_split[1];
        int q = q_lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(q_hi - q_lo + 1)));
        q = std::min<int>(q, static_cast<int>(features.cols));

        TreeBuilder builder{features, row_ids, residuals, q, config.max_depth, rng, {}, {}, {}};
        builder.order.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_sub));
        std::sort(builder.order.begin(), builder.order.end());
        builder.build(0, n_sub, 0);

        Tree tree;
        tree.nodes = std::move(builder.nodes);
        for (std::size_t i = 0; i < n; ++i)
            score[i] += config.shrinkage * tree.eval(features.row(row_ids[i]));
        model.trees.push_back(std::move(tree));

        if (round_losses) {
            double loss = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                loss += logistic_loss(-2.0 * labels[i] * score[i]);
            round_losses->push_back(loss / static_cast<double>(n));
        }
    }
    return model;
}

ScoreDistributionFit fit_adaptive_threshold(const std::vector<double>& scores,
                                            const std::vector<int>& labels) {
    if (scores.empty() || scores.size() != labels.size())
        throw std::invalid_argument("scores/labels mismatch");

    double sum_p = 0.0, sum_p2 = 0.0, sum_n = 0.0, sum_n2 = 0.0;
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == 1) {
            sum_p += scores[i];
            sum_p2 += scores[i] * scores[i];
            ++n_pos;
        } else if (labels[i] == -1) {
            sum_n += scores[i];
            sum_n2 += scores[i] * scores[i];
            ++n_neg;
        } else {
            throw std::invalid_argument("labels must be -1 or +1");
        }
    }
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("threshold fit requires both classes");

    ScoreDistributionFit fit;
    fit.mu_pos = sum_p / static_cast<double>(n_pos);
    fit.mu_neg = sum_n / static_cast<double>(n_neg);
    fit.sigma_pos = std::sqrt(std::max(
        0.0, sum_p2 / static_cast<double>(n_pos) - fit.mu_pos * fit.mu_pos));
    fit.sigma_neg = std::sqrt(std::max(
        0.0, sum_n2 / static_cast<double>(n_neg) - fit.mu_neg * fit.mu_neg));
    fit.sigma_pos = std::max(fit.sigma_pos, 1e-6);
    fit.sigma_neg = std::max(fit.sigma_neg, 1e-6);
    fit.prior_pos = static_cast<double>(n_pos) / static_cast<double>(scores.size());
    fit.prior_neg = static_cast<double>(n_neg) / static_cast<double>(scores.size());

    const double lo = std::min(fit.mu_neg, fit.mu_pos);
    const double hi = std::max(fit.mu_neg, fit.mu_pos);
    const double midpoint = 0.5 * (fit.mu_neg + fit.mu_pos);

    // Log-density difference is the quadratic a h^2 + b h + c.
    const double sp2 = fit.sigma_pos * fit.sigma_pos;
    const double sn2 = fit.sigma_neg * fit.sigma_neg;
    const double a = 1.0 / (2.0 * sp2) - 1.0 / (2.0 * sn2);
    const double b = fit.mu_neg / sn2 - fit.mu_pos / sp2;
    const double c = fit.mu_pos * fit.mu_pos / (2.0 * sp2) -
                     fit.mu_neg * fit.mu_neg / (2.0 * sn2) +
                     std::log((fit.prior_neg * fit.sigma_pos) /
                              (fit.prior_pos * fit.sigma_neg));

    std::vector<double> candidates;
    if (std::abs(a) < 1e-12) {
        if (std::abs(b) > 1e-12) candidates.push_back(-c / b);
    } else {
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            candidates.push_back((-b + sq) / (2.0 * a));
            candidates.push_back((-b - sq) / (2.0 * a));
        }
    }

    fit.h_star = midpoint;
    double best = std::numeric_limits<double>::infinity();
    for (double h : candidates) {
        if (h < lo || h > hi) continue;
        const double d = std::abs(h - midpoint);
        if (d < best) {
            best = d;
            fit.h_star = h;
        }
    }
    return fit;
}

void save_model(const BoostedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path.string());
    out << "voxal_model 1\n";
    out << "initial_score " << format_double(model.initial_score) << '\n';
    out << "shrinkage " << format_double(model.shrinkage) << '\n';
    out << "feature_count " << model.feature_count << '\n';
    out << "trees " << model.trees.size() << '\n';
    for (const Tree& t : model.trees) {
        out << "tree " << t.nodes.size() << '\n';
        for (const TreeNode& n : t.nodes)
            out << n.feature << ' ' << format_double(n.threshold) << ' '
                << format_double(n.value) << ' ' << n.left << ' ' << n.right << '\n';
    }
    if (!out) throw std::runtime_error("model write failed");
}

BoostedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path.string());

    auto expect = [&](const std::string& key) {
        std::string word;
        if (!(in >> word) || word != key)
            throw std::runtime_error("malformed model file: expected " + key);
    };

    expect("voxal_model");
    int version = 0;
    in >> version;
    if (version != 1) throw std::runtime_error("unsupported model version");

    BoostedModel model;
    std::string text;
    expect("initial_score");
    in >> text;
    model.initial_score = parse_double(text);
    expect("shrinkage");
    in >> text;
    model.shrinkage = parse_double(text);
    expect("feature_count");
    in >> model.feature_count;
    expect("trees");
    std::size_t n_trees = 0;
    in >> n_trees;
    model.trees.resize(n_trees);
    for (Tree& t : model.trees) {
        expect("tree");
        std::size_t n_nodes = 0;
        in >> n_nodes;
        t.nodes.resize(n_nodes);
        for (TreeNode& n : t.nodes) {
            in >> n.feature;
            in >> text;
            n.threshold = parse_double(text);
            in >> text;
            n.value = parse_double(text);
            in >> n.left >> n.right;
        }
    }
    if (!in) throw std::runtime_error("malformed model file: " + path.string());
    return model;
}

}  // namespace voxal
