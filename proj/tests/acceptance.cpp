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
//
// Acceptance suite: one line per criterion, exit code = number of failures.
// Each criterion states its tolerance inline; none of them may be loosened
// without revisiting the corresponding oracle.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "voxal/classifier.hpp"
#include "voxal/engine.hpp"
#include "voxal/experiment.hpp"
#include "voxal/plane_search.hpp"
#include "voxal/rng.hpp"
#include "voxal/supervoxel.hpp"
#include "voxal/uncertainty.hpp"
#include "voxal/volume.hpp"

using namespace voxal;

namespace {

struct CriterionResult {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.6g", v);
    return buffer;
}

// ---------------------------------------------------------------------------
// Criterion 1: entropy closed forms (tolerance 1e-9).
// ---------------------------------------------------------------------------
CriterionResult criterion1() {
    const struct {
        double p, expected;
    } cases[] = {
        {0.5, std::log(2.0)},
        {0.0, 0.0},
        {1.0, 0.0},
        {0.9, -0.9 * std::log(0.9) - 0.1 * std::log(0.1)},
        {0.1, -0.9 * std::log(0.9) - 0.1 * std::log(0.1)},
    };
    for (const auto& c : cases) {
        const double got = binary_entropy(c.p);
        if (std::abs(got - c.expected) > 1e-9)
            return {false, "H(" + fmt(c.p) + ") = " + fmt(got) + ", expected " +
                               fmt(c.expected)};
    }
    // The same closed forms must hold through the vector entry points used
    // for feature and geometric uncertainty.
    const std::vector<double> p = {0.5, 0.0, 1.0, 0.9};
    const std::vector<double> hf = feature_uncertainty(p);
    const std::vector<double> hg = geometric_uncertainty(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double expected = p[i] <= 0.0 || p[i] >= 1.0
                                    ? 0.0
                                    : -p[i] * std::log(p[i]) -
                                          (1.0 - p[i]) * std::log(1.0 - p[i]);
        if (std::abs(hf[i] - expected) > 1e-9 || std::abs(hg[i] - expected) > 1e-9)
            return {false, "vector entropy mismatch at p = " + fmt(p[i])};
    }
    return {true, ""};
}

// ---------------------------------------------------------------------------
// Criterion 2: random-walk propagation vs dense stochastic-matrix powering
// on 200 seeded graphs (<= 40 nodes, k <= 6), tolerance 1e-9 per entry, plus
// the range-preservation invariant.
// ---------------------------------------------------------------------------
SupervoxelGraph random_graph(Rng& rng, std::size_t n, int k) {
    std::vector<Vec3> points(n);
    for (Vec3& p : points)
        p = {rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)};

    SupervoxelGraph graph;
    graph.k = k;
    graph.neighbors.resize(n);
    graph.transition.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::uint32_t> order;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) order.push_back(static_cast<std::uint32_t>(j));
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            const double da = norm(points[a] - points[i]);
            const double db = norm(points[b] - points[i]);
            return da != db ? da < db : a < b;
        });
        order.resize(static_cast<std::size_t>(k));
        double total = 0.0;
        std::vector<double> weights;
        for (std::uint32_t j : order) {
            const double w = 1.0 / std::max(norm(points[j] - points[i]), 1e-6);
            weights.push_back(w);
            total += w;
        }
        for (double& w : weights) w /= total;
        graph.neighbors[i] = order;
        graph.transition[i] = weights;
    }
    return graph;
}

CriterionResult criterion2() {
    for (int instance = 0; instance < 200; ++instance) {
        Rng rng(derive_seed(1002, static_cast<std::uint64_t>(instance)));
        const std::size_t n = 5 + rng.below(36);  // [5, 40]
        const int k =
            static_cast<int>(1 + rng.below(std::min<std::uint64_t>(6, n - 1)));
        const SupervoxelGraph graph = random_graph(rng, n, k);

        std::vector<double> p0(n);
        for (double& v : p0) v = rng.real01();
        const int tau = 20;

        // Oracle: dense matrix power T^tau applied to p0 in one shot.
        std::vector<double> dense(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < graph.neighbors[i].size(); ++j)
                dense[i * n + graph.neighbors[i][j]] = graph.transition[i][j];
        std::vector<double> power = dense;
        for (int step = 1; step < tau; ++step) {
            std::vector<double> next(n * n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t m = 0; m < n; ++m) {
                    const double a = power[i * n + m];
                    if (a == 0.0) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        next[i * n + j] += a * dense[m * n + j];
                }
            power = std::move(next);
        }
        std::vector<double> expected(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) expected[i] += power[i * n + j] * p0[j];

        const std::vector<double> got = propagate_geometric(graph, p0, tau);
        const double lo = *std::min_element(p0.begin(), p0.end());
        const double hi = *std::max_element(p0.begin(), p0.end());
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(got[i] - expected[i]) > 1e-9)
                return {false, "instance " + std::to_string(instance) + " node " +
                                   std::to_string(i) + ": |" + fmt(got[i]) + " - " +
                                   fmt(expected[i]) + "| > 1e-9"};
            if (got[i] < lo - 1e-9 || got[i] > hi + 1e-9)
                return {false, "instance " + std::to_string(instance) +
                                   ": range preservation violated"};
        }
    }
    return {true, "200 graphs"};
}

// ---------------------------------------------------------------------------
// Criterion 3: branch-and-bound plane search vs exhaustive search at matched
// resolution on 100 seeded instances. The pi/64 tolerance is matched by the
// 128-step lattice over the open square, which contains every point the
// branch-and-bound can evaluate (box centers plus terminal-box sublattice
// sweeps). Score tolerance 1e-9; strictly fewer evaluations whenever
// n >= 20; median evaluation ratio <= 0.2.
// ---------------------------------------------------------------------------
CriterionResult criterion3() {
    std::vector<double> ratios;
    for (int instance = 0; instance < 100; ++instance) {
        Rng rng(derive_seed(1003, static_cast<std::uint64_t>(instance)));
        const std::size_t n = 10 + rng.below(51);  // [10, 60]

        SupervoxelPartition part;
        part.dims = {32, 32, 32};
        part.count = static_cast<std::uint32_t>(n);
        for (std::size_t i = 0; i < n; ++i) {
            part.centers.push_back({rng.uniform(0.0, 25.0), rng.uniform(0.0, 25.0),
                                    rng.uniform(0.0, 25.0)});
            part.radii.push_back(rng.uniform(0.6, 2.5));
            part.sizes.push_back(1);
        }
        std::vector<double> uncertainty(n);
        for (double& u : uncertainty) u = rng.real01();
        const double r = rng.uniform(8.0, 15.0);
        const std::uint32_t origin = static_cast<std::uint32_t>(rng.below(n));

        PlaneSearchStats grid_stats, bnb_stats;
        const PlaneQuery grid =
            best_plane_exhaustive(part, origin, uncertainty, r, 128, &grid_stats);
        const PlaneQuery bnb =
            best_plane_bnb(part, origin, uncertainty, r, M_PI / 64, &bnb_stats);

        if (std::abs(grid.score - bnb.score) > 1e-9)
            return {false, "instance " + std::to_string(instance) + " (n=" +
                               std::to_string(n) + "): grid " + fmt(grid.score) +
                               " vs bnb " + fmt(bnb.score)};
        if (n >= 20 && bnb_stats.evaluations >= grid_stats.evaluations)
            return {false, "instance " + std::to_string(instance) + " (n=" +
                               std::to_string(n) + "): bnb evaluations " +
                               std::to_string(bnb_stats.evaluations) +
                               " not below grid " +
                               std::to_string(grid_stats.evaluations)};
        ratios.push_back(static_cast<double>(bnb_stats.evaluations) /
                         static_cast<double>(grid_stats.evaluations));
    }
    std::sort(ratios.begin(), ratios.end());
    const double median = (ratios[49] + ratios[50]) / 2.0;
    if (median > 0.2)
        return {false, "median evaluation ratio " + fmt(median) + " > 0.2"};
    return {true, "median evaluation ratio " + fmt(median)};
}

// ---------------------------------------------------------------------------
// Criterion 4: adaptive threshold. Symmetric case hits the midpoint within
// 1e-9; the asymmetric case (mu-=0, sigma-=1, mu+=4, sigma+=2, equal
// priors) matches a dense scan + bisection of the weighted-pdf crossing
// within 1e-6.
// ---------------------------------------------------------------------------
CriterionResult criterion4() {
    // Samples {-3,-1} / {1,3}: class means -2 / +2, population sigma 1.
    const ScoreDistributionFit sym =
        fit_adaptive_threshold({-3.0, -1.0, 1.0, 3.0}, {-1, -1, 1, 1});
    if (std::abs(sym.h_star - 0.0) > 1e-9)
        return {false, "symmetric h* = " + fmt(sym.h_star) + ", expected 0"};

    // Samples {-1,1} / {2,6}: exactly mu-=0 sigma-=1, mu+=4 sigma+=2.
    const ScoreDistributionFit fit =
        fit_adaptive_threshold({-1.0, 1.0, 2.0, 6.0}, {-1, -1, 1, 1});
    auto diff = [](double x) {
        const double log_neg = -0.5 * x * x - std::log(1.0);
        const double log_pos = -0.5 * (x - 4.0) * (x - 4.0) / 4.0 - std::log(2.0);
        return log_neg - log_pos;
    };
    // Dense scan over [0,4] for sign changes, refined by bisection; keep the
    // crossing closest to the midpoint 2.
    double best_root = std::numeric_limits<double>::quiet_NaN();
    const int steps = 400000;
    double prev_x = 0.0, prev_f = diff(0.0);
    for (int i = 1; i <= steps; ++i) {
        const double x = 4.0 * i / steps;
        const double f = diff(x);
        if ((prev_f <= 0.0) != (f <= 0.0)) {
            double lo = prev_x, hi = x;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((diff(lo) <= 0.0) != (diff(mid) <= 0.0))
                    hi = mid;
                else
                    lo = mid;
            }
            const double root = 0.5 * (lo + hi);
            if (std::isnan(best_root) ||
                std::abs(root - 2.0) < std::abs(best_root - 2.0))
                best_root = root;
        }
        prev_x = x;
        prev_f = f;
    }
    if (std::isnan(best_root)) return {false, "oracle scan found no crossing"};
    if (std::abs(fit.h_star - best_root) > 1e-6)
        return {false, "asymmetric h* = " + fmt(fit.h_star) + ", oracle " +
                           fmt(best_root)};
    return {true, "h* = " + fmt(fit.h_star)};
}

// ---------------------------------------------------------------------------
// Criterion 5: boosting training loss non-increasing per round (slack 1e-6)
// on 50 seeded toy sets; XOR in 2 features reaches 100% training accuracy
// with depth-2 trees and M = 10.
// ---------------------------------------------------------------------------
CriterionResult criterion5() {
    for (int set = 0; set < 50; ++set) {
        Rng rng(derive_seed(1005, static_cast<std::uint64_t>(set)));
        const std::size_t n = 20 + rng.below(41);  // [20, 60]
        const std::size_t d = 5 + rng.below(15);   // [5, 19]

        FeatureMatrix features;
        features.rows = n;
        features.cols = d;
        features.values.resize(n * d);
        for (double& v : features.values) v = rng.uniform(-1.0, 1.0);

        std::vector<double> w(d);
        for (double& wi : w) wi = rng.uniform(-1.0, 1.0);
        std::vector<std::uint32_t> rows(n);
        std::vector<int> labels(n);
        int pos = 0;
        for (std::size_t i = 0; i < n; ++i) {
            rows[i] = static_cast<std::uint32_t>(i);
            double score = 0.3 * rng.normal();
            for (std::size_t j = 0; j < d; ++j) score += w[j] * features.at(i, j);
            labels[i] = score >= 0.0 ? 1 : -1;
            pos += labels[i] > 0;
        }
        if (pos == 0) labels[0] = 1;
        if (pos == static_cast<int>(n)) labels[0] = -1;

        TrainConfig config;
        // Full-batch rounds: with per-round subsampling the full-set loss has
        // no monotonicity guarantee, so the property is checked where it is
        // actually a theorem of the Newton leaf steps.
        config.subsample_fraction = {1.0, 1.0};
        config.rng_seed = derive_seed(2005, static_cast<std::uint64_t>(set));
        std::vector<double> losses;
        train_boosted(features, rows, labels, config, &losses);
        for (std::size_t i = 1; i < losses.size(); ++i)
            if (losses[i] > losses[i - 1] + 1e-6)
                return {false, "set " + std::to_string(set) + " round " +
                                   std::to_string(i) + ": loss " + fmt(losses[i - 1]) +
                                   " -> " + fmt(losses[i])};
    }

    // XOR: the four corner patterns replicated 25x so per-round subsampling
    // always sees every quadrant.
    FeatureMatrix xor_features;
    xor_features.rows = 100;
    xor_features.cols = 2;
    xor_features.values.resize(200);
    std::vector<std::uint32_t> xor_rows(100);
    std::vector<int> xor_labels(100);
    const double corner[4][2] = {{-0.5, -0.5}, {-0.5, 0.5}, {0.5, -0.5}, {0.5, 0.5}};
    for (std::size_t i = 0; i < 100; ++i) {
        const double* c = corner[i % 4];
        xor_features.values[2 * i] = c[0];
        xor_features.values[2 * i + 1] = c[1];
        xor_rows[i] = static_cast<std::uint32_t>(i);
        xor_labels[i] = c[0] * c[1] > 0.0 ? 1 : -1;
    }
    TrainConfig xor_config;
    xor_config.rounds = 10;
    xor_config.max_depth = 2;
    xor_config.rng_seed = 77;
    const BoostedModel model =
        train_boosted(xor_features, xor_rows, xor_labels, xor_config);
    for (std::size_t i = 0; i < 100; ++i) {
        const double f = model.raw_score(xor_features.row(i));
        if ((f >= 0.0 ? 1 : -1) != xor_labels[i])
            return {false, "XOR row " + std::to_string(i) + " misclassified (F = " +
                               fmt(f) + ")"};
    }
    return {true, "50 toy sets + XOR"};
}

// ---------------------------------------------------------------------------
// Shared desk-scale protocol runs for criteria 6-8: synthetic 64^3 six-blob
// volumes, all five strategies, N = 10 repetitions, budget 100.
// ---------------------------------------------------------------------------
struct ProtocolRuns {
    bool attempted = false;
    std::string error;
    std::map<std::string, LearningCurve> curves;
};

ProtocolRuns& protocol_runs() {
    static ProtocolRuns runs;
    if (runs.attempted) return runs;
    runs.attempted = true;
    try {
        // 64^3 volume with six small blobs (radii [5, 8]) and a fine
        // oversegmentation.  Foreground is scarce, so random sampling is
        // starved of boundary examples while uncertainty-driven strategies
        // concentrate effort there; low noise keeps the partition ceiling
        // high enough for the gap to show in the final scores.
        SyntheticConfig synth;
        synth.blob_radius_min = 5.0;
        synth.blob_radius_max = 8.0;
        synth.fg_intensity = 0.7;
        synth.bg_intensity = 0.3;
        synth.noise_sigma = 0.12;
        synth.rng_seed = 12345;
        auto [train_vol, train_lab] = generate_synthetic(synth);
        synth.rng_seed = 54321;
        auto [test_vol, test_lab] = generate_synthetic(synth);

        const PreparedDataset train_data = prepare_dataset(
            std::move(train_vol), std::move(train_lab), 2800, 0.2, 0);
        const PreparedDataset test_data = prepare_dataset(
            std::move(test_vol), std::move(test_lab), 2800, 0.2, 0);

        RunConfig config;
        config.effort_budget = 100;
        config.seed_pos = 5;
        config.seed_neg = 5;
        config.repetitions = 10;
        config.tau_max = 20;
        config.r = 12.0;
        config.t = 5;
        config.rng_seed = 2026;
        config.threads = static_cast<int>(std::max(
            1u, std::min(10u, std::thread::hardware_concurrency())));

        for (Strategy s :
             {Strategy::random_single, Strategy::feature_single,
              Strategy::combined_single, Strategy::feature_plane,
              Strategy::combined_plane}) {
            config.strategy = s;
            runs.curves[strategy_name(s)] =
                run_strategy(train_data, test_data, config);
        }
    } catch (const std::exception& e) {
        runs.error = e.what();
    }
    return runs;
}

std::vector<double> final_vocs(const LearningCurve& curve) {
    std::vector<double> out;
    for (const RepetitionResult& rep : curve.repetitions)
        out.push_back(rep.points.back().voc);
    return out;
}

double mean(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

// ---------------------------------------------------------------------------
// Criterion 6: effort accounting on every protocol run. Single strategies
// spend exactly 100 single queries; patch strategies finish in <= 50 rounds;
// the ledger identity effort = singles + 2 * patches holds exactly.
// ---------------------------------------------------------------------------
CriterionResult criterion6() {
    const ProtocolRuns& runs = protocol_runs();
    if (!runs.error.empty()) return {false, "protocol runs failed: " + runs.error};
    for (const auto& [name, curve] : runs.curves) {
        const bool planes = name == "pFUs" || name == "pCUs";
        for (std::size_t rep = 0; rep < curve.repetitions.size(); ++rep) {
            const RepetitionResult& rr = curve.repetitions[rep];
            const std::string where = name + " rep " + std::to_string(rep);
            if (rr.final_effort != rr.single_queries + 2 * rr.patch_queries)
                return {false, where + ": ledger " + std::to_string(rr.final_effort) +
                                   " != " + std::to_string(rr.single_queries) + " + 2*" +
                                   std::to_string(rr.patch_queries)};
            if (planes) {
                if (rr.single_queries != 0)
                    return {false, where + ": patch strategy used single queries"};
                if (rr.patch_queries > 50)
                    return {false, where + ": " + std::to_string(rr.patch_queries) +
                                       " rounds > 50"};
                if (rr.final_effort != 100)
                    return {false, where + ": effort " +
                                       std::to_string(rr.final_effort) + " != 100"};
            } else {
                if (rr.patch_queries != 0)
                    return {false, where + ": single strategy used patch queries"};
                if (rr.single_queries != 100)
                    return {false, where + ": " + std::to_string(rr.single_queries) +
                                       " single queries != 100"};
            }
        }
    }
    return {true, "5 strategies x 10 repetitions"};
}

// ---------------------------------------------------------------------------
// Criterion 7: strategy ordering at desk scale. Mean final VOC of pCUs beats
// Rs by at least 0.05, and CUs >= FUs in at least 7 of 10 repetitions.
// ---------------------------------------------------------------------------
CriterionResult criterion7() {
    const ProtocolRuns& runs = protocol_runs();
    if (!runs.error.empty()) return {false, "protocol runs failed: " + runs.error};

    const double mean_rs = mean(final_vocs(runs.curves.at("Rs")));
    const double mean_pcus = mean(final_vocs(runs.curves.at("pCUs")));
    const std::vector<double> cus = final_vocs(runs.curves.at("CUs"));
    const std::vector<double> fus = final_vocs(runs.curves.at("FUs"));
    int cus_wins = 0;
    for (std::size_t rep = 0; rep < cus.size(); ++rep) cus_wins += cus[rep] >= fus[rep];

    const std::string detail = "pCUs " + fmt(mean_pcus) + " vs Rs " + fmt(mean_rs) +
                               " (margin " + fmt(mean_pcus - mean_rs) +
                               "), CUs >= FUs in " + std::to_string(cus_wins) + "/10";
    if (mean_pcus - mean_rs < 0.05) return {false, detail + "; margin < 0.05"};
    if (cus_wins < 7) return {false, detail + "; fewer than 7 wins"};
    return {true, detail};
}

// ---------------------------------------------------------------------------
// Criterion 8: variability structure on the same runs:
// variability_interval(pCUs) <= variability_interval(FUs).
// ---------------------------------------------------------------------------
CriterionResult criterion8() {
    const ProtocolRuns& runs = protocol_runs();
    if (!runs.error.empty()) return {false, "protocol runs failed: " + runs.error};
    const double var_pcus = variability_interval(final_vocs(runs.curves.at("pCUs")));
    const double var_fus = variability_interval(final_vocs(runs.curves.at("FUs")));
    const std::string detail =
        "pCUs " + fmt(var_pcus) + " vs FUs " + fmt(var_fus);
    if (var_pcus > var_fus + 1e-12) return {false, detail};
    return {true, detail};
}

// ---------------------------------------------------------------------------
// Criterion 9: determinism. Two executions of the same experiment produce
// byte-identical CSV outputs (SVG compared as well).
// ---------------------------------------------------------------------------
std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

CriterionResult criterion9() {
    ExperimentSpec spec;
    spec.synthetic = true;
    spec.train_synth.dims = {32, 32, 32};
    spec.train_synth.blob_count = 3;
    spec.train_synth.blob_radius_min = 4.0;
    spec.train_synth.blob_radius_max = 7.0;
    spec.train_synth.noise_sigma = 0.2;
    spec.test_synth = spec.train_synth;
    spec.train_synth.rng_seed = 7;
    spec.test_synth.rng_seed = 8;
    spec.target_supervoxels = 250;
    spec.strategies = {Strategy::random_single, Strategy::combined_plane};
    spec.run.effort_budget = 30;
    spec.run.repetitions = 3;
    spec.run.tau_max = 10;
    spec.run.r = 8.0;
    spec.run.t = 3;
    spec.run.train.rounds = 20;
    spec.run.rng_seed = 99;

    const std::filesystem::path base =
        std::filesystem::temp_directory_path() / "voxal_acceptance_determinism";
    std::filesystem::remove_all(base);
    spec.out_dir = base / "a";
    run_experiment(spec);
    spec.out_dir = base / "b";
    spec.run.threads = 2;  // thread count must not change the bytes
    run_experiment(spec);

    for (const char* file : {"curve_Rs.csv", "curve_pCUs.csv", "summary.csv",
                             "learning_curves.svg"}) {
        const std::string a = read_bytes(base / "a" / file);
        const std::string b = read_bytes(base / "b" / file);
        if (a.empty() || a != b) return {false, std::string(file) + " differs"};
    }
    return {true, "4 files byte-identical"};
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        std::function<CriterionResult()> run;
    };
    const std::vector<Entry> entries = {
        {1, "entropy closed forms", criterion1},
        {2, "random-walk propagation oracle", criterion2},
        {3, "plane-search branch-and-bound oracle", criterion3},
        {4, "adaptive threshold", criterion4},
        {5, "boosted classifier", criterion5},
        {6, "effort accounting", criterion6},
        {7, "strategy ordering at desk scale", criterion7},
        {8, "variability structure", criterion8},
        {9, "determinism", criterion9},
    };

    int failures = 0;
    for (const Entry& entry : entries) {
        const auto start = std::chrono::steady_clock::now();
        CriterionResult result;
        try {
            result = entry.run();
        } catch (const std::exception& e) {
            result = {false, std::string("exception: ") + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        std::printf("[%s] criterion %d: %s (%.1f s)%s%s\n",
                    result.pass ? "PASS" : "FAIL", entry.id, entry.name, seconds,
                    result.detail.empty() ? "" : " — ", result.detail.c_str());
        std::fflush(stdout);
        failures += result.pass ? 0 : 1;
    }
    return failures;
}
