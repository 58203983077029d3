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

#include "voxal/experiment.hpp"

#include <cctype>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "voxal/kvfile.hpp"

namespace voxal {

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) {
                out.push_back(current);
                current.clear();
            }
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) out.push_back(current);
    return out;
}

int to_int(const std::string& text) {
    const std::int64_t v = parse_int(text);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw std::runtime_error("integer out of range: " + text);
    return static_cast<int>(v);
}

// Builds both prepared datasets exactly once per experiment; the strategies
// (or sweep radii) all see the same partitions, graphs and features.
PreparedDataset prepare_from_spec(const ExperimentSpec& spec, bool train) {
    Volume volume;
    LabelVolume labels;
    if (spec.synthetic) {
        auto pair = generate_synthetic(train ? spec.train_synth : spec.test_synth);
        volume = std::move(pair.first);
        labels = std::move(pair.second);
    } else {
        std::filesystem::path path = train ? spec.train_dataset : spec.test_dataset;
        if (path.is_relative()) path = spec.base_dir / path;
        Dataset dataset = load_dataset(path);
        if (!dataset.labels)
            throw std::runtime_error("dataset has no labels: " + path.string());
        volume = std::move(dataset.volume);
        labels = std::move(*dataset.labels);
    }
    return prepare_dataset(std::move(volume), std::move(labels), spec.target_supervoxels,
                           spec.compactness, spec.run.k);
}

std::vector<StrategySummary> run_and_report(
    const PreparedDataset& train_data, const PreparedDataset& test_data,
    const std::vector<std::pair<std::string, RunConfig>>& jobs,
    const std::filesystem::path& out_dir) {
    std::vector<std::pair<std::string, LearningCurve>> curves;
    curves.reserve(jobs.size());
    for (const auto& [name, cfg] : jobs)
        curves.emplace_back(name, run_strategy(train_data, test_data, cfg));
    write_report(curves, out_dir);
    std::vector<StrategySummary> summaries;
    summaries.reserve(curves.size());
    for (const auto& [name, curve] : curves) summaries.push_back(summarize(name, curve));
    return summaries;
}

}  // namespace

std::vector<Strategy> parse_strategy_list(const std::string& text) {
    std::vector<Strategy> out;
    for (const std::string& token : split_list(text)) {
        const Strategy s = strategy_from_string(token);
        for (Strategy seen : out)
            if (seen == s) throw std::invalid_argument("duplicate strategy: " + token);
        out.push_back(s);
    }
    if (out.empty()) throw std::invalid_argument("empty strategy list");
    return out;
}

void ExperimentSpec::validate() const {
    if (synthetic) {
        train_synth.validate();
        test_synth.validate();
    } else if (train_dataset.empty() || test_dataset.empty()) {
        throw std::invalid_argument("files mode requires train_dataset and test_dataset");
    }
    if (target_supervoxels < 1)
        throw std::invalid_argument("target_supervoxels must be positive");
    if (!(compactness > 0.0)) throw std::invalid_argument("compactness must be positive");
    if (strategies.empty()) throw std::invalid_argument("no strategies selected");
    for (std::size_t i = 0; i < strategies.size(); ++i)
        for (std::size_t j = i + 1; j < strategies.size(); ++j)
            if (strategies[i] == strategies[j])
                throw std::invalid_argument("duplicate strategy: " +
                                            strategy_name(strategies[i]));
    run.validate();
    if (out_dir.empty()) throw std::invalid_argument("output directory is empty");
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
    const KeyValueFile kv = KeyValueFile::load(path);
    ExperimentSpec spec;
    spec.base_dir = path.parent_path();

    const std::string mode = kv.get_or("mode", "synthetic");
    if (mode == "synthetic")
        spec.synthetic = true;
    else if (mode == "files")
        spec.synthetic = false;
    else
        throw std::runtime_error("unknown mode: " + mode + " (expected synthetic or files)");

    static const std::set<std::string> common_keys = {
        "mode",          "target_supervoxels", "compactness", "k",
        "strategies",    "effort_budget",      "seed_pos",    "seed_neg",
        "repetitions",   "tau_max",            "r",           "t",
        "angle_tolerance", "rounds",           "shrinkage",   "max_depth",
        "rng_seed",      "threads",            "out"};
    static const std::set<std::string> synth_keys = {
        "dims",        "blob_count",  "blob_radius_min", "blob_radius_max",
        "noise_sigma", "fg_intensity", "bg_intensity",   "train_seed",
        "test_seed"};
    static const std::set<std::string> file_keys = {"train_dataset", "test_dataset"};
    for (const auto& [key, value] : kv.entries()) {
        (void)value;
        if (common_keys.count(key)) continue;
        if (spec.synthetic ? synth_keys.count(key) : file_keys.count(key)) continue;
        throw std::runtime_error("unknown experiment key: " + key);
    }

    if (spec.synthetic) {
        SyntheticConfig synth;
        if (kv.has("dims")) {
            const auto dims = parse_ints(kv.get("dims"), 3);
            for (int a = 0; a < 3; ++a) synth.dims[static_cast<std::size_t>(a)] =
                static_cast<int>(dims[static_cast<std::size_t>(a)]);
        }
        if (kv.has("blob_count")) synth.blob_count = to_int(kv.get("blob_count"));
        if (kv.has("blob_radius_min"))
            synth.blob_radius_min = parse_double(kv.get("blob_radius_min"));
        if (kv.has("blob_radius_max"))
            synth.blob_radius_max = parse_double(kv.get("blob_radius_max"));
        if (kv.has("noise_sigma")) synth.noise_sigma = parse_double(kv.get("noise_sigma"));
        if (kv.has("fg_intensity")) synth.fg_intensity = parse_double(kv.get("fg_intensity"));
        if (kv.has("bg_intensity")) synth.bg_intensity = parse_double(kv.get("bg_intensity"));
        spec.train_synth = synth;
        spec.test_synth = synth;
        spec.train_synth.rng_seed = kv.has("train_seed") ? parse_uint(kv.get("train_seed")) : 1;
        spec.test_synth.rng_seed = kv.has("test_seed") ? parse_uint(kv.get("test_seed")) : 2;
    } else {
        spec.train_dataset = kv.get("train_dataset");
        spec.test_dataset = kv.get("test_dataset");
    }

    if (kv.has("target_supervoxels"))
        spec.target_supervoxels = to_int(kv.get("target_supervoxels"));
    if (kv.has("compactness")) spec.compactness = parse_double(kv.get("compactness"));
    if (kv.has("k")) spec.run.k = to_int(kv.get("k"));

    spec.strategies = kv.has("strategies")
                          ? parse_strategy_list(kv.get("strategies"))
                          : parse_strategy_list("Rs FUs CUs pFUs pCUs");
    if (kv.has("effort_budget")) spec.run.effort_budget = to_int(kv.get("effort_budget"));
    if (kv.has("seed_pos")) spec.run.seed_pos = to_int(kv.get("seed_pos"));
    if (kv.has("seed_neg")) spec.run.seed_neg = to_int(kv.get("seed_neg"));
    if (kv.has("repetitions")) spec.run.repetitions = to_int(kv.get("repetitions"));
    if (kv.has("tau_max")) spec.run.tau_max = to_int(kv.get("tau_max"));
    if (kv.has("r")) spec.run.r = parse_double(kv.get("r"));
    if (kv.has("t")) spec.run.t = to_int(kv.get("t"));
    if (kv.has("angle_tolerance"))
        spec.run.angle_tolerance = parse_double(kv.get("angle_tolerance"));
    if (kv.has("rounds")) spec.run.train.rounds = to_int(kv.get("rounds"));
    if (kv.has("shrinkage")) spec.run.train.shrinkage = parse_double(kv.get("shrinkage"));
    if (kv.has("max_depth")) spec.run.train.max_depth = to_int(kv.get("max_depth"));
    if (kv.has("rng_seed")) spec.run.rng_seed = parse_uint(kv.get("rng_seed"));
    if (kv.has("threads")) spec.run.threads = to_int(kv.get("threads"));
    if (kv.has("out")) spec.out_dir = kv.get("out");

    spec.validate();
    return spec;
}

std::vector<StrategySummary> run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const PreparedDataset train_data = prepare_from_spec(spec, true);
    const PreparedDataset test_data = prepare_from_spec(spec, false);
    // Every strategy shares rng_seed, so repetition i draws the same seed
    // labels across strategies and comparisons are paired.
    std::vector<std::pair<std::string, RunConfig>> jobs;
    for (Strategy s : spec.strategies) {
        RunConfig cfg = spec.run;
        cfg.strategy = s;
        jobs.emplace_back(strategy_name(s), cfg);
    }
    return run_and_report(train_data, test_data, jobs, spec.out_dir);
}

std::vector<StrategySummary> run_radius_sweep(const ExperimentSpec& spec,
                                              const std::vector<double>& radii) {
    spec.validate();
    if (radii.empty()) throw std::invalid_argument("empty radius list");
    for (double radius : radii)
        if (!(radius > 0.0)) throw std::invalid_argument("radii must be positive");
    for (std::size_t i = 0; i < radii.size(); ++i)
        for (std::size_t j = i + 1; j < radii.size(); ++j)
            if (radii[i] == radii[j])
                throw std::invalid_argument("duplicate radius: " + format_double(radii[i]));

    const PreparedDataset train_data = prepare_from_spec(spec, true);
    const PreparedDataset test_data = prepare_from_spec(spec, false);
    std::vector<std::pair<std::string, RunConfig>> jobs;
    for (double radius : radii) {
        RunConfig cfg = spec.run;
        cfg.strategy = Strategy::combined_plane;
        cfg.r = radius;
        jobs.emplace_back("pCUs_r" + format_double(radius), cfg);
    }
    return run_and_report(train_data, test_data, jobs, spec.out_dir);
}

}  // namespace voxal
