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

#include "voxal/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "voxal/engine.hpp"
#include "voxal/experiment.hpp"
#include "voxal/features.hpp"
#include "voxal/kvfile.hpp"
#include "voxal/supervoxel.hpp"
#include "voxal/volume.hpp"

namespace voxal {

namespace {

void print_summaries(const std::vector<StrategySummary>& summaries,
                     const std::filesystem::path& out_dir) {
    for (const StrategySummary& s : summaries)
        std::cout << s.name << ": final VOC " << format_double(s.mean_voc) << ", dice "
                  << format_double(s.mean_dice) << ", variability "
                  << format_double(s.variability_voc) << '\n';
    std::cout << "report written to " << out_dir.string() << '\n';
}

// Canonical strategy order first, then everything else alphabetically, so a
// re-rendered default report matches the original byte for byte.
std::size_t curve_rank(const std::string& name) {
    static const char* canonical[] = {"Rs", "FUs", "CUs", "pFUs", "pCUs"};
    for (std::size_t i = 0; i < 5; ++i)
        if (name == canonical[i]) return i;
    return 5;
}

void rerender_report(const std::filesystem::path& in_dir,
                     const std::filesystem::path& out_dir) {
    std::vector<std::pair<std::string, std::filesystem::path>> found;
    for (const auto& entry : std::filesystem::directory_iterator(in_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string file = entry.path().filename().string();
        if (file.size() > 10 && file.rfind("curve_", 0) == 0 &&
            file.compare(file.size() - 4, 4, ".csv") == 0)
            found.emplace_back(file.substr(6, file.size() - 10), entry.path());
    }
    if (found.empty())
        throw std::runtime_error("no curve_*.csv files in " + in_dir.string());
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        const std::size_t ra = curve_rank(a.first), rb = curve_rank(b.first);
        return ra != rb ? ra < rb : a.first < b.first;
    });

    std::vector<std::pair<std::string, LearningCurve>> curves;
    for (const auto& [name, path] : found) curves.emplace_back(name, read_curve_csv(path));
    write_report(curves, out_dir);
    std::cout << "report written to " << out_dir.string() << '\n';
}

struct SpecOverrides {
    std::string out;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string strategies;
    bool has_seed = false;
};

void add_override_flags(CLI::App* cmd, SpecOverrides& ov, bool with_strategies) {
    cmd->add_option("--out", ov.out, "Override the spec's output directory");
    cmd->add_option("--seed", ov.seed, "Override the spec's master RNG seed")
        ->each([&ov](const std::string&) { ov.has_seed = true; });
    cmd->add_option("--threads", ov.threads, "Worker threads for repetitions")
        ->check(CLI::PositiveNumber);
    if (with_strategies)
        cmd->add_option("--strategies", ov.strategies,
                        "Override the strategy list (e.g. \"Rs,FUs,pCUs\")");
}

ExperimentSpec load_with_overrides(const std::string& spec_path, const SpecOverrides& ov) {
    ExperimentSpec spec = load_experiment_spec(spec_path);
    if (!ov.out.empty()) spec.out_dir = ov.out;
    if (ov.has_seed) spec.run.rng_seed = ov.seed;
    if (ov.threads > 0) spec.run.threads = ov.threads;
    if (!ov.strategies.empty()) spec.strategies = parse_strategy_list(ov.strategies);
    spec.validate();
    return spec;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"voxal: geometry-aware active learning for volumetric segmentation"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic blob dataset");
    SyntheticConfig synth_cfg;
    std::string synth_out;
    std::vector<int> synth_dims = {64, 64, 64};
    synth->add_option("--out", synth_out, "Dataset header path to write")->required();
    synth->add_option("--dims", synth_dims, "Volume dimensions (x y z)")->expected(3);
    synth->add_option("--blobs", synth_cfg.blob_count, "Number of blobs");
    synth->add_option("--radius-min", synth_cfg.blob_radius_min, "Minimum blob radius");
    synth->add_option("--radius-max", synth_cfg.blob_radius_max, "Maximum blob radius");
    synth->add_option("--noise", synth_cfg.noise_sigma, "Additive Gaussian noise sigma");
    synth->add_option("--fg", synth_cfg.fg_intensity, "Foreground intensity");
    synth->add_option("--bg", synth_cfg.bg_intensity, "Background intensity");
    synth->add_option("--seed", synth_cfg.rng_seed, "RNG seed");

    // segment
    auto* segment = app.add_subcommand("segment", "Oversegment a dataset into supervoxels");
    std::string segment_in, segment_out;
    int segment_target = 400;
    double segment_compactness = 0.2;
    segment->add_option("--input", segment_in, "Dataset header path")->required();
    segment->add_option("--out", segment_out, "Partition header path to write")->required();
    segment->add_option("--supervoxels", segment_target, "Target supervoxel count");
    segment->add_option("--compactness", segment_compactness, "Spatial compactness weight");

    // features
    auto* features = app.add_subcommand("features", "Export per-supervoxel features as CSV");
    std::string features_in, features_partition, features_out;
    features->add_option("--input", features_in, "Dataset header path")->required();
    features->add_option("--partition", features_partition, "Partition header path")
        ->required();
    features->add_option("--out", features_out, "CSV path to write")->required();

    // run
    auto* run = app.add_subcommand("run", "Run a full active-learning experiment");
    std::string run_spec;
    SpecOverrides run_ov;
    run->add_option("--spec", run_spec, "Experiment file")->required();
    add_override_flags(run, run_ov, true);

    // sweep-radius
    auto* sweep = app.add_subcommand(
        "sweep-radius", "Run the pCUs strategy for a list of patch radii");
    std::string sweep_spec;
    std::vector<double> sweep_radii = {10.0, 15.0, 20.0};
    SpecOverrides sweep_ov;
    sweep->add_option("--spec", sweep_spec, "Experiment file")->required();
    sweep->add_option("--radii", sweep_radii, "Patch radii to sweep")->expected(1, -1);
    add_override_flags(sweep, sweep_ov, false);

    // report
    auto* report = app.add_subcommand("report", "Re-render summary and SVG from curve CSVs");
    std::string report_dir, report_out;
    report->add_option("--dir", report_dir, "Directory containing curve_*.csv")->required();
    report->add_option("--out", report_out, "Output directory (defaults to --dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(synth)) {
            for (int a = 0; a < 3; ++a)
                synth_cfg.dims[static_cast<std::size_t>(a)] =
                    synth_dims[static_cast<std::size_t>(a)];
            auto [volume, labels] = generate_synthetic(synth_cfg);
            save_dataset(volume, &labels, synth_out);
            std::cout << "wrote " << synth_out << " (" << volume.dims[0] << "x"
                      << volume.dims[1] << "x" << volume.dims[2] << ")\n";
        } else if (app.got_subcommand(segment)) {
            const Dataset dataset = load_dataset(segment_in);
            const SupervoxelPartition partition =
                slic_oversegment(dataset.volume, segment_target, segment_compactness);
            save_partition(partition, segment_out);
            std::cout << "wrote " << segment_out << " (" << partition.count
                      << " supervoxels)\n";
        } else if (app.got_subcommand(features)) {
            const Dataset dataset = load_dataset(features_in);
            const SupervoxelPartition partition = load_partition(features_partition);
            const FeatureMatrix matrix = compute_features(dataset.volume, partition);
            save_features_csv(matrix, features_out);
            std::cout << "wrote " << features_out << " (" << matrix.rows << "x"
                      << matrix.cols << ")\n";
        } else if (app.got_subcommand(run)) {
            const ExperimentSpec spec = load_with_overrides(run_spec, run_ov);
            print_summaries(run_experiment(spec), spec.out_dir);
        } else if (app.got_subcommand(sweep)) {
            const ExperimentSpec spec = load_with_overrides(sweep_spec, sweep_ov);
            print_summaries(run_radius_sweep(spec, sweep_radii), spec.out_dir);
        } else if (app.got_subcommand(report)) {
            const std::filesystem::path in_dir = report_dir;
            rerender_report(in_dir, report_out.empty() ? in_dir
                                                       : std::filesystem::path(report_out));
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace voxal
