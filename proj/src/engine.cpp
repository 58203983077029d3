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

#include "voxal/engine.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "voxal/kvfile.hpp"
#include "voxal/plane_search.hpp"
#include "voxal/rng.hpp"
#include "voxal/uncertainty.hpp"

namespace voxal {

namespace {

struct TrainedState {
    BoostedModel model;
    double threshold = 0.0;
};

// One retrain on the current labels; threshold comes from the adaptive
// density-crossing fit on the training scores themselves.
TrainedState train_on_store(const PreparedDataset& data, const LabelStore& store,
                            const TrainConfig& base, std::uint64_t seed) {
    std::vector<std::uint32_t> rows;
    std::vector<int> labels;
    rows.reserve(store.labeled_count());
    for (std::uint32_t i = 0; i < store.size(); ++i)
        if (store.is_labeled(i)) {
            rows.push_back(i);
            labels.push_back(store.label(i));
        }

    TrainConfig cfg = base;
    cfg.rng_seed = seed;
    TrainedState state;
    state.model = train_boosted(data.features, rows, labels, cfg);

    std::vector<double> scores(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        scores[i] = state.model.raw_score(data.features.row(rows[i]));
    state.threshold = fit_adaptive_threshold(scores, labels).h_star;
    return state;
}

// Most uncertain unlabeled supervoxel; exact ties resolve uniformly at
// random so that repeated maxima do not bias toward low ids.
std::uint32_t select_uncertain(const std::vector<double>& uncertainty,
                               const std::vector<std::uint8_t>& labeled_mask, Rng& rng) {
    double best = -1.0;
    std::vector<std::uint32_t> ties;
    for (std::uint32_t i = 0; i < uncertainty.size(); ++i) {
        if (labeled_mask[i]) continue;
        if (uncertainty[i] > best) {
            best = uncertainty[i];
            ties.assign(1, i);
        } else if (uncertainty[i] == best) {
            ties.push_back(i);
        }
    }
    if (ties.empty()) throw std::invalid_argument("no unlabeled supervoxels left");
    return ties[static_cast<std::size_t>(rng.below(ties.size()))];
}

std::uint32_t select_random(const std::vector<std::uint8_t>& labeled_mask, Rng& rng) {
    std::uint64_t unlabeled = 0;
    for (std::uint8_t m : labeled_mask) unlabeled += m == 0;
    if (unlabeled == 0) throw std::invalid_argument("no unlabeled supervoxels left");
    std::uint64_t pick = rng.below(unlabeled);
    for (std::uint32_t i = 0; i < labeled_mask.size(); ++i) {
        if (labeled_mask[i]) continue;
        if (pick == 0) return i;
        --pick;
    }
    throw std::logic_error("unreachable");
}

void seed_class(LabelStore& store, std::vector<std::uint32_t>& ids, int count, int label,
                Rng& rng) {
    if (static_cast<std::size_t>(count) > ids.size())
        throw std::runtime_error("not enough supervoxels of one class for seeding");
    for (int j = 0; j < count; ++j) {
        const std::size_t pick = static_cast<std::size_t>(j) +
                                 static_cast<std::size_t>(rng.below(ids.size() - j));
        std::swap(ids[static_cast<std::size_t>(j)], ids[pick]);
        store.seed(ids[static_cast<std::size_t>(j)], label);
    }
}

RepetitionResult run_repetition(const PreparedDataset& train_data,
                                const PreparedDataset& test_data, const RunConfig& config,
                                std::uint64_t rep_seed) {
    const std::uint32_t n = train_data.partition.count;
    LabelStore store(n);

    // Free seed labels, drawn identically for every strategy.
    {
        Rng seed_rng(derive_seed(rep_seed, 0));
        std::vector<std::uint32_t> pos, neg;
        for (std::uint32_t i = 0; i < n; ++i)
            (train_data.supervoxel_labels[i] == 1 ? pos : neg).push_back(i);
        seed_class(store, pos, config.seed_pos, 1, seed_rng);
        seed_class(store, neg, config.seed_neg, -1, seed_rng);
    }

    Rng loop_rng(derive_seed(rep_seed, 1));
    std::uint64_t train_stream = 2;
    RepetitionResult result;

    while (true) {
        const TrainedState state = train_on_store(train_data, store, config.train,
                                                  derive_seed(rep_seed, train_stream++));
        const std::vector<std::uint8_t> mask =
            predict_voxel_mask(test_data, state.model, state.threshold);
        result.points.push_back({store.effort_spent(),
                                 voc_score(mask, test_data.labels.labels),
                                 dice_score(mask, test_data.labels.labels)});

        if (store.effort_spent() >= config.effort_budget) break;
        if (store.labeled_count() == n) break;

        switch (config.strategy) {
            case Strategy::random_single: {
                label_supervoxel(store, select_random(store.labeled_mask(), loop_rng),
                                 train_data.supervoxel_labels);
                break;
            }
            case Strategy::feature_single:
            case Strategy::combined_single: {
                const std::vector<double> p = classifier_probabilities(
                    state.model, state.threshold, train_data.features);
                std::vector<double> u = feature_uncertainty(p);
                if (config.strategy == Strategy::combined_single)
                    u = combined_uncertainty(
                        u, geometric_uncertainty(propagate_geometric(
                               train_data.graph, p, config.tau_max)));
                label_supervoxel(store, select_uncertain(u, store.labeled_mask(), loop_rng),
                                 train_data.supervoxel_labels);
                break;
            }
            case Strategy::feature_plane:
            case Strategy::combined_plane: {
                const std::vector<double> p = classifier_probabilities(
                    state.model, state.threshold, train_data.features);
                std::vector<double> u = feature_uncertainty(p);
                if (config.strategy == Strategy::combined_plane)
                    u = combined_uncertainty(
                        u, geometric_uncertainty(propagate_geometric(
                               train_data.graph, p, config.tau_max)));
                const PlaneQuery q =
                    select_query_plane(train_data.partition, u, store.labeled_mask(),
                                       config.t, config.r, config.angle_tolerance);
                label_patch(store, q.members, train_data.supervoxel_labels);
                break;
            }
        }
    }

    result.single_queries = store.single_queries();
    result.patch_queries = store.patch_queries();
    result.final_effort = store.effort_spent();
    return result;
}

std::string format_score(double v) { return format_double(v); }

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// Deterministic two-decimal pixel coordinates for the SVG.
std::string px(double v) { return format_double(std::round(v * 100.0) / 100.0); }

// Fixed colors for the five canonical strategies; other curve names (e.g.
// radius sweeps) cycle through a secondary palette by position.
const char* curve_color(const std::string& name, std::size_t index) {
    if (name == "Rs") return "#1f77b4";
    if (name == "FUs") return "#ff7f0e";
    if (name == "CUs") return "#2ca02c";
    if (name == "pFUs") return "#d62728";
    if (name == "pCUs") return "#9467bd";
    static const char* extras[] = {"#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return extras[index % 5];
}

void write_svg(const std::vector<std::pair<std::string, LearningCurve>>& curves,
               const std::filesystem::path& path) {
    const double width = 800, height = 500;
    const double left = 60, right = 20, top = 20, bottom = 40;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    int max_effort = 1;
    for (const auto& [name, curve] : curves)
        for (const RepetitionResult& rep : curve.repetitions)
            for (const CurvePoint& p : rep.points) max_effort = std::max(max_effort, p.effort);

    auto x_of = [&](double effort) { return left + effort / max_effort * plot_w; };
    auto y_of = [&](double score) { return top + (1.0 - score) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
           "viewBox=\"0 0 800 500\">\n";
    svg << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";

    // Axes and ticks.
    svg << "<line x1=\"" << px(left) << "\" y1=\"" << px(top + plot_h) << "\" x2=\""
        << px(left + plot_w) << "\" y2=\"" << px(top + plot_h)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << px(left) << "\" y1=\"" << px(top) << "\" x2=\"" << px(left)
        << "\" y2=\"" << px(top + plot_h) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double score = i / 5.0;
        svg << "<line x1=\"" << px(left - 4) << "\" y1=\"" << px(y_of(score)) << "\" x2=\""
            << px(left) << "\" y2=\"" << px(y_of(score)) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px(left - 8) << "\" y=\"" << px(y_of(score) + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << format_score(score)
            << "</text>\n";
    }
    const int x_ticks = 5;
    for (int i = 0; i <= x_ticks; ++i) {
        const double effort = max_effort * (static_cast<double>(i) / x_ticks);
        svg << "<line x1=\"" << px(x_of(effort)) << "\" y1=\"" << px(top + plot_h)
            << "\" x2=\"" << px(x_of(effort)) << "\" y2=\"" << px(top + plot_h + 4)
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px(x_of(effort)) << "\" y=\"" << px(top + plot_h + 18)
            << "\" font-size=\"12\" text-anchor=\"middle\">"
            << format_score(std::round(effort)) << "</text>\n";
    }
    svg << "<text x=\"" << px(left + plot_w / 2) << "\" y=\"" << px(height - 6)
        << "\" font-size=\"13\" text-anchor=\"middle\">annotation effort</text>\n";
    svg << "<text x=\"14\" y=\"" << px(top + plot_h / 2)
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << px(top + plot_h / 2) << ")\">segmentation score (VOC)</text>\n";

    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const auto& [name, curve] = curves[ci];
        // Align repetitions on their recorded effort values.
        std::map<int, std::vector<double>> by_effort;
        for (const RepetitionResult& rep : curve.repetitions)
            for (const CurvePoint& p : rep.points) by_effort[p.effort].push_back(p.voc);

        const char* color = curve_color(name, ci);
        std::ostringstream band_fwd, band_rev, mean_line;
        for (const auto& [effort, vocs] : by_effort) {
            std::vector<double> sorted = vocs;
            std::sort(sorted.begin(), sorted.end());
            double mean = 0.0;
            for (double v : sorted) mean += v;
            mean /= static_cast<double>(sorted.size());
            const double q10 = quantile_sorted(sorted, 0.1);
            const double q90 = quantile_sorted(sorted, 0.9);
            band_fwd << px(x_of(effort)) << ',' << px(y_of(q90)) << ' ';
            band_rev << px(x_of(effort)) << ',' << px(y_of(q10)) << ' ';
            mean_line << px(x_of(effort)) << ',' << px(y_of(mean)) << ' ';
        }
        // Reverse the lower edge to close the band polygon.
        std::vector<std::string> rev;
        {
            std::istringstream in(band_rev.str());
            std::string tok;
            while (in >> tok) rev.push_back(tok);
        }
        svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" "
               "points=\""
            << band_fwd.str();
        for (auto it = rev.rbegin(); it != rev.rend(); ++it) svg << *it << ' ';
        svg << "\"/>\n";
        svg << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"" << mean_line.str() << "\"/>\n";
    }

    // Legend.
    double ly = top + 14;
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const auto& [name, curve] = curves[ci];
        (void)curve;
        const char* color = curve_color(name, ci);
        svg << "<line x1=\"" << px(left + 12) << "\" y1=\"" << px(ly - 4) << "\" x2=\""
            << px(left + 36) << "\" y2=\"" << px(ly - 4) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << px(left + 42) << "\" y=\"" << px(ly)
            << "\" font-size=\"12\">" << name << "</text>\n";
        ly += 18;
    }
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write svg: " + path.string());
    out << svg.str();
    if (!out) throw std::runtime_error("svg write failed");
}

}  // namespace

Strategy strategy_from_string(const std::string& name) {
    if (name == "Rs") return Strategy::random_single;
    if (name == "FUs") return Strategy::feature_single;
    if (name == "CUs") return Strategy::combined_single;
    if (name == "pFUs") return Strategy::feature_plane;
    if (name == "pCUs") return Strategy::combined_plane;
    throw std::invalid_argument("unknown strategy: " + name);
}

std::string strategy_name(Strategy strategy) {
    switch (strategy) {
        case Strategy::random_single: return "Rs";
        case Strategy::feature_single: return "FUs";
        case Strategy::combined_single: return "CUs";
        case Strategy::feature_plane: return "pFUs";
        case Strategy::combined_plane: return "pCUs";
    }
    throw std::logic_error("unreachable");
}

bool strategy_uses_planes(Strategy strategy) {
    return strategy == Strategy::feature_plane || strategy == Strategy::combined_plane;
}

bool strategy_uses_geometry(Strategy strategy) {
    return strategy == Strategy::combined_single || strategy == Strategy::combined_plane;
}

void RunConfig::validate() const {
    if (effort_budget < 1) throw std::invalid_argument("effort_budget must be positive");
    if (seed_pos < 1 || seed_neg < 1)
        throw std::invalid_argument("seed counts must be positive");
    if (repetitions < 1) throw std::invalid_argument("repetitions must be positive");
    if (k < 0) throw std::invalid_argument("k must be nonnegative");
    if (tau_max < 1) throw std::invalid_argument("tau_max must be positive");
    if (!(r > 0.0)) throw std::invalid_argument("patch radius must be positive");
    if (t < 1) throw std::invalid_argument("candidate count t must be positive");
    if (angle_tolerance < 0.0)
        throw std::invalid_argument("angle_tolerance must be nonnegative");
    if (threads < 1) throw std::invalid_argument("threads must be positive");
    train.validate();
}

PreparedDataset prepare_dataset(Volume volume, LabelVolume labels, int target_supervoxels,
                                double compactness, int k) {
    labels.validate(volume.dims);
    PreparedDataset data;
    data.partition = slic_oversegment(volume, target_supervoxels, compactness);
    const int k_eff = k > 0 ? k : default_neighbor_count(data.partition);
    data.graph = build_graph(data.partition, k_eff);
    data.features = compute_features(volume, data.partition);
    data.supervoxel_labels = majority_labels(labels, data.partition);
    data.volume = std::move(volume);
    data.labels = std::move(labels);
    return data;
}

double voc_score(const std::vector<std::uint8_t>& predicted,
                 const std::vector<std::uint8_t>& truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("mask length mismatch");
    std::uint64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        tp += predicted[i] & truth[i];
        fp += predicted[i] & static_cast<std::uint8_t>(!truth[i]);
        fn += static_cast<std::uint8_t>(!predicted[i]) & truth[i];
    }
    const std::uint64_t denom = tp + fp + fn;
    return denom == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(denom);
}

double dice_score(const std::vector<std::uint8_t>& predicted,
                  const std::vector<std::uint8_t>& truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("mask length mismatch");
    std::uint64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        tp += predicted[i] & truth[i];
        fp += predicted[i] & static_cast<std::uint8_t>(!truth[i]);
        fn += static_cast<std::uint8_t>(!predicted[i]) & truth[i];
    }
    const std::uint64_t denom = 2 * tp + fp + fn;
    return denom == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

std::vector<std::uint8_t> predict_voxel_mask(const PreparedDataset& dataset,
                                             const BoostedModel& model, double threshold) {
    std::vector<std::uint8_t> sv_mask(dataset.partition.count);
    for (std::uint32_t i = 0; i < dataset.partition.count; ++i)
        sv_mask[i] = model.raw_score(dataset.features.row(i)) >= threshold ? 1 : 0;
    std::vector<std::uint8_t> mask(dataset.partition.assignment.size());
    for (std::size_t v = 0; v < mask.size(); ++v)
        mask[v] = sv_mask[dataset.partition.assignment[v]];
    return mask;
}

LearningCurve run_strategy(const PreparedDataset& train_data, const PreparedDataset& test_data,
                           const RunConfig& config) {
    config.validate();
    if (train_data.features.cols != test_data.features.cols)
        throw std::invalid_argument("train/test feature dimensions differ");

    LearningCurve curve;
    curve.repetitions.resize(static_cast<std::size_t>(config.repetitions));

    const int n_threads = std::min(config.threads, config.repetitions);
    if (n_threads <= 1) {
        for (int rep = 0; rep < config.repetitions; ++rep)
            curve.repetitions[static_cast<std::size_t>(rep)] = run_repetition(
                train_data, test_data, config,
                derive_seed(config.rng_seed, static_cast<std::uint64_t>(rep)));
        return curve;
    }

    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&]() {
        while (true) {
            const int rep = next.fetch_add(1);
            if (rep >= config.repetitions) return;
            try {
                curve.repetitions[static_cast<std::size_t>(rep)] = run_repetition(
                    train_data, test_data, config,
                    derive_seed(config.rng_seed, static_cast<std::uint64_t>(rep)));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (std::thread& th : threads) th.join();
    if (error) std::rethrow_exception(error);
    return curve;
}

double variability_interval(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("no values");
    if (values.size() == 1) return 0.0;
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, 0.9) - quantile_sorted(values, 0.1);
}

StrategySummary summarize(const std::string& name, const LearningCurve& curve) {
    if (curve.repetitions.empty()) throw std::invalid_argument("empty learning curve");
    StrategySummary s;
    s.name = name;
    std::vector<double> final_vocs;
    for (const RepetitionResult& rep : curve.repetitions) {
        if (rep.points.empty()) throw std::invalid_argument("repetition without points");
        s.mean_voc += rep.points.back().voc;
        s.mean_dice += rep.points.back().dice;
        final_vocs.push_back(rep.points.back().voc);
    }
    s.mean_voc /= static_cast<double>(curve.repetitions.size());
    s.mean_dice /= static_cast<double>(curve.repetitions.size());
    s.variability_voc = variability_interval(std::move(final_vocs));
    return s;
}

void write_report(const std::vector<std::pair<std::string, LearningCurve>>& curves,
                  const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    for (const auto& [name, curve] : curves) {
        std::ofstream out(out_dir / ("curve_" + name + ".csv"));
        if (!out) throw std::runtime_error("cannot write curve csv");
        out << "repetition,effort,voc,dice\n";
        for (std::size_t rep = 0; rep < curve.repetitions.size(); ++rep)
            for (const CurvePoint& p : curve.repetitions[rep].points)
                out << rep << ',' << p.effort << ',' << format_score(p.voc) << ','
                    << format_score(p.dice) << '\n';
        if (!out) throw std::runtime_error("curve csv write failed");
    }

    {
        std::ofstream out(out_dir / "summary.csv");
        if (!out) throw std::runtime_error("cannot write summary csv");
        out << "strategy,final_voc_mean,final_dice_mean,final_voc_variability\n";
        for (const auto& [name, curve] : curves) {
            const StrategySummary s = summarize(name, curve);
            out << s.name << ',' << format_score(s.mean_voc) << ','
                << format_score(s.mean_dice) << ',' << format_score(s.variability_voc)
                << '\n';
        }
        if (!out) throw std::runtime_error("summary csv write failed");
    }

    write_svg(curves, out_dir / "learning_curves.svg");
}

LearningCurve read_curve_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open curve csv: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "repetition,effort,voc,dice")
        throw std::runtime_error("bad curve csv header in " + path.string());

    LearningCurve curve;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<std::string, 4> field;
        std::size_t start = 0, n = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                if (n >= field.size())
                    throw std::runtime_error("bad curve csv row in " + path.string());
                field[n++] = line.substr(start, i - start);
                start = i + 1;
            }
        }
        if (n != field.size())
            throw std::runtime_error("bad curve csv row in " + path.string());
        const std::int64_t rep = parse_int(field[0]);
        if (rep < 0 || static_cast<std::size_t>(rep) > curve.repetitions.size())
            throw std::runtime_error("curve csv repetitions out of order in " + path.string());
        if (static_cast<std::size_t>(rep) == curve.repetitions.size())
            curve.repetitions.emplace_back();
        CurvePoint p;
        p.effort = static_cast<int>(parse_int(field[1]));
        p.voc = parse_double(field[2]);
        p.dice = parse_double(field[3]);
        curve.repetitions[static_cast<std::size_t>(rep)].points.push_back(p);
    }
    for (RepetitionResult& rep : curve.repetitions) {
        if (rep.points.empty())
            throw std::runtime_error("curve csv has an empty repetition in " + path.string());
        rep.final_effort = rep.points.back().effort;
    }
    if (curve.repetitions.empty())
        throw std::runtime_error("curve csv has no rows in " + path.string());
    return curve;
}

}  // namespace voxal
