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

#include "voxal/supervoxel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "voxal/kvfile.hpp"

namespace voxal {

namespace {

constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();
constexpr int kSlicIterations = 10;

struct Cluster {
    Vec3 pos;
    double intensity = 0.0;
};

// Chooses per-axis seed counts whose product is closest to the target.
// Ties prefer more splits along x, then y, then z, which keeps the choice
// deterministic and axis-stable for symmetric volumes.
std::array<int, 3> choose_seed_grid(const std::array<int, 3>& dims, int target, bool flat) {
    const double voxels = static_cast<double>(dims[0]) * dims[1] * dims[2];
    const double interval = flat ? std::sqrt(voxels / target) : std::cbrt(voxels / target);

    auto axis_candidates = [&](int n) {
        int lo = std::max(1, static_cast<int>(std::floor(n / interval)));
        int hi = std::max(1, static_cast<int>(std::ceil(n / interval)));
        lo = std::min(lo, n);
        hi = std::min(hi, n);
        return std::array<int, 2>{hi, lo};
    };

    const auto cx = axis_candidates(dims[0]);
    const auto cy = axis_candidates(dims[1]);
    const auto cz = flat ? std::array<int, 2>{1, 1} : axis_candidates(dims[2]);

    std::array<int, 3> best{1, 1, 1};
    long long best_err = -1;
    for (int ax : cx)
        for (int ay : cy)
            for (int az : cz) {
                const long long prod = static_cast<long long>(ax) * ay * az;
                const long long err = std::llabs(prod - target);
                if (best_err < 0 || err < best_err) {
                    best_err = err;
                    best = {ax, ay, az};
                }
            }
    return best;
}

float sample_intensity(const Volume& v, const Vec3& p) {
    const int x = std::clamp(static_cast<int>(std::lround(p.x)), 0, v.dims[0] - 1);
    const int y = std::clamp(static_cast<int>(std::lround(p.y)), 0, v.dims[1] - 1);
    const int z = std::clamp(static_cast<int>(std::lround(p.z)), 0, v.dims[2] - 1);
    return v.at(x, y, z);
}

double supervoxel_radius(std::uint32_t size, bool flat) {
    return flat ? std::sqrt(size / M_PI) : std::cbrt(3.0 * size / (4.0 * M_PI));
}

void compute_stats(SupervoxelPartition& part) {
    const bool flat = part.is_2d();
    part.sizes.assign(part.count, 0);
    part.centers.assign(part.count, Vec3{});
    part.radii.assign(part.count, 0.0);
    std::size_t idx = 0;
    for (int z = 0; z < part.dims[2]; ++z)
        for (int y = 0; y < part.dims[1]; ++y)
            for (int x = 0; x < part.dims[0]; ++x, ++idx) {
                const std::uint32_t id = part.assignment[idx];
                part.sizes[id] += 1;
                part.centers[id].x += x;
                part.centers[id].y += y;
                part.centers[id].z += z;
            }
    for (std::uint32_t i = 0; i < part.count; ++i) {
        if (part.sizes[i] == 0)
            throw std::runtime_error("supervoxel id range is not contiguous");
        const double inv = 1.0 / part.sizes[i];
        part.centers[i] = inv * part.centers[i];
        part.radii[i] = supervoxel_radius(part.sizes[i], flat);
    }
}

// Relabels connected fragments: the largest fragment of each cluster keeps
// its identity, every other fragment is merged into the largest adjacent
// supervoxel (sizes updated as merges happen).
void enforce_connectivity(std::vector<std::uint32_t>& assignment,
                          const std::array<int, 3>& dims, bool flat) {
    const int nx = dims[0], ny = dims[1], nz = dims[2];
    const std::size_t n = assignment.size();

    std::vector<std::int32_t> comp(n, -1);
    std::vector<std::uint32_t> comp_cluster;
    std::vector<std::uint64_t> comp_size;
    std::vector<std::size_t> stack;

    auto flood = [&](std::size_t start, std::int32_t comp_id) {
        const std::uint32_t cluster = assignment[start];
        std::uint64_t size = 0;
        stack.clear();
        stack.push_back(start);
        comp[start] = comp_id;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            ++size;
            const int x = static_cast<int>(v % nx);
            const int y = static_cast<int>((v / nx) % ny);
            const int z = static_cast<int>(v / (static_cast<std::size_t>(nx) * ny));
            auto visit = [&](int xx, int yy, int zz) {
                const std::size_t w = static_cast<std::size_t>(xx) +
                                      static_cast<std::size_t>(nx) *
                                          (static_cast<std::size_t>(yy) +
                                           static_cast<std::size_t>(ny) * zz);
                if (comp[w] < 0 && assignment[w] == cluster) {
                    comp[w] = comp_id;
                    stack.push_back(w);
                }
            };
            if (x > 0) visit(x - 1, y, z);
            if (x + 1 < nx) visit(x + 1, y, z);
            if (y > 0) visit(x, y - 1, z);
            if (y + 1 < ny) visit(x, y + 1, z);
            if (!flat) {
                if (z > 0) visit(x, y, z - 1);
                if (z + 1 < nz) visit(x, y, z + 1);
            }
        }
        comp_cluster.push_back(cluster);
        comp_size.push_back(size);
    };

    for (std::size_t v = 0; v < n; ++v)
        if (comp[v] < 0) flood(v, static_cast<std::int32_t>(comp_cluster.size()));

    const std::size_t n_comp = comp_cluster.size();

    // Component adjacency from face-neighboring voxels with different comps.
    std::vector<std::vector<std::int32_t>> comp_adj(n_comp);
    auto note_adjacent = [&](std::int32_t a, std::int32_t b) {
        if (a == b) return;
        comp_adj[a].push_back(b);
        comp_adj[b].push_back(a);
    };
    std::size_t idx = 0;
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x, ++idx) {
                if (x + 1 < nx) note_adjacent(comp[idx], comp[idx + 1]);
                if (y + 1 < ny) note_adjacent(comp[idx], comp[idx + nx]);
                if (!flat && z + 1 < nz)
                    note_adjacent(comp[idx], comp[idx + static_cast<std::size_t>(nx) * ny]);
            }
    for (auto& adj : comp_adj) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }

    // Largest fragment per cluster stays primary.
    const std::uint32_t n_cluster =
        comp_cluster.empty() ? 0 : *std::max_element(comp_cluster.begin(), comp_cluster.end()) + 1;
    std::vector<std::int32_t> primary(n_cluster, -1);
    for (std::size_t c = 0; c < n_comp; ++c) {
        const std::uint32_t cl = comp_cluster[c];
        if (primary[cl] < 0 || comp_size[c] > comp_size[static_cast<std::size_t>(primary[cl])])
            primary[cl] = static_cast<std::int32_t>(c);
    }

    std::vector<std::uint32_t> resolved(n_comp, kUnassigned);
    std::vector<std::uint64_t> cluster_size(n_cluster, 0);
    for (std::uint32_t cl = 0; cl < n_cluster; ++cl)
        if (primary[cl] >= 0) {
            resolved[static_cast<std::size_t>(primary[cl])] = cl;
            cluster_size[cl] = comp_size[static_cast<std::size_t>(primary[cl])];
        }

    std::size_t unresolved = 0;
    for (std::size_t c = 0; c < n_comp; ++c)
        if (resolved[c] == kUnassigned) ++unresolved;

    while (unresolved > 0) {
        bool progress = false;
        for (std::size_t c = 0; c < n_comp; ++c) {
            if (resolved[c] != kUnassigned) continue;
            std::uint32_t best_cluster = kUnassigned;
            for (std::int32_t a : comp_adj[c]) {
                const std::uint32_t cl = resolved[static_cast<std::size_t>(a)];
                if (cl == kUnassigned) continue;
                if (best_cluster == kUnassigned || cluster_size[cl] > cluster_size[best_cluster] ||
                    (cluster_size[cl] == cluster_size[best_cluster] && cl < best_cluster))
                    best_cluster = cl;
            }
            if (best_cluster != kUnassigned) {
                resolved[c] = best_cluster;
                cluster_size[best_cluster] += comp_size[c];
                --unresolved;
                progress = true;
            }
        }
        if (!progress) throw std::logic_error("orphan supervoxel fragment is unreachable");
    }

    // Contiguous relabel over clusters that kept a primary fragment.
    std::vector<std::uint32_t> remap(n_cluster, kUnassigned);
    std::uint32_t next = 0;
    for (std::uint32_t cl = 0; cl < n_cluster; ++cl)
        if (cluster_size[cl] > 0 && primary[cl] >= 0) remap[cl] = next++;
    for (std::size_t v = 0; v < n; ++v)
        assignment[v] = remap[resolved[static_cast<std::size_t>(comp[v])]];
}

}  // namespace

SupervoxelPartition slic_oversegment(const Volume& volume, int target_supervoxels,
                                     double compactness) {
    volume.validate();
    if (target_supervoxels < 1)
        throw std::invalid_argument("target_supervoxels must be positive");
    if (target_supervoxels > volume.voxel_count())
        throw std::invalid_argument("target_supervoxels exceeds voxel count");
    if (!(compactness > 0.0)) throw std::invalid_argument("compactness must be positive");

    const int nx = volume.dims[0], ny = volume.dims[1], nz = volume.dims[2];
    const bool flat = nz == 1;
    const std::size_t n = static_cast<std::size_t>(volume.voxel_count());

    const auto grid = choose_seed_grid(volume.dims, target_supervoxels, flat);
    const double step_x = static_cast<double>(nx) / grid[0];
    const double step_y = static_cast<double>(ny) / grid[1];
    const double step_z = static_cast<double>(nz) / grid[2];
    const double voxels = static_cast<double>(n);
    const double interval =
        flat ? std::sqrt(voxels / target_supervoxels) : std::cbrt(voxels / target_supervoxels);
    const double spatial_weight = (compactness * compactness) / (interval * interval);

    std::vector<Cluster> clusters;
    clusters.reserve(static_cast<std::size_t>(grid[0]) * grid[1] * grid[2]);
    for (int l = 0; l < grid[2]; ++l)
        for (int j = 0; j < grid[1]; ++j)
            for (int i = 0; i < grid[0]; ++i) {
                Cluster c;
                c.pos = {(i + 0.5) * step_x - 0.5, (j + 0.5) * step_y - 0.5,
                         (l + 0.5) * step_z - 0.5};
                c.intensity = sample_intensity(volume, c.pos);
                clusters.push_back(c);
            }

    std::vector<std::uint32_t> assignment(n, kUnassigned);
    std::vector<double> best_dist(n);

    for (int iter = 0; iter < kSlicIterations; ++iter) {
        std::fill(best_dist.begin(), best_dist.end(), std::numeric_limits<double>::infinity());
        std::fill(assignment.begin(), assignment.end(), kUnassigned);

        for (std::uint32_t c = 0; c < clusters.size(); ++c) {
            const Cluster& cl = clusters[c];
            const int x0 = std::max(0, static_cast<int>(std::floor(cl.pos.x - step_x)));
            const int x1 = std::min(nx - 1, static_cast<int>(std::ceil(cl.pos.x + step_x)));
            const int y0 = std::max(0, static_cast<int>(std::floor(cl.pos.y - step_y)));
            const int y1 = std::min(ny - 1, static_cast<int>(std::ceil(cl.pos.y + step_y)));
            const int z0 = flat ? 0 : std::max(0, static_cast<int>(std::floor(cl.pos.z - step_z)));
            const int z1 =
                flat ? 0 : std::min(nz - 1, static_cast<int>(std::ceil(cl.pos.z + step_z)));
            for (int z = z0; z <= z1; ++z) {
                const double dz = z - cl.pos.z;
                for (int y = y0; y <= y1; ++y) {
                    const double dy = y - cl.pos.y;
                    std::size_t row = volume.index(x0, y, z);
                    for (int x = x0; x <= x1; ++x, ++row) {
                        const double dx = x - cl.pos.x;
                        const double dc = volume.data[row] - cl.intensity;
                        const double d2 =
                            dc * dc + spatial_weight * (dx * dx + dy * dy + dz * dz);
                        if (d2 < best_dist[row]) {
                            best_dist[row] = d2;
                            assignment[row] = c;
                        }
                    }
                }
            }
        }

        // Coverage guard: spatially nearest center for any voxel missed by
        // every search window.
        for (std::size_t v = 0; v < n; ++v) {
            if (assignment[v] != kUnassigned) continue;
            const int x = static_cast<int>(v % nx);
            const int y = static_cast<int>((v / nx) % ny);
            const int z = static_cast<int>(v / (static_cast<std::size_t>(nx) * ny));
            double best = std::numeric_limits<double>::infinity();
            for (std::uint32_t c = 0; c < clusters.size(); ++c) {
                const double dx = x - clusters[c].pos.x;
                const double dy = y - clusters[c].pos.y;
                const double dz = z - clusters[c].pos.z;
                const double d2 = dx * dx + dy * dy + dz * dz;
                if (d2 < best) {
                    best = d2;
                    assignment[v] = c;
                }
            }
        }

        std::vector<Vec3> pos_sum(clusters.size());
        std::vector<double> int_sum(clusters.size(), 0.0);
        std::vector<std::uint64_t> counts(clusters.size(), 0);
        std::size_t idx = 0;
        for (int z = 0; z < nz; ++z)
            for (int y = 0; y < ny; ++y)
                for (int x = 0; x < nx; ++x, ++idx) {
                    const std::uint32_t c = assignment[idx];
                    pos_sum[c].x += x;
                    pos_sum[c].y += y;
                    pos_sum[c].z += z;
                    int_sum[c] += volume.data[idx];
                    ++counts[c];
                }
        for (std::uint32_t c = 0; c < clusters.size(); ++c) {
            if (counts[c] == 0) continue;  // keep previous center
            const double inv = 1.0 / counts[c];
            clusters[c].pos = inv * pos_sum[c];
            clusters[c].intensity = int_sum[c] * inv;
        }
    }

    enforce_connectivity(assignment, volume.dims, flat);

    SupervoxelPartition part;
    part.dims = volume.dims;
    part.spacing = volume.spacing;
    part.assignment = std::move(assignment);
    part.count = *std::max_element(part.assignment.begin(), part.assignment.end()) + 1;
    compute_stats(part);
    return part;
}

SupervoxelGraph build_graph(const SupervoxelPartition& partition, int k) {
    const std::uint32_t n = partition.count;
    if (n == 0) throw std::invalid_argument("empty partition");
    if (k < 1) throw std::invalid_argument("k must be positive");
    if (static_cast<std::uint32_t>(k) >= n)
        throw std::invalid_argument("k must be smaller than the supervoxel count");

    const auto& sp = partition.spacing;
    auto scaled = [&](const Vec3& c) { return Vec3{c.x * sp[0], c.y * sp[1], c.z * sp[2]}; };

    SupervoxelGraph g;
    g.k = k;
    g.neighbors.resize(n);
    g.transition.resize(n);

    std::vector<std::pair<double, std::uint32_t>> cand;
    for (std::uint32_t i = 0; i < n; ++i) {
        cand.clear();
        const Vec3 ci = scaled(partition.centers[i]);
        for (std::uint32_t j = 0; j < n; ++j) {
            if (j == i) continue;
            cand.emplace_back(norm(scaled(partition.centers[j]) - ci), j);
        }
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());

        auto& nb = g.neighbors[i];
        auto& tr = g.transition[i];
        nb.resize(static_cast<std::size_t>(k));
        tr.resize(static_cast<std::size_t>(k));
        double total = 0.0;
        for (int j = 0; j < k; ++j) {
            nb[static_cast<std::size_t>(j)] = cand[static_cast<std::size_t>(j)].second;
            const double w = 1.0 / std::max(cand[static_cast<std::size_t>(j)].first, 1e-6);
            tr[static_cast<std::size_t>(j)] = w;
            total += w;
        }
        for (double& w : tr) w /= total;
    }
    return g;
}

int default_neighbor_count(const SupervoxelPartition& partition) {
    const int nx = partition.dims[0], ny = partition.dims[1], nz = partition.dims[2];
    std::vector<std::vector<std::uint32_t>> adj(partition.count);
    auto note = [&](std::uint32_t a, std::uint32_t b) {
        if (a == b) return;
        adj[a].push_back(b);
        adj[b].push_back(a);
    };
    std::size_t idx = 0;
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x, ++idx) {
                if (x + 1 < nx) note(partition.assignment[idx], partition.assignment[idx + 1]);
                if (y + 1 < ny)
                    note(partition.assignment[idx], partition.assignment[idx + nx]);
                if (z + 1 < nz)
                    note(partition.assignment[idx],
                         partition.assignment[idx + static_cast<std::size_t>(nx) * ny]);
            }
    double total = 0.0;
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        total += static_cast<double>(a.size());
    }
    const int mean = static_cast<int>(std::lround(total / std::max<std::size_t>(partition.count, 1)));
    const int upper = std::max(1, static_cast<int>(partition.count) - 1);
    return std::clamp(std::clamp(mean, 7, 15), 1, upper);
}

void save_partition(const SupervoxelPartition& partition,
                    const std::filesystem::path& header_path) {
    const std::filesystem::path dir = header_path.parent_path();
    const std::string data_name = header_path.stem().string() + ".raw";

    std::ofstream out(dir / data_name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write partition raw file");
    std::vector<std::uint8_t> bytes(partition.assignment.size() * 4);
    for (std::size_t i = 0; i < partition.assignment.size(); ++i) {
        const std::uint32_t v = partition.assignment[i];
        bytes[i * 4 + 0] = static_cast<std::uint8_t>(v & 0xff);
        bytes[i * 4 + 1] = static_cast<std::uint8_t>((v >> 8) & 0xff);
        bytes[i * 4 + 2] = static_cast<std::uint8_t>((v >> 16) & 0xff);
        bytes[i * 4 + 3] = static_cast<std::uint8_t>((v >> 24) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("partition raw write failed");

    KeyValueFile kv;
    kv.set("dims", std::to_string(partition.dims[0]) + " " + std::to_string(partition.dims[1]) +
                       " " + std::to_string(partition.dims[2]));
    kv.set("spacing", format_double(partition.spacing[0]) + " " +
                          format_double(partition.spacing[1]) + " " +
                          format_double(partition.spacing[2]));
    kv.set("count", std::to_string(partition.count));
    kv.set("dtype", "u32");
    kv.set("data", data_name);
    kv.save(header_path);
}

SupervoxelPartition load_partition(const std::filesystem::path& header_path) {
    const KeyValueFile kv = KeyValueFile::load(header_path);
    SupervoxelPartition part;
    const auto dims = parse_ints(kv.get("dims"), 3);
    for (int a = 0; a < 3; ++a) part.dims[a] = static_cast<int>(dims[a]);
    const auto spacing = parse_doubles(kv.get_or("spacing", "1 1 1"), 3);
    for (int a = 0; a < 3; ++a) part.spacing[a] = spacing[a];
    part.count = static_cast<std::uint32_t>(parse_uint(kv.get("count")));
    if (kv.get("dtype") != "u32") throw std::runtime_error("partition dtype must be u32");

    const std::filesystem::path raw_path = header_path.parent_path() / kv.get("data");
    std::ifstream in(raw_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open partition raw file: " + raw_path.string());
    const std::size_t n = static_cast<std::size_t>(part.dims[0]) * part.dims[1] * part.dims[2];
    std::vector<std::uint8_t> bytes(n * 4);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!in || in.gcount() != static_cast<std::streamsize>(bytes.size()))
        throw std::runtime_error("partition raw byte length does not match dims");

    part.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t v = static_cast<std::uint32_t>(bytes[i * 4]) |
                                (static_cast<std::uint32_t>(bytes[i * 4 + 1]) << 8) |
                                (static_cast<std::uint32_t>(bytes[i * 4 + 2]) << 16) |
                                (static_cast<std::uint32_t>(bytes[i * 4 + 3]) << 24);
        if (v >= part.count) throw std::runtime_error("partition id outside [0, count)");
        part.assignment[i] = v;
    }
    compute_stats(part);
    return part;
}

}  // namespace voxal
