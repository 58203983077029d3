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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "voxal/volume.hpp"

namespace fs = std::filesystem;
using namespace voxal;

namespace {

Volume uniform_volume(int nx, int ny, int nz, float value = 0.5f) {
    Volume v;
    v.dims = {nx, ny, nz};
    v.data.assign(static_cast<std::size_t>(v.voxel_count()), value);
    return v;
}

// Counts the 6-connected components restricted to one supervoxel id.
int component_count(const SupervoxelPartition& part, std::uint32_t id) {
    const int nx = part.dims[0], ny = part.dims[1], nz = part.dims[2];
    std::vector<std::uint8_t> seen(part.assignment.size(), 0);
    std::vector<std::size_t> stack;
    int components = 0;
    for (std::size_t start = 0; start < part.assignment.size(); ++start) {
        if (seen[start] || part.assignment[start] != id) continue;
        ++components;
        stack.assign(1, start);
        seen[start] = 1;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            const int x = static_cast<int>(v % nx);
            const int y = static_cast<int>((v / nx) % ny);
            const int z = static_cast<int>(v / (static_cast<std::size_t>(nx) * ny));
            auto visit = [&](int xx, int yy, int zz) {
                const std::size_t w = part.voxel_index(xx, yy, zz);
                if (!seen[w] && part.assignment[w] == id) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            };
            if (x > 0) visit(x - 1, y, z);
            if (x + 1 < nx) visit(x + 1, y, z);
            if (y > 0) visit(x, y - 1, z);
            if (y + 1 < ny) visit(x, y + 1, z);
            if (z > 0) visit(x, y, z - 1);
            if (z + 1 < nz) visit(x, y, z + 1);
        }
    }
    return components;
}

SupervoxelPartition line_partition(const std::vector<double>& xs) {
    // Single-voxel supervoxels along the x axis at the given coordinates;
    // only the fields build_graph consumes are meaningful.
    SupervoxelPartition part;
    part.dims = {static_cast<int>(xs.size()), 1, 1};
    part.count = static_cast<std::uint32_t>(xs.size());
    part.assignment.resize(xs.size());
    std::iota(part.assignment.begin(), part.assignment.end(), 0u);
    for (double x : xs) {
        part.centers.push_back({x, 0.0, 0.0});
        part.radii.push_back(0.5);
        part.sizes.push_back(1);
    }
    return part;
}

}  // namespace

TEST_CASE("uniform cube with target two splits into equal halves along x") {
    const Volume vol = uniform_volume(8, 8, 8);
    const SupervoxelPartition part = slic_oversegment(vol, 2, 0.2);

    REQUIRE(part.count == 2);
    CHECK(part.sizes[0] == 256);
    CHECK(part.sizes[1] == 256);
    for (int z = 0; z < 8; ++z)
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) {
                const std::uint32_t expected = x < 4 ? 0 : 1;
                CHECK(part.assignment[part.voxel_index(x, y, z)] == expected);
            }
    CHECK(part.centers[0].x == doctest::Approx(1.5));
    CHECK(part.centers[1].x == doctest::Approx(5.5));
    CHECK(part.centers[0].y == doctest::Approx(3.5));
    const double expected_radius = std::cbrt(3.0 * 256.0 / (4.0 * M_PI));
    CHECK(part.radii[0] == doctest::Approx(expected_radius));
}

TEST_CASE("low compactness respects a sharp intensity step") {
    Volume vol = uniform_volume(16, 16, 16, 0.0f);
    for (int z = 0; z < 16; ++z)
        for (int y = 0; y < 16; ++y)
            for (int x = 8; x < 16; ++x) vol.at(x, y, z) = 1.0f;

    const SupervoxelPartition part = slic_oversegment(vol, 8, 0.1);
    // No supervoxel may straddle the step: each id sees one intensity.
    std::vector<int> side(part.count, -1);
    for (std::size_t v = 0; v < part.assignment.size(); ++v) {
        const int s = vol.data[v] > 0.5f ? 1 : 0;
        auto& assigned = side[part.assignment[v]];
        if (assigned < 0)
            assigned = s;
        else
            CHECK(assigned == s);
    }
}

TEST_CASE("partition invariants hold on a noisy phantom") {
    SyntheticConfig cfg;
    cfg.dims = {24, 24, 24};
    cfg.blob_count = 3;
    cfg.blob_radius_min = 4.0;
    cfg.blob_radius_max = 6.0;
    cfg.rng_seed = 5;
    const auto [vol, lab] = generate_synthetic(cfg);

    const SupervoxelPartition part = slic_oversegment(vol, 64, 0.2);

    CHECK(part.count > 0);
    CHECK(part.assignment.size() == vol.data.size());
    CHECK(part.sizes.size() == part.count);
    CHECK(part.centers.size() == part.count);
    CHECK(part.radii.size() == part.count);

    // Contiguous ids, every supervoxel non-empty, sizes partition the volume.
    std::uint64_t total = 0;
    for (std::uint32_t i = 0; i < part.count; ++i) {
        CHECK(part.sizes[i] > 0);
        total += part.sizes[i];
        CHECK(part.radii[i] == doctest::Approx(std::cbrt(3.0 * part.sizes[i] / (4.0 * M_PI))));
    }
    CHECK(total == vol.data.size());

    // Each supervoxel is 6-connected.
    for (std::uint32_t i = 0; i < part.count; ++i) CHECK(component_count(part, i) == 1);

    // Around the requested granularity (connectivity merges may shrink it).
    CHECK(part.count >= 32);
    CHECK(part.count <= 96);

    SUBCASE("oversegmentation is deterministic") {
        const SupervoxelPartition again = slic_oversegment(vol, 64, 0.2);
        CHECK(again.assignment == part.assignment);
        CHECK(again.count == part.count);
    }

    SUBCASE("partition round-trips through save and load") {
        const fs::path dir = fs::temp_directory_path() / "voxal_test_partition";
        fs::remove_all(dir);
        fs::create_directories(dir);
        save_partition(part, dir / "part.dat");
        const SupervoxelPartition back = load_partition(dir / "part.dat");
        CHECK(back.assignment == part.assignment);
        CHECK(back.count == part.count);
        CHECK(back.dims == part.dims);
        for (std::uint32_t i = 0; i < part.count; ++i) {
            CHECK(back.sizes[i] == part.sizes[i]);
            CHECK(back.centers[i].x == doctest::Approx(part.centers[i].x));
            CHECK(back.radii[i] == doctest::Approx(part.radii[i]));
        }
    }
}

TEST_CASE("2D slice uses the disc radius formula") {
    const Volume vol = uniform_volume(16, 16, 1);
    const SupervoxelPartition part = slic_oversegment(vol, 4, 0.2);
    REQUIRE(part.count == 4);
    for (std::uint32_t i = 0; i < part.count; ++i) {
        CHECK(part.sizes[i] == 64);
        CHECK(part.radii[i] == doctest::Approx(std::sqrt(64.0 / M_PI)));
    }
}

TEST_CASE("oversegmentation rejects invalid parameters") {
    const Volume vol = uniform_volume(8, 8, 8);
    CHECK_THROWS_AS(slic_oversegment(vol, 0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(slic_oversegment(vol, 513, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(slic_oversegment(vol, 8, 0.0), std::invalid_argument);
}

TEST_CASE("transition weights are inverse-distance normalized") {
    // Three centers on a line: distances from node 0 are 1 and 3, so its
    // transition row must be (0.75, 0.25).
    const SupervoxelPartition part = line_partition({0.0, 1.0, 3.0});
    const SupervoxelGraph g = build_graph(part, 2);

    REQUIRE(g.neighbors[0].size() == 2);
    CHECK(g.neighbors[0][0] == 1);
    CHECK(g.neighbors[0][1] == 2);
    CHECK(g.transition[0][0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(g.transition[0][1] == doctest::Approx(0.25).epsilon(1e-12));

    // Middle node: distances 1 (to node 0) and 2 (to node 2).
    CHECK(g.transition[1][0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(g.transition[1][1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("graph rows sum to one and neighbor lists are ordered") {
    SyntheticConfig cfg;
    cfg.dims = {20, 20, 20};
    cfg.blob_count = 2;
    cfg.blob_radius_min = 3.0;
    cfg.blob_radius_max = 5.0;
    cfg.rng_seed = 11;
    const auto [vol, lab] = generate_synthetic(cfg);
    const SupervoxelPartition part = slic_oversegment(vol, 40, 0.2);
    const SupervoxelGraph g = build_graph(part, 6);

    REQUIRE(g.neighbors.size() == part.count);
    for (std::uint32_t i = 0; i < part.count; ++i) {
        REQUIRE(g.neighbors[i].size() == 6);
        double sum = 0.0;
        for (double w : g.transition[i]) {
            CHECK(w > 0.0);
            sum += w;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
        // Ascending distance; ties broken toward the lower id.
        auto dist = [&](std::uint32_t j) { return norm(part.centers[j] - part.centers[i]); };
        for (std::size_t a = 1; a < g.neighbors[i].size(); ++a) {
            const double da = dist(g.neighbors[i][a - 1]);
            const double db = dist(g.neighbors[i][a]);
            CHECK(da <= db + 1e-12);
            if (std::abs(da - db) <= 1e-12) CHECK(g.neighbors[i][a - 1] < g.neighbors[i][a]);
        }
        for (std::uint32_t j : g.neighbors[i]) CHECK(j != i);
    }
}

TEST_CASE("ties in center distance resolve toward the lower id") {
    const SupervoxelPartition part = line_partition({0.0, -2.0, 2.0, 5.0});
    const SupervoxelGraph g = build_graph(part, 2);
    // Node 0 sees ids 1 and 2 both at distance 2; both are kept, id 1 first.
    CHECK(g.neighbors[0] == std::vector<std::uint32_t>{1, 2});
    CHECK(g.transition[0][0] == doctest::Approx(0.5));
}

TEST_CASE("graph construction validates k") {
    const SupervoxelPartition part = line_partition({0.0, 1.0, 3.0});
    CHECK_THROWS_AS(build_graph(part, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_graph(part, 3), std::invalid_argument);
    CHECK_NOTHROW(build_graph(part, 2));
}

TEST_CASE("default neighbor count clamps to its documented bounds") {
    // Coarse partition: each half has one face neighbor, clamp floor is
    // count - 1 = 1.
    const Volume coarse = uniform_volume(8, 8, 8);
    const SupervoxelPartition two = slic_oversegment(coarse, 2, 0.2);
    CHECK(default_neighbor_count(two) == 1);

    // 4x4x4 grid of supervoxels: mean face-adjacency is below 7, so the
    // lower clamp applies.
    const Volume fine = uniform_volume(16, 16, 16);
    const SupervoxelPartition grid = slic_oversegment(fine, 64, 0.2);
    REQUIRE(grid.count == 64);
    CHECK(default_neighbor_count(grid) == 7);
}
