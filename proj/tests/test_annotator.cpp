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

#include "voxal/annotator.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "voxal/volume.hpp"

using namespace voxal;

namespace {

// Two supervoxels splitting an 8x8x8 cube along x.
SupervoxelPartition half_partition() {
    Volume vol;
    vol.dims = {8, 8, 8};
    vol.data.assign(512, 0.5f);
    return slic_oversegment(vol, 2, 0.2);
}

LabelVolume truth_with_fg(const SupervoxelPartition& part, std::uint32_t fg_in_sv0) {
    LabelVolume gt;
    gt.dims = part.dims;
    gt.labels.assign(part.assignment.size(), 0);
    std::uint32_t placed = 0;
    for (std::size_t v = 0; v < part.assignment.size() && placed < fg_in_sv0; ++v)
        if (part.assignment[v] == 0) {
            gt.labels[v] = 1;
            ++placed;
        }
    return gt;
}

}  // namespace

TEST_CASE("label store tracks labels, seeds are free") {
    LabelStore store(5);
    CHECK(store.labeled_count() == 0);
    CHECK(store.effort_spent() == 0);
    CHECK_FALSE(store.is_labeled(2));
    CHECK_THROWS_AS(store.label(2), std::invalid_argument);

    store.seed(2, 1);
    store.seed(0, -1);
    CHECK(store.labeled_count() == 2);
    CHECK(store.effort_spent() == 0);
    CHECK(store.label(2) == 1);
    CHECK(store.label(0) == -1);
    CHECK_THROWS_AS(store.seed(2, -1), std::invalid_argument);
    CHECK_THROWS_AS(store.seed(9, 1), std::invalid_argument);
    CHECK_THROWS_AS(store.seed(3, 0), std::invalid_argument);
    CHECK_THROWS_AS(LabelStore(0), std::invalid_argument);
}

TEST_CASE("majority vote follows the ground truth, ties count as foreground") {
    const SupervoxelPartition part = half_partition();
    REQUIRE(part.count == 2);
    REQUIRE(part.sizes[0] == 256);

    SUBCASE("clear majorities") {
        const LabelVolume gt = truth_with_fg(part, 200);
        CHECK(majority_label(gt, part, 0) == 1);
        CHECK(majority_label(gt, part, 1) == -1);
        CHECK(majority_labels(gt, part) == std::vector<int>{1, -1});
    }
    SUBCASE("exact tie is foreground") {
        const LabelVolume gt = truth_with_fg(part, 128);
        CHECK(majority_label(gt, part, 0) == 1);
    }
    SUBCASE("one voxel below the tie is background") {
        const LabelVolume gt = truth_with_fg(part, 127);
        CHECK(majority_label(gt, part, 0) == -1);
    }
}

TEST_CASE("single queries cost one effort unit and reject relabeling") {
    LabelStore store(4);
    const std::vector<int> sv_labels{1, -1, 1, -1};

    label_supervoxel(store, 0, sv_labels);
    CHECK(store.effort_spent() == 1);
    CHECK(store.single_queries() == 1);
    CHECK(store.label(0) == 1);
    CHECK_THROWS_AS(label_supervoxel(store, 0, sv_labels), std::invalid_argument);
    CHECK_THROWS_AS(label_supervoxel(store, 9, sv_labels), std::invalid_argument);

    label_supervoxel(store, 1, sv_labels);
    CHECK(store.effort_spent() == 2);
    CHECK(store.single_queries() == 2);
    CHECK(store.patch_queries() == 0);
}

TEST_CASE("patch queries cost two effort units regardless of size") {
    LabelStore store(6);
    const std::vector<int> sv_labels{1, -1, 1, -1, 1, -1};

    SUBCASE("all members fresh") {
        const int fresh = label_patch(store, {0, 1, 2, 3}, sv_labels);
        CHECK(fresh == 4);
        CHECK(store.effort_spent() == 2);
        CHECK(store.patch_queries() == 1);
        CHECK(store.labeled_count() == 4);
    }
    SUBCASE("already labeled members are skipped but the flat cost stays") {
        store.seed(1, -1);
        const int fresh = label_patch(store, {0, 1, 2}, sv_labels);
        CHECK(fresh == 2);
        CHECK(store.effort_spent() == 2);
        CHECK(store.label(1) == -1);
    }
    SUBCASE("a tiny patch still costs two") {
        label_patch(store, {5}, sv_labels);
        CHECK(store.effort_spent() == 2);
    }
    SUBCASE("empty patches are rejected") {
        CHECK_THROWS_AS(label_patch(store, {}, sv_labels), std::invalid_argument);
    }
}

TEST_CASE("mixed query sequences keep the effort ledger consistent") {
    LabelStore store(10);
    const std::vector<int> sv_labels(10, 1);

    store.seed(9, 1);
    label_supervoxel(store, 0, sv_labels);
    label_patch(store, {1, 2, 3}, sv_labels);
    label_supervoxel(store, 4, sv_labels);
    label_patch(store, {5, 3}, sv_labels);

    CHECK(store.single_queries() == 2);
    CHECK(store.patch_queries() == 2);
    CHECK(store.effort_spent() == 2 * 1 + 2 * 2);
    CHECK(store.labeled_count() == 7);
}
