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

#include <cstdint>
#include <vector>

#include "voxal/supervoxel.hpp"
#include "voxal/vec3.hpp"

namespace voxal {

/// Plane orientation from two angles: u(phi) = (cos phi, sin phi, 0) and
/// v(gamma) = (0, cos gamma, sin gamma) span the plane, `normal` is their
/// normalized cross product. (phi, gamma) near (pi/2, 0) or (pi/2, pi) make
/// u and v collinear; plane_basis throws there.
struct PlaneBasis {
    Vec3 u;
    Vec3 v;
    Vec3 normal;
};

PlaneBasis plane_basis(double phi, double gamma);

/// A selected plane patch: the supervoxels a virtual slicing plane through
/// `origin` picks up within radius r, plus the angles and the uncertainty
/// mass they carry.
struct PlaneQuery {
    std::uint32_t origin = 0;
    double phi = 0.0;
    double gamma = 0.0;
    double score = 0.0;
    std::vector<std::uint32_t> members;
};

/// Search effort counters, comparable across the exhaustive and the
/// branch-and-bound search: `evaluations` counts scored candidate planes,
/// `nodes_expanded` counts boxes popped by branch and bound.
struct PlaneSearchStats {
    std::uint64_t evaluations = 0;
    std::uint64_t nodes_expanded = 0;
};

/// Supervoxels j with ||c_j - c_i|| <= r and |n . (c_j - c_i)| <= rho_j,
/// ascending ids; the origin is always a member.
std::vector<std::uint32_t> patch_members(const SupervoxelPartition& partition,
                                         std::uint32_t origin, const PlaneBasis& basis,
                                         double r);

/// Total uncertainty carried by a patch.
double patch_score(const std::vector<std::uint32_t>& members,
                   const std::vector<double>& uncertainty);

/// Reference maximizer: scores the uniform (grid_steps-1)^2 lattice
/// a*pi/grid_steps over the open square (0,pi)^2 and keeps the first maximum
/// in row-major (phi, gamma) order. For power-of-two grid_steps the lattice
/// contains every box center best_plane_bnb can evaluate, so at matched
/// resolution the two agree exactly. Requires grid_steps >= 2.
PlaneQuery best_plane_exhaustive(const SupervoxelPartition& partition, std::uint32_t origin,
                                 const std::vector<double>& uncertainty, double r,
                                 int grid_steps, PlaneSearchStats* stats = nullptr);

/// Branch-and-bound maximizer over the same objective. Boxes whose interval
/// bound cannot beat the incumbent are pruned; boxes smaller than
/// angle_tolerance on both sides are not split further and instead have
/// their half-step corner/edge sublattice scored alongside the center, so
/// the returned score matches best_plane_exhaustive at matched resolution
/// exactly. Uncertainty values must be nonnegative for the bound to be
/// sound.
PlaneQuery best_plane_bnb(const SupervoxelPartition& partition, std::uint32_t origin,
                          const std::vector<double>& uncertainty, double r,
                          double angle_tolerance, PlaneSearchStats* stats = nullptr);

/// Angular resolution matched to the geometry: roughly the angle a mean
/// supervoxel radius subtends across the patch diameter.
double default_angle_tolerance(const SupervoxelPartition& partition, double r);

/// Full selection step for patch strategies: takes the t most uncertain
/// unlabeled supervoxels as candidate origins and returns the best plane
/// among them. Single-slice data degenerates to the origin plus its four
/// nearest centers. Throws std::invalid_argument when nothing is unlabeled.
PlaneQuery select_query_plane(const SupervoxelPartition& partition,
                              const std::vector<double>& uncertainty,
                              const std::vector<std::uint8_t>& labeled_mask, int t, double r,
                              double angle_tolerance = 0.0,
                              PlaneSearchStats* stats = nullptr);

namespace detail {
/// Lower bound of |n(phi,gamma) . d| / ||n|| over the angle box; exposed for
/// bound-soundness tests.
double plane_distance_lower_bound(double phi_lo, double phi_hi, double gamma_lo,
                                  double gamma_hi, const Vec3& d);
}  // namespace detail

}  // namespace voxal
