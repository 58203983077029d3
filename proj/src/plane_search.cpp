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

#include "voxal/plane_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace voxal {

namespace {

constexpr double kDegenerateNormSq = 1e-6;
constexpr double kScoreMargin = 1e-12;

// Closed-interval arithmetic specialized for angles in [0, pi].
struct Iv {
    double lo;
    double hi;
};

Iv iv_add(Iv a, Iv b) { return {a.lo + b.lo, a.hi + b.hi}; }
Iv iv_sub(Iv a, Iv b) { return {a.lo - b.hi, a.hi - b.lo}; }

Iv iv_mul(Iv a, Iv b) {
    const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return {std::min(std::min(p1, p2), std::min(p3, p4)),
            std::max(std::max(p1, p2), std::max(p3, p4))};
}

Iv iv_scale(double c, Iv a) { return c >= 0.0 ? Iv{c * a.lo, c * a.hi} : Iv{c * a.hi, c * a.lo}; }

Iv iv_abs(Iv a) {
    if (a.lo >= 0.0) return a;
    if (a.hi <= 0.0) return {-a.hi, -a.lo};
    return {0.0, std::max(-a.lo, a.hi)};
}

Iv iv_square(Iv a) {
    const Iv m = iv_abs(a);
    return {m.lo * m.lo, m.hi * m.hi};
}

// sin is unimodal on [0, pi] with its maximum at pi/2.
Iv sin_iv(Iv t) {
    const double sa = std::sin(t.lo), sb = std::sin(t.hi);
    const double hi = (t.lo <= M_PI_2 && M_PI_2 <= t.hi) ? 1.0 : std::max(sa, sb);
    return {std::min(sa, sb), hi};
}

// cos is decreasing on [0, pi].
Iv cos_iv(Iv t) { return {std::cos(t.hi), std::cos(t.lo)}; }

Vec3 unnormalized_normal(double phi, double gamma) {
    // u(phi) x v(gamma) for u = (cos phi, sin phi, 0), v = (0, cos gamma,
    // sin gamma).
    return {std::sin(phi) * std::sin(gamma), -std::cos(phi) * std::sin(gamma),
            std::cos(phi) * std::cos(gamma)};
}

struct Candidate {
    Vec3 d;              // center offset from the origin supervoxel
    double rho;          // membership slack of the candidate
    double weight;       // its uncertainty contribution
    std::uint32_t id;
};

// Score of the plane through the origin at (phi, gamma) over the
// ball-filtered candidate set; negative when the orientation is degenerate.
double score_at(const std::vector<Candidate>& candidates, double phi, double gamma) {
    const Vec3 n = unnormalized_normal(phi, gamma);
    const double norm_sq = dot(n, n);
    if (norm_sq <= kDegenerateNormSq) return -1.0;
    const double inv_norm = 1.0 / std::sqrt(norm_sq);
    double score = 0.0;
    for (const Candidate& c : candidates)
        if (std::abs(dot(n, c.d)) * inv_norm <= c.rho) score += c.weight;
    return score;
}

std::vector<Candidate> ball_candidates(const SupervoxelPartition& partition,
                                       std::uint32_t origin,
                                       const std::vector<double>& uncertainty, double r) {
    std::vector<Candidate> out;
    const Vec3 ci = partition.centers[origin];
    for (std::uint32_t j = 0; j < partition.count; ++j) {
        const Vec3 d = partition.centers[j] - ci;
        if (norm(d) <= r)
            out.push_back({d, partition.radii[j], uncertainty[j], j});
    }
    return out;
}

void validate_plane_inputs(const SupervoxelPartition& partition, std::uint32_t origin,
                           const std::vector<double>& uncertainty, double r,
                           bool require_nonnegative) {
    if (origin >= partition.count) throw std::invalid_argument("origin id out of range");
    if (uncertainty.size() != partition.count)
        throw std::invalid_argument("uncertainty length does not match partition");
    if (r < 0.0) throw std::invalid_argument("patch radius must be nonnegative");
    if (require_nonnegative)
        for (double u : uncertainty)
            if (u < 0.0)
                throw std::invalid_argument("branch-and-bound requires nonnegative uncertainty");
}

}  // namespace

namespace detail {

double plane_distance_lower_bound(double phi_lo, double phi_hi, double gamma_lo,
                                  double gamma_hi, const Vec3& d) {
    const Iv sp = sin_iv({phi_lo, phi_hi});
    const Iv cp = cos_iv({phi_lo, phi_hi});
    const Iv sg = sin_iv({gamma_lo, gamma_hi});
    const Iv cg = cos_iv({gamma_lo, gamma_hi});

    const Iv in_plane = iv_sub(iv_scale(d.x, sp), iv_scale(d.y, cp));
    const Iv numerator = iv_add(iv_mul(sg, in_plane), iv_scale(d.z, iv_mul(cp, cg)));
    const Iv norm_sq = iv_add(iv_square(sg), iv_mul(iv_square(cp), iv_square(cg)));

    if (norm_sq.hi <= 0.0) return std::numeric_limits<double>::infinity();
    // A hair of slack keeps the bound sound against rounding in the interval
    // endpoints themselves.
    return std::max(0.0, iv_abs(numerator).lo / std::sqrt(norm_sq.hi) - 1e-12);
}

}  // namespace detail

PlaneBasis plane_basis(double phi, double gamma) {
    if (phi < 0.0 || phi > M_PI || gamma < 0.0 || gamma > M_PI)
        throw std::invalid_argument("plane angles must lie in [0, pi]");
    PlaneBasis b;
    b.u = {std::cos(phi), std::sin(phi), 0.0};
    b.v = {0.0, std::cos(gamma), std::sin(gamma)};
    const Vec3 n = cross(b.u, b.v);
    const double norm_sq = dot(n, n);
    if (norm_sq <= kDegenerateNormSq)
        throw std::invalid_argument("degenerate plane orientation: u and v are collinear");
    b.normal = (1.0 / std::sqrt(norm_sq)) * n;
    return b;
}

std::vector<std::uint32_t> patch_members(const SupervoxelPartition& partition,
                                         std::uint32_t origin, const PlaneBasis& basis,
                                         double r) {
    if (origin >= partition.count) throw std::invalid_argument("origin id out of range");
    if (r < 0.0) throw std::invalid_argument("patch radius must be nonnegative");
    std::vector<std::uint32_t> members;
    const Vec3 ci = partition.centers[origin];
    for (std::uint32_t j = 0; j < partition.count; ++j) {
        const Vec3 d = partition.centers[j] - ci;
        if (norm(d) <= r && std::abs(dot(basis.normal, d)) <= partition.radii[j])
            members.push_back(j);
    }
    return members;
}

double patch_score(const std::vector<std::uint32_t>& members,
                   const std::vector<double>& uncertainty) {
    double score = 0.0;
    for (std::uint32_t j : members) {
        if (j >= uncertainty.size()) throw std::invalid_argument("member id out of range");
        score += uncertainty[j];
    }
    return score;
}

PlaneQuery best_plane_exhaustive(const SupervoxelPartition& partition, std::uint32_t origin,
                                 const std::vector<double>& uncertainty, double r,
                                 int grid_steps, PlaneSearchStats* stats) {
    validate_plane_inputs(partition, origin, uncertainty, r, false);
    if (grid_steps < 2) throw std::invalid_argument("grid_steps must be at least 2");

    const std::vector<Candidate> candidates = ball_candidates(partition, origin, uncertainty, r);

    PlaneQuery best;
    best.origin = origin;
    best.score = -std::numeric_limits<double>::infinity();
    // Uniform lattice a*pi/steps over the open square (0, pi)^2.  For
    // power-of-two steps this contains every dyadic box center the
    // branch-and-bound search can evaluate (those are odd multiples of
    // pi/2^k, never 0 or pi), so at matched resolution the two maximizers
    // agree exactly rather than up to plateau sampling luck.
    for (int a = 1; a < grid_steps; ++a) {
        const double phi = a * M_PI / grid_steps;
        for (int b = 1; b < grid_steps; ++b) {
            const double gamma = b * M_PI / grid_steps;
            if (stats) ++stats->evaluations;
            const double s = score_at(candidates, phi, gamma);
            if (s < 0.0) continue;  // degenerate orientation
            if (s > best.score) {
                best.score = s;
                best.phi = phi;
                best.gamma = gamma;
            }
        }
    }
    if (!std::isfinite(best.score))
        throw std::runtime_error("no non-degenerate plane on the search grid");
    best.members = patch_members(partition, origin, plane_basis(best.phi, best.gamma), r);
    return best;
}

PlaneQuery best_plane_bnb(const SupervoxelPartition& partition, std::uint32_t origin,
                          const std::vector<double>& uncertainty, double r,
                          double angle_tolerance, PlaneSearchStats* stats) {
    validate_plane_inputs(partition, origin, uncertainty, r, true);
    if (!(angle_tolerance > 0.0))
        throw std::invalid_argument("angle_tolerance must be positive");

    const std::vector<Candidate> candidates = ball_candidates(partition, origin, uncertainty, r);

    auto box_bound = [&](double plo, double phi, double glo, double ghi) {
        double bound = 0.0;
        for (const Candidate& c : candidates)
            if (detail::plane_distance_lower_bound(plo, phi, glo, ghi, c.d) <= c.rho)
                bound += c.weight;
        return bound;
    };

    struct Box {
        double phi_lo, phi_hi, gamma_lo, gamma_hi;
        double bound;
        std::uint64_t seq;
    };
    struct Worse {
        bool operator()(const Box& a, const Box& b) const {
            if (a.bound != b.bound) return a.bound < b.bound;
            return a.seq > b.seq;  // FIFO among equal bounds
        }
    };
    std::priority_queue<Box, std::vector<Box>, Worse> queue;
    std::uint64_t seq = 0;
    queue.push({0.0, M_PI, 0.0, M_PI, box_bound(0.0, M_PI, 0.0, M_PI), seq++});

    PlaneQuery best;
    best.origin = origin;
    best.score = -1.0;

    while (!queue.empty()) {
        const Box box = queue.top();
        queue.pop();
        if (box.bound <= best.score + kScoreMargin) break;
        if (stats) ++stats->nodes_expanded;

        const double phi_c = 0.5 * (box.phi_lo + box.phi_hi);
        const double gamma_c = 0.5 * (box.gamma_lo + box.gamma_hi);
        if (stats) ++stats->evaluations;
        const double s = score_at(candidates, phi_c, gamma_c);
        if (s > best.score) {
            best.score = s;
            best.phi = phi_c;
            best.gamma = gamma_c;
        }

        const double d_phi = box.phi_hi - box.phi_lo;
        const double d_gamma = box.gamma_hi - box.gamma_lo;
        // The relative slack absorbs rounding accumulated by the iterated
        // midpoint halvings: a width that is mathematically equal to the
        // tolerance can land an ulp above it and would otherwise trigger a
        // spurious extra refinement level.
        if (std::max(d_phi, d_gamma) <= angle_tolerance * (1.0 + 1e-9)) {
            // Terminal box: sweep its half-step sublattice (corners and edge
            // midpoints; the center was scored above) so every
            // matched-resolution lattice point inside a surviving box is
            // scored, not just the center.  Plateaus thinner than a terminal
            // box can peak off-center, and the uniform reference grid would
            // otherwise find maxima this search never samples.  Boundary
            // orientations with phi or gamma in {0, pi} stay excluded to
            // match the open-square reference grid.
            const double phis[3] = {box.phi_lo, phi_c, box.phi_hi};
            const double gammas[3] = {box.gamma_lo, gamma_c, box.gamma_hi};
            for (double phi : phis) {
                if (phi <= 0.0 || phi >= M_PI) continue;
                for (double gamma : gammas) {
                    if (gamma <= 0.0 || gamma >= M_PI) continue;
                    if (phi == phi_c && gamma == gamma_c) continue;
                    if (stats) ++stats->evaluations;
                    const double sc = score_at(candidates, phi, gamma);
                    if (sc > best.score) {
                        best.score = sc;
                        best.phi = phi;
                        best.gamma = gamma;
                    }
                }
            }
            continue;
        }

        Box halves[2];
        if (d_phi >= d_gamma) {
            halves[0] = {box.phi_lo, phi_c, box.gamma_lo, box.gamma_hi, 0.0, 0};
            halves[1] = {phi_c, box.phi_hi, box.gamma_lo, box.gamma_hi, 0.0, 0};
        } else {
            halves[0] = {box.phi_lo, box.phi_hi, box.gamma_lo, gamma_c, 0.0, 0};
            halves[1] = {box.phi_lo, box.phi_hi, gamma_c, box.gamma_hi, 0.0, 0};
        }
        for (Box& h : halves) {
            h.bound = box_bound(h.phi_lo, h.phi_hi, h.gamma_lo, h.gamma_hi);
            if (h.bound > best.score + kScoreMargin) {
                h.seq = seq++;
                queue.push(h);
            }
        }
    }

    if (best.score < 0.0) throw std::runtime_error("branch and bound found no plane");
    best.members = patch_members(partition, origin, plane_basis(best.phi, best.gamma), r);
    return best;
}

double default_angle_tolerance(const SupervoxelPartition& partition, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("patch radius must be positive");
    if (partition.count == 0) throw std::invalid_argument("empty partition");
    double mean_radius = 0.0;
    for (double rho : partition.radii) mean_radius += rho;
    mean_radius /= static_cast<double>(partition.count);
    return 2.0 * std::atan(mean_radius / (2.0 * r));
}

PlaneQuery select_query_plane(const SupervoxelPartition& partition,
                              const std::vector<double>& uncertainty,
                              const std::vector<std::uint8_t>& labeled_mask, int t, double r,
                              double angle_tolerance, PlaneSearchStats* stats) {
    if (uncertainty.size() != partition.count || labeled_mask.size() != partition.count)
        throw std::invalid_argument("field length does not match partition");
    if (t < 1) throw std::invalid_argument("candidate count t must be positive");
    if (!(r > 0.0)) throw std::invalid_argument("patch radius must be positive");

    std::vector<std::uint32_t> unlabeled;
    for (std::uint32_t i = 0; i < partition.count; ++i)
        if (!labeled_mask[i]) unlabeled.push_back(i);
    if (unlabeled.empty()) throw std::invalid_argument("no unlabeled supervoxels left");

    std::sort(unlabeled.begin(), unlabeled.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (uncertainty[a] != uncertainty[b]) return uncertainty[a] > uncertainty[b];
        return a < b;
    });
    const std::size_t n_candidates = std::min<std::size_t>(unlabeled.size(),
                                                           static_cast<std::size_t>(t));

    PlaneQuery best;
    bool have_best = false;

    if (partition.is_2d()) {
        for (std::size_t c = 0; c < n_candidates; ++c) {
            const std::uint32_t origin = unlabeled[c];
            // Origin plus its four nearest centers, ties toward lower ids.
            std::vector<std::pair<double, std::uint32_t>> near;
            for (std::uint32_t j = 0; j < partition.count; ++j) {
                if (j == origin) continue;
                near.emplace_back(norm(partition.centers[j] - partition.centers[origin]), j);
            }
            const std::size_t keep = std::min<std::size_t>(near.size(), 4);
            std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(keep),
                              near.end());
            PlaneQuery q;
            q.origin = origin;
            q.phi = M_PI_2;
            q.gamma = M_PI_2;
            q.members.push_back(origin);
            for (std::size_t j = 0; j < keep; ++j) q.members.push_back(near[j].second);
            std::sort(q.members.begin(), q.members.end());
            q.score = patch_score(q.members, uncertainty);
            if (stats) ++stats->evaluations;
            if (!have_best || q.score > best.score) {
                best = std::move(q);
                have_best = true;
            }
        }
        return best;
    }

    const double tol =
        angle_tolerance > 0.0 ? angle_tolerance : default_angle_tolerance(partition, r);
    for (std::size_t c = 0; c < n_candidates; ++c) {
        PlaneQuery q = best_plane_bnb(partition, unlabeled[c], uncertainty, r, tol, stats);
        if (!have_best || q.score > best.score) {
            best = std::move(q);
            have_best = true;
        }
    }
    return best;
}

}  // namespace voxal
