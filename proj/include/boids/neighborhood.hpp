#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "boids/state.hpp"

namespace boids {

// Simple undirected graph, immutable once built. Construction validates the
// simple-graph invariants (no self-loops, no duplicate edges, endpoints in
// range) and throws std::invalid_argument on violation.
class Adjacency {
public:
    using Edge = std::pair<Eigen::Index, Eigen::Index>;

    Adjacency() = default;
    Adjacency(Eigen::Index n, std::vector<Edge> edges);

    Eigen::Index node_count() const { return n_; }
    Eigen::Index edge_count() const { return static_cast<Eigen::Index>(edges_.size()); }

    // Canonical edge list: each pair (i, j) has i < j, sorted lexicographically.
    const std::vector<Edge>& edges() const { return edges_; }

    // One-hop neighbors of i, ascending.
    std::span<const Eigen::Index> neighbors(Eigen::Index i) const {
        return {flat_.data() + offsets_[i], flat_.data() + offsets_[i + 1]};
    }

    Eigen::Index degree(Eigen::Index i) const { return offsets_[i + 1] - offsets_[i]; }

    Eigen::Index component_count() const;

private:
    Eigen::Index n_ = 0;
    std::vector<Edge> edges_;
    std::vector<Eigen::Index> offsets_;
    std::vector<Eigen::Index> flat_;
};

// Uniform random simple graph with exactly m_edges edges (fixed-edge-count
// model). Deterministic per seed.
Adjacency erdos_renyi(Eigen::Index n, Eigen::Index m_edges, std::uint64_t seed);

// Ring lattice with k/2 neighbors per side, each edge rewired (one endpoint
// moved) with probability p_rewire. Edge count stays n*k/2. k must be even
// and less than n.
Adjacency watts_strogatz(Eigen::Index n, Eigen::Index k, double p_rewire, std::uint64_t seed);

// Preferential attachment starting from a complete graph on m0 nodes; each
// new node attaches m_per_node edges to distinct existing nodes with
// probability proportional to degree. Connected by construction.
Adjacency barabasi_albert(Eigen::Index n, Eigen::Index m0, Eigen::Index m_per_node,
                          std::uint64_t seed);

// Edge-list persistence: header line "n=<count>", then one "i j" pair per
// line. Loading re-validates the simple-graph invariants.
void save_adjacency(const std::filesystem::path& path, const Adjacency& adj);
Adjacency load_adjacency(const std::filesystem::path& path);

// Per-boid scratch for neighbor scans. Reused across boids and steps so the
// hot loop stays allocation-free.
template <typename Scalar>
struct NeighborScratchT {
    using Array = typename SwarmStateT<Scalar>::Array;
    Array dx, dy;  // offsets from boid i
    Array d2;      // squared distances from boid i
    Array dot;     // heading-offset dot products (cone tests only)
};

using NeighborScratch = NeighborScratchT<double>;

namespace detail {

template <typename Scalar>
void scan_offsets(const SwarmStateT<Scalar>& s, Eigen::Index i,
                  NeighborScratchT<Scalar>& scratch) {
    scratch.dx = s.x - s.x[i];
    scratch.dy = s.y - s.y[i];
    scratch.d2 = scratch.dx.square() + scratch.dy.square();
}

// Angle test "angle(v_i, offset) <= vision_a / 2" rewritten without square
// roots: compare the signed dot product against cos(vision_a/2)^2 * |v|^2 *
// |offset|^2, splitting on the sign of the cosine.
template <typename Scalar>
struct ConeTest {
    bool full_circle;
    bool cos_nonneg;
    Scalar cos2_scaled;  // cos(vision_a/2)^2 * |v_i|^2

    ConeTest(const SwarmStateT<Scalar>& s, Eigen::Index i, Scalar vision_a) {
        const Scalar vnorm2 = s.vx[i] * s.vx[i] + s.vy[i] * s.vy[i];
        const Scalar cos_half = std::cos(vision_a / Scalar(2));
        // A zero heading leaves the cone direction undefined; see the whole disc.
        full_circle = vision_a >= Scalar(kTwoPi) || vnorm2 <= Scalar(0);
        cos_nonneg = cos_half >= Scalar(0);
        cos2_scaled = cos_half * cos_half * vnorm2;
    }

    bool includes(Scalar d2, Scalar dot) const {
        if (full_circle || d2 <= Scalar(0)) return true;
        const Scalar rhs = cos2_scaled * d2;
        if (cos_nonneg) return dot >= Scalar(0) && dot * dot >= rhs;
        return dot >= Scalar(0) || dot * dot <= rhs;
    }
};

}  // namespace detail

// Vision test for boid j seen from boid i: within vision_r (inclusive) and,
// unless the field of view is the full circle, within vision_a/2 of the
// heading. Coincident boids are always visible. A boid with zero velocity
// has no defined heading and sees the whole disc.
template <typename Scalar>
void vision_neighbors_into(const SwarmStateT<Scalar>& s, Eigen::Index i, Scalar vision_r,
                           Scalar vision_a, NeighborScratchT<Scalar>& scratch,
                           std::vector<Eigen::Index>& out) {
    out.clear();
    detail::scan_offsets(s, i, scratch);
    const Scalar r2 = vision_r * vision_r;
    const detail::ConeTest<Scalar> cone(s, i, vision_a);
    if (!cone.full_circle) scratch.dot = s.vx[i] * scratch.dx + s.vy[i] * scratch.dy;
    const Eigen::Index n = s.size();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i || scratch.d2[j] > r2) continue;
        if (!cone.full_circle && !cone.includes(scratch.d2[j], scratch.dot[j])) continue;
        out.push_back(j);
    }
}

template <typename Scalar>
std::vector<Eigen::Index> vision_neighbors(const SwarmStateT<Scalar>& s, Eigen::Index i,
                                           Scalar vision_r, Scalar vision_a) {
    NeighborScratchT<Scalar> scratch;
    std::vector<Eigen::Index> out;
    vision_neighbors_into(s, i, vision_r, vision_a, scratch, out);
    return out;
}

inline std::span<const Eigen::Index> network_neighbors(const Adjacency& adj, Eigen::Index i) {
    return adj.neighbors(i);
}

// Neighborhood rule used by a swarm: either classic vision or one-hop graph
// connectivity.
struct NeighborhoodProvider {
    enum class Kind { kVision, kNetwork };

    Kind kind = Kind::kVision;
    double vision_r = 50.0;
    double vision_a = kTwoPi;
    Adjacency adjacency;  // network mode only

    static NeighborhoodProvider vision(double r, double a) {
        NeighborhoodProvider p;
        p.kind = Kind::kVision;
        p.vision_r = r;
        p.vision_a = a;
        return p;
    }

    static NeighborhoodProvider network(Adjacency adj) {
        NeighborhoodProvider p;
        p.kind = Kind::kNetwork;
        p.adjacency = std::move(adj);
        return p;
    }
};

// Fills both neighbor sets of boid i in one distance pass over the swarm:
//   rule  - the boids feeding cohesion and alignment,
//   close - the boids inside the safe distance that feed separation.
// Vision mode restricts `close` to the vision cone; network mode scans the
// whole population for collision avoidance regardless of connectivity, so
// disconnected boids still repel each other.
void gather_neighbors(const NeighborhoodProvider& p, const SwarmState& s, Eigen::Index i,
                      double d_s, NeighborScratch& scratch, std::vector<Eigen::Index>& rule,
                      std::vector<Eigen::Index>& close);

std::vector<Eigen::Index> separation_neighbors(const NeighborhoodProvider& p,
                                               const SwarmState& s, Eigen::Index i, double d_s);

}  // namespace boids
