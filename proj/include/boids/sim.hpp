#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "boids/forces.hpp"
#include "boids/neighborhood.hpp"
#include "boids/state.hpp"

namespace boids {

// All behavioral and environmental parameters of one swarm. Defaults are the
// classic vision-based setup.
struct SimConfig {
    double space_w = 1000.0;
    double space_h = 1000.0;
    Eigen::Index n = 100;
    double w_c = 0.01;   // cohesion weight
    double w_a = 0.125;  // alignment weight
    double w_s = 1.0;    // separation weight
    double d_s = 10.0;   // safe distance
    double speed = 1.0;  // constant cruise speed, units per step
    NeighborhoodProvider neighborhood;
    std::uint64_t seed = 1;
};

// Throws std::invalid_argument naming the offending key.
void validate(const SimConfig& cfg);

// Same checks minus the adjacency wiring, for configs whose network graph is
// attached later.
void validate_pre_topology(const SimConfig& cfg);

// Flat key-value round trip. Keys: space_w, space_h, n, w_c, w_a, w_s, d_s,
// speed, neighborhood.kind, vision_r, vision_a, seed. A network adjacency is
// not part of this file; it travels as a separate edge list.
std::string serialize_config(const SimConfig& cfg);
SimConfig parse_config(const std::string& text);
SimConfig parse_config_keys(class KeyValues& kv);  // shared with scenario files
SimConfig load_config(const std::filesystem::path& path);

// FNV-1a over the canonical serialized form; stamped into artifacts.
std::uint64_t config_hash(const SimConfig& cfg);

// Reusable buffers for step(); one per simulation (or per thread).
struct StepScratch {
    NeighborScratch nbr;
    std::vector<Eigen::Index> rule;
    std::vector<Eigen::Index> close;
};

// Uniform random positions in the box and uniform random headings at cruise
// speed, drawn from the "placement" stream of cfg.seed. Draw order (all
// positions for boids 0..n-1, then all headings) is part of the determinism
// contract.
SwarmState initial_state(const SimConfig& cfg);

// Synchronous update: every force is computed from the input state, then all
// boids move together. Throws std::invalid_argument on a size mismatch
// between state and config.
void step_into(const SwarmState& s, const SimConfig& cfg, StepScratch& scratch,
               SwarmState& out);
SwarmState step(const SwarmState& s, const SimConfig& cfg);

// Per-boid candidate supersets for short replays from a fixed start state.
// Candidates of i are all j within `radius` of i at the start; a replay of at
// most `steps_covered(radius, interaction_r, speed)` steps can never bring a
// non-candidate within interaction range, so scanning candidates only is
// exact. Cuts the quadratic scan down to the local neighborhood when the
// start state is spread out.
class CandidateSet {
public:
    CandidateSet() = default;
    CandidateSet(const SwarmState& start, double radius);

    std::span<const Eigen::Index> candidates(Eigen::Index i) const {
        return {ids_.data() + offsets_[i], ids_.data() + offsets_[i + 1]};
    }
    Eigen::Index size() const { return offsets_.empty() ? 0 : static_cast<Eigen::Index>(offsets_.size()) - 1; }
    double radius() const { return radius_; }

    static double required_radius(double interaction_r, double speed, std::int64_t steps) {
        return interaction_r + 2.0 * speed * static_cast<double>(steps);
    }

private:
    double radius_ = 0;
    std::vector<Eigen::Index> offsets_;
    std::vector<Eigen::Index> ids_;
};

// step_into restricted to a vision neighborhood and precomputed candidates.
// The caller guarantees the candidate set covers every boid that can come
// within vision or separation range during the replay.
void step_into_candidates(const SwarmState& s, const SimConfig& cfg, const CandidateSet& cands,
                          SwarmState& out);

// Full seeded run: steps+1 states, state 0 is the initial placement.
// Bit-identical output for identical (cfg, steps).
Trajectory run(const SimConfig& cfg, std::int64_t steps);

// CSV with columns step,id,x,y,vx,vy plus provenance comment headers.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          std::uint64_t seed, std::uint64_t cfg_hash);

}  // namespace boids
