#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace boids {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Positions and velocities of the whole swarm at one time step, stored
// column-wise so per-boid scans vectorize. Row i is boid i; ids are the row
// indices and never change over a run.
template <typename Scalar>
struct SwarmStateT {
    using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

    std::int64_t time = 0;
    Array x, y;    // positions, inside [0, space_w] x [0, space_h]
    Array vx, vy;  // velocities; |v| equals the configured speed

    Eigen::Index size() const { return x.size(); }

    void resize(Eigen::Index n) {
        x.resize(n);
        y.resize(n);
        vx.resize(n);
        vy.resize(n);
    }
};

using SwarmState = SwarmStateT<double>;

// One state per step; element t is the state at time t.
template <typename Scalar>
using TrajectoryT = std::vector<SwarmStateT<Scalar>>;

using Trajectory = TrajectoryT<double>;

}  // namespace boids
