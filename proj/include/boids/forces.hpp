#pragma once

#include <Eigen/Core>

#include <cmath>
#include <span>

#include "boids/state.hpp"

namespace boids {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
Vec2<Scalar> normalized_or_zero(const Vec2<Scalar>& v) {
    const Scalar n = v.norm();
    return n > Scalar(0) ? Vec2<Scalar>(v / n) : Vec2<Scalar>::Zero();
}

// Pull towards the neighbors' center of mass. Zero when there are no
// neighbors, which preserves the previous heading downstream.
template <typename Scalar>
Vec2<Scalar> cohesion_velocity(const SwarmStateT<Scalar>& s, Eigen::Index i,
                               std::span<const Eigen::Index> neighbors) {
    if (neighbors.empty()) return Vec2<Scalar>::Zero();
    Scalar sx = 0, sy = 0;
    for (const Eigen::Index j : neighbors) {
        sx += s.x[j];
        sy += s.y[j];
    }
    const auto k = static_cast<Scalar>(neighbors.size());
    return {sx / k - s.x[i], sy / k - s.y[i]};
}

// Match the neighbors' average heading. Zero when there are no neighbors.
template <typename Scalar>
Vec2<Scalar> alignment_velocity(const SwarmStateT<Scalar>& s, Eigen::Index i,
                                std::span<const Eigen::Index> neighbors) {
    if (neighbors.empty()) return Vec2<Scalar>::Zero();
    Scalar sx = 0, sy = 0;
    for (const Eigen::Index j : neighbors) {
        sx += s.vx[j];
        sy += s.vy[j];
    }
    const auto k = static_cast<Scalar>(neighbors.size());
    return {sx / k - s.vx[i], sy / k - s.vy[i]};
}

// Steer away from every boid closer than the safe distance: minus the sum of
// offsets to them. `close` holds exactly those boids, self excluded.
template <typename Scalar>
Vec2<Scalar> separation_velocity(const SwarmStateT<Scalar>& s, Eigen::Index i,
                                 std::span<const Eigen::Index> close) {
    Scalar sx = 0, sy = 0;
    for (const Eigen::Index j : close) {
        sx += s.x[i] - s.x[j];
        sy += s.y[i] - s.y[j];
    }
    return {sx, sy};
}

// New velocity: previous velocity plus the weighted unit force vectors, then
// rescaled back to the constant cruise speed. Zero forces stay zero rather
// than being normalized. If the weighted sum cancels to exactly zero the
// previous velocity is kept, so a boid never stalls.
template <typename Scalar>
Vec2<Scalar> update_velocity(const Vec2<Scalar>& v_prev, const Vec2<Scalar>& cohesion,
                             const Vec2<Scalar>& alignment, const Vec2<Scalar>& separation,
                             Scalar w_c, Scalar w_a, Scalar w_s, Scalar speed) {
    const Vec2<Scalar> sum = v_prev + w_c * normalized_or_zero(cohesion) +
                             w_a * normalized_or_zero(alignment) +
                             w_s * normalized_or_zero(separation);
    const Scalar n = sum.norm();
    if (n == Scalar(0)) return v_prev;
    return sum * (speed / n);
}

// Mirror one coordinate back into [0, bound], flipping the matching velocity
// component. Repeats until inside, so a move larger than the box still lands
// in bounds.
template <typename Scalar>
void reflect_axis(Scalar& p, Scalar& v, Scalar bound) {
    while (p < Scalar(0) || p > bound) {
        if (p < Scalar(0)) {
            p = -p;
        } else {
            p = Scalar(2) * bound - p;
        }
        v = -v;
    }
}

template <typename Scalar>
struct PositionUpdate {
    Vec2<Scalar> position;
    Vec2<Scalar> velocity;
};

// Advance one step and reflect at the walls. Both axes may reflect in the
// same step. Reflection negates components only, so speed is preserved.
template <typename Scalar>
PositionUpdate<Scalar> update_position(const Vec2<Scalar>& p, const Vec2<Scalar>& v_new,
                                       Scalar space_w, Scalar space_h) {
    PositionUpdate<Scalar> out{p + v_new, v_new};
    reflect_axis(out.position.x(), out.velocity.x(), space_w);
    reflect_axis(out.position.y(), out.velocity.y(), space_h);
    return out;
}

}  // namespace boids
