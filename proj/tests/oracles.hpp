#pragma once

#include <cmath>
#include <vector>

#include "boids/state.hpp"

// Brute-force reference implementations used by both the unit suite and the
// acceptance gates. Deliberately simple and independent of the library's
// scan kernels.

inline std::vector<Eigen::Index> radius_scan_oracle(const boids::SwarmState& s, Eigen::Index i,
                                                    double r) {
    std::vector<Eigen::Index> out;
    for (Eigen::Index j = 0; j < s.size(); ++j) {
        const double dx = s.x[j] - s.x[i];
        const double dy = s.y[j] - s.y[i];
        if (j != i && std::sqrt(dx * dx + dy * dy) <= r) out.push_back(j);
    }
    return out;
}

inline Eigen::Index bfs_components_oracle(const boids::SwarmState& s, double attraction_range) {
    const Eigen::Index n = s.size();
    const double t2 = (attraction_range / 2.0) * (attraction_range / 2.0);
    std::vector<bool> visited(static_cast<std::size_t>(n), false);
    Eigen::Index components = 0;
    for (Eigen::Index start = 0; start < n; ++start) {
        if (visited[start]) continue;
        ++components;
        std::vector<Eigen::Index> queue{start};
        visited[start] = true;
        while (!queue.empty()) {
            const Eigen::Index u = queue.back();
            queue.pop_back();
            for (Eigen::Index v = 0; v < n; ++v) {
                if (visited[v]) continue;
                const double dx = s.x[v] - s.x[u];
                const double dy = s.y[v] - s.y[u];
                if (dx * dx + dy * dy < t2) {
                    visited[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    return components;
}
