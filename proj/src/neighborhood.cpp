#include "boids/neighborhood.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "boids/rng.hpp"
#include "boids/text_io.hpp"

namespace boids {

Adjacency::Adjacency(Eigen::Index n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 0) throw std::invalid_argument("adjacency: negative node count");
    for (auto& [a, b] : edges_) {
        if (a == b) {
            throw std::invalid_argument("adjacency: self-loop at node " + std::to_string(a));
        }
        if (a < 0 || b < 0 || a >= n_ || b >= n_) {
            throw std::invalid_argument("adjacency: edge endpoint out of range (" +
                                        std::to_string(a) + ", " + std::to_string(b) + ")");
        }
        if (a > b) std::swap(a, b);
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
        throw std::invalid_argument("adjacency: duplicate edge");
    }

    offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (const auto& [a, b] : edges_) {
        ++offsets_[a + 1];
        ++offsets_[b + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    flat_.resize(static_cast<std::size_t>(2) * edges_.size());
    std::vector<Eigen::Index> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [a, b] : edges_) {
        flat_[cursor[a]++] = b;
        flat_[cursor[b]++] = a;
    }
    for (Eigen::Index i = 0; i < n_; ++i) {
        std::sort(flat_.begin() + offsets_[i], flat_.begin() + offsets_[i + 1]);
    }
}

Eigen::Index Adjacency::component_count() const {
    std::vector<Eigen::Index> parent(n_);
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    const auto find = [&](Eigen::Index v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    Eigen::Index components = n_;
    for (const auto& [a, b] : edges_) {
        const Eigen::Index ra = find(a), rb = find(b);
        if (ra != rb) {
            parent[ra] = rb;
            --components;
        }
    }
    return components;
}

Adjacency erdos_renyi(Eigen::Index n, Eigen::Index m_edges, std::uint64_t seed) {
    if (n < 0 || m_edges < 0 || m_edges > n * (n - 1) / 2) {
        throw std::invalid_argument("erdos_renyi: need 0 <= m_edges <= n(n-1)/2, got n=" +
                                    std::to_string(n) + " m_edges=" + std::to_string(m_edges));
    }
    Rng rng(seed);
    std::set<Adjacency::Edge> edges;
    while (static_cast<Eigen::Index>(edges.size()) < m_edges) {
        auto a = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        auto b = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        edges.emplace(a, b);
    }
    return Adjacency(n, {edges.begin(), edges.end()});
}

Adjacency watts_strogatz(Eigen::Index n, Eigen::Index k, double p_rewire, std::uint64_t seed) {
    if (k < 0 || k % 2 != 0 || k >= n) {
        throw std::invalid_argument("watts_strogatz: k must be even and in [0, n), got k=" +
                                    std::to_string(k) + " n=" + std::to_string(n));
    }
    if (p_rewire < 0.0 || p_rewire > 1.0) {
        throw std::invalid_argument("watts_strogatz: p_rewire must be in [0, 1]");
    }
    Rng rng(seed);
    std::vector<std::vector<Eigen::Index>> adj(static_cast<std::size_t>(n));
    const auto connected = [&](Eigen::Index a, Eigen::Index b) {
        return std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end();
    };
    const auto link = [&](Eigen::Index a, Eigen::Index b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    };
    const auto unlink = [&](Eigen::Index a, Eigen::Index b) {
        adj[a].erase(std::find(adj[a].begin(), adj[a].end(), b));
        adj[b].erase(std::find(adj[b].begin(), adj[b].end(), a));
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 1; j <= k / 2; ++j) link(i, (i + j) % n);
    }
    // Rewire the far endpoint of each lattice edge with probability p,
    // keeping the near endpoint, so every node retains at least k/2 edges.
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 1; j <= k / 2; ++j) {
            if (rng.uniform() >= p_rewire) continue;
            if (static_cast<Eigen::Index>(adj[i].size()) >= n - 1) continue;  // saturated
            const Eigen::Index old_target = (i + j) % n;
            Eigen::Index fresh;
            do {
                fresh = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
            } while (fresh == i || connected(i, fresh));
            unlink(i, old_target);
            link(i, fresh);
        }
    }
    std::vector<Adjacency::Edge> edges;
    edges.reserve(static_cast<std::size_t>(n) * k / 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (const Eigen::Index j : adj[i]) {
            if (i < j) edges.emplace_back(i, j);
        }
    }
    return Adjacency(n, std::move(edges));
}

Adjacency barabasi_albert(Eigen::Index n, Eigen::Index m0, Eigen::Index m_per_node,
                          std::uint64_t seed) {
    if (m_per_node < 1 || m_per_node > m0 || m0 > n || (m0 < 2 && n > m0)) {
        throw std::invalid_argument(
            "barabasi_albert: need 1 <= m_per_node <= m0 <= n (m0 >= 2 to grow), got n=" +
            std::to_string(n) + " m0=" + std::to_string(m0) +
            " m_per_node=" + std::to_string(m_per_node));
    }
    Rng rng(seed);
    std::vector<Adjacency::Edge> edges;
    std::vector<Eigen::Index> endpoints;  // each node repeated once per incident edge
    for (Eigen::Index a = 0; a < m0; ++a) {
        for (Eigen::Index b = a + 1; b < m0; ++b) {
            edges.emplace_back(a, b);
            endpoints.push_back(a);
            endpoints.push_back(b);
        }
    }
    std::vector<Eigen::Index> chosen;
    for (Eigen::Index v = m0; v < n; ++v) {
        chosen.clear();
        while (static_cast<Eigen::Index>(chosen.size()) < m_per_node) {
            const Eigen::Index target =
                endpoints[rng.below(static_cast<std::uint64_t>(endpoints.size()))];
            if (std::find(chosen.begin(), chosen.end(), target) == chosen.end()) {
                chosen.push_back(target);
            }
        }
        for (const Eigen::Index target : chosen) {
            edges.emplace_back(target, v);
            endpoints.push_back(target);
            endpoints.push_back(v);
        }
    }
    return Adjacency(n, std::move(edges));
}

void save_adjacency(const std::filesystem::path& path, const Adjacency& adj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "n=" << adj.node_count() << '\n';
    for (const auto& [a, b] : adj.edges()) out << a << ' ' << b << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

Adjacency load_adjacency(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument(path.string() + ": empty file");
    const auto header = trim(line);
    if (!header.starts_with("n=")) {
        throw std::invalid_argument(path.string() + ": expected header 'n=<count>', got '" +
                                    std::string(header) + "'");
    }
    const Eigen::Index n = parse_int(header.substr(2), "node count");
    std::vector<Adjacency::Edge> edges;
    while (std::getline(in, line)) {
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto space = body.find(' ');
        if (space == std::string_view::npos) {
            throw std::invalid_argument(path.string() + ": expected 'i j', got '" +
                                        std::string(body) + "'");
        }
        edges.emplace_back(parse_int(trim(body.substr(0, space)), "edge endpoint"),
                           parse_int(trim(body.substr(space + 1)), "edge endpoint"));
    }
    return Adjacency(n, std::move(edges));
}

void gather_neighbors(const NeighborhoodProvider& p, const SwarmState& s, Eigen::Index i,
                      double d_s, NeighborScratch& scratch, std::vector<Eigen::Index>& rule,
                      std::vector<Eigen::Index>& close) {
    rule.clear();
    close.clear();
    detail::scan_offsets(s, i, scratch);
    const double ds2 = d_s * d_s;
    const Eigen::Index n = s.size();
    if (p.kind == NeighborhoodProvider::Kind::kVision) {
        const double r2 = p.vision_r * p.vision_r;
        const detail::ConeTest<double> cone(s, i, p.vision_a);
        if (!cone.full_circle) scratch.dot = s.vx[i] * scratch.dx + s.vy[i] * scratch.dy;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i || scratch.d2[j] > r2) continue;
            if (!cone.full_circle && !cone.includes(scratch.d2[j], scratch.dot[j])) continue;
            rule.push_back(j);
            if (scratch.d2[j] < ds2) close.push_back(j);
        }
    } else {
        const auto adj = p.adjacency.neighbors(i);
        rule.assign(adj.begin(), adj.end());
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i && scratch.d2[j] < ds2) close.push_back(j);
        }
    }
}

std::vector<Eigen::Index> separation_neighbors(const NeighborhoodProvider& p,
                                               const SwarmState& s, Eigen::Index i, double d_s) {
    NeighborScratch scratch;
    std::vector<Eigen::Index> rule, close;
    gather_neighbors(p, s, i, d_s, scratch, rule, close);
    return close;
}

}  // namespace boids
