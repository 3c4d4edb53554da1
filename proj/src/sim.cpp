#include "boids/sim.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "boids/rng.hpp"
#include "boids/text_io.hpp"

namespace boids {

void validate_pre_topology(const SimConfig& cfg) {
    const auto fail = [](const std::string& key, const std::string& why) {
        throw std::invalid_argument("invalid " + key + ": " + why);
    };
    if (!(cfg.space_w > 0)) fail("space_w", "must be > 0");
    if (!(cfg.space_h > 0)) fail("space_h", "must be > 0");
    if (cfg.n < 1) fail("n", "must be >= 1");
    if (!(cfg.w_c >= 0)) fail("w_c", "must be >= 0");
    if (!(cfg.w_a >= 0)) fail("w_a", "must be >= 0");
    if (!(cfg.w_s >= 0)) fail("w_s", "must be >= 0");
    if (!(cfg.d_s > 0)) fail("d_s", "must be > 0");
    if (!(cfg.speed > 0)) fail("speed", "must be > 0");
    if (cfg.neighborhood.kind == NeighborhoodProvider::Kind::kVision) {
        if (!(cfg.neighborhood.vision_r > 0)) fail("vision_r", "must be > 0");
        if (!(cfg.neighborhood.vision_a > 0 && cfg.neighborhood.vision_a <= kTwoPi)) {
            fail("vision_a", "must be in (0, 2*pi]");
        }
    }
}

void validate(const SimConfig& cfg) {
    validate_pre_topology(cfg);
    if (cfg.neighborhood.kind == NeighborhoodProvider::Kind::kNetwork &&
        cfg.neighborhood.adjacency.node_count() != cfg.n) {
        throw std::invalid_argument(
            "invalid neighborhood.kind: network adjacency has " +
            std::to_string(cfg.neighborhood.adjacency.node_count()) +
            " nodes but n=" + std::to_string(cfg.n));
    }
}

std::string serialize_config(const SimConfig& cfg) {
    std::ostringstream out;
    out << "space_w = " << format_double(cfg.space_w) << '\n';
    out << "space_h = " << format_double(cfg.space_h) << '\n';
    out << "n = " << cfg.n << '\n';
    out << "w_c = " << format_double(cfg.w_c) << '\n';
    out << "w_a = " << format_double(cfg.w_a) << '\n';
    out << "w_s = " << format_double(cfg.w_s) << '\n';
    out << "d_s = " << format_double(cfg.d_s) << '\n';
    out << "speed = " << format_double(cfg.speed) << '\n';
    out << "neighborhood.kind = "
        << (cfg.neighborhood.kind == NeighborhoodProvider::Kind::kVision ? "vision" : "network")
        << '\n';
    out << "vision_r = " << format_double(cfg.neighborhood.vision_r) << '\n';
    out << "vision_a = " << format_double(cfg.neighborhood.vision_a) << '\n';
    out << "seed = " << cfg.seed << '\n';
    return out.str();
}

SimConfig parse_config(const std::string& text) {
    KeyValues kv = KeyValues::parse(text);
    SimConfig cfg = parse_config_keys(kv);
    kv.finish();
    validate_pre_topology(cfg);
    return cfg;
}

SimConfig parse_config_keys(KeyValues& kv) {
    SimConfig cfg;
    cfg.space_w = kv.take_double_or("space_w", cfg.space_w);
    cfg.space_h = kv.take_double_or("space_h", cfg.space_h);
    cfg.n = kv.take_int_or("n", cfg.n);
    cfg.w_c = kv.take_double_or("w_c", cfg.w_c);
    cfg.w_a = kv.take_double_or("w_a", cfg.w_a);
    cfg.w_s = kv.take_double_or("w_s", cfg.w_s);
    cfg.d_s = kv.take_double_or("d_s", cfg.d_s);
    cfg.speed = kv.take_double_or("speed", cfg.speed);
    const std::string kind = kv.take_or("neighborhood.kind", "vision");
    cfg.neighborhood.vision_r = kv.take_double_or("vision_r", cfg.neighborhood.vision_r);
    cfg.neighborhood.vision_a = kv.take_double_or("vision_a", cfg.neighborhood.vision_a);
    if (kind == "vision") {
        cfg.neighborhood.kind = NeighborhoodProvider::Kind::kVision;
    } else if (kind == "network") {
        cfg.neighborhood.kind = NeighborhoodProvider::Kind::kNetwork;
    } else {
        throw std::invalid_argument("invalid neighborhood.kind: expected vision or network, got '" +
                                    kind + "'");
    }
    cfg.seed = kv.take_uint_or("seed", cfg.seed);
    return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::uint64_t config_hash(const SimConfig& cfg) { return fnv1a(serialize_config(cfg)); }

SwarmState initial_state(const SimConfig& cfg) {
    Rng rng = Rng::stream(cfg.seed, "placement");
    SwarmState s;
    s.time = 0;
    s.resize(cfg.n);
    for (Eigen::Index i = 0; i < cfg.n; ++i) {
        s.x[i] = rng.uniform(0.0, cfg.space_w);
        s.y[i] = rng.uniform(0.0, cfg.space_h);
    }
    for (Eigen::Index i = 0; i < cfg.n; ++i) {
        const double heading = rng.uniform(0.0, kTwoPi);
        s.vx[i] = cfg.speed * std::cos(heading);
        s.vy[i] = cfg.speed * std::sin(heading);
    }
    return s;
}

namespace {

struct ForceSums {
    double count = 0;
    double pos_x = 0, pos_y = 0;  // rule-neighbor position sums
    double vel_x = 0, vel_y = 0;  // rule-neighbor velocity sums
    double off_x = 0, off_y = 0;  // close-neighbor offset sums
};

// Iterates j over `count` indices: either 0..count-1 directly (IdentityIds)
// or through a candidate index list.
struct IdentityIds {
    Eigen::Index operator[](Eigen::Index k) const { return k; }
};

// Branch-free pass for an angle-limited cone. The include decision
// multiplies into the sums as an exact 0/1 factor; a data-dependent cone
// branch would mispredict half the time in a dense swarm.
template <bool kCosNonneg, typename Ids>
ForceSums scan_cone(const SwarmState& s, Eigen::Index i, double r2, double ds2,
                    double cos2_scaled, Ids ids, Eigen::Index count) {
    ForceSums f;
    const double xi = s.x[i], yi = s.y[i], vxi = s.vx[i], vyi = s.vy[i];
    const double* x = s.x.data();
    const double* y = s.y.data();
    const double* vx = s.vx.data();
    const double* vy = s.vy.data();
    for (Eigen::Index k = 0; k < count; ++k) {
        const Eigen::Index j = ids[k];
        const double dx = x[j] - xi;
        const double dy = y[j] - yi;
        const double d2 = dx * dx + dy * dy;
        const double dot = vxi * dx + vyi * dy;
        const double rhs = cos2_scaled * d2;
        unsigned ok;
        if constexpr (kCosNonneg) {
            ok = (unsigned(dot >= 0.0) & unsigned(dot * dot >= rhs)) | unsigned(d2 <= 0.0);
        } else {
            ok = unsigned(dot >= 0.0) | unsigned(dot * dot <= rhs) | unsigned(d2 <= 0.0);
        }
        const unsigned keep = unsigned(d2 <= r2) & ok & unsigned(j != i);
        const double mr = static_cast<double>(keep);
        f.count += mr;
        f.pos_x += mr * x[j];
        f.pos_y += mr * y[j];
        f.vel_x += mr * vx[j];
        f.vel_y += mr * vy[j];
        const double mc = static_cast<double>(keep & unsigned(d2 < ds2));
        f.off_x += mc * dx;
        f.off_y += mc * dy;
    }
    return f;
}

// Full-circle vision: the radius test is the only filter and predicts well
// in both sparse and dense swarms, so a plain branchy pass is fastest.
template <typename Ids>
ForceSums scan_disc(const SwarmState& s, Eigen::Index i, double r2, double ds2, Ids ids,
                    Eigen::Index count) {
    ForceSums f;
    const double xi = s.x[i], yi = s.y[i];
    const double* x = s.x.data();
    const double* y = s.y.data();
    for (Eigen::Index k = 0; k < count; ++k) {
        const Eigen::Index j = ids[k];
        const double dx = x[j] - xi;
        const double dy = y[j] - yi;
        const double d2 = dx * dx + dy * dy;
        if (d2 > r2 || j == i) continue;
        f.count += 1.0;
        f.pos_x += x[j];
        f.pos_y += y[j];
        f.vel_x += s.vx[j];
        f.vel_y += s.vy[j];
        if (d2 < ds2) {
            f.off_x += dx;
            f.off_y += dy;
        }
    }
    return f;
}

void move_boid(const SwarmState& s, const SimConfig& cfg, Eigen::Index i,
               const Vec2<double>& cohesion, const Vec2<double>& alignment,
               const Vec2<double>& separation, SwarmState& out) {
    const Vec2<double> v_prev{s.vx[i], s.vy[i]};
    const Vec2<double> v_new = update_velocity(v_prev, cohesion, alignment, separation, cfg.w_c,
                                               cfg.w_a, cfg.w_s, cfg.speed);
    const auto moved =
        update_position(Vec2<double>{s.x[i], s.y[i]}, v_new, cfg.space_w, cfg.space_h);
    out.x[i] = moved.position.x();
    out.y[i] = moved.position.y();
    out.vx[i] = moved.velocity.x();
    out.vy[i] = moved.velocity.y();
}

void vision_forces_and_move(const SwarmState& s, const SimConfig& cfg, Eigen::Index i,
                            const ForceSums& f, SwarmState& out) {
    Vec2<double> cohesion = Vec2<double>::Zero();
    Vec2<double> alignment = Vec2<double>::Zero();
    if (f.count > 0) {
        cohesion = {f.pos_x / f.count - s.x[i], f.pos_y / f.count - s.y[i]};
        alignment = {f.vel_x / f.count - s.vx[i], f.vel_y / f.count - s.vy[i]};
    }
    const Vec2<double> separation{-f.off_x, -f.off_y};
    move_boid(s, cfg, i, cohesion, alignment, separation, out);
}

void step_vision(const SwarmState& s, const SimConfig& cfg, SwarmState& out) {
    const double r2 = cfg.neighborhood.vision_r * cfg.neighborhood.vision_r;
    const double ds2 = cfg.d_s * cfg.d_s;
    const Eigen::Index n = s.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const detail::ConeTest<double> cone(s, i, cfg.neighborhood.vision_a);
        const ForceSums f =
            cone.full_circle ? scan_disc(s, i, r2, ds2, IdentityIds{}, n)
            : cone.cos_nonneg
                ? scan_cone<true>(s, i, r2, ds2, cone.cos2_scaled, IdentityIds{}, n)
                : scan_cone<false>(s, i, r2, ds2, cone.cos2_scaled, IdentityIds{}, n);
        vision_forces_and_move(s, cfg, i, f, out);
    }
}

void step_network(const SwarmState& s, const SimConfig& cfg, StepScratch& scratch,
                  SwarmState& out) {
    const Eigen::Index n = s.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        gather_neighbors(cfg.neighborhood, s, i, cfg.d_s, scratch.nbr, scratch.rule,
                         scratch.close);
        const Vec2<double> cohesion = cohesion_velocity<double>(s, i, scratch.rule);
        const Vec2<double> alignment = alignment_velocity<double>(s, i, scratch.rule);
        const Vec2<double> separation = separation_velocity<double>(s, i, scratch.close);
        move_boid(s, cfg, i, cohesion, alignment, separation, out);
    }
}

}  // namespace

void step_into(const SwarmState& s, const SimConfig& cfg, StepScratch& scratch,
               SwarmState& out) {
    if (s.size() != cfg.n) {
        throw std::invalid_argument("step: state has " + std::to_string(s.size()) +
                                    " boids but config expects " + std::to_string(cfg.n));
    }
    if (cfg.neighborhood.kind == NeighborhoodProvider::Kind::kNetwork &&
        cfg.neighborhood.adjacency.node_count() != cfg.n) {
        throw std::invalid_argument("step: network adjacency node count mismatch");
    }
    out.resize(cfg.n);
    out.time = s.time + 1;
    if (cfg.neighborhood.kind == NeighborhoodProvider::Kind::kVision) {
        step_vision(s, cfg, out);
    } else {
        step_network(s, cfg, scratch, out);
    }
}

SwarmState step(const SwarmState& s, const SimConfig& cfg) {
    StepScratch scratch;
    SwarmState out;
    step_into(s, cfg, scratch, out);
    return out;
}

CandidateSet::CandidateSet(const SwarmState& start, double radius) : radius_(radius) {
    const Eigen::Index n = start.size();
    const double r2 = radius * radius;
    offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    ids_.reserve(static_cast<std::size_t>(4) * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double xi = start.x[i], yi = start.y[i];
        for (Eigen::Index j = 0; j < n; ++j) {
            const double dx = start.x[j] - xi;
            const double dy = start.y[j] - yi;
            if (j != i && dx * dx + dy * dy <= r2) ids_.push_back(j);
        }
        offsets_[i + 1] = static_cast<Eigen::Index>(ids_.size());
    }
}

void step_into_candidates(const SwarmState& s, const SimConfig& cfg, const CandidateSet& cands,
                          SwarmState& out) {
    if (cfg.neighborhood.kind != NeighborhoodProvider::Kind::kVision) {
        throw std::invalid_argument("step_into_candidates: vision neighborhoods only");
    }
    if (s.size() != cfg.n || cands.size() != cfg.n) {
        throw std::invalid_argument("step_into_candidates: size mismatch");
    }
    out.resize(cfg.n);
    out.time = s.time + 1;
    const double r2 = cfg.neighborhood.vision_r * cfg.neighborhood.vision_r;
    const double ds2 = cfg.d_s * cfg.d_s;
    for (Eigen::Index i = 0; i < cfg.n; ++i) {
        const auto ids = cands.candidates(i);
        const auto count = static_cast<Eigen::Index>(ids.size());
        const detail::ConeTest<double> cone(s, i, cfg.neighborhood.vision_a);
        const ForceSums f =
            cone.full_circle ? scan_disc(s, i, r2, ds2, ids.data(), count)
            : cone.cos_nonneg
                ? scan_cone<true>(s, i, r2, ds2, cone.cos2_scaled, ids.data(), count)
                : scan_cone<false>(s, i, r2, ds2, cone.cos2_scaled, ids.data(), count);
        vision_forces_and_move(s, cfg, i, f, out);
    }
}

Trajectory run(const SimConfig& cfg, std::int64_t steps) {
    if (steps < 1) throw std::invalid_argument("run: steps must be >= 1");
    Trajectory traj;
    traj.reserve(static_cast<std::size_t>(steps) + 1);
    traj.push_back(initial_state(cfg));
    StepScratch scratch;
    for (std::int64_t t = 0; t < steps; ++t) {
        traj.emplace_back();
        step_into(traj[static_cast<std::size_t>(t)], cfg, scratch, traj.back());
    }
    return traj;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          std::uint64_t seed, std::uint64_t cfg_hash) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# seed=" << seed << '\n';
    out << "# config_hash=" << cfg_hash << '\n';
    out << "step,id,x,y,vx,vy\n";
    std::string line;
    for (const SwarmState& s : traj) {
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            line.clear();
            line += std::to_string(s.time);
            line += ',';
            line += std::to_string(i);
            line += ',';
            line += format_double(s.x[i]);
            line += ',';
            line += format_double(s.y[i]);
            line += ',';
            line += format_double(s.vx[i]);
            line += ',';
            line += format_double(s.vy[i]);
            line += '\n';
            out << line;
        }
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace boids
