#include "boids/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "boids/text_io.hpp"

namespace boids {

using nlohmann::json;

double Genome::gene(int j) const {
    switch (j) {
        case 0: return w_c;
        case 1: return w_a;
        case 2: return w_s;
        case 3: return d_s;
        case 4: return vision_r;
        case 5: return vision_a;
        default: throw std::out_of_range("Genome::gene: index " + std::to_string(j));
    }
}

void Genome::set_gene(int j, double value) {
    switch (j) {
        case 0: w_c = value; return;
        case 1: w_a = value; return;
        case 2: w_s = value; return;
        case 3: d_s = value; return;
        case 4: vision_r = value; return;
        case 5: vision_a = value; return;
        default: throw std::out_of_range("Genome::set_gene: index " + std::to_string(j));
    }
}

const GeneBounds& genome_init_bounds() {
    static const GeneBounds bounds{
        {0.0, 0.0, 0.0, 0.0, 10.0, kTwoPi / 4.0},
        {1.0, 1.0, 1.0, 1.0, 150.0, kTwoPi},
    };
    return bounds;
}

const GeneBounds& genome_clamp_bounds() {
    static const GeneBounds bounds{
        {0.0, 0.0, 0.0, 0.0, 10.0, kTwoPi / 4.0},
        {1.0, 1.0, 1.0, 20.0, 150.0, kTwoPi},
    };
    return bounds;
}

Genome clamp_genome(Genome g) {
    const GeneBounds& b = genome_clamp_bounds();
    for (int j = 0; j < Genome::kGeneCount; ++j) {
        g.set_gene(j, std::clamp(g.gene(j), b.lo[j], b.hi[j]));
    }
    return g;
}

Genome random_genome(Rng& rng) {
    const GeneBounds& b = genome_init_bounds();
    Genome g;
    for (int j = 0; j < Genome::kGeneCount; ++j) {
        g.set_gene(j, rng.uniform(b.lo[j], b.hi[j]));
    }
    return g;
}

void validate(const DEConfig& de) {
    if (de.pop_size < 4) {
        throw std::invalid_argument("invalid de.pop_size: need >= 4 for mutation");
    }
    if (de.generations < 0) throw std::invalid_argument("invalid de.generations: negative");
    if (!(de.weight_f >= 0.0 && de.weight_f <= 2.0)) {
        throw std::invalid_argument("invalid de.f: must be in [0, 2]");
    }
    if (!(de.cross_rate >= 0.0 && de.cross_rate <= 1.0)) {
        throw std::invalid_argument("invalid de.cr: must be in [0, 1]");
    }
}

Observation observe(const Trajectory& traj, std::int64_t t0, int window) {
    if (window < 2) throw std::invalid_argument("observe: window must be >= 2");
    if (t0 < 0 || t0 + window > static_cast<std::int64_t>(traj.size())) {
        throw std::invalid_argument("observe: window [" + std::to_string(t0) + ", " +
                                    std::to_string(t0 + window) +
                                    ") outside trajectory of length " +
                                    std::to_string(traj.size()));
    }
    Observation obs;
    obs.t0 = t0;
    obs.pos_x.reserve(window);
    obs.pos_y.reserve(window);
    for (int k = 0; k < window; ++k) {
        const SwarmState& s = traj[static_cast<std::size_t>(t0 + k)];
        obs.pos_x.push_back(s.x);
        obs.pos_y.push_back(s.y);
    }
    const SwarmState& first = traj[static_cast<std::size_t>(t0)];
    obs.vx0 = first.vx;
    obs.vy0 = first.vy;
    return obs;
}

Genome de_mutate(const Genome& r1, const Genome& r2, const Genome& r3, double f) {
    Genome donor;
    for (int j = 0; j < Genome::kGeneCount; ++j) {
        donor.set_gene(j, r1.gene(j) + f * (r2.gene(j) - r3.gene(j)));
    }
    return clamp_genome(donor);
}

Genome de_crossover(const Genome& target, const Genome& donor, double cross_rate, Rng& rng) {
    const int forced = static_cast<int>(rng.below(Genome::kGeneCount));
    Genome trial;
    for (int j = 0; j < Genome::kGeneCount; ++j) {
        const bool from_donor = rng.uniform() <= cross_rate || j == forced;
        trial.set_gene(j, from_donor ? donor.gene(j) : target.gene(j));
    }
    return trial;
}

ForwardModel::ForwardModel(const SimConfig& env) : model_(env) {
    model_.neighborhood = NeighborhoodProvider::vision(50.0, kTwoPi);
}

double ForwardModel::error(const Genome& g, const Observation& obs) {
    const int window = obs.window();
    if (window < 2) throw std::invalid_argument("learning_error: window must be >= 2");
    const Eigen::Index n = obs.boid_count();
    if (n != model_.n) {
        throw std::invalid_argument("learning_error: observation has " + std::to_string(n) +
                                    " boids but environment expects " +
                                    std::to_string(model_.n));
    }
    model_.w_c = g.w_c;
    model_.w_a = g.w_a;
    model_.w_s = g.w_s;
    model_.d_s = g.d_s;
    model_.neighborhood.vision_r = g.vision_r;
    model_.neighborhood.vision_a = g.vision_a;

    if (prepared_ != &obs) {
        const GeneBounds& clamp = genome_clamp_bounds();
        candidate_interaction_r_ = std::max(clamp.hi[4], clamp.hi[3]);
        SwarmState start;
        start.x = obs.pos_x.front();
        start.y = obs.pos_y.front();
        candidates_ = CandidateSet(
            start, CandidateSet::required_radius(candidate_interaction_r_, model_.speed,
                                                 window - 1));
        prepared_ = &obs;
    }
    const bool within_candidates =
        g.vision_r <= candidate_interaction_r_ && g.d_s <= candidate_interaction_r_;

    cur_.time = obs.t0;
    cur_.x = obs.pos_x.front();
    cur_.y = obs.pos_y.front();
    cur_.vx = obs.vx0;
    cur_.vy = obs.vy0;
    for (int k = 1; k < window; ++k) {
        if (within_candidates) {
            step_into_candidates(cur_, model_, candidates_, next_);
        } else {
            step_into(cur_, model_, scratch_, next_);
        }
        std::swap(cur_, next_);
    }
    const Eigen::ArrayXd& ox = obs.pos_x.back();
    const Eigen::ArrayXd& oy = obs.pos_y.back();
    double err = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double dx = cur_.x[i] - ox[i];
        const double dy = cur_.y[i] - oy[i];
        err += std::sqrt(dx * dx + dy * dy);
    }
    return err;
}

double learning_error(const Genome& g, const Observation& obs, const SimConfig& env) {
    ForwardModel model(env);
    return model.error(g, obs);
}

std::vector<Genome> LearnResult::top_genomes(int k) const {
    std::vector<std::size_t> idx(population.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return population_fitness[a] < population_fitness[b];
    });
    std::vector<Genome> out;
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), idx.size());
    out.reserve(take);
    for (std::size_t r = 0; r < take; ++r) out.push_back(population[idx[r]]);
    return out;
}

LearnResult de_run(const Observation& obs, const SimConfig& env, const DEConfig& de,
                   std::optional<int> budget) {
    validate(de);
    Rng rng(de.seed);
    ForwardModel model(env);

    const int np = de.pop_size;
    std::vector<Genome> pop(np);
    std::vector<double> fitness(np);
    for (int i = 0; i < np; ++i) pop[i] = random_genome(rng);
    for (int i = 0; i < np; ++i) fitness[i] = model.error(pop[i], obs);

    LearnResult result;
    const auto record_best = [&] {
        const auto best_it = std::min_element(fitness.begin(), fitness.end());
        const int best_idx = static_cast<int>(best_it - fitness.begin());
        result.best = pop[best_idx];
        result.best_fitness = *best_it;
        result.fitness_history.push_back(*best_it);
    };
    record_best();

    const int generations = std::min(de.generations, budget.value_or(de.generations));
    std::vector<Genome> next_pop(np);
    std::vector<double> next_fitness(np);
    for (int gen = 0; gen < generations; ++gen) {
        for (int i = 0; i < np; ++i) {
            // Three distinct members, all different from the target.
            int r1, r2, r3;
            do {
                r1 = static_cast<int>(rng.below(np));
            } while (r1 == i);
            do {
                r2 = static_cast<int>(rng.below(np));
            } while (r2 == i || r2 == r1);
            do {
                r3 = static_cast<int>(rng.below(np));
            } while (r3 == i || r3 == r1 || r3 == r2);
            const Genome donor = de_mutate(pop[r1], pop[r2], pop[r3], de.weight_f);
            const Genome trial = de_crossover(pop[i], donor, de.cross_rate, rng);
            const double trial_fitness = model.error(trial, obs);
            // Tie goes to the trial.
            if (trial_fitness <= fitness[i]) {
                next_pop[i] = trial;
                next_fitness[i] = trial_fitness;
            } else {
                next_pop[i] = pop[i];
                next_fitness[i] = fitness[i];
            }
        }
        pop.swap(next_pop);
        fitness.swap(next_fitness);
        record_best();
    }
    result.elapsed = generations;
    result.population = std::move(pop);
    result.population_fitness = std::move(fitness);
    return result;
}

PredictResult predict(std::span<const Genome> genomes, const SwarmState& start,
                      std::int64_t horizon, const SimConfig& env, const Trajectory& actual) {
    if (genomes.empty()) throw std::invalid_argument("predict: no genomes given");
    if (horizon < 0) throw std::invalid_argument("predict: negative horizon");
    if (start.time + horizon >= static_cast<std::int64_t>(actual.size())) {
        throw std::invalid_argument("predict: horizon " + std::to_string(horizon) +
                                    " from step " + std::to_string(start.time) +
                                    " exceeds the actual trajectory (" +
                                    std::to_string(actual.size()) + " states)");
    }
    PredictResult result;
    result.per_step.assign(static_cast<std::size_t>(horizon), 0.0);
    SimConfig model = env;
    SwarmState cur, next;
    StepScratch scratch;
    for (const Genome& g : genomes) {
        model.w_c = g.w_c;
        model.w_a = g.w_a;
        model.w_s = g.w_s;
        model.d_s = g.d_s;
        model.neighborhood = NeighborhoodProvider::vision(g.vision_r, g.vision_a);
        cur = start;
        for (std::int64_t t = 1; t <= horizon; ++t) {
            step_into(cur, model, scratch, next);
            std::swap(cur, next);
            const SwarmState& truth = actual[static_cast<std::size_t>(start.time + t)];
            double err = 0;
            for (Eigen::Index i = 0; i < cur.size(); ++i) {
                const double dx = cur.x[i] - truth.x[i];
                const double dy = cur.y[i] - truth.y[i];
                err += std::sqrt(dx * dx + dy * dy);
            }
            result.per_step[static_cast<std::size_t>(t - 1)] += err;
        }
    }
    for (double& v : result.per_step) v /= static_cast<double>(genomes.size());
    result.cumulated = std::accumulate(result.per_step.begin(), result.per_step.end(), 0.0);
    return result;
}

LearnResult offline_session(const Trajectory& traj, std::int64_t t0, int window,
                            const SimConfig& env, const DEConfig& de) {
    return de_run(observe(traj, t0, window), env, de);
}

void validate(const OnlineParams& p) {
    if (p.window < 2) throw std::invalid_argument("invalid online window: must be >= 2");
    if (p.learn_steps < 0 || p.predict_steps < 0) {
        throw std::invalid_argument("invalid online periods: must be >= 0");
    }
    if (p.cycle_period < 1) throw std::invalid_argument("invalid online.cycle_period: must be >= 1");
    if (p.window + p.learn_steps > p.cycle_period) {
        throw std::invalid_argument(
            "invalid online.cycle_period: shorter than window + learn_steps");
    }
    if (p.cycle_period > p.total_steps) {
        throw std::invalid_argument("invalid online.cycle_period: exceeds total_steps");
    }
    if (p.top_k < 1) throw std::invalid_argument("invalid online.top_k: must be >= 1");
}

int online_cycle_count(const OnlineParams& p) {
    validate(p);
    return static_cast<int>((p.total_steps - p.window - p.learn_steps) / p.cycle_period) + 1;
}

std::vector<OnlineCycle> online_session(const SimConfig& truth, const DEConfig& de,
                                        const OnlineParams& p) {
    const int cycles = online_cycle_count(p);
    const std::int64_t last_predict_start =
        static_cast<std::int64_t>(cycles - 1) * p.cycle_period + (p.window - 1) + p.learn_steps;
    const std::int64_t horizon_needed = last_predict_start + p.predict_steps;
    const Trajectory traj = run(truth, std::max(p.total_steps, horizon_needed));

    std::vector<OnlineCycle> out;
    out.reserve(cycles);
    for (int c = 0; c < cycles; ++c) {
        OnlineCycle cycle;
        cycle.t0 = static_cast<std::int64_t>(c) * p.cycle_period;
        const Observation obs = observe(traj, cycle.t0, p.window);
        DEConfig cycle_de = de;
        cycle_de.seed = substream_seed(de.seed, static_cast<std::uint64_t>(c));
        cycle.learn = de_run(obs, truth, cycle_de);
        const std::int64_t predict_start = cycle.t0 + (p.window - 1) + p.learn_steps;
        const std::vector<Genome> top = cycle.learn.top_genomes(p.top_k);
        cycle.predict = predict(top, traj[static_cast<std::size_t>(predict_start)],
                                p.predict_steps, truth, traj);
        out.push_back(std::move(cycle));
    }
    return out;
}

namespace {

json genome_to_json(const Genome& g) {
    return json{{"w_c", g.w_c},           {"w_a", g.w_a},
                {"w_s", g.w_s},           {"d_s", g.d_s},
                {"vision_r", g.vision_r}, {"vision_a", g.vision_a}};
}

Genome genome_from_json(const json& j) {
    Genome g;
    g.w_c = j.at("w_c").get<double>();
    g.w_a = j.at("w_a").get<double>();
    g.w_s = j.at("w_s").get<double>();
    g.d_s = j.at("d_s").get<double>();
    g.vision_r = j.at("vision_r").get<double>();
    g.vision_a = j.at("vision_a").get<double>();
    return g;
}

}  // namespace

std::string learn_result_json(const LearnResult& r) {
    json j;
    j["best"] = genome_to_json(r.best);
    j["best_fitness"] = r.best_fitness;
    j["fitness_history"] = r.fitness_history;
    j["elapsed"] = r.elapsed;
    json pop = json::array();
    for (const Genome& g : r.population) pop.push_back(genome_to_json(g));
    j["population"] = std::move(pop);
    j["population_fitness"] = r.population_fitness;
    return j.dump(2);
}

LearnResult learn_result_from_json(const std::string& text) {
    const json j = json::parse(text);
    LearnResult r;
    r.best = genome_from_json(j.at("best"));
    r.best_fitness = j.at("best_fitness").get<double>();
    r.fitness_history = j.at("fitness_history").get<std::vector<double>>();
    r.elapsed = j.at("elapsed").get<int>();
    for (const json& g : j.at("population")) r.population.push_back(genome_from_json(g));
    r.population_fitness = j.at("population_fitness").get<std::vector<double>>();
    return r;
}

std::string predict_result_json(const PredictResult& r) {
    json j;
    j["per_step"] = r.per_step;
    j["cumulated"] = r.cumulated;
    return j.dump(2);
}

PredictResult predict_result_from_json(const std::string& text) {
    const json j = json::parse(text);
    PredictResult r;
    r.per_step = j.at("per_step").get<std::vector<double>>();
    r.cumulated = j.at("cumulated").get<double>();
    return r;
}

void write_fitness_history_csv(const std::filesystem::path& path, const LearnResult& r,
                               std::uint64_t seed, std::uint64_t cfg_hash) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# seed=" << seed << '\n';
    out << "# config_hash=" << cfg_hash << '\n';
    out << "generation,best_eps_L\n";
    for (std::size_t g = 0; g < r.fitness_history.size(); ++g) {
        out << g << ',' << format_double(r.fitness_history[g]) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace boids
