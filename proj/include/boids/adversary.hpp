#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boids/rng.hpp"
#include "boids/sim.hpp"

namespace boids {

// The six rule parameters an external observer tries to recover. The
// observer always assumes the classic vision model, whatever the observed
// swarm actually uses.
struct Genome {
    double w_c = 0;
    double w_a = 0;
    double w_s = 0;
    double d_s = 0;
    double vision_r = 0;
    double vision_a = 0;

    static constexpr int kGeneCount = 6;

    double gene(int j) const;
    void set_gene(int j, double value);
};

struct GeneBounds {
    std::array<double, Genome::kGeneCount> lo;
    std::array<double, Genome::kGeneCount> hi;
};

// Initialization ranges for random genomes. The safe distance starts in
// [0, 1] like the weights.
const GeneBounds& genome_init_bounds();

// Clamp ranges applied after every mutation. Identical to the init ranges
// except d_s, which may evolve up to 20 so the search can reach realistic
// safe distances.
const GeneBounds& genome_clamp_bounds();

Genome clamp_genome(Genome g);

// Uniform within the init ranges; genes drawn in declaration order.
Genome random_genome(Rng& rng);

struct DEConfig {
    int pop_size = 100;
    int generations = 300;
    double weight_f = 0.8;    // differential amplification factor, in [0, 2]
    double cross_rate = 0.9;  // crossover rate, in [0, 1]
    std::uint64_t seed = 1;
};

void validate(const DEConfig& de);

// What the observer saw: positions over a short run of consecutive steps and
// the headings at the first of them (observable because the cruise speed is
// a known constant).
struct Observation {
    std::int64_t t0 = 0;
    std::vector<Eigen::ArrayXd> pos_x;  // one entry per observed step
    std::vector<Eigen::ArrayXd> pos_y;
    Eigen::ArrayXd vx0, vy0;

    int window() const { return static_cast<int>(pos_x.size()); }
    Eigen::Index boid_count() const { return vx0.size(); }
};

// Snapshot of `window` consecutive states starting at t0. Throws if the
// trajectory does not cover them.
Observation observe(const Trajectory& traj, std::int64_t t0, int window);

// Donor vector r1 + F * (r2 - r3), clamped gene-wise.
Genome de_mutate(const Genome& r1, const Genome& r2, const Genome& r3, double f);

// Binomial crossover: gene j comes from the donor when a uniform draw is at
// most cross_rate, and one uniformly chosen gene always comes from the donor
// so the trial never equals the target by default. Draw order: forced index
// first, then one uniform per gene.
Genome de_crossover(const Genome& target, const Genome& donor, double cross_rate, Rng& rng);

// The observer's forward simulator: replays an observation window under a
// candidate genome with the classic vision rules, reusing internal buffers
// across evaluations. env supplies the known environment (space, population,
// speed); the genome supplies everything the observer has to guess.
class ForwardModel {
public:
    explicit ForwardModel(const SimConfig& env);

    // Sum over boids of the position mismatch at the last observed step,
    // after stepping window-1 times from the first observed state. Throws on
    // a window shorter than 2.
    double error(const Genome& g, const Observation& obs);

private:
    SimConfig model_;
    SwarmState cur_, next_;
    StepScratch scratch_;
    // Candidate supersets for the observation being replayed; rebuilt when a
    // different observation arrives. Exact for genomes within the clamp
    // ranges; wilder genomes fall back to the full scan.
    CandidateSet candidates_;
    const Observation* prepared_ = nullptr;
    double candidate_interaction_r_ = 0;
};

double learning_error(const Genome& g, const Observation& obs, const SimConfig& env);

struct LearnResult {
    Genome best;
    double best_fitness = 0;
    std::vector<double> fitness_history;  // best per generation, entry 0 after init
    int elapsed = 0;                      // generations actually run
    std::vector<Genome> population;       // final population and its fitness
    std::vector<double> population_fitness;

    std::vector<Genome> top_genomes(int k) const;
};

// Standard DE loop: random init within the gene ranges, then per target pick
// three distinct others, mutate, cross over, and keep the fitter of trial
// and target (tie goes to the trial). Runs min(de.generations, budget)
// generations. Deterministic per seed.
LearnResult de_run(const Observation& obs, const SimConfig& env, const DEConfig& de,
                   std::optional<int> budget = std::nullopt);

struct PredictResult {
    std::vector<double> per_step;  // mismatch per future step, averaged over genomes
    double cumulated = 0;
};

// Forward-simulates each genome from `start` and scores it against the
// actual trajectory over `horizon` steps. Throws if the trajectory is too
// short or no genome is given.
PredictResult predict(std::span<const Genome> genomes, const SwarmState& start,
                      std::int64_t horizon, const SimConfig& env, const Trajectory& actual);

// Observe `window` steps at t0, then run DE to the full configured number of
// generations.
LearnResult offline_session(const Trajectory& traj, std::int64_t t0, int window,
                            const SimConfig& env, const DEConfig& de);

struct OnlineParams {
    std::int64_t total_steps = 10000;
    int window = 2;
    std::int64_t learn_steps = 600;     // simulated time the learner is given
    std::int64_t predict_steps = 1200;  // horizon scored after each learning phase
    std::int64_t cycle_period = 667;
    int top_k = 5;  // genomes carried into prediction
};

void validate(const OnlineParams& p);

// Cycles whose sampling and learning phases fit inside total_steps.
int online_cycle_count(const OnlineParams& p);

struct OnlineCycle {
    std::int64_t t0 = 0;  // first observed step of the cycle
    LearnResult learn;
    PredictResult predict;
};

// Repeating sample-learn-predict schedule against a continuously advancing
// swarm. Cycle c observes `window` steps from c*cycle_period, learns under
// the generation cap in de.generations while the swarm moves learn_steps
// further, then predicts the next predict_steps from the then-current state.
// Prediction spans overlap later cycles; the truth trajectory is extended
// past total_steps so every cycle is scored over its full horizon.
std::vector<OnlineCycle> online_session(const SimConfig& truth, const DEConfig& de,
                                        const OnlineParams& p);

// JSON serialization (genome fields by name, histories as arrays).
std::string learn_result_json(const LearnResult& r);
std::string predict_result_json(const PredictResult& r);
LearnResult learn_result_from_json(const std::string& text);
PredictResult predict_result_from_json(const std::string& text);

// CSV columns generation,best_eps_L.
void write_fitness_history_csv(const std::filesystem::path& path, const LearnResult& r,
                               std::uint64_t seed, std::uint64_t cfg_hash);

}  // namespace boids
