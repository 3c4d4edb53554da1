#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "boids/adversary.hpp"
#include "boids/metrics.hpp"
#include "boids/sim.hpp"

namespace boids {

enum class ExperimentKind { kSwarmQuality, kOfflineLearning, kOnlineLearning };

// Communication method of a swarm: classic vision or one of the network
// topologies.
enum class BoidVariant { kClassic, kEr, kWs, kBa };

std::string to_string(BoidVariant v);
BoidVariant variant_from_string(const std::string& s);

struct TopologyParams {
    Eigen::Index er_edges = 300;
    Eigen::Index ws_k = 6;
    double ws_p_rewire = 0.1;
    Eigen::Index ba_m0 = 6;
    Eigen::Index ba_m = 3;
    std::string graph_file;  // when set, load this adjacency instead of generating
};

// One experiment description: the swarm under test, the topology family,
// metric configuration, and the experiment protocol. Run r uses seed
// sim.seed + r; placement, graph generation and DE draw from independent
// named streams of that run seed.
struct Scenario {
    std::string name = "scenario";
    SimConfig sim;  // sim.seed is the base seed
    ExperimentKind experiment = ExperimentKind::kSwarmQuality;
    BoidVariant truth_variant = BoidVariant::kClassic;
    TopologyParams topology;
    double attraction_range = 50.0;
    int runs = 10;
    std::int64_t steps = 10000;
    std::vector<int> windows{2, 4, 8, 16};
    std::int64_t offline_t0 = 0;
    DEConfig de;
    OnlineParams online;
    std::vector<BoidVariant> variants{BoidVariant::kClassic, BoidVariant::kEr,
                                      BoidVariant::kWs, BoidVariant::kBa};
    bool save_trajectories = false;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const Scenario& s);
std::uint64_t scenario_hash(const Scenario& s);

// "paper" leaves the scenario untouched; "desk" scales it down for quick
// verification (n=50, 2000 steps, 10 learning seeds, 100 offline
// generations). Throws on an unknown preset name.
void apply_preset(Scenario& s, const std::string& preset);

std::uint64_t run_seed(const Scenario& s, int run_index);

// Builds the adjacency for a networked variant from the scenario's topology
// parameters (or loads topology.graph_file if set).
Adjacency build_topology(BoidVariant v, const TopologyParams& topo, Eigen::Index n,
                         std::uint64_t seed);

// Fully resolved per-run simulation config for one variant (neighborhood
// attached, per-run seed).
SimConfig variant_config(const Scenario& s, BoidVariant v, int run_index);

// Runs fn(0..count-1) on up to `jobs` worker threads. Every unit writes only
// its own slot, so results match the sequential order regardless of jobs.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

struct QualityRun {
    std::uint64_t seed = 0;
    MetricSeries order_series;
    MetricSeries grouping_series;
    double mean_order = 0;
    double mean_grouping = 0;
    double final_order = 0;
    Eigen::Index graph_components = 0;  // 0 for the classic variant
};

struct QualityVariantResult {
    BoidVariant variant = BoidVariant::kClassic;
    std::vector<QualityRun> runs;
    SummaryStats order_summary;      // over all steps of all runs
    SummaryStats mean_order_summary; // over per-run means
};

struct QualityComparison {
    BoidVariant variant = BoidVariant::kClassic;  // compared against classic
    WelchResult mean_order_test;
};

struct QualityResult {
    std::vector<QualityVariantResult> variants;
    std::vector<QualityComparison> comparisons;
};

struct OfflineRun {
    int window = 0;
    int run_index = 0;
    std::uint64_t seed = 0;
    LearnResult result;
};

struct OfflineWindowAgg {
    int window = 0;
    double median_eps = 0;
    Genome median_genome;  // per-gene medians over runs
    double best_eps = 0;   // best run of the window
    Genome best_genome;
};

struct OfflineResult {
    std::vector<OfflineRun> runs;  // ordered by (window, run)
    std::vector<OfflineWindowAgg> aggregates;
};

struct OnlineRun {
    int window = 0;
    int run_index = 0;
    std::uint64_t seed = 0;
    std::vector<OnlineCycle> cycles;
};

struct OnlineWindowAgg {
    int window = 0;
    std::vector<double> mean_eps_per_cycle;       // cross-run mean of best eps_L
    std::vector<double> mean_cum_pred_per_cycle;  // cross-run mean of cumulated eps_P
    double mean_cumulated_pred = 0;               // over all runs and cycles
};

struct OnlineResult {
    std::vector<OnlineRun> runs;
    std::vector<OnlineWindowAgg> aggregates;
};

// Experiment drivers. When out_root is non-empty they persist the resolved
// scenario snapshot, per-run artifacts and a summary under
// out_root/<scenario name>/; an empty out_root computes in memory only.
QualityResult run_swarm_quality(const Scenario& s, const std::filesystem::path& out_root,
                                int jobs);
OfflineResult run_offline_learning(const Scenario& s, const std::filesystem::path& out_root,
                                   int jobs);
OnlineResult run_online_learning(const Scenario& s, const std::filesystem::path& out_root,
                                 int jobs);

// Rebuilds aggregates and summary.json from the per-run artifacts in an
// existing scenario directory, without re-simulating.
void write_report(const std::filesystem::path& scenario_dir);

double median(std::vector<double> values);

}  // namespace boids
