#include "boids/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "boids/rng.hpp"
#include "boids/text_io.hpp"

namespace boids {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(BoidVariant v) {
    switch (v) {
        case BoidVariant::kClassic: return "classic";
        case BoidVariant::kEr: return "er";
        case BoidVariant::kWs: return "ws";
        case BoidVariant::kBa: return "ba";
    }
    throw std::logic_error("unreachable");
}

BoidVariant variant_from_string(const std::string& s) {
    if (s == "classic") return BoidVariant::kClassic;
    if (s == "er") return BoidVariant::kEr;
    if (s == "ws") return BoidVariant::kWs;
    if (s == "ba") return BoidVariant::kBa;
    throw std::invalid_argument("invalid variant '" + s + "': expected classic, er, ws or ba");
}

namespace {

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::kSwarmQuality: return "swarm-quality";
        case ExperimentKind::kOfflineLearning: return "offline-learning";
        case ExperimentKind::kOnlineLearning: return "online-learning";
    }
    throw std::logic_error("unreachable");
}

ExperimentKind experiment_from_string(const std::string& s) {
    if (s == "swarm-quality") return ExperimentKind::kSwarmQuality;
    if (s == "offline-learning") return ExperimentKind::kOfflineLearning;
    if (s == "online-learning") return ExperimentKind::kOnlineLearning;
    throw std::invalid_argument("invalid experiment '" + s +
                                "': expected swarm-quality, offline-learning or online-learning");
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    KeyValues kv = KeyValues::parse(text);
    Scenario s;
    s.name = kv.take_or("name", s.name);
    s.experiment = experiment_from_string(kv.take_or("experiment", "swarm-quality"));
    s.sim = parse_config_keys(kv);

    const std::string topo = kv.take_or("topology", "");
    if (s.sim.neighborhood.kind == NeighborhoodProvider::Kind::kNetwork) {
        if (topo.empty() && !kv.has("graph_file")) {
            throw std::invalid_argument(
                "missing required key 'topology' (er, ws or ba) for a network scenario");
        }
        s.truth_variant = topo.empty() ? BoidVariant::kEr : variant_from_string(topo);
    } else {
        if (!topo.empty()) {
            throw std::invalid_argument("key 'topology' is only valid with neighborhood.kind = network");
        }
        s.truth_variant = BoidVariant::kClassic;
    }
    s.topology.er_edges = kv.take_int_or("er.m_edges", s.topology.er_edges);
    s.topology.ws_k = kv.take_int_or("ws.k", s.topology.ws_k);
    s.topology.ws_p_rewire = kv.take_double_or("ws.p_rewire", s.topology.ws_p_rewire);
    s.topology.ba_m0 = kv.take_int_or("ba.m0", s.topology.ba_m0);
    s.topology.ba_m = kv.take_int_or("ba.m_per_node", s.topology.ba_m);
    s.topology.graph_file = kv.take_or("graph_file", "");

    s.attraction_range = kv.take_double_or("r_a", s.attraction_range);
    s.runs = static_cast<int>(kv.take_int_or("runs", s.runs));
    s.steps = kv.take_int_or("steps", s.steps);

    if (const std::string w = kv.take_or("windows", ""); !w.empty()) {
        s.windows.clear();
        for (const std::string& item : split(w, ',')) {
            s.windows.push_back(static_cast<int>(parse_int(item, "windows")));
        }
    }
    s.offline_t0 = kv.take_int_or("offline.t0", s.offline_t0);

    s.de.pop_size = static_cast<int>(kv.take_int_or("de.pop_size", s.de.pop_size));
    const int default_gens = s.experiment == ExperimentKind::kOnlineLearning ? 50 : 300;
    s.de.generations = static_cast<int>(kv.take_int_or("de.generations", default_gens));
    s.de.weight_f = kv.take_double_or("de.f", s.de.weight_f);
    s.de.cross_rate = kv.take_double_or("de.cr", s.de.cross_rate);

    s.online.learn_steps = kv.take_int_or("online.learn_steps", s.online.learn_steps);
    s.online.predict_steps = kv.take_int_or("online.predict_steps", s.online.predict_steps);
    s.online.cycle_period = kv.take_int_or("online.cycle_period", s.online.cycle_period);
    s.online.top_k = static_cast<int>(kv.take_int_or("online.top_k", s.online.top_k));

    if (const std::string v = kv.take_or("variants", ""); !v.empty()) {
        s.variants.clear();
        for (const std::string& item : split(v, ',')) {
            s.variants.push_back(variant_from_string(item));
        }
    }
    const std::string save_traj = kv.take_or("save_trajectories", "false");
    if (save_traj != "true" && save_traj != "false") {
        throw std::invalid_argument("invalid save_trajectories: expected true or false");
    }
    s.save_trajectories = save_traj == "true";
    kv.finish();

    validate_pre_topology(s.sim);
    if (s.runs < 1) throw std::invalid_argument("invalid runs: must be >= 1");
    if (s.steps < 1) throw std::invalid_argument("invalid steps: must be >= 1");
    if (!(s.attraction_range > 0)) throw std::invalid_argument("invalid r_a: must be > 0");
    if (s.windows.empty()) throw std::invalid_argument("invalid windows: empty list");
    for (const int w : s.windows) {
        if (w < 2) throw std::invalid_argument("invalid windows: every window must be >= 2");
    }
    if (s.offline_t0 < 0) throw std::invalid_argument("invalid offline.t0: must be >= 0");
    if (s.variants.empty()) throw std::invalid_argument("invalid variants: empty list");
    validate(s.de);
    return s;
}

Scenario load_scenario(const fs::path& path) {
    if (!fs::exists(path)) {
        throw std::invalid_argument("scenario file not found: " + path.string());
    }
    try {
        return parse_scenario(read_file(path));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "name = " << s.name << '\n';
    out << "experiment = " << to_string(s.experiment) << '\n';
    out << serialize_config(s.sim);
    if (s.sim.neighborhood.kind == NeighborhoodProvider::Kind::kNetwork) {
        out << "topology = " << to_string(s.truth_variant) << '\n';
    }
    out << "er.m_edges = " << s.topology.er_edges << '\n';
    out << "ws.k = " << s.topology.ws_k << '\n';
    out << "ws.p_rewire = " << format_double(s.topology.ws_p_rewire) << '\n';
    out << "ba.m0 = " << s.topology.ba_m0 << '\n';
    out << "ba.m_per_node = " << s.topology.ba_m << '\n';
    if (!s.topology.graph_file.empty()) out << "graph_file = " << s.topology.graph_file << '\n';
    out << "r_a = " << format_double(s.attraction_range) << '\n';
    out << "runs = " << s.runs << '\n';
    out << "steps = " << s.steps << '\n';
    out << "windows = ";
    for (std::size_t i = 0; i < s.windows.size(); ++i) {
        if (i > 0) out << ',';
        out << s.windows[i];
    }
    out << '\n';
    out << "offline.t0 = " << s.offline_t0 << '\n';
    out << "de.pop_size = " << s.de.pop_size << '\n';
    out << "de.generations = " << s.de.generations << '\n';
    out << "de.f = " << format_double(s.de.weight_f) << '\n';
    out << "de.cr = " << format_double(s.de.cross_rate) << '\n';
    out << "online.learn_steps = " << s.online.learn_steps << '\n';
    out << "online.predict_steps = " << s.online.predict_steps << '\n';
    out << "online.cycle_period = " << s.online.cycle_period << '\n';
    out << "online.top_k = " << s.online.top_k << '\n';
    out << "variants = ";
    for (std::size_t i = 0; i < s.variants.size(); ++i) {
        if (i > 0) out << ',';
        out << to_string(s.variants[i]);
    }
    out << '\n';
    out << "save_trajectories = " << (s.save_trajectories ? "true" : "false") << '\n';
    return out.str();
}

std::uint64_t scenario_hash(const Scenario& s) { return fnv1a(serialize_scenario(s)); }

void apply_preset(Scenario& s, const std::string& preset) {
    if (preset == "paper" || preset.empty()) return;
    if (preset != "desk") {
        throw std::invalid_argument("invalid preset '" + preset + "': expected desk or paper");
    }
    s.sim.n = 50;
    s.steps = 2000;
    if (s.experiment != ExperimentKind::kSwarmQuality) s.runs = 10;
    if (s.experiment == ExperimentKind::kOfflineLearning) s.de.generations = 100;
}

std::uint64_t run_seed(const Scenario& s, int run_index) {
    return s.sim.seed + static_cast<std::uint64_t>(run_index);
}

Adjacency build_topology(BoidVariant v, const TopologyParams& topo, Eigen::Index n,
                         std::uint64_t seed) {
    if (!topo.graph_file.empty()) return load_adjacency(topo.graph_file);
    switch (v) {
        case BoidVariant::kEr: return erdos_renyi(n, topo.er_edges, seed);
        case BoidVariant::kWs: return watts_strogatz(n, topo.ws_k, topo.ws_p_rewire, seed);
        case BoidVariant::kBa: return barabasi_albert(n, topo.ba_m0, topo.ba_m, seed);
        case BoidVariant::kClassic:
            throw std::invalid_argument("build_topology: classic boids have no graph");
    }
    throw std::logic_error("unreachable");
}

SimConfig variant_config(const Scenario& s, BoidVariant v, int run_index) {
    SimConfig cfg = s.sim;
    cfg.seed = run_seed(s, run_index);
    if (v == BoidVariant::kClassic) {
        cfg.neighborhood = NeighborhoodProvider::vision(s.sim.neighborhood.vision_r,
                                                        s.sim.neighborhood.vision_a);
    } else {
        cfg.neighborhood = NeighborhoodProvider::network(
            build_topology(v, s.topology, cfg.n, stream_seed(cfg.seed, "graph")));
    }
    validate(cfg);
    return cfg;
}

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
    jobs = std::clamp(jobs, 1, std::max(1, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& t : workers) t.join();
    if (error) std::rethrow_exception(error);
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

std::string run_dir_name(int run_index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "run_%03d", run_index);
    return buf;
}

fs::path scenario_dir(const fs::path& out_root, const Scenario& s) {
    return out_root / s.name;
}

void write_snapshot(const fs::path& dir, const Scenario& s) {
    fs::create_directories(dir);
    write_file(dir / "scenario.cfg", serialize_scenario(s));
}

json genome_json(const Genome& g) {
    return json{{"w_c", g.w_c},           {"w_a", g.w_a},
                {"w_s", g.w_s},           {"d_s", g.d_s},
                {"vision_r", g.vision_r}, {"vision_a", g.vision_a}};
}

json summary_json(const SummaryStats& st) {
    return json{{"mean", st.mean}, {"std", st.std_dev}, {"p5", st.p5},
                {"p95", st.p95},   {"min", st.min},     {"max", st.max}};
}

double series_mean(const MetricSeries& series) {
    double sum = 0;
    for (const auto& [step, value] : series.values) sum += value;
    return sum / static_cast<double>(series.values.size());
}

// ---- swarm quality ----------------------------------------------------

QualityVariantResult aggregate_quality_variant(BoidVariant v, std::vector<QualityRun> runs) {
    QualityVariantResult result;
    result.variant = v;
    result.runs = std::move(runs);
    std::vector<double> all_orders;
    std::vector<double> run_means;
    for (const QualityRun& r : result.runs) {
        run_means.push_back(r.mean_order);
        for (const auto& [step, value] : r.order_series.values) all_orders.push_back(value);
    }
    result.order_summary = summarize(all_orders);
    result.mean_order_summary = summarize(run_means);
    return result;
}

QualityResult aggregate_quality(const Scenario& s, std::vector<QualityVariantResult> variants) {
    QualityResult result;
    result.variants = std::move(variants);
    const auto classic = std::find_if(
        result.variants.begin(), result.variants.end(),
        [](const QualityVariantResult& v) { return v.variant == BoidVariant::kClassic; });
    if (classic != result.variants.end()) {
        std::vector<double> classic_means;
        for (const QualityRun& r : classic->runs) classic_means.push_back(r.mean_order);
        for (const QualityVariantResult& v : result.variants) {
            if (v.variant == BoidVariant::kClassic) continue;
            std::vector<double> means;
            for (const QualityRun& r : v.runs) means.push_back(r.mean_order);
            QualityComparison cmp;
            cmp.variant = v.variant;
            cmp.mean_order_test = welch_t_test(means, classic_means);
            result.comparisons.push_back(cmp);
        }
    }
    (void)s;
    return result;
}

json quality_summary_json(const Scenario& s, const QualityResult& result) {
    json j;
    j["experiment"] = "swarm-quality";
    j["scenario"] = s.name;
    j["config_hash"] = scenario_hash(s);
    json variants = json::object();
    for (const QualityVariantResult& v : result.variants) {
        json runs = json::array();
        for (const QualityRun& r : v.runs) {
            runs.push_back(json{{"seed", r.seed},
                                {"mean_order", r.mean_order},
                                {"mean_grouping", r.mean_grouping},
                                {"final_order", r.final_order},
                                {"graph_components", r.graph_components}});
        }
        variants[to_string(v.variant)] =
            json{{"runs", std::move(runs)},
                 {"order_summary", summary_json(v.order_summary)},
                 {"mean_order_summary", summary_json(v.mean_order_summary)}};
    }
    j["variants"] = std::move(variants);
    json comparisons = json::array();
    for (const QualityComparison& c : result.comparisons) {
        comparisons.push_back(json{{"variant", to_string(c.variant)},
                                   {"t", c.mean_order_test.t},
                                   {"p", c.mean_order_test.p},
                                   {"dof", c.mean_order_test.dof}});
    }
    j["mean_order_vs_classic"] = std::move(comparisons);
    return j;
}

QualityRun compute_quality_run(const Scenario& s, BoidVariant v, int run_index,
                               const fs::path& dir) {
    const SimConfig cfg = variant_config(s, v, run_index);
    const std::uint64_t hash = scenario_hash(s);
    const Trajectory traj = run(cfg, s.steps);
    QualityRun out;
    out.seed = cfg.seed;
    out.order_series.name = "order";
    out.grouping_series.name = "grouping";
    out.order_series.values.reserve(traj.size());
    out.grouping_series.values.reserve(traj.size());
    for (const SwarmState& state : traj) {
        out.order_series.values.emplace_back(state.time, order_parameter(state));
        out.grouping_series.values.emplace_back(
            state.time, static_cast<double>(group_count(state, s.attraction_range)));
    }
    out.mean_order = series_mean(out.order_series);
    out.mean_grouping = series_mean(out.grouping_series);
    out.final_order = out.order_series.values.back().second;
    out.graph_components = v == BoidVariant::kClassic
                               ? 0
                               : cfg.neighborhood.adjacency.component_count();
    if (!dir.empty()) {
        fs::create_directories(dir);
        write_metric_csv(dir / "order.csv", out.order_series, cfg.seed, hash);
        write_metric_csv(dir / "grouping.csv", out.grouping_series, cfg.seed, hash);
        if (v != BoidVariant::kClassic) {
            save_adjacency(dir / "graph.edges", cfg.neighborhood.adjacency);
        }
        if (s.save_trajectories) {
            write_trajectory_csv(dir / "trajectory.csv", traj, cfg.seed, hash);
        }
    }
    return out;
}

// ---- offline learning --------------------------------------------------

OfflineWindowAgg aggregate_offline_window(int window, const std::vector<const OfflineRun*>& runs) {
    OfflineWindowAgg agg;
    agg.window = window;
    std::vector<double> eps;
    for (const OfflineRun* r : runs) eps.push_back(r->result.best_fitness);
    agg.median_eps = median(eps);
    for (int j = 0; j < Genome::kGeneCount; ++j) {
        std::vector<double> genes;
        for (const OfflineRun* r : runs) genes.push_back(r->result.best.gene(j));
        agg.median_genome.set_gene(j, median(genes));
    }
    const OfflineRun* best = runs.front();
    for (const OfflineRun* r : runs) {
        if (r->result.best_fitness < best->result.best_fitness) best = r;
    }
    agg.best_eps = best->result.best_fitness;
    agg.best_genome = best->result.best;
    return agg;
}

OfflineResult aggregate_offline(const Scenario& s, std::vector<OfflineRun> runs) {
    OfflineResult result;
    result.runs = std::move(runs);
    for (const int w : s.windows) {
        std::vector<const OfflineRun*> of_window;
        for (const OfflineRun& r : result.runs) {
            if (r.window == w) of_window.push_back(&r);
        }
        result.aggregates.push_back(aggregate_offline_window(w, of_window));
    }
    return result;
}

json offline_summary_json(const Scenario& s, const OfflineResult& result) {
    json j;
    j["experiment"] = "offline-learning";
    j["scenario"] = s.name;
    j["config_hash"] = scenario_hash(s);
    j["truth"] = to_string(s.truth_variant);
    j["t0"] = s.offline_t0;
    json windows = json::object();
    for (const OfflineWindowAgg& agg : result.aggregates) {
        json runs = json::array();
        for (const OfflineRun& r : result.runs) {
            if (r.window != agg.window) continue;
            runs.push_back(json{{"run", r.run_index},
                                {"seed", r.seed},
                                {"best_eps_L", r.result.best_fitness},
                                {"elapsed", r.result.elapsed}});
        }
        windows[std::to_string(agg.window)] = json{{"median_eps_L", agg.median_eps},
                                                   {"median_genome", genome_json(agg.median_genome)},
                                                   {"best_eps_L", agg.best_eps},
                                                   {"best_genome", genome_json(agg.best_genome)},
                                                   {"runs", std::move(runs)}};
    }
    j["windows"] = std::move(windows);
    return j;
}

// One row per window: eps_L plus the six learned parameters of the best run.
std::string best_estimations_csv(const OfflineResult& result) {
    std::string text = "window,eps_L,w_c,w_a,w_s,d_s,vision_r,vision_a\n";
    for (const OfflineWindowAgg& agg : result.aggregates) {
        text += std::to_string(agg.window);
        text += ',';
        text += format_double(agg.best_eps);
        for (int j = 0; j < Genome::kGeneCount; ++j) {
            text += ',';
            text += format_double(agg.best_genome.gene(j));
        }
        text += '\n';
    }
    return text;
}

// ---- online learning ---------------------------------------------------

OnlineWindowAgg aggregate_online_window(int window, const std::vector<const OnlineRun*>& runs) {
    OnlineWindowAgg agg;
    agg.window = window;
    const std::size_t cycles = runs.front()->cycles.size();
    for (const OnlineRun* r : runs) {
        if (r->cycles.size() != cycles) {
            throw std::runtime_error("online runs disagree on cycle count");
        }
    }
    agg.mean_eps_per_cycle.assign(cycles, 0.0);
    agg.mean_cum_pred_per_cycle.assign(cycles, 0.0);
    for (const OnlineRun* r : runs) {
        for (std::size_t c = 0; c < cycles; ++c) {
            agg.mean_eps_per_cycle[c] += r->cycles[c].learn.best_fitness;
            agg.mean_cum_pred_per_cycle[c] += r->cycles[c].predict.cumulated;
        }
    }
    const auto n_runs = static_cast<double>(runs.size());
    for (double& v : agg.mean_eps_per_cycle) v /= n_runs;
    for (double& v : agg.mean_cum_pred_per_cycle) v /= n_runs;
    agg.mean_cumulated_pred =
        std::accumulate(agg.mean_cum_pred_per_cycle.begin(), agg.mean_cum_pred_per_cycle.end(),
                        0.0) /
        static_cast<double>(cycles);
    return agg;
}

OnlineResult aggregate_online(const Scenario& s, std::vector<OnlineRun> runs) {
    OnlineResult result;
    result.runs = std::move(runs);
    for (const int w : s.windows) {
        std::vector<const OnlineRun*> of_window;
        for (const OnlineRun& r : result.runs) {
            if (r.window == w) of_window.push_back(&r);
        }
        result.aggregates.push_back(aggregate_online_window(w, of_window));
    }
    return result;
}

json online_summary_json(const Scenario& s, const OnlineResult& result) {
    json j;
    j["experiment"] = "online-learning";
    j["scenario"] = s.name;
    j["config_hash"] = scenario_hash(s);
    j["truth"] = to_string(s.truth_variant);
    json windows = json::object();
    for (const OnlineWindowAgg& agg : result.aggregates) {
        json runs = json::array();
        for (const OnlineRun& r : result.runs) {
            if (r.window != agg.window) continue;
            json eps = json::array();
            json cum = json::array();
            for (const OnlineCycle& c : r.cycles) {
                eps.push_back(c.learn.best_fitness);
                cum.push_back(c.predict.cumulated);
            }
            runs.push_back(json{{"run", r.run_index},
                                {"seed", r.seed},
                                {"eps_L_per_cycle", std::move(eps)},
                                {"cum_eps_P_per_cycle", std::move(cum)}});
        }
        windows[std::to_string(agg.window)] =
            json{{"mean_eps_L_per_cycle", agg.mean_eps_per_cycle},
                 {"mean_cum_eps_P_per_cycle", agg.mean_cum_pred_per_cycle},
                 {"mean_cumulated_eps_P", agg.mean_cumulated_pred},
                 {"cycles", result.runs.empty() ? 0 : result.runs.front().cycles.size()},
                 {"runs", std::move(runs)}};
    }
    j["windows"] = std::move(windows);
    return j;
}

json online_run_json(const OnlineRun& r) {
    json cycles = json::array();
    for (const OnlineCycle& c : r.cycles) {
        cycles.push_back(json{{"t0", c.t0},
                              {"learn", json::parse(learn_result_json(c.learn))},
                              {"predict", json::parse(predict_result_json(c.predict))}});
    }
    return json{{"window", r.window},
                {"run", r.run_index},
                {"seed", r.seed},
                {"cycles", std::move(cycles)}};
}

OnlineRun online_run_from_json(const std::string& text) {
    const json j = json::parse(text);
    OnlineRun r;
    r.window = j.at("window").get<int>();
    r.run_index = j.at("run").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const json& c : j.at("cycles")) {
        OnlineCycle cycle;
        cycle.t0 = c.at("t0").get<std::int64_t>();
        cycle.learn = learn_result_from_json(c.at("learn").dump());
        cycle.predict = predict_result_from_json(c.at("predict").dump());
        r.cycles.push_back(std::move(cycle));
    }
    return r;
}

}  // namespace

QualityResult run_swarm_quality(const Scenario& s, const fs::path& out_root, int jobs) {
    if (s.experiment != ExperimentKind::kSwarmQuality) {
        throw std::invalid_argument("scenario '" + s.name + "' is not a swarm-quality experiment");
    }
    const fs::path dir = out_root.empty() ? fs::path{} : scenario_dir(out_root, s);
    if (!dir.empty()) write_snapshot(dir, s);

    const int total = static_cast<int>(s.variants.size()) * s.runs;
    std::vector<QualityRun> flat(static_cast<std::size_t>(total));
    parallel_for(total, jobs, [&](int idx) {
        const BoidVariant v = s.variants[static_cast<std::size_t>(idx / s.runs)];
        const int run_index = idx % s.runs;
        const fs::path run_dir =
            dir.empty() ? fs::path{} : dir / to_string(v) / run_dir_name(run_index);
        flat[static_cast<std::size_t>(idx)] = compute_quality_run(s, v, run_index, run_dir);
    });

    std::vector<QualityVariantResult> variants;
    for (std::size_t vi = 0; vi < s.variants.size(); ++vi) {
        std::vector<QualityRun> runs(flat.begin() + static_cast<std::ptrdiff_t>(vi) * s.runs,
                                     flat.begin() + static_cast<std::ptrdiff_t>(vi + 1) * s.runs);
        variants.push_back(aggregate_quality_variant(s.variants[vi], std::move(runs)));
    }
    QualityResult result = aggregate_quality(s, std::move(variants));
    if (!dir.empty()) {
        write_file(dir / "summary.json", quality_summary_json(s, result).dump(2) + "\n");
    }
    return result;
}

OfflineResult run_offline_learning(const Scenario& s, const fs::path& out_root, int jobs) {
    if (s.experiment != ExperimentKind::kOfflineLearning) {
        throw std::invalid_argument("scenario '" + s.name +
                                    "' is not an offline-learning experiment");
    }
    const fs::path dir = out_root.empty() ? fs::path{} : scenario_dir(out_root, s);
    if (!dir.empty()) write_snapshot(dir, s);
    const std::uint64_t hash = scenario_hash(s);

    const int max_window = *std::max_element(s.windows.begin(), s.windows.end());
    const std::int64_t truth_steps = s.offline_t0 + max_window - 1;

    std::vector<std::vector<OfflineRun>> per_run(static_cast<std::size_t>(s.runs));
    parallel_for(s.runs, jobs, [&](int run_index) {
        const SimConfig cfg = variant_config(s, s.truth_variant, run_index);
        const Trajectory traj = run(cfg, std::max<std::int64_t>(truth_steps, 1));
        const std::uint64_t de_base = stream_seed(cfg.seed, "de");
        const fs::path run_dir = dir.empty() ? fs::path{} : dir / to_string(s.truth_variant) /
                                                                run_dir_name(run_index);
        if (!run_dir.empty()) {
            fs::create_directories(run_dir);
            if (s.truth_variant != BoidVariant::kClassic) {
                save_adjacency(run_dir / "graph.edges", cfg.neighborhood.adjacency);
            }
        }
        for (const int w : s.windows) {
            OfflineRun r;
            r.window = w;
            r.run_index = run_index;
            r.seed = cfg.seed;
            DEConfig de = s.de;
            de.seed = substream_seed(de_base, static_cast<std::uint64_t>(w));
            r.result = offline_session(traj, s.offline_t0, w, cfg, de);
            if (!run_dir.empty()) {
                const std::string stem = "learn_w" + std::to_string(w);
                write_file(run_dir / (stem + ".json"), learn_result_json(r.result) + "\n");
                write_fitness_history_csv(run_dir / (stem + "_history.csv"), r.result, cfg.seed,
                                          hash);
            }
            per_run[static_cast<std::size_t>(run_index)].push_back(std::move(r));
        }
    });

    std::vector<OfflineRun> runs;  // ordered by (window, run)
    for (const int w : s.windows) {
        for (int run_index = 0; run_index < s.runs; ++run_index) {
            for (OfflineRun& r : per_run[static_cast<std::size_t>(run_index)]) {
                if (r.window == w) runs.push_back(std::move(r));
            }
        }
    }
    OfflineResult result = aggregate_offline(s, std::move(runs));
    if (!dir.empty()) {
        write_file(dir / "summary.json", offline_summary_json(s, result).dump(2) + "\n");
        write_file(dir / "best_estimations.csv", best_estimations_csv(result));
    }
    return result;
}

OnlineResult run_online_learning(const Scenario& s, const fs::path& out_root, int jobs) {
    if (s.experiment != ExperimentKind::kOnlineLearning) {
        throw std::invalid_argument("scenario '" + s.name +
                                    "' is not an online-learning experiment");
    }
    const fs::path dir = out_root.empty() ? fs::path{} : scenario_dir(out_root, s);
    if (!dir.empty()) write_snapshot(dir, s);

    const int per_window = s.runs;
    const int total = static_cast<int>(s.windows.size()) * per_window;
    std::vector<OnlineRun> flat(static_cast<std::size_t>(total));
    parallel_for(total, jobs, [&](int idx) {
        const int w = s.windows[static_cast<std::size_t>(idx / per_window)];
        const int run_index = idx % per_window;
        const SimConfig cfg = variant_config(s, s.truth_variant, run_index);
        OnlineParams params = s.online;
        params.total_steps = s.steps;
        params.window = w;
        DEConfig de = s.de;
        de.seed = substream_seed(stream_seed(cfg.seed, "de"), static_cast<std::uint64_t>(w));
        OnlineRun r;
        r.window = w;
        r.run_index = run_index;
        r.seed = cfg.seed;
        r.cycles = online_session(cfg, de, params);
        if (!dir.empty()) {
            const fs::path run_dir =
                dir / to_string(s.truth_variant) / run_dir_name(run_index);
            fs::create_directories(run_dir);
            if (s.truth_variant != BoidVariant::kClassic &&
                !fs::exists(run_dir / "graph.edges")) {
                save_adjacency(run_dir / "graph.edges", cfg.neighborhood.adjacency);
            }
            write_file(run_dir / ("online_w" + std::to_string(w) + ".json"),
                       online_run_json(r).dump(2) + "\n");
        }
        flat[static_cast<std::size_t>(idx)] = std::move(r);
    });

    OnlineResult result = aggregate_online(s, std::move(flat));
    if (!dir.empty()) {
        write_file(dir / "summary.json", online_summary_json(s, result).dump(2) + "\n");
    }
    return result;
}

void write_report(const fs::path& scenario_path) {
    const Scenario s = parse_scenario(read_file(scenario_path / "scenario.cfg"));
    const fs::path dir = scenario_path;
    switch (s.experiment) {
        case ExperimentKind::kSwarmQuality: {
            std::vector<QualityVariantResult> variants;
            for (const BoidVariant v : s.variants) {
                std::vector<QualityRun> runs;
                for (int run_index = 0; run_index < s.runs; ++run_index) {
                    const fs::path run_dir = dir / to_string(v) / run_dir_name(run_index);
                    QualityRun r;
                    r.seed = run_seed(s, run_index);
                    r.order_series = read_metric_csv(run_dir / "order.csv");
                    r.grouping_series = read_metric_csv(run_dir / "grouping.csv");
                    r.mean_order = series_mean(r.order_series);
                    r.mean_grouping = series_mean(r.grouping_series);
                    r.final_order = r.order_series.values.back().second;
                    r.graph_components =
                        v == BoidVariant::kClassic
                            ? 0
                            : load_adjacency(run_dir / "graph.edges").component_count();
                    runs.push_back(std::move(r));
                }
                variants.push_back(aggregate_quality_variant(v, std::move(runs)));
            }
            const QualityResult result = aggregate_quality(s, std::move(variants));
            write_file(dir / "summary.json", quality_summary_json(s, result).dump(2) + "\n");
            break;
        }
        case ExperimentKind::kOfflineLearning: {
            std::vector<OfflineRun> runs;
            for (const int w : s.windows) {
                for (int run_index = 0; run_index < s.runs; ++run_index) {
                    const fs::path run_dir =
                        dir / to_string(s.truth_variant) / run_dir_name(run_index);
                    OfflineRun r;
                    r.window = w;
                    r.run_index = run_index;
                    r.seed = run_seed(s, run_index);
                    r.result = learn_result_from_json(
                        read_file(run_dir / ("learn_w" + std::to_string(w) + ".json")));
                    runs.push_back(std::move(r));
                }
            }
            const OfflineResult result = aggregate_offline(s, std::move(runs));
            write_file(dir / "summary.json", offline_summary_json(s, result).dump(2) + "\n");
            write_file(dir / "best_estimations.csv", best_estimations_csv(result));
            break;
        }
        case ExperimentKind::kOnlineLearning: {
            std::vector<OnlineRun> runs;
            for (const int w : s.windows) {
                for (int run_index = 0; run_index < s.runs; ++run_index) {
                    const fs::path run_dir =
                        dir / to_string(s.truth_variant) / run_dir_name(run_index);
                    runs.push_back(online_run_from_json(
                        read_file(run_dir / ("online_w" + std::to_string(w) + ".json"))));
                }
            }
            const OnlineResult result = aggregate_online(s, std::move(runs));
            write_file(dir / "summary.json", online_summary_json(s, result).dump(2) + "\n");
            break;
        }
    }
}

}  // namespace boids
