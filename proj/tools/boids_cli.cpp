#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "boids/harness.hpp"

namespace {

constexpr const char* kScenarioKeys = R"(Scenario file keys (key = value, '#' comments, unknown keys rejected):
  name, experiment (swarm-quality|offline-learning|online-learning)
  space_w, space_h, n, w_c, w_a, w_s, d_s, speed,
  neighborhood.kind (vision|network), vision_r, vision_a, seed
  topology (er|ws|ba), er.m_edges, ws.k, ws.p_rewire, ba.m0, ba.m_per_node,
  graph_file
  r_a, runs, steps, windows (comma list), offline.t0
  de.pop_size, de.generations, de.f, de.cr
  online.learn_steps, online.predict_steps, online.cycle_period, online.top_k
  variants (comma list of classic,er,ws,ba), save_trajectories (true|false))";

struct Options {
    std::string scenario;
    std::string out;
    std::string preset = "paper";
    std::optional<std::uint64_t> seed;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
};

void add_common(CLI::App* cmd, Options& opt, bool scenario_required) {
    auto* scenario = cmd->add_option("--scenario", opt.scenario, "Scenario file path");
    if (scenario_required) scenario->required();
    cmd->add_option("--out", opt.out, "Output directory")->required();
    cmd->add_option("--preset", opt.preset, "Preset: desk or paper (default paper)");
    cmd->add_option("--seed", opt.seed, "Override the scenario base seed");
    cmd->add_option("--jobs", opt.jobs, "Worker threads for independent runs");
    cmd->footer(kScenarioKeys);
}

boids::Scenario resolve(const Options& opt) {
    boids::Scenario s = boids::load_scenario(opt.scenario);
    boids::apply_preset(s, opt.preset);
    if (opt.seed) s.sim.seed = *opt.seed;
    return s;
}

void banner(const boids::Scenario& s, const Options& opt) {
    std::cout << "# resolved scenario (preset=" << opt.preset << ")\n"
              << boids::serialize_scenario(s) << "# base_seed = " << s.sim.seed
              << "\n# config_hash = " << boids::scenario_hash(s) << "\n# jobs = " << opt.jobs
              << std::endl;
}

void require_experiment(const boids::Scenario& s, boids::ExperimentKind kind,
                        const std::string& subcommand) {
    if (s.experiment != kind) {
        throw std::invalid_argument("scenario '" + s.name + "' does not match the " +
                                    subcommand + " subcommand (check the experiment key)");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boids swarm simulator with vision- and network-based neighborhoods,\n"
                 "swarm quality metrics, and a differential-evolution observer that\n"
                 "infers rule parameters from trajectories."};
    app.require_subcommand(1);
    app.footer(kScenarioKeys);

    Options opt;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Run the swarm-quality experiment: trajectories plus order/grouping metrics");
    CLI::App* learn_offline = app.add_subcommand(
        "learn-offline", "Run the offline learning experiment over the configured windows");
    CLI::App* learn_online = app.add_subcommand(
        "learn-online", "Run the cyclic sample-learn-predict experiment");
    CLI::App* report = app.add_subcommand(
        "report", "Re-aggregate summaries from persisted per-run artifacts (no simulation)");
    for (CLI::App* cmd : {simulate, learn_offline, learn_online, report}) {
        add_common(cmd, opt, true);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }

    try {
        if (report->parsed()) {
            const boids::Scenario s = resolve(opt);
            const std::filesystem::path dir = std::filesystem::path(opt.out) / s.name;
            if (!std::filesystem::exists(dir / "scenario.cfg")) {
                throw std::invalid_argument("no persisted artifacts under " + dir.string());
            }
            boids::write_report(dir);
            std::cout << "report written to " << (dir / "summary.json").string() << std::endl;
            return 0;
        }
        const boids::Scenario s = resolve(opt);
        banner(s, opt);
        if (simulate->parsed()) {
            require_experiment(s, boids::ExperimentKind::kSwarmQuality, "simulate");
            boids::Scenario with_traj = s;
            with_traj.save_trajectories = true;  // simulate always dumps trajectories
            boids::run_swarm_quality(with_traj, opt.out, opt.jobs);
        } else if (learn_offline->parsed()) {
            require_experiment(s, boids::ExperimentKind::kOfflineLearning, "learn-offline");
            boids::run_offline_learning(s, opt.out, opt.jobs);
        } else if (learn_online->parsed()) {
            require_experiment(s, boids::ExperimentKind::kOnlineLearning, "learn-online");
            boids::run_online_learning(s, opt.out, opt.jobs);
        }
        std::cout << "artifacts written to "
                  << (std::filesystem::path(opt.out) / s.name).string() << std::endl;
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << std::endl;
        return 2;
    }
}
