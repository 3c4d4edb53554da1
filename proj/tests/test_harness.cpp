#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "boids/harness.hpp"

namespace fs = std::filesystem;

using boids::BoidVariant;
using boids::ExperimentKind;
using boids::Scenario;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Scenario tiny_quality_scenario() {
    Scenario s = boids::parse_scenario(
        "name = tiny\n"
        "experiment = swarm-quality\n"
        "space_w = 150\nspace_h = 150\nn = 12\nseed = 77\n"
        "er.m_edges = 18\nws.k = 4\nba.m0 = 4\nba.m_per_node = 2\n"
        "runs = 2\nsteps = 60\nvariants = classic,er,ws,ba\n");
    return s;
}

}  // namespace

TEST_CASE("scenario files parse, serialize, and reject junk") {
    const std::string text =
        "name = demo\n"
        "experiment = offline-learning\n"
        "neighborhood.kind = network\n"
        "topology = ws\n"
        "n = 40\n"
        "seed = 9\n"
        "windows = 2,4\n"
        "runs = 3\n"
        "de.generations = 25\n";
    const Scenario s = boids::parse_scenario(text);
    CHECK(s.name == "demo");
    CHECK(s.experiment == ExperimentKind::kOfflineLearning);
    CHECK(s.truth_variant == BoidVariant::kWs);
    CHECK(s.windows == std::vector<int>{2, 4});
    CHECK(s.de.generations == 25);
    CHECK(s.de.pop_size == 100);

    // Round trip through the canonical serialization.
    const Scenario back = boids::parse_scenario(boids::serialize_scenario(s));
    CHECK(boids::serialize_scenario(back) == boids::serialize_scenario(s));
    CHECK(boids::scenario_hash(back) == boids::scenario_hash(s));

    CHECK_THROWS_WITH_AS(boids::parse_scenario(text + "mystery = 1\n"),
                         doctest::Contains("mystery"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(boids::parse_scenario("w_c = -1\n"), doctest::Contains("w_c"),
                         std::invalid_argument);
    CHECK_THROWS_AS(boids::parse_scenario("experiment = guesswork\n"), std::invalid_argument);
    CHECK_THROWS_AS(boids::parse_scenario("neighborhood.kind = network\n"),
                    std::invalid_argument);  // missing topology
    CHECK_THROWS_AS(boids::parse_scenario("topology = er\n"), std::invalid_argument);
    CHECK_THROWS_AS(boids::parse_scenario("windows = 1,2\n"), std::invalid_argument);
}

TEST_CASE("online scenarios default to the 50-generation cap") {
    const Scenario s = boids::parse_scenario("experiment = online-learning\n");
    CHECK(s.de.generations == 50);
    CHECK(s.online.learn_steps == 600);
    CHECK(s.online.predict_steps == 1200);
    CHECK(s.online.cycle_period == 667);
}

TEST_CASE("desk preset rescales learning scenarios") {
    Scenario s = boids::parse_scenario("experiment = offline-learning\nruns = 30\n");
    boids::apply_preset(s, "desk");
    CHECK(s.sim.n == 50);
    CHECK(s.steps == 2000);
    CHECK(s.runs == 10);
    CHECK(s.de.generations == 100);

    Scenario q = tiny_quality_scenario();
    const int quality_runs = q.runs;
    boids::apply_preset(q, "desk");
    CHECK(q.sim.n == 50);
    CHECK(q.runs == quality_runs);  // swarm quality keeps its run count

    Scenario o = boids::parse_scenario("experiment = online-learning\n");
    boids::apply_preset(o, "desk");
    CHECK(o.de.generations == 50);  // the online cap is part of the protocol

    Scenario p = tiny_quality_scenario();
    boids::apply_preset(p, "paper");
    CHECK(p.sim.n == 12);
    CHECK_THROWS_AS(boids::apply_preset(p, "bench"), std::invalid_argument);
}

TEST_CASE("run seeds are base plus run index; streams are decoupled") {
    const Scenario s = tiny_quality_scenario();
    CHECK(boids::run_seed(s, 0) == 77);
    CHECK(boids::run_seed(s, 5) == 82);
    const auto cfg0 = boids::variant_config(s, BoidVariant::kEr, 0);
    const auto cfg1 = boids::variant_config(s, BoidVariant::kEr, 1);
    CHECK(cfg0.seed == 77);
    CHECK(cfg1.seed == 78);
    CHECK(cfg0.neighborhood.adjacency.edges() != cfg1.neighborhood.adjacency.edges());
    // Same run regenerates the same graph.
    const auto cfg0b = boids::variant_config(s, BoidVariant::kEr, 0);
    CHECK(cfg0b.neighborhood.adjacency.edges() == cfg0.neighborhood.adjacency.edges());
}

TEST_CASE("parallel_for covers every index exactly once") {
    std::vector<int> hits(200, 0);
    boids::parallel_for(200, 4, [&](int i) { hits[static_cast<std::size_t>(i)] += 1; });
    for (const int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(boids::parallel_for(3, 2, [](int i) {
        if (i == 1) throw std::runtime_error("boom");
    }), std::runtime_error);
}

TEST_CASE("median of odd and even counts") {
    CHECK(boids::median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(boids::median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK_THROWS_AS(boids::median({}), std::invalid_argument);
}

TEST_CASE("swarm-quality end to end: artifacts, determinism, report") {
    const Scenario s = tiny_quality_scenario();
    const fs::path root = fs::temp_directory_path() / "boids_harness_quality";
    fs::remove_all(root);

    const auto result = boids::run_swarm_quality(s, root, 2);
    REQUIRE(result.variants.size() == 4);
    for (const auto& v : result.variants) {
        REQUIRE(v.runs.size() == 2);
        for (const auto& r : v.runs) {
            CHECK(r.order_series.values.size() == 61);
            CHECK(r.grouping_series.values.size() == 61);
            CHECK(r.mean_order > 0.0);
            CHECK(r.mean_order <= 1.0);
            if (v.variant != BoidVariant::kClassic) CHECK(r.graph_components >= 1);
        }
    }
    REQUIRE(result.comparisons.size() == 3);  // er, ws, ba against classic
    for (const auto& c : result.comparisons) {
        CHECK(c.mean_order_test.p >= 0.0);
        CHECK(c.mean_order_test.p <= 1.0);
    }

    const fs::path dir = root / "tiny";
    CHECK(fs::exists(dir / "scenario.cfg"));
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(fs::exists(dir / "classic" / "run_000" / "order.csv"));
    CHECK(fs::exists(dir / "er" / "run_001" / "graph.edges"));
    CHECK_FALSE(fs::exists(dir / "classic" / "run_000" / "graph.edges"));

    // Byte-identical on a second invocation.
    const std::string summary_first = slurp(dir / "summary.json");
    const std::string order_first = slurp(dir / "er" / "run_000" / "order.csv");
    boids::run_swarm_quality(s, root, 1);
    CHECK(slurp(dir / "summary.json") == summary_first);
    CHECK(slurp(dir / "er" / "run_000" / "order.csv") == order_first);

    // The report rebuilds the same summary from the persisted artifacts.
    fs::remove(dir / "summary.json");
    boids::write_report(dir);
    CHECK(slurp(dir / "summary.json") == summary_first);

    fs::remove_all(root);
}

TEST_CASE("a single boid is perfectly ordered and forms one group") {
    const Scenario s = boids::parse_scenario(
        "name = solo\nexperiment = swarm-quality\nn = 1\nruns = 1\nsteps = 40\n"
        "variants = classic\nseed = 3\n");
    const auto result = boids::run_swarm_quality(s, "", 1);
    for (const auto& [step, value] : result.variants.front().runs.front().order_series.values) {
        CHECK(value == doctest::Approx(1.0));
    }
    for (const auto& [step, value] :
         result.variants.front().runs.front().grouping_series.values) {
        CHECK(value == 1.0);
    }
}

TEST_CASE("offline learning end to end with aggregation and report") {
    Scenario s = boids::parse_scenario(
        "name = tiny_off\n"
        "experiment = offline-learning\n"
        "space_w = 150\nspace_h = 150\nn = 12\nseed = 5\n"
        "neighborhood.kind = network\ntopology = er\ner.m_edges = 18\n"
        "windows = 2,4\nruns = 3\nde.pop_size = 14\nde.generations = 10\n");
    const fs::path root = fs::temp_directory_path() / "boids_harness_offline";
    fs::remove_all(root);

    const auto result = boids::run_offline_learning(s, root, 2);
    REQUIRE(result.runs.size() == 6);  // 2 windows x 3 runs
    REQUIRE(result.aggregates.size() == 2);
    for (const auto& agg : result.aggregates) {
        CHECK(agg.median_eps >= 0.0);
        CHECK(agg.best_eps <= agg.median_eps);
    }
    // Runs are ordered by (window, run) and seeded base+run.
    CHECK(result.runs[0].window == 2);
    CHECK(result.runs[3].window == 4);
    CHECK(result.runs[0].seed == 5);
    CHECK(result.runs[1].seed == 6);

    const fs::path dir = root / "tiny_off";
    CHECK(fs::exists(dir / "er" / "run_000" / "learn_w2.json"));
    CHECK(fs::exists(dir / "er" / "run_002" / "learn_w4_history.csv"));
    CHECK(fs::exists(dir / "best_estimations.csv"));
    const std::string summary_first = slurp(dir / "summary.json");
    const std::string best_first = slurp(dir / "best_estimations.csv");

    // best_estimations.csv: header plus one row per window.
    int lines = 0;
    std::istringstream rows(best_first);
    std::string line;
    while (std::getline(rows, line)) {
        if (!line.empty()) ++lines;
    }
    CHECK(lines == 3);

    boids::write_report(dir);
    CHECK(slurp(dir / "summary.json") == summary_first);
    CHECK(slurp(dir / "best_estimations.csv") == best_first);
    fs::remove_all(root);
}

TEST_CASE("online learning end to end with aggregation and report") {
    Scenario s = boids::parse_scenario(
        "name = tiny_on\n"
        "experiment = online-learning\n"
        "space_w = 150\nspace_h = 150\nn = 10\nseed = 2\n"
        "steps = 700\nwindows = 2\nruns = 2\n"
        "de.pop_size = 12\nde.generations = 6\n"
        "online.learn_steps = 60\nonline.predict_steps = 50\nonline.cycle_period = 220\n"
        "online.top_k = 2\n");
    const fs::path root = fs::temp_directory_path() / "boids_harness_online";
    fs::remove_all(root);

    const auto result = boids::run_online_learning(s, root, 2);
    REQUIRE(result.runs.size() == 2);
    const std::size_t cycles = result.runs.front().cycles.size();
    CHECK(cycles == 3);
    REQUIRE(result.aggregates.size() == 1);
    CHECK(result.aggregates.front().mean_eps_per_cycle.size() == cycles);
    CHECK(result.aggregates.front().mean_cum_pred_per_cycle.size() == cycles);

    const fs::path dir = root / "tiny_on";
    CHECK(fs::exists(dir / "classic" / "run_000" / "online_w2.json"));
    const std::string summary_first = slurp(dir / "summary.json");
    boids::write_report(dir);
    CHECK(slurp(dir / "summary.json") == summary_first);
    fs::remove_all(root);
}
