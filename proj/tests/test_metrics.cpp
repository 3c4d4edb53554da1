#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <vector>

#include "boids/metrics.hpp"
#include "boids/rng.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

TEST_CASE("order parameter on aligned, opposed, and mixed headings") {
    const auto aligned = make_state({{0, 0, 1, 0}, {5, 5, 1, 0}, {9, 2, 1, 0}});
    CHECK(boids::order_parameter(aligned) == doctest::Approx(1.0));

    const auto opposed = make_state({{0, 0, 1, 0}, {5, 5, -1, 0}});
    CHECK(boids::order_parameter(opposed) == doctest::Approx(0.0));

    // Headings east, north, west: the sum is (0,1), so order is 1/3.
    const auto mixed = make_state({{0, 0, 1, 0}, {1, 0, 0, 1}, {2, 0, -1, 0}});
    CHECK(boids::order_parameter(mixed) == doctest::Approx(1.0 / 3.0));

    const auto single = make_state({{0, 0, 0.3, 0.4}});
    CHECK(boids::order_parameter(single) == doctest::Approx(1.0));
}

TEST_CASE("order parameter is normalized and rotation invariant") {
    boids::Rng rng(808);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<Eigen::Index>(1 + rng.below(40));
        auto s = random_state(rng, n, 100, 100, rng.uniform(0.5, 3.0));
        const double value = boids::order_parameter(s);
        CHECK(value >= 0.0);
        CHECK(value <= 1.0 + 1e-12);
        const double angle = rng.uniform(0.0, boids::kTwoPi);
        const double c = std::cos(angle), sn = std::sin(angle);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double vx = s.vx[i], vy = s.vy[i];
            s.vx[i] = c * vx - sn * vy;
            s.vy[i] = sn * vx + c * vy;
        }
        CHECK(boids::order_parameter(s) == doctest::Approx(value).epsilon(1e-9));
    }
}

TEST_CASE("grouping counts connected clumps") {
    // All coincident: one group.
    const auto coincident = make_state({{5, 5, 1, 0}, {5, 5, 1, 0}, {5, 5, 1, 0}});
    CHECK(boids::group_count(coincident, 50.0) == 1);

    // All pairwise distances above half the range: n groups.
    const auto scattered = make_state({{0, 0, 1, 0}, {100, 0, 1, 0}, {0, 100, 1, 0}});
    CHECK(boids::group_count(scattered, 50.0) == 3);

    // A chain with 20-unit links (half-range is 25): transitive closure makes
    // one group even though the ends are 80 apart.
    const auto chain = make_state(
        {{0, 0, 1, 0}, {20, 0, 1, 0}, {40, 0, 1, 0}, {60, 0, 1, 0}, {80, 0, 1, 0}});
    CHECK(boids::group_count(chain, 50.0) == 1);
    CHECK(bfs_components_oracle(chain, 50.0) == 1);
}

TEST_CASE("grouping equals the brute-force component oracle") {
    boids::Rng rng(1234);
    for (int trial = 0; trial < 80; ++trial) {
        const auto n = static_cast<Eigen::Index>(2 + rng.below(29));
        const auto s = random_state(rng, n, 60, 60);
        const double range = rng.uniform(2.0, 60.0);
        CHECK(boids::group_count(s, range) == bfs_components_oracle(s, range));
    }
}

TEST_CASE("grouping is invariant under relabeling and coincident additions") {
    boids::Rng rng(4321);
    for (int trial = 0; trial < 40; ++trial) {
        const auto n = static_cast<Eigen::Index>(3 + rng.below(20));
        const auto s = random_state(rng, n, 80, 80);
        const double range = 30.0;
        const auto base = boids::group_count(s, range);

        // Reverse the labels.
        boids::SwarmState reversed = s;
        for (Eigen::Index i = 0; i < n; ++i) {
            reversed.x[i] = s.x[n - 1 - i];
            reversed.y[i] = s.y[n - 1 - i];
            reversed.vx[i] = s.vx[n - 1 - i];
            reversed.vy[i] = s.vy[n - 1 - i];
        }
        CHECK(boids::group_count(reversed, range) == base);

        // Duplicate one boid in place: never more groups.
        boids::SwarmState grown;
        grown.resize(n + 1);
        grown.x.head(n) = s.x;
        grown.y.head(n) = s.y;
        grown.vx.head(n) = s.vx;
        grown.vy.head(n) = s.vy;
        const auto dup = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        grown.x[n] = s.x[dup];
        grown.y[n] = s.y[dup];
        grown.vx[n] = -s.vx[dup];
        grown.vy[n] = -s.vy[dup];
        CHECK(boids::group_count(grown, range) <= base);
    }
}

TEST_CASE("summary statistics") {
    const std::vector<double> flat{1, 1, 1};
    const auto s1 = boids::summarize(flat);
    CHECK(s1.mean == doctest::Approx(1.0));
    CHECK(s1.std_dev == doctest::Approx(0.0));

    std::vector<double> ramp(100);
    std::iota(ramp.begin(), ramp.end(), 0.0);
    const auto s2 = boids::summarize(ramp);
    CHECK(s2.p5 == 4.0);   // nearest rank: ceil(0.05*100) = 5th smallest
    CHECK(s2.p95 == 94.0); // ceil(0.95*100) = 95th smallest
    CHECK(s2.min == 0.0);
    CHECK(s2.max == 99.0);
    CHECK(s2.mean == doctest::Approx(49.5));

    const std::vector<double> single{3.25};
    const auto s3 = boids::summarize(single);
    CHECK(s3.mean == 3.25);
    CHECK(s3.p5 == 3.25);
    CHECK(s3.p95 == 3.25);
    CHECK(s3.min == 3.25);
    CHECK(s3.max == 3.25);
    CHECK(s3.std_dev == 0.0);

    CHECK_THROWS_AS(boids::summarize(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("summary ordering holds on metric-like data") {
    boids::Rng rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> values;
        const int n = 5 + static_cast<int>(rng.below(200));
        for (int i = 0; i < n; ++i) values.push_back(rng.uniform(0.0, 1.0));
        const auto st = boids::summarize(values);
        CHECK(st.min <= st.p5);
        CHECK(st.p5 <= st.p95);
        CHECK(st.p95 <= st.max);
        CHECK(st.mean >= st.min);
        CHECK(st.mean <= st.max);
    }
}

TEST_CASE("student t cdf matches reference values") {
    // Reference values from an established statistics package.
    CHECK(boids::student_t_cdf(1.0, 3.0) == doctest::Approx(0.804498890522115).epsilon(1e-12));
    CHECK(boids::student_t_cdf(2.5, 7.4) == doctest::Approx(0.980385427152861).epsilon(1e-12));
    CHECK(boids::student_t_cdf(-1.7, 12.0) ==
          doctest::Approx(0.0574399326976046).epsilon(1e-12));
    CHECK(boids::student_t_cdf(0.0, 5.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("welch t-test matches reference values") {
    const std::vector<double> a1{2.1, 2.5, 2.3, 2.7, 2.2};
    const std::vector<double> b1{2.9, 3.1, 3.3, 2.8};
    const auto r1 = boids::welch_t_test(a1, b1);
    CHECK(r1.t == doctest::Approx(-4.30227752567378).epsilon(1e-12));
    CHECK(r1.p == doctest::Approx(0.00381027091800812).epsilon(1e-9));
    CHECK(r1.dof == doctest::Approx(6.79524111204774).epsilon(1e-12));

    std::vector<double> a3(10), b3(12);
    std::iota(a3.begin(), a3.end(), 0.0);
    for (int i = 0; i < 12; ++i) b3[static_cast<std::size_t>(i)] = i * 1.5 + 0.3;
    const auto r3 = boids::welch_t_test(a3, b3);
    CHECK(r3.t == doctest::Approx(-2.21137657023939).epsilon(1e-12));
    CHECK(r3.p == doctest::Approx(0.0403724771075196).epsilon(1e-9));

    // Separated samples with tiny jitter: overwhelming significance.
    const std::vector<double> zeros{0, 0, 0, 0};
    const std::vector<double> ones{1.0, 1.0 + 1e-9, 1.0, 1.0 - 1e-9};
    CHECK(boids::welch_t_test(zeros, ones).p < 1e-3);
}

TEST_CASE("welch t-test conventions and symmetries") {
    const std::vector<double> same{1.5, 1.5, 1.5};
    const auto equal = boids::welch_t_test(same, same);
    CHECK(equal.t == 0.0);
    CHECK(equal.p == 1.0);

    const std::vector<double> lo{0, 0, 0};
    const std::vector<double> hi{1, 1, 1};
    const auto degenerate = boids::welch_t_test(hi, lo);
    CHECK(degenerate.p == 0.0);
    CHECK(degenerate.t > 0);

    boids::Rng rng(66);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> a, b;
        for (int i = 0; i < 8; ++i) a.push_back(rng.uniform(0, 2));
        for (int i = 0; i < 11; ++i) b.push_back(rng.uniform(0.5, 2.5));
        const auto ab = boids::welch_t_test(a, b);
        const auto ba = boids::welch_t_test(b, a);
        CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-12));
        CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));

        // Shifting both samples by a constant leaves the test unchanged.
        const double shift = rng.uniform(-100, 100);
        std::vector<double> a_shift = a, b_shift = b;
        for (double& v : a_shift) v += shift;
        for (double& v : b_shift) v += shift;
        const auto shifted = boids::welch_t_test(a_shift, b_shift);
        CHECK(shifted.p == doctest::Approx(ab.p).epsilon(1e-6));
    }

    CHECK_THROWS_AS(boids::welch_t_test(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("metric series CSV round-trips") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "boids_metric_test";
    fs::create_directories(dir);
    boids::MetricSeries series;
    series.name = "order";
    series.values = {{0, 0.25}, {1, 0.5000000000000001}, {2, 1.0 / 3.0}};
    boids::write_metric_csv(dir / "m.csv", series, 42, 99);
    const auto loaded = boids::read_metric_csv(dir / "m.csv");
    CHECK(loaded.name == "order");
    REQUIRE(loaded.values.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(loaded.values[i].first == series.values[i].first);
        CHECK(loaded.values[i].second == series.values[i].second);  // exact round trip
    }
    fs::remove_all(dir);
}
