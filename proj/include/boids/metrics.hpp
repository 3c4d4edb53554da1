#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "boids/state.hpp"

namespace boids {

// Magnitude of the mean unit heading vector, in [0, 1]. 1 means perfect
// alignment, 0 means headings cancel out.
double order_parameter(const SwarmState& s);

// Number of connected components of the graph linking boids closer than
// attraction_range/2 (strict). 1 means a single flock, n means fully
// scattered.
Eigen::Index group_count(const SwarmState& s, double attraction_range);

struct SummaryStats {
    double mean = 0;
    double std_dev = 0;  // sample standard deviation; 0 for a single value
    double p5 = 0;       // nearest-rank percentiles
    double p95 = 0;
    double min = 0;
    double max = 0;
};

// Throws std::invalid_argument on empty input.
SummaryStats summarize(std::span<const double> values);

struct WelchResult {
    double t = 0;
    double p = 1;
    double dof = 0;
};

// Welch's unequal-variance two-sample t-test, two-sided p-value. Both
// samples need at least two elements. Two zero-variance samples with equal
// means give p = 1 by convention, with different means p = 0.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

// CDF of Student's t distribution, via the regularized incomplete beta
// function. dof > 0.
double student_t_cdf(double t, double dof);

double regularized_incomplete_beta(double a, double b, double x);

struct MetricSeries {
    std::string name;
    std::vector<std::pair<std::int64_t, double>> values;  // (step, value), steps increasing
};

// CSV with a "# name=<label>" comment header and columns step,value.
void write_metric_csv(const std::filesystem::path& path, const MetricSeries& series,
                      std::uint64_t seed, std::uint64_t cfg_hash);
MetricSeries read_metric_csv(const std::filesystem::path& path);

}  // namespace boids
