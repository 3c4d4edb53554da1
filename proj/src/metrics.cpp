#include "boids/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "boids/text_io.hpp"

namespace boids {

double order_parameter(const SwarmState& s) {
    const Eigen::Index n = s.size();
    if (n < 1) throw std::invalid_argument("order_parameter: empty swarm");
    double sx = 0, sy = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = std::sqrt(s.vx[i] * s.vx[i] + s.vy[i] * s.vy[i]);
        if (norm > 0) {
            sx += s.vx[i] / norm;
            sy += s.vy[i] / norm;
        }
    }
    return std::sqrt(sx * sx + sy * sy) / static_cast<double>(n);
}

namespace {

struct DisjointSet {
    std::vector<Eigen::Index> parent;

    explicit DisjointSet(Eigen::Index n) : parent(n) {
        std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    }

    Eigen::Index find(Eigen::Index v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    }

    // Returns true when the two sets were distinct.
    bool unite(Eigen::Index a, Eigen::Index b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

}  // namespace

Eigen::Index group_count(const SwarmState& s, double attraction_range) {
    if (!(attraction_range > 0)) {
        throw std::invalid_argument("group_count: attraction_range must be > 0");
    }
    const Eigen::Index n = s.size();
    const double half = attraction_range / 2.0;
    const double threshold2 = half * half;
    DisjointSet dsu(n);
    Eigen::Index components = n;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double dx = s.x[j] - s.x[i];
            const double dy = s.y[j] - s.y[i];
            if (dx * dx + dy * dy < threshold2 && dsu.unite(i, j)) --components;
        }
    }
    return components;
}

SummaryStats summarize(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: empty input");
    const auto n = values.size();
    SummaryStats stats;
    stats.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    if (n > 1) {
        double ss = 0;
        for (const double v : values) ss += (v - stats.mean) * (v - stats.mean);
        stats.std_dev = std::sqrt(ss / static_cast<double>(n - 1));
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    // Nearest-rank percentile: the ceil(p*n/100)-th smallest value.
    const auto nearest_rank = [&](std::size_t pct) {
        std::size_t rank = (pct * n + 99) / 100;
        if (rank < 1) rank = 1;
        return sorted[rank - 1];
    };
    stats.p5 = nearest_rank(5);
    stats.p95 = nearest_rank(95);
    stats.min = sorted.front();
    stats.max = sorted.back();
    return stats;
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    return h;  // converged enough for the precisions used here
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0) || !(b > 0)) {
        throw std::invalid_argument("regularized_incomplete_beta: a, b must be > 0");
    }
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(log_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - bt * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
    if (!(dof > 0)) throw std::invalid_argument("student_t_cdf: dof must be > 0");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double x = dof / (dof + t * t);
    const double tail = 0.5 * regularized_incomplete_beta(dof / 2.0, 0.5, x);
    return t >= 0 ? 1.0 - tail : tail;
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw std::invalid_argument("welch_t_test: both samples need at least 2 values");
    }
    const auto moments = [](std::span<const double> v) {
        const double mean =
            std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0;
        for (const double x : v) ss += (x - mean) * (x - mean);
        return std::pair{mean, ss / static_cast<double>(v.size() - 1)};
    };
    const auto [ma, va] = moments(a);
    const auto [mb, vb] = moments(b);
    WelchResult r;
    if (va == 0.0 && vb == 0.0) {
        if (ma == mb) return {0.0, 1.0, 0.0};
        return {ma > mb ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity(),
                0.0, 0.0};
    }
    const double sa = va / static_cast<double>(a.size());
    const double sb = vb / static_cast<double>(b.size());
    r.t = (ma - mb) / std::sqrt(sa + sb);
    r.dof = (sa + sb) * (sa + sb) /
            (sa * sa / static_cast<double>(a.size() - 1) +
             sb * sb / static_cast<double>(b.size() - 1));
    r.p = 2.0 * (1.0 - student_t_cdf(std::abs(r.t), r.dof));
    if (r.p < 0.0) r.p = 0.0;
    if (r.p > 1.0) r.p = 1.0;
    return r;
}

void write_metric_csv(const std::filesystem::path& path, const MetricSeries& series,
                      std::uint64_t seed, std::uint64_t cfg_hash) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# name=" << series.name << '\n';
    out << "# seed=" << seed << '\n';
    out << "# config_hash=" << cfg_hash << '\n';
    out << "step,value\n";
    for (const auto& [step, value] : series.values) {
        out << step << ',' << format_double(value) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

MetricSeries read_metric_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    MetricSeries series;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        const auto body = trim(line);
        if (body.empty()) continue;
        if (body.starts_with("#")) {
            const auto rest = trim(body.substr(1));
            if (rest.starts_with("name=")) series.name = std::string(rest.substr(5));
            continue;
        }
        if (!saw_header) {
            if (body != "step,value") {
                throw std::invalid_argument(path.string() + ": expected 'step,value' header");
            }
            saw_header = true;
            continue;
        }
        const auto comma = body.find(',');
        if (comma == std::string_view::npos) {
            throw std::invalid_argument(path.string() + ": malformed row '" + std::string(body) +
                                        "'");
        }
        series.values.emplace_back(parse_int(body.substr(0, comma), "step"),
                                   parse_double(trim(body.substr(comma + 1)), "value"));
    }
    return series;
}

}  // namespace boids
