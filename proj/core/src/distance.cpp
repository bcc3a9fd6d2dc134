#include "wfbound/distance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wfbound/error.hpp"

namespace wfbound {

const char* metric_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::Euclidean: return "euclidean";
        case MetricKind::StdEuclidean: return "std-euclidean";
        case MetricKind::CityBlock: return "cityblock";
        case MetricKind::Levenshtein: return "levenshtein";
    }
    return "unknown";
}

MetricKind metric_from_name(std::string_view name) {
    if (name == "euclidean") return MetricKind::Euclidean;
    if (name == "std-euclidean" || name == "std_euclidean")
        return MetricKind::StdEuclidean;
    if (name == "cityblock" || name == "city-block") return MetricKind::CityBlock;
    if (name == "levenshtein") return MetricKind::Levenshtein;
    throw config_error("unknown metric: " + std::string(name));
}

namespace {
void check_lengths(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw validation_error("vector length mismatch: " + std::to_string(x.size()) +
                               " vs " + std::to_string(y.size()));
}
}  // namespace

double euclidean(std::span<const double> x, std::span<const double> y) {
    check_lengths(x, y);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

double std_euclidean(std::span<const double> x, std::span<const double> y,
                     std::span<const double> stds) {
    check_lengths(x, y);
    if (stds.size() != x.size())
        throw validation_error("stds length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(stds[i] > 0.0)) throw validation_error("non-positive std");
        const double d = (x[i] - y[i]) / stds[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

double cityblock(std::span<const double> x, std::span<const double> y) {
    check_lengths(x, y);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x[i] - y[i]);
    return acc;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);  // keep the row over the shorter string
    const std::size_t m = a.size();
    const std::size_t n = b.size();
    if (m == 0) return n;

    std::vector<std::size_t> row(m + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t j = 1; j <= n; ++j) {
        std::size_t corner = row[0];  // dp[j-1][0]
        row[0] = j;
        for (std::size_t i = 1; i <= m; ++i) {
            const std::size_t up = row[i];
            const std::size_t sub = corner + (a[i - 1] == b[j - 1] ? 0 : 1);
            row[i] = std::min({row[i - 1] + 1, up + 1, sub});
            corner = up;
        }
    }
    return row[m];
}

}  // namespace wfbound
