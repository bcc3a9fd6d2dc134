#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wfbound {

enum class MetricKind { Euclidean, StdEuclidean, CityBlock, Levenshtein };

/// Metric selection for the NN estimator. `stds` applies only to
/// StdEuclidean when distances are computed directly; during cross
/// validation the per-dimension stds are recomputed from each fold's
/// training rows (zero-variance dimensions fall back to std = 1).
struct MetricSpec {
    MetricKind kind = MetricKind::Euclidean;
    std::vector<double> stds;

    static MetricSpec euclidean() { return {MetricKind::Euclidean, {}}; }
    static MetricSpec std_euclidean(std::vector<double> stds) {
        return {MetricKind::StdEuclidean, std::move(stds)};
    }
    static MetricSpec cityblock() { return {MetricKind::CityBlock, {}}; }
    static MetricSpec levenshtein() { return {MetricKind::Levenshtein, {}}; }
};

const char* metric_name(MetricKind kind);
MetricKind metric_from_name(std::string_view name);

double euclidean(std::span<const double> x, std::span<const double> y);
double std_euclidean(std::span<const double> x, std::span<const double> y,
                     std::span<const double> stds);
double cityblock(std::span<const double> x, std::span<const double> y);

/// Unit-cost edit distance (insert/delete/substitute).
std::size_t levenshtein(std::string_view a, std::string_view b);

}  // namespace wfbound
