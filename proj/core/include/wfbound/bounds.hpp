#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wfbound/distance.hpp"
#include "wfbound/features.hpp"

namespace wfbound {

/// Nearest-neighbor error under stratified k-fold CV together with the
/// Bayes-error lower bound derived from it.
struct BoundEstimate {
    double r_nn = 0.0;          // empirical NN error
    double r_star_lower = 0.0;  // Bayes-error lower bound
    std::size_t label_count = 0;
    std::size_t n = 0;          // dataset size
    std::size_t folds = 0;
    std::string metric;
    std::string schema;
    std::uint64_t seed = 0;
    std::vector<double> per_fold_errors;
};

struct CvError {
    double r_nn = 0.0;
    std::vector<double> per_fold_errors;
};

/// NN error under seeded stratified k-fold CV. Per label, instances are
/// shuffled with a stream derived from (seed, label) and dealt round-robin
/// into folds, so the assignment depends only on (label, per-label index).
/// Each held-out row takes the label of its nearest training row; distance
/// ties go to the lowest row index. StdEuclidean stds come from each fold's
/// training rows only (zero variance falls back to std = 1).
CvError nn_error_cv(const FeatureMatrix& m, const MetricSpec& metric,
                    std::size_t folds, std::uint64_t seed);

/// Levenshtein variant of the estimator over direction strings.
CvError nn_error_cv(const std::vector<std::string>& objects,
                    const std::vector<Label>& labels, std::size_t folds,
                    std::uint64_t seed);

/// Lower bound on the Bayes error from the NN error in an L-label setting:
/// ((L-1)/L) * (1 - sqrt(1 - min(L/(L-1) * r_nn, 1))).
double bayes_lower_bound(double r_nn, std::size_t label_count);

/// Asymptotic NN upper envelope r* * (2 - L/(L-1) * r*); the inverse of
/// bayes_lower_bound on [0, (L-1)/L]. Used by oracle tests.
double nn_upper_bound(double r_star, std::size_t label_count);

enum class KnRule { SqrtN, LogN };

/// Resubstitution error of the k_n-NN classifier (the query row counts among
/// its own neighbors). k_n = round(sqrt(n)) or max(1, round(ln n)). Majority
/// ties break toward the smallest label. Optimistically biased: converges to
/// the Bayes error from below.
double knn_resubstitution_estimate(const FeatureMatrix& m, const MetricSpec& metric,
                                   KnRule kn_rule);

/// Convenience wrapper: CV error plus the derived bound in one record.
BoundEstimate estimate_bound(const FeatureMatrix& m, const MetricSpec& metric,
                             std::size_t folds, std::uint64_t seed);
BoundEstimate estimate_bound(const std::vector<std::string>& objects,
                             const std::vector<Label>& labels, std::size_t folds,
                             std::uint64_t seed);

/// Plain majority k-NN prediction error of `test` against `train`; the
/// stand-in attack classifier for learning-curve validation. Vote ties break
/// toward the smallest label.
double knn_attack_error(const FeatureMatrix& train, const FeatureMatrix& test,
                        const MetricSpec& metric, std::size_t k);

}  // namespace wfbound
