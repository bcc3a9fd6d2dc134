#include "wfbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "wfbound/error.hpp"
#include "wfbound/parallel.hpp"
#include "wfbound/rng.hpp"

namespace wfbound {

namespace {

std::uint64_t label_stream(std::uint64_t seed, const Label& label) {
    const std::string key = label.is_unmonitored() ? "u:" : "m:" + label.page();
    return derive_stream(seed, fnv1a(key));
}

/// Fold id per row: per label, a seeded shuffle dealt round-robin, so the
/// assignment is a function of (label, per-label index) only.
std::vector<std::size_t> stratified_folds(const std::vector<Label>& labels,
                                          std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw validation_error("cross validation requires folds >= 2");
    std::map<Label, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
    if (groups.size() < 2)
        throw validation_error("cross validation requires at least 2 distinct labels");
    std::vector<std::size_t> fold_of(labels.size());
    for (const auto& [label, rows] : groups) {
        if (rows.size() < folds)
            throw validation_error("label " + label.display() + " has " +
                                   std::to_string(rows.size()) +
                                   " instances, fewer than " + std::to_string(folds) +
                                   " folds");
        std::vector<std::size_t> order(rows.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(label_stream(seed, label));
        rng.shuffle(order);
        for (std::size_t k = 0; k < order.size(); ++k)
            fold_of[rows[order[k]]] = k % folds;
    }
    return fold_of;
}

/// Population stds over the training rows of one fold; zero variance maps
/// to 1 so the dimension stays in play unscaled.
std::vector<double> training_stds(const FeatureMatrix& m,
                                  const std::vector<std::size_t>& fold_of,
                                  std::size_t held_out) {
    const std::size_t d = m.dim();
    std::vector<double> mean(d, 0.0), sq(d, 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (fold_of[i] == held_out) continue;
        ++count;
        auto row = m.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            mean[j] += row[j];
            sq[j] += row[j] * row[j];
        }
    }
    std::vector<double> stds(d, 1.0);
    if (count == 0) return stds;
    for (std::size_t j = 0; j < d; ++j) {
        const double mu = mean[j] / static_cast<double>(count);
        const double var = sq[j] / static_cast<double>(count) - mu * mu;
        stds[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return stds;
}

double sq_euclidean(std::span<const double> x, std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        acc += diff * diff;
    }
    return acc;
}

double sq_std_euclidean(std::span<const double> x, std::span<const double> y,
                        std::span<const double> stds) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = (x[i] - y[i]) / stds[i];
        acc += diff * diff;
    }
    return acc;
}

/// Shared CV loop. dist(fold, i, j) must be ready to serve any pair for the
/// given held-out fold (per-fold standardization happens in the caller).
template <typename DistFn>
CvError cv_nn(std::size_t n, const std::vector<Label>& labels,
              const std::vector<std::size_t>& fold_of, std::size_t folds,
              DistFn&& dist) {
    std::vector<char> missed(n, 0);
    parallel_for(n, [&](std::size_t i) {
        const std::size_t f = fold_of[i];
        double best = 0.0;
        std::size_t best_j = n;  // ties: lowest training-row index wins
        for (std::size_t j = 0; j < n; ++j) {
            if (fold_of[j] == f) continue;
            const double d = dist(f, i, j);
            if (best_j == n || d < best) {
                best = d;
                best_j = j;
            }
        }
        missed[i] = labels[i] != labels[best_j];
    });
    CvError result;
    std::vector<std::size_t> errors(folds, 0), sizes(folds, 0);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ++sizes[fold_of[i]];
        if (missed[i]) {
            ++errors[fold_of[i]];
            ++total;
        }
    }
    result.r_nn = static_cast<double>(total) / static_cast<double>(n);
    result.per_fold_errors.resize(folds);
    for (std::size_t f = 0; f < folds; ++f)
        result.per_fold_errors[f] =
            sizes[f] ? static_cast<double>(errors[f]) / static_cast<double>(sizes[f])
                     : 0.0;
    return result;
}

Label majority_label(const std::vector<std::pair<double, std::size_t>>& neighbors,
                     const std::vector<Label>& labels, std::size_t k) {
    std::map<Label, std::size_t> votes;
    for (std::size_t v = 0; v < k && v < neighbors.size(); ++v)
        ++votes[labels[neighbors[v].second]];
    // map iterates labels in order, so the first maximum is the smallest label
    const Label* best = nullptr;
    std::size_t best_votes = 0;
    for (const auto& [label, count] : votes) {
        if (count > best_votes) {
            best_votes = count;
            best = &label;
        }
    }
    return *best;
}

}  // namespace

CvError nn_error_cv(const FeatureMatrix& m, const MetricSpec& metric,
                    std::size_t folds, std::uint64_t seed) {
    if (m.rows() == 0) throw validation_error("empty feature matrix");
    if (metric.kind == MetricKind::Levenshtein)
        throw config_error("levenshtein applies to direction strings, not vectors");
    const std::vector<std::size_t> fold_of = stratified_folds(m.labels(), folds, seed);

    std::vector<std::vector<double>> fold_stds;
    if (metric.kind == MetricKind::StdEuclidean) {
        fold_stds.resize(folds);
        for (std::size_t f = 0; f < folds; ++f) fold_stds[f] = training_stds(m, fold_of, f);
    }
    auto dist = [&](std::size_t f, std::size_t i, std::size_t j) {
        switch (metric.kind) {
            case MetricKind::Euclidean: return sq_euclidean(m.row(i), m.row(j));
            case MetricKind::StdEuclidean:
                return sq_std_euclidean(m.row(i), m.row(j), fold_stds[f]);
            case MetricKind::CityBlock: return cityblock(m.row(i), m.row(j));
            default: return 0.0;
        }
    };
    return cv_nn(m.rows(), m.labels(), fold_of, folds, dist);
}

CvError nn_error_cv(const std::vector<std::string>& objects,
                    const std::vector<Label>& labels, std::size_t folds,
                    std::uint64_t seed) {
    if (objects.size() != labels.size())
        throw validation_error("objects/labels length mismatch");
    if (objects.empty()) throw validation_error("empty object list");
    const std::vector<std::size_t> fold_of = stratified_folds(labels, folds, seed);
    auto dist = [&](std::size_t, std::size_t i, std::size_t j) {
        return static_cast<double>(levenshtein(objects[i], objects[j]));
    };
    return cv_nn(objects.size(), labels, fold_of, folds, dist);
}

double bayes_lower_bound(double r_nn, std::size_t label_count) {
    if (label_count < 2) throw validation_error("bayes_lower_bound requires L >= 2");
    if (r_nn < 0.0 || r_nn > 1.0)
        throw validation_error("r_nn must be a probability");
    const double l = static_cast<double>(label_count);
    const double ratio = l / (l - 1.0);
    const double radicand = 1.0 - std::min(ratio * r_nn, 1.0);
    return (l - 1.0) / l * (1.0 - std::sqrt(radicand));
}

double nn_upper_bound(double r_star, std::size_t label_count) {
    if (label_count < 2) throw validation_error("nn_upper_bound requires L >= 2");
    const double l = static_cast<double>(label_count);
    const double guess = (l - 1.0) / l;
    if (r_star < 0.0 || r_star > guess + 1e-15)
        throw validation_error("r_star must lie in [0, (L-1)/L]");
    return r_star * (2.0 - l / (l - 1.0) * r_star);
}

double knn_resubstitution_estimate(const FeatureMatrix& m, const MetricSpec& metric,
                                   KnRule kn_rule) {
    const std::size_t n = m.rows();
    if (n < 3) throw validation_error("resubstitution estimate requires n >= 3");
    if (metric.kind == MetricKind::Levenshtein)
        throw config_error("levenshtein applies to direction strings, not vectors");
    std::size_t kn =
        kn_rule == KnRule::SqrtN
            ? static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))))
            : std::max<std::size_t>(
                  1, static_cast<std::size_t>(std::llround(std::log(static_cast<double>(n)))));
    if (kn > n) kn = n;

    std::vector<double> stds;
    if (metric.kind == MetricKind::StdEuclidean) {
        const std::vector<std::size_t> all(n, 1);  // no held-out fold
        stds = training_stds(m, all, 0);
    }
    auto dist = [&](std::size_t i, std::size_t j) {
        switch (metric.kind) {
            case MetricKind::Euclidean: return sq_euclidean(m.row(i), m.row(j));
            case MetricKind::StdEuclidean: return sq_std_euclidean(m.row(i), m.row(j), stds);
            case MetricKind::CityBlock: return cityblock(m.row(i), m.row(j));
            default: return 0.0;
        }
    };

    std::vector<char> missed(n, 0);
    parallel_for(n, [&](std::size_t i) {
        std::vector<std::pair<double, std::size_t>> neighbors;
        neighbors.reserve(n);
        for (std::size_t j = 0; j < n; ++j) neighbors.emplace_back(dist(i, j), j);
        std::partial_sort(neighbors.begin(), neighbors.begin() + static_cast<long>(kn),
                          neighbors.end());
        missed[i] = m.label(i) != majority_label(neighbors, m.labels(), kn);
    });
    std::size_t total = 0;
    for (char c : missed) total += c;
    return static_cast<double>(total) / static_cast<double>(n);
}

BoundEstimate estimate_bound(const FeatureMatrix& m, const MetricSpec& metric,
                             std::size_t folds, std::uint64_t seed) {
    const CvError cv = nn_error_cv(m, metric, folds, seed);
    std::set<Label> labels(m.labels().begin(), m.labels().end());
    BoundEstimate est;
    est.r_nn = cv.r_nn;
    est.label_count = labels.size();
    est.r_star_lower = bayes_lower_bound(cv.r_nn, est.label_count);
    est.n = m.rows();
    est.folds = folds;
    est.metric = metric_name(metric.kind);
    est.schema = m.schema().name();
    est.seed = seed;
    est.per_fold_errors = cv.per_fold_errors;
    return est;
}

BoundEstimate estimate_bound(const std::vector<std::string>& objects,
                             const std::vector<Label>& labels, std::size_t folds,
                             std::uint64_t seed) {
    const CvError cv = nn_error_cv(objects, labels, folds, seed);
    std::set<Label> distinct(labels.begin(), labels.end());
    BoundEstimate est;
    est.r_nn = cv.r_nn;
    est.label_count = distinct.size();
    est.r_star_lower = bayes_lower_bound(cv.r_nn, est.label_count);
    est.n = objects.size();
    est.folds = folds;
    est.metric = metric_name(MetricKind::Levenshtein);
    est.schema = "dirstring";
    est.seed = seed;
    est.per_fold_errors = cv.per_fold_errors;
    return est;
}

double knn_attack_error(const FeatureMatrix& train, const FeatureMatrix& test,
                        const MetricSpec& metric, std::size_t k) {
    if (train.rows() == 0 || test.rows() == 0)
        throw validation_error("attack needs non-empty train and test sets");
    if (train.dim() != test.dim()) throw validation_error("train/test dimension mismatch");
    if (k < 1) throw validation_error("k must be >= 1");
    if (metric.kind == MetricKind::Levenshtein)
        throw config_error("levenshtein applies to direction strings, not vectors");

    std::vector<double> stds;
    if (metric.kind == MetricKind::StdEuclidean) {
        const std::vector<std::size_t> none(train.rows(), 1);
        stds = training_stds(train, none, 0);
    }
    auto dist = [&](std::span<const double> a, std::span<const double> b) {
        switch (metric.kind) {
            case MetricKind::Euclidean: return sq_euclidean(a, b);
            case MetricKind::StdEuclidean: return sq_std_euclidean(a, b, stds);
            case MetricKind::CityBlock: return cityblock(a, b);
            default: return 0.0;
        }
    };
    const std::size_t kk = std::min(k, train.rows());
    std::vector<char> missed(test.rows(), 0);
    parallel_for(test.rows(), [&](std::size_t i) {
        std::vector<std::pair<double, std::size_t>> neighbors;
        neighbors.reserve(train.rows());
        for (std::size_t j = 0; j < train.rows(); ++j)
            neighbors.emplace_back(dist(test.row(i), train.row(j)), j);
        std::partial_sort(neighbors.begin(), neighbors.begin() + static_cast<long>(kk),
                          neighbors.end());
        missed[i] = test.label(i) != majority_label(neighbors, train.labels(), kk);
    });
    std::size_t total = 0;
    for (char c : missed) total += c;
    return static_cast<double>(total) / static_cast<double>(test.rows());
}

}  // namespace wfbound
