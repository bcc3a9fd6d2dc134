#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wfbound/bounds.hpp"
#include "wfbound/defense.hpp"
#include "wfbound/privacy.hpp"

namespace wfbound {

enum class ScenarioKind { ClosedWorld, OneVsAll };

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::ClosedWorld;
    std::size_t per_class_instances = 90;  // OneVsAll target/background sizes
    FeatureSchema schema;                  // unused when metric is Levenshtein
    MetricSpec metric;
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    DefenseSpec defense;
};

struct PageBound {
    Label page;
    double r_nn = 0.0;
    double r_star_lower = 0.0;
};

struct OneVsAllStats {
    std::vector<PageBound> per_page;
    double mean = 0.0;
    double stddev = 0.0;  // population std over pages
    double min = 0.0;
};

struct ScenarioReport {
    std::string scenario;
    std::string defense;
    BoundEstimate bound;    // OneVsAll: r_nn / r_star_lower are page means
    PrivacyReport privacy;  // epsilon = bound.r_star_lower / R^G
    OverheadReport overheads;
    std::optional<OneVsAllStats> one_vs_all;
};

/// Applies the defense to every trace, drawing each trace's randomness from
/// a stream derived from (defense.seed, trace index). The input dataset
/// doubles as the decoy page source, excluding each trace's own page.
LabeledDataset defend_dataset(const LabeledDataset& dataset, const DefenseSpec& defense);

/// Full-dataset bound in an L-page closed world: defend, extract, stratified
/// CV, bound and privacy with L = page count.
ScenarioReport closed_world_eval(const LabeledDataset& dataset, const ScenarioSpec& spec);

/// Per-page binary bound: each page's traces against an equal number of
/// traces sampled (without replacement) from the other pages and relabeled
/// unmonitored. Reports per-page bounds, their mean +/- population std, and
/// their min; the headline bound carries the page means.
ScenarioReport one_vs_all_eval(const LabeledDataset& dataset, const ScenarioSpec& spec);

struct LearningCurvePoint {
    std::size_t n = 0;                  // training examples used
    double bound = 0.0;                 // CV bound on the training subset only
    std::vector<double> attack_errors;  // one per requested k, on the fixed test set
};

/// Bound-vs-attack validation: a fixed stratified test split, then for each
/// training fraction the CV bound on the subset and the test error of plain
/// k-NN attacks trained on the same subset and feature schema.
std::vector<LearningCurvePoint> learning_curve(const LabeledDataset& dataset,
                                               const ScenarioSpec& spec,
                                               const std::vector<double>& train_fractions,
                                               double test_fraction,
                                               const std::vector<std::size_t>& attack_ks = {1});

}  // namespace wfbound
