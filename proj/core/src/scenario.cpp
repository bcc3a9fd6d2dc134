#include "wfbound/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "wfbound/parallel.hpp"
#include "wfbound/rng.hpp"

namespace wfbound {

namespace {

std::vector<PacketSequence> sequences_of(const LabeledDataset& dataset) {
    std::vector<PacketSequence> out;
    out.reserve(dataset.size());
    for (const auto& e : dataset.entries()) out.push_back(e.sequence);
    return out;
}

/// Bound estimate over a row subset with replacement labels, dispatching on
/// the metric kind (Levenshtein runs on direction strings, everything else
/// on the matrix).
BoundEstimate bound_on_subset(const FeatureMatrix& matrix,
                              const std::vector<std::string>& strings,
                              const std::vector<std::size_t>& rows,
                              const std::vector<Label>& row_labels,
                              const ScenarioSpec& spec) {
    if (spec.metric.kind == MetricKind::Levenshtein) {
        std::vector<std::string> subset;
        subset.reserve(rows.size());
        for (std::size_t r : rows) subset.push_back(strings[r]);
        return estimate_bound(subset, row_labels, spec.folds, spec.seed);
    }
    FeatureMatrix sub(matrix.schema(), matrix.dim());
    for (std::size_t k = 0; k < rows.size(); ++k)
        sub.add_row(matrix.row(rows[k]), row_labels[k]);
    return estimate_bound(sub, spec.metric, spec.folds, spec.seed);
}

std::string scenario_schema_name(const ScenarioSpec& spec) {
    return spec.metric.kind == MetricKind::Levenshtein ? "dirstring"
                                                       : spec.schema.name();
}

}  // namespace

LabeledDataset defend_dataset(const LabeledDataset& dataset, const DefenseSpec& defense) {
    if (dataset.empty()) throw validation_error("empty dataset");
    defense.validate();
    const std::size_t n = dataset.size();
    std::vector<std::optional<PacketSequence>> defended(n);
    std::vector<std::string> failures(n);
    parallel_for(n, [&](std::size_t i) {
        const DatasetEntry& entry = dataset.entries()[i];
        ApplyContext ctx;
        ctx.decoy_source = &dataset;
        ctx.own_label = entry.label;
        ctx.trace_index = i;
        try {
            defended[i] = apply(defense, entry.sequence, ctx);
        } catch (const error& e) {
            failures[i] = e.what();
        }
    });
    std::vector<DatasetEntry> entries;
    entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!defended[i])
            throw validation_error("defense failed on trace " + std::to_string(i) + ": " +
                                   failures[i]);
        entries.push_back(DatasetEntry{std::move(*defended[i]), dataset.entries()[i].label,
                                       dataset.entries()[i].name});
    }
    return LabeledDataset(std::move(entries));
}

ScenarioReport closed_world_eval(const LabeledDataset& dataset, const ScenarioSpec& spec) {
    for (const auto& e : dataset.entries()) {
        if (e.label.is_unmonitored())
            throw validation_error("closed world takes monitored labels only");
    }
    if (dataset.page_count() < 2)
        throw validation_error("closed world needs at least 2 pages");

    const LabeledDataset defended = defend_dataset(dataset, spec.defense);

    ScenarioReport report;
    report.scenario = "closed-world";
    report.defense = spec.defense.name();
    if (spec.metric.kind == MetricKind::Levenshtein) {
        std::vector<std::string> strings(defended.size());
        std::vector<Label> labels;
        labels.reserve(defended.size());
        parallel_for(defended.size(), [&](std::size_t i) {
            strings[i] = direction_string(defended.entries()[i].sequence);
        });
        for (const auto& e : defended.entries()) labels.push_back(e.label);
        report.bound = estimate_bound(strings, labels, spec.folds, spec.seed);
    } else {
        const FeatureMatrix matrix = extract_matrix(defended, spec.schema);
        report.bound = estimate_bound(matrix, spec.metric, spec.folds, spec.seed);
    }
    report.privacy = make_privacy_report(report.bound.r_star_lower,
                                         report.bound.label_count,
                                         scenario_schema_name(spec));
    report.overheads = median_overheads(sequences_of(dataset), sequences_of(defended));
    return report;
}

ScenarioReport one_vs_all_eval(const LabeledDataset& dataset, const ScenarioSpec& spec) {
    if (spec.per_class_instances < spec.folds)
        throw validation_error("per_class_instances must be >= folds");
    const LabeledDataset defended = defend_dataset(dataset, spec.defense);

    // Row indices per page, in dataset order.
    std::map<Label, std::vector<std::size_t>> pages;
    for (std::size_t i = 0; i < defended.size(); ++i)
        pages[defended.entries()[i].label].push_back(i);
    if (pages.size() < 2) throw validation_error("one-vs-all needs at least 2 pages");
    for (const auto& [label, rows] : pages) {
        if (rows.size() < spec.per_class_instances)
            throw validation_error("page " + label.display() + " has " +
                                   std::to_string(rows.size()) + " traces, need " +
                                   std::to_string(spec.per_class_instances));
    }

    FeatureMatrix matrix;
    std::vector<std::string> strings;
    if (spec.metric.kind == MetricKind::Levenshtein) {
        strings.resize(defended.size());
        parallel_for(defended.size(), [&](std::size_t i) {
            strings[i] = direction_string(defended.entries()[i].sequence);
        });
    } else {
        matrix = extract_matrix(defended, spec.schema);
    }

    const std::uint64_t sampling_root = derive_stream(spec.seed, fnv1a("ova-sampling"));
    std::vector<const Label*> page_order;
    for (const auto& [label, rows] : pages) page_order.push_back(&label);

    std::vector<PageBound> per_page(page_order.size());
    std::vector<std::string> failures(page_order.size());
    parallel_for(page_order.size(), [&](std::size_t w) {
        try {
            const Label& target = *page_order[w];
            const std::vector<std::size_t>& own = pages.at(target);
            std::vector<std::size_t> rows(own.begin(),
                                          own.begin() + static_cast<long>(
                                                            spec.per_class_instances));
            std::vector<std::size_t> others;
            others.reserve(defended.size() - own.size());
            for (std::size_t i = 0; i < defended.size(); ++i) {
                if (defended.entries()[i].label != target) others.push_back(i);
            }
            Rng rng(derive_stream(sampling_root, w));
            for (std::size_t pick :
                 rng.sample_without_replacement(others.size(), spec.per_class_instances))
                rows.push_back(others[pick]);

            std::vector<Label> labels;
            labels.reserve(rows.size());
            for (std::size_t k = 0; k < rows.size(); ++k)
                labels.push_back(k < spec.per_class_instances ? target
                                                              : Label::unmonitored());
            const BoundEstimate est = bound_on_subset(matrix, strings, rows, labels, spec);
            per_page[w] = PageBound{target, est.r_nn, est.r_star_lower};
        } catch (const error& e) {
            failures[w] = e.what();
        }
    });
    for (std::size_t w = 0; w < page_order.size(); ++w) {
        if (!failures[w].empty())
            throw validation_error("one-vs-all failed on page " +
                                   page_order[w]->display() + ": " + failures[w]);
    }

    OneVsAllStats stats;
    stats.per_page = per_page;
    double mean_nn = 0.0;
    stats.min = per_page.front().r_star_lower;
    for (const PageBound& pb : per_page) {
        stats.mean += pb.r_star_lower;
        mean_nn += pb.r_nn;
        stats.min = std::min(stats.min, pb.r_star_lower);
    }
    const double pages_n = static_cast<double>(per_page.size());
    stats.mean /= pages_n;
    mean_nn /= pages_n;
    for (const PageBound& pb : per_page) {
        const double d = pb.r_star_lower - stats.mean;
        stats.stddev += d * d;
    }
    stats.stddev = std::sqrt(stats.stddev / pages_n);

    ScenarioReport report;
    report.scenario = "one-vs-all";
    report.defense = spec.defense.name();
    report.bound.r_nn = mean_nn;
    report.bound.r_star_lower = stats.mean;
    report.bound.label_count = 2;
    report.bound.n = 2 * spec.per_class_instances;
    report.bound.folds = spec.folds;
    report.bound.metric = metric_name(spec.metric.kind);
    report.bound.schema = scenario_schema_name(spec);
    report.bound.seed = spec.seed;
    report.privacy = make_privacy_report(stats.mean, 2, scenario_schema_name(spec));
    report.overheads = median_overheads(sequences_of(dataset), sequences_of(defended));
    report.one_vs_all = std::move(stats);
    return report;
}

std::vector<LearningCurvePoint> learning_curve(const LabeledDataset& dataset,
                                               const ScenarioSpec& spec,
                                               const std::vector<double>& train_fractions,
                                               double test_fraction,
                                               const std::vector<std::size_t>& attack_ks) {
    if (train_fractions.empty()) throw config_error("no training fractions given");
    if (attack_ks.empty()) throw config_error("no attack k given");
    double max_fraction = 0.0;
    for (double f : train_fractions) {
        if (!(f > 0.0) || !(f < 1.0))
            throw config_error("training fractions must lie in (0, 1)");
        max_fraction = std::max(max_fraction, f);
    }
    if (!(test_fraction > 0.0) || test_fraction + max_fraction > 1.0 + 1e-12)
        throw config_error("test_fraction + max(train_fractions) must be <= 1");
    if (spec.metric.kind == MetricKind::Levenshtein)
        throw config_error("learning curve requires a numeric feature schema");

    const LabeledDataset defended = defend_dataset(dataset, spec.defense);
    const FeatureMatrix matrix = extract_matrix(defended, spec.schema);

    // Fixed stratified test split; the remainder, in shuffled order, is the
    // training pool each fraction draws its prefix from (subsets nest).
    std::map<Label, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < matrix.rows(); ++i)
        by_label[matrix.label(i)].push_back(i);
    const std::uint64_t split_root = derive_stream(spec.seed, fnv1a("lc-split"));
    std::vector<std::size_t> test_rows;
    std::map<Label, std::vector<std::size_t>> pool;
    std::size_t label_index = 0;
    for (auto& [label, rows] : by_label) {
        Rng rng(derive_stream(split_root, label_index++));
        rng.shuffle(rows);
        const auto test_count = static_cast<std::size_t>(
            std::llround(test_fraction * static_cast<double>(rows.size())));
        if (test_count == 0 || test_count >= rows.size())
            throw validation_error("test split leaves label " + label.display() +
                                   " empty on one side");
        test_rows.insert(test_rows.end(), rows.begin(),
                         rows.begin() + static_cast<long>(test_count));
        pool[label].assign(rows.begin() + static_cast<long>(test_count), rows.end());
    }
    std::sort(test_rows.begin(), test_rows.end());
    const FeatureMatrix test_matrix = matrix.select(test_rows);

    std::vector<LearningCurvePoint> curve;
    for (double fraction : train_fractions) {
        std::vector<std::size_t> subset_rows;
        for (const auto& [label, rows] : pool) {
            auto want = static_cast<std::size_t>(std::llround(
                fraction * static_cast<double>(by_label.at(label).size())));
            if (want < 1)
                throw validation_error("fraction " + std::to_string(fraction) +
                                       " yields no traces for label " + label.display());
            want = std::min(want, rows.size());
            subset_rows.insert(subset_rows.end(), rows.begin(),
                               rows.begin() + static_cast<long>(want));
        }
        std::sort(subset_rows.begin(), subset_rows.end());
        const FeatureMatrix train_matrix = matrix.select(subset_rows);

        LearningCurvePoint point;
        point.n = subset_rows.size();
        point.bound =
            estimate_bound(train_matrix, spec.metric, spec.folds, spec.seed).r_star_lower;
        for (std::size_t k : attack_ks)
            point.attack_errors.push_back(
                knn_attack_error(train_matrix, test_matrix, spec.metric, k));
        curve.push_back(std::move(point));
    }
    return curve;
}

}  // namespace wfbound
