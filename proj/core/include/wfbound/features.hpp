#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wfbound/trace.hpp"

namespace wfbound {

enum class SchemaKind { LL, VNGPP, KNN, CUMUL, KFP20, FULLINFO };

const char* schema_name(SchemaKind kind);
SchemaKind schema_from_name(std::string_view name);

/// Fixed feature layout. FULLINFO's dimension depends on max_len (the
/// dataset-wide maximum packet count); all other schemas are constant.
struct FeatureSchema {
    SchemaKind kind = SchemaKind::KFP20;
    std::size_t max_len = 0;       // FULLINFO only
    std::string custom_name;       // overrides the kind name (synthetic matrices)

    std::size_t dimension() const;
    std::string name() const {
        return custom_name.empty() ? schema_name(kind) : custom_name;
    }
};

/// Row-major feature matrix with labels aligned to rows.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(FeatureSchema schema, std::size_t dim)
        : schema_(schema), dim_(dim) {}

    void add_row(std::span<const double> values, Label label);

    std::size_t rows() const noexcept { return labels_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    const FeatureSchema& schema() const noexcept { return schema_; }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values_.data() + i * dim_, dim_);
    }
    const std::vector<Label>& labels() const noexcept { return labels_; }
    const Label& label(std::size_t i) const { return labels_[i]; }

    /// Row subset in the given order; labels follow.
    FeatureMatrix select(std::span<const std::size_t> indices) const;

private:
    FeatureSchema schema_;
    std::size_t dim_ = 0;
    std::vector<double> values_;
    std::vector<Label> labels_;
};

// Per-trace extractors. All are pure and zero-pad fixed layouts.
std::vector<double> extract_ll(const PacketSequence& p);
std::vector<double> extract_vngpp(const PacketSequence& p);
std::vector<double> extract_knn(const PacketSequence& p);
std::vector<double> extract_cumul(const PacketSequence& p);
std::vector<double> extract_kfp20(const PacketSequence& p);
std::vector<double> extract_fullinfo(const PacketSequence& p, std::size_t max_len);

std::vector<double> extract(const PacketSequence& p, const FeatureSchema& schema);

/// Extracts the whole dataset under one schema. For FULLINFO, max_len is
/// resolved to the dataset-wide maximum packet count.
FeatureMatrix extract_matrix(const LabeledDataset& dataset, FeatureSchema schema);

/// CSV export: `label` column then one column per feature, named
/// `<schema>_<index>`.
void write_feature_csv(const FeatureMatrix& m, const std::filesystem::path& path);

}  // namespace wfbound
